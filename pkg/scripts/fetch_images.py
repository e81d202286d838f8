"""Fetch or register the canonical 512x512 benchmark images.

The full-scale benchmark tests compare against reference values measured on
the standard grayscale Peppers and Cameraman test images. Those images are
not distributed with this repository; this script downloads them from
well-known academic mirrors (or registers local copies you already have)
and records provenance hashes alongside the normalized PNGs.

    python3 scripts/fetch_images.py                  # try the default mirrors
    python3 scripts/fetch_images.py --url peppers=https://host/peppers.tif
    python3 scripts/fetch_images.py --from-file cameraman=/path/cameraman.tif

Images land in data/canonical/<name>.png (8-bit grayscale, 512x512) with a
PROVENANCE.json next to them. Tests that need these images skip when the
files are absent, so running this script is optional.
"""

import argparse
import hashlib
import io
import json
import sys
import time
import urllib.request
import zipfile
from pathlib import Path

import numpy as np
from PIL import Image

REPO_ROOT = Path(__file__).resolve().parents[1]
DEFAULT_DIR = REPO_ROOT / "data" / "canonical"
NAMES = ("peppers", "cameraman")

# Best-effort mirrors. The Gonzalez/Woods archive carries 512x512 grayscale
# versions of both images in one zip; USC-SIPI has a color Peppers that we
# convert with the usual BT.601 luma weights.
GONZALEZ_ZIP = ("https://www.imageprocessingplace.com/downloads_V3/"
                "root_downloads/image_databases/standard_test_images.zip")
ZIP_MEMBERS = {"peppers": "peppers_gray.tif", "cameraman": "cameraman.tif"}
SIPI_PEPPERS = "https://sipi.usc.edu/database/download.php?vol=misc&img=4.2.07"


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def fetch(url: str, timeout: float = 60.0) -> bytes:
    req = urllib.request.Request(url, headers={"User-Agent": "image-fetch/1.0"})
    with urllib.request.urlopen(req, timeout=timeout) as resp:
        return resp.read()


def normalize(raw: bytes, name: str) -> np.ndarray:
    """Decode, convert to 8-bit grayscale, and insist on 512x512."""
    img = Image.open(io.BytesIO(raw))
    if img.mode != "L":
        img = img.convert("L")
    arr = np.asarray(img, dtype=np.uint8)
    if arr.shape != (512, 512):
        raise ValueError(f"{name}: expected 512x512, got {arr.shape}; "
                         "refusing to resample")
    return arr


def save(arr: np.ndarray, name: str, source: str, raw: bytes,
         out_dir: Path, provenance: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    png_path = out_dir / f"{name}.png"
    Image.fromarray(arr).save(png_path)
    provenance[name] = {
        "source": source,
        "retrieved": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "original_sha256": sha256(raw),
        "png_sha256": sha256(png_path.read_bytes()),
    }
    print(f"wrote {png_path} (source: {source})")


def try_zip_archive(wanted, out_dir, provenance) -> set:
    got = set()
    try:
        blob = fetch(GONZALEZ_ZIP)
    except OSError as exc:
        print(f"archive mirror unreachable: {exc}", file=sys.stderr)
        return got
    with zipfile.ZipFile(io.BytesIO(blob)) as zf:
        members = {Path(m).name: m for m in zf.namelist()}
        for name in wanted:
            member = members.get(ZIP_MEMBERS[name])
            if member is None:
                continue
            raw = zf.read(member)
            try:
                save(normalize(raw, name), name,
                     f"{GONZALEZ_ZIP}#{ZIP_MEMBERS[name]}", raw,
                     out_dir, provenance)
                got.add(name)
            except ValueError as exc:
                print(exc, file=sys.stderr)
    return got


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="download or register the canonical benchmark images")
    parser.add_argument("--dest", type=Path, default=DEFAULT_DIR,
                        help=f"output directory (default {DEFAULT_DIR})")
    parser.add_argument("--url", action="append", default=[],
                        metavar="NAME=URL", help="fetch NAME from URL instead")
    parser.add_argument("--from-file", action="append", default=[],
                        metavar="NAME=PATH", help="register a local copy")
    args = parser.parse_args(argv)

    overrides = {}
    local = {}
    for spec, store in ((args.url, overrides), (args.from_file, local)):
        for item in spec:
            name, _, value = item.partition("=")
            if name not in NAMES or not value:
                parser.error(f"expected NAME=VALUE with NAME in {NAMES}: {item}")
            store[name] = value

    prov_path = args.dest / "PROVENANCE.json"
    provenance = json.loads(prov_path.read_text()) if prov_path.exists() else {}
    done = set()

    for name, path in local.items():
        try:
            raw = Path(path).read_bytes()
            save(normalize(raw, name), name, str(Path(path).resolve()), raw,
                 args.dest, provenance)
            done.add(name)
        except (OSError, ValueError) as exc:
            print(f"could not register {name}: {exc}", file=sys.stderr)

    for name, url in overrides.items():
        if name in done:
            continue
        try:
            raw = fetch(url)
            save(normalize(raw, name), name, url, raw, args.dest, provenance)
            done.add(name)
        except (OSError, ValueError) as exc:
            print(f"could not fetch {name}: {exc}", file=sys.stderr)

    remaining = [n for n in NAMES if n not in done]
    if remaining:
        done |= try_zip_archive(remaining, args.dest, provenance)

    if "peppers" not in done:
        try:
            raw = fetch(SIPI_PEPPERS)
            save(normalize(raw, "peppers"), "peppers", SIPI_PEPPERS, raw,
                 args.dest, provenance)
            done.add("peppers")
        except (OSError, ValueError) as exc:
            print(f"peppers fallback mirror failed: {exc}", file=sys.stderr)

    if provenance:
        args.dest.mkdir(parents=True, exist_ok=True)
        prov_path.write_text(json.dumps(provenance, indent=2, sort_keys=True)
                             + "\n")

    missing = [n for n in NAMES if n not in done]
    if missing:
        print(f"still missing: {', '.join(missing)}; pass --url or "
              "--from-file for them", file=sys.stderr)
        return 1
    print("all canonical images registered")
    return 0


if __name__ == "__main__":
    sys.exit(main())
