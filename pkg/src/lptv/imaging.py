"""Grayscale image I/O and intensity conventions.

Images are float64 arrays in the working range [0, 255]; quantization to
8 bits happens only at file boundaries. Readers reject color and non-8-bit
inputs outright so experiment provenance stays unambiguous. Supported
formats: PNG and binary PGM (P5, maxval 255), chosen by file extension.
"""

import os

import numpy as np
from PIL import Image

MIN_SIDE = 2  # difference operators need two samples per axis


def validate_image(arr, name: str = "image") -> np.ndarray:
    """Check array invariants and return the array as float64.

    Requires a 2-D real array, both sides >= 2, all entries finite.
    """
    a = np.asarray(arr)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if a.shape[0] < MIN_SIDE or a.shape[1] < MIN_SIDE:
        raise ValueError(f"{name} must be at least {MIN_SIDE}x{MIN_SIDE}, got {a.shape}")
    if not np.issubdtype(a.dtype, np.floating) and not np.issubdtype(a.dtype, np.integer):
        raise ValueError(f"{name} must be real-valued, got dtype {a.dtype}")
    a = a.astype(np.float64, copy=False)
    if not np.isfinite(a).all():
        raise ValueError(f"{name} contains non-finite entries")
    return a


def quantize(img) -> np.ndarray:
    """Clamp to [0, 255] and round half away from zero to uint8."""
    a = validate_image(img)
    # Half-away-from-zero: for nonnegative values floor(x + 0.5).
    # np.round would round halves to even (127.5 -> 128 is required here).
    return np.floor(np.clip(a, 0.0, 255.0) + 0.5).astype(np.uint8)


def _read_pgm(path):
    with open(path, "rb") as fh:
        data = fh.read()

    # Header tokens may be separated by whitespace and '#' comments.
    pos = 0

    def token():
        nonlocal pos
        while pos < len(data):
            c = data[pos:pos + 1]
            if c == b"#":
                while pos < len(data) and data[pos:pos + 1] != b"\n":
                    pos += 1
            elif c.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError(f"{path}: truncated PGM header")
        return data[start:pos]

    magic = token()
    if magic != b"P5":
        raise ValueError(f"{path}: not a binary PGM (P5) file")
    width = int(token())
    height = int(token())
    maxval = int(token())
    if maxval != 255:
        raise ValueError(f"{path}: only maxval 255 supported, got {maxval}")
    pos += 1  # single whitespace byte after maxval
    raster = data[pos:pos + width * height]
    if len(raster) != width * height:
        raise ValueError(f"{path}: raster truncated")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width)


def _write_pgm(path, bytes_img: np.ndarray):
    h, w = bytes_img.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(bytes_img.tobytes())


def _read_png(path):
    with Image.open(path) as im:
        if im.mode != "L":
            raise ValueError(
                f"{path}: mode {im.mode!r} rejected; only 8-bit grayscale "
                "(mode 'L') is accepted, convert explicitly first")
        return np.asarray(im, dtype=np.uint8)


def load_grayscale(path) -> np.ndarray:
    """Load an 8-bit grayscale PNG or PGM as float64 in [0, 255].

    Intensities are exact real copies of the stored byte codes. Color or
    deeper-than-8-bit inputs are rejected, never converted silently.
    """
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such image: {path}")
    ext = os.path.splitext(path)[1].lower()
    if ext == ".png":
        raw = _read_png(path)
    elif ext == ".pgm":
        raw = _read_pgm(path)
    else:
        raise ValueError(f"{path}: unsupported extension {ext!r} (use .png or .pgm)")
    return validate_image(raw, name=path)


def save_grayscale(img, path) -> None:
    """Write img as an 8-bit grayscale file (clamp, then round half away from zero)."""
    path = os.fspath(path)
    bytes_img = quantize(img)
    ext = os.path.splitext(path)[1].lower()
    if ext == ".png":
        Image.fromarray(bytes_img, mode="L").save(path)
    elif ext == ".pgm":
        _write_pgm(path, bytes_img)
    else:
        raise ValueError(f"{path}: unsupported extension {ext!r} (use .png or .pgm)")
