"""Shared fixtures and canonical-image discovery.

The full-scale benchmark tests need the standard 512x512 Peppers and
Cameraman images, which are not vendored (see scripts/fetch_images.py).
Tests that depend on them skip cleanly when the files are absent; the
synthetic phantom covers everything else.
"""

import os
from pathlib import Path

import numpy as np
import pytest

import lptv

REPO_ROOT = Path(__file__).resolve().parents[1]
CANONICAL_DIR = Path(os.environ.get("LPTV_DATA", REPO_ROOT / "data" / "canonical"))


def find_canonical(name: str):
    """Locate a canonical ground-truth image by stem, or None."""
    if not CANONICAL_DIR.is_dir():
        return None
    for ext in (".png", ".pgm"):
        for p in sorted(CANONICAL_DIR.glob(f"*{ext}")):
            if name.lower() in p.stem.lower():
                try:
                    img = lptv.load_grayscale(p)
                except (ValueError, OSError):
                    continue
                if img.shape == (512, 512):
                    return p
    return None


def require_canonical(name: str) -> Path:
    p = find_canonical(name)
    if p is None:
        pytest.skip(f"canonical {name} 512x512 not found under {CANONICAL_DIR} "
                    "(run scripts/fetch_images.py)")
    return p


@pytest.fixture(scope="session")
def phantom64():
    return lptv.piecewise_phantom(64, 64)


@pytest.fixture(scope="session")
def desk_problem(phantom64):
    """The desk-scale cell: 64x64 phantom, gaussian(9, 2), BSNR 30, seed 1."""
    kernel = lptv.gaussian_kernel(9, 2.0)
    cache = lptv.build_spectral_cache(kernel, 64, 64)
    spec = lptv.DegradationSpec(kernel=kernel, bsnr_db=30.0, seed=1)
    observed, sigma = lptv.degrade(phantom64, spec, cache)
    return {"truth": phantom64, "kernel": kernel, "cache": cache,
            "observed": observed, "sigma": sigma, "spec": spec}


def circular_convolve_oracle(img, taps):
    """Direct O(N^2) periodic convolution with a centered kernel; test oracle."""
    img = np.asarray(img, dtype=float)
    taps = np.asarray(taps, dtype=float)
    hh, ww = img.shape
    s = taps.shape[0]
    c = s // 2
    out = np.zeros_like(img)
    for i in range(hh):
        for j in range(ww):
            acc = 0.0
            for a in range(s):
                for b in range(s):
                    acc += taps[a, b] * img[(i - (a - c)) % hh, (j - (b - c)) % ww]
            out[i, j] = acc
    return out
