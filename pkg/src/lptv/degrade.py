"""Test-problem synthesis: blur + white Gaussian noise at a target BSNR.

The observed image is f = Ku + n with n ~ N(0, sigma^2 I), sigma calibrated
so that 10*log10(Var(Ku) / sigma^2) equals the requested blurred
signal-to-noise ratio. Noise comes from numpy's Generator(PCG64) so a seed
in a manifest pins the realization bit-exactly across runs and machines.
"""

from dataclasses import dataclass

import numpy as np

from .imaging import validate_image
from .operators import BlurKernel, SpectralCache, blur_periodic

RNG_ALGORITHM = "numpy.random.Generator(PCG64).standard_normal"


@dataclass(frozen=True)
class DegradationSpec:
    kernel: BlurKernel
    bsnr_db: float
    seed: int

    def __post_init__(self):
        if not np.isfinite(self.bsnr_db):
            raise ValueError(f"bsnr_db must be finite, got {self.bsnr_db}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")


def bsnr_noise_sigma(blurred, bsnr_db: float) -> float:
    """Noise sigma hitting the target BSNR: sigma^2 = Var(blurred) / 10^(bsnr/10)."""
    a = validate_image(blurred, "blurred")
    var = float(a.var())  # mean-removed, per-pixel
    if var == 0.0:
        raise ValueError("blurred image is constant; BSNR is undefined")
    return float(np.sqrt(var / 10.0 ** (bsnr_db / 10.0)))


def degrade(truth, spec: DegradationSpec, cache: SpectralCache):
    """Blur truth and add seeded white Gaussian noise; returns (observed, sigma).

    The observed image is left unclamped (real-valued); clamping and
    quantization belong to export, not to the degradation model.
    """
    blurred = blur_periodic(truth, cache)
    sigma = bsnr_noise_sigma(blurred, spec.bsnr_db)
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    noise = sigma * rng.standard_normal(blurred.shape)
    return blurred + noise, sigma


def compute_bsnr(blurred, noise) -> float:
    """Realized BSNR from a (blurred, noise) pair: 10*log10(Var(b)/MeanSq(n))."""
    b = validate_image(blurred, "blurred")
    n = validate_image(noise, "noise")
    if b.shape != n.shape:
        raise ValueError(f"shape mismatch: {b.shape} vs {n.shape}")
    ms = float(np.mean(n * n))
    if ms == 0.0:
        raise ValueError("noise is identically zero; BSNR is undefined")
    return float(10.0 * np.log10(b.var() / ms))


def piecewise_phantom(height: int = 64, width: int = 64) -> np.ndarray:
    """Deterministic piecewise-constant test image in [0, 255].

    Flat background with overlapping rectangles, a disk, and a thin bar;
    plenty of sharp edges at several scales, which is the regime the
    gradient-sparsity prior is built for.
    """
    if height < 8 or width < 8:
        raise ValueError("phantom needs at least 8x8")
    u = np.full((height, width), 32.0)
    hh, ww = height, width

    def box(r0, r1, c0, c1, val):
        u[int(r0 * hh):int(r1 * hh), int(c0 * ww):int(c1 * ww)] = val

    box(0.10, 0.55, 0.10, 0.40, 96.0)
    box(0.30, 0.85, 0.30, 0.65, 160.0)
    box(0.15, 0.35, 0.55, 0.90, 224.0)
    rr, cc = np.mgrid[0:hh, 0:ww]
    disk = (rr - 0.68 * hh) ** 2 + (cc - 0.75 * ww) ** 2 <= (0.14 * min(hh, ww)) ** 2
    u[disk] = 255.0
    box(0.88, 0.94, 0.08, 0.92, 128.0)
    return u
