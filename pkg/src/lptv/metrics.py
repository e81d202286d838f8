"""Image quality metrics: PSNR and mean SSIM.

SSIM follows the canonical single-scale definition: 11x11 Gaussian window
with sigma 1.5 normalized to sum 1, stabilizers C1 = (0.01*peak)^2 and
C2 = (0.03*peak)^2, statistics over valid window positions only, Gaussian-
weighted moments without sample-covariance correction.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.signal import fftconvolve

from .imaging import validate_image

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5


@dataclass(frozen=True)
class MetricReport:
    psnr_db: float
    ssim: float

    def to_json(self) -> dict:
        return asdict(self)


def _check_pair(a, b):
    a = validate_image(a, "a")
    b = validate_image(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def psnr(a, b, peak: float = 255.0) -> float:
    """10*log10(peak^2 / MSE); +inf for identical images."""
    a, b = _check_pair(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def _gaussian_window(size, sigma):
    r = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    g = np.exp(-(r[:, None] ** 2 + r[None, :] ** 2) / (2.0 * sigma * sigma))
    return g / g.sum()


def ssim(a, b, peak: float = 255.0) -> float:
    """Mean local SSIM over all valid 11x11 window positions."""
    a, b = _check_pair(a, b)
    if min(a.shape) < SSIM_WINDOW:
        raise ValueError(f"image smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window")
    w = _gaussian_window(SSIM_WINDOW, SSIM_SIGMA)
    c1 = (0.01 * peak) ** 2
    c2 = (0.03 * peak) ** 2

    def win(x):
        return fftconvolve(x, w, mode="valid")

    mu_a = win(a)
    mu_b = win(b)
    s_aa = win(a * a) - mu_a * mu_a
    s_bb = win(b * b) - mu_b * mu_b
    s_ab = win(a * b) - mu_a * mu_b
    num = (2.0 * mu_a * mu_b + c1) * (2.0 * s_ab + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (s_aa + s_bb + c2)
    return float(np.mean(num / den))


def evaluate(restored, reference, peak: float = 255.0) -> MetricReport:
    """Metric pair for a restored image, clamped to [0, peak] first."""
    r = np.clip(validate_image(restored, "restored"), 0.0, peak)
    return MetricReport(psnr_db=psnr(r, reference, peak), ssim=ssim(r, reference, peak))
