"""Spectral linear algebra: blur, forward differences, and the u-update solve.

Everything here assumes periodic boundaries so that both the blur operator K
and the difference operator pair (Dx, Dy) diagonalize under the 2-D DFT. The
penalized normal equations

    (K'K + beta (Dx'Dx + Dy'Dy)) u = K'f + beta (Dx'zx + Dy'zy)

then reduce to one elementwise division in the frequency domain per solve.
"""

import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.fft as sfft

from .imaging import validate_image


class GradientField(NamedTuple):
    """Anisotropic gradient: horizontal and vertical forward differences."""
    dx: np.ndarray
    dy: np.ndarray


@dataclass(frozen=True)
class BlurKernel:
    """Square PSF with odd support, taps nonnegative and summing to 1."""
    size: int
    sigma: float
    taps: np.ndarray

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=np.float64)
        if self.size % 2 == 0 or self.size < 1:
            raise ValueError(f"kernel size must be odd and positive, got {self.size}")
        if taps.shape != (self.size, self.size):
            raise ValueError(f"taps shape {taps.shape} != ({self.size}, {self.size})")
        if not np.isfinite(taps).all() or (taps < 0).any():
            raise ValueError("kernel taps must be finite and nonnegative")
        if abs(taps.sum() - 1.0) > 1e-12:
            raise ValueError(f"kernel taps must sum to 1, got {taps.sum()!r}")
        object.__setattr__(self, "taps", taps)

    def to_json(self) -> dict:
        return {"size": self.size, "sigma": self.sigma,
                "taps": [float(t) for t in self.taps.ravel()]}

    @classmethod
    def from_json(cls, obj: dict) -> "BlurKernel":
        size = int(obj["size"])
        taps = np.asarray(obj["taps"], dtype=np.float64).reshape(size, size)
        return cls(size=size, sigma=float(obj["sigma"]), taps=taps)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "BlurKernel":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class SpectralCache:
    """Frequency responses of K, Dx, Dy for one image size, built once.

    denom_base = |khat|^2 and lap_spec = |dxhat|^2 + |dyhat|^2 are kept
    separately so one cache serves every beta.
    """
    khat: np.ndarray
    dxhat: np.ndarray
    dyhat: np.ndarray
    denom_base: np.ndarray
    lap_spec: np.ndarray

    @property
    def shape(self):
        return self.khat.shape


def gaussian_kernel(size: int, sigma: float) -> BlurKernel:
    """Isotropic Gaussian PSF on a size x size grid, normalized to sum 1."""
    if size % 2 == 0 or size < 1:
        raise ValueError(f"size must be odd and positive, got {size}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    c = size // 2
    r = np.arange(size, dtype=np.float64) - c
    g = np.exp(-(r[:, None] ** 2 + r[None, :] ** 2) / (2.0 * sigma * sigma))
    return BlurKernel(size=size, sigma=float(sigma), taps=g / g.sum())


def _embed_psf(kernel: BlurKernel, height, width):
    # Zero-pad to the image size, then roll the center tap to (0, 0) so the
    # spectrum carries no phase offset (blurring a delta reproduces the PSF).
    pad = np.zeros((height, width), dtype=np.float64)
    s, c = kernel.size, kernel.size // 2
    pad[:s, :s] = kernel.taps
    return np.roll(pad, (-c, -c), axis=(0, 1))


def build_spectral_cache(kernel: BlurKernel, height: int, width: int) -> SpectralCache:
    """Precompute frequency responses of the blur and difference operators."""
    if kernel.size > min(height, width):
        raise ValueError(
            f"kernel size {kernel.size} exceeds image side min({height}, {width})")
    khat = sfft.fft2(_embed_psf(kernel, height, width))

    # Forward-difference impulse responses under periodic wrap. Convolution
    # flips the index: dx(j) = u(j+1) - u(j) needs the +1 tap at index -1,
    # which wraps to the last sample (fft of {-1 at 0, +1 at W-1} is
    # e^{2*pi*i*k/W} - 1, the shift-theorem response of a forward step).
    sx = np.zeros((height, width))
    sx[0, 0] -= 1.0
    sx[0, (width - 1) % width] += 1.0
    sy = np.zeros((height, width))
    sy[0, 0] -= 1.0
    sy[(height - 1) % height, 0] += 1.0
    dxhat = sfft.fft2(sx)
    dyhat = sfft.fft2(sy)

    denom_base = (khat * khat.conj()).real
    lap_spec = (dxhat * dxhat.conj()).real + (dyhat * dyhat.conj()).real
    return SpectralCache(khat=khat, dxhat=dxhat, dyhat=dyhat,
                         denom_base=denom_base, lap_spec=lap_spec)


def blur_periodic(img, cache: SpectralCache) -> np.ndarray:
    """Circular convolution of img with the cached kernel."""
    a = validate_image(img)
    if a.shape != cache.shape:
        raise ValueError(f"image shape {a.shape} != cache shape {cache.shape}")
    return sfft.ifft2(sfft.fft2(a) * cache.khat).real


def grad_forward(img) -> GradientField:
    """Periodic forward differences: dx(i,j) = u(i, j+1 mod W) - u(i,j), same for dy."""
    a = np.asarray(img, dtype=np.float64)
    dx = np.roll(a, -1, axis=1) - a
    dy = np.roll(a, -1, axis=0) - a
    return GradientField(dx=dx, dy=dy)


def grad_adjoint(field: GradientField) -> np.ndarray:
    """Exact adjoint of grad_forward (negative periodic backward divergence)."""
    dx, dy = field
    return (np.roll(dx, 1, axis=1) - dx) + (np.roll(dy, 1, axis=0) - dy)


def solve_u(z: GradientField, f, beta: float, cache: SpectralCache,
            f_hat=None) -> np.ndarray:
    """Solve (K'K + beta grad' grad) u = K'f + beta grad'z spectrally.

    Args:
        z: gradient-domain target field.
        f: observed image.
        beta: penalty weight, > 0.
        cache: spectral cache matching f's shape.
        f_hat: optional precomputed fft2(f), an allocation saved in hot loops.

    The division is elementwise over frequencies; a denominator entry below
    1e-15 with right-hand-side energy above 1e-12 at the same frequency means
    the system is ill-posed for this kernel/beta and is reported, not patched.
    """
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if f_hat is None:
        f_hat = sfft.fft2(np.asarray(f, dtype=np.float64))
    rhs_hat = (cache.khat.conj() * f_hat
               + beta * (cache.dxhat.conj() * sfft.fft2(z.dx)
                         + cache.dyhat.conj() * sfft.fft2(z.dy)))
    denom = cache.denom_base + beta * cache.lap_spec
    bad = denom < 1e-15
    if bad.any() and (np.abs(rhs_hat[bad]) > 1e-12).any():
        raise ValueError("ill-posed u-update: vanishing spectral denominator "
                         "at a frequency with nonzero right-hand side")
    if bad.any():
        # RHS vanishes there too; any finite value works, pick 0/1 = 0.
        denom = np.where(bad, 1.0, denom)
    return sfft.ifft2(rhs_hat / denom).real
