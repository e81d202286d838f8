"""lp total-variation image restoration.

Restores blurred, noise-corrupted grayscale images by minimizing

    (1/2)||Ku - f||^2 + mu * sum_i (|dx_i|^p + |dy_i|^p),   0 < p <= 1,

via quadratic-penalty alternating minimization: the gradient variable takes
one reweighted-l1 soft-threshold step and the image variable one FFT solve
per iteration, with an optional Nesterov extrapolation between them. The
`lptv` CLI wraps degradation, restoration, metrics, and a batch benchmark.
"""

from ._core import BACKEND as KERNEL_BACKEND
from .degrade import (DegradationSpec, bsnr_noise_sigma, compute_bsnr, degrade,
                      piecewise_phantom)
from .imaging import load_grayscale, quantize, save_grayscale, validate_image
from .metrics import MetricReport, evaluate, psnr, ssim
from .operators import (BlurKernel, GradientField, SpectralCache, blur_periodic,
                        build_spectral_cache, gaussian_kernel, grad_adjoint,
                        grad_forward, solve_u)
from .shrinkage import (PenaltyParams, irl1_threshold, prox_oracle_weighted_l1,
                        shrink_field, shrink_scalar)
from .solvers import (ConvergenceTrace, SolverConfig, apirl1_am, objective,
                      pirl1_am, relative_error)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND", "__version__",
    "load_grayscale", "save_grayscale", "quantize", "validate_image",
    "BlurKernel", "GradientField", "SpectralCache", "gaussian_kernel",
    "build_spectral_cache", "blur_periodic", "grad_forward", "grad_adjoint",
    "solve_u",
    "PenaltyParams", "irl1_threshold", "shrink_scalar", "shrink_field",
    "prox_oracle_weighted_l1",
    "DegradationSpec", "bsnr_noise_sigma", "degrade", "compute_bsnr",
    "piecewise_phantom",
    "MetricReport", "psnr", "ssim", "evaluate",
    "SolverConfig", "ConvergenceTrace", "relative_error", "objective",
    "pirl1_am", "apirl1_am",
]
