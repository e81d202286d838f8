"""The z-subproblem: one reweighted-l1 step in closed form.

The nonconvex lp gradient penalty is majorized by a weighted l1 term whose
per-entry weight p/(|v| + eps)^(1-p) is evaluated at the current gradient
value v. One such step is an ordinary soft threshold with an entry-dependent
threshold tau(v) = p*lam / (|v| + eps)^(1-p), so near-zero gradients see an
enormous threshold and get pinned to zero (sparsity), while large gradients
(edges) are barely shrunk. p = 1 collapses to plain soft thresholding with
threshold lam, independent of eps.
"""

from dataclasses import dataclass

import numpy as np

from . import _core
from .operators import GradientField


@dataclass(frozen=True)
class PenaltyParams:
    """Shrinkage parameters: exponent p in (0, 1], lam = mu/(L*beta), guard eps."""
    p: float
    lam: float
    epsilon: float = 1e-8

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"p must be in (0, 1], got {self.p}")
        if not self.lam >= 0.0:
            raise ValueError(f"lam must be nonnegative, got {self.lam}")
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")


def irl1_threshold(vbar, params: PenaltyParams):
    """Entrywise threshold tau = p*lam / (|vbar| + eps)^(1-p).

    Accepts scalars or arrays; eps guards the singularity at vbar = 0.
    """
    return (params.p * params.lam) / (np.abs(vbar) + params.epsilon) ** (1.0 - params.p)


def shrink_scalar(vbar: float, params: PenaltyParams) -> float:
    """Soft threshold one value with its own weight: sgn(v)*max(0, |v| - tau(v))."""
    v = float(vbar)
    tau = (params.p * params.lam) / (abs(v) + params.epsilon) ** (1.0 - params.p)
    return float(np.sign(v) * max(0.0, abs(v) - tau))


def shrink_field(vbar: GradientField, params: PenaltyParams) -> GradientField:
    """shrink_scalar applied independently to every entry of both components."""
    return GradientField(
        dx=_core.shrink_weighted(vbar.dx, params.p, params.lam, params.epsilon),
        dy=_core.shrink_weighted(vbar.dy, params.p, params.lam, params.epsilon),
    )


def prox_oracle_weighted_l1(v: float, w: float) -> float:
    """Brute-force argmin of (1/2)(z - v)^2 + w|z| by grid search; test oracle.

    Searches [-2|v|, 2|v|] at resolution |v|*1e-4, then refines once around
    the coarse argmin at 100x finer spacing. Slow on purpose; used only to
    cross-check the closed form.
    """
    v = float(v)
    if v == 0.0:
        return 0.0

    def best(lo, hi, n):
        grid = np.linspace(lo, hi, n)
        vals = 0.5 * (grid - v) ** 2 + w * np.abs(grid)
        return grid[int(np.argmin(vals))]

    span = 2.0 * abs(v)
    step = abs(v) * 1e-4
    n = int(2.0 * span / step) + 1
    z0 = best(-span, span, n)
    return float(best(z0 - step, z0 + step, 201))
