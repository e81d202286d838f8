"""Pure numpy implementations of the hot kernels."""

import numpy as np


def shrink_weighted(v, p, lam, eps):
    """Reweighted soft threshold, elementwise over v.

    tau = p*lam / (|v| + eps)^(1-p); returns sgn(v) * max(0, |v| - tau).
    """
    mag = np.abs(v)
    tau = (p * lam) / (mag + eps) ** (1.0 - p)
    return np.sign(v) * np.maximum(0.0, mag - tau)


def lp_power_sum(dx, dy, p):
    """Sum of |dx_i|^p + |dy_i|^p over all entries."""
    if p == 1.0:  # skip the pow pass, |x|^1 == |x|
        return float(np.abs(dx).sum() + np.abs(dy).sum())
    return float((np.abs(dx) ** p).sum() + (np.abs(dy) ** p).sum())
