"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""
import numpy as np


def cheb_values(x, n):
    x = np.asarray(x, dtype=np.float64)
    a = np.ones_like(x)
    if n == 0:
        return a
    b = x.copy()
    for _ in range(1, n):
        a, b = b, x * b - a
    return b


def cheb_sum(x, n):
    return float(cheb_values(x, n).sum())


def cheb_power_sums(x, n_max):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros(n_max + 1)
    a = np.ones_like(x)
    out[0] = x.size
    if n_max >= 1:
        b = x.copy()
        out[1] = b.sum()
        for j in range(2, n_max + 1):
            a, b = b, x * b - a
            out[j] = b.sum()
    return out


def _theta_integral(lo, hi, c, A, B, nodes, weights, panels):
    # lo is an array, hi a scalar; one composite rule per entry of lo
    h = (hi - lo) / panels
    k = np.arange(panels) + 0.5
    t = lo[:, None, None] + h[:, None, None] * (k[None, :, None] + 0.5 * nodes[None, None, :])
    s, co = np.sin(t), np.cos(t)
    w = c * s * s / (A - B * co * co)
    return (w * weights).sum(axis=(1, 2)) * 0.5 * h


def theta_cdf(x, c, A, B, nodes, weights, panels):
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    lo_mask = x <= -2.0
    hi_mask = x >= 2.0
    mid = ~(lo_mask | hi_mask)
    out[lo_mask] = 0.0
    out[hi_mask] = 1.0
    if mid.any():
        out[mid] = _theta_integral(np.arccos(0.5 * x[mid]), np.pi, c, A, B, nodes, weights, panels)
    return out


def inverse_cdf(u, c, A, B, nodes, weights, panels, xtol):
    u = np.asarray(u, dtype=np.float64)
    lo = np.full_like(u, -2.0)
    hi = np.full_like(u, 2.0)
    # every lane halves in lockstep, so one width governs all of them
    while (hi[0] - lo[0] if u.size else 0.0) > xtol:
        mid = 0.5 * (lo + hi)
        below = theta_cdf(mid, c, A, B, nodes, weights, panels) < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def ks_from_cdf(F):
    F = np.asarray(F, dtype=np.float64)
    n = F.size
    if n == 0:
        return 0.0
    i = np.arange(n)
    return float(max(((i + 1) / n - F).max(), (F - i / n).max(), 0.0))
