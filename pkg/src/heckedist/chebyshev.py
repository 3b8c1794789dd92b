"""Chebyshev polynomials X_n(x) = U_n(x/2) and the measures mu_p, mu_inf.

Every integral against mu_p is taken after the substitution x = 2 cos(theta),
which turns the square-root endpoint behaviour of both densities into the
smooth weight sin(theta)^2 / (A - B cos(theta)^2) on [0, pi].
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from ._backend import kernels
from .errors import DomainError, NumericError
from .numtheory import is_prime

MAX_COEFF_DEGREE = 64
GL_ORDER = 16
MOMENT_TOL = 1e-12
CDF_TOL = 1e-10
SAMPLE_XTOL = 1e-10
MAX_PANELS = 1 << 12

_NODES, _WEIGHTS = (np.ascontiguousarray(a) for a in np.polynomial.legendre.leggauss(GL_ORDER))


@dataclass(frozen=True)
class ChebyshevX:
    degree: int
    coeffs: tuple[int, ...]  # ascending powers of x

    def __call__(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


@lru_cache(maxsize=None)
def cheb_coeffs(n: int) -> ChebyshevX:
    """Exact monomial coefficients of X_n from X_{n+1} = x X_n - X_{n-1}."""
    if n < 0 or n > MAX_COEFF_DEGREE:
        raise DomainError(f"cheb_coeffs supports 0 <= n <= {MAX_COEFF_DEGREE}, got {n}")
    prev, cur = [1], [0, 1]
    if n == 0:
        return ChebyshevX(0, (1,))
    for _ in range(1, n):
        nxt = [0] + cur
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return ChebyshevX(n, tuple(cur))


def cheb_eval(n: int, x):
    """X_n(x) by the three-term recurrence; ``x`` may be a scalar or an array."""
    if n < 0:
        raise DomainError(f"degree must be nonnegative, got {n}")
    if np.ndim(x):
        return kernels.cheb_values(np.ascontiguousarray(x, dtype=np.float64), n)
    a, b = 1.0, float(x)
    if n == 0:
        return a
    for _ in range(1, n):
        a, b = b, x * b - a
    return b


@dataclass(frozen=True)
class MeasureP:
    """mu_p for a prime p, or mu_inf (the semicircle) when ``p`` is None."""

    p: Optional[int] = None

    def __post_init__(self):
        if self.p is not None and not is_prime(self.p):
            raise DomainError(f"mu_p needs a prime p, got {self.p}")

    @property
    def is_infinite(self) -> bool:
        return self.p is None

    @property
    def label(self) -> str:
        return "inf" if self.p is None else str(self.p)

    @classmethod
    def parse(cls, text: str) -> "MeasureP":
        if str(text).lower() in ("inf", "infinity", "oo"):
            return cls(None)
        try:
            return cls(int(text))
        except ValueError:
            raise DomainError(f"expected a prime or 'inf', got {text!r}") from None

    def theta_params(self) -> tuple[float, float, float]:
        """(c, A, B) with theta-density c sin^2 / (A - B cos^2)."""
        if self.p is None:
            return 2.0 / math.pi, 1.0, 0.0
        p = self.p
        return 2.0 * (p + 1) / math.pi, p + 2.0 + 1.0 / p, 4.0


MU_INF = MeasureP(None)


def _check_interval(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(arr) > 2.0) or np.any(np.isnan(arr)):
        raise DomainError("measure is supported on [-2, 2]")
    return arr


def density(mu: MeasureP, x):
    arr = _check_interval(x)
    root = np.sqrt(np.maximum(1.0 - arr * arr / 4.0, 0.0))
    if mu.is_infinite:
        out = root / math.pi
    else:
        p = mu.p
        out = (p + 1) / math.pi * root / ((math.sqrt(p) + 1 / math.sqrt(p)) ** 2 - arr * arr)
    return float(out) if out.ndim == 0 else out


def _vectorize(g: Callable) -> Callable[[np.ndarray], np.ndarray]:
    probe = np.array([0.0, 1.0])
    try:
        out = np.asarray(g(probe), dtype=np.float64)
        if out.shape == probe.shape:
            return lambda x: np.asarray(g(x), dtype=np.float64)
    except Exception:
        pass
    return np.vectorize(lambda t: float(g(t)), otypes=[np.float64])


def _composite_theta(gv, mu: MeasureP, panels: int, lo: float = 0.0, hi: float = math.pi) -> float:
    c, A, B = mu.theta_params()
    h = (hi - lo) / panels
    mids = lo + (np.arange(panels) + 0.5) * h
    t = (mids[:, None] + 0.5 * h * _NODES[None, :]).ravel()
    s, co = np.sin(t), np.cos(t)
    w = c * s * s / (A - B * co * co)
    vals = gv(2.0 * co) * w
    return float((vals.reshape(panels, GL_ORDER) * _WEIGHTS).sum() * 0.5 * h)


def integrate(g: Callable, mu: MeasureP, tol: float = MOMENT_TOL) -> float:
    """Integral of ``g`` over [-2, 2] against ``mu``.

    Composite Gauss-Legendre in theta; the panel count doubles until two
    successive estimates agree to tol/2.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    gv = _vectorize(g)
    panels = 1
    prev = _composite_theta(gv, mu, panels)
    while panels < MAX_PANELS:
        panels *= 2
        cur = _composite_theta(gv, mu, panels)
        if abs(cur - prev) <= tol / 2:
            return cur
        prev = cur
    raise NumericError(f"quadrature did not reach tol={tol} with {MAX_PANELS} panels", estimate=prev)


def moment_closed_form(n: int, p: int) -> Fraction:
    """Integral of X_n against mu_p: p^(-n/2) for even n, zero for odd n."""
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    return Fraction(0) if n % 2 else Fraction(1, p ** (n // 2))


_PROBE = np.ascontiguousarray(np.linspace(-2.0, 2.0, 33)[1:-1])


@lru_cache(maxsize=None)
def _cdf_panels(mu: MeasureP, tol: float) -> int:
    # longest theta-interval wins; shorter intervals with the same panel
    # count are at least as accurate
    c, A, B = mu.theta_params()
    panels = 1
    prev = kernels.theta_cdf(_PROBE, c, A, B, _NODES, _WEIGHTS, panels)
    while panels < MAX_PANELS:
        panels *= 2
        cur = kernels.theta_cdf(_PROBE, c, A, B, _NODES, _WEIGHTS, panels)
        if np.max(np.abs(cur - prev)) <= tol / 2:
            return panels
        prev = cur
    raise NumericError(f"cdf quadrature did not reach tol={tol}", estimate=prev)


def cdf(mu: MeasureP, x, tol: float = CDF_TOL):
    """mu([-2, x]); scalar in, scalar out, array in, array out."""
    arr = _check_interval(x)
    if tol <= 0:
        raise DomainError("tol must be positive")
    c, A, B = mu.theta_params()
    flat = np.ascontiguousarray(arr.ravel())
    out = kernels.theta_cdf(flat, c, A, B, _NODES, _WEIGHTS, _cdf_panels(mu, tol))
    out = np.clip(out, 0.0, 1.0).reshape(arr.shape)
    return float(out) if arr.ndim == 0 else out


def sample(mu: MeasureP, count: int, seed: int, xtol: float = SAMPLE_XTOL) -> np.ndarray:
    """``count`` i.i.d. draws by bisection on the CDF; reproducible per seed."""
    if count < 0:
        raise DomainError(f"count must be nonnegative, got {count}")
    u = np.random.default_rng(seed).random(count)
    c, A, B = mu.theta_params()
    return kernels.inverse_cdf(
        np.ascontiguousarray(u), c, A, B, _NODES, _WEIGHTS, _cdf_panels(mu, CDF_TOL), xtol
    )


def even_part_identity_check(p: int, x: float, K: int) -> float:
    """|sum_{k<=K, k even} 2 X_k(x) p^(-k/2) - 2 mu_p(x)/mu_inf(x)|."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if abs(x) >= 2:
        raise DomainError("identity check needs |x| < 2")
    if K < 0:
        raise DomainError(f"K must be nonnegative, got {K}")
    partial = 0.0
    prev, cur = 0.0, 1.0  # X_{-1}, X_0
    for k in range(K + 1):
        if k % 2 == 0:
            partial += 2.0 * cur * p ** (-k / 2)
        prev, cur = cur, x * cur - prev
    target = 2.0 * (p + 1) / ((math.sqrt(p) + 1 / math.sqrt(p)) ** 2 - x * x)
    return abs(partial - target)
