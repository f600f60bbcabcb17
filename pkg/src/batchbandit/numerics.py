"""Gaussian CDF helpers, 1-D minimisation, bisection and adaptive quadrature."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _integrate
from scipy import optimize as _optimize
from scipy import special as _special

from .errors import (
    DomainError,
    NoSignChangeError,
    NonFiniteEvaluationError,
    ToleranceNotMetError,
)

__all__ = [
    "QuadratureSpec",
    "find_root",
    "gauss_tail_lower",
    "gauss_tail_upper",
    "integrate",
    "log_norm_cdf",
    "log_norm_pdf",
    "minimize_1d",
    "norm_cdf",
    "norm_pdf",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
GRID_POINTS = 256


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 10_000

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


def norm_cdf(x):
    """Standard normal CDF (erfc-based, accurate deep into the lower tail)."""
    return _special.ndtr(x)


def log_norm_cdf(x):
    """``log Phi(x)``; uses the Mills-ratio asymptotic series far in the lower tail."""
    return _special.log_ndtr(x)


def norm_pdf(x):
    return np.exp(log_norm_pdf(x))


def log_norm_pdf(x):
    x = np.asarray(x, dtype=np.float64)
    return -0.5 * x * x - _LOG_SQRT_2PI


def _positive(x: float) -> float:
    if not x > 0:
        raise DomainError(f"tail bounds need x > 0, got {x}")
    return float(x)


def gauss_tail_lower(x: float) -> float:
    """``x / (1 + x^2) * phi(x)``, a lower bound on ``Phi(-x)``."""
    x = _positive(x)
    return x / (1.0 + x * x) * float(norm_pdf(x))


def gauss_tail_upper(x: float) -> float:
    """``phi(x) / x``, an upper bound on ``Phi(-x)``."""
    x = _positive(x)
    return float(norm_pdf(x)) / x


def _eval(f, x):
    y = f(x)
    if not np.all(np.isfinite(y)):
        raise NonFiniteEvaluationError(f"objective is not finite at {x!r}")
    return y


def minimize_1d(
    f: Callable,
    candidates: Sequence[float],
    bracket_pad: float,
    tol: float = 1e-10,
    vectorized: bool = False,
) -> tuple[float, float]:
    """Grid scan plus golden-section refinement.

    ``f`` is evaluated on ``candidates`` and on a uniform grid of 256 points
    covering the candidates widened by ``bracket_pad``. The best point is then
    refined by golden-section search on the neighbouring grid cell until the
    bracket is narrower than ``tol``. The best evaluated point is returned, so
    the result is never worse than any candidate. Pass ``vectorized=True`` when
    ``f`` maps arrays elementwise.
    """
    cand = np.asarray(candidates, dtype=np.float64).reshape(-1)
    if cand.size == 0:
        raise DomainError("minimize_1d needs at least one candidate")
    lo = float(cand.min()) - bracket_pad
    hi = float(cand.max()) + bracket_pad
    grid = np.linspace(lo, hi, GRID_POINTS)
    xs = np.concatenate([cand, grid])
    if vectorized:
        ys = np.asarray(_eval(f, xs), dtype=np.float64)
    else:
        ys = np.array([_eval(f, float(x)) for x in xs], dtype=np.float64)
    best = int(np.argmin(ys))
    best_x, best_y = float(xs[best]), float(ys[best])

    step = grid[1] - grid[0] if hi > lo else max(abs(best_x), 1.0) * 1e-3
    a, b = best_x - step, best_x + step

    def scalar(x: float) -> float:
        y = _eval(f, np.array([x]) if vectorized else x)
        return float(np.asarray(y).reshape(-1)[0])

    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = scalar(c), scalar(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = scalar(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = scalar(d)
        if fc < best_y:
            best_x, best_y = c, fc
        if fd < best_y:
            best_x, best_y = d, fd
    return best_x, best_y


def find_root(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12) -> float:
    """Bisection root of ``f`` on ``[lo, hi]``; needs ``f(lo) * f(hi) <= 0``."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return float(lo)
    if fhi == 0.0:
        return float(hi)
    if flo * fhi > 0:
        raise NoSignChangeError(f"f has the same sign at {lo} and {hi}")
    # scipy stops once the bracket is below xtol + rtol * |x|
    return float(_optimize.bisect(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=2000))


def integrate(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    spec: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Adaptive Gauss-Kronrod quadrature (QUADPACK ``qags``)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _integrate.IntegrationWarning)
        value, err, info, *rest = _integrate.quad(
            f,
            lo,
            hi,
            epsabs=spec.abs_tol,
            epsrel=spec.rel_tol,
            limit=spec.max_subdivisions,
            full_output=True,
        )
    if rest:
        raise ToleranceNotMetError(f"quadrature on [{lo}, {hi}] failed: {rest[0]}")
    if not math.isfinite(value):
        raise NonFiniteEvaluationError("integrand produced a non-finite integral")
    return float(value)


def integrate_vec(
    f: Callable[[float], np.ndarray],
    lo: float,
    hi: float,
    spec: QuadratureSpec = QuadratureSpec(),
) -> np.ndarray:
    """Vector-valued adaptive quadrature sharing one subdivision of ``[lo, hi]``."""
    value, err, info = _integrate.quad_vec(
        f,
        lo,
        hi,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        norm="max",
        limit=spec.max_subdivisions,
        full_output=True,
    )
    if info.status != 0 or err > max(spec.abs_tol, spec.rel_tol * float(np.max(np.abs(value)))):
        raise ToleranceNotMetError(
            f"vector quadrature on [{lo}, {hi}] reached error {err:.3g} (status {info.status})"
        )
    return np.asarray(value, dtype=np.float64)
