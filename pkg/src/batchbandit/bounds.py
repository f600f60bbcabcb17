"""Analytical regret bounds and the lower-bound constructions.

Ranks are 0-based sorted positions (rank 0 holds the largest mean). Bias
vectors are given in original arm order and permuted internally.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import logsumexp

from .core import BanditInstance, beta_delta, sorted_view, validate_instance
from .errors import (
    DomainError,
    EmptySubsetError,
    EnumerationTooLargeError,
    NoValidDeltaError,
    RankOutOfRangeError,
    ValidationError,
)
from .exact import resolve_bias
from .numerics import find_root, log_norm_cdf, minimize_1d

__all__ = [
    "BoundReport",
    "DominanceResult",
    "HardPair",
    "HardPairRatio",
    "LimitBound",
    "RatioBound",
    "divergence_construction",
    "dominance_bound",
    "g_star",
    "g_value",
    "hard_pair_ratio",
    "lcb_dominance",
    "limit_bound",
    "log_g_value",
    "make_hard_pair",
    "minimax_lower_shape",
    "minimax_upper",
    "prior_delta",
    "ratio_lower_bound",
    "ratio_lower_bound_beta",
    "regret_bound_corollary",
    "regret_bound_general",
    "regret_bound_simplified",
    "weighted_ratio",
]

ETA_TOL = 1e-10
MAX_ENUMERATION_K = 20


@dataclass(frozen=True)
class BoundReport:
    method: str
    regret_bound: float
    rank_cdf_bound: list = field(default_factory=list)
    g_star: list = field(default_factory=list)  # (rank, eta, value), rank 0-based

    def to_dict(self) -> dict:
        # external format numbers ranks from 1
        return {
            "method": self.method,
            "regret_bound": self.regret_bound,
            "rank_cdf_bound": list(self.rank_cdf_bound),
            "g_star": [
                {"rank": rank + 1, "eta": eta, "value": value} for rank, eta, value in self.g_star
            ],
        }


def _sorted_terms(instance: BanditInstance, bias):
    view = sorted_view(instance)
    bias = resolve_bias(bias, instance)
    loc = instance.means[view.perm] + bias[view.perm]
    return view, loc, view.sorted_counts


def _log_g(loc: np.ndarray, counts: np.ndarray, rank: int, eta) -> np.ndarray:
    eta = np.asarray(eta, dtype=np.float64)[..., None]
    above = np.maximum(eta - loc[rank:], 0.0)
    below = np.maximum(loc[:rank] - eta, 0.0)
    upper_tail = logsumexp(-0.5 * counts[rank:] * above**2, axis=-1)
    lower_tail = np.min(-0.5 * counts[:rank] * below**2, axis=-1)
    return np.logaddexp(upper_tail, lower_tail)


def _check_rank(rank: int, k: int) -> int:
    if not 1 <= rank <= k - 1:
        raise RankOutOfRangeError(f"rank must lie in [1, {k - 1}], got {rank}")
    return int(rank)


def log_g_value(instance: BanditInstance, bias, rank: int, eta) -> np.ndarray:
    """Natural log of the rank-``rank`` exceedance bound at split level ``eta``."""
    _, loc, counts = _sorted_terms(instance, bias)
    return _log_g(loc, counts, _check_rank(rank, instance.k), eta)


def g_value(instance: BanditInstance, bias, rank: int, eta):
    """Bound on P(chosen rank >= ``rank``) obtained by splitting at ``eta``.

    Sum over worse arms of ``exp(-n_j/2 (eta - mu_j - b_j)_+^2)`` plus the
    smallest ``exp(-n_j/2 (mu_j + b_j - eta)_+^2)`` over better arms.
    """
    out = np.exp(log_g_value(instance, bias, rank, eta))
    return float(out) if out.ndim == 0 else out


def _g_star_sorted(loc, counts, rank):
    pad = 3.0 * float(np.max(1.0 / np.sqrt(counts))) + 1.0
    eta, log_value = minimize_1d(
        lambda e: _log_g(loc, counts, rank, e),
        candidates=loc,
        bracket_pad=pad,
        tol=ETA_TOL,
        vectorized=True,
    )
    return float(eta), math.exp(log_value)


def g_star(instance: BanditInstance, bias, rank: int) -> tuple[float, float]:
    """``(eta, value)`` approximately minimising :func:`g_value` over ``eta``.

    Any ``eta`` yields a valid bound, so an imperfect minimum only loosens it.
    """
    _, loc, counts = _sorted_terms(instance, bias)
    return _g_star_sorted(loc, counts, _check_rank(rank, instance.k))


def regret_bound_general(instance: BanditInstance, bias) -> BoundReport:
    view, loc, counts = _sorted_terms(instance, bias)
    k = instance.k
    stars = [(r, *_g_star_sorted(loc, counts, r)) for r in range(1, k)]
    cdf = [1.0] + [min(1.0, value) for _, _, value in stars]
    steps = np.diff(view.gaps)
    regret = float(math.fsum(steps[r - 1] * cdf[r] for r in range(1, k)))
    return BoundReport("general", max(regret, 0.0), cdf, stars)


def _check_unit_delta(delta: float) -> float:
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    return float(delta)


def regret_bound_simplified(instance: BanditInstance, bias, delta: float) -> float:
    """Closed-form relaxation via confidence intervals ``mu + b -/+ beta_delta / sqrt(n)``."""
    delta = _check_unit_delta(delta)
    view, loc, counts = _sorted_terms(instance, bias)
    k = instance.k
    radius = beta_delta(k, delta) / np.sqrt(counts)
    upper, lower = loc + radius, loc - radius
    best_lower_before = np.concatenate([[-np.inf], np.maximum.accumulate(lower)[:-1]])
    best_upper_from = np.maximum.accumulate(upper[::-1])[::-1]
    h = int(np.flatnonzero(best_lower_before < best_upper_from).max())
    gaps = view.gaps
    tail = 0.0
    for i in range(h + 1, k):
        terms = -0.5 * counts[i:] * (best_lower_before[i] - upper[i:]) ** 2
        tail += (gaps[i] - gaps[i - 1]) * math.exp(logsumexp(terms))
    return float(gaps[h] + delta / k * view.delta_max + delta / k * tail)


def _suffix_max_after(x: np.ndarray) -> np.ndarray:
    """``out[i] = max(x[i+1:])`` with 0 for the last position."""
    out = np.zeros_like(x)
    if x.size > 1:
        out[:-1] = np.maximum.accumulate(x[::-1])[::-1][1:]
    return out


def regret_bound_corollary(kind: str, instance: BanditInstance, delta: float) -> float:
    """Relaxed instance bounds for greedy, LCB and UCB."""
    delta = _check_unit_delta(delta)
    view = sorted_view(instance)
    log_term = math.log(instance.k / delta)
    counts = view.sorted_counts
    if kind == "greedy":
        r2 = np.sqrt(2.0 / counts * log_term)
        vals = view.gaps + r2 + _suffix_max_after(r2)
    elif kind == "lcb":
        vals = view.gaps + np.sqrt(8.0 / counts * log_term)
    elif kind == "ucb":
        vals = view.gaps + _suffix_max_after(np.sqrt(8.0 / counts * log_term))
    else:
        raise DomainError(f"no corollary bound for kind {kind!r}")
    return float(vals.min() + delta)


def minimax_upper(counts, k: int | None = None, tol: float = 1e-13) -> tuple[float, float]:
    """Solve ``delta = sqrt(32 ln(k/delta) / n_min)``; return ``(delta, 12 sqrt(ln(k/delta)/n_min))``."""
    counts = np.asarray(counts, dtype=np.float64).reshape(-1)
    if counts.size == 0 or np.any(counts <= 0):
        raise ValidationError("counts must be positive")
    k = counts.size if k is None else int(k)
    n_min = float(counts.min())

    def f(d):
        return d - math.sqrt(32.0 * math.log(k / d) / n_min)

    eps = 1e-12
    root = find_root(f, eps, k * (1.0 - eps), tol=tol)
    if root >= 1.0:
        raise NoValidDeltaError(
            f"fixed point delta={root:.4g} is not below 1; n_min={n_min:g} is too small"
        )
    return root, 12.0 * math.sqrt(math.log(k / root) / n_min)


def minimax_lower_shape(counts, c: float = 1.0) -> float:
    """``c * max_m sqrt(max(1, ln m) / n_(m))`` with counts sorted ascending (c=1 by default)."""
    n = np.sort(np.asarray(counts, dtype=np.float64).reshape(-1))
    if n.size == 0 or np.any(n <= 0):
        raise ValidationError("counts must be positive")
    m = np.arange(1, n.size + 1)
    return float(c * np.max(np.sqrt(np.maximum(1.0, np.log(m)) / n)))


class LimitBound(NamedTuple):
    value: float
    is_lower_bound: bool


def limit_bound(kind: str, subset, means, delta: float) -> LimitBound:
    """Per-policy relaxed bound when counts in ``subset`` go to infinity and the rest equal 1.

    ``subset`` holds 0-based sorted ranks. The greedy value is only a lower
    bound on its limit and is flagged as such.
    """
    delta = _check_unit_delta(delta)
    means = np.sort(np.asarray(means, dtype=np.float64).reshape(-1))[::-1]
    k = means.size
    s = sorted({int(i) for i in subset})
    if not s:
        raise EmptySubsetError("subset must be nonempty")
    if s[0] < 0 or s[-1] >= k:
        raise RankOutOfRangeError(f"subset ranks must lie in [0, {k - 1}]")
    gaps = means[0] - means
    if kind == "lcb":
        return LimitBound(float(gaps[s[0]] + delta), False)
    if kind not in ("ucb", "greedy"):
        raise DomainError(f"no limit bound for kind {kind!r}")
    penalty = math.sqrt((8.0 if kind == "ucb" else 2.0) * math.log(k / delta))
    member = np.zeros(k, dtype=bool)
    member[s] = True
    # outsider_after[i]: some rank j > i lies outside the subset
    outsider_after = np.zeros(k, dtype=bool)
    outsider_after[:-1] = np.logical_or.accumulate((~member)[::-1])[::-1][1:]
    value = float(np.min(gaps + np.where(outsider_after, penalty, 0.0)) + delta)
    return LimitBound(value, kind == "greedy")


@dataclass(frozen=True)
class DominanceResult:
    fraction_exact: float
    bound: float
    n_subsets: int
    n_ucb_favorable: int
    ucb_favorable_subsets: tuple


def lcb_dominance(k: int, m: int, delta: float, means: Sequence[float]) -> DominanceResult:
    """Enumerate all size-``m`` subsets and compare the LCB and UCB limit bounds."""
    if k > MAX_ENUMERATION_K:
        raise EnumerationTooLargeError(f"exhaustive enumeration is limited to k <= {MAX_ENUMERATION_K}")
    if k < 2 or not 1 <= m < k:
        raise DomainError(f"need 2 <= k and 1 <= m < k, got k={k}, m={m}")
    means = np.asarray(means, dtype=np.float64).reshape(-1)
    if means.size != k:
        raise ValidationError(f"expected {k} means, got {means.size}")
    if np.any(np.diff(np.sort(means)) <= 0):
        raise ValidationError("means must be pairwise distinct")
    lcb_wins = 0
    ucb_wins = []
    total = 0
    for subset in itertools.combinations(range(k), m):
        total += 1
        lcb = limit_bound("lcb", subset, means, delta).value
        ucb = limit_bound("ucb", subset, means, delta).value
        if lcb < ucb:
            lcb_wins += 1
        elif ucb < lcb:
            ucb_wins.append(subset)
    return DominanceResult(lcb_wins / total, dominance_bound(k, m), total, len(ucb_wins), tuple(ucb_wins))


def dominance_bound(k: int, m: int) -> float:
    """``1 - (k-m)! m! / k!``, the guaranteed fraction of subsets where LCB wins."""
    if k < 2 or not 1 <= m < k:
        raise DomainError(f"need 2 <= k and 1 <= m < k, got k={k}, m={m}")
    n_subsets = math.comb(k, m)
    # int / int division is correctly rounded, so this matches an exact count ratio
    return (n_subsets - 1) / n_subsets


@dataclass(frozen=True, eq=False)
class HardPair:
    theta1: BanditInstance
    theta2: BanditInstance
    gap: float
    sigma: float
    lam: float
    eta: float

    @property
    def n_min(self) -> float:
        return self.theta1.n_min


def make_hard_pair(n1: float, n2: float, lam: float = 0.5, eta: float | None = None) -> HardPair:
    """Mirrored two-arm instances ``(lam + eta/n1, lam - eta/n2)`` and its reflection.

    Defaults ``lam=1/2`` and ``eta=n_min/2`` keep both instances in ``[0, 1]^2``.
    """
    if not (n1 > 0 and n2 > 0):
        raise ValidationError("counts must be positive")
    eta = min(n1, n2) / 2.0 if eta is None else float(eta)
    counts = [n1, n2]
    theta1 = validate_instance([lam + eta / n1, lam - eta / n2], counts)
    theta2 = validate_instance([lam - eta / n1, lam + eta / n2], counts)
    inv = 1.0 / n1 + 1.0 / n2
    return HardPair(theta1, theta2, inv * eta, math.sqrt(inv), float(lam), eta)


class HardPairRatio(NamedTuple):
    ratio: float
    log_ratio: float
    regret_greedy: float
    regret_tuned: float


def hard_pair_ratio(pair: HardPair, beta: float) -> HardPairRatio:
    """Greedy regret over the regret of the threshold rule with parameter ``-beta`` on theta1."""
    if beta < 0:
        raise DomainError("beta must be >= 0")
    z = pair.gap / pair.sigma
    shifted = beta / (pair.sigma * math.sqrt(pair.n_min)) + z
    log_num = float(log_norm_cdf(-z))
    log_den = float(log_norm_cdf(-shifted))
    log_ratio = log_num - log_den
    return HardPairRatio(
        ratio=math.exp(log_ratio) if log_ratio < 700 else math.inf,
        log_ratio=log_ratio,
        regret_greedy=pair.gap * math.exp(log_num),
        regret_tuned=pair.gap * math.exp(log_den),
    )


class RatioBound(NamedTuple):
    log_value: float
    value: float


def ratio_lower_bound_beta(n_min: float, beta: float) -> RatioBound:
    """``n_min/(n_min+4) * exp(beta^2/4 + beta sqrt(n_min)/4)`` in log space."""
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")
    if not n_min > 0:
        raise DomainError("n_min must be positive")
    log_value = math.log(n_min / (n_min + 4.0)) + beta**2 / 4.0 + beta * math.sqrt(n_min) / 4.0
    return RatioBound(log_value, math.exp(log_value) if log_value < 700 else math.inf)


def ratio_lower_bound(n_min: float, c: float, c0: float) -> RatioBound:
    """Same bound parameterised by the constants, with ``beta = c * c0 - 2``."""
    return ratio_lower_bound_beta(n_min, c * c0 - 2.0)


def weighted_ratio(regret: float, instance: BanditInstance) -> float:
    """``regret * sqrt(n of the optimal arm)``; proportional to regret over optimal-value difficulty."""
    if regret < 0:
        raise DomainError("regret must be nonnegative")
    return float(regret * math.sqrt(instance.counts[sorted_view(instance).optimal_arm]))


def divergence_construction(n1: float) -> tuple[BanditInstance, float]:
    """Counts ``(n1, 1)``, means 0.1 apart, and ``delta = 1/sqrt(n1 + 1)``."""
    if n1 < 2:
        raise DomainError(f"n1 must be >= 2, got {n1}")
    return validate_instance([0.55, 0.45], [n1, 1.0]), 1.0 / math.sqrt(n1 + 1.0)


def _spike_tail(gap: float, n: float) -> float:
    root_n = math.sqrt(n)
    return (
        math.sqrt(2.0 / math.pi)
        * math.exp(-n * gap * gap / 2.0)
        / (gap * root_n + math.sqrt(4.0 + n * gap * gap))
    )


def prior_delta(n: float, m: int, tol: float = 1e-15) -> float:
    """Spike height with Gaussian-tail lower bound equal to ``1/(2m)`` at count ``n``."""
    if not n > 0:
        raise DomainError("n must be positive")
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    target = 1.0 / (2.0 * m)
    return find_root(lambda d: _spike_tail(d, n) - target, 1e-9, 1e3 / math.sqrt(n), tol=tol)
