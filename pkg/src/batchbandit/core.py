"""Problem instances, logged statistics and sufficient-statistic sampling.

Arms are indexed from 0 throughout the Python API. Counts are positive
reals: the empirical mean of arm ``i`` is modelled directly as
``N(means[i], 1 / counts[i])``, which is well defined for fractional counts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from os import PathLike
from typing import Union

import numpy as np
from scipy.special import ndtri

from .errors import (
    DomainError,
    LengthMismatchError,
    MeanOutOfRangeError,
    NonFiniteEntryError,
    NonPositiveCountError,
    TooFewArmsError,
    ValidationError,
)

__all__ = [
    "BanditInstance",
    "LoggedStats",
    "SortedView",
    "beta_delta",
    "load_instance",
    "replication_key",
    "replication_normals",
    "sample_stats",
    "sorted_view",
    "validate_instance",
]


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


def _check_vectors(first, second, names=("means", "counts")) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(first, dtype=np.float64).reshape(-1)
    b = np.asarray(second, dtype=np.float64).reshape(-1)
    if a.shape != b.shape:
        raise LengthMismatchError(
            f"{names[0]} has {a.size} entries but {names[1]} has {b.size}"
        )
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise NonFiniteEntryError(f"{names[0]} and {names[1]} must be finite")
    if np.any(b <= 0):
        raise NonPositiveCountError(f"{names[1]} must be strictly positive")
    return a, b


@dataclass(frozen=True, eq=False)
class BanditInstance:
    """True arm means together with the per-arm observation counts."""

    means: np.ndarray
    counts: np.ndarray
    strict: bool = True

    @property
    def k(self) -> int:
        return int(self.means.size)

    @property
    def n_total(self) -> float:
        return float(self.counts.sum())

    @property
    def n_min(self) -> float:
        return float(self.counts.min())

    def to_dict(self) -> dict:
        return {
            "means": self.means.tolist(),
            "counts": self.counts.tolist(),
            "strict": self.strict,
        }

    def __repr__(self) -> str:
        return (
            f"BanditInstance(means={self.means.tolist()}, "
            f"counts={self.counts.tolist()}, strict={self.strict})"
        )


@dataclass(frozen=True, eq=False)
class LoggedStats:
    """Empirical means and counts: the sufficient statistic of a batch dataset."""

    emp_means: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        means, counts = _check_vectors(self.emp_means, self.counts, ("emp_means", "counts"))
        object.__setattr__(self, "emp_means", _frozen(means))
        object.__setattr__(self, "counts", _frozen(counts))

    @property
    def k(self) -> int:
        return int(self.emp_means.size)


@dataclass(frozen=True, eq=False)
class SortedView:
    """Instance re-ordered by nonincreasing mean.

    ``perm[r]`` is the original arm holding sorted rank ``r`` and
    ``gaps[r]`` its suboptimality gap; ``gaps[0] == 0``.
    """

    perm: np.ndarray
    gaps: np.ndarray
    sorted_means: np.ndarray
    sorted_counts: np.ndarray
    delta_max: float
    delta_min: float
    optimal_arm: int

    @property
    def ranks(self) -> np.ndarray:
        """Sorted rank of every original arm (inverse permutation)."""
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.perm.size)
        return inv

    def gaps_by_arm(self) -> np.ndarray:
        """Suboptimality gaps in original arm order."""
        out = np.empty_like(self.gaps)
        out[self.perm] = self.gaps
        return out


def validate_instance(means, counts, strict: bool = True) -> BanditInstance:
    means, counts = _check_vectors(means, counts)
    if means.size < 2:
        raise TooFewArmsError(f"need at least 2 arms, got {means.size}")
    if strict and (np.any(means < 0.0) or np.any(means > 1.0)):
        raise MeanOutOfRangeError("strict instances require means in [0, 1]")
    return BanditInstance(_frozen(means), _frozen(counts), bool(strict))


def load_instance(source: Union[str, PathLike, dict]) -> BanditInstance:
    """Read an instance from a JSON file path or an already-parsed dict.

    Accepted keys are ``means``, ``counts`` and an optional ``strict``
    flag (default true); anything else is rejected.
    """
    if isinstance(source, dict):
        data = source
    else:
        with open(source, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    if not isinstance(data, dict):
        raise ValidationError("instance file must hold a JSON object")
    unknown = set(data) - {"means", "counts", "strict"}
    if unknown:
        raise ValidationError(f"unknown instance fields: {sorted(unknown)}")
    missing = {"means", "counts"} - set(data)
    if missing:
        raise ValidationError(f"missing instance fields: {sorted(missing)}")
    strict = data.get("strict", True)
    if not isinstance(strict, bool):
        raise ValidationError("'strict' must be a boolean")
    return validate_instance(data["means"], data["counts"], strict=strict)


def sorted_view(instance: BanditInstance) -> SortedView:
    means = instance.means
    # stable sort on the negated means keeps the lowest arm index first on ties
    perm = np.argsort(-means, kind="stable")
    sorted_means = means[perm]
    gaps = sorted_means[0] - sorted_means
    positive = gaps[gaps > 0]
    return SortedView(
        perm=perm,
        gaps=gaps,
        sorted_means=sorted_means,
        sorted_counts=instance.counts[perm],
        delta_max=float(gaps[-1]),
        delta_min=float(positive.min()) if positive.size else 0.0,
        optimal_arm=int(perm[0]),
    )


def beta_delta(k: int, delta: float) -> float:
    """Confidence multiplier ``sqrt(2 ln(k / delta))``."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if not (0.0 < delta <= k):
        raise DomainError(f"delta must lie in (0, k], got {delta}")
    if delta == k:
        return 0.0
    return math.sqrt(2.0 * math.log(k / delta))


def sample_stats(instance: BanditInstance, rng) -> LoggedStats:
    """Draw one logged dataset's empirical means.

    ``rng`` is anything :func:`numpy.random.default_rng` accepts; a
    ``Generator`` is advanced in place.
    """
    rng = np.random.default_rng(rng)
    noise = rng.standard_normal(instance.k)
    return LoggedStats(instance.means + noise / np.sqrt(instance.counts), instance.counts)


# Counter-based normal variates for simulation. The draw for replication r and
# arm a is a pure function of (master_seed, r, a), so any partition of the
# replications across workers reproduces the same numbers.

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = x + np.uint64(_GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


def replication_key(master_seed: int, rep) -> np.ndarray:
    """64-bit avalanche mix of ``(master_seed, rep)``."""
    seed_word = _splitmix64(np.asarray([int(master_seed) & _MASK], dtype=np.uint64))[0]
    reps = np.asarray(rep, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _splitmix64(seed_word ^ _splitmix64(reps))


def replication_normals(master_seed: int, start: int, stop: int, k: int) -> np.ndarray:
    """Standard normals of shape ``(stop - start, k)`` for replications ``start..stop-1``.

    Uniforms with 53 random bits are mapped through the inverse normal CDF,
    which is exact in distribution up to double rounding.
    """
    keys = replication_key(master_seed, np.arange(start, stop, dtype=np.uint64))
    arms = np.arange(1, k + 1, dtype=np.uint64) * np.uint64(_GOLDEN)
    with np.errstate(over="ignore"):
        bits = _splitmix64(keys[:, None] + arms[None, :])
    u = ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return ndtri(u)
