"""Seeded Monte Carlo estimates of simple regret, pick frequencies and rank CDFs.

Replication ``r`` draws its empirical means from
:func:`~batchbandit.core.replication_normals`, a pure function of
``(master_seed, r)``. Workers process fixed chunks of replications and only
integer pick counts are merged, so results do not depend on ``n_jobs``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.base import clone

from .core import BanditInstance, replication_normals, sorted_view
from .errors import DomainError, LengthMismatchError

__all__ = ["SimConfig", "SimResult", "csv_header", "mc_compare", "mc_regret"]

MAX_SEED = (1 << 64) - 1


@dataclass(frozen=True)
class SimConfig:
    """Replication count and master seed.

    ``n_jobs`` and ``chunk_size`` only control scheduling; they never change
    the result.
    """

    reps: int
    master_seed: int = 0
    n_jobs: int = 1
    chunk_size: int = 1 << 16

    def __post_init__(self):
        if int(self.reps) != self.reps or self.reps < 1:
            raise DomainError(f"reps must be a positive integer, got {self.reps}")
        if not 0 <= int(self.master_seed) <= MAX_SEED:
            raise DomainError("master_seed must be an unsigned 64-bit integer")
        if self.n_jobs < 1 or self.chunk_size < 1:
            raise DomainError("n_jobs and chunk_size must be positive")


@dataclass(frozen=True, eq=False)
class SimResult:
    mean_regret: float
    std_error: float
    pick_counts: np.ndarray
    rank_cdf: np.ndarray
    reps: int

    def to_csv_row(self, policy: str, seed: int) -> str:
        fields = [policy, str(self.reps), str(seed), repr(self.mean_regret), repr(self.std_error)]
        fields += [str(int(c)) for c in self.pick_counts]
        return ",".join(fields)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimResult):
            return NotImplemented
        return (
            self.reps == other.reps
            and self.mean_regret == other.mean_regret
            and self.std_error == other.std_error
            and np.array_equal(self.pick_counts, other.pick_counts)
            and np.array_equal(self.rank_cdf, other.rank_cdf)
        )


def csv_header(k: int) -> str:
    return ",".join(["policy", "reps", "seed", "mean_regret", "std_error"] + [f"pick_{i + 1}" for i in range(k)])


def _summarise(counts: np.ndarray, gaps: np.ndarray, perm: np.ndarray) -> SimResult:
    reps = int(counts.sum())
    mean = math.fsum(c * g for c, g in zip(counts.tolist(), gaps.tolist())) / reps
    if reps > 1:
        ss = math.fsum(c * (g - mean) ** 2 for c, g in zip(counts.tolist(), gaps.tolist()))
        std_error = math.sqrt(ss / (reps - 1) / reps)
    else:
        std_error = math.nan
    tail = np.cumsum(counts[perm][::-1])[::-1] / reps
    return SimResult(mean, std_error, counts, tail, reps)


def mc_compare(instance: BanditInstance, policies: Sequence, config: SimConfig) -> list[SimResult]:
    """Estimate every policy on the same simulated datasets.

    Each policy is cloned and fitted on the instance counts, then fed the
    identical empirical means in every replication.
    """
    fitted = [clone(p).fit(instance.counts) for p in policies]
    for pol in fitted:
        if pol.n_arms_ != instance.k:
            raise LengthMismatchError(f"policy has {pol.n_arms_} arms, instance has {instance.k}")
    k = instance.k
    scale = 1.0 / np.sqrt(instance.counts)
    seed = int(config.master_seed)

    def work(bounds):
        start, stop = bounds
        X = instance.means + replication_normals(seed, start, stop, k) * scale
        return [np.bincount(pol.predict(X), minlength=k) for pol in fitted]

    chunks = [
        (start, min(start + config.chunk_size, config.reps))
        for start in range(0, config.reps, config.chunk_size)
    ]
    if config.n_jobs > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=config.n_jobs) as pool:
            partials = list(pool.map(work, chunks))
    else:
        partials = [work(c) for c in chunks]
    totals = [np.sum([part[i] for part in partials], axis=0).astype(np.int64) for i in range(len(fitted))]

    view = sorted_view(instance)
    gaps = view.gaps_by_arm()
    return [_summarise(c, gaps, view.perm) for c in totals]


def mc_regret(instance: BanditInstance, policy, config: SimConfig) -> SimResult:
    """Monte Carlo regret of a single policy; see :func:`mc_compare`."""
    return mc_compare(instance, [policy], config)[0]
