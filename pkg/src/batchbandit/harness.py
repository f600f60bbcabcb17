"""Experiment generators, figure reproductions and CSV/JSON emitters.

Every table is built from deterministic inputs and written with ``repr``
float formatting, so a given seed always yields byte-identical files.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .bounds import (
    divergence_construction,
    make_hard_pair,
    ratio_lower_bound_beta,
    weighted_ratio,
)
from .core import BanditInstance, validate_instance
from .errors import DomainError
from .exact import exact_regret, exact_regret_two_arm
from .numerics import log_norm_cdf
from .policies import IndexPolicy, ThresholdPolicy
from .sim import SimConfig, mc_compare

__all__ = [
    "DEFAULT_DELTA",
    "DEFAULT_TOTAL_N",
    "FIGURES",
    "DivergenceRow",
    "FractionResult",
    "divergence_table",
    "fraction_instance",
    "gen_fraction_batch",
    "gen_hundred_arm",
    "gen_two_arm_sweep",
    "geometric_n1",
    "hard_pair_table",
    "hundred_arm_table",
    "reproduce",
    "run_divergence",
    "run_fraction",
    "standard_policies",
    "table_to_text",
    "two_arm_table",
    "write_csv",
]

DEFAULT_DELTA = 0.1
DEFAULT_TOTAL_N = (200, 500, 1000, 2000, 5000)
COUNT_FLOOR = 1e-3

# well-sampled arm set (0-based) and its per-arm share of the total count
HUNDRED_ARM_CONFIGS = {
    "lcb1": ((0,), 0.3),
    "lcb2": ((9,), 0.3),
    "ucb1": ((0,), 1e-4),
    "ucb2": (tuple(range(10)), 1e-4),
}
TWO_ARM_PANELS = ((10.0, 5.0), (100.0, 10.0))
FRACTION_PANELS = {"half": (2, (2, 4, 8, 16)), "quarter": (4, (4, 8, 16))}
FIGURES = tuple(HUNDRED_ARM_CONFIGS) + ("two-arm", "fraction")


def standard_policies(delta: float = DEFAULT_DELTA) -> dict[str, IndexPolicy]:
    return {
        "greedy": IndexPolicy("greedy"),
        "lcb": IndexPolicy("lcb", delta=delta),
        "ucb": IndexPolicy("ucb", delta=delta),
    }


def gen_hundred_arm(name: str, total_n: float) -> BanditInstance:
    """100 arms with means ``1, 0.99, ..., 0.01`` and a skewed data split.

    Arms in the chosen set get ``share * total_n`` observations each and the
    rest split what remains evenly. Counts stay fractional.
    """
    if name not in HUNDRED_ARM_CONFIGS:
        raise DomainError(f"unknown configuration {name!r}; expected one of {sorted(HUNDRED_ARM_CONFIGS)}")
    if not total_n > 0:
        raise DomainError("total_n must be positive")
    chosen, share = HUNDRED_ARM_CONFIGS[name]
    k = 100
    member = np.zeros(k, dtype=bool)
    member[list(chosen)] = True
    rest = total_n * (1.0 - share * member.sum()) / (k - member.sum())
    counts = np.where(member, share * total_n, rest)
    means = 1.0 - 0.01 * np.arange(k)
    return validate_instance(means, np.maximum(counts, COUNT_FLOOR))


def gen_two_arm_sweep(n1: float, n2: float, grid_lo: float, grid_hi: float, grid_points: int) -> list[BanditInstance]:
    """Instances with means ``(0, g)`` for ``g`` on a uniform grid (lax validation)."""
    if grid_points < 2:
        raise DomainError("grid_points must be >= 2")
    return [
        validate_instance([0.0, g], [n1, n2], strict=False)
        for g in np.linspace(grid_lo, grid_hi, int(grid_points))
    ]


def _sample_subsets(k: int, m: int, n_subsets: int, rng: np.random.Generator) -> list[tuple]:
    if math.comb(k, m) <= n_subsets:
        return list(itertools.combinations(range(k), m))
    seen: dict[tuple, None] = {}
    while len(seen) < n_subsets:
        seen.setdefault(tuple(sorted(rng.choice(k, size=m, replace=False).tolist())), None)
    return list(seen)


def gen_fraction_batch(
    k: int,
    m: int,
    noise_std: float = 0.05,
    n_mu: int = 100,
    n_subsets: int = 100,
    seed: int = 0,
) -> Iterator[tuple[np.ndarray, tuple]]:
    """Yield ``(means, subset)`` pairs for the random-coverage experiment.

    Base means are evenly spaced in ``[1/4, 3/4]`` (increasing with the arm
    index) plus Gaussian noise. Each mean vector is paired with up to
    ``n_subsets`` distinct size-``m`` subsets drawn without replacement.
    """
    if not 1 <= m < k:
        raise DomainError(f"need 1 <= m < k, got k={k}, m={m}")
    rng = np.random.default_rng(seed)
    base = np.arange(k) / (2.0 * (k - 1)) + 0.25
    noisy = base + noise_std * rng.standard_normal((n_mu, k))
    for means in noisy:
        for subset in _sample_subsets(k, m, n_subsets, rng):
            yield means, subset


def fraction_instance(means, subset, n_in: float = 100.0, n_out: float = 1.0) -> BanditInstance:
    counts = np.full(len(means), n_out)
    counts[list(subset)] = n_in
    return validate_instance(means, counts, strict=False)


@dataclass(frozen=True)
class FractionResult:
    k: int
    m: int
    algorithms: tuple
    fractions: np.ndarray  # shape (outer_runs, n_algorithms)

    @property
    def mean(self) -> dict:
        return dict(zip(self.algorithms, self.fractions.mean(axis=0).tolist()))

    @property
    def std(self) -> dict:
        return dict(zip(self.algorithms, self.fractions.std(axis=0).tolist()))

    def rows(self) -> list[list]:
        return [
            [self.k, self.m, run, alg, float(self.fractions[run, j])]
            for run in range(self.fractions.shape[0])
            for j, alg in enumerate(self.algorithms)
        ]


def _derived_seed(*words: int) -> int:
    return int(np.random.SeedSequence([int(w) for w in words]).generate_state(1, np.uint64)[0])


def run_fraction(
    k: int,
    m: int,
    reps: int = 100,
    outer_runs: int = 5,
    seed: int = 0,
    delta: float = DEFAULT_DELTA,
    n_mu: int = 100,
    n_subsets: int = 100,
    noise_std: float = 0.05,
) -> FractionResult:
    """Fraction of sampled instances on which each algorithm has the lowest estimated regret.

    Estimates share noise across algorithms. Only a strict minimum earns a
    win, so the fractions of one run can sum to less than one.
    """
    if outer_runs < 1:
        raise DomainError("outer_runs must be >= 1")
    policies = standard_policies(delta)
    names = tuple(policies)
    fractions = np.zeros((outer_runs, len(names)))
    for run in range(outer_runs):
        wins = np.zeros(len(names), dtype=np.int64)
        total = 0
        batch = gen_fraction_batch(k, m, noise_std, n_mu, n_subsets, seed=_derived_seed(seed, run))
        for idx, (means, subset) in enumerate(batch):
            inst = fraction_instance(means, subset)
            cfg = SimConfig(reps, _derived_seed(seed, run, idx))
            regrets = np.array([r.mean_regret for r in mc_compare(inst, list(policies.values()), cfg)])
            best = np.flatnonzero(regrets == regrets.min())
            if best.size == 1:
                wins[best[0]] += 1
            total += 1
        fractions[run] = wins / total
    return FractionResult(k, m, names, fractions)


@dataclass(frozen=True)
class DivergenceRow:
    n1: float
    delta: float
    ucb_regret: float
    greedy_regret: float
    lcb_regret: float
    ucb_weighted: float
    greedy_weighted: float
    lcb_weighted: float
    lcb_weighted_over_sqrt_log_n: float


def run_divergence(n1_list: Sequence[float]) -> list[DivergenceRow]:
    """Exact regrets on the two-arm family with counts ``(n1, 1)`` and ``delta = 1/sqrt(n)``."""
    rows = []
    for n1 in n1_list:
        inst, delta = divergence_construction(n1)
        regret = {
            kind: exact_regret(inst, IndexPolicy(kind, delta=None if kind == "greedy" else delta))
            for kind in ("ucb", "greedy", "lcb")
        }
        weighted = {kind: weighted_ratio(r, inst) for kind, r in regret.items()}
        rows.append(
            DivergenceRow(
                n1=float(n1),
                delta=delta,
                ucb_regret=regret["ucb"],
                greedy_regret=regret["greedy"],
                lcb_regret=regret["lcb"],
                ucb_weighted=weighted["ucb"],
                greedy_weighted=weighted["greedy"],
                lcb_weighted=weighted["lcb"],
                lcb_weighted_over_sqrt_log_n=weighted["lcb"] / math.sqrt(math.log(inst.n_total)),
            )
        )
    return rows


def geometric_n1(lo: int = 2, hi: int = 1024) -> list[int]:
    """Powers of two from ``lo`` to ``hi`` inclusive."""
    if lo < 2 or hi < lo:
        raise DomainError(f"need 2 <= lo <= hi, got {lo}, {hi}")
    out, n = [], int(lo)
    while n <= hi:
        out.append(n)
        n *= 2
    return out


def divergence_table(n1_list: Sequence[float]) -> tuple[list[str], list[list]]:
    rows = run_divergence(n1_list)
    header = list(DivergenceRow.__dataclass_fields__)
    return header, [list(asdict(r).values()) for r in rows]


def hard_pair_table(n1: float, n2: float, betas: Sequence[float]) -> tuple[list[str], list[list]]:
    """Exact regrets of the threshold rules on both mirrored instances.

    ``log_ratio_theta1`` is ``log R(A_0, theta1) - log R(A_beta, theta1)``. For
    ``beta < 0`` the matching lower bound on that log ratio is also reported.
    """
    pair = make_hard_pair(n1, n2)
    base = exact_regret_two_arm(pair.theta1, 0.0)
    z = pair.gap / pair.sigma
    header = ["beta", "regret_theta1", "regret_theta2", "max_regret", "greedy_regret", "log_ratio_theta1", "log_ratio_lower_bound"]
    rows = []
    for beta in betas:
        beta = float(beta)
        r1 = exact_regret(pair.theta1, ThresholdPolicy(beta))
        r2 = exact_regret(pair.theta2, ThresholdPolicy(beta))
        # theta1 favours arm 0, so A_beta errs when x0 - x1 < beta / sqrt(n_min)
        log_ratio = float(log_norm_cdf(-z) - log_norm_cdf(beta / (pair.sigma * math.sqrt(pair.n_min)) - z))
        bound = ratio_lower_bound_beta(pair.n_min, -beta).log_value if beta < 0 else ""
        rows.append([beta, r1, r2, max(r1, r2), base, log_ratio, bound])
    return header, rows


def _mc_columns(inst: BanditInstance, policies: dict, reps: int, seed: int):
    if reps <= 0:
        return {name: ("", "") for name in policies}
    results = mc_compare(inst, list(policies.values()), SimConfig(reps, seed))
    return {name: (r.mean_regret, r.std_error) for name, r in zip(policies, results)}


def hundred_arm_table(
    name: str,
    total_ns: Sequence[float] = DEFAULT_TOTAL_N,
    delta: float = DEFAULT_DELTA,
    reps: int = 500,
    seed: int = 0,
) -> tuple[list[str], list[list]]:
    policies = standard_policies(delta)
    rows = []
    for i, total_n in enumerate(total_ns):
        inst = gen_hundred_arm(name, total_n)
        mc = _mc_columns(inst, policies, reps, _derived_seed(seed, i))
        for pname, pol in policies.items():
            rows.append([float(total_n), pname, exact_regret(inst, pol), *mc[pname]])
    return ["total_n", "policy", "exact_regret", "mc_regret", "mc_se"], rows


def two_arm_table(
    n1: float,
    n2: float,
    grid_lo: float = -1.0,
    grid_hi: float = 1.0,
    grid_points: int = 41,
    delta: float = DEFAULT_DELTA,
    reps: int = 100,
    seed: int = 0,
) -> tuple[list[str], list[list]]:
    """Rows keyed by ``gap = mu_1 - mu_2`` (the negated second mean)."""
    policies = standard_policies(delta)
    rows = []
    for i, inst in enumerate(gen_two_arm_sweep(n1, n2, grid_lo, grid_hi, grid_points)):
        gap = float(inst.means[0] - inst.means[1])
        mc = _mc_columns(inst, policies, reps, _derived_seed(seed, i))
        for pname, pol in policies.items():
            rows.append([gap, pname, exact_regret(inst, pol), *mc[pname]])
    return ["gap", "policy", "exact_regret", "mc_regret", "mc_se"], rows


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def write_csv(path_or_stream, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    """Write rows with ``repr`` floats and ``\\n`` line endings."""
    if isinstance(path_or_stream, (str, Path)):
        with open(path_or_stream, "w", encoding="utf-8", newline="") as fh:
            write_csv(fh, header, rows)
        return
    writer = csv.writer(path_or_stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def _write_meta(path: Path, meta: dict) -> None:
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def reproduce(
    figure: str,
    out_dir,
    total_ns: Sequence[float] = DEFAULT_TOTAL_N,
    delta: float = DEFAULT_DELTA,
    reps: int | None = None,
    seed: int = 0,
    fraction_outer_runs: int = 5,
    fraction_k: dict | None = None,
) -> list[Path]:
    """Write the CSV tables for one figure group plus a ``.meta.json`` sidecar each.

    The hundred-arm panels sweep ``total_n`` (the x-axis choice is recorded in
    the metadata). ``reps`` defaults to 500 for those panels and 100 for the
    two-arm and fraction panels.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(stem: str, table, meta: dict) -> None:
        csv_path = out / f"{stem}.csv"
        write_csv(csv_path, *table)
        _write_meta(out / f"{stem}.meta.json", {"figure": figure, "delta": delta, "seed": seed, **meta})
        written.append(csv_path)

    if figure in HUNDRED_ARM_CONFIGS:
        n_reps = 500 if reps is None else reps
        chosen, share = HUNDRED_ARM_CONFIGS[figure]
        emit(
            figure,
            hundred_arm_table(figure, total_ns, delta, n_reps, seed),
            {
                "reps": n_reps,
                "x_axis": "total_n",
                "sweep": [float(n) for n in total_ns],
                "well_sampled_arms": [i + 1 for i in chosen],
                "share": share,
            },
        )
    elif figure == "two-arm":
        n_reps = 100 if reps is None else reps
        for n1, n2 in TWO_ARM_PANELS:
            emit(
                f"two_arm_n{n1:g}_n{n2:g}",
                two_arm_table(n1, n2, delta=delta, reps=n_reps, seed=seed),
                {"reps": n_reps, "x_axis": "gap", "counts": [n1, n2], "sweep": [-1.0, 1.0, 41]},
            )
    elif figure == "fraction":
        n_reps = 100 if reps is None else reps
        panels = FRACTION_PANELS if fraction_k is None else fraction_k
        for label, (divisor, ks) in panels.items():
            rows = []
            for k in ks:
                res = run_fraction(k, k // divisor, n_reps, fraction_outer_runs, _derived_seed(seed, k, divisor), delta)
                rows.extend(res.rows())
            emit(
                f"fraction_{label}",
                (["k", "m", "run", "alg", "best_fraction"], rows),
                {
                    "reps": n_reps,
                    "x_axis": "k",
                    "sweep": list(ks),
                    "m": f"k/{divisor}",
                    "outer_runs": fraction_outer_runs,
                },
            )
    else:
        raise DomainError(f"unknown figure {figure!r}; expected one of {FIGURES}")
    return written


def table_to_text(header, rows) -> str:
    buf = io.StringIO()
    write_csv(buf, header, rows)
    return buf.getvalue()
