"""Command-line entry point.

Exit codes: 0 on success, 2 on invalid input, 3 on numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bounds import (
    BoundReport,
    minimax_lower_shape,
    minimax_upper,
    regret_bound_corollary,
    regret_bound_general,
    regret_bound_simplified,
)
from .core import load_instance
from .errors import NoValidDeltaError, NumericalError, ValidationError
from .exact import exact_pick_probabilities
from .harness import (
    DEFAULT_DELTA,
    DEFAULT_TOTAL_N,
    FIGURES,
    FRACTION_PANELS,
    divergence_table,
    geometric_n1,
    hard_pair_table,
    reproduce,
    write_csv,
)
from .policies import policy_from_descriptor
from .sim import SimConfig, csv_header, mc_regret

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _dump(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _parse_grid(text: str) -> list[float]:
    try:
        lo, hi, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise ValidationError(f"expected LO:HI:STEP, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise ValidationError("grid needs step > 0 and hi >= lo")
    n = int(round((hi - lo) / step)) + 1
    return [lo + i * step for i in range(n)]


def _parse_n1(text: str) -> list[int]:
    parts = text.split(":")
    if len(parts) != 3 or parts[2] != "geometric":
        raise ValidationError(f"expected LO:HI:geometric, got {text!r}")
    try:
        return geometric_n1(int(parts[0]), int(parts[1]))
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def _read_counts(path: str) -> list[float]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = text.replace(",", " ").split()
    if isinstance(data, dict):
        data = data.get("counts")
    if not isinstance(data, list) or not data:
        raise ValidationError("counts file must hold a nonempty list of numbers")
    try:
        return [float(x) for x in data]
    except (TypeError, ValueError):
        raise ValidationError("counts must be numbers") from None


def cmd_bound(args) -> None:
    inst = load_instance(args.instance)
    policy = policy_from_descriptor(args.policy, default_delta=args.delta)
    if args.method == "general":
        report = regret_bound_general(inst, policy)
    else:
        if args.delta is None:
            raise ValidationError(f"--delta is required for method {args.method!r}")
        if args.method == "simplified":
            value = regret_bound_simplified(inst, policy, args.delta)
        else:
            if policy.kind not in ("greedy", "lcb", "ucb"):
                raise ValidationError("corollary bounds exist for greedy, lcb and ucb only")
            value = regret_bound_corollary(policy.kind, inst, args.delta)
        report = BoundReport(args.method, value)
    _dump(report.to_dict())


def cmd_exact(args) -> None:
    inst = load_instance(args.instance)
    policy = policy_from_descriptor(args.policy, default_delta=args.delta)
    _dump(exact_pick_probabilities(inst, policy).to_dict())


def cmd_simulate(args) -> None:
    inst = load_instance(args.instance)
    policy = policy_from_descriptor(args.policy, default_delta=args.delta)
    result = mc_regret(inst, policy, SimConfig(args.reps, args.seed, n_jobs=args.jobs))
    sys.stdout.write(csv_header(inst.k) + "\n")
    sys.stdout.write(result.to_csv_row(policy.label, args.seed) + "\n")


def cmd_reproduce(args) -> None:
    fraction_k = None
    if args.fraction_k:
        ks = tuple(int(k) for k in args.fraction_k.split(","))
        fraction_k = {label: (div, tuple(k for k in ks if k // div >= 1)) for label, (div, _) in FRACTION_PANELS.items()}
    paths = reproduce(
        args.figure,
        args.out,
        total_ns=args.total_n or DEFAULT_TOTAL_N,
        delta=args.delta,
        reps=args.reps,
        seed=args.seed,
        fraction_outer_runs=args.outer_runs,
        fraction_k=fraction_k,
    )
    for p in paths:
        sys.stdout.write(f"{p}\n")


def cmd_hard_pair(args) -> None:
    write_csv(sys.stdout, *hard_pair_table(args.n1, args.n2, _parse_grid(args.beta_grid)))


def cmd_divergence(args) -> None:
    write_csv(sys.stdout, *divergence_table(_parse_n1(args.n1)))


def cmd_minimax(args) -> None:
    counts = _read_counts(args.counts)
    out = {
        "k": len(counts),
        "n_min": min(counts),
        "lower_bound_shape": minimax_lower_shape(counts),
        "lower_bound_constant": 1.0,
    }
    try:
        delta_star, upper = minimax_upper(counts)
        out.update(delta_star=delta_star, upper_bound=upper)
    except NoValidDeltaError as exc:
        out.update(delta_star=None, upper_bound=None, note=str(exc))
    _dump(out)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="batchbandit", description="Regret bounds and experiments for batch arm selection.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def instance_policy(p):
        p.add_argument("--instance", required=True, help="JSON file with means and counts")
        p.add_argument("--policy", required=True, help="JSON descriptor or file, e.g. '{\"kind\": \"lcb\"}'")
        p.add_argument("--delta", type=float, default=None, help="confidence level for lcb/ucb")

    p = sub.add_parser("bound", help="analytical regret bound")
    instance_policy(p)
    p.add_argument("--method", choices=("general", "simplified", "corollary"), default="general")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("exact", help="exact pick probabilities and regret")
    instance_policy(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("simulate", help="Monte Carlo regret estimate")
    instance_policy(p)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1, help="worker threads (result is unchanged)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reproduce", help="write CSV tables for a figure group")
    p.add_argument("--figure", required=True, choices=FIGURES)
    p.add_argument("--out", required=True)
    p.add_argument("--total-n", type=float, nargs="+", default=None)
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outer-runs", type=int, default=5, help="fraction experiment repetitions")
    p.add_argument("--fraction-k", default=None, help="comma-separated k values for the fraction panels")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("hard-pair", help="threshold-rule regrets on the mirrored two-arm pair")
    p.add_argument("--n1", type=float, required=True)
    p.add_argument("--n2", type=float, required=True)
    p.add_argument("--beta-grid", default="-5:5:0.1")
    p.set_defaults(func=cmd_hard_pair)

    p = sub.add_parser("divergence", help="weighted regret on the (n1, 1) two-arm family")
    p.add_argument("--n1", default="2:1024:geometric")
    p.set_defaults(func=cmd_divergence)

    p = sub.add_parser("minimax", help="minimax upper bound and lower-bound shape")
    p.add_argument("--counts", required=True, help="JSON list, {'counts': [...]} or whitespace-separated file")
    p.set_defaults(func=cmd_minimax)
    return parser


def _attach_negative_values(argv: list[str]) -> list[str]:
    # argparse treats "-5:5:0.1" as an option, so bind it to its flag explicitly
    out: list[str] = []
    for token in argv:
        if out and out[-1] == "--beta-grid" and token.startswith("-"):
            out[-1] = f"--beta-grid={token}"
        else:
            out.append(token)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_negative_values(argv))
    try:
        args.func(args)
    except (ValidationError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except NumericalError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
