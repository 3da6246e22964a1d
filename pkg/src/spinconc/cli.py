"""Command-line interface.

Usage:
    spinconc round --alpha 0.8 --seed 7
    spinconc iterate --alpha 0.8 --max-rounds 5 --format csv
    spinconc yield --alpha 0.707106781
    spinconc curve --points 99 --format csv --output curve.csv
    spinconc monte-carlo --alpha 0.8 --trials 100000 --max-rounds 2
    spinconc ghz --parties 3 --alpha 0.8 --seed 5

Exit status: 0 on success, 2 for usage/domain errors, 3 for I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__
from .analysis import iterated_yield, monte_carlo, success_probability
from .exceptions import SpinConcError
from .protocol import GhzSpec, RoundOutcome, run_ghz_round

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 2, 3


def _alpha(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie strictly inside (0, 1), got {text}")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _parties(text: str) -> int:
    value = _positive(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"need at least 2 parties, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinconc",
        description="Simulate entanglement concentration of electron pairs with charge detection.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "csv", "json"), default="table")
    common.add_argument("--output", default=None, help="file to write (default: stdout)")

    with_alpha = argparse.ArgumentParser(add_help=False)
    with_alpha.add_argument("--alpha", type=_alpha, required=True,
                            help="real alpha in (0, 1); beta = sqrt(1 - alpha^2)")

    rounds = argparse.ArgumentParser(add_help=False)
    rounds.add_argument("--max-rounds", type=_positive, default=10)

    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=_seed, default=42)

    sub.add_parser("round", parents=[common, with_alpha, seeded],
                   help="run one seeded concentration round")
    sub.add_parser("iterate", parents=[common, with_alpha, rounds],
                   help="table of s_k and p_k along the failure recursion")
    sub.add_parser("yield", parents=[common, with_alpha, rounds],
                   help="iterated yield against the single-round baseline")
    curve = sub.add_parser("curve", parents=[common, rounds],
                           help="sweep s0 = alpha^2 over (0, 1)")
    curve.add_argument("--points", type=_positive, default=99)
    mc = sub.add_parser("monte-carlo", parents=[common, with_alpha, rounds, seeded],
                        help="seeded Monte Carlo estimate of the yield")
    mc.add_argument("--trials", type=_positive, default=100_000)
    ghz = sub.add_parser("ghz", parents=[common, with_alpha, seeded],
                         help="one seeded round on an n-party GHZ-class source")
    ghz.add_argument("--parties", type=_parties, default=3)
    return parser


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    if isinstance(value, (list, tuple)):
        return ";".join(_fmt(v) for v in value)
    return str(value)


def _round_report(outcome: RoundOutcome, alpha: float, beta: float, seed: int) -> dict:
    spec = outcome.failure_spec
    return {
        "parties": outcome.parties,
        "alpha": alpha,
        "beta": beta,
        "seed": seed,
        "outcome": outcome.result.value,
        "p_success": outcome.success_probability,
        "branch_probability": outcome.branch_probability,
        "correction": ";".join(c.value for c in outcome.corrections),
        "fidelity": outcome.fidelity,
        "new_alpha": None if spec is None else spec.alpha.real,
        "new_beta": None if spec is None else spec.beta.real,
    }


def _run(args: argparse.Namespace) -> tuple[list[dict], Any]:
    """Return (csv/table rows, json payload)."""
    cmd = args.subcommand
    if cmd == "curve":
        rows = []
        for i in range(1, args.points + 1):
            s0 = i / (args.points + 1)
            rep = iterated_yield(s0, args.max_rounds)
            rows.append({"s0": s0, "p1": success_probability(s0),
                         "baseline_yield": rep.baseline_yield, "total_yield": rep.total_yield})
        return rows, rows

    alpha = args.alpha
    beta = math.sqrt(1.0 - alpha * alpha)
    s0 = alpha * alpha
    if cmd in ("round", "ghz"):
        parties = 2 if cmd == "round" else args.parties
        outcome = run_ghz_round(GhzSpec(parties, alpha, beta), np.random.default_rng(args.seed))
        row = _round_report(outcome, alpha, beta, args.seed)
        return [row], row
    if cmd == "iterate":
        rep = iterated_yield(s0, args.max_rounds)
        rows = [{"k": r.k, "s_k": r.s_k, "p_k": r.p_k} for r in rep.per_round]
        return rows, rows
    if cmd == "yield":
        rep = iterated_yield(s0, args.max_rounds)
        summary = {"s0": rep.s0, "max_rounds": rep.max_rounds,
                   "baseline_yield": rep.baseline_yield, "total_yield": rep.total_yield}
        payload = dict(summary, per_round=[
            {"k": r.k, "s_k": r.s_k, "p_k": r.p_k, "cumulative_yield": r.cumulative_yield}
            for r in rep.per_round
        ])
        return [summary], payload
    if cmd == "monte-carlo":
        rep = monte_carlo(s0, args.trials, args.max_rounds, args.seed)
        row = {
            "s0": rep.s0, "trials": rep.trials, "seed": rep.seed, "max_rounds": rep.max_rounds,
            "success_counts_per_round": list(rep.success_counts_per_round),
            "unresolved": rep.unresolved, "estimated_yield": rep.estimated_yield,
            "standard_error": rep.standard_error,
        }
        return [row], row
    raise AssertionError(cmd)


def _render(rows: list[dict], payload: Any, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    header = list(rows[0])
    cells = [[_fmt(r[h]) for h in header] for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(cells)
        return buf.getvalue()
    widths = [max(len(h), *(len(c[i]) for c in cells)) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        rows, payload = _run(args)
    except (SpinConcError, ValueError) as exc:
        print(f"spinconc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = _render(rows, payload, args.format)
    if args.output is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"spinconc: cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
