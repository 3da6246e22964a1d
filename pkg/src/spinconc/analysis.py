"""Closed-form success probabilities, the coefficient recursion, yields, and Monte Carlo.

Everything here is a function of ``s = |alpha|^2``.  One round succeeds with
probability ``2 s (1 - s)``; on failure the recovered pair has
``s' = s^2 / (s^2 + (1 - s)^2)``.  Yield is counted in maximally entangled
pairs per initial source pair: a success in round ``k`` used ``2^k`` initial
pairs.

Random numbers come from NumPy's PCG64 bit generator.  Trials are processed in
fixed chunks of ``MC_CHUNK``; chunk ``i`` is driven by
``Generator(PCG64(SeedSequence(seed).spawn(...)[i]))``, so a report depends
only on ``(s0, trials, max_rounds, seed)`` and not on the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError
from .protocol import PairSpec, run_trajectory

__all__ = [
    "MC_CHUNK",
    "RoundRow",
    "YieldReport",
    "MonteCarloReport",
    "success_probability",
    "next_s",
    "baseline_yield",
    "iterated_yield",
    "limit_yield",
    "monte_carlo",
]

MC_CHUNK = 10_000
CONVERGENCE_TOL = 1e-12


def _check_unit(s: float, name: str = "s") -> float:
    s = float(s)
    if not (0.0 <= s <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {s!r}")
    return s


def success_probability(s: float) -> float:
    """Probability that the parity check reads one electron: ``2 s (1 - s)``.

    >>> success_probability(0.64)
    0.4608
    """
    s = _check_unit(s)
    return 2.0 * s * (1.0 - s)


def _next_s(s: float) -> float:
    return s * s / (s * s + (1.0 - s) ** 2)


def next_s(s: float) -> float:
    """``|alpha'|^2`` of the pair recovered from a failed round.

    The exact endpoints 0 and 1 are rejected: failure is certain there and the
    recovered pair is a product state.
    """
    s = _check_unit(s)
    if s in (0.0, 1.0):
        raise DomainError(f"recursion is degenerate at s = {s!r}")
    return _next_s(s)


def baseline_yield(s0: float) -> float:
    """Single round, failures discarded (the linear-optics reference)."""
    return success_probability(s0) / 2.0


@dataclass(frozen=True)
class RoundRow:
    k: int
    s_k: float
    p_k: float
    cumulative_yield: float


@dataclass(frozen=True)
class YieldReport:
    s0: float
    max_rounds: int
    per_round: tuple[RoundRow, ...]
    total_yield: float
    baseline_yield: float


def iterated_yield(s0: float, max_rounds: int) -> YieldReport:
    """Expected yield when failed pairs are recycled for up to ``max_rounds`` rounds."""
    s0 = _check_unit(s0, "s0")
    if max_rounds < 1:
        raise DomainError(f"max_rounds must be >= 1, got {max_rounds}")
    rows = []
    s, reach, total = s0, 1.0, 0.0
    for k in range(1, max_rounds + 1):
        p = 2.0 * s * (1.0 - s)
        total += reach * p / 2.0**k
        rows.append(RoundRow(k, s, p, total))
        reach *= 1.0 - p
        if 0.0 < s < 1.0:
            s = _next_s(s)
    return YieldReport(s0, max_rounds, tuple(rows), total, baseline_yield(s0))


def limit_yield(s0: float, tol: float = CONVERGENCE_TOL, cap: int = 200) -> YieldReport:
    """Iterate until one more round adds less than ``tol`` to the yield."""
    s0 = _check_unit(s0, "s0")
    prev = None
    for k in range(1, cap + 1):
        report = iterated_yield(s0, k)
        if prev is not None and abs(report.total_yield - prev) < tol:
            return report
        prev = report.total_yield
    return report


@dataclass(frozen=True)
class MonteCarloReport:
    """Seeded Monte Carlo estimate of per-round successes and yield.

    ``standard_error`` is the standard error of ``estimated_yield`` (sample
    standard deviation of the per-trial yield over sqrt(trials)).
    """

    s0: float
    trials: int
    seed: int
    max_rounds: int
    success_counts_per_round: tuple[int, ...]
    unresolved: int
    estimated_yield: float
    standard_error: float
    frequencies: tuple[float, ...] = field(default=())

    def frequency_stderr(self, k: int) -> float:
        """Binomial standard error of the round-``k`` success frequency."""
        p = self.success_counts_per_round[k - 1] / self.trials
        return math.sqrt(p * (1.0 - p) / self.trials)


def _run_chunk(args: tuple[float, int, int, np.random.SeedSequence]) -> list[int]:
    s0, n, max_rounds, seq = args
    rng = np.random.Generator(np.random.PCG64(seq))
    spec = PairSpec.from_s(s0)
    counts = [0] * (max_rounds + 1)  # last slot: unresolved
    for _ in range(n):
        records = run_trajectory(spec, max_rounds, rng)
        last = records[-1]
        counts[last.round_index - 1 if last.outcome.succeeded else max_rounds] += 1
    return counts


def monte_carlo(
    s0: float, trials: int, max_rounds: int, seed: int, workers: int = 1
) -> MonteCarloReport:
    """Sample ``trials`` full state-vector trajectories.

    A trajectory succeeding in round ``k`` contributes ``2**-k`` to the yield.
    """
    s0 = _check_unit(s0, "s0")
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    if max_rounds < 1:
        raise DomainError(f"max_rounds must be >= 1, got {max_rounds}")
    if not 0 <= seed < 2**64:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
    n_chunks = -(-trials // MC_CHUNK)
    seqs = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [min(MC_CHUNK, trials - i * MC_CHUNK) for i in range(n_chunks)]
    jobs = [(s0, n, max_rounds, q) for n, q in zip(sizes, seqs)]
    if workers > 1 and n_chunks > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    else:
        parts = [_run_chunk(job) for job in jobs]
    totals = [sum(col) for col in zip(*parts)]
    counts, unresolved = tuple(totals[:-1]), totals[-1]

    mean = sum(c * 2.0**-k for k, c in enumerate(counts, start=1)) / trials
    second = sum(c * 4.0**-k for k, c in enumerate(counts, start=1)) / trials
    var = max(second - mean * mean, 0.0)
    if trials > 1:
        var *= trials / (trials - 1)
    return MonteCarloReport(
        s0=s0,
        trials=trials,
        seed=seed,
        max_rounds=max_rounds,
        success_counts_per_round=counts,
        unresolved=unresolved,
        estimated_yield=mean,
        standard_error=math.sqrt(var / trials),
        frequencies=tuple(c / trials for c in counts),
    )
