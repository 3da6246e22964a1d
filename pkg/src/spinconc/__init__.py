"""Exact simulation of electron-pair entanglement concentration with charge detection.

Two copies of ``alpha|↑↑> + beta|↓↓>`` are combined on Bob's side by a
polarizing beam splitter whose output is watched by a charge detector; an
occupation of exactly one electron heralds a maximally entangled pair, and the
failed branch is recycled into a new, predictable less-entangled pair.

Submodules
----------
statevec   labeled-electron pure states, gates, PBS routing, measurements
protocol   one concentration round, failure recovery, trajectories, GHZ variant
analysis   closed-form probabilities, yield recursion, seeded Monte Carlo
cli        ``spinconc`` command-line frontend
"""

__version__ = "0.1.0"

from .analysis import (  # noqa: E402
    MonteCarloReport,
    YieldReport,
    iterated_yield,
    monte_carlo,
    next_s,
    success_probability,
)
from .protocol import (  # noqa: E402
    GhzSpec,
    PairSpec,
    RoundOutcome,
    recover_failure,
    run_ghz_round,
    run_round,
    run_trajectory,
)
from .statevec import Mode, PureState, Spin  # noqa: E402

__all__ = [
    "GhzSpec",
    "Mode",
    "MonteCarloReport",
    "PairSpec",
    "PureState",
    "RoundOutcome",
    "Spin",
    "YieldReport",
    "iterated_yield",
    "monte_carlo",
    "next_s",
    "recover_failure",
    "run_ghz_round",
    "run_round",
    "run_trajectory",
    "success_probability",
]
