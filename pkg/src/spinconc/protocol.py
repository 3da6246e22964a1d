"""The concentration round, its failure recovery, iteration, and the GHZ variant.

Mode layout of one round (Alice holds ``a*``, Bob holds ``b*``/``c*``)::

    source 1:  a1 ---------------------------------------------- a1
               b1 --\
                     PBS1 --> c1 (charge detector P), c2
    source 2:  a2 -R90-> a3 --H-- D1                    b3 --/
               b2 -R90-> b3

On a failed parity check the two co-located Bob electrons are split by a
second PBS (c1, c2 -> c3, c4); the electron in c4 is measured together with
a3 and the pair a1/c3 is handed to the next round.

Further parties of a GHZ-class source hold modes ``x{k}_1`` (copy 1) and
``x{k}_2`` (copy 2), k = 3..n.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .exceptions import IdentityError, NormalizationError, ProtocolStateError
from .statevec import (
    NORM_TOL,
    ChargeReading,
    Mode,
    PbsSpec,
    PureState,
    Spin,
    apply_pbs,
    charge_detect,
    charge_detect_branch,
    electron_in,
    fidelity,
    global_phase,
    hadamard,
    make_ghz,
    measure_z,
    measure_z_branch,
    memoized,
    phase_flip,
    relabel_mode,
    rotate90,
    tensor,
)

__all__ = [
    "A1", "A2", "A3", "B1", "B2", "B3", "C1", "C2", "C3", "C4",
    "PBS1", "PBS2",
    "PairSpec",
    "GhzSpec",
    "RoundResult",
    "Correction",
    "RoundOutcome",
    "TrajectoryRecord",
    "Herald",
    "PreparedRound",
    "prepare_round",
    "measure_and_correct",
    "recover_failure",
    "run_round",
    "run_ghz_round",
    "run_trajectory",
    "ghz_target",
    "phi_plus",
]

A1 = Mode("a1", "alice")
A2 = Mode("a2", "alice")
A3 = Mode("a3", "alice")
B1 = Mode("b1", "bob")
B2 = Mode("b2", "bob")
B3 = Mode("b3", "bob")
C1 = Mode("c1", "bob")
C2 = Mode("c2", "bob")
C3 = Mode("c3", "bob")
C4 = Mode("c4", "bob")

# b1: up -> c2, down -> c1; b3: up -> c1, down -> c2
PBS1 = PbsSpec.from_ports((B1, B3), (C1, C2), up_from_first=1)
# c1: down -> c3, up -> c4; c2: up -> c3, down -> c4
PBS2 = PbsSpec.from_ports((C1, C2), (C3, C4), up_from_first=1)


@functools.lru_cache(maxsize=None)
def _other_modes(parties: int, copy: int) -> tuple[Mode, ...]:
    return tuple(Mode(f"x{k}_{copy}", f"party{k}") for k in range(3, parties + 1))


def _checked_coefficients(alpha: complex, beta: complex) -> tuple[complex, complex]:
    a, b = complex(alpha), complex(beta)
    if not (math.isfinite(a.real) and math.isfinite(a.imag)
            and math.isfinite(b.real) and math.isfinite(b.imag)):
        raise NormalizationError("pair coefficients must be finite")
    n2 = a.real * a.real + a.imag * a.imag + b.real * b.real + b.imag * b.imag
    if abs(n2 - 1.0) > NORM_TOL:
        raise NormalizationError(f"|alpha|^2 + |beta|^2 = {n2!r}, expected 1")
    return a, b


@dataclass(frozen=True)
class PairSpec:
    """Coefficients of ``alpha |↑↑> + beta |↓↓>``."""

    alpha: complex
    beta: complex

    def __post_init__(self) -> None:
        a, b = _checked_coefficients(self.alpha, self.beta)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @classmethod
    def from_s(cls, s: float) -> "PairSpec":
        """Real spec with ``|alpha|^2 = s``."""
        if not 0.0 <= s <= 1.0:
            raise NormalizationError(f"s must lie in [0, 1], got {s!r}")
        return cls(math.sqrt(s), math.sqrt(1.0 - s))

    @property
    def s(self) -> float:
        return abs(self.alpha) ** 2


@dataclass(frozen=True)
class GhzSpec:
    """``alpha |u>|↑↑> + beta |ū>|↓↓>`` shared by ``parties`` parties.

    ``u`` is a computational-basis register of ``parties - 2`` spins; it
    defaults to all spin-up.
    """

    parties: int
    alpha: complex
    beta: complex
    u: tuple[Spin, ...] | None = None

    def __post_init__(self) -> None:
        if int(self.parties) != self.parties or self.parties < 2:
            raise ProtocolStateError(f"need at least 2 parties, got {self.parties!r}")
        u = (Spin.UP,) * (self.parties - 2) if self.u is None else tuple(Spin(x) for x in self.u)
        if len(u) != self.parties - 2:
            raise ProtocolStateError(f"u register must have {self.parties - 2} spins, got {len(u)}")
        a, b = _checked_coefficients(self.alpha, self.beta)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "u", u)

    @property
    def pair(self) -> PairSpec:
        return PairSpec(self.alpha, self.beta)

    @property
    def s(self) -> float:
        return abs(self.alpha) ** 2


class RoundResult(enum.Enum):
    SUCCESS = "success"
    FAILURE = "failure"


class Correction(enum.Enum):
    NONE = "none"
    PHASE_FLIP = "phase_flip"


@dataclass(frozen=True)
class RoundOutcome:
    """Result of one concentration round.

    ``branch_probability`` is the probability of the charge-detector reading
    that occurred; ``success_probability`` is P(reading = one) for the input
    spec regardless of what happened.  Exactly one of ``success_state`` and
    ``failure_spec`` is set.
    """

    result: RoundResult
    branch_probability: float
    success_probability: float
    corrections: tuple[Correction, ...]
    success_state: PureState | None = None
    failure_spec: PairSpec | None = None
    target: PureState | None = None
    draws: tuple[tuple[str, str], ...] = ()
    parties: int = 2

    def __post_init__(self) -> None:
        if not -NORM_TOL <= self.branch_probability <= 1 + NORM_TOL:
            raise ProtocolStateError("branch probability outside [0, 1]")
        ok = (self.success_state is not None) != (self.failure_spec is not None)
        if not ok or (self.result is RoundResult.SUCCESS) != (self.success_state is not None):
            raise ProtocolStateError("exactly one payload must match the outcome tag")

    @property
    def succeeded(self) -> bool:
        return self.result is RoundResult.SUCCESS

    @property
    def fidelity(self) -> float | None:
        """Overlap of the success output with the ideal target state."""
        if self.success_state is None or self.target is None:
            return None
        return fidelity(self.success_state, self.target)


@dataclass(frozen=True)
class TrajectoryRecord:
    round_index: int
    outcome: RoundOutcome
    rng_draws: tuple[tuple[str, str], ...] = field(default=())


class Herald(NamedTuple):
    """Outcome of the Hadamard + Z-measurement + phase-flip stage."""

    outcomes: tuple[Spin, ...]
    probability: float
    uncorrected: PureState
    correction: Correction
    state: PureState


@dataclass(frozen=True)
class PreparedRound:
    """State of both copies right after the first PBS, before the charge detector."""

    state: PureState
    parties: int
    u: tuple[Spin, ...]

    @property
    def alice_keep(self) -> int:
        return electron_in(self.state, A1)

    @property
    def alice_measure(self) -> int:
        return electron_in(self.state, A3)

    @property
    def others_keep(self) -> tuple[int, ...]:
        return tuple(electron_in(self.state, m) for m in _other_modes(self.parties, 1))

    @property
    def others_measure(self) -> tuple[int, ...]:
        return tuple(electron_in(self.state, m) for m in _other_modes(self.parties, 2))


def prepare_round(spec: PairSpec | GhzSpec) -> PreparedRound:
    """Two copies of the source, R90 on copy 2, then Bob's PBS on b1/b3.

    R90 acts on every copy-2 electron; for the bipartite case these are a2 and
    b2 (renamed a3 and b3 afterwards).  Results are cached per spec; the
    returned state is immutable.
    """
    if isinstance(spec, PairSpec):
        spec = GhzSpec(2, spec.alpha, spec.beta)
    return _prepare(spec)


@functools.lru_cache(maxsize=1024)
def _prepare(spec: GhzSpec) -> PreparedRound:
    others1 = _other_modes(spec.parties, 1)
    others2 = _other_modes(spec.parties, 2)
    copy1 = make_ghz(spec.alpha, spec.beta, others1 + (A1, B1), spec.u)
    copy2 = make_ghz(spec.alpha, spec.beta, others2 + (A2, B2), spec.u)
    state = tensor(copy1, copy2)
    for e in copy2.electrons:
        state = rotate90(state, e)
    state = relabel_mode(relabel_mode(state, A2, A3), B2, B3)
    state = apply_pbs(state, PBS1)
    return PreparedRound(state, spec.parties, spec.u)


def measure_and_correct(
    state: PureState,
    measured: Sequence[int],
    flip_electron: int,
    rng: np.random.Generator | None = None,
    outcomes: Sequence[Spin] | None = None,
) -> Herald:
    """Hadamard and Z-measure each electron in ``measured``, then fix the sign.

    Every measured electron sits in opposite spins in the two surviving
    branches, so after the Hadamards the relative sign is (-1)^(number of
    spin-down results).  An odd count is undone by a phase flip on
    ``flip_electron``.  Outcomes are sampled from ``rng`` unless ``outcomes``
    forces them.
    """
    if (rng is None) == (outcomes is None):
        raise ValueError("pass exactly one of rng or outcomes")
    if outcomes is not None and len(outcomes) != len(measured):
        raise ValueError("one forced outcome per measured electron is required")
    for e in measured:
        state = hadamard(state, e)
    results = []
    probability = 1.0
    for k, e in enumerate(measured):
        if outcomes is None:
            spin, p, state = measure_z(state, e, rng)
        else:
            spin = Spin(outcomes[k])
            p, state = measure_z_branch(state, e, spin)
        results.append(spin)
        probability *= p
    uncorrected = state
    if sum(1 for s in results if s is Spin.DOWN) % 2:
        return Herald(tuple(results), probability, uncorrected, Correction.PHASE_FLIP,
                      phase_flip(state, flip_electron))
    return Herald(tuple(results), probability, uncorrected, Correction.NONE, state)


@memoized
def _read_spec(state: PureState, keep: Sequence[int], pair_modes: tuple[Mode, Mode],
               u: tuple[Spin, ...], other_modes: Sequence[Mode]) -> PairSpec:
    """Extract (alpha, beta) from ``alpha|u>|↑↑> + beta|ū>|↓↓>``, global phase removed."""
    modes = tuple(other_modes) + pair_modes
    order = [state.index(e) for e in keep]
    up = tuple(zip(modes, u + (Spin.UP, Spin.UP)))
    down = tuple(zip(modes, tuple(s.flipped for s in u) + (Spin.DOWN, Spin.DOWN)))
    amps = {}
    for config, amp in state.terms.items():
        key = tuple(config[i] for i in order)
        if key not in (up, down):
            raise ProtocolStateError(f"unexpected term {key} in recovered pair")
        amps[key] = amp
    alpha, beta = amps.get(up, 0j), amps.get(down, 0j)
    phase = global_phase(alpha if alpha != 0 else beta).conjugate()
    alpha, beta = alpha * phase, beta * phase
    # strip rounding noise so the normalized spec passes validation
    scale = 1.0 / math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
    return PairSpec(alpha * scale, beta * scale)


@memoized
def _check_failure_state(state: PureState, parties: int) -> None:
    if not state.is_normalized:
        raise ProtocolStateError("failure state must be normalized")
    if len(state.electrons) != 2 * parties:
        raise ProtocolStateError(f"expected {2 * parties} electrons, got {len(state.electrons)}")
    for config in state.terms:
        modes = [m for m, _ in config]
        bob = [m for m in modes if m in (C1, C2)]
        if len(bob) != 2 or bob[0] != bob[1] or A1 not in modes or A3 not in modes:
            raise ProtocolStateError("not a failed parity-check branch: Bob's electrons must share c1 or c2")


def _recover(state: PureState, parties: int, u: tuple[Spin, ...],
             rng: np.random.Generator | None, outcomes: Sequence[Spin] | None
             ) -> tuple[PairSpec, PureState, Herald]:
    _check_failure_state(state, parties)
    state = apply_pbs(state, PBS2)
    try:
        keep_a, keep_b = electron_in(state, A1), electron_in(state, C3)
        measured = (electron_in(state, A3), electron_in(state, C4))
        measured += tuple(electron_in(state, m) for m in _other_modes(parties, 2))
        others = tuple(electron_in(state, m) for m in _other_modes(parties, 1))
    except IdentityError as exc:
        raise ProtocolStateError(f"failure state has an unexpected layout: {exc}") from exc
    herald = measure_and_correct(state, measured, keep_a, rng=rng, outcomes=outcomes)
    spec = _read_spec(herald.state, others + (keep_a, keep_b), (A1, C3), u, _other_modes(parties, 1))
    return spec, herald.state, herald


def recover_failure(
    failure_state: PureState,
    rng: np.random.Generator | None = None,
    outcomes: Sequence[Spin] | None = None,
) -> tuple[PairSpec, PureState]:
    """Turn a failed parity-check branch into a fresh less-entangled pair.

    ``failure_state`` is the normalized not-one branch of a bipartite round.
    The output pair lives on a1/c3 and equals
    ``(alpha^2 |↑↑> + beta^2 |↓↓>) / sqrt(|alpha|^4 + |beta|^4)``.
    Without ``rng`` or ``outcomes`` both detectors are taken to read spin-up;
    the result does not depend on the readings once corrected.
    """
    if rng is None and outcomes is None:
        outcomes = (Spin.UP, Spin.UP)
    spec, post, _ = _recover(failure_state, 2, (), rng, outcomes)
    return spec, post


def phi_plus(ids: tuple[int, int], modes: tuple[Mode, Mode] = (A1, C1)) -> PureState:
    """``(|↑↑> + |↓↓>)/√2`` on the given electrons."""
    return make_ghz(1 / math.sqrt(2), 1 / math.sqrt(2), modes, (), ids)


@functools.lru_cache(maxsize=256)
def _cached_target(ids: tuple[int, ...], u: tuple[Spin, ...], modes: tuple[Mode, ...]) -> PureState:
    return make_ghz(1 / math.sqrt(2), 1 / math.sqrt(2), modes, u, ids)


def ghz_target(ids: Sequence[int], u: Sequence[Spin], modes: Sequence[Mode]) -> PureState:
    """``(|u>|↑↑> + |ū>|↓↓>)/√2`` on the given electrons."""
    return _cached_target(tuple(ids), tuple(Spin(x) for x in u), tuple(modes))


def run_ghz_round(spec: GhzSpec, rng: np.random.Generator) -> RoundOutcome:
    """One round for an n-party source; n = 2 is exactly :func:`run_round`."""
    prepared = prepare_round(spec)
    state = prepared.state
    reading, p_branch, state = charge_detect(state, C1, rng)
    p_success = p_branch if reading is ChargeReading.ONE else 1.0 - p_branch
    draws = [("P", reading.value)]
    others_modes = _other_modes(spec.parties, 1)
    if reading is ChargeReading.ONE:
        keep_a, keep_b = electron_in(state, A1), electron_in(state, C1)
        others = tuple(electron_in(state, m) for m in others_modes)
        measured = (electron_in(state, A3), electron_in(state, C2))
        measured += tuple(electron_in(state, m) for m in _other_modes(spec.parties, 2))
        herald = measure_and_correct(state, measured, keep_a, rng=rng)
        draws += [(f"D{k + 1}", str(s)) for k, s in enumerate(herald.outcomes)]
        target = ghz_target(others + (keep_a, keep_b), spec.u, others_modes + (A1, C1))
        return RoundOutcome(
            RoundResult.SUCCESS, p_branch, p_success, (herald.correction,),
            success_state=herald.state, target=target, draws=tuple(draws),
            parties=spec.parties,
        )
    new_spec, _, herald = _recover(state, spec.parties, spec.u, rng, None)
    draws += [(f"D{k + 1}", str(s)) for k, s in enumerate(herald.outcomes)]
    return RoundOutcome(
        RoundResult.FAILURE, p_branch, p_success, (herald.correction,),
        failure_spec=new_spec, draws=tuple(draws), parties=spec.parties,
    )


def run_round(spec: PairSpec, rng: np.random.Generator) -> RoundOutcome:
    """Parity check on two copies of ``spec``; see the module docstring for the layout.

    >>> out = run_round(PairSpec.from_s(0.5), np.random.default_rng(0))
    >>> round(out.success_probability, 12)
    0.5
    """
    return run_ghz_round(GhzSpec(2, spec.alpha, spec.beta), rng)


def run_trajectory(
    spec: PairSpec | GhzSpec, max_rounds: int, rng: np.random.Generator
) -> list[TrajectoryRecord]:
    """Iterate rounds, feeding each failure output into the next round.

    Stops at the first success or after ``max_rounds`` rounds.
    """
    if max_rounds < 1:
        raise ValueError(f"max_rounds must be >= 1, got {max_rounds}")
    if isinstance(spec, PairSpec):
        spec = GhzSpec(2, spec.alpha, spec.beta)
    records = []
    for k in range(1, max_rounds + 1):
        outcome = run_ghz_round(spec, rng)
        records.append(TrajectoryRecord(k, outcome, outcome.draws))
        if outcome.succeeded:
            break
        spec = GhzSpec(spec.parties, outcome.failure_spec.alpha, outcome.failure_spec.beta, spec.u)
    return records


def iter_specs(spec: PairSpec, rounds: int) -> Iterable[PairSpec]:
    """Yield the failure-output spec of each successive round (state-vector route)."""
    for _ in range(rounds):
        prepared = prepare_round(spec)
        _, failed = charge_detect_branch(prepared.state, C1, ChargeReading.NOT_ONE)
        spec, _ = recover_failure(failed)
        yield spec
