"""Exact pure states of labeled electrons with spin and spatial-mode degrees of freedom.

A basis configuration assigns every tracked electron a ``(mode, spin)`` slot.
A :class:`PureState` is a sparse superposition of such configurations.  All
operations are functional: they return new states and never mutate their input.

Electrons are treated as identical particles without exchange signs.  When a
polarizing beam splitter mixes two electrons, their ids are re-assigned per
term in the canonical order of the output slots (see :func:`apply_pbs`), so
that "the electron in mode c2" is a well defined id afterwards.
"""

from __future__ import annotations

import enum
import functools
import itertools
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .exceptions import (
    ExclusionError,
    IdentityError,
    LabelError,
    NormalizationError,
    ProjectionError,
)

__all__ = [
    "NORM_TOL",
    "PRUNE_TOL",
    "Spin",
    "Mode",
    "ChargeReading",
    "PbsSpec",
    "PureState",
    "new_electron_ids",
    "make_pair",
    "make_ghz",
    "tensor",
    "apply_spin_gate",
    "rotate90",
    "hadamard",
    "phase_flip",
    "relabel_mode",
    "apply_pbs",
    "charge_detect",
    "charge_detect_branch",
    "measure_z",
    "measure_z_branch",
    "electron_in",
    "fidelity",
    "global_phase",
    "memoized",
]

NORM_TOL = 1e-12
PRUNE_TOL = 1e-30


class Spin(enum.IntEnum):
    UP = 0
    DOWN = 1

    @property
    def flipped(self) -> "Spin":
        return Spin(1 - self)

    def __str__(self) -> str:
        return "up" if self is Spin.UP else "down"


class Mode(NamedTuple):
    """A spatial mode, e.g. ``Mode("c1", "bob")``."""

    name: str
    party: str

    def __str__(self) -> str:
        return self.name


class ChargeReading(enum.Enum):
    """What the charge detector reports: exactly one electron, or 0/2."""

    ONE = "one"
    NOT_ONE = "not_one"


Slot = tuple[Mode, Spin]
Config = tuple[Slot, ...]

_ids = itertools.count(1)


def new_electron_ids(n: int) -> tuple[int, ...]:
    """Draw ``n`` fresh, process-unique electron ids."""
    return tuple(next(_ids) for _ in range(n))


def memoized(fn):
    """Cache a pure ``fn(state, *args)`` on the (immutable) input state."""

    @functools.wraps(fn)
    def wrapper(state, *args):
        memo = state.__dict__.setdefault("_memo", {})
        key = (fn.__name__, args)
        try:
            return memo[key]
        except KeyError:
            result = memo[key] = fn(state, *args)
            return result
        except TypeError:  # unhashable argument
            return fn(state, *args)

    return wrapper


def _finite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)


@dataclass(frozen=True)
class PureState:
    """Sparse superposition of basis configurations.

    ``terms`` maps a configuration (one ``(mode, spin)`` slot per entry of
    ``electrons``, in the same order) to its complex amplitude.  Terms whose
    weight falls below ``PRUNE_TOL`` are dropped on construction.  The
    constructor does not force unit norm; use :meth:`normalized` or check
    :attr:`is_normalized`.
    """

    electrons: tuple[int, ...]
    terms: Mapping[Config, complex] = field(repr=False)

    def __post_init__(self) -> None:
        electrons = tuple(self.electrons)
        if len(set(electrons)) != len(electrons):
            raise LabelError(f"duplicate electron ids in {electrons}")
        kept = {}
        for config, amp in self.terms.items():
            amp = complex(amp)
            if not _finite(amp):
                raise NormalizationError(f"non-finite amplitude {amp!r}")
            if len(config) != len(electrons):
                raise LabelError("configuration length does not match electron count")
            if abs(amp) ** 2 >= PRUNE_TOL:
                kept[tuple(config)] = amp
        object.__setattr__(self, "electrons", electrons)
        object.__setattr__(self, "terms", MappingProxyType(kept))

    @classmethod
    def _trusted(cls, electrons: tuple[int, ...], terms: dict[Config, complex]) -> "PureState":
        # internal fast path: inputs already validated, only pruning is applied
        self = object.__new__(cls)
        kept = {c: a for c, a in terms.items() if a.real * a.real + a.imag * a.imag >= PRUNE_TOL}
        object.__setattr__(self, "electrons", electrons)
        object.__setattr__(self, "terms", MappingProxyType(kept))
        return self

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        return f"PureState({self.pretty()})"

    @functools.cached_property
    def norm_squared(self) -> float:
        return float(sum(a.real * a.real + a.imag * a.imag for a in self.terms.values()))

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm_squared - 1.0) <= NORM_TOL

    def normalized(self) -> "PureState":
        n2 = self.norm_squared
        if n2 < PRUNE_TOL:
            raise ProjectionError("cannot normalize a zero state")
        scale = 1.0 / math.sqrt(n2)
        return PureState._trusted(self.electrons, {c: a * scale for c, a in self.terms.items()})

    def index(self, electron: int) -> int:
        try:
            return self.electrons.index(electron)
        except ValueError:
            raise IdentityError(f"electron {electron} is not tracked by this state") from None

    @functools.cached_property
    def modes(self) -> frozenset[Mode]:
        return frozenset(mode for config in self.terms for mode, _ in config)

    def spin_probability(self, electron: int, spin: Spin) -> float:
        """Born probability that ``electron`` has ``spin`` (state assumed normalized)."""
        i = self.index(electron)
        return float(sum(abs(a) ** 2 for c, a in self.terms.items() if c[i][1] == spin))

    def amplitude(self, config: Iterable[Slot]) -> complex:
        return self.terms.get(tuple(config), 0j)

    def pretty(self, digits: int = 4) -> str:
        if not self.terms:
            return "0"
        parts = []
        for config, amp in sorted(self.terms.items(), key=lambda kv: kv[0]):
            ket = "".join(f"|{'↑' if s is Spin.UP else '↓'}>_{m.name}" for m, s in config)
            parts.append(f"({amp.real:.{digits}g}{amp.imag:+.{digits}g}j){ket}")
        return " + ".join(parts)


def _check_pauli(electrons: Sequence[int], terms: Mapping[Config, complex]) -> None:
    for config in terms:
        if len(set(config)) != len(config):
            raise ExclusionError(f"two electrons share a (mode, spin) slot in {config}")


def _check_normalized(*coeffs: complex) -> None:
    for c in coeffs:
        if not _finite(complex(c)):
            raise NormalizationError(f"non-finite coefficient {c!r}")
    total = sum(abs(complex(c)) ** 2 for c in coeffs)
    if abs(total - 1.0) > NORM_TOL:
        raise NormalizationError(f"coefficients have squared norm {total!r}, expected 1")


def make_ghz(
    alpha: complex,
    beta: complex,
    modes: Sequence[Mode],
    u: Sequence[Spin] = (),
    ids: Sequence[int] | None = None,
) -> PureState:
    """Build ``alpha |u>|↑↑> + beta |ū>|↓↓>``.

    ``modes`` lists one mode per electron; the first ``len(u)`` electrons carry
    the register ``u`` (``ū`` is its componentwise flip) and the last two are
    the pair.  With ``u == ()`` this is the two-electron state of
    :func:`make_pair`.
    """
    modes = tuple(modes)
    u = tuple(Spin(s) for s in u)
    if len(modes) != len(u) + 2:
        raise LabelError(f"expected {len(u) + 2} modes, got {len(modes)}")
    if len(set(modes)) != len(modes) or len({m.name for m in modes}) != len(modes):
        raise LabelError(f"modes must be distinct: {[m.name for m in modes]}")
    _check_normalized(alpha, beta)
    ids = new_electron_ids(len(modes)) if ids is None else tuple(ids)
    if len(ids) != len(modes):
        raise LabelError("one electron id per mode is required")
    up = tuple(zip(modes, u + (Spin.UP, Spin.UP)))
    down = tuple(zip(modes, tuple(s.flipped for s in u) + (Spin.DOWN, Spin.DOWN)))
    return PureState(ids, {up: complex(alpha), down: complex(beta)})


def make_pair(
    alpha: complex,
    beta: complex,
    modes: tuple[Mode, Mode],
    ids: Sequence[int] | None = None,
) -> PureState:
    """Two-electron state ``alpha |↑↑> + beta |↓↓>`` on ``modes``.

    >>> s = make_pair(0.8, 0.6, (Mode("a1", "alice"), Mode("b1", "bob")))
    >>> len(s), round(s.norm_squared, 12)
    (2, 1.0)
    """
    return make_ghz(alpha, beta, modes, (), ids)


def tensor(s1: PureState, s2: PureState) -> PureState:
    if set(s1.electrons) & set(s2.electrons):
        raise LabelError("states share electron ids")
    if s1.modes & s2.modes or {m.name for m in s1.modes} & {m.name for m in s2.modes}:
        raise LabelError("states share mode labels")
    terms = {c1 + c2: a1 * a2 for c1, a1 in s1.terms.items() for c2, a2 in s2.terms.items()}
    _check_pauli(s1.electrons + s2.electrons, terms)
    return PureState._trusted(s1.electrons + s2.electrons, terms)


def apply_spin_gate(state: PureState, electron: int, matrix: np.ndarray) -> PureState:
    """Apply a 2x2 spin unitary (rows = output spin, columns = input spin)."""
    i = state.index(electron)
    m = np.asarray(matrix, dtype=complex)
    out: dict[Config, complex] = {}
    for config, amp in state.terms.items():
        mode, spin = config[i]
        for new_spin in Spin:
            coeff = m[new_spin, spin]
            if coeff == 0:
                continue
            key = config[:i] + ((mode, new_spin),) + config[i + 1 :]
            out[key] = out.get(key, 0j) + coeff * amp
    return PureState._trusted(state.electrons, out)


_R90 = np.array([[0, 1], [1, 0]], dtype=complex)
_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_PHASE_FLIP = np.array([[1, 0], [0, -1]], dtype=complex)


@memoized
def rotate90(state: PureState, electron: int) -> PureState:
    """Half-wave plate: exchange ↑ and ↓ of one electron."""
    i = state.index(electron)
    out = {}
    for config, amp in state.terms.items():
        mode, spin = config[i]
        out[config[:i] + ((mode, spin.flipped),) + config[i + 1 :]] = amp
    return PureState._trusted(state.electrons, out)


@memoized
def hadamard(state: PureState, electron: int) -> PureState:
    """↑ -> (↑ + ↓)/√2, ↓ -> (↑ - ↓)/√2."""
    return apply_spin_gate(state, electron, _HADAMARD)


@memoized
def phase_flip(state: PureState, electron: int) -> PureState:
    """Multiply every term where ``electron`` is ↓ by -1."""
    i = state.index(electron)
    return PureState._trusted(
        state.electrons,
        {c: (-a if c[i][1] is Spin.DOWN else a) for c, a in state.terms.items()},
    )


@memoized
def relabel_mode(state: PureState, old: Mode, new: Mode) -> PureState:
    """Rename a spatial mode everywhere it occurs (pure bookkeeping)."""
    if new != old and new in state.modes:
        raise LabelError(f"mode {new.name} already in use")
    out = {
        tuple((new if m == old else m, s) for m, s in config): amp
        for config, amp in state.terms.items()
    }
    return PureState._trusted(state.electrons, out)


@dataclass(frozen=True)
class PbsSpec:
    """Two-port polarizing beam splitter.

    ``routing[(input_mode, spin)]`` gives the output mode.  Spin is never
    changed.  Validation enforces that the two inputs send equal spins to
    different outputs.
    """

    input_modes: tuple[Mode, Mode]
    output_modes: tuple[Mode, Mode]
    routing: Mapping[tuple[Mode, Spin], Mode]

    def __post_init__(self) -> None:
        ins, outs = tuple(self.input_modes), tuple(self.output_modes)
        if len(set(ins)) != 2 or len(set(outs)) != 2:
            raise LabelError("a PBS needs two distinct inputs and two distinct outputs")
        if set(ins) & set(outs):
            raise LabelError("PBS input and output modes must differ")
        routing = dict(self.routing)
        expected = {(m, s) for m in ins for s in Spin}
        if set(routing) != expected:
            raise LabelError("PBS routing must cover both inputs and both spins exactly")
        for spin in Spin:
            a, b = routing[(ins[0], spin)], routing[(ins[1], spin)]
            if a not in outs or b not in outs or a == b:
                raise LabelError(f"spin-{spin} electrons from both inputs must reach different outputs")
        object.__setattr__(self, "input_modes", ins)
        object.__setattr__(self, "output_modes", outs)
        object.__setattr__(self, "routing", MappingProxyType(routing))

    def __hash__(self) -> int:
        return hash((self.input_modes, self.output_modes, tuple(sorted(self.routing.items()))))

    @classmethod
    def from_ports(
        cls,
        input_modes: tuple[Mode, Mode],
        output_modes: tuple[Mode, Mode],
        up_from_first: int,
    ) -> "PbsSpec":
        """Convenience constructor.

        Spin-up from the first input goes to ``output_modes[up_from_first]``;
        everything else follows from the two-port constraints (first input's
        spin-down goes to the other output, second input is mirrored).
        """
        o = output_modes
        k = up_from_first
        routing = {
            (input_modes[0], Spin.UP): o[k],
            (input_modes[0], Spin.DOWN): o[1 - k],
            (input_modes[1], Spin.UP): o[1 - k],
            (input_modes[1], Spin.DOWN): o[k],
        }
        return cls(input_modes, output_modes, routing)


@memoized
def apply_pbs(state: PureState, pbs: PbsSpec) -> PureState:
    """Route every electron sitting in a PBS input to its output mode.

    Electrons leaving the PBS are indistinguishable, so within each term their
    ids are re-assigned so that the lowest id takes the first output slot in
    the order (output port, spin).  This keeps a coherent superposition
    coherent: the electron found in a given output has the same id in every
    term where that output holds one electron.
    """
    out_rank = {m: k for k, m in enumerate(pbs.output_modes)}
    routing = pbs.routing
    ins = set(pbs.input_modes)
    out: dict[Config, complex] = {}
    for config, amp in state.terms.items():
        moving = [i for i, (m, _) in enumerate(config) if m in ins]
        if any(m in out_rank for m, _ in config):
            raise LabelError("PBS output modes are already occupied")
        new = list(config)
        slots = sorted(
            ((routing[config[i]], config[i][1]) for i in moving),
            key=lambda slot: (out_rank[slot[0]], slot[1]),
        )
        ranked = sorted(moving, key=lambda i: state.electrons[i])
        for i, slot in zip(ranked, slots):
            new[i] = slot
        key = tuple(new)
        out[key] = out.get(key, 0j) + amp
    _check_pauli(state.electrons, out)
    return PureState._trusted(state.electrons, out)


def _occupation(config: Config, mode: Mode) -> int:
    return sum(1 for m, _ in config if m == mode)


def _project(
    state: PureState, keep: Callable[[Config], bool]
) -> tuple[float, dict[Config, complex]]:
    kept = {c: a for c, a in state.terms.items() if keep(c)}
    return float(sum(abs(a) ** 2 for a in kept.values())), kept


@memoized
@memoized
def _one_weight(state: PureState, mode: Mode) -> float:
    return _project(state, lambda c: _occupation(c, mode) == 1)[0]


@memoized
def charge_detect_branch(
    state: PureState, mode: Mode, forced: ChargeReading
) -> tuple[float, PureState]:
    """Probability and normalized post-state of one charge-detector reading.

    The detector only distinguishes occupation 1 from occupation 0 or 2 in
    ``mode``; spins are untouched.
    """
    forced = ChargeReading(forced)
    want_one = forced is ChargeReading.ONE
    p, kept = _project(state, lambda c: (_occupation(c, mode) == 1) == want_one)
    if p < PRUNE_TOL:
        raise ProjectionError(f"charge reading {forced.value} in {mode.name} has zero probability")
    return p, PureState._trusted(state.electrons, kept).normalized()


def charge_detect(
    state: PureState, mode: Mode, rng: np.random.Generator
) -> tuple[ChargeReading, float, PureState]:
    """Sample the charge detector on ``mode`` with the Born rule.

    Returns the reading, its probability, and the normalized post-state.
    Consumes exactly one ``rng.random()`` draw.
    """
    p_one = _one_weight(state, mode) / state.norm_squared
    reading = ChargeReading.ONE if rng.random() < p_one else ChargeReading.NOT_ONE
    p, post = charge_detect_branch(state, mode, reading)
    return reading, p / state.norm_squared, post


@memoized
def measure_z_branch(state: PureState, electron: int, forced: Spin) -> tuple[float, PureState]:
    """Project ``electron`` onto spin ``forced`` and drop it from the state."""
    i = state.index(electron)
    forced = Spin(forced)
    out: dict[Config, complex] = {}
    p = 0.0
    for config, amp in state.terms.items():
        if config[i][1] is forced:
            p += abs(amp) ** 2
            key = config[:i] + config[i + 1 :]
            out[key] = out.get(key, 0j) + amp
    if p < PRUNE_TOL:
        raise ProjectionError(f"spin {forced} of electron {electron} has zero probability")
    rest = state.electrons[:i] + state.electrons[i + 1 :]
    return p / state.norm_squared, PureState._trusted(rest, out).normalized()


@memoized
def _up_weight(state: PureState, electron: int) -> float:
    return state.spin_probability(electron, Spin.UP)


def measure_z(
    state: PureState, electron: int, rng: np.random.Generator
) -> tuple[Spin, float, PureState]:
    """Destructive Z measurement; the measured electron leaves the tracked set."""
    p_up = _up_weight(state, electron) / state.norm_squared
    spin = Spin.UP if rng.random() < p_up else Spin.DOWN
    p, post = measure_z_branch(state, electron, spin)
    return spin, p, post


@memoized
def electron_in(state: PureState, mode: Mode) -> int:
    """Id of the single electron found in ``mode`` in every term."""
    found = set()
    for config in state.terms:
        here = [state.electrons[i] for i, (m, _) in enumerate(config) if m == mode]
        if len(here) != 1:
            raise IdentityError(f"mode {mode.name} does not hold exactly one electron in every term")
        found.add(here[0])
    if len(found) != 1:
        raise IdentityError(f"mode {mode.name} is not occupied by a single electron id")
    return found.pop()


def fidelity(s1: PureState, s2: PureState) -> float:
    """``|<s1|s2>|^2`` for normalized states over the same electrons."""
    if set(s1.electrons) != set(s2.electrons):
        raise IdentityError(f"electron sets differ: {s1.electrons} vs {s2.electrons}")
    perm = [s2.electrons.index(e) for e in s1.electrons]
    overlap = 0j
    for config, amp in s2.terms.items():
        key = tuple(config[k] for k in perm)
        overlap += s1.terms.get(key, 0j).conjugate() * amp
    return min(1.0, abs(overlap) ** 2)


def global_phase(z: complex) -> complex:
    """Unit-modulus phase of ``z`` (1 for zero)."""
    return 1 + 0j if z == 0 else z / abs(z)
