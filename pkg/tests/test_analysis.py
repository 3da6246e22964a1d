import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinconc.analysis import (
    baseline_yield,
    iterated_yield,
    limit_yield,
    monte_carlo,
    next_s,
    success_probability,
)
from spinconc.exceptions import DomainError
from spinconc.protocol import PairSpec, iter_specs, prepare_round, C1
from spinconc.statevec import ChargeReading, charge_detect_branch

import oracles
from helpers import GRID

interior = st.floats(min_value=1e-6, max_value=1 - 1e-6)


# --- success_probability / next_s -----------------------------------------


@pytest.mark.parametrize("s, p", [(0.5, 0.5), (0.64, 0.4608), (1.0, 0.0), (0.0, 0.0)])
def test_success_probability_values(s, p):
    assert success_probability(s) == pytest.approx(p, abs=1e-15)


@pytest.mark.parametrize("s", [-0.1, 1.2, float("nan")])
def test_success_probability_domain(s):
    with pytest.raises(DomainError):
        success_probability(s)


@pytest.mark.parametrize("s, expected", [(0.5, 0.5), (0.64, 0.4096 / 0.5392), (0.9, 0.81 / 0.82)])
def test_next_s_values(s, expected):
    assert next_s(s) == pytest.approx(expected, abs=1e-15)


def test_next_s_decimals():
    assert next_s(0.64) == pytest.approx(0.759644, abs=5e-7)
    assert next_s(0.9) == pytest.approx(0.987804, abs=1e-6)  # quoted truncated


@pytest.mark.parametrize("s", [0.0, 1.0])
def test_next_s_endpoints_rejected(s):
    with pytest.raises(DomainError):
        next_s(s)


@given(interior)
def test_symmetries(s):
    assert success_probability(s) == pytest.approx(success_probability(1 - s), abs=1e-15)
    assert next_s(1 - s) == pytest.approx(1 - next_s(s), abs=1e-12)


@pytest.mark.parametrize("s", GRID)
def test_formulas_match_state_vector(s):
    spec = PairSpec.from_s(s)
    p, _ = charge_detect_branch(prepare_round(spec).state, C1, ChargeReading.ONE)
    assert p == pytest.approx(success_probability(s), abs=1e-12)
    (nxt,) = iter_specs(spec, 1)
    assert nxt.s == pytest.approx(next_s(s), abs=1e-12)


def test_fixed_point_and_drift():
    assert next_s(0.5) == 0.5
    for s in GRID:
        if s > 0.5:
            assert next_s(s) > s
        elif s < 0.5:
            assert next_s(s) < s


# --- yields ----------------------------------------------------------------


def test_yield_symmetric_ten_rounds():
    rep = iterated_yield(0.5, 10)
    assert rep.total_yield == pytest.approx(sum(4.0**-k for k in range(1, 11)), abs=1e-15)
    assert rep.total_yield == pytest.approx(1 / 3, abs=1e-6)
    assert all(r.p_k == pytest.approx(0.5) for r in rep.per_round)


def test_yield_single_round_is_baseline():
    rep = iterated_yield(0.5, 1)
    assert rep.total_yield == rep.baseline_yield == 0.25
    assert len(rep.per_round) == 1


def test_yield_two_rounds_064():
    rep = iterated_yield(0.64, 2)
    assert rep.total_yield == pytest.approx(oracles.enumerate_yield(0.64, 2), abs=1e-12)
    assert rep.total_yield == pytest.approx(0.2796249258, abs=1e-10)
    assert rep.per_round[1].s_k == pytest.approx(0.7596439169, abs=1e-10)
    assert rep.per_round[1].p_k == pytest.approx(0.3651700728, abs=1e-10)


@pytest.mark.parametrize("s0", [0.1, 0.3, 0.64, 0.9])
@pytest.mark.parametrize("rounds", [1, 3, 5])
def test_yield_matches_enumeration(s0, rounds):
    assert iterated_yield(s0, rounds).total_yield == pytest.approx(
        oracles.enumerate_yield(s0, rounds), abs=1e-12
    )


@pytest.mark.parametrize("s0", GRID)
def test_yield_monotone_and_dominant(s0):
    prev = 0.0
    for k in range(1, 61):
        rep = iterated_yield(s0, k)
        assert rep.total_yield >= prev
        if k >= 2:
            assert rep.total_yield > rep.baseline_yield
        prev = rep.total_yield
    rows = rep.per_round
    assert all(b.cumulative_yield >= a.cumulative_yield for a, b in zip(rows, rows[1:]))
    assert all(0 <= r.p_k <= 0.5 for r in rows)


@pytest.mark.parametrize("s0", GRID)
def test_yield_converges(s0):
    rep = limit_yield(s0)
    assert rep.max_rounds < 60
    assert iterated_yield(s0, 60).total_yield == pytest.approx(rep.total_yield, abs=1e-11)


@pytest.mark.parametrize("s0", [0.0, 1.0])
def test_yield_degenerate_endpoints(s0):
    rep = iterated_yield(s0, 5)
    assert rep.total_yield == rep.baseline_yield == 0.0


def test_baseline():
    assert baseline_yield(0.64) == pytest.approx(0.2304)


def test_yield_domain():
    with pytest.raises(DomainError):
        iterated_yield(0.5, 0)
    with pytest.raises(DomainError):
        iterated_yield(1.5, 2)


# --- Monte Carlo -----------------------------------------------------------


def test_mc_single_trial():
    rep = monte_carlo(0.64, 1, 3, seed=123)
    assert sum(rep.success_counts_per_round) + rep.unresolved == 1


def test_mc_reproducible():
    a = monte_carlo(0.64, 3000, 3, seed=9)
    b = monte_carlo(0.64, 3000, 3, seed=9)
    c = monte_carlo(0.64, 3000, 3, seed=10)
    assert a == b
    assert a != c


def test_mc_worker_count_does_not_matter():
    a = monte_carlo(0.64, 25_000, 2, seed=4, workers=1)
    b = monte_carlo(0.64, 25_000, 2, seed=4, workers=2)
    assert a == b


def test_mc_accounting():
    rep = monte_carlo(0.3, 5000, 3, seed=1)
    assert sum(rep.success_counts_per_round) + rep.unresolved == rep.trials
    assert rep.frequencies[0] == rep.success_counts_per_round[0] / rep.trials
    p = rep.frequencies[0]
    assert rep.frequency_stderr(1) == pytest.approx(math.sqrt(p * (1 - p) / rep.trials))


def test_mc_agrees_with_analytics_small():
    rep = monte_carlo(0.64, 20_000, 3, seed=77)
    exp = iterated_yield(0.64, 3).total_yield
    assert abs(rep.estimated_yield - exp) < 3.5 * rep.standard_error


@pytest.mark.parametrize("kw", [dict(trials=0), dict(max_rounds=0), dict(seed=-1), dict(seed=2**64)])
def test_mc_domain(kw):
    args = dict(s0=0.5, trials=10, max_rounds=2, seed=0) | kw
    with pytest.raises(DomainError):
        monte_carlo(**args)
