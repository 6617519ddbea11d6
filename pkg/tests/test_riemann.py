"""Classical Riemann solver checks, including the grid-oracle comparison."""

import numpy as np
import pytest

from twophase_av.model import State, default_params
from twophase_av.riemann import (
    discretize_rarefactions,
    rh_residual,
    solve_riemann,
    split_rarefaction,
)

from oracles import (
    grid_tolerance,
    hll_riemann_batch,
    l1_fan_error,
    l1_fan_vs_fronts,
    random_states,
)


@pytest.fixture(scope="module")
def p():
    return default_params()


def test_equal_states_empty_fan(p):
    fan = solve_riemann(p, State(0.8, 2.5), State(0.8, 2.5))
    assert fan.waves == ()
    assert fan.sample(0.0) == State(0.8, 2.5)
    assert fan.sample(1e9) == State(0.8, 2.5)


def test_congested_congested_example(p):
    fan = solve_riemann(p, State(0.8, 2.5), State(0.9, 3.0))
    assert [w.kind for w in fan.waves] == ["1S", "2"]
    shock, contact = fan.waves
    assert shock.right == pytest.approx(State(0.88, 2.5))
    assert shock.speed == pytest.approx(-1.7)
    assert contact.speed == pytest.approx(0.3)
    assert fan.sample(0.0) == pytest.approx(State(0.88, 2.5))
    assert fan.sample(-np.inf) == State(0.8, 2.5)
    assert fan.sample(np.inf) == State(0.9, 3.0)


def test_free_free_linear_wave(p):
    fan = solve_riemann(p, State(0.1, 2.6), State(0.2, 2.9))
    assert [w.kind for w in fan.waves] == ["LW"]
    assert fan.waves[0].speed == pytest.approx(p.V_max)


def test_free_to_congested_phase_transition(p):
    fan = solve_riemann(p, State(0.2, 2.5), State(0.7, 2.5))
    assert [w.kind for w in fan.waves] == ["PT"]
    assert fan.waves[0].speed == pytest.approx(0.65)


def test_congested_to_free_rarefaction_then_lw(p):
    fan = solve_riemann(p, State(0.9, 2.5), State(0.1, 2.8))
    assert [w.kind for w in fan.waves] == ["1R", "LW"]
    raref = fan.waves[0]
    assert raref.right.rho == pytest.approx(p.rho_crit(2.5))
    # interior sampling solves lambda1(rho) = xi
    xi = 0.5 * (raref.s_lo + raref.s_hi)
    s = fan.sample(xi)
    assert p.lambda1(*s) == pytest.approx(xi, abs=1e-12)


def test_fan_invariants_random(p):
    rng = np.random.default_rng(101)
    states = random_states(p, rng, 2000)
    for i in range(0, 2000, 2):
        l, r = states[i], states[i + 1]
        fan = solve_riemann(p, l, r)
        assert fan.speeds_sorted()
        assert fan.right == r
        prev = l
        for w in fan.waves:
            assert w.left == prev
            prev = w.right
            if w.kind == "1R":
                continue
            assert rh_residual(p, w.left, w.right, w.speed) < 1e-10
            if w.family == "1":
                assert w.left.w == pytest.approx(w.right.w, abs=1e-12)
                assert p.in_congested(*w.left) and p.in_congested(*w.right)
            elif w.family == "2":
                assert p.speed(*w.left) == pytest.approx(p.speed(*w.right), abs=1e-11)
            elif w.family == "LW":
                assert p.in_free(*w.left) and p.in_free(*w.right)
            elif w.family == "PT":
                assert p.in_free(*w.left) and p.in_congested(*w.right)


def test_sampling_self_similar(p):
    fan = solve_riemann(p, State(0.8, 2.5), State(0.9, 3.0))
    for t, x in [(0.5, 0.1), (1.0, 0.2), (2.0, 0.4)]:
        assert fan.sample(x / t) == fan.sample((2 * x) / (2 * t))


def test_discretize_counts_and_strength(p):
    fan = solve_riemann(p, State(0.88, 2.5), State(0.8, 2.5))
    [raref] = fan.waves
    assert raref.kind == "1R"
    pieces = split_rarefaction(p, raref, 10)
    dv_total = p.vtilde(0.8, 2.5) - p.vtilde(0.88, 2.5)
    assert len(pieces) == int(np.ceil(dv_total * 10 - 1e-12)) == 2
    for piece in pieces:
        dv = p.vtilde(*piece.right) - p.vtilde(*piece.left)
        assert 0 < dv <= 1.0 / 10 + 1e-12
        assert rh_residual(p, piece.left, piece.right, piece.speed) < 1e-10
    speeds = [w.speed for w in pieces]
    assert speeds == sorted(speeds)


def test_discretize_passthrough_without_rarefaction(p):
    fan = solve_riemann(p, State(0.8, 2.5), State(0.9, 3.0))
    assert discretize_rarefactions(p, fan.waves, 10) == list(fan.waves)


def test_discretization_l1_converges(p):
    l, r = State(0.95, 2.9), State(0.1, 2.6)
    fan = solve_riemann(p, l, r)
    errs = {}
    for nu in (10, 20, 40):
        fronts = discretize_rarefactions(p, fan.waves, nu)
        errs[nu] = l1_fan_vs_fronts(p, fan, fronts, t=1.0)
    assert errs[20] <= errs[10] and errs[40] <= errs[20]
    c = 10 * errs[10]
    assert errs[20] <= c / 20 * 1.05 and errs[40] <= c / 40 * 1.05


def test_vacuum_states(p):
    fan = solve_riemann(p, State(0.0, 2.7), State(0.8, 2.5))
    # vacuum is free; the phase transition into congestion may absorb the contact
    assert fan.right == State(0.8, 2.5)
    assert fan.speeds_sorted()
    fan2 = solve_riemann(p, State(0.9, 2.5), State(0.0, 2.5))
    assert fan2.waves[-1].kind == "LW"
    assert fan2.right == State(0.0, 2.5)


def test_godunov_oracle_batch(p):
    rng = np.random.default_rng(202)
    n = 300
    states = random_states(p, rng, 2 * n)
    lefts = np.array(states[:n])
    rights = np.array(states[n:])
    xc, rho, q = hll_riemann_batch(p, lefts, rights, t_end=1.0, n_cells=240)
    dx = xc[1] - xc[0]
    for i in range(n):
        fan = solve_riemann(p, State(*lefts[i]), State(*rights[i]))
        err = l1_fan_error(p, fan, xc, rho[i], q[i], t_end=1.0)
        tol = grid_tolerance(p, fan, dx, 1.0)
        assert err < tol, f"pair {i}: L1 {err} exceeds grid tolerance {tol}"
