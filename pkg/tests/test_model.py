"""Model-layer checks: hypotheses, phase geometry, constraint densities."""

import math

import numpy as np
import pytest

from twophase_av.model import (
    BOUNDARY,
    CONGESTED,
    FREE,
    HypothesisViolation,
    ModelParams,
    NotCongested,
    default_params,
    validate_params,
)


@pytest.fixture(scope="module")
def p():
    return default_params()


def test_defaults_accepted(p):
    assert validate_params(p) is p
    # closed form for psi = 1 - rho: lambda1 max on C is 2*V_max - w_min
    assert p.lambda_bar == pytest.approx(p.w_min - 2.0 * p.V_max)


@pytest.mark.parametrize(
    "clause,override",
    [
        ("H-1", dict(V_max=3.0)),                      # V_max >= w_min
        ("H-2", dict(psi_spec=(0.9, -0.9))),           # psi(0) != 1
        ("H-2", dict(psi_spec=(1.0, -0.5, -0.5), C_psi=1.5)),  # -psi' below c_psi at 0
        ("H-3", dict(lambda_bar=0.6)),                 # bound too strong for psi=1-rho
        ("H-4c", dict(f_alpha1_spec=(0.7,), L_F=0.0)),  # psi(0.7)=0.3 < V_max/w_min
        ("H-4d", dict(f_alpha1_spec=(0.55, -0.1))),    # decreasing f_alpha1
    ],
)
def test_single_clause_violations(clause, override):
    with pytest.raises(HypothesisViolation) as e:
        validate_params(ModelParams(**override))
    assert e.value.clause == clause


def test_speed_examples(p):
    assert p.speed(0.3, 2.5) == pytest.approx(1.0)      # free: 2.5*0.7 >= 1
    assert p.speed(0.8, 2.5) == pytest.approx(0.5)
    assert p.speed(0.0, 2.7) == pytest.approx(p.V_max)


def test_phase_classification(p):
    assert p.phase(0.3, 2.5) == FREE
    assert p.phase(0.8, 2.5) == CONGESTED
    assert p.phase(0.6, 2.5) == BOUNDARY                # vtilde = 1 exactly
    assert p.rho_c() == pytest.approx(0.6)
    assert p.psi(p.rho_c()) == pytest.approx(p.V_max / p.w_min)


def test_lambda1_examples(p):
    assert p.lambda1(0.8, 2.5) == pytest.approx(-1.5)
    assert p.lambda1(0.6, 2.5) == pytest.approx(-0.5)   # boundary point, = -lambda_bar
    assert p.lambda1(0.9, 3.0) == pytest.approx(-2.4)
    with pytest.raises(NotCongested):
        p.lambda1(0.1, 2.5)


def test_lambda1_bound_on_congested_samples(p):
    rng = np.random.default_rng(7)
    for _ in range(2000):
        w = rng.uniform(p.w_min, p.w_max)
        rho = rng.uniform(p.rho_crit(w), p.R)
        assert p.lambda1(rho, w) <= -p.lambda_bar + 1e-12


def test_f_alpha_examples(p):
    assert p.f_alpha(2.5, 0.5) == pytest.approx(0.1)
    assert p.f_alpha(2.7, p.V_max) == 0.0
    assert p.f_alpha(3.0, 0.0) == pytest.approx(0.3)
    with pytest.raises(ValueError):
        p.f_alpha(2.5, 1.5)


def test_check_rho_constant_in_sigma_and_monotone(p):
    assert p.check_rho(2.5, 0.1) == p.check_rho(2.5, 0.9) == pytest.approx(0.2)
    assert p.check_rho(3.0, 0.4) == pytest.approx(0.3)
    d = p.check_rho(3.0) - p.check_rho(2.5)
    assert 0.0 <= d <= p.L_F * 0.5 + 1e-12
    # check state is strictly free for every w
    for w in np.linspace(p.w_min, p.w_max, 101):
        assert p.vtilde(p.check_rho(w), w) > p.V_max


def test_hat_rho_quadratic_oracle(p):
    assert p.hat_rho(2.5, 0.5) == pytest.approx((2.0 + math.sqrt(3.0)) / 5.0, abs=1e-14)
    assert p.hat_rho(2.5, 0.3) == pytest.approx((2.2 + math.sqrt(3.44)) / 5.0, abs=1e-14)
    rng = np.random.default_rng(11)
    for _ in range(500):
        w = rng.uniform(p.w_min, p.w_max)
        s = rng.uniform(0.0, p.V_max)
        r = p.hat_rho(w, s)
        residual = w * r * p.psi(r) - p.f_alpha(w, s) - s * r
        assert abs(residual) < 1e-12
        assert p.rho_crit(w) <= r <= p.R  # congested branch


def test_hat_rho_lipschitz_in_sigma(p):
    # |rho(s2) - rho(s1)| <= (R + f_alpha1(w)) / (w*lambda_bar + s_small) * |s1 - s2|
    bound = (p.R + p.f_alpha1(2.5)) / (2.5 * p.lambda_bar + 0.3) * 0.2
    assert abs(p.hat_rho(2.5, 0.5) - p.hat_rho(2.5, 0.3)) <= bound
    rng = np.random.default_rng(13)
    for _ in range(300):
        w = rng.uniform(p.w_min, p.w_max)
        s1, s2 = sorted(rng.uniform(0.0, p.V_max, size=2))
        lhs = abs(p.hat_rho(w, s2) - p.hat_rho(w, s1))
        rhs = (p.R + p.f_alpha1(w)) / (w * p.lambda_bar + s1) * (s2 - s1)
        assert lhs <= rhs + 1e-12


def test_hat_rho_at_sigma_vmax_is_critical_density(p):
    for w in (2.5, 2.75, 3.0):
        assert p.hat_rho(w, p.V_max) == pytest.approx(p.rho_crit(w), abs=1e-12)


def test_constraint_level_ordering(p):
    # fixed u, two cap levels F1 > F2 on the same Lax curve.  The slope of
    # rho -> rho*(vtilde - u) is lambda1 - u <= -(lambda_bar + u); the
    # denominator w*lambda_bar + u would be wrong near rho_crit where
    # |lambda1| ~ lambda_bar.
    rng = np.random.default_rng(17)
    for _ in range(300):
        w = rng.uniform(p.w_min, p.w_max)
        u = rng.uniform(0.0, p.V_max * 0.99)
        rho1 = rng.uniform(p.rho_crit(w), p.R)
        rho2 = rng.uniform(rho1, p.R)
        if rho2 - rho1 < 1e-9:
            continue
        f1 = w * rho1 * p.psi(rho1) - u * rho1
        f2 = w * rho2 * p.psi(rho2) - u * rho2
        assert f1 > f2
        assert rho2 - rho1 <= (f1 - f2) / (p.lambda_bar + u) + 1e-12


def test_vtilde_lipschitz_in_rho(p):
    rng = np.random.default_rng(19)
    for _ in range(1000):
        w = rng.uniform(p.w_min, p.w_max)
        r1, r2 = rng.uniform(0.0, p.R, size=2)
        assert abs(p.vtilde(r1, w) - p.vtilde(r2, w)) <= w * p.C_psi * abs(r1 - r2) + 1e-12


def test_inv_vtilde_lipschitz(p):
    # the inverse of rho -> vt/psi(rho) at level vt has constant 1/(vt*c_psi);
    # equivalently |rho1 - rho2| <= |w1 - w2| / (vt * c_psi) along vtilde = vt
    rng = np.random.default_rng(23)
    for _ in range(500):
        vt = rng.uniform(0.05, p.V_max)
        w1, w2 = rng.uniform(p.w_min, p.w_max, size=2)
        r1 = p.inv_vtilde(w1, vt)
        r2 = p.inv_vtilde(w2, vt)
        assert abs(r1 - r2) <= abs(w1 - w2) / (vt * p.c_psi) + 1e-12


def test_inversions_roundtrip(p):
    rng = np.random.default_rng(29)
    for _ in range(500):
        w = rng.uniform(p.w_min, p.w_max)
        rho = rng.uniform(p.rho_crit(w), p.R)
        assert p.inv_vtilde(w, p.vtilde(rho, w)) == pytest.approx(rho, abs=1e-12)
        assert p.inv_lambda1(w, p.lambda1(rho, w)) == pytest.approx(rho, abs=1e-12)


def test_general_polynomial_path_matches_quadratic(p):
    # degree-2 psi close to linear exercises the bisection branches
    q = ModelParams(psi_spec=(1.0, -0.9, -0.1), c_psi=0.9, C_psi=1.1,
                    lambda_bar=0.4)
    validate_params(q)
    rng = np.random.default_rng(31)
    for _ in range(100):
        w = rng.uniform(q.w_min, q.w_max)
        s = rng.uniform(0.0, q.V_max)
        r = q.hat_rho(w, s)
        assert abs(w * r * q.psi(r) - q.f_alpha(w, s) - s * r) < 1e-11
        rho = rng.uniform(q.rho_crit(w), q.R)
        assert q.inv_vtilde(w, q.vtilde(rho, w)) == pytest.approx(rho, abs=1e-11)
