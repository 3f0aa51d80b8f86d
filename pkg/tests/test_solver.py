import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ivbounds import bounds as B
from ivbounds import bs_core as bs
from ivbounds import solver as S
from ivbounds.bs_core import RawQuote
from ivbounds.specfun import DomainError

from conftest import mp_iv

K_W = math.log(1.5)
C_W = bs.price(0.04, K_W)


def test_config_validation():
    with pytest.raises(ValueError):
        S.SolverConfig(max_iter=0)
    with pytest.raises(ValueError):
        S.SolverConfig(tol_log=0.0)
    with pytest.raises(ValueError):
        S.SolverConfig(initial_guess="u1")
    with pytest.raises(ValueError):
        S.SolverConfig(initial_guess=-0.1)
    S.SolverConfig(initial_guess=0.3)


def test_deep_otm_three_iterations():
    res = S.solve_log_nr(C_W, K_W, S.SolverConfig(max_iter=3, record_trace=True))
    assert res.iterations_used == 3
    assert abs(res.sigma - 0.04) <= 1e-10
    assert res.trace[-1][1] == pytest.approx(-8e-9, rel=0.1)
    assert res.trace[-1][1] < 0.0
    assert res.sigma - 0.04 < 0.0


def test_deep_otm_converges():
    res = S.solve(C_W, K_W)
    assert res.converged
    assert res.sigma == pytest.approx(0.04, rel=1e-14)
    assert res.final_log_error == pytest.approx(abs(S.log_error(res.sigma, C_W, K_W)), abs=1e-30)


def test_naive_is_slow():
    res = S.solve_naive_nr(C_W, K_W, S.SolverConfig(max_iter=50))
    assert res.iterations_used == 50
    assert not res.converged
    assert res.sigma == pytest.approx(0.04173, abs=5e-5)


def test_atm_closed_form():
    res = S.solve_log_nr(0.07965567455405798, 0.0)
    assert res.iterations_used == 0
    assert res.sigma == pytest.approx(0.2, rel=1e-14)


def test_nr_log_step_fixed_point():
    c, k = 0.2, math.log(2.0)
    sigma = float(mp_iv(c, k))
    assert S.nr_log_step(sigma, c, k) == pytest.approx(sigma, rel=1e-12)


def test_nr_log_step_domain():
    with pytest.raises(DomainError):
        S.nr_log_step(0.0, 0.2, 0.1)
    with pytest.raises(DomainError):
        S.solve(1.2, 0.1)


@pytest.mark.parametrize("seed", S.SEEDS)
def test_seed_policies_converge(seed):
    for c, k in ((1e-20, 0.5), (0.3, 0.05), (0.9, 2.0)):
        res = S.solve_log_nr(c, k, S.SolverConfig(initial_guess=seed))
        assert res.converged
        assert res.sigma == pytest.approx(float(mp_iv(c, k)), rel=1e-12)


def test_seed_above_root_is_accepted():
    c, k = 0.3, 0.4
    res = S.solve_log_nr(c, k, S.SolverConfig(initial_guess=5.0, max_iter=50))
    assert res.converged
    assert res.sigma == pytest.approx(float(mp_iv(c, k)), rel=1e-12)


def test_solve_raw_annualizes():
    prem = C_W * 1.0
    r1 = S.solve_raw(RawQuote(premium=prem, forward=1.0, strike=1.5, expiry=1.0))
    r4 = S.solve_raw(RawQuote(premium=prem, forward=1.0, strike=1.5, expiry=4.0))
    assert r1.volatility == pytest.approx(0.04, rel=1e-12)
    assert r4.volatility == pytest.approx(r1.volatility / 2, rel=1e-15)


def test_oracle_atm_and_bracket():
    c = np.array([1e-30, 0.01, 0.5, 0.9999])
    s = S.oracle_bisection(c, 0.0)
    np.testing.assert_allclose(s, S.atm_sigma(c), rtol=1e-13)
    for k in (0.1, 1.5):
        s = S.oracle_bisection(c, k)
        assert np.all(B.lower_l2(c, k) <= s)
        assert np.all(s <= B.upper_u1(c, k))


def test_trace_monotone_from_l3():
    rng = np.random.default_rng(3)
    c = np.minimum(10 ** rng.uniform(-40, 0, 2000), 0.9999)
    k = rng.uniform(0, 3, 2000)
    path = S.log_nr_path(c, k, 6)
    sigma = S.oracle_bisection(c, k)
    assert np.all(np.diff(path, axis=0) >= 0.0)
    assert np.all(path <= sigma + 1e-10)


def test_quadratic_tail():
    rng = np.random.default_rng(5)
    c = rng.uniform(0.001, 0.99, 500)
    k = rng.uniform(0.01, 3, 500)
    path = S.log_nr_path(c, k, 4)
    g = np.abs(np.array([S.log_error(p, c, k) for p in path]))
    for n in range(len(g) - 1):
        m = (g[n] < 1e-2) & (g[n] > 1e-7)
        ratio = g[n + 1][m] / g[n][m] ** 2
        assert np.all(np.isfinite(ratio))
        assert np.all(ratio < 1e3)


def test_log_price_derivative_is_inverse_cv():
    for s, k in ((0.3, 0.1), (1.0, 0.7), (2.0, 2.5)):
        h = 1e-6 * s
        fd = (bs.log_price(s + h, k) - bs.log_price(s - h, k)) / (2 * h)
        assert fd == pytest.approx(1.0 / bs.price_to_vega(s, k), rel=1e-6)


def test_vectorized_matches_scalar():
    c = np.array([1e-35, 0.01, 0.4, 0.95])
    k = np.array([0.3, 1e-10, 2.0, 0.0])
    path = S.log_nr_path(c, k, 3)
    for i in range(4):
        res = S.solve_log_nr(c[i], k[i], S.SolverConfig(max_iter=3, tol_log=1e-300))
        assert path[-1, i] == pytest.approx(res.sigma, rel=1e-15)
    naive = S.naive_nr_path(c, k, 5)
    for i in range(4):
        res = S.solve_naive_nr(c[i], k[i], S.SolverConfig(max_iter=5, tol_log=1e-300))
        assert naive[-1, i] == pytest.approx(res.sigma, rel=1e-13)


@given(st.floats(-40.0, math.log10(0.9999)), st.just(0.0) | st.floats(1e-10, 3.0))
def test_solve_matches_oracle(log10_c, k):
    c = 10.0 ** log10_c
    res = S.solve(c, k)
    assert res.converged
    assert abs(res.sigma - S.oracle_bisection(c, k)) <= 1e-9
