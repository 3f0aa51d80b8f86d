import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ivbounds import bs_core as bs
from ivbounds.specfun import DomainError, mills_ratio, norm_cdf, norm_pdf

from conftest import mp_mills, mp_price, rel

K_DEEP = math.log(1.5)


def test_standardize_atm_call():
    sigma = 0.3
    prem = 1 - 2 * norm_cdf(-sigma / 2)
    opt = bs.standardize(bs.RawQuote(premium=prem, forward=1.0, strike=1.0, expiry=1.0))
    assert opt.k == 0.0
    assert opt.c == pytest.approx(prem, rel=1e-15)


def test_standardize_deep_otm():
    opt = bs.standardize(bs.RawQuote(premium=9.01e-27, forward=1.0, strike=1.5, expiry=1.0))
    assert opt.c == 9.01e-27
    assert opt.k == pytest.approx(K_DEEP, rel=1e-15)


def test_standardize_put_call_parity():
    # ITM put and OTM call at the same strike give the same standardized point
    f, kx, df = 100.0, 110.0, 0.97
    call = bs.RawQuote(premium=2.0 * df, forward=f, strike=kx, expiry=0.5, discount_factor=df)
    put = bs.RawQuote(premium=(2.0 + kx - f) * df, forward=f, strike=kx, expiry=0.5,
                      is_call=False, discount_factor=df)
    a, b = bs.standardize(call), bs.standardize(put)
    assert a.k == b.k
    assert a.c == pytest.approx(b.c, rel=1e-12)


@pytest.mark.parametrize("prem,side", [(10.0, "lower"), (0.0, "lower"), (200.0, "upper")])
def test_standardize_band(prem, side):
    q = bs.RawQuote(premium=prem, forward=90.0, strike=80.0, expiry=1.0)
    with pytest.raises(bs.BandViolation) as info:
        bs.standardize(q)
    assert info.value.side == side


def test_option_validation():
    with pytest.raises(DomainError):
        bs.StandardizedOption(c=1.0, k=0.1)
    with pytest.raises(DomainError):
        bs.StandardizedOption(c=0.5, k=-0.1)
    with pytest.raises(DomainError):
        bs.RawQuote(premium=1.0, forward=1.0, strike=1.0, expiry=0.0)


def test_d1_d2():
    k = 0.5
    assert bs.d1(math.sqrt(2 * k), k) == pytest.approx(0.0, abs=1e-16)
    assert bs.d2(math.sqrt(2 * k), k) == pytest.approx(-math.sqrt(2 * k), rel=1e-15)
    assert bs.d1(0.2, 0.0) == pytest.approx(0.1)
    assert bs.d2(0.2, 0.0) == pytest.approx(-0.1)
    assert bs.d1(0.04, K_DEEP) == pytest.approx(-10.11662770270411, rel=1e-14)
    assert bs.d2(0.04, K_DEEP) == pytest.approx(-10.15662770270411, rel=1e-14)
    with pytest.raises(DomainError):
        bs.d1(0.0, 0.1)


def test_d1_inv(ln2):
    assert bs.d1_inv(0.0, 0.5) == pytest.approx(1.0, rel=1e-15)
    assert bs.d1_inv(-3.0, 0.0) == 0.0
    v = bs.d1_inv(1.2, ln2)
    assert v == pytest.approx(2.881158636512298, rel=1e-14)
    assert bs.d1(v, ln2) == pytest.approx(1.2, rel=1e-14)


@given(st.floats(-40.0, 40.0), st.floats(1e-8, 5.0))
def test_d1_inv_round_trip(x, k):
    s = bs.d1_inv(x, k)
    assert s > 0.0
    assert bs.d1(s, k) == pytest.approx(x, rel=1e-11, abs=1e-11)


def test_price_values(ln2):
    assert bs.price(40.0, ln2) >= 1 - 1e-15
    assert bs.price(40.0, ln2) <= 1.0
    assert bs.price(0.0, ln2) == 0.0
    assert rel(bs.price(0.04, K_DEEP), mp_price(0.04, K_DEEP)) < 1e-13
    assert bs.price(0.04, K_DEEP) == pytest.approx(9.01e-27, rel=1e-3)
    assert bs.price(0.2, 0.0) == pytest.approx(0.07965567455405798, rel=1e-14)


@pytest.mark.parametrize("sigma,k", [(1e-3, 1e-10), (0.01, 0.0), (0.04, K_DEEP), (0.12, 3.0),
                                     (0.3, 0.2), (1.0, 0.7), (2.5, 0.1), (8.0, 3.0),
                                     (1e-6, 1e-9), (0.5, 1e-4)])
def test_price_and_ratios_against_mpmath(sigma, k):
    ref = mp_price(sigma, k)
    assert rel(bs.price(sigma, k), ref) < 1e-12
    assert abs(bs.log_price(sigma, k) - float(mp.log(ref))) < 1e-12
    d1 = -mp.mpf(k) / sigma + mp.mpf(sigma) / 2
    assert rel(bs.price_to_vega(sigma, k), ref / mp.npdf(d1)) < 1e-12
    assert rel(bs.price_to_delta(sigma, k), ref / mp.ncdf(d1)) < 1e-12


def test_log_price_beyond_underflow():
    # price underflows to 0 here, log price stays finite and increasing
    s = np.linspace(0.004, 0.01, 50)
    lp = bs.log_price(s, 3.0)
    assert np.all(np.isfinite(lp))
    assert np.all(np.diff(lp) > 0.0)
    assert float(mp.log(mp_price(0.005, 3.0))) == pytest.approx(bs.log_price(0.005, 3.0), abs=1e-9)


def test_log_price_deep_otm():
    assert bs.log_price(0.04, K_DEEP) == pytest.approx(math.log(9.01002030924311e-27), abs=1e-12)
    assert bs.log_price(0.04, K_DEEP) == pytest.approx(-59.97, abs=0.01)


def test_delta_vega(ln2):
    assert bs.delta(math.sqrt(2 * ln2), ln2) == pytest.approx(0.5, rel=1e-15)
    assert bs.delta(0.2, 0.0) == pytest.approx(0.539827837277029, rel=1e-14)
    assert bs.vega(math.sqrt(2 * ln2), ln2) == pytest.approx(0.3989422804014327, rel=1e-15)
    assert bs.vega(1.0, ln2) == pytest.approx(float(mp.npdf(0.5 - mp.log(2))), rel=1e-14)


def test_price_to_delta_atm():
    s = np.array([0.1, 0.7, 2.0])
    half = norm_cdf(s / 2)
    np.testing.assert_allclose(bs.price_to_delta(s, 0.0), (2 * half - 1) / half, rtol=1e-13)


def test_price_to_delta_quotient(ln2):
    assert bs.price_to_delta(0.5, ln2) == pytest.approx(
        bs.price(0.5, ln2) / bs.delta(0.5, ln2), rel=1e-12)


def test_price_to_vega_inflection(ln2):
    s = math.sqrt(2 * ln2)
    assert bs.price_to_vega(s, ln2) == pytest.approx(mills_ratio(0.0) - mills_ratio(s), rel=1e-13)


def test_price_to_vega_deep_otm():
    cv = bs.price_to_vega(0.04, K_DEEP)
    ref = mp_mills(10.11662770270411) - mp_mills(10.15662770270411)
    assert rel(cv, ref) < 1e-10
    d1 = bs.d1(0.04, K_DEEP)
    assert norm_pdf(d1) * cv == pytest.approx(9.01002030924311e-27, rel=1e-13)


def test_inflection_sigma():
    assert bs.inflection_sigma(0.0) == 0.0
    assert bs.inflection_sigma(0.5) == 1.0


def test_price_second_difference_changes_sign_at_inflection(ln2):
    s = np.linspace(0.05, 3.0, 600)
    d2 = np.diff(bs.price(s, ln2), 2)
    mid = s[1:-1]
    infl = math.sqrt(2 * ln2)
    assert np.all(d2[mid < infl - 0.01] > 0.0)
    assert np.all(d2[mid > infl + 0.01] < 0.0)


def test_scalar_and_array_agree():
    s = np.array([1e-4, 0.04, 0.3, 1.0, 6.0])
    k = np.array([0.0, K_DEEP, 0.2, 3.0, 0.5])
    for f in (bs.price, bs.log_price, bs.price_to_vega, bs.price_to_delta, bs.delta, bs.vega):
        np.testing.assert_allclose(f(s, k), [f(a, b) for a, b in zip(s, k)], rtol=1e-15)


@given(st.floats(1e-3, 10.0), st.floats(0.0, 3.0))
def test_price_bounded_by_delta(sigma, k):
    c = bs.price(sigma, k)
    d = bs.delta(sigma, k)
    assert c <= d * (1 + 1e-14)
    upper = min((1 + c) / 2, c + mills_ratio(math.sqrt(2 * k)) / math.sqrt(2 * math.pi))
    assert d <= upper * (1 + 1e-12)


@given(st.floats(1e-2, 10.0), st.floats(0.0, 3.0))
def test_vega_identity(sigma, k):
    d1, d2 = bs.d1(sigma, k), bs.d2(sigma, k)
    assert norm_pdf(d1) == pytest.approx(math.exp(k) * norm_pdf(d2), rel=1e-12, abs=1e-300)


@given(st.floats(1e-2, 10.0), st.floats(0.0, 3.0))
def test_log_price_matches_log_of_price(sigma, k):
    c = bs.price(sigma, k)
    if c > 1e-300:
        assert bs.log_price(sigma, k) == pytest.approx(math.log(c), abs=1e-12)


@given(st.floats(1e-3, 30.0), st.floats(0.0, 3.0))
def test_price_to_delta_in_unit_interval(sigma, k):
    cd = bs.price_to_delta(sigma, k)
    assert 0.0 < cd <= 1.0


def test_price_strictly_increasing():
    s = np.geomspace(1e-3, 30.0, 3000)
    for k in (0.0, 0.01, 0.5, 3.0):
        p = bs.price(s, k)
        pos = p > 0.0
        assert np.all(np.diff(p[pos]) >= 0.0)
        assert np.all(np.diff(bs.log_price(s, k)) > 0.0)


def test_domain_errors():
    with pytest.raises(DomainError):
        bs.price(-0.1, 0.1)
    with pytest.raises(DomainError):
        bs.price(0.1, -0.1)
    with pytest.raises(DomainError):
        bs.log_price(0.0, 0.1)
    with pytest.raises(DomainError):
        bs.price_to_vega(np.array([0.1, 0.0]), 0.1)


def test_destandardize():
    assert bs.destandardize_vol(0.4, 4.0) == 0.2
