import math

import mpmath as mp
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

mp.mp.dps = 60

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


# -- extended-precision references -------------------------------------------

def mp_ppf(p):
    """Phi^{-1}(p) to ~60 digits: erfinv start refined by Newton."""
    p = mp.mpf(p)
    x = mp.sqrt(2) * mp.erfinv(2 * p - 1) if 1e-12 < p < 1 - 1e-12 else (
        -mp.sqrt(-2 * mp.log(p)) if p < 0.5 else mp.sqrt(-2 * mp.log(1 - p)))
    for _ in range(100):
        step = (mp.ncdf(x) - p) / mp.npdf(x)
        x -= step
        if abs(step) < mp.mpf(10) ** (-55) * max(1, abs(x)):
            break
    return x


def mp_price(sigma, k):
    sigma, k = mp.mpf(sigma), mp.mpf(k)
    d1 = -k / sigma + sigma / 2
    return mp.ncdf(d1) - mp.exp(k) * mp.ncdf(d1 - sigma)


def mp_mills(x):
    x = mp.mpf(x)
    return mp.ncdf(-x) / mp.npdf(x)


def mp_iv(c, k):
    """Implied total volatility by bisection in 60-digit arithmetic."""
    c, k = mp.mpf(c), mp.mpf(k)
    lo, hi = mp.mpf(0), mp.mpf(1)
    while mp_price(hi, k) < c:
        hi *= 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if mp_price(mid, k) < c:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def rel(a, b):
    return abs(float(a) - float(b)) / abs(float(b))


@pytest.fixture
def ln2():
    return math.log(2.0)
