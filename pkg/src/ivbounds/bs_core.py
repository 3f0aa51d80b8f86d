"""Standardized Black-Scholes map c = C_BS(sigma; k) and its ratios.

Conventions: the option is an out-of-the-money call with forward 1 and log
strike ``k >= 0``; ``sigma`` is total standard deviation (vol * sqrt(T)).
Every price-like quantity is assembled from Mills ratios so that prices far
below 1e-16 keep their relative accuracy:

    C_BS = phi(d1) * C_V,   C_V = R(-d1) - R(-d2),   C_D = C_V / R(-d1).

All functions broadcast over numpy arrays; scalar input takes a mask-free
fast path and returns a numpy float.
"""

import math
from dataclasses import dataclass

import numpy as np

from .specfun import LOG_SQRT_2PI, SQRT_2PI, DomainError, mills_ratio, norm_cdf

# for d1 >= 1 the price is above 0.6 and is taken from its complement
# 1 - C_BS, which stays below 1 and avoids R(-d1) ~ exp(d1**2/2) overflowing
_D1_COMPLEMENT = 1.0
# C_V switches from the direct Mills difference to its Taylor series when
# sigma * max(-d1, 1) falls below this
_SERIES_CUT = 0.5
_SERIES_MAX_TERMS = 80


class BandViolation(DomainError):
    """Premium at or outside the no-arbitrage band; ``side`` is 'lower' or 'upper'."""

    def __init__(self, message, side):
        super().__init__(message)
        self.side = side


@dataclass(frozen=True)
class StandardizedOption:
    c: float
    k: float

    def __post_init__(self):
        if not 0.0 < self.c < 1.0:
            raise DomainError(f"standardized price must lie in (0, 1), got c={self.c!r}")
        if not self.k >= 0.0:
            raise DomainError(f"log strike must be >= 0, got k={self.k!r}")


@dataclass(frozen=True)
class RawQuote:
    premium: float
    forward: float
    strike: float
    expiry: float
    is_call: bool = True
    discount_factor: float = 1.0

    def __post_init__(self):
        for name in ("forward", "strike", "expiry"):
            if not getattr(self, name) > 0.0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not 0.0 < self.discount_factor <= 1.0:
            raise DomainError(f"discount_factor must lie in (0, 1], got {self.discount_factor!r}")


def standardize(q: RawQuote) -> StandardizedOption:
    """Map a quote to (c, k); calls and puts at the same strike agree by parity."""
    premium = q.premium / q.discount_factor
    theta = 1.0 if q.is_call else -1.0
    intrinsic = max(theta * (q.forward - q.strike), 0.0)
    scale = min(q.forward, q.strike)
    if not premium > intrinsic:
        raise BandViolation(
            f"undiscounted premium {premium!r} is not above intrinsic value {intrinsic!r}", "lower")
    if not premium < intrinsic + scale:
        raise BandViolation(
            f"undiscounted premium {premium!r} is not below the upper bound {intrinsic + scale!r}",
            "upper")
    c = (premium - intrinsic) / scale
    return StandardizedOption(c=c, k=abs(math.log(q.forward / q.strike)))


def destandardize_vol(sigma, expiry):
    """Annualized volatility from total standard deviation."""
    return sigma / math.sqrt(expiry)


# -- helpers -----------------------------------------------------------------

def _prep(*args):
    """Floats when every argument is scalar, otherwise broadcast float arrays."""
    if all(type(a) is float for a in args):
        return args
    if all(np.ndim(a) == 0 for a in args):
        return tuple(float(a) for a in args)
    return np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in args))


def _where(cond, f_true, f_false, *args):
    """f_true(*args) where cond holds, f_false elsewhere; each side sees only its elements."""
    if np.ndim(cond) == 0:
        return f_true(*args) if cond else f_false(*args)
    out = np.empty(cond.shape)
    if cond.any():
        out[cond] = f_true(*(a[cond] for a in args))
    if not cond.all():
        out[~cond] = f_false(*(a[~cond] for a in args))
    return out


def _require_positive(sigma, name="sigma"):
    if isinstance(sigma, float):
        if not sigma > 0.0:
            raise DomainError(f"{name} must be positive")
    elif not np.all(sigma > 0.0):
        raise DomainError(f"{name} must be positive")


def _require_k(k):
    if isinstance(k, float):
        if not k >= 0.0:
            raise DomainError("log strike k must be >= 0")
    elif not np.all(k >= 0.0):
        raise DomainError("log strike k must be >= 0")


def _d12(sigma, k):
    a = k / sigma
    h = 0.5 * sigma
    return h - a, -h - a


# -- d1 and its inverse ------------------------------------------------------

def d1(sigma, k):
    sigma, k = _prep(sigma, k)
    _require_positive(sigma)
    return -k / sigma + 0.5 * sigma


def d2(sigma, k):
    sigma, k = _prep(sigma, k)
    _require_positive(sigma)
    return -k / sigma - 0.5 * sigma


def d1_inv(x, k):
    """sigma >= 0 with d1(sigma) = x, i.e. x + sqrt(x**2 + 2k).

    For x < 0 the conjugate form 2k / (sqrt(x**2 + 2k) - x) avoids cancellation;
    with k = 0 it gives 2 * max(x, 0).
    """
    x, k = _prep(x, k)
    _require_k(k)
    root = np.sqrt(x * x + 2.0 * k)
    with np.errstate(invalid="ignore", divide="ignore"):
        neg = 2.0 * k / (root - x)
    out = np.where(x >= 0.0, x + root, np.where(k == 0.0, 0.0, neg))
    return out[()]


def inflection_sigma(k):
    k = np.asarray(k, dtype=float)
    _require_k(k)
    return np.sqrt(2.0 * k)[()]


# -- price-to-vega ratio -----------------------------------------------------

def _cv_direct(x, y):
    return mills_ratio(x) - mills_ratio(y)


def _cv_series(x, h):
    """R(x) - R(x + h) from the Taylor series of R about x.

    The coefficients a_n of R(x + t) = sum a_n t**n follow from R' = xR - 1:
    a_1 = x a_0 - 1 and (n + 1) a_{n+1} = x a_n + a_{n-1}.
    """
    r0 = mills_ratio(x)
    if isinstance(x, float):
        return _cv_series_scalar(x, float(h), float(r0))
    prev = r0
    term = (x * r0 - 1.0) * h
    total = term
    for n in range(1, _SERIES_MAX_TERMS):
        prev, term = term, (x * term * h + prev * h * h) / (n + 1)
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return -total


def _cv_series_scalar(x, h, r0):
    prev = r0
    term = (x * r0 - 1.0) * h
    total = term
    hh = h * h
    for n in range(1, _SERIES_MAX_TERMS):
        prev, term = term, (x * term * h + prev * hh) / (n + 1)
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
    return -total


def _cv(sigma, k):
    x = k / sigma - 0.5 * sigma       # -d1
    y = k / sigma + 0.5 * sigma       # -d2
    if isinstance(sigma, float):
        if sigma * max(x, 1.0) < _SERIES_CUT:
            return _cv_series(x, sigma)
        return _cv_direct(x, y)
    series = sigma * np.maximum(x, 1.0) < _SERIES_CUT
    return _where(series, lambda x, y, s: _cv_series(x, s), lambda x, y, s: _cv_direct(x, y),
                  x, y, sigma)


def price_to_vega(sigma, k):
    """C_V = C_BS / V_BS = R(-d1) - R(-d2), positive and increasing in sigma."""
    sigma, k = _prep(sigma, k)
    _require_positive(sigma)
    _require_k(k)
    return _cv(sigma, k)


# -- price, log price, greeks ------------------------------------------------

def _upper_price_gap(sigma, k):
    """1 - C_BS = Phi(-d1) + e^k Phi(d2), with e^k Phi(d2) = phi(d1) R(-d2)."""
    dd1, dd2 = _d12(sigma, k)
    return norm_cdf(-dd1) + np.exp(-0.5 * dd1 * dd1) / SQRT_2PI * mills_ratio(-dd2)


def _price_pos(sigma, k):
    dd1 = -k / sigma + 0.5 * sigma
    if type(dd1) is float:
        if dd1 < _D1_COMPLEMENT:
            return math.exp(-0.5 * dd1 * dd1) / SQRT_2PI * _cv(sigma, k)
        return 1.0 - float(_upper_price_gap(sigma, k))
    low = dd1 < _D1_COMPLEMENT
    return _where(
        low,
        lambda s, kk, d: np.exp(-0.5 * d * d) / SQRT_2PI * _cv(s, kk),
        lambda s, kk, d: 1.0 - _upper_price_gap(s, kk),
        sigma, k, dd1)


def price(sigma, k):
    """Standardized OTM call price; 0 at sigma = 0 and increasing to 1."""
    sigma, k = _prep(sigma, k)
    if not (sigma >= 0.0 if isinstance(sigma, float) else np.all(sigma >= 0.0)):
        raise DomainError("sigma must be >= 0")
    _require_k(k)
    if type(sigma) is float:
        return _price_pos(sigma, k) if sigma > 0.0 else 0.0
    pos = sigma > 0.0
    return _where(pos, _price_pos, lambda s, kk: 0.0 * s, sigma, k)


def _log_price_pos(sigma, k):
    dd1 = -k / sigma + 0.5 * sigma
    return _where(
        dd1 < _D1_COMPLEMENT,
        lambda s, kk, d: -0.5 * d * d - LOG_SQRT_2PI + np.log(_cv(s, kk)),
        lambda s, kk, d: np.log1p(-_upper_price_gap(s, kk)),
        sigma, k, dd1)


def log_price(sigma, k):
    """log C_BS = -d1**2/2 - log sqrt(2 pi) + log C_V; finite where the price underflows."""
    sigma, k = _prep(sigma, k)
    _require_positive(sigma)
    _require_k(k)
    return _log_price_pos(sigma, k)


def log_price_to_vega(sigma, k):
    """log C_V, also valid where C_V itself would overflow (d1 >> 0)."""
    sigma, k = _prep(sigma, k)
    _require_positive(sigma)
    _require_k(k)
    dd1 = -k / sigma + 0.5 * sigma
    return _where(
        dd1 < _D1_COMPLEMENT,
        lambda s, kk, d: np.log(_cv(s, kk)),
        lambda s, kk, d: np.log1p(-_upper_price_gap(s, kk)) + 0.5 * d * d + LOG_SQRT_2PI,
        sigma, k, dd1)


def delta(sigma, k):
    sigma, k = _prep(sigma, k)
    _require_positive(sigma)
    return norm_cdf(-k / sigma + 0.5 * sigma)


def vega(sigma, k):
    sigma, k = _prep(sigma, k)
    _require_positive(sigma)
    dd1 = -k / sigma + 0.5 * sigma
    return np.exp(-0.5 * dd1 * dd1) / SQRT_2PI


def _cd(sigma, k):
    dd1, dd2 = _d12(sigma, k)
    return _where(
        dd1 < _D1_COMPLEMENT,
        lambda s, kk, a, b: _cv(s, kk) / mills_ratio(-a),
        lambda s, kk, a, b: 1.0 - np.exp(-0.5 * a * a) / SQRT_2PI * mills_ratio(-b) / norm_cdf(a),
        sigma, k, dd1, dd2)


def price_to_delta(sigma, k):
    """C_D = C_BS / D_BS = 1 - R(-d2)/R(-d1), in (0, 1]."""
    sigma, k = _prep(sigma, k)
    _require_positive(sigma)
    _require_k(k)
    return _cd(sigma, k)
