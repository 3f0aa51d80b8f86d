"""Lower and upper bounds of the implied total volatility sigma(c; k).

Ordering guaranteed for every 0 < c < 1 and k >= 0:

    l_inv <= l2 <= l3 <= l_u23 <= sigma <= u23 <= u3 <= u1

``l1`` is a lower bound as well but is not ordered against ``l3``.
``u3_prime`` uses the midpoint of the two Phi^{-1} arguments of ``u3``; since
-Phi^{-1} is convex on (0, 1/2) it never exceeds ``u3``, and for large k it
falls below sigma, so it is reported but is not part of the chain.  ``u2`` is
only defined for c < 1 - e^k Phi(-sqrt(2k)) and is NaN (``None`` in a
BoundSet) elsewhere.

Arguments of Phi^{-1} that sit near 1/2 are passed together with 2p - 1,
formed algebraically, so that tiny c or tiny k are not rounded away.
"""

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import bs_core
from .bs_core import _prep, d1_inv
from .specfun import SQRT_2PI, DomainError, mills_ratio, norm_cdf_inv, norm_cdf_inv_centered

LOWER_CHAIN = ("l_inv", "l2", "l3", "l_u23")
UPPER_CHAIN = ("u23", "u3", "u1")


def _check(c, k):
    c, k = _prep(c, k)
    if not np.all((c > 0.0) & (c < 1.0)):
        raise DomainError("standardized price c must lie in (0, 1)")
    if not np.all(k >= 0.0):
        raise DomainError("log strike k must be >= 0")
    return c, k


def _ppf(p, r):
    return norm_cdf_inv_centered(p, r)


def _otm_mass(k):
    """e^k Phi(-sqrt(2k)) = R(sqrt(2k)) / sqrt(2 pi), the delta excess at the inflection point."""
    return mills_ratio(np.sqrt(2.0 * k)) / SQRT_2PI


def _inflection_price(k):
    return bs_core.price(np.sqrt(2.0 * k), k)


# -- classical bounds ------------------------------------------------------

def lower_l1(c, k=0.0):
    """-2 Phi^{-1}((1 - c)/2); independent of k and exact at k = 0."""
    c, k = _check(c, k)
    return -2.0 * _ppf(0.5 * (1.0 - c), -c)


def upper_u1(c, k):
    """-2 Phi^{-1}((1 - c)/(1 + e^k))."""
    c, k = _check(c, k)
    ek = np.exp(k)
    return -2.0 * _ppf((1.0 - c) / (1.0 + ek), -(2.0 * c + np.expm1(k)) / (1.0 + ek))


def lower_l2(c, k):
    """d1^{-1}(Phi^{-1}(c)); satisfies L2(c) L2(1 - c) = 2k."""
    c, k = _check(c, k)
    return d1_inv(norm_cdf_inv(c), k)


def lower_l_inv(c, k):
    """2k / U1(1 - c) = -k / Phi^{-1}(c / (1 + e^k)); never tighter than L2."""
    c, k = _check(c, k)
    ek = np.exp(k)
    x = _ppf(c / (1.0 + ek), -(2.0 * (1.0 - c) + np.expm1(k)) / (1.0 + ek))
    with np.errstate(invalid="ignore"):
        out = np.where(k == 0.0, 0.0, -k / x)
    return out[()]


def transform_h(delta_estimate, c, k):
    """Upper bound Phi^{-1}(D) - Phi^{-1}((D - c) e^{-k}) from a delta estimate c < D < 1."""
    c, k = _check(c, k)
    dd = np.asarray(delta_estimate, dtype=float)
    if not np.all((dd > c) & (dd < 1.0)):
        raise DomainError("delta estimate must satisfy c < D < 1")
    return (norm_cdf_inv(dd) - norm_cdf_inv((dd - c) * np.exp(-k)))[()]


def upper_u2(c, k):
    """Phi^{-1}(c + e^k Phi(-sqrt(2k))) + sqrt(2k), NaN where c >= 1 - e^k Phi(-sqrt(2k))."""
    c, k = _check(c, k)
    s = _otm_mass(k)
    defined = c < 1.0 - s
    p = np.where(defined, c + s, 0.5)
    # 2p - 1 = 2 (c - C_BS(sqrt(2k))) since C_BS(sqrt(2k)) = 1/2 - s
    r = np.where(defined, 2.0 * (c - _inflection_price(k)), 0.0)
    out = np.where(defined, _ppf(p, r) + np.sqrt(2.0 * k), np.nan)
    return out[()]


def upper_u3(c, k):
    """-Phi^{-1}((1 - c)/2) - Phi^{-1}((1 - c)/(2 e^k)); equals H((1 + c)/2)."""
    c, k = _check(c, k)
    emk = np.exp(-k)
    first = _ppf(0.5 * (1.0 - c), -c)
    second = _ppf(0.5 * (1.0 - c) * emk, np.expm1(-k) - c * emk)
    return -(first + second)


def upper_u3_prime(c, k):
    """-2 Phi^{-1}((1 - c)(1 + e^{-k})/4); at most U3, and not an upper bound of sigma in general."""
    c, k = _check(c, k)
    w = 1.0 + np.exp(-k)
    return -2.0 * _ppf(0.25 * (1.0 - c) * w, 0.5 * (np.expm1(-k) - c * w))


def upper_u23(c, k):
    """H(min((1 + c)/2, c + e^k Phi(-sqrt(2k)))); defined on all of (0, 1)."""
    c, k = _check(c, k)
    use_u3 = 1.0 - c <= 2.0 * _otm_mass(k)
    if np.ndim(use_u3) == 0:
        return upper_u3(c, k) if use_u3 else upper_u2(c, k)
    out = np.empty(use_u3.shape)
    if use_u3.any():
        out[use_u3] = upper_u3(c[use_u3], k[use_u3])
    if not use_u3.all():
        m = ~use_u3
        out[m] = upper_u2(c[m], k[m])
    return out


# -- transforms and the new lower bounds -------------------------------------

def transform_g_delta(y, c, k):
    """d1^{-1}(Phi^{-1}(c / C_D(y))): maps an upper bound y to a lower bound above L2."""
    c, k = _check(c, k)
    arg = c / bs_core.price_to_delta(y, k)
    if not np.all(arg < 1.0):
        raise DomainError("c / C_D(y) >= 1: y is not an upper bound of the implied volatility")
    return d1_inv(norm_cdf_inv(arg), k)


def lower_l_u23(c, k):
    """G(U23(c)), the tightest lower bound here.

    At k = 0 this is exact, but G amplifies the rounding of U23 by ~1/sigma
    there, so the closed form 2 Phi^{-1}((1 + c)/2) is used instead.
    """
    c, k = _check(c, k)
    atm = k == 0.0
    if np.ndim(atm) == 0:
        if atm:
            return 2.0 * _ppf(0.5 * (1.0 + c), c)
        return transform_g_delta(upper_u23(c, k), c, k)
    out = np.empty(np.shape(c))
    if atm.any():
        out[atm] = 2.0 * _ppf(0.5 * (1.0 + c[atm]), c[atm])
    if not atm.all():
        m = ~atm
        out[m] = transform_g_delta(upper_u23(c[m], k[m]), c[m], k[m])
    return out


def _l3_delta(c, k):
    """Lower delta bound c [1/2 + e^k/(c(e^k + 1) + e^k - 1)] and 2p - 1 for it."""
    ek = np.exp(k)
    em1 = np.expm1(k)
    den = c * (ek + 1.0) + em1
    p = 0.5 * c + c * ek / den
    r = (c * c * (1.0 + ek) - em1 * (1.0 - 2.0 * c)) / den
    return p, r


def lower_l3(c, k):
    """d1^{-1}(Phi^{-1}(c [1/2 + e^k/(c(e^k + 1) + e^k - 1)])); one Phi^{-1} call, exact at k = 0."""
    c, k = _check(c, k)
    p, r = _l3_delta(c, k)
    return d1_inv(_ppf(p, r), k)


def tighten_upper(u, c, k):
    """H(D_BS(u)): an upper bound u mapped into [sigma, u]."""
    return transform_h(bs_core.delta(u, k), c, k)


def delta_bounds(c, k):
    """(lower, upper) bounds of D_BS(sigma) implied by the price alone."""
    c, k = _check(c, k)
    lower, _ = _l3_delta(c, k)
    upper = np.minimum(0.5 * (1.0 + c), c + _otm_mass(k))
    return lower, upper


# -- aggregate ---------------------------------------------------------------

@dataclass(frozen=True)
class BoundSet:
    c: float
    k: float
    l1: float
    l2: float
    l_inv: float
    l3: float
    l_u23: float
    u1: float
    u2: Optional[float]
    u3: float
    u3_prime: float
    u23: float

    def chain(self):
        """The ordered values l_inv, l2, l3, l_u23, u23, u3, u1."""
        return [getattr(self, n) for n in LOWER_CHAIN + UPPER_CHAIN]

    def violations(self, rtol=1e-12, sigma=None):
        """Adjacent pairs of the chain (with sigma inserted if given) that are out of order."""
        names = list(LOWER_CHAIN) + (["sigma"] if sigma is not None else []) + list(UPPER_CHAIN)
        vals = self.chain()
        if sigma is not None:
            vals.insert(len(LOWER_CHAIN), sigma)
        bad = []
        for (na, a), (nb, b) in zip(zip(names, vals), zip(names[1:], vals[1:])):
            if a - b > rtol * max(abs(a), abs(b)):
                bad.append((na, nb, a, b))
        return bad

    def as_dict(self):
        return asdict(self)


def bound_table(c, k):
    """Every bound on broadcast arrays, as a dict of arrays (u2 NaN where undefined)."""
    c, k = _check(c, k)
    c, k = np.broadcast_arrays(np.asarray(c, dtype=float), np.asarray(k, dtype=float))
    u23 = upper_u23(c, k)
    return {
        "l1": lower_l1(c, k),
        "l2": lower_l2(c, k),
        "l_inv": lower_l_inv(c, k),
        "l3": lower_l3(c, k),
        "l_u23": lower_l_u23(c, k),
        "u1": upper_u1(c, k),
        "u2": upper_u2(c, k),
        "u3": upper_u3(c, k),
        "u3_prime": upper_u3_prime(c, k),
        "u23": u23,
    }


def all_bounds(c, k) -> BoundSet:
    c, k = _check(c, k)
    if np.ndim(c) != 0:
        raise DomainError("all_bounds takes scalar c and k; use bound_table for arrays")
    t = {name: float(v) for name, v in bound_table(c, k).items()}
    u2 = None if math.isnan(t["u2"]) else t["u2"]
    return BoundSet(c=c, k=k, u2=u2, **{n: v for n, v in t.items() if n != "u2"})
