"""Normal-distribution kernels that keep full relative accuracy in the tails.

Everything here accepts a Python float or a numpy array and returns the same
shape (a numpy scalar for scalar input).  The Mills ratio is always evaluated
through the scaled complementary error function, never as ``Phi(-x) / phi(x)``.
"""

import math

import numpy as np
from scipy import special

SQRT_2PI = math.sqrt(2.0 * math.pi)
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
SQRT_HALF_PI = math.sqrt(0.5 * math.pi)
SQRT2 = math.sqrt(2.0)
INV_SQRT2 = 0.7071067811865476  # correctly rounded 1/sqrt(2)


class DomainError(ValueError):
    """An argument lies outside the domain of the requested function."""


def norm_pdf(x):
    x = np.asarray(x, dtype=float)
    return (np.exp(-0.5 * x * x) / SQRT_2PI)[()]


def norm_cdf(x):
    # ndtr evaluates the lower tail through erfc, so Phi(-40) keeps all digits
    return special.ndtr(x)


def erfcx(x):
    """exp(x**2) * erfc(x), computed without overflow for large positive x."""
    return special.erfcx(x)


def mills_ratio(x):
    """R(x) = Phi(-x) / phi(x) = sqrt(pi/2) * erfcx(x / sqrt(2))."""
    if type(x) is float:
        return SQRT_HALF_PI * float(special.erfcx(x * INV_SQRT2))
    return SQRT_HALF_PI * special.erfcx(np.multiply(x, INV_SQRT2))


# Wichura (1988), algorithm AS 241, PPND16.
_A = (3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
      1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
      3.3430575583588128105e4, 2.5090809287301226727e3)
_B = (1.0, 4.2313330701600911252e1, 6.8718700749205790830e2, 5.3941960214247511077e3,
      2.1213794301586595867e4, 3.9307895800092710610e4, 2.8729085735721942674e4,
      5.2264952788528545610e3)
_C = (1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
      3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4)
_D = (1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
      1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
      1.05075007164441684324e-9)
_E = (6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
      2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7)
_F = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
      7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
      2.04426310338993978564e-15)


def _ratio(num, den, t):
    # coefficients are stored lowest order first
    return np.polynomial.polynomial.polyval(t, num) / np.polynomial.polynomial.polyval(t, den)


def _ppnd16(p, q):
    """AS 241 on arrays; ``q = 1 - p`` is passed separately to keep the upper tail exact."""
    x = np.empty_like(p)
    centre = np.abs(p - 0.5) <= 0.425
    if centre.any():
        s = p[centre] - 0.5
        x[centre] = s * _ratio(_A, _B, 0.180625 - s * s)
    tail = ~centre
    if tail.any():
        lower = p[tail] < 0.5
        r = np.sqrt(-np.log(np.where(lower, p[tail], q[tail])))
        xt = np.where(r <= 5.0, _ratio(_C, _D, r - 1.6), _ratio(_E, _F, r - 5.0))
        x[tail] = np.where(lower, -xt, xt)
    return x


# libm erf/erfc stay within 1-2 ulp on the polish range; scipy's erfc does not
_erf = np.frompyfunc(math.erf, 1, 1)
_erfc = np.frompyfunc(math.erfc, 1, 1)

_INV_SQRT2_LO = -4.833646656726457e-17  # 1/sqrt(2) - INV_SQRT2
_SPLIT = 134217729.0  # 2**27 + 1


def _scaled_by_inv_sqrt2(x):
    """x / sqrt(2) as an unevaluated sum hi + lo (Dekker two-product)."""
    hi = x * INV_SQRT2
    t = _SPLIT * x
    xh = t - (t - x)
    xl = x - xh
    t = _SPLIT * INV_SQRT2
    ch = t - (t - INV_SQRT2)
    cl = INV_SQRT2 - ch
    err = ((xh * ch - hi) + xh * cl + xl * ch) + xl * cl
    return hi, err + x * _INV_SQRT2_LO


def _cdf_residual(x, p, q):
    """Phi(x) - p, accurate relative to the smaller of p and 1 - p."""
    y, dy = _scaled_by_inv_sqrt2(x)
    step = 2.0 * dy * np.exp(-y * y) / math.sqrt(math.pi)
    out = np.empty_like(x)
    centre = np.abs(p - 0.5) <= 0.25
    lower = ~centre & (x < 0.0)
    upper = ~centre & ~lower
    if centre.any():
        m = centre
        out[m] = 0.5 * (_erf(y[m]).astype(float) + step[m]) - (p[m] - 0.5)
    if lower.any():
        m = lower
        out[m] = 0.5 * (_erfc(-y[m]).astype(float) + step[m]) - p[m]
    if upper.any():
        m = upper
        out[m] = q[m] - 0.5 * (_erfc(y[m]).astype(float) - step[m])
    return out


def norm_cdf_inv(p, *, polish=True):
    """Inverse of the standard normal CDF.

    Rational approximation (AS 241) followed by one Halley step against a
    compensated evaluation of Phi(x) - p.  Valid for p in (0, 1) down to the
    smallest normal doubles; raises DomainError outside the open interval.
    """
    p = np.asarray(p, dtype=float)
    scalar = p.ndim == 0
    p = np.atleast_1d(p)
    if not np.all((p > 0.0) & (p < 1.0)):
        raise DomainError("norm_cdf_inv requires 0 < p < 1")
    q = 1.0 - p
    x = _ppnd16(p, q)
    if polish:
        e = _cdf_residual(x, p, q) / (np.exp(-0.5 * x * x) / SQRT_2PI)
        x = x - e / (1.0 + 0.5 * x * e)
    return x[0] if scalar else x


def norm_cdf_inv_centered(p, r):
    """Phi^{-1}(p) given both p and r = 2p - 1.

    Near p = 1/2 the caller's r carries digits that p itself has lost to
    rounding (for example p = (1 + c)/2 with c = 1e-30), so that region goes
    through erfinv(r); the tails go through norm_cdf_inv(p).
    """
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    p, r = np.broadcast_arrays(p, r)
    scalar = p.ndim == 0
    p = np.atleast_1d(p)
    r = np.atleast_1d(r)
    out = np.empty(p.shape)
    mid = np.abs(r) <= 0.5
    if mid.any():
        out[mid] = SQRT2 * special.erfinv(r[mid])
    if (~mid).any():
        out[~mid] = norm_cdf_inv(p[~mid])
    return out[0] if scalar else out
