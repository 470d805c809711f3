"""Special functions needed by the closed-form reference routes.

Everything here is implemented from series / reflection formulas directly
(no scipy.special) so that the comparisons elsewhere in the package are
genuinely independent routes.  Intended argument ranges are desk scale:
orders in [-25, 25] or so, arguments up to about 30.  Outside that, the
series evaluations refuse rather than degrade silently.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BadParams, DomainError, PochhammerZero, PoleOfGamma

_SERIES_CAP = 500
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _near_integer(x, tol=1e-12):
    return abs(x - round(x)) <= tol


def gamma_fn(x: float) -> float:
    """Gamma function on the real line (Lanczos, g=7, 9 terms).

    Raises PoleOfGamma at nonpositive integers.  Relative accuracy is
    around 1e-13 on the desk-scale range.
    """
    x = float(x)
    if x <= 0.0 and _near_integer(x):
        raise PoleOfGamma(f"gamma pole at {x!r}")
    if x < 0.5:
        # reflection: gamma(x) gamma(1-x) = pi / sin(pi x)
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    z = x - 1.0
    acc = _LANCZOS_C[0]
    for i in range(1, len(_LANCZOS_C)):
        acc += _LANCZOS_C[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * acc


def log_gamma(x: float) -> float:
    """log |Gamma(x)| for positive real x (delegates to math.lgamma)."""
    x = float(x)
    if x <= 0.0 and _near_integer(x):
        raise PoleOfGamma(f"gamma pole at {x!r}")
    return math.lgamma(x)


def bessel_j(nu: float, x: float) -> float:
    """Bessel function of the first kind, ascending series route.

    Real order and argument.  Negative x is only defined for integer
    order; x = 0 needs nu >= 0 or a negative integer order.
    """
    nu = float(nu)
    x = float(x)
    if math.isnan(nu) or math.isnan(x):
        raise DomainError("nan argument")
    if _near_integer(nu):
        n = int(round(nu))
        if n < 0:
            s = -1.0 if (-n) % 2 else 1.0
            return s * bessel_j(float(-n), x)
        nu = float(n)
    if x < 0.0:
        if not _near_integer(nu):
            raise DomainError(
                "negative argument needs an integer order")
        s = -1.0 if int(round(nu)) % 2 else 1.0
        return s * bessel_j(nu, -x)
    if x == 0.0:
        if nu == 0.0:
            return 1.0
        if nu > 0.0:
            return 0.0
        raise DomainError("J_nu(0) diverges for negative non-integer order")
    # leading coefficient (x/2)^nu / gamma(nu+1)
    half = x / 2.0
    if _near_integer(nu) and nu >= 0.0:
        lead = math.exp(nu * math.log(half) - math.lgamma(nu + 1.0))
    else:
        lead = half**nu / gamma_fn(nu + 1.0)
    q = -half * half
    term = lead
    s = term
    peak = abs(s)
    for m in range(_SERIES_CAP):
        term = term * q / ((m + 1.0) * (nu + m + 1.0))
        s += term
        a = abs(s)
        if a > peak:
            peak = a
        if abs(term) <= 1e-17 * max(peak, 1e-300):
            return s
    raise DomainError(
        "Bessel series needs more than %d terms; argument outside the "
        "intended range" % _SERIES_CAP)


def bessel_y(nu: float, x: float) -> float:
    """Bessel function of the second kind.

    Non-integer order goes through the reflection formula

        Y_nu = (J_nu cos(pi nu) - J_{-nu}) / sin(pi nu);

    at integer order that quotient is 0/0 and hopelessly ill-conditioned
    nearby, so integers get the ascending log-series with digamma terms
    instead.
    """
    nu = float(nu)
    x = float(x)
    if x <= 0.0:
        raise DomainError("Y_nu needs x > 0")
    if abs(nu - round(nu)) < 1e-9:
        n = int(round(nu))
        if n < 0:
            sign = -1.0 if (-n) % 2 else 1.0
            return sign * _bessel_y_integer(-n, x)
        return _bessel_y_integer(n, x)
    return _bessel_y_noninteger(nu, x)


def _bessel_y_noninteger(nu, x):
    return ((bessel_j(nu, x) * math.cos(math.pi * nu) - bessel_j(-nu, x))
            / math.sin(math.pi * nu))


_EULER_GAMMA = 0.5772156649015328606065


def _bessel_y_integer(n: int, x: float) -> float:
    """Ascending series for Y_n, same validity regime as the J series:

        Y_n = (2/pi) ln(x/2) J_n
              - ((x/2)^{-n}/pi) sum_{k<n} ((n-k-1)!/k!) (x^2/4)^k
              - ((x/2)^n/pi) sum_k (psi(k+1)+psi(n+k+1)) (-x^2/4)^k
                                                          / (k! (n+k)!)
    """
    half = x / 2.0
    total = (2.0 / math.pi) * math.log(half) * bessel_j(float(n), x)
    xx = half * half
    if n > 0:
        t = math.factorial(n - 1) * half ** (-n)
        fin = t
        for k in range(1, n):
            t *= xx / (k * (n - k))
            fin += t
        total -= fin / math.pi
    h_k = 0.0
    h_nk = sum(1.0 / j for j in range(1, n + 1))
    coef = half ** n / math.factorial(n)
    term = coef * (h_k + h_nk - 2.0 * _EULER_GAMMA)
    s = term
    peak = abs(s)
    for k in range(1, _SERIES_CAP):
        coef *= -xx / (k * (n + k))
        h_k += 1.0 / k
        h_nk += 1.0 / (n + k)
        term = coef * (h_k + h_nk - 2.0 * _EULER_GAMMA)
        s += term
        peak = max(peak, abs(s))
        if abs(term) <= 1e-17 * max(peak, 1e-300):
            break
    else:
        raise DomainError(
            "Bessel series needs more than %d terms; argument outside "
            "the intended range" % _SERIES_CAP)
    return total - s / math.pi


def first_bessel_y_zero(nu: float, scan_step: float = 0.05) -> float:
    """First positive zero of Y_nu, located by sign scan plus bisection.

    Intended for nu >= 0 (Y_nu -> -inf at 0+, so the first sign change is
    the first zero).
    """
    nu = float(nu)
    lo = max(0.05, nu + 1e-3)
    f_lo = bessel_y(nu, lo)
    x = lo
    hi = None
    while x < nu + 25.0:
        x_next = x + scan_step * (1.0 + 0.2 * nu)
        f_next = bessel_y(nu, x_next)
        if f_lo * f_next <= 0.0:
            hi = x_next
            break
        x, f_lo = x_next, f_next
    if hi is None:
        raise DomainError("no sign change of Y_nu found in the scan range")
    lo = x
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if bessel_y(nu, lo) * bessel_y(nu, mid) <= 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def hyp0f1(b, z):
    """Confluent limit series 0F1(; b; z) = sum z^k / ((b)_k k!).

    Accepts real or complex arguments; raises PoleOfGamma when b is a
    nonpositive integer (the series is undefined there).
    """
    bb = complex(b)
    zz = complex(z)
    if abs(bb.imag) < 1e-14 and bb.real <= 0.0 and _near_integer(bb.real):
        raise PoleOfGamma("lower parameter of 0F1 is a nonpositive integer")
    term = 1.0 + 0j
    s = term
    peak = abs(s)
    for k in range(_SERIES_CAP):
        term = term * zz / ((bb + k) * (k + 1.0))
        s += term
        a = abs(s)
        if a > peak:
            peak = a
        if abs(term) <= 1e-17 * max(peak, 1e-300):
            break
    else:
        raise DomainError("0F1 series needs more than %d terms" % _SERIES_CAP)
    if abs(complex(b).imag) == 0.0 and abs(complex(z).imag) == 0.0:
        return s.real
    return s


def q_pochhammer(a, q: float, n: Optional[int] = None):
    """(a; q)_n, or the infinite product (a; q)_inf when n is None.

    The infinite product is truncated once |a q^j| drops below 1e-18.
    """
    q = float(q)
    if n is None and not 0.0 < q < 1.0:
        raise DomainError("infinite q-Pochhammer needs 0 < q < 1")
    av = complex(a)
    prod = 1.0 + 0j
    if n is not None:
        for j in range(int(n)):
            prod *= 1.0 - av * q**j
    else:
        j = 0
        factor = av
        while abs(factor) >= 1e-18:
            prod *= 1.0 - factor
            factor *= q
            j += 1
            if j > 100000:  # pragma: no cover - would need q ~ 1
                raise DomainError("q-Pochhammer did not converge")
    if abs(av.imag) == 0.0:
        return prod.real
    return prod


def phi01(b, q: float, z):
    """Basic hypergeometric series 0phi1(; b; q, z):

        sum_k  q^(k(k-1)) z^k / ((q; q)_k (b; q)_k)

    Needs 0 < q < 1.  Raises PochhammerZero when the b-Pochhammer hits a
    vanishing factor (b = q^{-j}).
    """
    q = float(q)
    if not 0.0 < q < 1.0:
        raise DomainError("0phi1 needs 0 < q < 1")
    bb = complex(b)
    zz = complex(z)
    term = 1.0 + 0j
    s = term
    peak = abs(s)
    for k in range(_SERIES_CAP):
        den1 = 1.0 - q ** (k + 1)
        den2 = 1.0 - bb * q**k
        if abs(den2) <= 1e-12 * (1.0 + abs(bb * q**k)):
            raise PochhammerZero(
                f"(b; q) factor vanishes at k = {k} (b = {b!r})")
        term = term * q ** (2 * k) * zz / (den1 * den2)
        s += term
        a = abs(s)
        if a > peak:
            peak = a
        if abs(term) <= 1e-17 * max(peak, 1e-300):
            break
    else:
        raise DomainError(
            "0phi1 series needs more than %d terms" % _SERIES_CAP)
    if abs(bb.imag) == 0.0 and abs(zz.imag) == 0.0:
        return s.real
    return s


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def bessel_k0(x: float) -> float:
    """Modified Bessel function K_0 via its cosh integral representation:

        K_0(x) = integral_0^inf exp(-x cosh t) dt

    evaluated by composite 16-point Gauss-Legendre panels of width <= 0.5
    on [0, T] with T chosen so the discarded tail is negligible.
    Relative accuracy ~1e-10 for x in [0.01, 30].
    """
    x = float(x)
    if x <= 0.0:
        raise DomainError("K_0 needs x > 0")
    t_max = math.acosh(max(3.0, 42.0 / x))
    n_panels = max(1, int(math.ceil(t_max / 0.5)))
    edges = np.linspace(0.0, t_max, n_panels + 1)
    a = edges[:-1][:, None]
    b = edges[1:][:, None]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    ts = mid + half * _GL_NODES[None, :]
    vals = np.exp(-x * np.cosh(ts))
    return float(np.sum(vals * _GL_WEIGHTS[None, :] * half))


# Airy function: Maclaurin series Ai = c1 f - c2 g with
# f = sum x^{3k} prod-ratios, g the x^{3k+1} companion.
_AIRY_C1 = 3.0 ** (-2.0 / 3.0) / gamma_fn(2.0 / 3.0)
_AIRY_C2 = 3.0 ** (-1.0 / 3.0) / gamma_fn(1.0 / 3.0)


def _airy_and_derivative(x: float):
    x3 = x**3
    # f series and its derivative
    tf = 1.0
    f = tf
    fp = 0.0
    for k in range(250):
        tf = tf * x3 / ((3 * k + 2.0) * (3 * k + 3.0))
        f += tf
        fp += tf * (3 * k + 3.0) / x
        if abs(tf) < 1e-20 * (1.0 + abs(f)):
            break
    tg = x
    g = tg
    gp = 1.0
    for k in range(250):
        tg = tg * x3 / ((3 * k + 3.0) * (3 * k + 4.0))
        g += tg
        gp += tg * (3 * k + 4.0) / x
        if abs(tg) < 1e-20 * (1.0 + abs(g)):
            break
    ai = _AIRY_C1 * f - _AIRY_C2 * g
    aip = _AIRY_C1 * fp - _AIRY_C2 * gp
    return ai, aip


def airy_neg_zeros(count: int) -> np.ndarray:
    """First ``count`` negative zeros of Ai, ordered a_1 > a_2 > ...

    The Maclaurin series keeps enough digits for the first six zeros
    (cancellation grows like exp(2|x|^{3/2}/3)); beyond that the request
    is refused.
    """
    count = int(count)
    if count < 1:
        raise BadParams("count must be >= 1")
    if count > 6:
        raise DomainError(
            "series route only supports the first 6 zeros accurately")
    out = np.empty(count)
    for s in range(1, count + 1):
        x = -((3.0 * math.pi * (4.0 * s - 1.0) / 8.0) ** (2.0 / 3.0))
        for _ in range(60):
            ai, aip = _airy_and_derivative(x)
            step = ai / aip
            x -= step
            if abs(step) < 1e-15 * abs(x):
                break
        out[s - 1] = x
    return out


@dataclass(frozen=True)
class QParams:
    """Validated parameter bundle for the q-family routines."""

    q: float
    beta: Optional[float] = None

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise BadParams(f"q must lie in (0, 1), got {self.q!r}")
        if self.beta is not None and not self.beta > 0.0:
            raise BadParams(f"beta must be positive, got {self.beta!r}")
