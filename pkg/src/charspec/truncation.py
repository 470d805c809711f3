"""Finite truncations as an independent oracle.

Eigenvalues of the n-th leading principal submatrix J_n are computed by
bisection on the Sturm pivot count, which needs nothing but the entries
and therefore cross-checks the characteristic-function route end to end.
The module also evaluates det(J_n - z) by the three-term determinant
recurrence (with power-of-two rescaling for deep truncations) and the
orthogonal polynomials of the first and second kind.
"""

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._kernels import sturm_counts
from .errors import HypothesisFailed

__all__ = [
    "TruncationSpectrum",
    "TrackingRow",
    "truncated_spectrum",
    "lambda_tracking",
    "charpoly",
    "orthopoly",
]

_DEFAULT_N_LIST = (25, 50, 100, 200, 400)


@dataclass
class TruncationSpectrum:
    """All eigenvalues of a truncation, sorted increasingly."""

    n: int
    eigenvalues: np.ndarray
    method: str = "sturm-bisection"


@dataclass
class TrackingRow:
    """One row of the truncation-convergence table."""

    n: int
    eigenvalues: np.ndarray
    distances: np.ndarray = field(repr=False)
    max_distance: float = math.inf


def truncated_spectrum(desc, n: int, tol: float = 1e-12):
    """Eigenvalues of J_n to absolute accuracy tol by Sturm bisection.

    The descriptor must be real.  All n eigenvalues are bisected in
    lockstep from a Gershgorin enclosure; the pivot-count kernel makes
    each sweep O(n) per eigenvalue.
    """
    if n < 1:
        raise ValueError("truncation order must be >= 1")
    if not desc.is_real:
        raise ValueError("the truncation oracle is defined for real "
                         "descriptors only")
    lam = np.ascontiguousarray(desc.diag(n), dtype=np.float64)
    w = np.ascontiguousarray(desc.weights(n - 1), dtype=np.float64) \
        if n > 1 else np.empty(0)
    offsq = np.ascontiguousarray(w * w)
    radius = np.zeros(n)
    if n > 1:
        radius[:-1] += np.abs(w)
        radius[1:] += np.abs(w)
    glo = float(np.min(lam - radius))
    ghi = float(np.max(lam + radius))
    span = max(ghi - glo, 1e-300)
    lo = np.full(n, glo)
    hi = np.full(n, ghi)
    want = np.arange(1, n + 1, dtype=np.int64)
    max_iter = max(8, int(math.ceil(math.log2(span / max(tol, 1e-300)))) + 4)
    for _ in range(min(max_iter, 300)):
        mid = 0.5 * (lo + hi)
        cnt = sturm_counts(lam, offsq, mid)
        take = cnt >= want
        hi = np.where(take, mid, hi)
        lo = np.where(take, lo, mid)
        if float(np.max(hi - lo)) <= tol:
            break
    return TruncationSpectrum(n=n, eigenvalues=0.5 * (lo + hi))


def _probe_conditions(desc):
    """Check the spectral-convergence hypotheses by probing deep entries.

    Condition (i): the weights tend to zero.  Condition (ii): the
    diagonal is unbounded and dominates the neighbouring weights,
    limsup (|w_{n-1}| + |w_n|) / |lambda_n| < 1.  Raises HypothesisFailed
    naming whichever condition broke when neither holds.
    """
    w_near = np.abs(desc.weights(1024)[256:])
    w_far = np.abs(desc.weights(8192)[4096:])
    if float(np.max(w_far)) <= max(1e-2, 0.25 * float(np.max(w_near))) and \
            float(np.max(w_far)) < float(np.max(w_near)):
        return "weights tend to zero"
    lam_near = np.abs(desc.diag(1024)[256:])
    lam_all = desc.diag(8192)
    w_all = desc.weights(8192)
    lam_far = np.abs(lam_all[4096:])
    growing = float(np.min(lam_far)) >= 2.0 * float(np.max(lam_near)) and \
        float(np.min(lam_far)) > 10.0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (np.abs(w_all[4095:8191]) + np.abs(w_all[4096:8192])) / \
            np.abs(lam_all[4096:8192])
    dominated = float(np.max(ratio)) <= 0.9
    if growing and dominated:
        return "unbounded dominated diagonal"
    if not growing:
        raise HypothesisFailed(
            "neither convergence hypothesis holds: the weights do not tend "
            "to zero (condition i) and the diagonal does not grow without "
            "bound (condition ii)")
    raise HypothesisFailed(
        "condition (ii) fails: limsup (|w_{n-1}|+|w_n|)/|lambda_n| = "
        f"{float(np.max(ratio)):.3f} is not < 1")


def lambda_tracking(desc, window, n_list: Sequence[int] = _DEFAULT_N_LIST,
                    tol: float = 1e-10):
    """Convergence table of truncation eigenvalues toward the zeros of the
    characteristic function inside a window.

    Returns a list of TrackingRow; the max-distance column is expected to
    be nonincreasing once truncation eigenvalues inside the window have
    settled near their limits.
    """
    _probe_conditions(desc)
    # imported here: the zero search lives a layer above this oracle
    from .spectral import find_real_zeros

    lo, hi = float(window[0]), float(window[1])
    zeros = np.array([z for z, _ in find_real_zeros(desc, (lo, hi), tol)])
    rows = []
    for n in n_list:
        ts = truncated_spectrum(desc, int(n), tol)
        ev = ts.eigenvalues
        inside = ev[(ev >= lo) & (ev <= hi)]
        if zeros.size and inside.size:
            dist = np.min(np.abs(inside[:, None] - zeros[None, :]), axis=1)
            mx = float(np.max(dist))
        else:
            dist = np.full(inside.size, math.inf)
            mx = math.inf if inside.size else 0.0
        rows.append(TrackingRow(n=int(n), eigenvalues=inside,
                                distances=dist, max_distance=mx))
    return rows


def _charpoly_scaled(desc, n, z):
    """det(J_n - z) as (mantissa, exponent2) with both trailing minors
    rescaled together whenever they leave [2^-512, 2^512]."""
    if n == 0:
        return 1.0, 0
    lam = desc.diag(n)
    w = desc.weights(n - 1) if n > 1 else np.empty(0)
    d_pp = 1.0 + 0.0j if not desc.is_real or isinstance(z, complex) else 1.0
    d_p = (lam[0] - z) * d_pp
    e = 0
    up, down = 2.0 ** 512, 2.0 ** -512
    for k in range(2, n + 1):
        d = (lam[k - 1] - z) * d_p - (w[k - 2] ** 2) * d_pp
        d_pp, d_p = d_p, d
        m = max(abs(d_p), abs(d_pp))
        if m > up:
            d_p *= down
            d_pp *= down
            e += 512
        elif 0.0 < m < down:
            d_p *= up
            d_pp *= up
            e -= 512
    return d_p, e


def charpoly(desc, n: int, z):
    """det(J_n - z) via the three-term determinant recurrence.

    Deep truncations are rescaled internally by powers of two; the
    recombined value can over/underflow float range for huge n, in which
    case inf/0 with the correct sign is returned.
    """
    m, e = _charpoly_scaled(desc, n, z)
    if e == 0:
        return m

    def _ldexp(x, ex):
        try:
            return math.ldexp(x, ex)
        except OverflowError:
            return math.copysign(math.inf, x)

    if isinstance(m, complex):
        return complex(_ldexp(m.real, e), _ldexp(m.imag, e))
    return _ldexp(m, e)


def orthopoly(desc, kind: str, n: int, z):
    """Orthogonal polynomial value p_n(z) or q_n(z) by direct recurrence.

    First kind: p_0 = 1, p_1 = (z - lambda_1)/w_1.  Second kind:
    q_0 = 0, q_1 = 1/w_1.  Both satisfy
    u_{k+1} = ((z - lambda_k) u_k - w_{k-1} u_{k-1}) / w_k.
    """
    if n < 0:
        raise ValueError("polynomial degree must be >= 0")
    if kind not in ("first", "second"):
        raise ValueError("kind must be 'first' or 'second'")
    lam = desc.diag(max(n, 1))
    w = desc.weights(max(n, 1))
    if kind == "first":
        u_prev, u_cur = 0.0, 1.0
        if n == 0:
            return u_cur
        start = 1
    else:
        if n == 0:
            return 0.0
        u_prev, u_cur = 0.0, 1.0 / w[0]
        if n == 1:
            return u_cur
        start = 2
    for k in range(start, n + 1):
        wm1 = w[k - 2] if k >= 2 else 0.0
        u_prev, u_cur = u_cur, ((z - lam[k - 1]) * u_cur -
                                wm1 * u_prev) / w[k - 1]
    return u_cur
