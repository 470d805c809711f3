"""Point spectra, eigenvectors and Green functions.

Real eigenvalues are located as zeros of the pole-extracted
characteristic function: truncation eigenvalues seed sign-change
brackets, bisection refines them, and a guarded secant step polishes the
result.  Eigenvector components come from one certified tail sweep per
spectral parameter; norms use the derivative identity
norm^2 = xi'_0(z) xi_1(z) with a 4-point central-difference stencil.

Bilateral (two-sided) difference equations get their distinguished
solution pair f, g from right- and left-infinite sweeps, together with
the Wronskian, the associated antisymmetric matrix, and the summation
identity connecting two spectral families that share a weight sequence.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    ConvergenceError,
    TolUnreachable,
    HypothesisFailed,
    NearSpectrum,
    NoConvergenceCertificate,
    SingularAtZ,
)
from .ffun import (
    f_bilateral,
    f_finite,
    f_finite_products,
    f_left_pair,
    f_tail,
    f_tail_array,
    f_tail_pair,
)
from .jacobi import (
    GeneralJacobiDescriptor,
    _matched_indices,
    check_convergence,
    window_evaluator,
)
from .sequences import SequenceSpec, TailModel, LeftTailModel, \
    telescoping_tail_model, telescoping_left_tail_model
from .truncation import truncated_spectrum
from .errors import BadParams

__all__ = [
    "EigenPair",
    "BilateralSolutionPair",
    "BilateralDescriptor",
    "ZeroEigenReport",
    "find_real_zeros",
    "eigenvector",
    "eigen_norm_sq",
    "xi_sum",
    "green_entry",
    "green_finite",
    "bessel_bilateral",
    "bilateral_solutions",
    "jmatrix_entry",
    "green_summation_check",
    "zero_eigen_test",
]

_SEED_ORDER = 400
_K_CAP = 10_000


@dataclass
class EigenPair:
    """Eigenvalue z with eigenvector samples xi_1..xi_K.

    ``norm_sq`` holds the bilinear partial sum of xi_k^2 over the stored
    samples; the derivative-based norm lives in :func:`eigen_norm_sq`.
    """

    z: complex
    xi: np.ndarray
    norm_sq: float
    bracket: Optional[Tuple[float, float]] = None


@dataclass
class BilateralSolutionPair:
    """Two-sided solution samples with their (constant) Wronskian."""

    f: np.ndarray
    g: np.ndarray
    wronskian: complex
    n_lo: int = 0
    wronskian_samples: np.ndarray = field(default=None, repr=False)


# ---------------------------------------------------------------------------
# real zero search


def _certify_window(desc, lo, hi):
    z0 = complex(0.5 * (lo + hi), max(1.0, 0.5 * (hi - lo)))
    try:
        check_convergence(desc, z0, 1e-9)
    except ConvergenceError as exc:
        raise NoConvergenceCertificate(
            f"convergence condition not certified at probe {z0}: "
            f"{exc}") from exc


def _bisect_to(gw, a, b, fa, fb, tol):
    """Refine a sign-change bracket; returns (zero, (a, b))."""
    while (b - a) > tol * (1.0 + abs(a) + abs(b)) * 0.5:
        m = 0.5 * (a + b)
        fm = gw(m)
        if fm == 0.0:
            eps = tol * (1.0 + abs(m)) * 0.25
            return m, (m - eps, m + eps)
        if (fm < 0.0) == (fa < 0.0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    # one guarded secant polish
    z = 0.5 * (a + b)
    if fb != fa:
        s = (a * fb - b * fa) / (fb - fa)
        if a < s < b:
            z = s
    return z, (a, b)


def find_real_zeros(desc, window, tol: float = 1e-10):
    """All zeros of the regularized characteristic function in a window.

    Returns a sorted list of ``(zero, (lo, hi))`` sign-change brackets.
    Seeds come from the order-400 truncation; each seed is bracketed by
    expanding steps, bisected to width tol (1+|z|) and polished by one
    secant step; the gaps between located zeros are swept for any
    sign change the seeds missed.
    """
    if not desc.is_real:
        raise ValueError("real zero search needs a real descriptor")
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ValueError("window must satisfy lo < hi")
    gw = window_evaluator(desc, lo, hi, tol)
    _certify_window(desc, lo, hi)

    seeds = truncated_spectrum(desc, _SEED_ORDER, min(tol, 1e-10))
    ev = seeds.eigenvalues
    sds = [float(s) for s in ev[(ev > lo) & (ev < hi)]]
    found = []

    def record(z, br):
        z = float(z)
        for zz, _ in found:
            if abs(z - zz) <= 10.0 * tol * (1.0 + abs(z)):
                return
        found.append((z, (float(br[0]), float(br[1]))))
        found.sort()

    for i, s in enumerate(sds):
        gap = hi - lo
        if i > 0:
            gap = min(gap, s - sds[i - 1])
        if i + 1 < len(sds):
            gap = min(gap, sds[i + 1] - s)
        gap = min(gap, s - lo, hi - s)
        delta = max(1e-3 * gap, tol * (1.0 + abs(s)))
        bracket = None
        while delta <= 0.5 * gap + 1e-300:
            a, b = s - delta, s + delta
            fa, fb = gw(a), gw(b)
            if fa == 0.0:
                record(a, (a - delta * 0.5, a + delta * 0.5))
                bracket = ()
                break
            if fb == 0.0:
                record(b, (b - delta * 0.5, b + delta * 0.5))
                bracket = ()
                break
            if (fa < 0.0) != (fb < 0.0):
                bracket = (a, b, fa, fb)
                break
            delta *= 3.0
        if bracket:
            z, br = _bisect_to(gw, *bracket, tol)
            record(z, br)

    # sweep the gaps for sign changes the seeds missed
    edges = [lo] + [z for z, _ in found] + [hi]
    margin = lambda z: 3.0 * tol * (1.0 + abs(z))
    samples_seen = []
    for a0, b0 in zip(edges[:-1], edges[1:]):
        a, b = a0 + margin(a0), b0 - margin(b0)
        if b <= a:
            continue
        xs = np.linspace(a, b, 8)
        fs = [gw(float(x)) for x in xs]
        samples_seen.extend(abs(v) for v in fs)
        for x0, x1, f0, f1 in zip(xs[:-1], xs[1:], fs[:-1], fs[1:]):
            if f0 == 0.0 or (f0 < 0.0) != (f1 < 0.0):
                z, br = _bisect_to(gw, float(x0), float(x1), f0, f1, tol)
                record(z, br)
    if samples_seen and max(samples_seen) < 1e-13 and not found:
        raise NearSpectrum(
            "the regularized characteristic function is below 1e-13 at "
            "every probe point of the window; zeros cannot be separated")
    return found


# ---------------------------------------------------------------------------
# eigenvectors and norms


def _xi_values(desc, u, matched, upto, tol):
    """xi_0..xi_upto at parameter u with a fixed matched index set.

    Components use the closed product form seeded by one certified tail
    sweep at the top, then the three-term recurrence downward (the
    numerically stable direction for the minimal solution).  Matched
    indices have their (u - lambda) factor omitted, which keeps every
    value finite when u sits exactly on those diagonal entries.
    """
    mset = set(matched)
    M = matched[-1] if matched else 0
    K0 = max(M + 1, upto + 1, 2)
    sspec = desc.spec_at(u)
    f1, f2, _ = f_tail_pair(sspec, K0 + 1, tol)
    lam = desc.diag(K0 + 1)
    w = desc.weights(K0)
    real_here = sspec.is_real
    uu = u.real if (real_here and isinstance(u, complex)) else u
    dt = np.float64 if real_here else np.complex128
    A = 1.0
    for el in range(1, K0 + 1):
        if el >= 2:
            A *= w[el - 2]
        if el not in mset:
            A /= (uu - lam[el - 1])
    xi = np.empty(K0 + 2, dtype=dt)
    xi[K0] = A * f1
    xi[K0 + 1] = A * (w[K0 - 1] / (uu - lam[K0])) * f2
    for k in range(K0, 1, -1):
        xi[k - 1] = ((uu - lam[k - 1]) * xi[k] - w[k - 1] * xi[k + 1]) \
            / w[k - 2]
    xi[0] = (uu - lam[0]) * xi[1] - w[0] * xi[2]
    return xi[:upto + 1]


def eigenvector(desc, z, K: Optional[int] = None, tol: float = 1e-10,
                bracket=None):
    """Eigenvector samples xi_1..xi_K at a located zero z.

    Components for k past the last diagonal entry matching z come from
    the closed product form sharing one tail sweep; earlier components
    follow by the downward three-term recurrence.  When K is omitted the
    smallest K with |xi_K| <= 1e-14 max|xi| is chosen (capped at 10^4).
    """
    matched = _matched_indices(desc, z)
    M = matched[-1] if matched else 0
    mset = set(matched)
    sspec = desc.spec_at(z)
    vals, base, _ = f_tail_array(sspec, M + 1, tol)
    real_here = sspec.is_real
    uu = z.real if (real_here and isinstance(z, complex)) else z
    dt = np.float64 if real_here else np.complex128
    cap = min(K if K is not None else _K_CAP, M + len(vals) - 2)
    cap = max(cap, M + 1)
    lam = desc.diag(cap + 1)
    w = desc.weights(cap)
    wl_prev = np.empty(cap, dtype=dt)
    wl_prev[0] = 1.0
    wl_prev[1:] = w[:cap - 1]
    den = (uu - lam[:cap]).astype(dt)
    if mset:
        mask = np.zeros(cap, dtype=bool)
        for j in matched:
            if j <= cap:
                mask[j - 1] = True
        den = np.where(mask, np.asarray(1.0, dtype=dt), den)
    ratios = wl_prev / den
    A = np.cumprod(ratios)
    xi = np.zeros(cap + 1, dtype=dt)  # xi[k] = xi_k, xi[0] set below
    k0 = max(M, 1)
    ks = np.arange(k0, cap + 1)
    xi[k0:] = A[k0 - 1:] * vals[ks - M]
    for k in range(max(M, 2), 1, -1):
        xi[k - 1] = ((uu - lam[k - 1]) * xi[k] - w[k - 1] * xi[k + 1]) \
            / w[k - 2]
    kk = K if K is not None else _K_CAP
    if K is None:
        mx = float(np.max(np.abs(xi[1:])))
        small = np.nonzero(np.abs(xi[1:]) <= 1e-14 * mx)[0]
        kk = int(small[0]) + 1 if small.size else cap
        kk = max(kk, min(2, cap))
    out = np.zeros(kk, dtype=dt)
    take = min(kk, cap)
    out[:take] = xi[1:take + 1]
    nsq = np.sum(out * out)
    nsq = float(nsq.real) if real_here else complex(nsq)
    return EigenPair(z=z, xi=out, norm_sq=nsq, bracket=bracket)


def _stencil_derivative(fn, z, h):
    """Central difference with one Richardson sweep (4-point stencil)."""
    def d(step):
        return (fn(z + step) - fn(z - step)) / (2.0 * step)

    return (4.0 * d(h / 2.0) - d(h)) / 3.0


def _xi_eval(desc, u, matched, upto, tol):
    """_xi_values with the evaluation tolerance relaxed honestly.

    Stencil evaluations ask for more than float64 can certify near
    large functional values; backing off to the achievable residual is
    fine because the quotient noise floor dominates the stencil error.
    """
    t = tol
    while True:
        try:
            return _xi_values(desc, u, matched, upto, t)
        except TolUnreachable:
            if t > 1e-6:
                raise
            t *= 8.0


def eigen_norm_sq(desc, z, tol: float = 1e-10, K: Optional[int] = None,
                  with_partial_sum: bool = False):
    """Squared eigenvector norm xi'_0(z) xi_1(z) at a real zero z.

    xi'_0 uses a central stencil of width h = max(1e-6, 1e-7 |z|) with
    one Richardson extrapolation.  With ``with_partial_sum`` the direct
    partial sum of xi_k^2 is returned alongside for cross-checking.
    """
    matched = _matched_indices(desc, z)

    def phi(u):
        return _xi_eval(desc, u, matched, 0, min(tol, 1e-11))[0]

    h = max(1e-6, 1e-7 * abs(z))
    d0 = _stencil_derivative(phi, z, h)
    xi1 = _xi_eval(desc, z, matched, 1, min(tol, 1e-11))[1]
    norm = d0 * xi1
    norm = float(np.real(norm)) if desc.is_real and \
        complex(z).imag == 0.0 else complex(norm)
    if not with_partial_sum:
        return norm
    partial = eigenvector(desc, z, K=K, tol=tol).norm_sq
    return norm, partial


def xi_sum(desc, z, K: Optional[int] = None, tol: float = 1e-10):
    """Both sides of the bilinear sum identity at a non-zero of F.

    Returns ``(sum of xi_k^2 over k = 1..K, xi'_0 xi_1 - xi_0 xi'_1)``
    with the derivatives from the 4-point stencil.
    """
    matched = _matched_indices(desc, z)
    pair = eigenvector(desc, z, K=K, tol=tol)
    lhs = pair.norm_sq

    def comp(u):
        return _xi_eval(desc, u, matched, 1, min(tol, 1e-11))

    h = max(1e-6, 1e-7 * abs(z))
    x_here = comp(z)
    d = _stencil_derivative(comp, z, h)
    rhs = d[0] * x_here[1] - x_here[0] * d[1]
    if desc.is_real and complex(z).imag == 0.0:
        rhs = float(np.real(rhs))
    return lhs, rhs


# ---------------------------------------------------------------------------
# Green functions


def green_entry(desc, z, i: int, j: int, tol: float = 1e-10):
    """Resolvent entry G(z; i, j) of the infinite matrix.

    Uses the product of w_l/(z - lambda_l) along the path between i and
    j, the finite head functional, and two certified tails.  Symmetric
    in (i, j) by construction.  Raises NearSpectrum when |F(z)| < tol.
    """
    if i < 1 or j < 1:
        raise ValueError("matrix indices are 1-based")
    mn, mx = (i, j) if i <= j else (j, i)
    sspec = desc.spec_at(z)
    den, _ = f_tail(sspec, 1, tol)
    if abs(den) < tol:
        raise NearSpectrum(
            f"|F(z)| = {abs(den):.3e} < {tol:g}; z is too close to the "
            "spectrum for a reliable resolvent entry")
    upper, _ = f_tail(sspec, mx + 1, tol)
    lam = desc.diag(mx + 1)
    w = desc.weights(mx)
    g = desc.gamma_array(mn)
    if mn > 1:
        x_head = (g[:mn - 1] ** 2) / (lam[:mn - 1] - z)
        head = f_finite(x_head)
    else:
        head = 1.0
    path = np.prod(w[mn - 1:mx] / (z - lam[mn - 1:mx]))
    return -(1.0 / w[mx - 1]) * path * head * upper / den


def green_finite(gdesc: GeneralJacobiDescriptor, n: int, z, i: int, j: int):
    """Entry (i, j) of (J_n - z)^{-1} for a general tridiagonal matrix.

    Evaluated through the closed product/functional formula with the
    off-diagonal path product taken along the super- or subdiagonal
    depending on the side of the entry.
    """
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValueError("indices must lie in 1..n")
    lam = np.asarray(gdesc.diag(n))
    sup = np.asarray(gdesc.supers(n - 1)) if n > 1 else np.empty(0)
    sub = np.asarray(gdesc.subs(n - 1)) if n > 1 else np.empty(0)
    pi = gdesc.pi_array(n)
    shift = lam - z
    if np.any(shift == 0.0):
        raise SingularAtZ("z equals a diagonal entry of the truncation")
    x = pi / shift
    den = f_finite(x)
    if den == 0.0 or not np.isfinite(abs(den)):
        raise SingularAtZ("z is an eigenvalue of the truncation")
    mn, mx = (i, j) if i <= j else (j, i)
    if i < j:
        omega = np.prod(sup[mn - 1:mx - 1]) if mx > mn else 1.0
    elif i > j:
        omega = np.prod(sub[mn - 1:mx - 1]) if mx > mn else 1.0
    else:
        omega = 1.0
    head = f_finite(x[:mn - 1]) if mn > 1 else 1.0
    tail = f_finite(x[mx:]) if mx < n else 1.0
    mid = np.prod(z - lam[mn - 1:mx])
    return -omega / mid * head * tail / den


# ---------------------------------------------------------------------------
# bilateral difference equations


@dataclass(eq=False)
class BilateralDescriptor:
    """Two-sided difference equation w_n u_{n+1} - zeta_n u_n
    + w_{n-1} u_{n-1} = 0 described by entry callables over all of Z.

    ``tail_model``/``left_tail_model`` certify the product decay toward
    +inf and -inf; both are factories receiving nothing (the products
    carry no spectral parameter here).
    """

    zeta_vec: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    w_vec: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    tail_model: Optional[TailModel] = field(default=None, repr=False)
    left_tail_model: Optional[LeftTailModel] = field(default=None,
                                                     repr=False)
    is_real: bool = True
    family: str = "custom"

    def zeta(self, a: int, b: int) -> np.ndarray:
        return np.asarray(self.zeta_vec(np.arange(a, b + 1, dtype=np.int64)))

    def w(self, a: int, b: int) -> np.ndarray:
        return np.asarray(self.w_vec(np.arange(a, b + 1, dtype=np.int64)))

    def products(self, a: int, b: int) -> np.ndarray:
        if b < a:
            dt = np.float64 if self.is_real else np.complex128
            return np.empty(0, dtype=dt)
        z = self.zeta(a, b + 1)
        w = self.w(a, b)
        return (w * w) / (z[:-1] * z[1:])

    def spec(self) -> SequenceSpec:
        return SequenceSpec(term=None, range=(None, None),
                            products_vec=self.products,
                            tail_model=self.tail_model,
                            left_tail_model=self.left_tail_model,
                            is_real=self.is_real)


def bessel_bilateral(nu, w) -> BilateralDescriptor:
    """The constant-weight family zeta_n = nu + n (nu non-integer)."""
    nuf = float(nu)
    wf = float(w)
    if abs(nuf - round(nuf)) < 1e-9:
        raise BadParams("nu must not be an integer (zeta_n would vanish)")
    if wf <= 0.0:
        raise BadParams("w must be positive")

    def zv(ks):
        return nuf + ks

    def wv(ks):
        return np.full(ks.shape, wf)

    return BilateralDescriptor(
        zeta_vec=zv, w_vec=wv,
        tail_model=telescoping_tail_model(-nuf, wf * wf),
        left_tail_model=telescoping_left_tail_model(-nuf, wf * wf),
        is_real=True, family="bessel")


def _script_p(bdesc, n_lo, n_hi):
    """Cumulative products P_n = prod_{k=1}^{n} w_{k-1}/zeta_k (P_0 = 1,
    reversed factors below zero) for n in [n_lo, n_hi]."""
    dt = np.float64 if bdesc.is_real else np.complex128
    out = np.empty(n_hi - n_lo + 1, dtype=dt)
    lo = min(n_lo, 0)
    hi = max(n_hi, 0)
    zeta = bdesc.zeta(lo, hi + 1)
    w = bdesc.w(lo - 1, hi)

    def zat(k):
        return zeta[k - lo]

    def wat(k):
        return w[k - lo + 1]

    full = np.empty(hi - lo + 1, dtype=dt)
    full[-lo] = 1.0
    for n in range(1, hi + 1):
        full[n - lo] = full[n - 1 - lo] * wat(n - 1) / zat(n)
    for n in range(-1, lo - 1, -1):
        full[n - lo] = full[n + 1 - lo] * zat(n + 1) / wat(n)
    out[:] = full[n_lo - lo:n_hi - lo + 1]
    return out


def bilateral_solutions(bdesc: BilateralDescriptor, window, tol: float = 1e-10):
    """Distinguished solution pair over integer window [n_lo, n_hi].

    f_n decays toward +inf (P_n times the right tail functional), g_n
    toward -inf; their Wronskian w_n (f_n g_{n+1} - f_{n+1} g_n) is
    constant and equals the full two-sided functional.
    """
    n_lo, n_hi = int(window[0]), int(window[1])
    if n_hi < n_lo + 1:
        raise ValueError("window must contain at least two points")
    sspec = bdesc.spec()
    P = _script_p(bdesc, n_lo - 1, n_hi + 1)

    def pat(n):
        return P[n - (n_lo - 1)]

    w = bdesc.w(n_lo - 1, n_hi)

    def wat(n):
        return w[n - (n_lo - 1)]

    count = n_hi - n_lo + 1
    dt = np.float64 if bdesc.is_real else np.complex128
    f = np.empty(count, dtype=dt)
    g = np.empty(count, dtype=dt)
    for n in range(n_lo, n_hi + 1):
        fr, _, _ = f_tail_pair(sspec, n + 1, tol)
        f[n - n_lo] = pat(n) * fr
        gl, _, _ = f_left_pair(sspec, n - 1, tol)
        g[n - n_lo] = gl / (wat(n - 1) * pat(n - 1))
    samples = np.array([wat(n) * (f[n - n_lo] * g[n + 1 - n_lo] -
                                  f[n + 1 - n_lo] * g[n - n_lo])
                        for n in range(n_lo, n_hi)])
    wr = complex(np.median(samples.real))
    if not bdesc.is_real:
        wr = complex(np.median(samples.real), np.median(samples.imag))
    return BilateralSolutionPair(f=f, g=g, wronskian=wr, n_lo=n_lo,
                                 wronskian_samples=samples)


def jmatrix_entry(bdesc: BilateralDescriptor, m: int, n: int,
                  tol: float = 1e-10):
    """Entry of the antisymmetric matrix built from the bilateral family.

    For m < n the closed form is (1/w_m) prod_{j=m+1}^{n-1} (zeta_j/w_j)
    times the finite block functional over the indices strictly between.
    """
    if m == n:
        return 0.0
    if m > n:
        return -jmatrix_entry(bdesc, n, m, tol)
    w = bdesc.w(m, n - 1)
    pref = 1.0 / w[0]
    if n - 1 >= m + 1:
        zeta = bdesc.zeta(m + 1, n - 1)
        pref = pref * np.prod(zeta / w[1:])
    block = f_finite_products(bdesc.products(m + 1, n - 2))
    return pref * block


def green_summation_check(bd1: BilateralDescriptor,
                          bd2: BilateralDescriptor,
                          tol: float = 1e-10,
                          max_terms: int = 4096):
    """Both sides of the two-family summation identity.

    Returns ``(sum_{j>=1} (zeta1_j - zeta2_j) f1_j f2_j,
    w_0 (f1_0 f2_1 - f1_1 f2_0))`` with the left side accumulated until
    its boundary term has decayed below tolerance.  The two families
    must share the weight sequence and both right tails must be
    certified; otherwise HypothesisFailed is raised naming the broken
    hypothesis.
    """
    wp1 = bd1.w(0, 64)
    wp2 = bd2.w(0, 64)
    if float(np.max(np.abs(wp1 - wp2))) > 1e-13 * (1.0 +
                                                   float(np.max(np.abs(wp1)))):
        raise HypothesisFailed(
            "the summation identity needs both families to share one "
            "weight sequence")
    for tag, bd in (("first", bd1), ("second", bd2)):
        if bd.spec().tail_model is None and bd.spec().tail_sum_bound is None:
            raise HypothesisFailed(
                f"no certified decay toward +inf for the {tag} family")

    s1, s2 = bd1.spec(), bd2.spec()
    n = 16
    lhs = 0.0
    prev_top = 0
    zd = None
    f1 = f2 = None
    while True:
        P1 = _script_p(bd1, 0, n + 1)
        P2 = _script_p(bd2, 0, n + 1)
        f1 = np.empty(n + 2, dtype=np.complex128)
        f2 = np.empty(n + 2, dtype=np.complex128)
        for j in range(0, n + 2):
            v1, _, _ = f_tail_pair(s1, j + 1, tol)
            v2, _, _ = f_tail_pair(s2, j + 1, tol)
            f1[j] = P1[j] * v1
            f2[j] = P2[j] * v2
        zd = bd1.zeta(1, n) - bd2.zeta(1, n)
        lhs = complex(np.sum(zd * f1[1:n + 1] * f2[1:n + 1]))
        w0 = complex(bd1.w(0, 0)[0])
        rhs = w0 * (f1[0] * f2[1] - f1[1] * f2[0])
        wn = complex(bd1.w(n, n)[0])
        boundary = wn * (f1[n] * f2[n + 1] - f1[n + 1] * f2[n])
        scale = 1.0 + abs(lhs) + abs(rhs)
        if abs(boundary) <= tol * scale:
            if bd1.is_real and bd2.is_real:
                return lhs.real, rhs.real
            return lhs, rhs
        prev_top = n
        n *= 2
        if n > max_terms:
            raise HypothesisFailed(
                "the boundary term w_n (f1_n f2_{n+1} - f1_{n+1} f2_n) "
                f"has not decayed below tolerance by n = {prev_top}; a "
                "sup hypothesis of the summation identity fails")


# ---------------------------------------------------------------------------
# zero-eigenvalue diagnostic


@dataclass
class ZeroEigenReport:
    """Summability diagnostic for sum_k 1/gamma_{2k-1}^2."""

    eigenvalue: bool
    method: str
    statistic: float
    detail: str


def zero_eigen_test(desc, depth: int = 400):
    """Decide whether sum_k 1/gamma_{2k-1}^2 converges.

    Works in log space (the gammas can over/underflow).  A geometric
    ratio test runs first; ambiguous ratios fall back to a power-law fit
    of log t_k against log k.  Convergence of the sum is the criterion
    for 0 being a (simple) eigenvalue of a zero-diagonal matrix.
    """
    w = np.asarray(desc.weights(2 * depth), dtype=np.float64)
    logw = np.log(np.abs(w))
    diffs = logw[1::2] - logw[0:-1:2]
    lt = -2.0 * np.concatenate([[0.0], np.cumsum(diffs)])
    lt = lt[:depth]
    ratios = np.exp(lt[1:] - lt[:-1])
    quarter = ratios[-(len(ratios) // 4):]
    rbar = float(np.mean(quarter))
    if rbar <= 0.9:
        return ZeroEigenReport(
            eigenvalue=True, method="geometric", statistic=rbar,
            detail=f"tail ratio {rbar:.4f} <= 0.9; terms decay "
                   "geometrically")
    if rbar >= 1.1:
        return ZeroEigenReport(
            eigenvalue=False, method="geometric", statistic=rbar,
            detail=f"tail ratio {rbar:.4f} >= 1.1; terms do not tend "
                   "to zero")
    ks = np.arange(1, depth + 1, dtype=np.float64)
    half = depth // 2
    slope, _ = np.polyfit(np.log(ks[half:]), lt[half:], 1)
    p = -float(slope)
    if p > 1.2:
        return ZeroEigenReport(
            eigenvalue=True, method="power-fit", statistic=p,
            detail=f"terms decay like k^{-p:.2f}; the sum converges")
    if p < 1.05:
        return ZeroEigenReport(
            eigenvalue=False, method="power-fit", statistic=p,
            detail=f"terms scale like k^{-p:.2f}; the sum diverges")
    raise NoConvergenceCertificate(
        f"ambiguous decay (ratio {rbar:.3f}, power {p:.3f}); cannot "
        "certify either way")
