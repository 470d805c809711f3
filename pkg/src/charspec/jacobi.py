"""Jacobi matrix descriptors and their characteristic function.

A symmetric Jacobi matrix is fixed by a real or complex diagonal
``lambda_1, lambda_2, ...`` and off-diagonal weights ``w_1, w_2, ...``.
Away from the closure of the diagonal values the characteristic function

    F(z) = functional of x_k = gamma_k^2 / (lambda_k - z)

is well defined whenever the products

    p_k(z) = w_k^2 / ((lambda_k - z)(lambda_{k+1} - z))

are absolutely summable, and its zeros give the point spectrum.  This
module owns the descriptor types, the gamma accessors, the characteristic
function (plain and pole-extracted), the finite-determinant identity and
the JSON (de)serialization of the built-in families.

Only the products p_k enter the evaluation, so everything is routed
through :mod:`charspec.ffun` via per-descriptor `SequenceSpec` objects
that carry certified tail bounds where a closed form is known.
"""

import json
import math
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from ._kernels import three_term_forward
from .errors import (
    AccumulationPoint,
    BadParams,
    Diverges,
    InvalidZ0,
    NoTailBound,
    PoleAt,
)
from .ffun import f_tail, f_tail_pair, _fit_tail_bound
from .sequences import (
    SequenceSpec,
    TailBound,
    TailModel,
    geometric_tail_model,
    telescoping_tail_model,
)

__all__ = [
    "JacobiDescriptor",
    "GeneralJacobiDescriptor",
    "GammaSequence",
    "gamma",
    "check_convergence",
    "charfn",
    "charfn_regularized",
    "det_truncation_identity",
    "window_evaluator",
    "linear_diag",
    "harmonic",
    "qgeom",
    "zero_diag_harm",
    "zero_diag_q",
    "custom_rational",
    "descriptor_to_json",
    "descriptor_from_json",
]

# relative tolerance scale used to decide "z sits on a diagonal entry"
_MATCH_SCALE = 1e-12
# initial probe depth when scanning the diagonal for poles / matches
_PROBE = 1000
_PROBE_CAP = 1 << 22


# ---------------------------------------------------------------------------
# descriptors


@dataclass(eq=False)
class JacobiDescriptor:
    """Symmetric Jacobi matrix given by vectorized entry callables.

    ``lam_vec``/``w_vec`` receive a numpy integer array of 1-based indices
    and return the corresponding diagonal entries / weights.  Entry arrays
    are cached append-only under a lock, so descriptors are reentrant and
    safe to share between threads.

    ``der_lambda`` lists the accumulation points of the diagonal sequence
    (empty when the diagonal diverges).  ``tail_model_factory(z)`` returns
    the certified tail expansion of the products at spectral parameter z,
    when one is known in closed form; ``tail_sum_bound_factory(z)`` is the
    weaker alternative bounding sums of |p_k|.  ``products_degree`` is the
    known polynomial decay degree of p_k (custom_rational families), used
    to refuse certificates honestly instead of fitting a wrong envelope.
    """

    lam_vec: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    w_vec: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    der_lambda: Tuple[float, ...] = ()
    is_real: bool = True
    family: str = "custom"
    params: Dict[str, Any] = field(default_factory=dict)
    tail_model_factory: Optional[Callable[[complex], TailModel]] = field(
        default=None, repr=False)
    tail_sum_bound_factory: Optional[
        Callable[[complex], Callable[[int], float]]] = field(
        default=None, repr=False)
    products_degree: Optional[float] = None

    def __post_init__(self):
        self._lock = threading.Lock()
        dt = np.float64 if self.is_real else np.complex128
        self._lam = np.empty(0, dtype=dt)
        self._w = np.empty(0, dtype=dt)
        self._gam = np.empty(0, dtype=dt)

    # -- cached entry access

    def _grow(self, name, vec, n):
        cur = getattr(self, name)
        if cur.size >= n:
            return cur
        with self._lock:
            cur = getattr(self, name)
            if cur.size >= n:
                return cur
            new_n = max(n, 2 * cur.size, 64)
            ks = np.arange(cur.size + 1, new_n + 1, dtype=np.int64)
            dt = np.float64 if self.is_real else np.complex128
            vals = np.asarray(vec(ks), dtype=dt)
            out = np.concatenate([cur, vals])
            out.flags.writeable = False
            setattr(self, name, out)
            return out

    def diag(self, n: int) -> np.ndarray:
        """Diagonal entries lambda_1..lambda_n (read-only view)."""
        return self._grow("_lam", self.lam_vec, n)[:n]

    def weights(self, n: int) -> np.ndarray:
        """Weights w_1..w_n (read-only view)."""
        return self._grow("_w", self.w_vec, n)[:n]

    def gamma_array(self, n: int) -> np.ndarray:
        """gamma_1..gamma_n via the closed products over weight ratios."""
        cur = self._gam
        if cur.size >= n:
            return cur[:n]
        with self._lock:
            if self._gam.size >= n:
                return self._gam[:n]
        new_n = max(n, 2 * cur.size, 64)
        dt = np.float64 if self.is_real else np.complex128
        g = np.empty(new_n, dtype=dt)
        g[0] = 1.0
        if new_n > 1:
            w = self.weights(new_n - 1)
            # even 1-based slots: gamma_{2k} = w_1 prod w_{2j+1}/w_{2j}
            ne = (w.size - 1) // 2
            re = w[2:2 + 2 * ne:2] / w[1:1 + 2 * ne:2]
            ge = np.empty(re.size + 1, dtype=dt)
            ge[0] = w[0]
            if re.size:
                ge[1:] = w[0] * np.cumprod(re)
            g[1::2] = ge[: (new_n // 2)]
            # odd slots: gamma_{2k+1} = prod w_{2j}/w_{2j-1}
            no = w.size // 2
            ro = w[1:1 + 2 * no:2] / w[0:2 * no:2]
            go = np.cumprod(ro)
            g[2::2] = go[: ((new_n - 1) // 2)]
        g.flags.writeable = False
        with self._lock:
            if self._gam.size < new_n:
                self._gam = g
        return g[:n]

    # -- spectral-parameter plumbing

    def products(self, z, a: int, b: int) -> np.ndarray:
        """Products p_k(z) for k = a..b inclusive; PoleAt on a zero
        denominator."""
        if b < a:
            dt = np.float64 if (self.is_real and
                                complex(z).imag == 0.0) else np.complex128
            return np.empty(0, dtype=dt)
        lam = self.diag(b + 1)
        w = self.weights(b)
        zz = z if (self.is_real and complex(z).imag == 0.0) else complex(z)
        if not self.is_real:
            zz = complex(z)
        den = (lam[a - 1:b] - zz) * (lam[a:b + 1] - zz)
        with np.errstate(divide="ignore", invalid="ignore"):
            p = w[a - 1:b] ** 2 / den
        if not np.all(np.isfinite(p)):
            k = int(np.argmin(np.abs(lam - zz))) + 1
            raise PoleAt(
                f"spectral parameter hits the diagonal entry at index {k}",
                index=k)
        return p

    def spec_at(self, z) -> SequenceSpec:
        """The product-sequence description of F at spectral parameter z."""
        zc = complex(z)
        for d in self.der_lambda:
            if zc == complex(d):
                raise AccumulationPoint(
                    "spectral parameter equals an accumulation point of the "
                    f"diagonal ({d!r})")
        real_here = self.is_real and zc.imag == 0.0
        zz = zc.real if real_here else zc

        def pv(a, b, _z=zz):
            return self.products(_z, a, b)

        def term(k, _z=zz):
            g = self.gamma_array(k)[k - 1]
            lam = self.diag(k)[k - 1]
            return g * g / (lam - _z)

        model = None
        if self.tail_model_factory is not None:
            model = self.tail_model_factory(zc)
        tsb = None
        if self.tail_sum_bound_factory is not None:
            tsb = self.tail_sum_bound_factory(zc)
        return SequenceSpec(term=term, range=(1, None), tail_sum_bound=tsb,
                            tail_model=model, products_vec=pv,
                            is_real=real_here)


@dataclass(eq=False)
class GeneralJacobiDescriptor:
    """Tridiagonal matrix with independent super/sub diagonals.

    ``w_vec`` gives the superdiagonal, ``v_vec`` the subdiagonal.  The two
    gamma branches obey gamma+_1 = gamma-_1 = 1, gamma+_{k+1} = w_k/gamma-_k
    and gamma-_{k+1} = v_k/gamma+_k, so that gamma+_k gamma-_k carries the
    product structure of the symmetric case.
    """

    lam_vec: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    w_vec: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    v_vec: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    is_real: bool = True

    @classmethod
    def from_arrays(cls, lam, w, v, is_real=True):
        lam = np.asarray(lam)
        w = np.asarray(w)
        v = np.asarray(v)

        def lv(ks, _a=lam):
            return _a[ks - 1]

        def wv(ks, _a=w):
            return _a[ks - 1]

        def vv(ks, _a=v):
            return _a[ks - 1]

        return cls(lam_vec=lv, w_vec=wv, v_vec=vv, is_real=is_real)

    def diag(self, n: int) -> np.ndarray:
        return np.asarray(self.lam_vec(np.arange(1, n + 1, dtype=np.int64)))

    def supers(self, n: int) -> np.ndarray:
        return np.asarray(self.w_vec(np.arange(1, n + 1, dtype=np.int64)))

    def subs(self, n: int) -> np.ndarray:
        return np.asarray(self.v_vec(np.arange(1, n + 1, dtype=np.int64)))

    def gamma_pm_arrays(self, n: int):
        """(gamma+_1..gamma+_n, gamma-_1..gamma-_n)."""
        dt = np.float64 if self.is_real else np.complex128
        gp = np.empty(n, dtype=dt)
        gm = np.empty(n, dtype=dt)
        gp[0] = gm[0] = 1.0
        if n > 1:
            w = self.supers(n - 1)
            v = self.subs(n - 1)
            for k in range(1, n):
                gp[k] = w[k - 1] / gm[k - 1]
                gm[k] = v[k - 1] / gp[k - 1]
        return gp, gm

    def pi_array(self, n: int) -> np.ndarray:
        """pi_k = gamma+_k gamma-_k, satisfying pi_1 = 1 and
        pi_{k+1} = w_k v_k / pi_k."""
        gp, gm = self.gamma_pm_arrays(n)
        return gp * gm


# ---------------------------------------------------------------------------
# gamma accessors


class GammaSequence:
    """Accessor for the auxiliary sequence with gamma_1 = 1 and
    gamma_k gamma_{k+1} = w_k.

    Odd and even subsequences are cumulative products of weight ratios;
    values are cached on the descriptor.
    """

    def __init__(self, desc: JacobiDescriptor):
        self._desc = desc

    def __call__(self, k: int):
        if k < 1:
            raise ValueError("gamma index must be >= 1")
        v = self._desc.gamma_array(k)[k - 1]
        return float(v) if self._desc.is_real else complex(v)

    def array(self, n: int) -> np.ndarray:
        return self._desc.gamma_array(n)


def gamma(desc: JacobiDescriptor, k: int):
    """gamma_k of the descriptor (gamma_1 = 1, gamma_k gamma_{k+1} = w_k)."""
    return GammaSequence(desc)(k)


# ---------------------------------------------------------------------------
# diagonal scans


def _pole_scan(desc, z, n=_PROBE):
    """Index of a diagonal entry within 1e-12 (1+|lambda_k|) of z, or None."""
    lam = desc.diag(n)
    zz = complex(z)
    d = np.abs(lam - zz)
    tol = _MATCH_SCALE * (1.0 + np.abs(lam))
    hits = np.nonzero(d <= tol)[0]
    if hits.size:
        return int(hits[0]) + 1
    return None


def _matched_indices(desc, z):
    """All 1-based indices with lambda_k equal to z within
    1e-12 (1+|z|); the probe window grows to four times the largest
    matched index so no later exact match is missed."""
    zz = complex(z)
    mtol = _MATCH_SCALE * (1.0 + abs(zz))
    n = _PROBE
    while True:
        lam = desc.diag(n)
        hits = np.nonzero(np.abs(lam - zz) <= mtol)[0] + 1
        if hits.size == 0 or 4 * int(hits[-1]) <= n:
            return tuple(int(h) for h in hits)
        if n >= _PROBE_CAP:
            raise AccumulationPoint(
                "diagonal entries matching z keep appearing; z sits at an "
                "accumulation point of the diagonal")
        n = min(_PROBE_CAP, 4 * int(hits[-1]))


def _guard_degree(desc):
    if desc.products_degree is not None and desc.products_degree <= 1.2:
        raise NoTailBound(
            "products decay like k^-%.2f; no honest tail certificate at "
            "this rate" % desc.products_degree)


# ---------------------------------------------------------------------------
# convergence certificate


def check_convergence(desc: JacobiDescriptor, z0, tol: float = 1e-9):
    """Certified partial sum of sum_k |p_k(z0)|.

    Returns ``(sum, TailBound)`` where the true sum lies within
    ``[sum, sum + residual]``.  ``tol`` is the pole-proximity tolerance:
    z0 closer than tol to a diagonal entry (or to an accumulation point
    of the diagonal) raises InvalidZ0.  Raises Diverges when the products
    provably or manifestly fail to be summable.
    """
    zz = complex(z0)
    lam = desc.diag(_PROBE)
    d = np.abs(lam - zz)
    k = int(np.argmin(d))
    if d[k] <= tol:
        raise InvalidZ0(
            f"z0 is within {tol:g} of the diagonal entry at index {k + 1}")
    for acc in desc.der_lambda:
        if abs(zz - complex(acc)) <= tol:
            raise InvalidZ0(
                f"z0 is within {tol:g} of the accumulation point {acc!r}")
    if desc.products_degree is not None and desc.products_degree <= 1.0:
        raise Diverges(
            "products decay like k^-%.2f, so their absolute sum diverges"
            % desc.products_degree)
    sspec = desc.spec_at(zz)
    bound_fn, lo = _abs_tail_bound(desc, sspec)

    probe_hi = max(lo, 1024)
    partial = float(np.sum(np.abs(sspec.products(1, probe_hi))))
    target = max(1e-9, 1e-3 * (1.0 + partial))
    n = probe_hi + 1
    resid = bound_fn(n)
    cap = 1 << 20
    while resid > target and n < cap:
        n = min(cap, 2 * n)
        resid = bound_fn(n)
    if n > probe_hi + 1:
        partial += float(np.sum(np.abs(sspec.products(probe_hi + 1, n - 1))))
    return partial, TailBound(index=n, residual=float(resid),
                              method="abs-sum")


def _abs_tail_bound(desc, sspec):
    """(bound(n), first valid n) for the absolute tail sum_{k>=n} |p_k|."""
    model = sspec.tail_model
    if model is not None:
        lo = max(1, model.min_index)
        if math.isfinite(model.abs_bound(lo)):
            return model.abs_bound, lo
    if sspec.tail_sum_bound is not None:
        return sspec.tail_sum_bound, 1
    # probe: decide between geometric decay, power decay and divergence
    p = np.abs(sspec.products(32, 4096))
    ks = np.arange(32, 4097, dtype=np.float64)
    good = p > 0.0
    if int(good.sum()) < 64:
        raise NoTailBound("too few nonzero products to certify a tail")
    logs = np.log(p[good])
    if float(np.mean(logs[-32:])) >= float(np.mean(logs[:32])) - 0.1:
        raise Diverges("probed products do not decay")
    logk = np.log(ks[good])
    sl, ic = np.polyfit(logk, logs, 1)
    rms = float(np.sqrt(np.mean((logs - (sl * logk + ic)) ** 2)))
    if -sl < 1.02 and rms < 0.5:
        raise Diverges(
            "probed products decay like k^%.2f, too slowly for an "
            "absolutely convergent sum" % sl)
    return _fit_tail_bound(sspec, 1), 1


# ---------------------------------------------------------------------------
# characteristic function


def charfn(desc: JacobiDescriptor, z, tol: float = 1e-10):
    """Characteristic function F(z) with a certified truncation bound.

    Returns ``(value, TailBound)``.  Raises PoleAt when z coincides with a
    diagonal entry (within 1e-12 relative), NoTailBound when no honest
    certificate is available, AccumulationPoint when z lies in the
    derived set of the diagonal.
    """
    _guard_degree(desc)
    k = _pole_scan(desc, z)
    if k is not None:
        raise PoleAt(f"z equals the diagonal entry at index {k}", index=k)
    sspec = desc.spec_at(z)
    return f_tail(sspec, 1, tol)


def _pole_extracted(desc, u, matched, tol):
    """Value of F(u) times prod_{j in matched} (lambda_j - u).

    The head block up to M = max(matched) is propagated by the ratio
    recurrence R_n = a_n R_{n-1} - b_n R_{n-2} with the matched factors
    divided out, which stays finite when u sits exactly on matched
    diagonal entries; the tail beyond M comes from one certified sweep.
    Returns (value, TailBound).
    """
    M = matched[-1]
    sspec = desc.spec_at(u)
    f1, f2, tb = f_tail_pair(sspec, M + 1, tol)
    lam = desc.diag(M + 1)
    w = desc.weights(M)
    real_here = sspec.is_real
    dt = np.float64 if real_here else np.complex128
    uu = u.real if (real_here and isinstance(u, complex)) else u
    in_s = np.zeros(M + 1, dtype=bool)
    for j in matched:
        in_s[j] = True
    shift = (lam[:M] - uu).astype(dt)
    c = np.where(in_s[1:M + 1], np.asarray(1.0, dtype=dt), shift)
    a = np.where(in_s[1:M + 1], shift, np.asarray(1.0, dtype=dt))
    b = np.zeros(M, dtype=dt)
    if M > 1:
        b[1:] = (w[:M - 1].astype(dt) ** 2) / (c[:-1] * c[1:])
    a = np.ascontiguousarray(a, dtype=dt)
    b = np.ascontiguousarray(b, dtype=dt)
    if real_here:
        r_prev, r_curr = three_term_forward(a, b, 0.0, 1.0)
    else:
        r_prev, r_curr = three_term_forward(a, b, 0.0 + 0j, 1.0 + 0j)
    coef2 = r_prev * (w[M - 1] ** 2 / (lam[M] - uu))
    value = r_curr * f1 - coef2 * f2
    resid = (abs(r_curr) + abs(coef2)) * tb.residual
    return value, TailBound(index=tb.index, residual=resid, method=tb.method)


def charfn_regularized(desc: JacobiDescriptor, z, tol: float = 1e-10):
    """F(z) with the poles at matched diagonal entries divided out.

    Returns the scalar value of prod_{j} (z - lambda_j) F(z) taken over
    all indices j with lambda_j = z to within 1e-12 (1+|z|); for z away
    from the diagonal this is just F(z).  Requires z outside the derived
    set of the diagonal (AccumulationPoint otherwise).
    """
    zz = complex(z)
    for acc in desc.der_lambda:
        if abs(zz - complex(acc)) <= _MATCH_SCALE * (1.0 + abs(acc)):
            raise AccumulationPoint(
                "z lies at an accumulation point of the diagonal; the "
                "regularized characteristic function is undefined there")
    _guard_degree(desc)
    matched = _matched_indices(desc, z)
    if not matched:
        sspec = desc.spec_at(z)
        value, _ = f_tail(sspec, 1, tol)
        return value
    value, _ = _pole_extracted(desc, z, matched, tol)
    sign = -1.0 if (len(matched) % 2) else 1.0
    return sign * value


class _WindowEvaluator:
    """Regularized characteristic function over a fixed real window.

    All diagonal entries inside [lo, hi] are divided out with a fixed
    sign convention prod (u - lambda_j), so the returned callable is
    analytic on the window, real for real descriptors, and vanishes
    exactly on the spectrum inside the window.
    """

    def __init__(self, desc, lo, hi, tol, matched):
        self.desc = desc
        self.lo = lo
        self.hi = hi
        self.tol = tol
        self.matched = matched
        self.sign = -1.0 if (len(matched) % 2) else 1.0

    def __call__(self, u):
        return self.eval_with_residual(u)[0]

    def eval_with_residual(self, u):
        if not self.matched:
            sspec = self.desc.spec_at(u)
            value, tb = f_tail(sspec, 1, self.tol)
            return value, tb.residual
        value, tb = _pole_extracted(self.desc, u, self.matched, self.tol)
        return self.sign * value, tb.residual


def window_evaluator(desc: JacobiDescriptor, lo: float, hi: float,
                     tol: float = 1e-10):
    """Build the pole-extracted evaluator used by the real zero search.

    Probes the diagonal until every entry in [lo, hi] has been seen
    (doubling the probe depth while in-window entries keep appearing in
    its upper half); raises WindowTouchesAccumulation when the window
    meets the derived set of the diagonal.
    """
    from .errors import WindowTouchesAccumulation

    if not (lo < hi):
        raise ValueError("window must satisfy lo < hi")
    for acc in desc.der_lambda:
        da = complex(acc)
        if da.imag == 0.0 and lo <= da.real <= hi:
            raise WindowTouchesAccumulation(
                f"window [{lo}, {hi}] contains the accumulation point "
                f"{da.real!r} of the diagonal")
    _guard_degree(desc)
    n = _PROBE
    while True:
        lam = desc.diag(n)
        if not desc.is_real:
            inside = (np.abs(lam.imag) == 0.0) & (lam.real >= lo) & \
                (lam.real <= hi)
        else:
            inside = (lam >= lo) & (lam <= hi)
        hits = np.nonzero(inside)[0] + 1
        if hits.size == 0 or 2 * int(hits[-1]) <= n:
            break
        if n >= _PROBE_CAP:
            raise WindowTouchesAccumulation(
                "diagonal entries keep entering the window at every probe "
                "depth; the window touches an accumulation point")
        n = min(_PROBE_CAP, 4 * n)
    matched = tuple(int(h) for h in hits)
    return _WindowEvaluator(desc, float(lo), float(hi), tol, matched)


# ---------------------------------------------------------------------------
# finite determinant identity


def det_truncation_identity(desc, n: int, z):
    """(lhs, rhs) of the order-n truncated determinant identity.

    lhs is det(J_n - z) from dense LU; rhs is
    prod_k (lambda_k - z) times the finite functional of
    x_k = pi_k / (lambda_k - z), with pi_k = gamma_k^2 for symmetric
    descriptors and pi_k = gamma+_k gamma-_k in general.  Requires z off
    the first n diagonal entries.
    """
    from .ffun import f_finite

    if n < 1:
        raise ValueError("truncation order must be >= 1")
    general = isinstance(desc, GeneralJacobiDescriptor)
    lam = np.asarray(desc.diag(n))
    if general:
        sup = np.asarray(desc.supers(n - 1)) if n > 1 else np.empty(0)
        sub = np.asarray(desc.subs(n - 1)) if n > 1 else np.empty(0)
        pi = desc.pi_array(n)
    else:
        sup = np.asarray(desc.weights(n - 1)) if n > 1 else np.empty(0)
        sub = sup
        g = desc.gamma_array(n)
        pi = g * g
    shift = lam - z
    bad = np.nonzero(np.abs(shift) == 0.0)[0]
    if bad.size:
        raise PoleAt(
            f"z equals the diagonal entry at index {int(bad[0]) + 1}",
            index=int(bad[0]) + 1)
    cdt = np.complex128 if (np.iscomplexobj(shift) or np.iscomplexobj(sup)
                            or isinstance(z, complex)) else np.float64
    A = np.zeros((n, n), dtype=cdt)
    np.fill_diagonal(A, shift)
    if n > 1:
        A[np.arange(n - 1), np.arange(1, n)] = sup
        A[np.arange(1, n), np.arange(n - 1)] = sub
    lhs = np.linalg.det(A)
    x = pi / shift
    rhs = np.prod(shift) * f_finite(x)
    return complex(lhs), complex(rhs)


# ---------------------------------------------------------------------------
# built-in families


def _as_float(name, v):
    try:
        out = float(v)
    except (TypeError, ValueError):
        raise BadParams(f"parameter {name!r} must be a real number") from None
    if not math.isfinite(out):
        raise BadParams(f"parameter {name!r} must be finite")
    return out


def linear_diag(alpha, w) -> JacobiDescriptor:
    """lambda_k = alpha k with constant weight w.

    The products telescope exactly, giving a certified order-4 tail
    expansion at every z off the diagonal.
    """
    al = _as_float("alpha", alpha)
    ww = _as_float("w", w)
    if al == 0.0:
        raise BadParams("alpha must be nonzero (the diagonal must move)")
    if ww <= 0.0:
        raise BadParams("w must be positive")

    def lv(ks):
        return al * ks

    def wv(ks):
        return np.full(ks.shape, ww)

    def factory(z):
        return telescoping_tail_model(z / al, (ww / al) ** 2)

    return JacobiDescriptor(
        lam_vec=lv, w_vec=wv, der_lambda=(), is_real=True,
        family="linear_diag", params={"alpha": al, "w": ww},
        tail_model_factory=factory)


def harmonic(beta) -> JacobiDescriptor:
    """lambda_k = 1/k with w_k = beta / sqrt(k (k+1)).

    Products reduce exactly to the telescoping shape with a = 1/z and
    c = beta^2/z^2; the diagonal accumulates at 0.
    """
    be = _as_float("beta", beta)
    if be <= 0.0:
        raise BadParams("beta must be positive")

    def lv(ks):
        return 1.0 / ks

    def wv(ks):
        return be / np.sqrt(ks * (ks + 1.0))

    def factory(z):
        return telescoping_tail_model(1.0 / z, be * be / (z * z))

    return JacobiDescriptor(
        lam_vec=lv, w_vec=wv, der_lambda=(0.0,), is_real=True,
        family="harmonic", params={"beta": be},
        tail_model_factory=factory)


def qgeom(q, beta) -> JacobiDescriptor:
    """lambda_k = q^(k-1) with w_k = beta q^((k-1)/2), 0 < q < 1.

    The signed tail sums have the closed form
    sigma_m = -beta^2 q^(m-1) / ((1-q) z (q^(m-1) - z)), giving an
    order-2 corrected-seed model valid once q^(m-1) <= |z|/2.
    """
    qq = _as_float("q", q)
    be = _as_float("beta", beta)
    if not (0.0 < qq < 1.0):
        raise BadParams("q must lie strictly between 0 and 1")
    if be <= 0.0:
        raise BadParams("beta must be positive")

    def lv(ks):
        return np.power(qq, ks - 1.0)

    def wv(ks):
        return be * np.power(qq, (ks - 1.0) / 2.0)

    def factory(z, _q=qq, _b=be):
        az = abs(z)
        c = _b * _b
        if az * 0.5 >= 1.0:
            m0 = 1
        else:
            m0 = 1 + int(math.ceil(math.log(az * 0.5) / math.log(_q)))

        def sigma(m):
            qm = _q ** (m - 1)
            return -c * qm / ((1.0 - _q) * z * (qm - z))

        def abs_bound(m):
            qm = _q ** (m - 1)
            gap = az - qm
            if gap <= 0.0:
                return math.inf
            return c * qm / ((1.0 - _q) * gap * gap)

        return TailModel(sigma=sigma, abs_bound=abs_bound,
                         min_index=m0, order=2)

    return JacobiDescriptor(
        lam_vec=lv, w_vec=wv, der_lambda=(0.0,), is_real=True,
        family="qgeom", params={"q": qq, "beta": be},
        tail_model_factory=factory)


def zero_diag_harm(alpha) -> JacobiDescriptor:
    """Zero diagonal with w_k = ((k+alpha)(k+alpha+1))^(-1/2), alpha > -1."""
    al = _as_float("alpha", alpha)
    if al <= -1.0:
        raise BadParams("alpha must exceed -1 so every weight is defined")

    def lv(ks):
        return np.zeros(ks.shape)

    def wv(ks):
        return 1.0 / np.sqrt((ks + al) * (ks + al + 1.0))

    def factory(z):
        return telescoping_tail_model(-al, 1.0 / (z * z))

    return JacobiDescriptor(
        lam_vec=lv, w_vec=wv, der_lambda=(0.0,), is_real=True,
        family="zero_diag_harm", params={"alpha": al},
        tail_model_factory=factory)


def zero_diag_q(q) -> JacobiDescriptor:
    """Zero diagonal with w_k = q^(k-1), 0 < q < 1 (geometric tail)."""
    qq = _as_float("q", q)
    if not (0.0 < qq < 1.0):
        raise BadParams("q must lie strictly between 0 and 1")

    def lv(ks):
        return np.zeros(ks.shape)

    def wv(ks):
        return np.power(qq, ks - 1.0)

    def factory(z):
        return geometric_tail_model(1.0 / (z * z), qq * qq)

    return JacobiDescriptor(
        lam_vec=lv, w_vec=wv, der_lambda=(0.0,), is_real=True,
        family="zero_diag_q", params={"q": qq},
        tail_model_factory=factory)


def _poly_coeffs(name, coeffs):
    try:
        arr = [float(c) for c in coeffs]
    except (TypeError, ValueError):
        raise BadParams(
            f"{name} must be a list of real coefficients") from None
    if not arr or not any(c != 0.0 for c in arr):
        raise BadParams(f"{name} must be a nonzero polynomial")
    while len(arr) > 1 and arr[-1] == 0.0:
        arr.pop()
    return arr


def custom_rational(lam_num, lam_den, w_num, w_den,
                    der_lambda=None) -> JacobiDescriptor:
    """Entries given by rational functions of the index.

    Coefficient lists are ascending in k.  The decay degree of the
    products is read off the polynomial degrees; a certified power-law
    tail envelope is fitted per spectral parameter when the degree
    exceeds 1.2, otherwise certificates are refused (NoTailBound) or the
    sum is declared divergent (degree <= 1).
    """
    ln = _poly_coeffs("lam_num", lam_num)
    ld = _poly_coeffs("lam_den", lam_den)
    wn = _poly_coeffs("w_num", w_num)
    wd = _poly_coeffs("w_den", w_den)
    dl = (len(ln) - 1) - (len(ld) - 1)
    dw = (len(wn) - 1) - (len(wd) - 1)
    degree = float(2 * max(dl, 0) - 2 * dw)

    def lv(ks):
        kk = ks.astype(np.float64)
        return npoly.polyval(kk, ln) / npoly.polyval(kk, ld)

    def wv(ks):
        kk = ks.astype(np.float64)
        return npoly.polyval(kk, wn) / npoly.polyval(kk, wd)

    probe = np.arange(1, 257, dtype=np.int64)
    with np.errstate(divide="ignore", invalid="ignore"):
        lam_p = lv(probe)
        w_p = wv(probe)
    if not (np.all(np.isfinite(lam_p)) and np.all(np.isfinite(w_p))):
        raise BadParams("a denominator vanishes at a positive integer index")
    if np.any(w_p == 0.0):
        raise BadParams("weights must be nonzero at every index")

    if der_lambda is not None:
        der = tuple(float(d) for d in der_lambda)
    elif dl > 0:
        der = ()
    elif dl == 0:
        der = (ln[-1] / ld[-1],)
    else:
        der = (0.0,)

    desc = JacobiDescriptor(
        lam_vec=lv, w_vec=wv, der_lambda=der, is_real=True,
        family="custom_rational",
        params={"lam_num": ln, "lam_den": ld, "w_num": wn, "w_den": wd},
        products_degree=degree)
    if degree > 1.2:
        desc.tail_sum_bound_factory = _rational_envelope_factory(desc, degree)
    return desc


def _rational_envelope_factory(desc, degree):
    """Per-z power-law envelope C k^(-degree) over a probe window,
    inflated by 2x, turned into an integral tail bound."""

    def factory(z, _d=degree):
        k0, k1 = 64, 256
        p_probe = np.abs(desc.products(z, k0, k1))
        ks = np.arange(k0, k1 + 1, dtype=np.float64)
        C = 2.0 * float(np.max(p_probe * ks ** _d))
        prefix = np.abs(desc.products(z, 1, k0 - 1))
        csum = np.concatenate([np.cumsum(prefix[::-1])[::-1], [0.0]])
        tail_k0 = C * (k0 - 1.0) ** (1.0 - _d) / (_d - 1.0)

        def bound(n):
            if n >= k0:
                return C * (n - 1.0) ** (1.0 - _d) / (_d - 1.0)
            return float(csum[n - 1]) + tail_k0

        return bound

    return factory


_FAMILY_BUILDERS = {
    "linear_diag": lambda p: linear_diag(p["alpha"], p["w"]),
    "harmonic": lambda p: harmonic(p["beta"]),
    "qgeom": lambda p: qgeom(p["q"], p["beta"]),
    "zero_diag_harm": lambda p: zero_diag_harm(p["alpha"]),
    "zero_diag_q": lambda p: zero_diag_q(p["q"]),
    "custom_rational": lambda p: custom_rational(
        p["lam_num"], p["lam_den"], p["w_num"], p["w_den"],
        der_lambda=p.get("der_lambda")),
}


def descriptor_to_json(desc: JacobiDescriptor, indent=None) -> str:
    """Serialize a built-in-family descriptor; floats keep full
    (17 significant digit) round-trip precision."""
    if desc.family not in _FAMILY_BUILDERS:
        raise BadParams(
            f"descriptor family {desc.family!r} has no JSON form")
    obj = {
        "family": desc.family,
        "params": desc.params,
        "der_lambda": [float(d) for d in desc.der_lambda],
    }
    return json.dumps(obj, indent=indent)


def descriptor_from_json(text: str) -> JacobiDescriptor:
    """Rebuild a descriptor from its JSON form (see descriptor_to_json)."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadParams(f"malformed descriptor JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise BadParams("descriptor JSON must be an object")
    fam = obj.get("family")
    if fam not in _FAMILY_BUILDERS:
        raise BadParams(f"unknown descriptor family {fam!r}")
    params = obj.get("params")
    if not isinstance(params, dict):
        raise BadParams("descriptor JSON is missing its params object")
    if fam == "custom_rational" and "der_lambda" in obj and \
            "der_lambda" not in params:
        params = dict(params)
        params["der_lambda"] = obj["der_lambda"]
    try:
        return _FAMILY_BUILDERS[fam](params)
    except KeyError as exc:
        raise BadParams(f"missing parameter {exc.args[0]!r} for family "
                        f"{fam!r}") from None
