"""Evaluation of the alternating product-series functional.

For a finite sequence ``x_a, ..., x_b`` the functional is

    F(x) = 1 + sum_{m>=1} (-1)^m  sum_{k}  prod_{j=1}^m  x_{k_j} x_{k_j + 1}

where the inner sum runs over index tuples ``a <= k_1, k_j + 2 <= k_{j+1},
k_m < b`` (each chosen pair of consecutive entries, no two pairs touching).
Empty and single-element sequences give 1.  The value depends on the inputs
only through the consecutive products ``p_k = x_k x_{k+1}``, and satisfies
the three-term recurrence

    F(x_a..x_b) = F(x_{a+1}..x_b) - p_a F(x_{a+2}..x_b)

which is what every evaluator here actually runs (backwards, since that
direction is the stable one for the sequences we care about).

For infinite sequences with ``sum |p_k| < infty`` the same recurrence is
started from analytically corrected seeds: the tail functional expands as
``1 - sigma + tau - upsilon + O(S^4)`` in the weighted tail sums of the
products, so when a :class:`~charspec.sequences.TailModel` supplies those
sums in closed form the recurrence can be seeded at a modest depth N with a
certified seed error, which then propagates through the sweep with factor
``prod (1 + |p_k|)`` (note: NOT ``exp(sum |p_k|)`` of the raw bound, which
is astronomically worse for sequences with a few large products).

Without a tail model, a supplied bound ``T(n) >= sum_{k>=n} |p_k|`` is used
with the cruder guarantee

    |F(x) - F(x_a..x_N)| <= 2 exp(2 T(a)) T(N)

and as a last resort a geometric decay envelope is fitted to probed
products.  Every truncated result carries a :class:`TailBound` certificate.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from . import _kernels
from .errors import NoTailBound, TolUnreachable
from .sequences import SequenceSpec, TailBound

_EPS = float(np.finfo(np.float64).eps)
_CHUNK = 1 << 22
_N_CAP = 1 << 26
_ARRAY_CAP = 1 << 24


def _coerce_products(p, is_real):
    if is_real:
        if np.iscomplexobj(p):
            p = p.real
        return np.ascontiguousarray(p, dtype=np.float64)
    return np.ascontiguousarray(p, dtype=np.complex128)


def _sweep_range(spec, a, b, seed1, seed2, is_real, compensated):
    """Backward sweep over product indices [a, b], chunked from the top."""
    f1, f2 = (complex(seed1), complex(seed2)) if (compensated or not is_real) \
        else (float(np.real(seed1)), float(np.real(seed2)))
    maxabs = max(abs(f1), abs(f2))
    slog = 0.0
    hi = b
    while hi >= a:
        lo = max(a, hi - _CHUNK + 1)
        p = spec.products(lo, hi)
        slog += float(np.sum(np.log1p(np.abs(p))))
        if compensated:
            pc = np.ascontiguousarray(p, dtype=np.complex128)
            f1, f2, m = _kernels.compensated_backward_sweep(pc, f1, f2)
        else:
            pp = _coerce_products(p, is_real)
            f1, f2, m = _kernels.backward_sweep(pp, f1, f2)
        if m > maxabs:
            maxabs = m
        hi = lo - 1
    return f1, f2, maxabs, slog


def _eval_range(spec, a, b, seed1, seed2):
    """Evaluate the recurrence over [a, b]; retries compensated on blowup.

    Returns (F_a, F_{a+1}, maxabs, sum of log1p|p_k|).
    """
    is_real = spec.is_real and abs(complex(seed1).imag) == 0.0 \
        and abs(complex(seed2).imag) == 0.0
    f1, f2, maxabs, slog = _sweep_range(spec, a, b, seed1, seed2,
                                        is_real, False)
    if maxabs > _kernels.COMPENSATE_THRESHOLD:
        f1, f2, maxabs, slog = _sweep_range(spec, a, b, seed1, seed2,
                                            is_real, True)
        if is_real:
            f1, f2 = f1.real, f2.real
    return f1, f2, maxabs, slog


def _round_allowance(maxabs, nsteps):
    return 8.0 * _EPS * maxabs * math.sqrt(nsteps + 4.0)


def _safe_exp(x):
    if x > 700.0:
        return math.inf
    return math.exp(x)


# ---------------------------------------------------------------------------
# finite sequences


def f_finite(x):
    """Functional of an explicit finite sequence (any iterable of scalars).

    Returns a float when the input is real, complex otherwise.
    """
    xs = np.asarray(list(x))
    if xs.size <= 1:
        return 1.0
    p = xs[:-1] * xs[1:]
    return f_finite_products(p)


def f_finite_products(p):
    """Functional from the consecutive products ``p_k`` directly.

    ``len(p) + 1`` is the underlying sequence length; an empty ``p`` gives 1.
    """
    p = np.asarray(p)
    if p.size == 0:
        return 1.0
    is_real = not np.iscomplexobj(p)
    pp = _coerce_products(p, is_real)
    if is_real:
        f1, f2, maxabs = _kernels.backward_sweep(pp, 1.0, 1.0)
    else:
        f1, f2, maxabs = _kernels.backward_sweep(pp, 1.0 + 0j, 1.0 + 0j)
    if maxabs > _kernels.COMPENSATE_THRESHOLD:
        f1, _, _ = _kernels.compensated_backward_sweep(
            np.ascontiguousarray(pp, dtype=np.complex128), 1.0 + 0j, 1.0 + 0j)
        if is_real:
            f1 = f1.real
    return f1


def split_identity_check(x, n: int):
    """Both sides of the splitting identity at position ``n`` (1-based).

    For x = (x_1..x_L) and 1 <= n < L:

        F(x) = F(x_1..x_n) F(x_{n+1}..x_L)
               - x_n x_{n+1} F(x_1..x_{n-1}) F(x_{n+2}..x_L)

    Returns (lhs, rhs); callers assert closeness.
    """
    xs = list(x)
    L = len(xs)
    if not 1 <= n < L:
        raise ValueError("split position must satisfy 1 <= n < len(x)")
    lhs = f_finite(xs)
    rhs = (f_finite(xs[:n]) * f_finite(xs[n:])
           - xs[n - 1] * xs[n] * f_finite(xs[:n - 1]) * f_finite(xs[n + 1:]))
    return lhs, rhs


def f_det_oracle(x):
    """Independent route: F equals the determinant of a unit-diagonal
    tridiagonal matrix with superdiagonal x_1..x_{n-1} and subdiagonal
    x_2..x_n.  Dense LU via numpy; O(n^3), for cross-checking only.
    """
    xs = np.asarray(list(x))
    n = xs.size
    if n <= 1:
        return 1.0
    dt = np.complex128 if np.iscomplexobj(xs) else np.float64
    a = np.eye(n, dtype=dt)
    idx = np.arange(n - 1)
    a[idx, idx + 1] = xs[:-1]
    a[idx + 1, idx] = xs[1:]
    return np.linalg.det(a)


# ---------------------------------------------------------------------------
# truncation planning for one-sided infinite sequences


@dataclass
class _Plan:
    n_trunc: int          # last product index entering the sweep
    seed1: complex
    seed2: complex
    fixed_resid: float    # analytic residual independent of the sweep (plain)
    seed_resid: float     # per-seed error, to be multiplied by prod(1+|p|)
    method: str


def _invert_monotone(fn, target, lo, cap, what):
    """Smallest integer n >= lo with fn(n) <= target (fn nonincreasing)."""
    if lo > cap:
        raise TolUnreachable(
            f"{what}: starting index {lo} already exceeds the evaluation "
            f"cap {cap}")
    if fn(lo) <= target:
        return lo
    hi = max(lo, 1)
    while fn(hi) > target:
        if hi >= cap:
            raise TolUnreachable(
                f"{what}: bound still {fn(hi):.3e} > {target:.3e} "
                f"at index {hi}")
        hi = min(cap, hi * 2)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if fn(mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi


def _slog_upper_bound(spec, start, model):
    """Rigorous upper bound on sum of log1p|p_k| over k >= start."""
    probe_hi = max(model.min_index, start) + 4096
    p = np.abs(spec.products(start, probe_hi))
    s = float(np.sum(np.log1p(p)))
    # log1p(x) <= x handles everything past the probe
    return s + model.abs_bound(probe_hi + 1)


def _plan_refined(spec, start, tol):
    model = spec.tail_model
    slog_cap = _slog_upper_bound(spec, start, model)
    prop = _safe_exp(slog_cap)
    if not math.isfinite(prop):
        raise TolUnreachable(
            "propagation factor overflows; products too large for the "
            "corrected-seed route")
    target = 0.45 * tol / prop

    def rem_at(n):
        return model.remainder(n + 1)

    lo = max(start, model.min_index)
    n_trunc = _invert_monotone(rem_at, target, lo, _N_CAP,
                               "corrected-seed truncation")
    return _Plan(n_trunc=n_trunc,
                 seed1=model.seed(n_trunc + 1),
                 seed2=model.seed(n_trunc + 2),
                 fixed_resid=0.0,
                 seed_resid=model.remainder(n_trunc + 1),
                 method="tail-model")


def _plan_plain(spec, start, tol, bound_fn, method):
    t0 = bound_fn(start)
    if not math.isfinite(t0):
        raise NoTailBound("tail sum bound is infinite at the start index")
    factor = 2.0 * _safe_exp(2.0 * t0)
    if not math.isfinite(factor):
        raise TolUnreachable(
            "worst-case truncation factor overflows (sum of |p_k| too "
            "large for the plain route)")
    target = 0.8 * tol / factor
    n_trunc = _invert_monotone(bound_fn, target, start + 1, _N_CAP,
                               "plain truncation")
    return _Plan(n_trunc=n_trunc - 1,   # products p_start .. p_{N-1}
                 seed1=1.0, seed2=1.0,
                 fixed_resid=factor * bound_fn(n_trunc),
                 seed_resid=0.0,
                 method=method)


def _fit_tail_bound(spec, start):
    """Fit |p_k| ~ C rho^k on a probe window; returns a bound callable.

    The fitted envelope is inflated by 2x.  Raises NoTailBound when the
    probe does not look convincingly geometric.
    """
    n0 = max(start, 32)
    n1 = 4 * n0
    p = np.abs(np.asarray(spec.products(n0, n1), dtype=np.complex128))
    ks = np.arange(n0, n1 + 1, dtype=np.float64)
    good = p > 0.0
    if int(good.sum()) < 12:
        raise NoTailBound("probe window has too few nonzero products to fit")
    logs = np.log(p[good])
    kk = ks[good]
    # Two-slope curvature probe.  Polynomial decay (p_k ~ c/k^s) looks
    # deceptively linear in log over a finite window, but its decay rate
    # keeps weakening, so any geometric envelope fitted here would
    # silently undercount the tail.  Refuse instead of lying.
    mid = kk.size // 2
    early = float(np.polyfit(kk[:mid], logs[:mid], 1)[0])
    late = float(np.polyfit(kk[mid:], logs[mid:], 1)[0])
    if late > early + 1e-3:
        raise NoTailBound(
            "products do not decay geometrically on the probe window "
            f"(rate weakens from {-early:.3g} to {-late:.3g} per step)")
    slope, intercept = np.polyfit(kk, logs, 1)
    resid = logs - (slope * kk + intercept)
    rms = float(np.sqrt(np.mean(resid**2)))
    # envelope rate from the late half (the weakest observed decay) and
    # amplitude lifted until the envelope dominates every probed product
    rho = math.exp(late)
    if rho >= 0.995 or rms > 0.7:
        raise NoTailBound(
            f"geometric decay fit failed (ratio {rho:.4f}, rms {rms:.2f})")
    c2 = 2.0 * math.exp(float(np.max(logs - kk * late)))
    prefix = np.abs(spec.products(start, n0 - 1)) if n0 > start else \
        np.empty(0)
    csum = np.cumsum(prefix[::-1])[::-1] if prefix.size else prefix
    geom_at_n0 = c2 * rho**n0 / (1.0 - rho)

    def bound(n):
        if n >= n0:
            return c2 * rho**n / (1.0 - rho)
        return float(csum[n - start]) + geom_at_n0

    return bound


def _make_plan(spec, start, tol):
    if spec.tail_model is not None and math.isfinite(
            spec.tail_model.abs_bound(max(start, spec.tail_model.min_index))):
        return _plan_refined(spec, start, tol)
    if spec.tail_sum_bound is not None:
        return _plan_plain(spec, start, tol, spec.tail_sum_bound, "plain")
    return _plan_plain(spec, start, tol, _fit_tail_bound(spec, start), "fit")


def _finish_bound(plan, maxabs, slog, nsteps, tol):
    analytic = plan.fixed_resid + plan.seed_resid * _safe_exp(slog)
    resid = analytic + _round_allowance(maxabs, nsteps)
    if not math.isfinite(resid) or resid > tol:
        raise TolUnreachable(
            f"achieved residual {resid:.3e} exceeds requested {tol:.3e}")
    return resid


# ---------------------------------------------------------------------------
# one-sided infinite evaluation


def f_tail(spec: SequenceSpec, start: Optional[int] = None,
           tol: float = 1e-10):
    """Functional of the tail ``x_start, x_{start+1}, ...``.

    Returns ``(value, TailBound)``; the certificate's residual is at most
    ``tol`` (otherwise TolUnreachable is raised).  For a finite-range spec
    this reduces to exact finite evaluation.
    """
    v1, _, tb = f_tail_pair(spec, start, tol)
    return v1, tb


def f_tail_pair(spec: SequenceSpec, start: Optional[int] = None,
                tol: float = 1e-10):
    """Like :func:`f_tail` but returns values at ``start`` and ``start+1``
    from the same sweep: ``(F_start, F_{start+1}, TailBound)``."""
    n1, n2 = spec.range
    if start is None:
        start = n1
    if n1 is not None and start < n1:
        raise ValueError("start precedes the first index of the sequence")
    if n2 is not None:
        if start > n2:
            one = 1.0 if spec.is_real else 1.0 + 0j
            return one, one, TailBound(index=n2, residual=0.0,
                                       method="finite")
        f1, f2, maxabs, _ = _eval_range(spec, start, n2 - 1, 1.0, 1.0)
        resid = _round_allowance(maxabs, n2 - start)
        return f1, f2, TailBound(index=n2, residual=resid, method="finite")
    plan = _make_plan(spec, start, tol)
    f1, f2, maxabs, slog = _eval_range(spec, start, plan.n_trunc,
                                       plan.seed1, plan.seed2)
    nsteps = plan.n_trunc - start + 1
    resid = _finish_bound(plan, maxabs, slog, nsteps, tol)
    return f1, f2, TailBound(index=plan.n_trunc, residual=resid,
                             method=plan.method)


def f_tail_array(spec: SequenceSpec, start: Optional[int] = None,
                 tol: float = 1e-10):
    """All tail values ``F_m`` for ``m = start .. N+2`` from one sweep.

    Returns ``(values, base_index, TailBound)`` with ``values[i]`` holding
    the functional of the tail beginning at ``base_index + i``.
    """
    n1, n2 = spec.range
    if start is None:
        start = n1
    if n1 is not None and start < n1:
        raise ValueError("start precedes the first index of the sequence")
    if n2 is not None:
        hi = n2 - 1
        seed1 = seed2 = 1.0
        fixed = 0.0
        seedr = 0.0
        method = "finite"
        n_top = n2
    else:
        plan = _make_plan(spec, start, tol)
        hi = plan.n_trunc
        seed1, seed2 = plan.seed1, plan.seed2
        fixed, seedr = plan.fixed_resid, plan.seed_resid
        method = plan.method
        n_top = plan.n_trunc
    count = hi - start + 1
    if count > _ARRAY_CAP:
        raise TolUnreachable(
            "tail array evaluation would need %d products" % count)
    if count < 0:
        count = 0
    p = spec.products(start, hi)
    is_real = spec.is_real and abs(complex(seed1).imag) == 0.0
    pp = _coerce_products(p, is_real)
    if is_real:
        vals = _kernels.backward_sweep_array(pp, float(np.real(seed1)),
                                             float(np.real(seed2)))
    else:
        vals = _kernels.backward_sweep_array(pp, complex(seed1),
                                             complex(seed2))
    maxabs = float(np.max(np.abs(vals))) if vals.size else 1.0
    if maxabs > _kernels.COMPENSATE_THRESHOLD:
        # rerun the scalar compensated sweep progressively; array route is
        # only used at moderate depths so a python-level redo is acceptable
        pc = np.ascontiguousarray(pp, dtype=np.complex128)
        out = np.empty(len(pc) + 2, dtype=np.complex128)
        out[-1] = complex(seed2)
        out[-2] = complex(seed1)
        for i in range(len(pc) - 1, -1, -1):
            v, _, _ = _kernels.compensated_backward_sweep(
                pc[i:i + 1], out[i + 1], out[i + 2])
            out[i] = v
        vals = out.real if is_real else out
    slog = float(np.sum(np.log1p(np.abs(pp))))
    if method == "finite":
        resid = _round_allowance(maxabs, count)
    else:
        analytic = fixed + seedr * _safe_exp(slog)
        resid = analytic + _round_allowance(maxabs, count)
        if not math.isfinite(resid) or resid > tol:
            raise TolUnreachable(
                f"achieved residual {resid:.3e} exceeds requested {tol:.3e}")
    return vals, start, TailBound(index=n_top, residual=resid, method=method)


# ---------------------------------------------------------------------------
# left-infinite evaluation


def _plan_left(spec, end, tol):
    model = spec.left_tail_model
    if model is not None and math.isfinite(
            model.abs_bound(min(end, model.max_index) - 1)):
        hi_anchor = min(end, model.max_index)
        probe_lo = hi_anchor - 4096
        p = np.abs(spec.products(probe_lo, end - 1))
        slog_cap = float(np.sum(np.log1p(p))) + model.abs_bound(probe_lo - 1)
        prop = _safe_exp(slog_cap)
        if not math.isfinite(prop):
            raise TolUnreachable("left propagation factor overflows")
        target = 0.45 * tol / prop

        def rem_at(depth):
            return model.remainder(hi_anchor - depth)

        depth = _invert_monotone(rem_at, target, 0, _N_CAP,
                                 "left corrected-seed truncation")
        anchor = hi_anchor - depth
        return anchor, model.seed(anchor - 1), model.seed(anchor - 2), \
            0.0, model.remainder(anchor - 1), "tail-model"
    if spec.left_tail_sum_bound is not None:
        t0 = spec.left_tail_sum_bound(end - 1)
        if not math.isfinite(t0):
            raise NoTailBound("left tail sum bound infinite at end index")
        factor = 2.0 * _safe_exp(2.0 * t0)
        if not math.isfinite(factor):
            raise TolUnreachable("left worst-case factor overflows")
        target = 0.8 * tol / factor

        def bound_at(depth):
            return spec.left_tail_sum_bound(end - 1 - depth)

        depth = _invert_monotone(bound_at, target, 1, _N_CAP,
                                 "left plain truncation")
        anchor = end - depth
        # finite block x_anchor..x_end: the value one index below the block
        # is the empty functional (1) and two below contributes nothing (0)
        return anchor, 1.0, 0.0, factor * bound_at(depth), 0.0, "plain"
    raise NoTailBound("no left tail information supplied")


def f_left_pair(spec: SequenceSpec, end: int = 0, tol: float = 1e-10):
    """Functional of the left-infinite stretch ending at ``end``.

    Returns ``(G_end, G_{end-1}, TailBound)`` where ``G_m`` is the
    functional of ``..., x_{m-1}, x_m``.
    """
    anchor, s_prev, s_prev2, fixed, seedr, method = _plan_left(spec, end, tol)
    # forward recurrence G_m = G_{m-1} - p_{m-1} G_{m-2}, m = anchor .. end
    q = spec.products(anchor - 1, end - 1)
    is_real = spec.is_real and abs(complex(s_prev).imag) == 0.0
    qq = _coerce_products(q, is_real)
    if is_real:
        g0, g1, maxabs = _kernels.forward_sweep(qq, float(np.real(s_prev2)),
                                                float(np.real(s_prev)))
    else:
        g0, g1, maxabs = _kernels.forward_sweep(qq, complex(s_prev2),
                                                complex(s_prev))
    slog = float(np.sum(np.log1p(np.abs(qq))))
    analytic = fixed + seedr * _safe_exp(slog)
    maxabs = max(maxabs, 1.0)
    resid = analytic + _round_allowance(maxabs, len(qq))
    if not math.isfinite(resid) or resid > tol:
        raise TolUnreachable(
            f"achieved residual {resid:.3e} exceeds requested {tol:.3e}")
    return g1, g0, TailBound(index=anchor, residual=resid, method=method)


def f_left_array(spec: SequenceSpec, end: int = 0, tol: float = 1e-10):
    """All left values ``G_m`` for ``m = anchor-2 .. end`` from one sweep.

    Returns ``(values, base_index, TailBound)``.
    """
    anchor, s_prev, s_prev2, fixed, seedr, method = _plan_left(spec, end, tol)
    q = spec.products(anchor - 1, end - 1)
    if len(q) > _ARRAY_CAP:
        raise TolUnreachable("left array evaluation too deep")
    is_real = spec.is_real and abs(complex(s_prev).imag) == 0.0
    qq = _coerce_products(q, is_real)
    if is_real:
        vals = _kernels.forward_sweep_array(qq, float(np.real(s_prev2)),
                                            float(np.real(s_prev)))
    else:
        vals = _kernels.forward_sweep_array(qq, complex(s_prev2),
                                            complex(s_prev))
    slog = float(np.sum(np.log1p(np.abs(qq))))
    maxabs = float(np.max(np.abs(vals))) if vals.size else 1.0
    analytic = fixed + seedr * _safe_exp(slog)
    resid = analytic + _round_allowance(maxabs, len(qq))
    if not math.isfinite(resid) or resid > tol:
        raise TolUnreachable(
            f"achieved residual {resid:.3e} exceeds requested {tol:.3e}")
    return vals, anchor - 2, TailBound(index=anchor, residual=resid,
                                       method=method)


# ---------------------------------------------------------------------------
# two-sided evaluation


def f_bilateral(spec: SequenceSpec, tol: float = 1e-10):
    """Functional of a two-sided sequence, split at index 0:

        F(Z) = G_0 F_1 - p_0 G_{-1} F_2

    with G the left-infinite and F the right-infinite partial functionals.
    Returns ``(value, TailBound)``.
    """
    part_tol = tol / 16.0
    for _ in range(3):
        f1, f2, tb_r = f_tail_pair(spec, 1, part_tol)
        g0, gm1, tb_l = f_left_pair(spec, 0, part_tol)
        p0 = spec.products(0, 0)[0]
        value = g0 * f1 - p0 * gm1 * f2
        er, el = tb_r.residual, tb_l.residual
        resid = (abs(g0) * er + abs(f1) * el + el * er
                 + abs(p0) * (abs(gm1) * er + abs(f2) * el + el * er))
        resid += 4.0 * _EPS * (abs(value) + 1.0)
        if resid <= tol:
            return value, TailBound(index=max(tb_r.index, abs(tb_l.index)),
                                    residual=resid, method="bilateral")
        part_tol *= 0.5 * tol / resid
    raise TolUnreachable(
        f"bilateral residual {resid:.3e} exceeds requested {tol:.3e}")
