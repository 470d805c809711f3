"""Hot loops shared by the evaluators.

Everything in here is a plain function of numpy arrays and scalars, jitted
with numba when it is available.  The pure-Python definitions are kept
runnable so the package still works (slowly) without a compiler; the test
suite and the CLI call :func:`warmup` once so compilation cost never lands
inside a timed region.

The compensated sweep uses double-double arithmetic (Dekker/Knuth error-free
transforms).  It is only engaged when the plain sweep reports intermediate
values above ``COMPENSATE_THRESHOLD``, which is when cancellation in the
three-term recurrence starts eating digits.
"""

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


COMPENSATE_THRESHOLD = 1.0e6


@njit(cache=True, nogil=True)
def backward_sweep(p, f1, f2):
    """Run ``F[m] = F[m+1] - p[m]*F[m+2]`` from the top of ``p`` down.

    ``f1`` and ``f2`` seed ``F`` at the two indices just above the array.
    Returns ``(F_at_start, F_at_start_plus_1, max_abs)`` where ``max_abs``
    is the largest magnitude seen during the sweep (cancellation monitor).
    """
    maxabs = max(abs(f1), abs(f2))
    for m in range(len(p) - 1, -1, -1):
        f1, f2 = f1 - p[m] * f2, f1
        a = abs(f1)
        if a > maxabs:
            maxabs = a
    return f1, f2, maxabs


@njit(cache=True, nogil=True)
def backward_sweep_array(p, f1, f2):
    """Same recurrence as :func:`backward_sweep` but keeps every value.

    Output has length ``len(p) + 2``; ``out[i]`` is ``F`` at offset ``i``
    from the start of ``p``, with the two seeds sitting at the end.
    """
    n = len(p)
    out = np.empty(n + 2, dtype=p.dtype)
    out[n + 1] = f2
    out[n] = f1
    for i in range(n - 1, -1, -1):
        out[i] = out[i + 1] - p[i] * out[i + 2]
    return out


@njit(cache=True, nogil=True)
def forward_sweep(q, g0, g1):
    """Run ``G[j] = G[j-1] - q[j-1]*G[j-2]`` upward.

    Seeds are ``g0 = G[a-2]`` and ``g1 = G[a-1]``; ``q[j]`` holds the
    product coupling steps ``a-1+j``.  Returns the last two values and the
    magnitude peak: ``(G[b-1], G[b], max_abs)`` with ``b = a - 1 + len(q)``.
    """
    maxabs = max(abs(g0), abs(g1))
    for j in range(len(q)):
        g0, g1 = g1, g1 - q[j] * g0
        a = abs(g1)
        if a > maxabs:
            maxabs = a
    return g0, g1, maxabs


@njit(cache=True, nogil=True)
def forward_sweep_array(q, g0, g1):
    """Array-returning variant of :func:`forward_sweep`.

    ``out[0] = g0``, ``out[1] = g1``, ``out[j+2] = out[j+1] - q[j]*out[j]``.
    """
    n = len(q)
    out = np.empty(n + 2, dtype=q.dtype)
    out[0] = g0
    out[1] = g1
    for j in range(n):
        out[j + 2] = out[j + 1] - q[j] * out[j]
    return out


@njit(cache=True, nogil=True)
def three_term_forward(a, b, r_prev, r_curr):
    """Generic ascending recurrence ``R[n] = a[n]*R[n-1] - b[n]*R[n-2]``.

    Returns the final pair ``(R[M-1], R[M])``.
    """
    for i in range(len(a)):
        r_prev, r_curr = r_curr, a[i] * r_curr - b[i] * r_prev
    return r_prev, r_curr


# ---------------------------------------------------------------------------
# double-double helpers (error-free transforms), used by the compensated sweep

_SPLITTER = 134217729.0  # 2**27 + 1


@njit(cache=True, nogil=True)
def _two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


@njit(cache=True, nogil=True)
def _two_prod(a, b):
    p = a * b
    ca = _SPLITTER * a
    ah = ca - (ca - a)
    al = a - ah
    cb = _SPLITTER * b
    bh = cb - (cb - b)
    bl = b - bh
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


@njit(cache=True, nogil=True)
def compensated_backward_sweep(p, f1, f2):
    """Backward sweep carrying a double-double accumulator for F.

    Inputs are complex128; real data should be promoted by the caller.
    The products p are left in working precision (they are data, not
    accumulated error), only the recurrence itself is compensated.
    """
    f1hi = f1
    f1lo = 0.0j
    f2hi = f2
    f2lo = 0.0j
    maxabs = max(abs(f1), abs(f2))
    for m in range(len(p) - 1, -1, -1):
        pm = p[m]
        # t = pm * f2 (double-double), via four real two_prods
        ac, e_ac = _two_prod(pm.real, f2hi.real)
        bd, e_bd = _two_prod(pm.imag, f2hi.imag)
        ad, e_ad = _two_prod(pm.real, f2hi.imag)
        bc, e_bc = _two_prod(pm.imag, f2hi.real)
        t_re, r_re = _two_sum(ac, -bd)
        t_im, r_im = _two_sum(ad, bc)
        thi = complex(t_re, t_im)
        tlo = complex(r_re + (e_ac - e_bd), r_im + (e_ad + e_bc))
        tlo = tlo + pm * f2lo
        # s = f1 - t (double-double)
        s_re, se_re = _two_sum(f1hi.real, -thi.real)
        s_im, se_im = _two_sum(f1hi.imag, -thi.imag)
        shi = complex(s_re, s_im)
        slo = complex(se_re, se_im) + f1lo - tlo
        # renormalize
        n_re, ne_re = _two_sum(shi.real, slo.real)
        n_im, ne_im = _two_sum(shi.imag, slo.imag)
        f2hi, f2lo = f1hi, f1lo
        f1hi = complex(n_re, n_im)
        f1lo = complex(ne_re, ne_im)
        a = abs(f1hi)
        if a > maxabs:
            maxabs = a
    return f1hi, f2hi, maxabs


@njit(cache=True, nogil=True)
def sturm_counts(diag, offsq, zs):
    """Eigenvalue counts below each shift for a symmetric tridiagonal matrix.

    ``diag`` holds the diagonal, ``offsq`` the squared off-diagonal entries
    (length ``len(diag) - 1``).  For each shift ``z`` the signs of the
    leading-principal-minor ratios ``d_k = (diag[k]-z) - offsq[k-1]/d_{k-1}``
    are counted; the number of negative pivots equals the number of
    eigenvalues strictly below ``z`` (LDL^T inertia).
    """
    n = len(diag)
    m = len(zs)
    out = np.empty(m, dtype=np.int64)
    for i in range(m):
        z = zs[i]
        cnt = 0
        d = diag[0] - z
        if d == 0.0:
            d = -1.0e-300
        if d < 0.0:
            cnt += 1
        for k in range(1, n):
            d = (diag[k] - z) - offsq[k - 1] / d
            if d == 0.0:
                d = -1.0e-300
            if d < 0.0:
                cnt += 1
        out[i] = cnt
    return out


def warmup():
    """Force compilation of every kernel for both dtypes."""
    pr = np.array([0.25, -0.1], dtype=np.float64)
    pc = pr.astype(np.complex128)
    backward_sweep(pr, 1.0, 1.0)
    backward_sweep(pc, 1.0 + 0.0j, 1.0 + 0.0j)
    backward_sweep_array(pr, 1.0, 1.0)
    backward_sweep_array(pc, 1.0 + 0.0j, 1.0 + 0.0j)
    forward_sweep(pr, 1.0, 1.0)
    forward_sweep(pc, 1.0 + 0.0j, 1.0 + 0.0j)
    forward_sweep_array(pr, 1.0, 1.0)
    forward_sweep_array(pc, 1.0 + 0.0j, 1.0 + 0.0j)
    three_term_forward(pr, pr, 0.0, 1.0)
    three_term_forward(pc, pc, 0.0 + 0.0j, 1.0 + 0.0j)
    compensated_backward_sweep(pc, 1.0 + 0.0j, 1.0 + 0.0j)
    sturm_counts(np.array([1.0, 2.0]), np.array([0.25]), np.array([1.5]))
