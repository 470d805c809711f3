"""Sturm-bisection truncation oracle, determinant recurrence, orthopolys."""

import math

import numpy as np
import pytest

from charspec import jacobi, truncation
from charspec.errors import HypothesisFailed
from charspec.ffun import f_finite


def test_order_one_and_two_exact():
    d = jacobi.linear_diag(1.0, 0.5)
    ev1 = truncation.truncated_spectrum(d, 1).eigenvalues
    assert ev1 == pytest.approx([1.0], abs=1e-12)
    # [[1, w], [w, 2]] has eigenvalues (3 -+ sqrt(1 + 4 w^2)) / 2
    ev2 = truncation.truncated_spectrum(d, 2).eigenvalues
    r = math.sqrt(2.0)
    assert ev2 == pytest.approx([(3 - r) / 2, (3 + r) / 2], abs=1e-12)


@pytest.mark.parametrize("builder,kwargs", [
    (jacobi.linear_diag, {"alpha": 1.0, "w": 0.7}),
    (jacobi.linear_diag, {"alpha": -0.5, "w": 1.2}),
    (jacobi.harmonic, {"beta": 0.9}),
    (jacobi.qgeom, {"q": 0.5, "beta": 1.0}),
    (jacobi.zero_diag_harm, {"alpha": 0.3}),
])
def test_sturm_matches_dense_eigensolver(builder, kwargs):
    desc = builder(**kwargs)
    n = 60
    lam = np.asarray(desc.diag(n), dtype=float)
    w = np.asarray(desc.weights(n - 1), dtype=float)
    dense = np.diag(lam) + np.diag(w, 1) + np.diag(w, -1)
    want = np.linalg.eigvalsh(dense)
    got = truncation.truncated_spectrum(desc, n, tol=1e-12).eigenvalues
    assert np.allclose(got, want, atol=1e-10, rtol=0)


def test_truncation_eigenvalues_interlace():
    # interior eigenvalues of consecutive truncations approach the same
    # limits exponentially fast, so the true interlacing gaps sink below
    # bisection resolution; assert with matching slack
    d = jacobi.linear_diag(1.0, 0.9)
    a = truncation.truncated_spectrum(d, 20, tol=1e-12).eigenvalues
    b = truncation.truncated_spectrum(d, 21, tol=1e-12).eigenvalues
    assert np.all(b[:-1] <= a + 5e-12)
    assert np.all(a <= b[1:] + 5e-12)
    h = jacobi.harmonic(1.0)
    a = truncation.truncated_spectrum(h, 30, tol=1e-13).eigenvalues
    b = truncation.truncated_spectrum(h, 31, tol=1e-13).eigenvalues
    assert np.all(b[:-1] <= a + 1e-11)
    assert np.all(a <= b[1:] + 1e-11)


def test_truncated_spectrum_rejects_bad_input():
    d = jacobi.linear_diag(1.0, 0.5)
    with pytest.raises(ValueError):
        truncation.truncated_spectrum(d, 0)


# ---------------------------------------------------------------------------
# determinant recurrence


def test_charpoly_matches_lu():
    rng = np.random.default_rng(5)
    fams = [jacobi.linear_diag(1.0, 0.7), jacobi.harmonic(0.8),
            jacobi.qgeom(0.45, 1.1), jacobi.zero_diag_harm(0.25)]
    for trial in range(40):
        desc = fams[trial % len(fams)]
        n = int(rng.integers(1, 40))
        z = complex(rng.uniform(-1.5, 2.5), rng.uniform(-1.0, 1.0))
        if trial % 2 == 0:
            z = z.real
        lam = np.asarray(desc.diag(n), dtype=float)
        w = np.asarray(desc.weights(n - 1), dtype=float) if n > 1 else \
            np.empty(0)
        dense = (np.diag(lam - z) + np.diag(w, 1) + np.diag(w, -1)) \
            if not isinstance(z, complex) else \
            (np.diag(lam.astype(complex) - z) + np.diag(w, 1) +
             np.diag(w, -1))
        det = np.linalg.det(dense)
        got = truncation.charpoly(desc, n, z)
        assert abs(got - det) <= 1e-10 * max(1.0, abs(det))


def test_charpoly_deep_truncation_saturates():
    # det(J_400 - 1/2) for the linear family outgrows float range: the
    # recurrence must saturate with the correct sign instead of raising.
    # Exactly one eigenvalue (near 0.254) lies below 1/2, so the sign
    # is negative.
    d = jacobi.linear_diag(1.0, 1.0)
    v = truncation.charpoly(d, 400, 0.5)
    assert math.isinf(v) and v < 0
    # and the harmonic determinant at 0 underflows cleanly to zero
    h = jacobi.harmonic(1.0)
    assert truncation.charpoly(h, 400, 0.0) == 0.0


# ---------------------------------------------------------------------------
# orthogonal polynomials


def test_orthopoly_initial_conditions():
    d = jacobi.linear_diag(1.0, 0.7)
    z = 0.37
    assert truncation.orthopoly(d, "first", 0, z) == 1.0
    assert truncation.orthopoly(d, "first", 1, z) == \
        pytest.approx((z - 1.0) / 0.7, rel=1e-15)
    assert truncation.orthopoly(d, "second", 0, z) == 0.0
    assert truncation.orthopoly(d, "second", 1, z) == \
        pytest.approx(1.0 / 0.7, rel=1e-15)
    with pytest.raises(ValueError):
        truncation.orthopoly(d, "third", 2, z)
    with pytest.raises(ValueError):
        truncation.orthopoly(d, "first", -1, z)


def test_orthopoly_first_kind_product_form():
    # p_n prod w_k = (-1)^n det(J_n - z), and the determinant in turn is
    # prod (lambda_k - z) times the finite functional
    d = jacobi.qgeom(0.5, 1.0)
    z = -0.83
    w = np.asarray(d.weights(10), dtype=float)
    for n in (1, 3, 7, 10):
        lhs = truncation.orthopoly(d, "first", n, z) * np.prod(w[:n])
        det = (-1.0) ** n * truncation.charpoly(d, n, z)
        g = d.gamma_array(n)
        x = g * g / (d.diag(n) - z)
        fform = (-1.0) ** n * np.prod(d.diag(n) - z) * f_finite(x)
        assert lhs == pytest.approx(det, rel=1e-12)
        assert lhs == pytest.approx(fform, rel=1e-11)


def test_orthopoly_second_kind_is_shifted_determinant():
    # q_n prod_{k<=n} w_k = (-1)^(n-1) det(J'_{n-1} - z) where J' drops
    # the first row and column
    d = jacobi.linear_diag(1.0, 0.7)
    shifted = jacobi.JacobiDescriptor(
        lam_vec=lambda ks: (ks + 1).astype(np.float64),
        w_vec=lambda ks: np.full(ks.shape, 0.7))
    z = 0.37
    w = np.asarray(d.weights(10), dtype=float)
    for n in (1, 2, 5, 9):
        lhs = truncation.orthopoly(d, "second", n, z) * np.prod(w[:n])
        rhs = (-1.0) ** (n - 1) * truncation.charpoly(shifted, n - 1, z)
        assert lhs == pytest.approx(rhs, abs=1e-11 * max(1.0, abs(rhs)))


def test_orthopoly_wronskian():
    # w_{k+1} (p_{k+1} q_k - p_k q_{k+1}) = -1; the comparison scale grows
    # with the polynomials themselves
    d = jacobi.harmonic(1.0)
    z = -0.41
    w = np.asarray(d.weights(9), dtype=float)
    p = [truncation.orthopoly(d, "first", k, z) for k in range(10)]
    q = [truncation.orthopoly(d, "second", k, z) for k in range(10)]
    for k in range(9):
        c = w[k] * (p[k + 1] * q[k] - p[k] * q[k + 1])
        scale = abs(w[k]) * (abs(p[k + 1] * q[k]) + abs(p[k] * q[k + 1]))
        assert abs(c + 1.0) <= 1e-12 * max(1.0, scale)


# ---------------------------------------------------------------------------
# convergence hypotheses and tracking


def test_probe_conditions_reject_flat_heavy_weights():
    bad = jacobi.JacobiDescriptor(
        lam_vec=lambda ks: np.zeros(ks.shape),
        w_vec=lambda ks: np.ones(ks.shape))
    with pytest.raises(HypothesisFailed):
        truncation.lambda_tracking(bad, (0.2, 1.0), n_list=(10,))


def test_probe_conditions_reject_weight_dominated_diagonal():
    bad = jacobi.JacobiDescriptor(
        lam_vec=lambda ks: ks.astype(np.float64),
        w_vec=lambda ks: ks.astype(np.float64))
    with pytest.raises(HypothesisFailed) as exc:
        truncation.lambda_tracking(bad, (0.2, 1.0), n_list=(10,))
    assert "condition (ii)" in str(exc.value)


def test_lambda_tracking_converges():
    d = jacobi.linear_diag(1.0, 0.3)
    rows = truncation.lambda_tracking(d, (0.5, 3.5), n_list=(25, 50, 100),
                                      tol=1e-10)
    assert [r.n for r in rows] == [25, 50, 100]
    assert all(r.eigenvalues.size == 3 for r in rows)
    dists = [r.max_distance for r in rows]
    assert dists[-1] <= dists[0] + 1e-9
    assert dists[-1] <= 1e-7
