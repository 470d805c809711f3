"""Tests for the worked example families and the parametric study."""

import math

import numpy as np
import pytest

from charspec import examples, jacobi, spectral
from charspec.errors import (
    BadParams,
    DomainError,
    HypothesisFailed,
    LostTrack,
)


# ---------------------------------------------------------------------------
# family dispatch


def test_build_example_dispatch():
    assert examples.build_example(1, alpha=1.0, w=0.5).family == "linear_diag"
    assert examples.build_example(2, beta=1.0).family == "harmonic"
    assert examples.build_example(3, q=0.5, beta=1.0).family == "qgeom"
    assert examples.build_example(4, alpha=0.5).family == "zero_diag_harm"
    assert examples.build_example(5, q=0.6).family == "zero_diag_q"


def test_build_example_der_lambda():
    # the linear family has no finite accumulation point; the compact
    # ones all accumulate at zero
    assert examples.build_example(1, alpha=1.0, w=0.5).der_lambda == ()
    for ex_id, params in [(2, dict(beta=1.0)), (3, dict(q=0.5, beta=1.0)),
                          (4, dict(alpha=0.5)), (5, dict(q=0.6))]:
        assert examples.build_example(ex_id, **params).der_lambda == (0.0,)


@pytest.mark.parametrize("bad_id", [0, 6, -1, "one"])
def test_build_example_unknown_id(bad_id):
    with pytest.raises(BadParams, match="unknown example id"):
        examples.build_example(bad_id, alpha=1.0)


def test_build_example_missing_and_extra_params():
    with pytest.raises(BadParams, match="missing parameter"):
        examples.build_example(1, alpha=1.0)
    with pytest.raises(BadParams, match="unexpected parameters"):
        examples.build_example(2, beta=1.0, q=0.5)


# ---------------------------------------------------------------------------
# closed-form characteristic functions

# reference values computed with mpmath at 50 digits through the
# certified series route; the closed forms must land on the same numbers
CLOSED_FORM_REFS = [
    (1, dict(alpha=1.0, w=0.8), -0.7, 0.6656611788673703582199),
    (1, dict(alpha=1.0, w=2.0), 0.55, -0.675411566995884532837),
    (2, dict(beta=1.0), -0.6, 0.2834569374622979794473),
    (2, dict(beta=1.0), 0.4, -6.874810733379351617221),
    (3, dict(q=0.5, beta=1.0), 1.7, -0.4139608378946143984109),
    (4, dict(alpha=0.5), 0.8, 0.2393888576415825976207),
    (5, dict(q=0.6), 1.3, 0.1560535174349689465042),
]


@pytest.mark.parametrize("ex_id,params,z,ref", CLOSED_FORM_REFS)
def test_closed_form_charfn_matches_reference(ex_id, params, z, ref):
    val = examples.closed_form_charfn(ex_id, z, **params)
    assert val == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("ex_id,params,z", [
    (1, dict(alpha=0.7, w=1.1), -0.9),
    (2, dict(beta=0.7), 0.52),
    (3, dict(q=0.4, beta=0.6), 0.9),
    (4, dict(alpha=0.25), 0.66),
    (5, dict(q=0.55), 1.21),
])
def test_closed_form_agrees_with_certified_route(ex_id, params, z):
    # fresh points, away from the frozen references: the special-function
    # route and the certified product-series route are independent code
    # paths and must agree to within the certificate
    desc = examples.build_example(ex_id, **params)
    val, tb = jacobi.charfn(desc, z, tol=1e-10)
    closed = examples.closed_form_charfn(ex_id, z, **params)
    assert abs(closed - val) <= 1e-10 + tb.residual


def test_closed_form_rejects_accumulation_point():
    for ex_id, params in [(2, dict(beta=1.0)), (3, dict(q=0.5, beta=1.0)),
                          (4, dict(alpha=0.5)), (5, dict(q=0.6))]:
        with pytest.raises(DomainError):
            examples.closed_form_charfn(ex_id, 0.0, **params)


def test_closed_form_rejects_gamma_pole():
    # z/alpha a positive integer puts the gamma factor on a pole
    with pytest.raises(DomainError, match="nonpositive integer"):
        examples.closed_form_charfn(1, 2.0, alpha=1.0, w=0.5)


def test_closed_form_unknown_id():
    with pytest.raises(BadParams):
        examples.closed_form_charfn(7, 0.5)


# ---------------------------------------------------------------------------
# closed-form eigenvectors


EIGENVECTOR_CASES = [
    # (ex_id, params, eigenvalue, descriptor factory)
    (1, dict(alpha=1.0, w=1.0), 0.2538058170966424294131,
     lambda: jacobi.linear_diag(1.0, 1.0)),
    (2, dict(beta=1.0), 0.4406530563696221,
     lambda: jacobi.harmonic(1.0)),
    (3, dict(q=0.5, beta=1.0), 0.8221103582215961,
     lambda: jacobi.qgeom(0.5, 1.0)),
    (4, dict(alpha=0.5), 2.0 / math.pi,
     lambda: jacobi.zero_diag_harm(0.5)),
]


@pytest.mark.parametrize("ex_id,params,z,make_desc", EIGENVECTOR_CASES)
def test_closed_form_eigenvector_proportional(ex_id, params, z, make_desc):
    # normalizations differ by an overall constant, so the test is that
    # the componentwise ratio stays flat
    pair = spectral.eigenvector(make_desc(), z, K=10, tol=1e-10)
    ratios = [examples.closed_form_eigenvector(ex_id, z, k, **params)
              / pair.xi[k - 1] for k in range(1, 11)]
    mean = sum(ratios) / len(ratios)
    assert abs(mean) > 0
    assert (max(ratios) - min(ratios)) / abs(mean) < 1e-10


# ---------------------------------------------------------------------------
# c-deformed numbers


def test_cdeformed_brackets():
    cd = examples.CDeformed(2.0)
    assert [cd.bracket(n) for n in range(5)] == [0.0, 1.0, 3.0, 7.0, 15.0]
    # c = 1 degenerates to the plain integers
    assert examples.CDeformed(1.0).bracket(5) == 5.0


def test_cdeformed_rejects_nonpositive_base():
    with pytest.raises(BadParams):
        examples.CDeformed(0.0)
    with pytest.raises(BadParams):
        examples.CDeformed(-1.0)


@pytest.mark.parametrize("c", [0.5, 1.0, 1.7, 3.0])
def test_cdeformed_constant_distance_identity(c):
    cd = examples.CDeformed(c)
    worst = max(abs(cd.const_dist_residual(n, m))
                for n in range(1, 8) for m in range(1, 8))
    assert worst <= 1e-12


@pytest.mark.parametrize("c", [1.5, 2.0, 3.0])
def test_cdeformed_nested_sum_equals_product(c):
    for r in (1, 2, 3):
        for s in (1, 2, 3):
            for z in (-0.37, 0.85):
                brute = examples.cdeformed_nested_sum(
                    c, 1.0, 0.8, z, r, s, cutoff=60)
                closed = examples.cdeformed_product(c, 1.0, 0.8, z, r, s)
                assert abs(brute - closed) <= 1e-9, (c, r, s, z)


def test_cdeformed_product_needs_decaying_diagonal():
    # for c < 1 the deformed numbers stay bounded, the diagonal does not
    # go to zero, and the telescoping boundary term survives
    with pytest.raises(HypothesisFailed, match="c >= 1"):
        examples.cdeformed_product(0.8, 1.0, 0.8, -0.37, 1, 1)


def test_cdeformed_rejects_bad_indices():
    with pytest.raises(BadParams):
        examples.cdeformed_nested_sum(2.0, 1.0, 0.8, -0.37, 0, 1)
    with pytest.raises(BadParams):
        examples.cdeformed_product(2.0, 1.0, 0.8, -0.37, 1, 0)


# ---------------------------------------------------------------------------
# eigenvalue curves


def test_lambda_curve_starts_at_integer():
    for s in (1, 2, 3):
        curve = examples.lambda_curve(s, [0.0])
        assert curve.s == s
        assert curve.samples == [(0.0, float(s))]
        assert curve.provenance == "F-zero"


def test_lambda_curve_frozen_points():
    # reference values computed with mpmath via the characteristic
    # function's zero on a fine continuation grid
    lam02 = examples._lambda_at(1, 0.2, tol=1e-9)
    assert lam02 == pytest.approx(0.9607647801, abs=5e-9)
    lam05 = examples._lambda_at(1, 0.5, tol=1e-9)
    assert lam05 == pytest.approx(0.7745645128439621518237, abs=1e-9)


def test_lambda_curve_matches_small_w_expansion():
    # lambda_1(w) = 1 - w^2 + w^4/2 + O(w^6)
    w = 0.2
    lam = examples._lambda_at(1, w, tol=1e-9)
    assert abs(lam - (1.0 - w * w + w**4 / 2.0)) <= w**6


def test_lambda_curve_reaches_deep_well_regime():
    # far beyond the small-w window the curve approaches
    # -2w - a_1 (w)^{1/3} with a_1 the first (negative) zero of Airy's
    # function; 2% agreement at w = 8 is all this coarse grid supports
    grid = list(np.linspace(0.0, 8.0, 17))
    curve = examples.lambda_curve(1, grid, tol=1e-9)
    lam8 = curve.samples[-1][1]
    asym = -2.0 * 8.0 + 2.338107410459767 * 8.0 ** (1.0 / 3.0)
    assert abs(lam8 - asym) / abs(asym) < 0.02


def test_lambda_curve_lost_track_on_coarse_grid():
    # one giant step cannot be bridged even after the maximum number of
    # halvings; the failure must be reported as a lost track, not as a
    # convergence error from whatever window the tracker probed last
    with pytest.raises(LostTrack, match="step halvings"):
        examples.lambda_curve(1, [0.0, 30.0], tol=1e-9)


def test_multi_curve_validation():
    with pytest.raises(BadParams):
        examples.multi_curve(0, [0.0, 0.1])
    with pytest.raises(BadParams, match="ascending"):
        examples.multi_curve(2, [0.5, 0.4])
    with pytest.raises(BadParams, match="ascending"):
        examples.multi_curve(2, [-0.1, 0.2])


def test_multi_curve_keeps_gap_above_one():
    curves = examples.multi_curve(3, [0.0, 0.25, 0.5], tol=1e-9)
    assert len(curves) == 3
    for i, w in enumerate([0.0, 0.25, 0.5]):
        vals = [c.samples[i][1] for c in curves]
        assert all(b - a >= 1.0 - 1e-9 for a, b in zip(vals, vals[1:]))


# ---------------------------------------------------------------------------
# the Coulomb derivative


def test_coulomb_derivative_frozen_value():
    # reference computed with mpmath quadrature of the K0 integral
    d = examples.coulomb_derivative(1, 0.5)
    assert d == pytest.approx(-0.8233201230796308240022, rel=1e-10)


def test_coulomb_derivative_accepts_precomputed_eigenvalue():
    lam = examples._lambda_at(1, 0.5, tol=1e-9)
    assert examples.coulomb_derivative(1, 0.5, lam=lam) == \
        examples.coulomb_derivative(1, 0.5)


def test_coulomb_derivative_is_negative():
    assert examples.coulomb_derivative(2, 0.8) < 0.0


def test_coulomb_derivative_needs_positive_w():
    with pytest.raises(BadParams):
        examples.coulomb_derivative(1, 0.0)


# ---------------------------------------------------------------------------
# small-w threshold and envelope


def test_beta_s_values():
    assert examples.beta_s(1) == pytest.approx(1.0 / math.sqrt(math.pi),
                                               rel=1e-14)
    assert examples.beta_s(2) == pytest.approx(0.8932438417380023, rel=1e-12)
    assert examples.beta_s(3) == pytest.approx(1.250274083388736, rel=1e-12)
    with pytest.raises(BadParams):
        examples.beta_s(0)


def test_small_w_bound_holds_on_grid():
    rows = examples.prop45_bound_check(1, [0.0, 0.1, 0.2, 0.3, 0.4, 0.5])
    assert len(rows) == 6
    defects = [d for _, d, _ in rows]
    for w, defect, bound in rows:
        assert -5e-9 <= defect <= bound + 5e-9
    # the defect grows with w on this range
    assert all(b >= a - 1e-12 for a, b in zip(defects, defects[1:]))


def test_small_w_bound_second_curve():
    rows = examples.prop45_bound_check(2, [0.0, 0.3, 0.6, 0.89])
    for w, defect, bound in rows:
        assert -5e-9 <= defect <= bound + 5e-9


def test_small_w_bound_rejects_w_past_threshold():
    with pytest.raises(BadParams):
        examples.prop45_bound_check(1, [0.0, 0.6])


# ---------------------------------------------------------------------------
# summation identities


@pytest.mark.parametrize("which,params", [
    (1, dict(nu=0.3, x=1.4)),
    (2, dict(alpha=0.7, z=1.9)),
    (3, dict(alpha=0.5, z=2.0)),
    (4, dict(q=0.5, beta=0.8, z=0.6)),
    (5, dict(q=0.5, z=1.3)),
])
def test_summation_identities(which, params):
    lhs, rhs = examples.identities_42(which, **params)
    # the finite-difference derivatives set the floor; observed errors
    # sit near 1e-11 at these points
    assert abs(lhs - rhs) <= 1e-9


def test_summation_identities_unknown_index():
    with pytest.raises(BadParams):
        examples.identities_42(6, q=0.5, z=1.3)


# ---------------------------------------------------------------------------
# reduced eigenvalue equation


@pytest.mark.parametrize("s,w", [(1, 0.5), (2, 0.8)])
def test_eigenvalue_equation_residual_vanishes(s, w):
    residual, scale = examples.eigenvalue_equation_residual(s, w)
    assert scale > 0.0
    assert abs(residual) <= 1e-7 * scale


def test_eigenvalue_equation_residual_domain():
    with pytest.raises(BadParams):
        examples.eigenvalue_equation_residual(1, 0.0)
    with pytest.raises(BadParams):
        examples.eigenvalue_equation_residual(1, 0.6)   # past beta_1


# ---------------------------------------------------------------------------
# curve table


def test_curve_table_rows_small_grid():
    rows = examples.curve_table_rows(2, 0.2, 0.1)
    assert len(rows) == 3
    assert rows[0] == (0.0, 1.0, 2.0)
    # each column decreases in w; the gap between curves stays >= 1
    for (w0, *prev), (w1, *cur) in zip(rows, rows[1:]):
        assert w1 > w0
        assert all(c <= p + 1e-12 for p, c in zip(prev, cur))
    for _, l1, l2 in rows:
        assert l2 - l1 >= 1.0 - 1e-9


def test_curve_table_csv_format():
    csv = examples.curve_table_csv(2, 0.2, 0.1)
    lines = csv.splitlines()
    assert lines[0] == "w,lambda_1,lambda_2"
    assert lines[1] == "0,1,2"
    assert len(lines) == 4
    assert csv.endswith("\n")
    # the table is a report artifact: runs must be reproducible bytewise
    assert csv == examples.curve_table_csv(2, 0.2, 0.1)
