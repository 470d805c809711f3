"""Descriptor plumbing, certified characteristic function, finite identity."""

import math

import numpy as np
import pytest

from charspec import jacobi
from charspec.errors import (
    AccumulationPoint,
    BadParams,
    Diverges,
    InvalidZ0,
    NoTailBound,
    PoleAt,
    TolUnreachable,
    WindowTouchesAccumulation,
)
from charspec.ffun import f_finite, f_tail


def _families():
    return [
        jacobi.linear_diag(1.0, 0.7),
        jacobi.linear_diag(-2.0, 1.3),
        jacobi.harmonic(0.8),
        jacobi.qgeom(0.45, 1.1),
        jacobi.zero_diag_harm(0.25),
        jacobi.zero_diag_q(0.6),
    ]


# ---------------------------------------------------------------------------
# gamma sequence


def test_gamma_products_recover_weights():
    for desc in _families():
        g = desc.gamma_array(41)
        w = desc.weights(40)
        assert g[0] == 1.0
        assert np.allclose(g[:-1] * g[1:], w, rtol=1e-13, atol=0)


def test_gamma_closed_form_constant_weights():
    # w_k = w constant: odd slots stay 1, even slots equal w
    desc = jacobi.linear_diag(1.0, 2.5)
    g = desc.gamma_array(12)
    assert np.all(g[0::2] == 1.0)
    assert np.all(g[1::2] == 2.5)


def test_gamma_accessor():
    desc = jacobi.harmonic(1.0)
    val = jacobi.gamma(desc, 7)
    assert isinstance(val, float)
    assert val == pytest.approx(float(desc.gamma_array(7)[6]), rel=0)
    with pytest.raises(ValueError):
        jacobi.gamma(desc, 0)


def test_entry_caches_are_read_only_and_stable():
    desc = jacobi.harmonic(1.0)
    a = desc.diag(10)
    b = desc.diag(4)
    assert not a.flags.writeable
    assert np.array_equal(a[:4], b)


# ---------------------------------------------------------------------------
# certified characteristic function: frozen references
# (all references computed with mpmath)


FROZEN = [
    ("harmonic", {"beta": 1.0}, -0.6, 0.2834569374622979794473),
    ("harmonic", {"beta": 1.0}, 0.4, -6.874810733379351617221),
    ("zero_diag_harm", {"alpha": 0.5}, 0.8, 0.2393888576415825976207),
    ("linear_diag", {"alpha": 1.0, "w": 0.8}, -0.7, 0.6656611788673703582199),
    ("linear_diag", {"alpha": 1.0, "w": 2.0}, 0.55, -0.675411566995884532837),
    ("linear_diag", {"alpha": 1.0, "w": 1.0}, 2.5, 1.957310465833744186458),
    ("zero_diag_q", {"q": 0.6}, 1.3, 0.1560535174349689465042),
    ("qgeom", {"q": 0.5, "beta": 1.0}, 1.7, -0.4139608378946143984109),
]


@pytest.mark.parametrize("family,params,z,ref", FROZEN)
def test_charfn_frozen(family, params, z, ref):
    desc = getattr(jacobi, family)(**params)
    val, tb = jacobi.charfn(desc, z, tol=1e-10)
    assert val == pytest.approx(ref, abs=1e-10)
    # the certificate must actually cover the observed error
    assert abs(val - ref) <= tb.residual
    assert tb.residual <= 1e-10


def test_tail_from_interior_start_frozen():
    # F of the products from k = 2 on, zero_diag_q(0.6) at z = 1.3
    spec = jacobi.zero_diag_q(0.6).spec_at(1.3)
    val, tb = f_tail(spec, 2, tol=1e-10)
    assert val == pytest.approx(0.6776770943744328505911, abs=1e-11)


def test_charfn_pole_on_diagonal():
    desc = jacobi.linear_diag(1.0, 1.0)
    with pytest.raises(PoleAt) as exc:
        jacobi.charfn(desc, 3.0)
    assert exc.value.index == 3


def test_spec_at_accumulation_point():
    desc = jacobi.harmonic(1.0)
    with pytest.raises(AccumulationPoint):
        desc.spec_at(0.0)
    with pytest.raises(AccumulationPoint):
        jacobi.charfn_regularized(desc, 0.0)


def test_products_slices():
    desc = jacobi.linear_diag(1.0, 1.0)
    assert desc.products(0.5, 4, 3).size == 0
    p = desc.products(0.5 + 0.25j, 1, 6)
    assert p.dtype == np.complex128
    with pytest.raises(PoleAt):
        desc.products(2.0, 1, 5)


# ---------------------------------------------------------------------------
# absolute-convergence certificate


def test_check_convergence_brackets_true_sum():
    desc = jacobi.harmonic(1.0)
    partial, tb = jacobi.check_convergence(desc, -0.5)
    deep = float(np.sum(np.abs(desc.products(-0.5, 1, 4 * tb.index))))
    assert partial <= deep + 1e-13
    assert deep <= partial + tb.residual


def test_check_convergence_pole_proximity():
    desc = jacobi.linear_diag(1.0, 1.0)
    with pytest.raises(InvalidZ0):
        jacobi.check_convergence(desc, 1.0 + 1e-10)
    # tol is the proximity radius, not an accuracy target
    with pytest.raises(InvalidZ0):
        jacobi.check_convergence(jacobi.harmonic(1.0), 0.3, tol=0.2)
    with pytest.raises(InvalidZ0):
        jacobi.check_convergence(jacobi.harmonic(1.0), 1e-10)


def test_flat_diagonal_refusals():
    # constant entries: products never decay
    flat = jacobi.custom_rational([1.0], [1.0], [1.0], [1.0])
    assert flat.products_degree == 0.0
    with pytest.raises(NoTailBound):
        jacobi.charfn(flat, 3.0)
    with pytest.raises(Diverges):
        jacobi.check_convergence(flat, 3.0)


# ---------------------------------------------------------------------------
# custom rational entries


def test_custom_rational_replicates_linear_family():
    cr = jacobi.custom_rational([0.0, 1.0], [1.0], [1.0], [1.0])
    lin = jacobi.linear_diag(1.0, 1.0)
    ref, _ = jacobi.charfn(lin, -0.5, tol=1e-12)
    val, tb = jacobi.charfn(cr, -0.5, tol=1e-4)
    assert tb.method == "plain"
    assert abs(val - ref) <= tb.residual + 1e-12


def test_custom_rational_refuses_tight_tolerance():
    # the power-law envelope cannot certify 1e-8 within the index cap
    cr = jacobi.custom_rational([0.0, 1.0], [1.0], [1.0], [1.0])
    with pytest.raises(TolUnreachable):
        jacobi.charfn(cr, -0.5, tol=1e-8)


def test_custom_rational_fast_decay():
    # lambda_k = k^2 gives degree-4 product decay; compare against the
    # finite functional of the first 600 entries
    cr = jacobi.custom_rational([0.0, 0.0, 1.0], [1.0], [1.0], [1.0])
    assert cr.products_degree == 4.0
    val, tb = jacobi.charfn(cr, 0.5, tol=1e-8)
    ks = np.arange(1, 601, dtype=np.float64)
    direct = f_finite(1.0 / (ks * ks - 0.5))
    assert abs(val - direct) <= tb.residual + 1e-9


def test_custom_rational_validation():
    with pytest.raises(BadParams):
        jacobi.custom_rational([0.0, 1.0], [-2.0, 1.0], [1.0], [1.0])
    with pytest.raises(BadParams):
        jacobi.custom_rational([0.0, 1.0], [1.0], [-1.0, 1.0], [1.0])
    with pytest.raises(BadParams):
        jacobi.custom_rational([0.0, 1.0], [1.0], [0.0], [1.0])


def test_builder_param_validation():
    with pytest.raises(BadParams):
        jacobi.linear_diag(0.0, 1.0)
    with pytest.raises(BadParams):
        jacobi.linear_diag(1.0, -2.0)
    with pytest.raises(BadParams):
        jacobi.harmonic(0.0)
    with pytest.raises(BadParams):
        jacobi.qgeom(1.0, 1.0)
    with pytest.raises(BadParams):
        jacobi.qgeom(0.5, float("nan"))
    with pytest.raises(BadParams):
        jacobi.zero_diag_harm(-1.0)
    with pytest.raises(BadParams):
        jacobi.zero_diag_q("q")


# ---------------------------------------------------------------------------
# finite determinant identity


def test_det_truncation_identity_random():
    rng = np.random.default_rng(7)
    fams = _families()
    for trial in range(60):
        desc = fams[trial % len(fams)]
        n = int(rng.integers(1, 11))
        if trial % 3 == 0:
            z = complex(rng.uniform(-1.5, 3.0), rng.uniform(0.3, 1.0))
        else:
            lam = np.asarray(desc.diag(n), dtype=np.float64)
            while True:
                z = float(rng.uniform(-2.0, float(lam.max()) + 1.5))
                if np.min(np.abs(lam - z)) > 1e-3:
                    break
        lhs, rhs = jacobi.det_truncation_identity(desc, n, z)
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_det_truncation_order_one():
    desc = jacobi.harmonic(1.0)
    lhs, rhs = jacobi.det_truncation_identity(desc, 1, 0.4)
    assert lhs == pytest.approx(0.6, abs=1e-15)
    assert rhs == pytest.approx(0.6, abs=1e-15)


def test_det_truncation_pole():
    desc = jacobi.linear_diag(1.0, 1.0)
    with pytest.raises(PoleAt):
        jacobi.det_truncation_identity(desc, 5, 2.0)


def test_det_truncation_general_tridiagonal():
    rng = np.random.default_rng(11)
    n = 8
    lam = rng.uniform(-1.0, 1.0, size=n)
    sup = rng.uniform(0.2, 1.5, size=n - 1)
    sub = rng.uniform(0.2, 1.5, size=n - 1)
    desc = jacobi.GeneralJacobiDescriptor.from_arrays(lam, sup, sub)
    pi = desc.pi_array(n)
    assert pi[0] == 1.0
    assert np.allclose(pi[1:] * pi[:-1], sup * sub, rtol=1e-13)
    z = 2.37
    lhs, rhs = jacobi.det_truncation_identity(desc, n, z)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


# ---------------------------------------------------------------------------
# regularized characteristic function


def test_regularized_equals_charfn_off_diagonal():
    desc = jacobi.linear_diag(1.0, 0.5)
    val, _ = jacobi.charfn(desc, 2.5, tol=1e-11)
    assert jacobi.charfn_regularized(desc, 2.5, tol=1e-11) == val


def test_regularized_limit_linear():
    # R(3) = lim_{h->0} h F(3+h); Richardson in h removes the linear term
    desc = jacobi.linear_diag(1.0, 0.5)
    reg = jacobi.charfn_regularized(desc, 3.0, tol=1e-11)

    def e(h):
        return h * jacobi.charfn(desc, 3.0 + h, tol=1e-9)[0]

    h = 1e-4
    rich = 2.0 * e(h / 2) - e(h)
    assert reg == pytest.approx(rich, rel=1e-5)


def test_regularized_limit_harmonic():
    # diagonal entry 1/5; nearby entries force a larger step and a
    # looser certificate for the off-entry evaluations
    desc = jacobi.harmonic(1.0)
    reg = jacobi.charfn_regularized(desc, 0.2, tol=1e-11)

    def e(h):
        return h * jacobi.charfn(desc, 0.2 + h, tol=1e-6)[0]

    h = 5e-4
    rich = 2.0 * e(h / 2) - e(h)
    assert reg == pytest.approx(rich, rel=1e-3)


# ---------------------------------------------------------------------------
# window evaluator


def test_window_evaluator_extracts_in_window_entries():
    desc = jacobi.linear_diag(1.0, 0.5)
    ev = jacobi.window_evaluator(desc, 0.0, 3.5, tol=1e-10)
    assert ev.matched == (1, 2, 3)
    # analytic inside the window: finite at the extracted entries
    for u in (1.0, 2.0, 3.0, 2.2):
        val, resid = ev.eval_with_residual(u)
        assert math.isfinite(val)
        assert resid < 1e-9
    # sign change across the smallest spectral point (near 0.7746)
    assert ev(0.75) * ev(0.80) < 0.0


def test_window_evaluator_without_matches_is_charfn():
    desc = jacobi.linear_diag(1.0, 0.5)
    ev = jacobi.window_evaluator(desc, 10.4, 10.6, tol=1e-10)
    assert ev.matched == ()
    val, _ = jacobi.charfn(desc, 10.5, tol=1e-10)
    assert ev(10.5) == val


def test_window_evaluator_rejects_accumulation_window():
    with pytest.raises(WindowTouchesAccumulation):
        jacobi.window_evaluator(jacobi.harmonic(1.0), -0.1, 0.5)
    with pytest.raises(ValueError):
        jacobi.window_evaluator(jacobi.harmonic(1.0), 0.5, 0.5)


# ---------------------------------------------------------------------------
# JSON round trip


def test_descriptor_json_roundtrip():
    originals = [
        jacobi.linear_diag(0.1 + 0.2, 1.0 / 3.0),
        jacobi.harmonic(0.7071067811865476),
        jacobi.qgeom(0.45, 1.1),
        jacobi.zero_diag_harm(0.25),
        jacobi.zero_diag_q(0.6),
        jacobi.custom_rational([0.0, 0.0, 1.0], [1.0], [1.0], [1.0]),
    ]
    for desc in originals:
        back = jacobi.descriptor_from_json(jacobi.descriptor_to_json(desc))
        assert back.family == desc.family
        assert back.params == desc.params
        assert back.der_lambda == desc.der_lambda
        assert np.array_equal(back.diag(20), desc.diag(20))
        assert np.array_equal(back.weights(20), desc.weights(20))


def test_descriptor_json_rejects_garbage():
    for text in [
        "not json{",
        "[1, 2]",
        '{"family": "nope", "params": {}}',
        '{"family": "harmonic"}',
        '{"family": "harmonic", "params": {}}',
        '{"family": "custom_rational", "params": {"lam_num": [0, 1]}}',
    ]:
        with pytest.raises(BadParams):
            jacobi.descriptor_from_json(text)


def test_descriptor_json_rejects_ad_hoc_descriptor():
    desc = jacobi.JacobiDescriptor(
        lam_vec=lambda ks: ks.astype(np.float64),
        w_vec=lambda ks: np.ones(ks.shape))
    with pytest.raises(BadParams):
        jacobi.descriptor_to_json(desc)
