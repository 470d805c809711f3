"""Special-function layer: frozen high-precision references and the
classical cross-identities between the implementations."""

import math

import numpy as np
import pytest

from charspec.errors import BadParams, DomainError, PochhammerZero, PoleOfGamma
from charspec import specfun as sf


# all reference values below computed with mpmath at 25+ digits

JREF = [
    (0.0, 2.0, 0.2238907791412356680518),
    (0.5, 2.0, 0.5130161365618277516657),
    (0.3, 1.4, 0.6620714667858566557266),
    (-0.9, 6.0, 0.3022579323575596163769),
    (10.0, 6.0, 0.006963981002790316321709),
    (-0.9, 0.3, 0.4505696265388000266484),
    (10.0, 0.3, 1.585846515700257322552e-15),
]


@pytest.mark.parametrize("nu,x,want", JREF)
def test_bessel_j_reference(nu, x, want):
    assert sf.bessel_j(nu, x) == pytest.approx(want, rel=1e-12, abs=1e-22)


def test_bessel_j_half_order_closed_form():
    for x in (0.7, 2.0, 5.3):
        want = math.sqrt(2.0 / (math.pi * x)) * math.sin(x)
        assert sf.bessel_j(0.5, x) == pytest.approx(want, rel=1e-13)
        want = math.sqrt(2.0 / (math.pi * x)) * math.cos(x)
        assert sf.bessel_j(-0.5, x) == pytest.approx(want, rel=1e-13)


def test_bessel_y_reference():
    assert sf.bessel_y(0.3, 1.7) == pytest.approx(
        0.2365840454852576035625, rel=1e-12)
    assert sf.bessel_y(2.0, 1.3) == pytest.approx(
        -1.13041186482830251686, rel=1e-12)


def test_bessel_jy_cross_product():
    # J_{nu+1} Y_nu - J_nu Y_{nu+1} = 2/(pi x)
    for nu in (-0.6, 0.0, 0.3, 1.7):
        for x in (0.4, 1.1, 3.7):
            lhs = (sf.bessel_j(nu + 1, x) * sf.bessel_y(nu, x)
                   - sf.bessel_j(nu, x) * sf.bessel_y(nu + 1, x))
            assert lhs == pytest.approx(2.0 / (math.pi * x), rel=1e-11)


def test_bessel_j_negative_integer_symmetry():
    assert sf.bessel_j(-3.0, 1.9) == pytest.approx(-sf.bessel_j(3.0, 1.9),
                                                   rel=1e-13)


def test_hyp0f1_matches_bessel():
    # 0F1(nu+1; -x^2/4) = Gamma(nu+1) (x/2)^{-nu} J_nu(x)
    for nu, x in ((0.3, 1.4), (1.5, 0.8), (-0.4, 2.2)):
        lhs = sf.hyp0f1(nu + 1.0, -x * x / 4.0)
        rhs = sf.gamma_fn(nu + 1.0) * (x / 2.0) ** (-nu) * sf.bessel_j(nu, x)
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_gamma_reference():
    assert sf.gamma_fn(0.1) == pytest.approx(9.513507698668731836292,
                                             rel=1e-13)
    assert sf.gamma_fn(12.7) == pytest.approx(225322480.2414188861241,
                                              rel=1e-13)
    assert sf.gamma_fn(-2.5) == pytest.approx(-0.9453087204829418812257,
                                              rel=1e-13)


def test_gamma_poles():
    for x in (0.0, -1.0, -7.0):
        with pytest.raises(PoleOfGamma):
            sf.gamma_fn(x)


def test_bessel_k0_reference():
    cases = [
        (1.0, 0.4210244382407083333356),
        (0.01, 4.721244730161094965136),
        (7.5, 0.0002491776163561143890147),
        (30.0, 2.132477496463056371167e-14),
    ]
    for x, want in cases:
        assert sf.bessel_k0(x) == pytest.approx(want, rel=1e-12)
    with pytest.raises(DomainError):
        sf.bessel_k0(0.0)


def test_airy_negative_zeros():
    want = [-2.338107410459767038489, -4.087949444130970616637,
            -5.52055982809555105913, -6.78670809007175899878,
            -7.944133587120853123138, -9.022650853340980380158]
    got = sf.airy_neg_zeros(6)
    # Maclaurin cancellation grows with |a_k|; 1.6e-11 observed at a_6,
    # and the one consumer only needs percent-level agreement
    assert np.allclose(got, want, rtol=1e-10, atol=0)
    with pytest.raises(BadParams):
        sf.airy_neg_zeros(0)


def test_first_bessel_y_zero_half_order():
    # Y_{1/2}(x) = -sqrt(2/(pi x)) cos x vanishes first at pi/2
    assert sf.first_bessel_y_zero(0.5) == pytest.approx(math.pi / 2.0,
                                                        abs=1e-10)


def test_first_bessel_y_zero_is_a_zero():
    for nu in (0.0, 1.5, 4.5, 9.5):
        y1 = sf.first_bessel_y_zero(nu)
        assert abs(sf.bessel_y(nu, y1)) < 1e-9
        # nothing earlier: sample a coarse grid below y1
        grid = np.linspace(max(1e-3, 0.02 * y1), y1 * 0.995, 50)
        vals = [sf.bessel_y(nu, float(t)) for t in grid]
        assert all(v < 0 for v in vals)


def test_q_pochhammer():
    # finite product against direct arithmetic
    a, q = 0.4, 0.6
    direct = (1 - a) * (1 - a * q) * (1 - a * q * q)
    assert sf.q_pochhammer(a, q, 3) == pytest.approx(direct, rel=1e-14)
    # infinite product: log-sum check at modest precision
    inf = sf.q_pochhammer(a, q)
    want = math.exp(sum(math.log1p(-a * q ** j) for j in range(200)))
    assert inf == pytest.approx(want, rel=1e-12)
    with pytest.raises(DomainError):
        sf.q_pochhammer(0.5, 1.2)


def test_phi01_reference():
    cases = [
        (0.0, 0.25, -0.5, 0.3555114692481518394848),
        (0.5, 0.5, -0.3, -0.04389749547513237414689),
        (0.0, 0.36, -1.0 / 1.69, 0.1560535174349689465042),
        (1.0 / 1.7, 0.5, -1.0 / 2.89, -0.4139608378946143984109),
    ]
    for b, q, z, want in cases:
        assert sf.phi01(b, q, z) == pytest.approx(want, rel=1e-12)


def test_phi01_denominator_zero():
    # b = q^{-j} makes a (b;q)_k factor vanish
    with pytest.raises(PochhammerZero):
        sf.phi01(1.0 / 0.5, 0.5, -0.3)


def test_qparams_validation():
    with pytest.raises(BadParams):
        sf.QParams(q=1.5, beta=1.0)
    with pytest.raises(BadParams):
        sf.QParams(q=0.5, beta=-1.0)
