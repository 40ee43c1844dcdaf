from fractions import Fraction

import pytest

from supervol import kernels
from supervol.algebra import EvenPoly, PiScalar, Poly


def pi2(k, c=1):
    return PiScalar.pi2(k, c)


def test_secant_coefficients():
    assert kernels.sec_coeff(0) == PiScalar((1,))
    assert kernels.sec_coeff(1) == pi2(1, 4)
    assert kernels.sec_coeff(2) == pi2(2, 80)


def test_zeta_values():
    assert kernels.zeta_even(0) == PiScalar((Fraction(-1, 2),))
    assert kernels.zeta_even(1) == pi2(1, Fraction(1, 6))
    assert kernels.zeta_even(2) == pi2(2, Fraction(1, 90))
    assert kernels.bernoulli(4) == Fraction(-1, 30)


def test_F_polynomials():
    assert str(kernels.F(0)) == "L1"
    assert str(kernels.F(1)) == "L1^3 + 12·π^2·L1"
    for k in range(5):
        assert kernels.F(k).coeff((2 * k + 1,)) == PiScalar((1,))


def test_FM_polynomials():
    assert str(kernels.FM(0)) == "(1/2)·L1^2 + (2/3)·π^2"
    assert str(kernels.FM(1)) == "(1/4)·L1^4 + 2·π^2·L1^2 + (28/15)·π^4"
    for k in range(5):
        assert kernels.FM(k).coeff((2 * k + 2,)) == PiScalar((Fraction(1, 2 * k + 2),))


def test_intD_examples():
    assert kernels.intD(Poly.monomial((1, 1))) == kernels.F(1).scale(Fraction(1, 6))
    assert kernels.intD(Poly(2)).is_zero()
    assert kernels.intD(Poly.monomial((3, 1))) == kernels.F(2).scale(Fraction(6, 120))


def test_intR_examples():
    assert str(kernels.intR(Poly.monomial((1,)))) == "L1"
    assert str(kernels.intR(Poly.monomial((3,)))) == "L1^3 + 3·L1·L2^2 + 12·π^2·L1"
    r = kernels.intR(Poly.monomial((5,)))
    assert all(e[0] % 2 == 1 for e, _ in r.items())


def test_intM_examples():
    assert kernels.intDM(Poly.monomial((1, 1))) == kernels.FM(1).scale(Fraction(1, 6))
    assert kernels.intDM(Poly(2)).is_zero()
    half = Fraction(1, 2)
    want = EvenPoly(2, {(2, 0): half, (0, 2): half, (0, 0): pi2(1, Fraction(2, 3))})
    assert kernels.intRM(Poly.monomial((1,))) == want


@pytest.mark.parametrize("kind", ["theta", "wp"])
@pytest.mark.parametrize("k", [0, 1, 2])
@pytest.mark.parametrize("t", [1.0, 2.0])
def test_moment_quadrature(kind, k, t):
    q = kernels.moment_quadrature(kind, k, t)
    x = kernels.moment_exact(kind, k, t)
    assert q == pytest.approx(x, rel=5e-7)
