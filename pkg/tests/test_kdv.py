from fractions import Fraction

import pytest

from supervol import kdv, virasoro
from supervol.algebra import PiScalar, TruncSeries
from supervol.virasoro import Bounds


def test_p_polynomials():
    assert kdv.p_poly(1).format("s") == "s1"
    assert kdv.p_poly(2).format("s") == "-(1/2)·s1^2 + s2"


def test_p_identity_symbolic_zero_shift():
    assert all(kdv.p_eval(j, {}) == 0 for j in range(1, 6))


@pytest.mark.parametrize("model", ["theta", "kw"])
def test_kdv_residual_vanishes(model):
    assert kdv.kdv_check(model, Bounds(3, 4, 4)).is_zero()


def test_kdv_negative_control():
    Z = TruncSeries(1, 8, None, {(0, (3, 0)): 1}).exp()
    r = kdv.kdv_residual(Z)
    assert not r.is_zero()
    assert r.coeff(2, (1, 0)) == -36


def test_exp_t0_squared_solves_kdv():
    # U = 2 hbar is constant, so this Z is a (trivial) KdV solution
    Z = TruncSeries(1, 8, None, {(0, (2, 0)): 1}).exp()
    assert kdv.kdv_residual(Z).is_zero()


def test_kdv_residual_needs_depth():
    with pytest.raises(ValueError):
        kdv.kdv_residual(TruncSeries.one(1, 3, None))


def test_bgw_initial():
    Z = virasoro.assemble_tau("theta", Bounds(3, 8, 1))
    r = kdv.bgw_initial(Z)
    assert r.is_zero() and r.N >= 6
    U = kdv.initial_u(Z)
    assert U.coeff(1, (0,)) == Fraction(1, 8)
    assert U.coeff(1, (6,)) == Fraction(7, 8)


def test_bgw_initial_control_on_one():
    r = kdv.bgw_initial(TruncSeries.one(1, 6, 2))
    assert r.coeff(1, (0,)) == Fraction(-1, 8)
    assert r.coeff(1, (2,)) == Fraction(-3, 8)


def test_kw_initial():
    Z = virasoro.assemble_tau("kw", Bounds(None, 8, 1), max_hbar=2)
    U = kdv.initial_u(Z).filter(lambda h, e: h <= 1)
    assert U == TruncSeries.var(0, 0, U.N)


def test_translate_polynomial_shift():
    s = Fraction(3, 5)
    one = TruncSeries.one(1, 8)
    t1 = TruncSeries.var(1, 1, 8)
    Z = (one + t1) * (one + t1)
    T = kdv.translate(Z, {1: s}, shift_degree=2)
    shifted = one.scale(1 + s) + t1
    assert T == (shifted * shifted).truncate(N=6)


def test_translate_exponential_partial_sums():
    # exp(t1) shifted by s: the constant term is the partial sum of e^s
    s = Fraction(1, 2)
    Z = TruncSeries.var(1, 1, 6).exp()
    T = kdv.translate(Z, {1: s}, shift_degree=6)
    want = sum(s**j / __import__("math").factorial(j) for j in range(7))
    assert T.coeff(0, (0, 0)) == want


def test_translate_zero_shift():
    Z = virasoro.assemble_tau("theta", Bounds(2, 3, 2))
    assert kdv.translate(Z, {}, shift_degree=0) == Z


def test_shift_vectors():
    sh = kdv.theta_shifts(kdv.S_WP, 3)
    assert sh[1] == PiScalar.pi2(1, 2)
    assert sh[2] == PiScalar.pi2(2, -2)
    kw = kdv.kw_shifts(kdv.S_WP, 3)
    assert 0 not in kw or kw[0] == 0
    assert kw[2] == PiScalar.pi2(1, 2)


def test_kappa_partition_examples():
    S = kdv.kappa_log_partition("theta", Bounds(1, 1, 1))
    assert S.coeff(0, (1, 0)) == Fraction(1, 8)
    assert S.coeff(1, (1, 0)) == PiScalar.pi2(1, Fraction(9, 64))
    assert S.coeff(1, (0, 1)) == Fraction(3, 128)
    W = kdv.kappa_log_partition("wp", Bounds(0, 3, 0))
    assert W.coeff(-1, (3,)) == Fraction(1, 6)


def test_top_parts_without_shift_are_tau():
    # with zero shift the dictionary applied to top parts is the assembled tau function
    b = Bounds(2, 3, 3)
    S = kdv.kappa_log_partition("theta", b, include_n0=False)
    assert specrec_pi0(S) == virasoro.assemble_log_tau("theta", b)


def specrec_pi0(S):
    from supervol.specrec import pi_slice
    return pi_slice(S, 0)


@pytest.mark.parametrize("flavor", ["theta", "wp"])
def test_verify_translation(flavor):
    r = kdv.verify_translation(flavor)
    assert r["ok"], r
    assert all(p["compared"] > 0 for p in r["parts"])
