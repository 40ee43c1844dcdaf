from fractions import Fraction

import pytest

from supervol import virasoro, volumes
from supervol.algebra import EvenPoly, TruncationError, TruncSeries
from supervol.virasoro import Bounds, VirasoroOp, kw_bracket, theta_bracket


def test_theta_brackets():
    assert theta_bracket((0,)) == Fraction(1, 8)
    assert theta_bracket((1,)) == Fraction(3, 128)
    assert theta_bracket((2,)) == Fraction(15, 1024)
    assert theta_bracket((1, 1)) == Fraction(63, 512)
    assert theta_bracket((0, 0)) == Fraction(1, 8)


def test_kw_brackets():
    assert kw_bracket((0, 0, 0)) == 1
    assert kw_bracket((1,)) == Fraction(1, 24)
    assert kw_bracket((0, 0, 0, 1)) == 1
    assert kw_bracket((4,)) == Fraction(1, 1152)
    assert kw_bracket((1, 1)) == Fraction(1, 24)


def test_brackets_off_dimension_vanish():
    assert kw_bracket((0, 0)) == 0
    assert kw_bracket((2,)) == 0
    assert theta_bracket(()) == 0
    assert theta_bracket((-1, 2)) == 0


@pytest.mark.parametrize("ks", [(2, 1, 0), (1, 1, 2), (3, 0, 1, 1), (2, 2)])
def test_theta_pivot_independence(ks):
    want = theta_bracket(ks)
    assert all(theta_bracket(ks, pivot=p) == want for p in range(len(ks)))


@pytest.mark.parametrize("ks", [(2, 1, 1, 0), (3, 2, 1), (2, 1, 1, 1, 0), (3, 2), (5, 0, 0, 0, 0)])
def test_kw_pivot_independence(ks):
    want = kw_bracket(ks)
    assert want
    assert all(kw_bracket(ks, pivot=p) == want for p in range(len(ks)))


def test_coeff_dictionary_examples():
    assert virasoro.coeff_dictionary(volumes.vol_theta(2, 1).top_part()) == {(1,): Fraction(3, 128)}
    assert virasoro.coeff_dictionary(volumes.vol_theta(3, 1).top_part()) == {(2,): Fraction(15, 1024)}
    assert virasoro.coeff_dictionary(volumes.vol_theta(1, 1)) == {(0,): Fraction(1, 8)}
    with pytest.raises(ValueError):
        virasoro.coeff_dictionary(volumes.vol_theta(2, 1))


@pytest.mark.parametrize("kind,vol,E", [("theta", volumes.vol_theta_top, 6), ("kw", volumes.vol_wp_top, 5)])
def test_dictionary_equals_brackets(kind, vol, E):
    for g, n in volumes.stable_keys(E):
        for ks, val in virasoro.coeff_dictionary(vol(g, n)).items():
            assert virasoro.bracket(kind, ks) == val, (g, n, ks)


def test_assembled_log_theta_low_terms():
    S = virasoro.assemble_log_tau("theta", Bounds(2, 3, 2))
    assert S.coeff(0, (1, 0, 0)) == Fraction(1, 8)
    assert S.coeff(0, (2, 0, 0)) == Fraction(1, 16)
    assert S.coeff(0, (3, 0, 0)) == Fraction(1, 24)
    assert S.coeff(1, (0, 1, 0)) == Fraction(3, 128)
    assert S.coeff(1, (1, 1, 0)) == Fraction(9, 128)
    assert S.coeff(2, (0, 0, 1)) == Fraction(15, 1024)
    assert S.coeff(2, (0, 2, 0)) == Fraction(63, 1024)


def test_assembled_log_kw_low_terms():
    S = virasoro.assemble_log_tau("kw", Bounds(None, 3, 1), max_hbar=0)
    assert S.coeff(-1, (3, 0)) == Fraction(1, 6)
    assert S.coeff(0, (0, 1)) == Fraction(1, 24)


def test_empty_bounds_give_one():
    for model in ("theta", "kw"):
        Z = virasoro.assemble_tau(model, Bounds(2, 0, 2))
        assert Z.lines() == ["1"]


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_theta_virasoro(m):
    assert virasoro.virasoro_check("theta", m, Bounds(3, 4, 4)).is_zero()


@pytest.mark.parametrize("m", [-1, 0, 1, 2, 3])
def test_kw_virasoro(m):
    assert virasoro.virasoro_check("kw", m, Bounds(3, 4, 4)).is_zero()


def test_L0_on_one_is_nonzero():
    one = TruncSeries.one(2, 3, 2)
    assert VirasoroOp(0)(one).lines() == ["1/16"]
    assert virasoro.lhat(0, one).lines() == ["1/8"]


def test_kw_cap_too_small_breaks_annihilation():
    # L'_1 couples genera through hbar d^2, so dropping genus 2 leaves a residual
    Z = virasoro.assemble_tau("kw", Bounds(None, 6, 5), max_hbar=0)
    res = virasoro.apply_virasoro(VirasoroOp(1, "kw"), Z).filter(lambda h, e: h <= 1)
    assert not res.is_zero()


def test_operator_validation():
    with pytest.raises(ValueError):
        VirasoroOp(-1, "theta")
    with pytest.raises(ValueError):
        VirasoroOp(-2, "kw")
    with pytest.raises(TruncationError):
        VirasoroOp(3)(TruncSeries.one(1, 4, 2))


def test_bracket_table_rows():
    rows = virasoro.bracket_table("kw", 2)
    assert {"kind": "kw", "ks": [0, 0, 0, 1], "g": 0, "n": 4, "value": {"num": "1", "den": "1"}} in rows
    assert all(2 * r["g"] - 2 + r["n"] <= 2 for r in rows)
