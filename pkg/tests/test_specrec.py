import json
from fractions import Fraction

import pytest

from supervol import kdv, specrec, virasoro, volumes
from supervol.algebra import EvenPoly, LaurentSeries
from supervol.specrec import AIRY, SINE, THETA, CorrForm
from supervol.virasoro import Bounds

THETA_KEYS = volumes.stable_keys(5)
SINE_KEYS = volumes.stable_keys(4)


def test_recursion_prefactors():
    assert str(specrec.recursion_prefactor(THETA, 4)) == "1/2 + π^2·z^2 + O(z^4)"
    assert str(specrec.recursion_prefactor(SINE, 2)) == "(1/2)·z^-2 + (1/3)·π^2 + O(z^2)"
    assert specrec.recursion_prefactor(AIRY, 4) == LaurentSeries({-2: Fraction(1, 2)}, order=4)


def test_base_correlators():
    assert str(specrec.tr_correlator(THETA, 1, 1)) == "(1/8)·dz1/z1^2"
    assert str(specrec.tr_correlator(AIRY, 0, 3)) == "dz1/z1^2·dz2/z2^2·dz3/z3^2"


def test_bridge_rules():
    assert str(specrec.laplace_bridge(volumes.vol_theta(1, 1))) == "(1/8)·dz1/z1^2"
    assert str(specrec.laplace_bridge(EvenPoly(1, {(2,): 1}))) == "6·dz1/z1^4"
    assert specrec.laplace_bridge(volumes.vol_wp(0, 4)) == specrec.tr_correlator(SINE, 0, 4)


@pytest.mark.parametrize("g,n", THETA_KEYS)
def test_theta_curve_gives_theta_volumes(g, n):
    w = specrec.tr_correlator(THETA, g, n)
    assert w == specrec.laplace_bridge(volumes.vol_theta(g, n))
    assert w.is_symmetric()
    assert w.max_pole() <= THETA.pole_bound(g, n)
    assert all(p % 2 == 0 for t in w.to_json()["terms"] for p in t["pole_orders"])


@pytest.mark.parametrize("g,n", SINE_KEYS)
def test_sine_curve_gives_wp_volumes(g, n):
    w = specrec.tr_correlator(SINE, g, n)
    assert w == specrec.laplace_bridge(volumes.vol_wp(g, n))
    assert w.is_symmetric()
    assert w.max_pole() <= SINE.pole_bound(g, n)


@pytest.mark.parametrize("curve", [THETA, SINE, AIRY])
def test_tr_dilaton(curve):
    E = 5 if curve is THETA else 4
    for g, n in volumes.stable_keys(E):
        if volumes.euler(g, n + 1) <= E:
            r = specrec.tr_dilaton_check(curve, g, n)
            assert r["ok"], r


def test_dilaton_example_sides():
    r = specrec.tr_dilaton_check(THETA, 1, 1)
    assert r["lhs"] == r["rhs"] == "-(1/8)·dz1/z1^2"


def test_corrform_json_round_trip():
    w = specrec.tr_correlator(THETA, 2, 2)
    assert CorrForm.from_json(json.loads(json.dumps(w.to_json()))) == w


def test_theta_partition():
    b = Bounds(2, 4, 4)
    Z = specrec.tr_partition(THETA, b.G, b.N, b.K)
    assert Z == kdv.kappa_log_partition("theta", b, include_n0=False).exp()
    assert specrec.pi_slice(Z, 0) == virasoro.assemble_tau("theta", b)


def test_w11_gives_t0_term():
    S = specrec.tr_log_partition(THETA, 0, 1, 1)
    assert S.coeff(0, (1, 0)) == Fraction(1, 8)


def test_sine_partition():
    F = specrec.tr_log_partition(SINE, 1, 4, 4)
    assert F == kdv.kappa_log_partition("wp", Bounds(1, 4, 4), include_n0=False)
    assert specrec.pi_slice(F, 0) == virasoro.assemble_log_tau("kw", Bounds(None, 4, 4), max_hbar=1)


def test_custom_curve():
    c = specrec.SpectralCurve.from_series("airy2", LaurentSeries({1: 1}, order=20))
    assert specrec.tr_correlator(c, 1, 1) == specrec.tr_correlator(AIRY, 1, 1)


def test_unknown_curve():
    with pytest.raises(ValueError):
        specrec.get_curve("nope")
