import threading
from fractions import Fraction

import pytest

from supervol import checks, volumes
from supervol.algebra import EvenPoly, PiScalar, Poly
from supervol.volumes import (
    UnstableError, VolCache, vol_theta, vol_theta_top, vol_wp, vol_wp_top,
)

KEYS6 = volumes.stable_keys(6)


def test_small_theta_volumes():
    assert vol_theta(1, 1) == EvenPoly(1, {(0,): Fraction(1, 8)})
    assert vol_theta(1, 3) == EvenPoly(3, {(0, 0, 0): Fraction(1, 4)})
    assert str(vol_theta(2, 1)) == "(3/256)·L1^2 + (9/64)·π^2"
    c = Fraction(24, 2**16 * 5)
    want = EvenPoly(1, {(0,): PiScalar.pi2(2, c * 16 * 5 * 227),
                        (2,): PiScalar.pi2(1, c * 336 * 5), (4,): c * 25})
    assert vol_theta(3, 1) == want


def test_genus_zero_theta_vanishes():
    for n in range(3, 7):
        assert vol_theta(0, n).is_zero()


@pytest.mark.parametrize("g,n", [k for k in KEYS6 if 1 <= k[0] <= 3])
def test_theta_closed_forms(g, n):
    assert vol_theta(g, n) == checks.theta_family(g, n)


def test_wp_small():
    for key, want in checks.mirzakhani_table().items():
        assert vol_wp(*key) == want


@pytest.mark.parametrize("g,n", KEYS6)
def test_volume_invariants(g, n):
    for vol in (vol_theta, vol_wp):
        v = vol(g, n)
        assert isinstance(v, EvenPoly)
        assert v.is_symmetric()
    v = vol_wp(g, n)
    if not v.is_zero():
        assert v.degree() == 2 * (3 * g - 3 + n)
    t = vol_theta(g, n)
    if not t.is_zero():
        assert t.degree() == 2 * (g - 1)


@pytest.mark.parametrize("g,n", KEYS6)
def test_top_recursions_match_top_parts(g, n):
    assert vol_theta_top(g, n) == vol_theta(g, n).top_part()
    assert vol_wp_top(g, n) == vol_wp(g, n).top_part()


def test_top_examples():
    assert str(vol_theta_top(2, 1)) == "(3/256)·L1^2"
    assert vol_theta_top(1, 4) == EvenPoly(4, {(0,) * 4: Fraction(6, 8)})
    assert str(vol_wp_top(0, 4)) == "(1/2)·(L1^2 + L2^2 + L3^2 + L4^2)"


def test_dilaton_n0_values():
    assert volumes.vol_theta_n0(2) == PiScalar.pi2(1, Fraction(3, 64))
    assert volumes.vol_wp_n0(2) == PiScalar.pi2(3, Fraction(43, 2160))


@pytest.mark.parametrize("g,n", [k for k in volumes.stable_keys(6) if k[0] >= 1 and volumes.euler(*k) < 6])
def test_theta_dilaton(g, n):
    lhs, rhs = volumes.dilaton_eval_theta(g, n)
    assert lhs == rhs


@pytest.mark.parametrize("g,n", [k for k in volumes.stable_keys(5) if volumes.euler(*k) + 1 <= 5])
def test_wp_string_dilaton(g, n):
    assert volumes.string_dilaton_wp(g, n)["ok"]


def test_normalizations():
    assert volumes.normalize_super(1, 1, "vhat") == EvenPoly(1, {(0,): Fraction(-1, 16)})
    assert volumes.normalize_super(1, 1, "VSW") == EvenPoly(1, {(0,): Fraction(-1, 8)})
    for g, n in [(2, 1), (2, 2), (3, 1)]:
        sw = volumes.normalize_super(g, n, "vsw")
        assert sw == vol_theta(g, n).scale(Fraction((-1) ** n) * Fraction(2) ** (1 - g))
        assert sw == volumes.normalize_super(g, n, "vhat").scale(2**n)


@pytest.mark.parametrize("g,n", [(0, 2), (0, 1), (1, 0), (-1, 5), (0, 0)])
def test_unstable_keys_rejected(g, n):
    for vol in (vol_theta, vol_wp, vol_theta_top, vol_wp_top):
        with pytest.raises(UnstableError):
            vol(g, n)


def test_unknown_flavor():
    with pytest.raises(ValueError):
        volumes.volume("nope", 1, 1)


def test_cache_round_trip(tmp_path):
    old = volumes.get_cache()
    try:
        volumes.set_cache(VolCache(tmp_path))
        v = vol_theta(2, 2)
        w = vol_wp(1, 2)
        assert (tmp_path / "theta_g2_n2.json").exists()
        fresh = VolCache(tmp_path)
        assert fresh.get(("theta", 2, 2)) == v
        assert fresh.get(("wp", 1, 2)) == w
        assert ("theta", 2, 2) in fresh.keys()
        assert fresh.clear() >= 2
        assert fresh.get(("theta", 2, 2)) is None
    finally:
        volumes.set_cache(old)


def test_cache_concurrent_writers(tmp_path):
    cache = VolCache(tmp_path)
    p = EvenPoly(1, {(2,): 1})
    out = []
    threads = [threading.Thread(target=lambda: out.append(cache.put(("x", 1, 1), p))) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(o is out[0] for o in out)
    assert VolCache(tmp_path).get(("x", 1, 1)) == p


def test_cache_rejects_odd_file(tmp_path):
    (tmp_path / "theta_g1_n1.json").write_text(__import__("json").dumps(Poly(1, {(1,): 1}).to_json()))
    with pytest.raises(ValueError):
        VolCache(tmp_path).get(("theta", 1, 1))
