"""Topological recursion on curves x = z^2/2 with one branch point at z = 0.

Correlators are stored as coefficient functions with the dz_i stripped,

    omega_{g,n} = sum_beta c_beta prod z_i^-(2 beta_i + 2) dz_i,

so every stored function is even in each variable.  With
kappa(z) = 1/(z (y(z) - y(-z))) the recursion reads

    W_{g,n}(z1, zK) = [kappa(z1) (W_{g-1,n+1}(z1, z1, zK) + sum' W(z1, zI) W(z1, zJ))]^+
                    + 2 sum_j [kappa(z1) W_{g,n-1}(z1, zK\\j) sum_m (m+1) z1^m / zj^(m+2)]^+

where [.]^+ keeps the negative even powers of z1 and sum' skips the unstable
factors (0,1) and (0,2).  The bases are W_{1,1} = [kappa(z) / (4 z^2)]^+ and
W_{0,3} = 2 kappa_{-2} / (z1 z2 z3)^2.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Callable

from .algebra import (
    LaurentSeries, PiScalar, TruncationError, TruncSeries, cos_2piz, double_factorial,
    pi_factor, _join_terms, _term_str, sin_2piz_over_2pi,
)
from .volumes import _splittings, check_stable, euler


@dataclass(frozen=True)
class SpectralCurve:
    """x = z^2/2 with y given as a Laurent series known below z^order."""

    name: str
    y: Callable[[int], LaurentSeries] = field(compare=False)
    irregular: bool = False

    @classmethod
    def from_series(cls, name: str, y: LaurentSeries, irregular: bool = False) -> "SpectralCurve":
        if y.low is not None and y.low < -1:
            raise ValueError("y may have at most a simple pole at z = 0")

        def y_fn(order: int) -> LaurentSeries:
            if y.order is not None and y.order < order:
                raise TruncationError(f"y of curve {name!r} is known only below z^{y.order}")
            return LaurentSeries(y.terms, order)

        return cls(name, y_fn, irregular)

    def pole_bound(self, g: int, n: int) -> int:
        """Maximal pole order per variable of omega_{g,n}."""
        return 2 * g if self.irregular else 6 * g - 4 + 2 * n


def _theta_y(order: int) -> LaurentSeries:
    return cos_2piz(order + 1).shift(-1)


def _sine_y(order: int) -> LaurentSeries:
    return sin_2piz_over_2pi(order)


def _airy_y(order: int) -> LaurentSeries:
    return LaurentSeries({1: 1}, order)


THETA = SpectralCurve("theta", _theta_y, irregular=True)
SINE = SpectralCurve("sine", _sine_y)
AIRY = SpectralCurve("airy", _airy_y)
CURVES = {c.name: c for c in (THETA, SINE, AIRY)}


def get_curve(name: str) -> SpectralCurve:
    try:
        return CURVES[name]
    except KeyError:
        raise ValueError(f"unknown curve {name!r}; choose from {sorted(CURVES)}") from None


# ---------------------------------------------------------------------------
# kappa and Phi

_kappa_cache: dict[tuple, LaurentSeries] = {}
_lock = threading.Lock()


def recursion_prefactor(curve: SpectralCurve, order: int = 8) -> LaurentSeries:
    """kappa(z) = 1/(z (y(z) - y(-z))) known below z^order.

    >>> str(recursion_prefactor(THETA, 4))
    '1/2 + π^2·z^2 + O(z^4)'
    >>> str(recursion_prefactor(SINE, 2))
    '(1/2)·z^-2 + (1/3)·π^2 + O(z^2)'
    """
    key = (curve, order)
    hit = _kappa_cache.get(key)
    if hit is not None:
        return hit
    extra = 1
    while True:
        y = curve.y(order + extra)
        D = (y - y.reflect()).shift(1)  # z (y(z) - y(-z))
        if not D:
            raise ValueError(f"curve {curve.name!r} is degenerate: y(z) - y(-z) vanishes")
        k = D.inverse()
        if k.order is None or k.order >= order:
            k = LaurentSeries(k.terms, order)
            break
        extra += order - k.order
    if not k.is_even():
        raise ValueError("kappa must be even in z")
    with _lock:
        return _kappa_cache.setdefault(key, k)


def dilaton_potential(curve: SpectralCurve, order: int) -> LaurentSeries:
    """Phi with d Phi = omega_{0,1} = -y dx = -y z dz, known below z^order."""
    return (curve.y(order).shift(1)).integral().scale(-1)


# ---------------------------------------------------------------------------
# correlator forms


class CorrForm:
    """sum_beta c_beta prod dz_i / z_i^(2 beta_i + 2)."""

    __slots__ = ("g", "n", "terms")

    def __init__(self, g: int, n: int, terms: dict | None = None):
        self.g, self.n = g, n
        t = {}
        for b, c in (terms or {}).items():
            b = tuple(int(x) for x in b)
            if len(b) != n or min(b, default=0) < 0:
                raise ValueError(f"bad pole index {b} for n = {n}")
            c = PiScalar.coerce(c)
            if c:
                t[b] = t[b] + c if b in t else c
        self.terms = {b: c for b, c in t.items() if c}

    def __eq__(self, other):
        if not isinstance(other, CorrForm):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    __hash__ = None

    def __sub__(self, other: "CorrForm") -> "CorrForm":
        t = dict(self.terms)
        for b, c in other.terms.items():
            t[b] = t[b] - c if b in t else -c
        return CorrForm(self.g, self.n, t)

    def scale(self, c) -> "CorrForm":
        return CorrForm(self.g, self.n, {b: x * c for b, x in self.terms.items()})

    def max_pole(self) -> int:
        return max((2 * x + 2 for b in self.terms for x in b), default=0)

    def is_symmetric(self) -> bool:
        for p in permutations(range(self.n)):
            for b, c in self.terms.items():
                if self.terms.get(tuple(b[i] for i in p)) != c:
                    return False
        return True

    def to_json(self) -> dict:
        return {
            "g": self.g,
            "n": self.n,
            "terms": [{"pole_orders": [2 * x + 2 for x in b], "coeff": c.to_json()}
                      for b, c in sorted(self.terms.items())],
        }

    @classmethod
    def from_json(cls, data) -> "CorrForm":
        t = {}
        for item in data["terms"]:
            orders = item["pole_orders"]
            if any(p % 2 or p < 2 for p in orders):
                raise ValueError(f"pole orders must be even and >= 2, got {orders}")
            t[tuple(p // 2 - 1 for p in orders)] = PiScalar.from_json(item["coeff"])
        return cls(int(data["g"]), int(data["n"]), t)

    def format(self) -> str:
        parts = []
        for b in sorted(self.terms, key=lambda b: (-sum(b), b), reverse=True):
            dz = "·".join(f"dz{i + 1}/z{i + 1}^{2 * x + 2}" for i, x in enumerate(b))
            for j, q in enumerate(self.terms[b].coeffs):
                if q:
                    parts.append(_term_str(q, ([pi_factor(j)] if j else []) + [dz]))
        return _join_terms(parts)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"CorrForm(g={self.g}, n={self.n}, {self.format()!r})"


def laplace_bridge(v, g: int | None = None) -> CorrForm:
    """c prod L_i^(2 a_i) -> c prod (2 a_i + 1)! dz_i / z_i^(2 a_i + 2).

    >>> from .algebra import EvenPoly
    >>> str(laplace_bridge(EvenPoly(1, {(0,): Fraction(1, 8)})))
    '(1/8)·dz1/z1^2'
    """
    t = {}
    for e, c in v.items():
        w = 1
        for x in e:
            w *= math.factorial(x + 1)
        t[tuple(x // 2 for x in e)] = c * w
    return CorrForm(-1 if g is None else g, v.arity, t)


# ---------------------------------------------------------------------------
# recursion

_corr_cache: dict[tuple, CorrForm] = {}


def _principal(curve: SpectralCurve, F: dict) -> dict:
    """[kappa * F]^+ for F: spectator key -> {z exponent: coeff}; returns beta-keyed terms."""
    lowest = min((a for f in F.values() for a in f), default=0)
    kap = recursion_prefactor(curve, max(-1 - lowest, 1))
    kt = sorted(kap.terms.items())
    out: dict = {}
    for spect, f in F.items():
        for a, c in f.items():
            for k, kc in kt:
                e = a + k
                if e > -2:
                    break
                if e % 2:
                    continue
                key = ((-e - 2) // 2,) + spect
                x = c * kc
                out[key] = out[key] + x if key in out else x
    return out


def _acc(F: dict, spect: tuple, a: int, c):
    f = F.setdefault(spect, {})
    f[a] = f[a] + c if a in f else c


def tr_correlator(curve: SpectralCurve, g: int, n: int) -> CorrForm:
    """omega_{g,n} of the curve.

    >>> str(tr_correlator(THETA, 1, 1))
    '(1/8)·dz1/z1^2'
    """
    check_stable(g, n)
    key = (curve, g, n)
    hit = _corr_cache.get(key)
    if hit is not None:
        return hit
    form = _correlator(curve, g, n)
    with _lock:
        return _corr_cache.setdefault(key, form)


def _correlator(curve: SpectralCurve, g: int, n: int) -> CorrForm:
    if (g, n) == (0, 3):
        k2 = recursion_prefactor(curve, 1).coeff(-2)
        return CorrForm(0, 3, {(0, 0, 0): k2 * 2})
    if (g, n) == (1, 1):
        return CorrForm(1, 1, _principal(curve, {(): {-2: PiScalar.coerce(Fraction(1, 4))}}))
    m = n - 1  # spectators z_2..z_n at positions 0..m-1
    F: dict = {}
    if g >= 1 and euler(g - 1, n + 1) > 0:
        for b, c in tr_correlator(curve, g - 1, n + 1).terms.items():
            _acc(F, b[2:], -(2 * b[0] + 2) - (2 * b[1] + 2), c)
    for g1, I, g2, J in _splittings(list(range(m)), g):
        A = tr_correlator(curve, g1, len(I) + 1).terms
        B = tr_correlator(curve, g2, len(J) + 1).terms
        for a, ca in A.items():
            for b, cb in B.items():
                spect = [0] * m
                for i, p in enumerate(I):
                    spect[p] = a[1 + i]
                for i, p in enumerate(J):
                    spect[p] = b[1 + i]
                _acc(F, tuple(spect), -(2 * a[0] + 2) - (2 * b[0] + 2), ca * cb)
    if m >= 1 and euler(g, n - 1) > 0:
        low = recursion_prefactor(curve, 1).low or 0
        prev = tr_correlator(curve, g, n - 1).terms
        for j in range(m):
            rest = [p for p in range(m) if p != j]
            for b, c in prev.items():
                # 2 sum_{m even} (m+1) z^m / z_j^(m+2); higher m cannot reach the principal part
                for half in range(0, b[0] + 1 - low // 2 + 1):
                    mm = 2 * half
                    if mm - (2 * b[0] + 2) + low > -2:
                        break
                    spect = [0] * m
                    spect[j] = half
                    for i, p in enumerate(rest):
                        spect[p] = b[1 + i]
                    _acc(F, tuple(spect), mm - (2 * b[0] + 2), c * (2 * (mm + 1)))
    return CorrForm(g, n, _principal(curve, F))


def clear_cache():
    with _lock:
        _corr_cache.clear()
        _kappa_cache.clear()


# ---------------------------------------------------------------------------
# dilaton and partition function


def tr_dilaton_check(curve: SpectralCurve, g: int, n: int) -> dict:
    """Res_{z=0} Phi(z) omega_{g,n+1}(z, zK) against (2 - 2g - n) omega_{g,n}(zK)."""
    check_stable(g, n)
    big = tr_correlator(curve, g, n + 1)
    top = max((b[0] for b in big.terms), default=0)
    phi = dilaton_potential(curve, 2 * top + 3)
    lhs: dict = {}
    for b, c in big.terms.items():
        x = c * phi.coeff(2 * b[0] + 1)
        if x:
            lhs[b[1:]] = lhs[b[1:]] + x if b[1:] in lhs else x
    left = CorrForm(g, n, lhs)
    right = tr_correlator(curve, g, n).scale(2 - 2 * g - n)
    return {"check": f"tr-dilaton-{curve.name}-g{g}-n{n}", "ok": left == right,
            "lhs": str(left), "rhs": str(right)}


def tr_log_partition(curve: SpectralCurve, G: int, N: int, K: int) -> TruncSeries:
    """sum hbar^(g-1)/n! omega_{g,n} with z^-(2b+2) -> t_b / (2b+1)!!.

    Keeps g - 1 <= G, n <= N, b <= K.  The hbar bound is an ideal for the
    irregular curve (no genus 0 terms); otherwise the series has G=None.
    """
    terms: dict = {}
    for g in range(0, G + 2):
        for n in range(1, N + 1):
            if euler(g, n) <= 0:
                continue
            form = tr_correlator(curve, g, n)
            w = Fraction(1, math.factorial(n))
            for b, c in form.terms.items():
                if max(b) > K:
                    continue
                e = [0] * (K + 1)
                x = c * w
                for k in b:
                    e[k] += 1
                    x = x / double_factorial(2 * k + 1)
                key = (g - 1, tuple(e))
                terms[key] = terms[key] + x if key in terms else x
    if curve.irregular:
        return TruncSeries(K, N, G, terms)
    return TruncSeries(K, N, None, terms).filter(lambda h, e: h <= G)


def tr_partition(curve: SpectralCurve, G: int = 2, N: int = 4, K: int = 4) -> TruncSeries:
    """Z^S = exp of tr_log_partition."""
    return tr_log_partition(curve, G, N, K).exp()


def pi_slice(S: TruncSeries, j: int = 0) -> TruncSeries:
    """Coefficient of pi^(2j) in every term of a series over Q[pi^2]."""
    t = {}
    for k, c in S.items():
        q = c.coeff(j) if isinstance(c, PiScalar) else (c if j == 0 else 0)
        if q:
            t[k] = q
    return TruncSeries._raw(S.K, S.N, S.G, t)
