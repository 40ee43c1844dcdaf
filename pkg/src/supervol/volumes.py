"""Super (Theta) and Weil-Petersson volume polynomials.

Both recursions have the shape

    L1 V_{g,n}(L1, L_K) = 1/2 intD(x y P_{g,n}) + sum_j intR(x V_{g,n-1}(x, L_{K\\j}))
    P_{g,n}(x, y, L_K) = V_{g-1,n+1}(x, y, L_K) + sum V_{g1}(x, L_I) V_{g2}(y, L_J)

where the sum runs over ordered stable splittings g1 + g2 = g, I + J = K.
The WP version uses the derivative-form transforms, so its right side is
d/dL1 (L1 V) and is integrated from L1 = 0 before dividing.
"""
from __future__ import annotations

import json
import math
import os
import threading
from fractions import Fraction
from itertools import combinations
from pathlib import Path

from .algebra import EvenPoly, PiScalar, Poly, beta_integral
from .kernels import intD, intDM, intR, intRM

FLAVORS = ("theta", "wp", "theta-top", "wp-top")
CACHE_ENV = "SUPERVOL_CACHE_DIR"
TWO_PI_I_SQ = PiScalar.pi2(1, -4)  # (2 pi i)^2


class UnstableError(ValueError):
    """(g, n) with 2g - 2 + n <= 0, or an entry point that needs n >= 1."""


def check_stable(g: int, n: int, min_n: int = 1):
    if g < 0 or n < min_n:
        raise UnstableError(f"need g >= 0 and n >= {min_n}, got (g, n) = ({g}, {n})")
    if 2 * g - 2 + n <= 0:
        raise UnstableError(f"(g, n) = ({g}, {n}) is unstable: 2g - 2 + n = {2 * g - 2 + n}")


def euler(g: int, n: int) -> int:
    return 2 * g - 2 + n


# ---------------------------------------------------------------------------
# cache


class VolCache:
    """Memo table keyed by (flavor, g, n), optionally backed by one JSON file per key."""

    def __init__(self, directory: str | os.PathLike | None = None):
        self._mem: dict[tuple, EvenPoly] = {}
        self._lock = threading.Lock()
        self.directory = Path(directory) if directory else None
        if self.directory:
            self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, key: tuple) -> Path:
        flavor, g, n = key
        return self.directory / f"{flavor}_g{g}_n{n}.json"

    def get(self, key: tuple) -> EvenPoly | None:
        hit = self._mem.get(key)
        if hit is not None or self.directory is None:
            return hit
        path = self._path(key)
        if not path.exists():
            return None
        poly = Poly.from_json(json.loads(path.read_text()))
        if not isinstance(poly, EvenPoly):
            raise ValueError(f"cache file {path} does not hold an even polynomial")
        with self._lock:
            return self._mem.setdefault(key, poly)

    def put(self, key: tuple, poly: EvenPoly) -> EvenPoly:
        with self._lock:
            # first writer wins; recomputation is deterministic anyway
            poly = self._mem.setdefault(key, poly)
        if self.directory is not None:
            path = self._path(key)
            if not path.exists():
                tmp = path.with_suffix(".tmp")
                tmp.write_text(json.dumps(poly.to_json(), sort_keys=True))
                tmp.replace(path)
        return poly

    def keys(self) -> list[tuple]:
        keys = set(self._mem)
        if self.directory is not None:
            for p in self.directory.glob("*_g*_n*.json"):
                flavor, g, n = p.stem.rsplit("_", 2)
                keys.add((flavor, int(g[1:]), int(n[1:])))
        return sorted(keys)

    def clear(self) -> int:
        """Drop memory and disk entries; returns the number of files removed."""
        with self._lock:
            self._mem.clear()
        removed = 0
        if self.directory is not None:
            for p in self.directory.glob("*_g*_n*.json"):
                p.unlink()
                removed += 1
        return removed


_cache = VolCache(os.environ.get(CACHE_ENV) or None)


def get_cache() -> VolCache:
    return _cache


def set_cache(cache: VolCache) -> VolCache:
    global _cache
    _cache = cache
    return cache


def _memo(flavor: str, g: int, n: int, build) -> EvenPoly:
    key = (flavor, g, n)
    hit = _cache.get(key)
    if hit is not None:
        return hit
    poly = build()
    return _cache.put(key, poly)


# ---------------------------------------------------------------------------
# shared recursion plumbing


def _splittings(K: list[int], g: int):
    """Ordered (g1, I, g2, J) with g1 + g2 = g, I + J = K, both sides stable."""
    m = len(K)
    for r in range(m + 1):
        for I in combinations(K, r):
            J = [k for k in K if k not in I]
            for g1 in range(g + 1):
                g2 = g - g1
                if euler(g1, len(I) + 1) > 0 and euler(g2, len(J) + 1) > 0:
                    yield g1, list(I), g2, J


def _assemble_P(g: int, n: int, vol) -> Poly:
    """P_{g,n}(x, y, L_2..L_n) as a polynomial of arity n + 1 (slots: x, y, L_2, ..)."""
    arity = n + 1
    K = list(range(2, arity))  # slots of L_2..L_n
    P = Poly(arity)
    if g >= 1 and euler(g - 1, n + 1) > 0:
        P = P + vol(g - 1, n + 1)  # V(x, y, L_K) already in slot order
    for g1, I, g2, J in _splittings(K, g):
        a = vol(g1, len(I) + 1).embed(arity, [0] + I)
        b = vol(g2, len(J) + 1).embed(arity, [1] + J)
        if a and b:
            P = P + a * b
    return P


def _r_terms(g: int, n: int, vol, transform) -> Poly:
    """sum_j transform(x V_{g,n-1}(x, L_{K\\j})) placed back in slots (L1, .., Ln)."""
    out = Poly(n)
    if n < 2 or euler(g, n - 1) <= 0:
        return out
    W = vol(g, n - 1).mul_var(0)
    img = transform(W)  # slots (L1, Lj, L_rest...)
    for j in range(1, n):
        rest = [k for k in range(1, n) if k != j]
        out = out + img.embed(n, [0, j] + rest)
    return out


def _finish(rhs: Poly, derivative_form: bool) -> EvenPoly:
    if derivative_form:
        rhs = rhs.antiderivative(0)
    V = rhs.divide_by_var(0)
    if not isinstance(V, EvenPoly):
        raise ArithmeticError("recursion produced a polynomial that is not even")
    return V


# ---------------------------------------------------------------------------
# full recursions


def vol_theta(g: int, n: int) -> EvenPoly:
    """V^Theta_{g,n}(L_1, .., L_n), exact over Q[pi^2].

    >>> str(vol_theta(2, 1))
    '(3/256)·L1^2 + (9/64)·π^2'
    """
    check_stable(g, n)
    return _memo("theta", g, n, lambda: _vol_theta(g, n))


def _vol_theta(g: int, n: int) -> EvenPoly:
    if g == 0:
        return EvenPoly(n)  # Theta_{0,n} has degree above the dimension
    if (g, n) == (1, 1):
        return EvenPoly(1, {(0,): Fraction(1, 8)})
    xyP = _assemble_P(g, n, vol_theta).mul_var(0).mul_var(1)
    rhs = intD(xyP).scale(Fraction(1, 2)) + _r_terms(g, n, vol_theta, intR)
    return _finish(rhs, derivative_form=False)


def vol_wp(g: int, n: int) -> EvenPoly:
    """V^WP_{g,n}(L_1, .., L_n) with V_{0,3} = 1 and V_{1,1} = (4 pi^2 + L^2)/48.

    >>> str(vol_wp(0, 4))
    '(1/2)·(L1^2 + L2^2 + L3^2 + L4^2) + 2·π^2'
    """
    check_stable(g, n)
    return _memo("wp", g, n, lambda: _vol_wp(g, n))


def _vol_wp(g: int, n: int) -> EvenPoly:
    if (g, n) == (0, 3):
        return EvenPoly(3, {(0, 0, 0): 1})
    if (g, n) == (1, 1):
        return EvenPoly(1, {(2,): Fraction(1, 48), (0,): PiScalar.pi2(1, Fraction(1, 12))})
    xyP = _assemble_P(g, n, vol_wp).mul_var(0).mul_var(1)
    rhs = intDM(xyP).scale(Fraction(1, 2)) + _r_terms(g, n, vol_wp, intRM)
    return _finish(rhs, derivative_form=True)


# ---------------------------------------------------------------------------
# homogeneous top-degree recursions (no kernel tables involved)


def _compose(Q: Poly, sign: int) -> Poly:
    """Q(L1 + sign*Lj, rest) for Q in slots (x, rest); result slots (L1, Lj, rest)."""
    out: dict = {}
    for e, c in Q.items():
        a, rest = e[0], e[1:]
        for r in range(a + 1):
            w = math.comb(a, r) * (sign**r)
            key = (a - r, r) + rest
            out[key] = out[key] + c * w if key in out else c * w
    return Poly(Q.arity + 1, {k: v for k, v in out.items()})


def _top_r_terms(g: int, n: int, vol, piece) -> Poly:
    out = Poly(n)
    if n < 2 or euler(g, n - 1) <= 0:
        return out
    img = piece(vol(g, n - 1))
    for j in range(1, n):
        rest = [k for k in range(1, n) if k != j]
        out = out + img.embed(n, [0, j] + rest)
    return out


def vol_theta_top(g: int, n: int) -> EvenPoly:
    """Top-degree part of V^Theta_{g,n} from its own homogeneous recursion.

    L1 V(L1, L_K) = 1/2 sum_j [(Lj+L1) V(Lj+L1, ..) - (Lj-L1) V(Lj-L1, ..)]
                    + 1/2 int_0^L1 x (L1-x) P(x, L1-x, L_K) dx
    """
    check_stable(g, n)
    return _memo("theta-top", g, n, lambda: _vol_theta_top(g, n))


def _theta_top_r(W: Poly) -> Poly:
    Q = W.mul_var(0)  # x W(x, rest), odd in x
    # (Lj+L1)W(Lj+L1) - (Lj-L1)W(Lj-L1) = Q(L1+Lj) + Q(L1-Lj) since Q is odd
    return (_compose(Q, 1) + _compose(Q, -1)).scale(Fraction(1, 2))


def _vol_theta_top(g: int, n: int) -> EvenPoly:
    if g == 0:
        return EvenPoly(n)
    if (g, n) == (1, 1):
        return EvenPoly(1, {(0,): Fraction(1, 8)})
    P = _assemble_P(g, n, vol_theta_top)
    d_part: dict = {}
    for e, c in P.items():
        a, b, rest = e[0], e[1], e[2:]
        # 1/2 int_0^L1 x^(a+1) (L1-x)^(b+1) dx
        key = (a + b + 3,) + rest
        w = c * (beta_integral(a + 1, b + 1) / 2)
        d_part[key] = d_part[key] + w if key in d_part else w
    rhs = Poly(n, d_part) + _top_r_terms(g, n, vol_theta_top, _theta_top_r)
    return _finish(rhs, derivative_form=False)


def vol_wp_top(g: int, n: int) -> EvenPoly:
    """Top-degree part of V^WP_{g,n} from the homogeneous recursion

    L1 V(L1, L_K) = sum_j [ int_0^{L1-Lj} x (L1-x) V(x, ..) dx
                            + 1/2 int_{L1-Lj}^{L1+Lj} x (L1+Lj-x) V(x, ..) dx ]
                    + 1/2 int int_{x+y<=L1} x y (L1-x-y) P(x, y, L_K) dx dy
    """
    check_stable(g, n)
    return _memo("wp-top", g, n, lambda: _vol_wp_top(g, n))


def _wp_top_r(W: Poly) -> Poly:
    A1 = W.mul_var(0).antiderivative(0)  # int_0^s x W
    A2 = W.mul_var(0, 2).antiderivative(0)  # int_0^s x^2 W
    A1p, A1m = _compose(A1, 1), _compose(A1, -1)
    A2p, A2m = _compose(A2, 1), _compose(A2, -1)
    # first integral: L1 A1(L1-Lj) - A2(L1-Lj)
    first = A1m.mul_var(0) - A2m
    # second: 1/2 [(L1+Lj)(A1(L1+Lj) - A1(L1-Lj)) - (A2(L1+Lj) - A2(L1-Lj))]
    diff1 = A1p - A1m
    second = (diff1.mul_var(0) + diff1.mul_var(1) - (A2p - A2m)).scale(Fraction(1, 2))
    return first + second


def _vol_wp_top(g: int, n: int) -> EvenPoly:
    if (g, n) == (0, 3):
        return EvenPoly(3, {(0, 0, 0): 1})
    if (g, n) == (1, 1):
        return EvenPoly(1, {(2,): Fraction(1, 48)})
    P = _assemble_P(g, n, vol_wp_top)
    d_part: dict = {}
    for e, c in P.items():
        a, b, rest = e[0], e[1], e[2:]
        # 1/2 int_0^L x^(a+1) int_0^(L-x) y^(b+1) (L-x-y) dy dx
        w = c * (beta_integral(b + 1, 1) * beta_integral(a + 1, b + 3) / 2)
        key = (a + b + 5,) + rest
        d_part[key] = d_part[key] + w if key in d_part else w
    rhs = Poly(n, d_part) + _top_r_terms(g, n, vol_wp_top, _wp_top_r)
    return _finish(rhs, derivative_form=False)


def volume(flavor: str, g: int, n: int) -> EvenPoly:
    """Dispatch on theta | wp | theta-top | wp-top | vhat | vsw."""
    if flavor == "theta":
        return vol_theta(g, n)
    if flavor == "wp":
        return vol_wp(g, n)
    if flavor == "theta-top":
        return vol_theta_top(g, n)
    if flavor == "wp-top":
        return vol_wp_top(g, n)
    if flavor in ("vhat", "vsw"):
        return normalize_super(g, n, flavor)
    raise ValueError(f"unknown volume flavor {flavor!r}")


# ---------------------------------------------------------------------------
# evaluations at L = 2 pi i and normalizations


def vol_theta_n0(g: int) -> PiScalar:
    """V^Theta_{g,0} := V^Theta_{g,1}(2 pi i) / (2g - 2), g >= 2."""
    if g < 2:
        raise UnstableError("V^Theta_{g,0} needs g >= 2")
    v = vol_theta(g, 1).substitute_L2(0, TWO_PI_I_SQ)
    return v.coeff(()) / (2 * g - 2)


def vol_wp_n0(g: int) -> PiScalar:
    """V^WP_{g,0} from dV_{g,1}/dL (2 pi i) = 2 pi i (2g - 2) V_{g,0}, g >= 2."""
    if g < 2:
        raise UnstableError("V^WP_{g,0} needs g >= 2")
    Q = vol_wp(g, 1).derivative(0).divide_by_var(0)
    return Q.substitute_L2(0, TWO_PI_I_SQ).coeff(()) / (2 * g - 2)


def dilaton_eval_theta(g: int, n: int) -> tuple[Poly, Poly]:
    """(V_{g,n+1}(L, 2 pi i), (2g - 2 + n) V_{g,n}(L)); the two must agree."""
    check_stable(g, n + 1)
    if euler(g, n) <= 0:
        raise UnstableError(f"(g, n) = ({g}, {n}) is unstable")
    left = vol_theta(g, n + 1).substitute_L2(n, TWO_PI_I_SQ)
    if n == 0:
        right = Poly.constant(vol_theta_n0(g) * (2 * g - 2), 0)
    else:
        right = vol_theta(g, n).scale(euler(g, n))
    return left, right


def string_dilaton_wp(g: int, n: int) -> dict:
    """Both evaluation identities for V^WP at L_{n+1} = 2 pi i.

    string:  V_{g,n+1}(L, 2 pi i) = sum_k int_0^{L_k} L_k V_{g,n}(L) dL_k
    dilaton: (1/L) dV_{g,n+1}/dL_{n+1} at L^2 = -4 pi^2 equals (2g-2+n) V_{g,n}
    """
    if n < 1:
        raise UnstableError("the string identity needs n >= 1")
    check_stable(g, n)
    big = vol_wp(g, n + 1)
    small = vol_wp(g, n)
    s_left = big.substitute_L2(n, TWO_PI_I_SQ)
    s_right = Poly(n)
    for k in range(n):
        s_right = s_right + small.mul_var(k).antiderivative(k)
    Q = big.derivative(n).divide_by_var(n)
    d_left = Q.substitute_L2(n, TWO_PI_I_SQ)
    d_right = small.scale(euler(g, n))
    return {
        "string": (s_left, s_right),
        "dilaton": (d_left, d_right),
        "ok": s_left == s_right and d_left == d_right,
    }


def normalize_super(g: int, n: int, flavor: str) -> EvenPoly:
    """vhat: (-1)^n 2^(1-g-n) V^Theta;  vsw: 2^n vhat = (-1)^n 2^(1-g) V^Theta."""
    v = vol_theta(g, n)
    if flavor in ("vhat", "VhatWP"):
        return v.scale(Fraction((-1) ** n) * Fraction(2) ** (1 - g - n))
    if flavor in ("vsw", "VSW"):
        return v.scale(Fraction((-1) ** n) * Fraction(2) ** (1 - g))
    raise ValueError(f"unknown normalization {flavor!r}")


def stable_keys(max_euler: int, min_n: int = 1) -> list[tuple[int, int]]:
    """All (g, n) with 0 < 2g - 2 + n <= max_euler and n >= min_n."""
    out = []
    for g in range(max_euler // 2 + 2):
        for n in range(min_n, max_euler + 3):
            if 0 < euler(g, n) <= max_euler:
                out.append((g, n))
    return out
