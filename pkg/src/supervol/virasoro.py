"""psi-class intersection numbers, Virasoro operators and tau-function assembly.

Brackets are numbers with hbar stripped: theta_bracket(ks) is the integral of
Theta_{g,n} prod psi_i^{k_i} with g = sum(k) + 1, and kw_bracket(ks) the
integral of prod psi_i^{k_i} with 3g - 3 + n = sum(k).
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement

from .algebra import EvenPoly, TruncationError, TruncSeries, double_factorial as dfact

MODELS = ("theta", "kw")


@dataclass(frozen=True)
class Bounds:
    """Truncation: hbar power <= G, t-degree <= N, indices t_0..t_K."""

    G: int | None = 3
    N: int = 4
    K: int = 4


DESK = Bounds()

_memo: dict[tuple, Fraction] = {}
_lock = threading.Lock()


def _store(key, value):
    with _lock:
        return _memo.setdefault(key, value)


def genus(kind: str, ks) -> int | None:
    """Genus fixed by the dimension constraint, or None if there is none."""
    n, s = len(ks), sum(ks)
    if n == 0 or min(ks) < 0:
        return None
    if kind == "theta":
        return s + 1
    if kind == "kw":
        if (s - n + 3) % 3:
            return None
        g = (s - n + 3) // 3
        return g if g >= 0 and 2 * g - 2 + n > 0 else None
    raise ValueError(f"unknown bracket kind {kind!r}")


def _splits(K: tuple):
    """Ordered (I, J) with I + J = K as position subsets."""
    idx = range(len(K))
    for r in range(len(K) + 1):
        for I in combinations(idx, r):
            J = [K[p] for p in idx if p not in I]
            yield [K[p] for p in I], J


def _recurse(kind: str, ks: tuple, pivot: int) -> Fraction:
    k1 = ks[pivot]
    K = ks[:pivot] + ks[pivot + 1:]
    get = theta_bracket if kind == "theta" else kw_bracket
    # theta: L_m with m = k1;  kw: L'_m with m = k1 - 1
    m = k1 if kind == "theta" else k1 - 1
    acc = Fraction(0)
    for j, kj in enumerate(K):
        rest = K[:j] + K[j + 1:]
        acc += Fraction(dfact(2 * kj + 2 * m + 1), dfact(2 * kj - 1)) * get(rest + (kj + m,))
    if m >= 1:
        inner = Fraction(0)
        for i in range(m):
            jj = m - 1 - i
            c = dfact(2 * i + 1) * dfact(2 * jj + 1)
            s = get((i, jj) + K)
            for I, J in _splits(K):
                s += get((i, *I)) * get((jj, *J))
            inner += c * s
        acc += inner / 2
    if m == 0 and not K:
        acc += Fraction(1, 8)
    if m == -1 and K == (0, 0):
        acc += 1
    return acc / dfact(2 * k1 + 1)


def _bracket(kind: str, ks, pivot: int | None) -> Fraction:
    ks = tuple(int(k) for k in ks)
    if any(k < 0 for k in ks) or genus(kind, ks) is None:
        return Fraction(0)
    if pivot is not None:
        # any index may drive the recursion; used to test pivot independence
        return _recurse(kind, ks, pivot)
    key = (kind,) + tuple(sorted(ks))
    hit = _memo.get(key)
    if hit is not None:
        return hit
    srt = tuple(sorted(ks))
    # tau_0 (and tau_1 for kw) insertions reduce n at no cost: string/dilaton
    cheap = 1 if kind == "kw" else 0
    return _store(key, _recurse(kind, srt, 0 if srt[0] <= cheap else len(srt) - 1))


def theta_bracket(ks, pivot: int | None = None) -> Fraction:
    """Integral of Theta_{g,n} prod psi^{k_i} over the moduli of stable curves.

    >>> [theta_bracket(k) for k in [(0,), (1,), (2,), (1, 1)]]
    [Fraction(1, 8), Fraction(3, 128), Fraction(15, 1024), Fraction(63, 512)]
    """
    return _bracket("theta", ks, pivot)


def kw_bracket(ks, pivot: int | None = None) -> Fraction:
    """Witten-Kontsevich intersection number of psi classes.

    >>> [kw_bracket(k) for k in [(0, 0, 0), (1,), (0, 0, 0, 1), (4,)]]
    [Fraction(1, 1), Fraction(1, 24), Fraction(1, 1), Fraction(1, 1152)]
    """
    return _bracket("kw", ks, pivot)


def bracket(kind: str, ks, pivot: int | None = None) -> Fraction:
    return _bracket(kind, ks, pivot)


def coeff_dictionary(v: EvenPoly) -> dict[tuple, Fraction]:
    """Brackets read off a top-degree volume via L^(2k) = 2^k k! t_k.

    Keys are sorted index tuples.  Every monomial in one permutation orbit must
    give the same value.
    """
    out: dict[tuple, Fraction] = {}
    for e, c in v.items():
        if not c.is_rational():
            raise ValueError("coeff_dictionary needs a top-degree part (no pi powers)")
        ks = tuple(x // 2 for x in e)
        val = c.rational()
        for k in ks:
            val *= 2**k * math.factorial(k)
        key = tuple(sorted(ks))
        if key in out and out[key] != val:
            raise ValueError(f"volume is not symmetric at {key}")
        out[key] = val
    return out


def multisets(n: int, K: int):
    """Sorted index tuples of length n with entries in 0..K."""
    return combinations_with_replacement(range(K + 1), n)


def symmetry_weight(ks: tuple) -> Fraction:
    """1/n! times the number of orderings: 1/prod(multiplicity!)."""
    w = 1
    for k in set(ks):
        w *= math.factorial(ks.count(k))
    return Fraction(1, w)


def assemble_log_tau(model: str, bounds: Bounds = DESK, max_hbar: int | None = None) -> TruncSeries:
    """log Z = sum hbar^(g-1)/n! <prod tau_k> prod t_k within the bounds.

    For theta the hbar power is sum(k) and the series is hbar-truncated at G.
    For kw the series has an hbar^-1 part, so it is stored with G=None; every
    genus allowed by (N, K) is included unless max_hbar caps the pieces.
    """
    kind = _kind(model)
    K, N = bounds.K, bounds.N
    G = bounds.G if kind == "theta" else None
    cap = bounds.G if kind == "theta" else max_hbar
    terms = {}
    for n in range(1, N + 1):
        for ks in multisets(n, K):
            g = genus(kind, ks)
            if g is None or (cap is not None and g - 1 > cap):
                continue
            val = bracket(kind, ks)
            if not val:
                continue
            e = [0] * (K + 1)
            for k in ks:
                e[k] += 1
            terms[(g - 1, tuple(e))] = val * symmetry_weight(ks)
    return TruncSeries(K, N, G, terms)


def assemble_tau(model: str, bounds: Bounds = DESK, max_hbar: int | None = None) -> TruncSeries:
    """Z = exp(log Z); bounds with N = 0 give the series 1."""
    return assemble_log_tau(model, bounds, max_hbar).exp()


def _kind(model: str) -> str:
    m = model.lower()
    if m in ("theta", "bgw"):
        return "theta"
    if m in ("kw", "wp"):
        return "kw"
    raise ValueError(f"unknown model {model!r}")


# ---------------------------------------------------------------------------
# Virasoro operators


@dataclass(frozen=True)
class VirasoroOp:
    """L_m (BGW form, m >= 0) or L'_m (KW form, m >= -1)."""

    m: int
    model: str = "theta"

    def __post_init__(self):
        kind = _kind(self.model)
        object.__setattr__(self, "model", kind)
        low = 0 if kind == "theta" else -1
        if self.m < low:
            raise ValueError(f"{kind} Virasoro operators need m >= {low}")

    def __call__(self, Z: TruncSeries) -> TruncSeries:
        return apply_virasoro(self, Z)


def lhat(m: int, Z: TruncSeries) -> TruncSeries:
    """hat L_m Z, exact where its own truncation says so."""
    out = TruncSeries(Z.K, Z.N, Z.G)
    if m >= 1:
        acc = None
        for i in range(m):
            j = m - 1 - i
            if max(i, j) > Z.K:
                raise TruncationError(f"d/dt_{max(i, j)} is outside t_0..t_{Z.K}")
            term = Z.derivative(i).derivative(j).scale(dfact(2 * i + 1) * dfact(2 * j + 1))
            acc = term if acc is None else acc + term
        out = out + acc.scale(Fraction(1, 2)).mul_hbar(1)
    for i in range(max(0, -m), Z.K + 1):
        if i + m > Z.K:
            break
        c = Fraction(dfact(2 * i + 2 * m + 1), dfact(2 * i - 1))
        out = out + Z.derivative(i + m).mul_t(i).scale(c)
    if m == 0:
        out = out + Z.scale(Fraction(1, 8))
    if m == -1:
        if Z.G is not None:
            raise ValueError("the t_0^2/hbar term needs a series without hbar truncation")
        out = out + Z.mul_t(0, 2).mul_hbar(-1).scale(Fraction(1, 2))
    return out


def apply_virasoro(op: VirasoroOp, Z: TruncSeries) -> TruncSeries:
    """L_m Z or L'_m Z, cut to the monomials it determines exactly.

    Derivatives lower the exact degree (by 2 when m >= 1).  The term
    t_i d/dt_{i+m} is missing for i + m > K, so monomials containing t_i with
    i > K - m are dropped.
    """
    m = op.m
    d = m if op.model == "theta" else m + 1
    if d > Z.K:
        raise TruncationError(f"d/dt_{d} is outside t_0..t_{Z.K}")
    if Z.N - (2 if m >= 1 else 1) < 0:
        raise TruncationError("series is too shallow for this operator")
    lead = Z.derivative(d).scale(Fraction(-dfact(2 * d + 1), 2))
    out = lead + lhat(m, Z).scale(Fraction(1, 2))
    keepK = Z.K - max(m, 0)
    return out.truncate(K=keepK)


def virasoro_check(model: str, m: int, bounds: Bounds = DESK) -> TruncSeries:
    """L_m applied to a tau function assembled deep enough to be exact on bounds.

    The tau function is built with t-degree N + 2 and indices up to K + m, so
    the output is exact through (G, N, K).  Returns the residual on that range.

    For kw the hbar^-1 genus-zero part lets high-genus pieces reach low hbar
    powers of Z.  A piece with hbar^p meets at most (d - 1)/3 genus-zero
    factors in degree d, so pieces up to p = G + 1 + (N + 1)//3 make Z exact
    for hbar <= G + 1 and degree <= N + 2, which is all L'_m reads.
    """
    kind = _kind(model)
    op = VirasoroOp(m, kind)
    deep = Bounds(bounds.G, bounds.N + 2, max(bounds.K + max(m, 0), m + 1))
    cap = None
    if kind == "kw" and bounds.G is not None:
        cap = bounds.G + 1 + (bounds.N + 1) // 3
    Z = assemble_tau(kind, deep, max_hbar=cap)
    res = apply_virasoro(op, Z)
    res = res.truncate(N=bounds.N, K=bounds.K)
    if kind == "kw" and bounds.G is not None:
        res = res.filter(lambda h, e: h <= bounds.G)
    return res


def bracket_table(kind: str, max_euler: int, K: int | None = None) -> list[dict]:
    """Nonzero brackets with 2g - 2 + n <= max_euler, JSON ready."""
    from .algebra import rat_to_json

    rows = []
    for n in range(1, max_euler + 3):
        top = max_euler + 2 if K is None else K
        for ks in multisets(n, top):
            g = genus(kind, ks)
            if g is None or 2 * g - 2 + n > max_euler:
                continue
            v = bracket(kind, ks)
            if v:
                rows.append({"kind": kind, "ks": list(ks), "g": g, "n": n, "value": rat_to_json(v)})
    return rows
