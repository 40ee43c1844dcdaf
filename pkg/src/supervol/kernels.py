"""Kernel moments and the monomial transforms that drive the volume recursions.

The kernels themselves never appear; only their moments do:

    int_0^inf x^(2k+1) H(x, t) dx   = F_{2k+1}(t)
    int_0^inf x^(2k+1) H^M(x, t) dx = F^M_{2k+1}(t)

Memoization uses functools.lru_cache, which is safe under concurrent lookup.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .algebra import EvenPoly, LaurentSeries, OddPoly, PiScalar, Poly, cos_2piz


@lru_cache(maxsize=None)
def _sec_series(n: int) -> LaurentSeries:
    return cos_2piz(2 * n + 2).inverse()


def sec_coeff(n: int) -> PiScalar:
    """a_n in 1/cos(2 pi x) = sum a_n x^(2n)/(2n)!.

    >>> [str(sec_coeff(n)) for n in range(3)]
    ['1', '4·π^2', '80·π^4']
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    return _sec_series(n).coeff(2 * n) * math.factorial(2 * n)


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n with B_1 = -1/2."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return Fraction(1)
    if n > 1 and n % 2:
        return Fraction(0)
    return -sum(math.comb(n + 1, k) * bernoulli(k) for k in range(n)) / (n + 1)


@lru_cache(maxsize=None)
def zeta_even(i: int) -> PiScalar:
    """zeta(2i) in Q[pi^2], with zeta(0) = -1/2.

    >>> [str(zeta_even(i)) for i in range(3)]
    ['-1/2', '(1/6)·π^2', '(1/90)·π^4']
    """
    if i < 0:
        raise ValueError("i must be >= 0")
    c = Fraction((-1) ** (i + 1) * 4**i) * bernoulli(2 * i) / (2 * math.factorial(2 * i))
    return PiScalar.pi2(i, c)


@lru_cache(maxsize=None)
def F(k: int) -> OddPoly:
    """F_{2k+1}(t) = sum_i C(2k+1, 2i+1) a_{k-i} t^(2i+1); odd and monic.

    >>> str(F(1))
    'L1^3 + 12·π^2·L1'
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    terms = {(2 * i + 1,): sec_coeff(k - i) * math.comb(2 * k + 1, 2 * i + 1) for i in range(k + 1)}
    return OddPoly(1, terms)


@lru_cache(maxsize=None)
def FM(k: int) -> EvenPoly:
    """F^M_{2k+1}(t) = (2k+1)! sum_i zeta(2i)(2^(2i+1)-4) t^(2k+2-2i)/(2k+2-2i)!.

    >>> str(FM(0))
    '(1/2)·L1^2 + (2/3)·π^2'
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    f = math.factorial(2 * k + 1)
    terms = {}
    for i in range(k + 2):
        d = 2 * k + 2 - 2 * i
        terms[(d,)] = zeta_even(i) * Fraction(f * (2 ** (2 * i + 1) - 4), math.factorial(d))
    return EvenPoly(1, terms)


def _shift_sum(m: int) -> dict:
    """Coefficients of ((a+b)^m + (a-b)^m)/2 keyed by (power of a, power of b)."""
    return {(m - r, r): math.comb(m, r) for r in range(0, m + 1, 2)}


@lru_cache(maxsize=None)
def _d_image(a: int, b: int, mirz: bool) -> tuple:
    """Image of x^a y^b under the D (or H^M) transform, as ((power of L1, coeff), ...)."""
    w = Fraction(math.factorial(a) * math.factorial(b), math.factorial(a + b + 1))
    k = (a + b) // 2  # a+b+1 = 2k+1
    poly = FM(k) if mirz else F(k)
    return tuple((e[0], c * w) for e, c in poly.items())


@lru_cache(maxsize=None)
def _r_image(a: int, mirz: bool) -> tuple:
    """Image of x^a under the R (or R^M derivative) transform: ((p1, pj, coeff), ...)."""
    poly = FM((a - 1) // 2) if mirz else F((a - 1) // 2)
    acc: dict = {}
    for (m,), c in poly.items():
        for (p, q), b in _shift_sum(m).items():
            acc[(p, q)] = acc.get((p, q), PiScalar()) + c * b
    return tuple((p, q, c) for (p, q), c in sorted(acc.items()) if c)


def _check_odd(e: tuple, slots: int):
    for x in e[:slots]:
        if x % 2 == 0:
            raise ValueError(f"transform needs odd exponents in the integrated variables, got {e}")


def _int_d(P: Poly, mirz: bool) -> Poly:
    if P.arity < 2:
        raise ValueError("D transform needs the variables (x, y, ...)")
    out: dict = {}
    for e, c in P.items():
        _check_odd(e, 2)
        rest = e[2:]
        for p, w in _d_image(e[0], e[1], mirz):
            key = (p,) + rest
            out[key] = out[key] + c * w if key in out else c * w
    return Poly(P.arity - 1, out)


def _int_r(P: Poly, mirz: bool) -> Poly:
    if P.arity < 1:
        raise ValueError("R transform needs the variable x")
    out: dict = {}
    for e, c in P.items():
        _check_odd(e, 1)
        rest = e[1:]
        for p, q, w in _r_image(e[0], mirz):
            key = (p, q) + rest
            out[key] = out[key] + c * w if key in out else c * w
    return Poly(P.arity + 1, out)


def intD(P: Poly) -> Poly:
    """int int D(L1, x, y) P(x, y, ...) dx dy for P odd in x and y.

    Extra variables of P are carried along; the result has variables (L1, ...).

    >>> str(intD(Poly(2, {(1, 1): 1})))
    '(1/6)·L1^3 + 2·π^2·L1'
    """
    return _int_d(P, False)


def intR(P: Poly) -> Poly:
    """int R(L1, Lj, x) P(x, ...) dx for P odd in x; result in (L1, Lj, ...).

    >>> str(intR(Poly(1, {(3,): 1})))
    'L1^3 + 3·L1·L2^2 + 12·π^2·L1'
    """
    return _int_r(P, False)


def intDM(P: Poly) -> Poly:
    """d/dL1 of int int D^M(L1, x, y) P dx dy, as x^a y^b -> a! b!/(a+b+1)! F^M_{a+b+1}(L1)."""
    return _int_d(P, True)


def intRM(P: Poly) -> Poly:
    """d/dL1 of int R^M(L1, Lj, x) P dx, as x^a -> (F^M_a(L1+Lj) + F^M_a(L1-Lj))/2."""
    return _int_r(P, True)


# ---------------------------------------------------------------------------
# floating point oracles (tests and the kernel sanity check only)


def H(x: float, t: float) -> float:
    return (1 / math.cosh((x - t) / 4) - 1 / math.cosh((x + t) / 4)) / (4 * math.pi)


def HM(x: float, t: float) -> float:
    def fermi(u):
        # 1/(1+e^u) without overflow
        if u > 0:
            v = math.exp(-u)
            return v / (1 + v)
        return 1 / (1 + math.exp(u))

    return fermi((x + t) / 2) + fermi((x - t) / 2)


def moment_quadrature(kind: str, k: int, t: float) -> float:
    """Numerical int_0^inf x^(2k+1) K(x, t) dx for K = H ('theta') or H^M ('wp')."""
    from scipy.integrate import quad

    kern = {"theta": H, "wp": HM}[kind]
    # both kernels decay like exp(-x/4) or faster beyond x = t
    upper = t + 400.0
    val, _ = quad(lambda x: x ** (2 * k + 1) * kern(x, t), 0, upper, points=[t], limit=400,
                  epsabs=0, epsrel=1e-12)
    return val


def moment_exact(kind: str, k: int, t: float) -> float:
    poly = F(k) if kind == "theta" else FM(k)
    return poly.approx([t])


def kernel_table(kmax: int) -> dict:
    """JSON dump of a_n, zeta(2i), F and F^M for documentation."""
    return {
        "sec_coeffs": [sec_coeff(n).to_json() for n in range(kmax + 1)],
        "zeta_even": [zeta_even(i).to_json() for i in range(kmax + 2)],
        "F": [F(k).to_json() for k in range(kmax + 1)],
        "FM": [FM(k).to_json() for k in range(kmax + 1)],
    }
