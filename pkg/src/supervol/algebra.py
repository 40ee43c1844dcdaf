"""Exact arithmetic over Q[pi^2]: scalars, polynomials, Laurent series, truncated series.

Everything here is immutable and built on :class:`fractions.Fraction`.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Mapping, Sequence

Rat = Fraction


class TruncationError(ValueError):
    """A coefficient was requested beyond what the truncation guarantees."""


def rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot make an exact rational from {x!r}")


def rat_to_json(q: Fraction) -> dict:
    return {"num": str(q.numerator), "den": str(q.denominator)}


def rat_from_json(d: Mapping) -> Fraction:
    return Fraction(int(d["num"]), int(d["den"]))


def fmt_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def double_factorial(n: int) -> int:
    """n!! with the convention (-1)!! = 0!! = 1."""
    if n < -1:
        raise ValueError("double factorial of n < -1")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


# ---------------------------------------------------------------------------
# Q[pi^2]


class PiScalar:
    """An element sum_j c_j pi^(2j) of Q[pi^2].

    >>> a = PiScalar((Fraction(1, 2), 1))
    >>> str(a * a)
    '1/4 + π^2 + π^4'
    """

    __slots__ = ("_c", "_h")

    def __init__(self, coeffs: Iterable = ()):
        c = [rat(x) for x in coeffs]
        while c and not c[-1]:
            c.pop()
        self._c = tuple(c)
        self._h = None

    @classmethod
    def _raw(cls, c: tuple) -> "PiScalar":
        obj = cls.__new__(cls)
        obj._c = c
        obj._h = None
        return obj

    @classmethod
    def coerce(cls, x) -> "PiScalar":
        if isinstance(x, PiScalar):
            return x
        return cls((x,))

    @classmethod
    def pi2(cls, power: int = 1, coeff=1) -> "PiScalar":
        """coeff * pi^(2*power)."""
        if power < 0:
            raise ValueError("negative pi power is outside Q[pi^2]")
        return cls([0] * power + [coeff])

    @property
    def coeffs(self) -> tuple:
        return self._c

    def __bool__(self) -> bool:
        return bool(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def pi_powers(self) -> list[int]:
        """Exponents j with a nonzero pi^(2j) coefficient."""
        return [j for j, c in enumerate(self._c) if c]

    def coeff(self, j: int) -> Fraction:
        return self._c[j] if 0 <= j < len(self._c) else Fraction(0)

    def is_rational(self) -> bool:
        return len(self._c) <= 1

    def rational(self) -> Fraction:
        if len(self._c) > 1:
            raise ValueError(f"{self} is not rational")
        return self._c[0] if self._c else Fraction(0)

    def __add__(self, other):
        if not isinstance(other, PiScalar):
            if isinstance(other, (int, Fraction)):
                other = PiScalar((other,))
            else:
                return NotImplemented
        a, b = self._c, other._c
        if len(a) < len(b):
            a, b = b, a
        c = list(a)
        for j, x in enumerate(b):
            c[j] += x
        while c and not c[-1]:
            c.pop()
        return PiScalar._raw(tuple(c))

    __radd__ = __add__

    def __neg__(self):
        return PiScalar._raw(tuple(-x for x in self._c))

    def __sub__(self, other):
        if not isinstance(other, (PiScalar, int, Fraction)):
            return NotImplemented
        return self + (-PiScalar.coerce(other))

    def __rsub__(self, other):
        return PiScalar.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return PiScalar._raw(())
            return PiScalar._raw(tuple(x * other for x in self._c))
        if not isinstance(other, PiScalar):
            return NotImplemented
        a, b = self._c, other._c
        if not a or not b:
            return PiScalar._raw(())
        if len(b) == 1:
            y = b[0]
            return PiScalar._raw(tuple(x * y for x in a))
        if len(a) == 1:
            x = a[0]
            return PiScalar._raw(tuple(x * y for y in b))
        c = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    c[i + j] += x * y
        return PiScalar(c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PiScalar):
            other = other.rational()
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        q = Fraction(1) / other
        return PiScalar._raw(tuple(x * q for x in self._c))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not in Q[pi^2]")
        out = PiScalar((1,))
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, PiScalar):
            return self._c == other._c
        if isinstance(other, (int, Fraction)):
            return self._c == PiScalar((other,))._c
        return NotImplemented

    def __hash__(self):
        if self._h is None:
            self._h = hash(self._c) if len(self._c) != 1 else hash(self._c[0])
        return self._h

    def approx(self, pi: float = math.pi) -> float:
        """Floating value with a decimal pi. Approximate, display only."""
        p2 = pi * pi
        return sum(float(c) * p2**j for j, c in enumerate(self._c))

    def to_json(self) -> list:
        return [
            {"pi_power": 2 * j, "num": str(c.numerator), "den": str(c.denominator)}
            for j, c in enumerate(self._c)
            if c
        ]

    @classmethod
    def from_json(cls, data: Sequence[Mapping]) -> "PiScalar":
        c: dict[int, Fraction] = {}
        for item in data:
            p = int(item["pi_power"])
            if p % 2 or p < 0:
                raise ValueError(f"pi_power must be a nonnegative even integer, got {p}")
            c[p // 2] = c.get(p // 2, Fraction(0)) + Fraction(int(item["num"]), int(item["den"]))
        top = max(c, default=-1)
        return cls(c.get(j, 0) for j in range(top + 1))

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for j, c in enumerate(self._c):
            if not c:
                continue
            parts.append(_term_str(c, [pi_factor(j)] if j else []))
        return _join_terms(parts)

    def __repr__(self):
        return f"PiScalar({str(self)!r})"


ZERO = PiScalar()
ONE = PiScalar((1,))
PI2 = PiScalar.pi2(1)


def pi_factor(j: int) -> str:
    return "π^2" if j == 1 else f"π^{2 * j}"


def _term_str(c: Fraction, factors: list[str]) -> str:
    """Render c * prod(factors), e.g. '(3/256)·L1^2' or '-2·π^2'."""
    sign = "-" if c < 0 else ""
    a = abs(c)
    if not factors:
        return sign + fmt_rat(a)
    body = "·".join(factors)
    if a == 1:
        return sign + body
    head = str(a.numerator) if a.denominator == 1 else f"({fmt_rat(a)})"
    return f"{sign}{head}·{body}"


def _join_terms(parts: list[str]) -> str:
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


# ---------------------------------------------------------------------------
# polynomials in L_1..L_n over Q[pi^2]


class Poly:
    """Polynomial sum c_e prod L_i^(e_i) with PiScalar coefficients.

    Exponents are stored as actual powers.  Arithmetic returns the narrowest
    of :class:`EvenPoly`, :class:`OddPoly` or :class:`Poly` that fits.
    """

    __slots__ = ("arity", "_t")

    def __init__(self, arity: int, terms: Mapping[tuple, object] | None = None):
        self.arity = arity
        t: dict[tuple, PiScalar] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != arity or min(e, default=0) < 0:
                raise ValueError(f"bad exponent {e} for arity {arity}")
            c = PiScalar.coerce(c)
            if c:
                t[e] = t[e] + c if e in t else c
                if not t[e]:
                    del t[e]
        self._t = t
        self._check()

    def _check(self):
        pass

    @classmethod
    def _make(cls, arity: int, t: dict) -> "Poly":
        """Wrap a clean term dict (no zeros) in the narrowest class."""
        if all(x % 2 == 0 for e in t for x in e):
            kind = EvenPoly
        elif arity and all(x % 2 for e in t for x in e):
            kind = OddPoly
        else:
            kind = Poly
        obj = object.__new__(kind)
        obj.arity = arity
        obj._t = t
        return obj

    @classmethod
    def constant(cls, c, arity: int = 0) -> "Poly":
        c = PiScalar.coerce(c)
        return Poly._make(arity, {(0,) * arity: c} if c else {})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "Poly":
        return Poly(len(exps), {tuple(exps): c})

    @property
    def terms(self) -> dict:
        return dict(self._t)

    def items(self):
        return self._t.items()

    def coeff(self, exps: Sequence[int]) -> PiScalar:
        return self._t.get(tuple(exps), ZERO)

    def __bool__(self):
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def __len__(self):
        return len(self._t)

    def _same(self, other: "Poly"):
        if self.arity != other.arity:
            raise ValueError(f"arity mismatch {self.arity} != {other.arity}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction, PiScalar)):
            other = Poly.constant(other, self.arity)
        if not isinstance(other, Poly):
            return NotImplemented
        self._same(other)
        t = dict(self._t)
        for e, c in other._t.items():
            if e in t:
                s = t[e] + c
                if s:
                    t[e] = s
                else:
                    del t[e]
            else:
                t[e] = c
        return Poly._make(self.arity, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly._make(self.arity, {e: -c for e, c in self._t.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, PiScalar)):
            other = Poly.constant(other, self.arity)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Poly":
        c = PiScalar.coerce(c)
        if not c:
            return Poly._make(self.arity, {})
        t = {}
        for e, x in self._t.items():
            y = x * c
            if y:
                t[e] = y
        return Poly._make(self.arity, t)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PiScalar)):
            return self.scale(other)
        if not isinstance(other, Poly):
            return NotImplemented
        self._same(other)
        t: dict[tuple, PiScalar] = {}
        for e1, c1 in self._t.items():
            for e2, c2 in other._t.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                if e in t:
                    c = t[e] + c
                    if c:
                        t[e] = c
                    else:
                        del t[e]
                else:
                    t[e] = c
        return Poly._make(self.arity, t)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, PiScalar)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, PiScalar):
            other = other.rational()
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return self.scale(Fraction(1) / other)

    def __pow__(self, n: int):
        out = Poly.constant(1, self.arity)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, PiScalar)):
            other = Poly.constant(other, self.arity)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.arity == other.arity and self._t == other._t

    def __hash__(self):
        return hash((self.arity, frozenset(self._t.items())))

    # -- structure

    def degree(self) -> int:
        """Total degree in the L_i (-1 for the zero polynomial)."""
        return max((sum(e) for e in self._t), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self._t), default=-1)

    def is_even(self) -> bool:
        return all(x % 2 == 0 for e in self._t for x in e)

    def is_odd(self) -> bool:
        return all(x % 2 == 1 for e in self._t for x in e)

    def homogeneous_part(self, d: int) -> "Poly":
        return Poly._make(self.arity, {e: c for e, c in self._t.items() if sum(e) == d})

    def top_part(self) -> "Poly":
        """Part of top total degree in the L_i."""
        return self.homogeneous_part(self.degree())

    def pi_slice(self, j: int) -> "Poly":
        """Coefficient of pi^(2j), as a polynomial with rational coefficients."""
        t = {}
        for e, c in self._t.items():
            x = c.coeff(j)
            if x:
                t[e] = PiScalar((x,))
        return Poly._make(self.arity, t)

    def permute(self, perm: Sequence[int]) -> "Poly":
        """Return q with q(L_perm[0], ..., ) = self(L_0, ...): variable i moves to slot perm[i]."""
        if sorted(perm) != list(range(self.arity)):
            raise ValueError(f"not a permutation of {self.arity} slots: {perm}")
        t = {}
        for e, c in self._t.items():
            new = [0] * self.arity
            for i, x in enumerate(e):
                new[perm[i]] = x
            t[tuple(new)] = c
        return Poly._make(self.arity, t)

    def is_symmetric(self, full_limit: int = 4) -> bool:
        """Invariance under S_n (all permutations up to full_limit, transpositions beyond)."""
        n = self.arity
        if n <= 1:
            return True
        if n <= full_limit:
            perms = permutations(range(n))
        else:
            perms = []
            for i in range(n):
                for j in range(i + 1, n):
                    p = list(range(n))
                    p[i], p[j] = j, i
                    perms.append(p)
        return all(self.permute(p) == self for p in perms)

    def embed(self, arity: int, slots: Sequence[int]) -> "Poly":
        """Rename variable i to variable slots[i] of a polynomial with the given arity."""
        if len(slots) != self.arity:
            raise ValueError("one slot per variable required")
        t = {}
        for e, c in self._t.items():
            new = [0] * arity
            for i, x in enumerate(e):
                new[slots[i]] += x
            new = tuple(new)
            if new in t:
                s = t[new] + c
                if s:
                    t[new] = s
                else:
                    del t[new]
            else:
                t[new] = c
        return Poly._make(arity, t)

    def substitute_L2(self, i: int, value) -> "Poly":
        """Set L_i^2 := value (a PiScalar) and drop the variable.

        >>> p = EvenPoly(1, {(2,): Fraction(3, 256), (0,): PiScalar.pi2(1, Fraction(9, 64))})
        >>> str(p.substitute_L2(0, PiScalar.pi2(1, -4)))
        '(3/32)·π^2'
        """
        if not 0 <= i < self.arity:
            raise IndexError(f"variable {i} out of range for arity {self.arity}")
        value = PiScalar.coerce(value)
        powers = {}
        t: dict[tuple, PiScalar] = {}
        for e, c in self._t.items():
            if e[i] % 2:
                raise ValueError("substitute_L2 needs an even power of the variable")
            k = e[i] // 2
            if k not in powers:
                powers[k] = value**k
            new = e[:i] + e[i + 1:]
            x = c * powers[k]
            if not x:
                continue
            if new in t:
                s = t[new] + x
                if s:
                    t[new] = s
                else:
                    del t[new]
            else:
                t[new] = x
        return Poly._make(self.arity - 1, t)

    def set_zero(self, i: int) -> "Poly":
        """Set L_i = 0 and drop the variable."""
        t = {e[:i] + e[i + 1:]: c for e, c in self._t.items() if e[i] == 0}
        return Poly._make(self.arity - 1, t)

    def divide_by_var(self, i: int) -> "Poly":
        """Exact division by L_i; raises if some term is not divisible."""
        t = {}
        for e, c in self._t.items():
            if e[i] == 0:
                raise ArithmeticError(f"polynomial is not divisible by L{i + 1}")
            t[e[:i] + (e[i] - 1,) + e[i + 1:]] = c
        return Poly._make(self.arity, t)

    def mul_var(self, i: int, power: int = 1) -> "Poly":
        t = {e[:i] + (e[i] + power,) + e[i + 1:]: c for e, c in self._t.items()}
        return Poly._make(self.arity, t)

    def derivative(self, i: int) -> "Poly":
        t = {}
        for e, c in self._t.items():
            if e[i]:
                t[e[:i] + (e[i] - 1,) + e[i + 1:]] = c * e[i]
        return Poly._make(self.arity, t)

    def antiderivative(self, i: int) -> "Poly":
        """The integral from 0 to L_i in the variable L_i."""
        t = {}
        for e, c in self._t.items():
            t[e[:i] + (e[i] + 1,) + e[i + 1:]] = c * Fraction(1, e[i] + 1)
        return Poly._make(self.arity, t)

    def approx(self, values: Sequence[float], pi: float = math.pi) -> float:
        """Float evaluation, display and quadrature checks only."""
        total = 0.0
        for e, c in self._t.items():
            m = c.approx(pi)
            for v, x in zip(values, e):
                m *= v**x
            total += m
        return total

    # -- serialization and display

    def to_json(self) -> dict:
        return {
            "arity": self.arity,
            "terms": [{"powers": list(e), "coeff": c.to_json()} for e, c in sorted(self._t.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Poly":
        arity = int(data["arity"])
        t: dict[tuple, PiScalar] = {}
        for item in data["terms"]:
            e = tuple(int(x) for x in item["powers"])
            t[e] = t.get(e, ZERO) + PiScalar.from_json(item["coeff"])
        out = Poly(arity, t)
        return Poly._make(out.arity, out._t)

    def flat_terms(self) -> list[tuple[tuple, int, Fraction]]:
        """(exponents, pi power j, rational) triples, highest L-degree first."""
        flat = [(e, j, x) for e, c in self._t.items() for j, x in enumerate(c.coeffs) if x]
        flat.sort(key=lambda r: (-sum(r[0]), tuple(-x for x in r[0]), r[1]))
        return flat

    def format(self, var: str = "L") -> str:
        """Human form; equal coefficients on same-degree monomials are grouped.

        >>> str(EvenPoly(2, {(2, 0): Fraction(1, 2), (0, 2): Fraction(1, 2), (0, 0): PiScalar.pi2(1, 2)}))
        '(1/2)·(L1^2 + L2^2) + 2·π^2'
        """
        flat = self.flat_terms()
        if not flat:
            return "0"
        groups: list[tuple[tuple, list]] = []
        index: dict[tuple, int] = {}
        for e, j, x in flat:
            key = (sum(e), j, x)
            if key in index:
                groups[index[key]][1].append(e)
            else:
                index[key] = len(groups)
                groups.append((key, [e]))
        parts = []
        for (_, j, x), monos in groups:
            pi = [pi_factor(j)] if j else []
            names = [_mono_str(e, var) for e in monos]
            if len(names) == 1:
                parts.append(_term_str(x, pi + [f for f in [names[0]] if f]))
            else:
                parts.append(_term_str(x, pi + ["(" + " + ".join(names) + ")"]))
        return _join_terms(parts)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"{type(self).__name__}({self.arity}, {self.format()!r})"


def _mono_str(e: tuple, var: str) -> str:
    out = []
    for i, x in enumerate(e):
        if x == 1:
            out.append(f"{var}{i + 1}")
        elif x:
            out.append(f"{var}{i + 1}^{x}")
    return "·".join(out)


class EvenPoly(Poly):
    """Polynomial in L_1^2, ..., L_n^2 (every stored power is even)."""

    __slots__ = ()

    def _check(self):
        if not self.is_even():
            raise ValueError("EvenPoly needs even exponents")

    def alpha_terms(self) -> dict:
        """Terms keyed by alpha with L^(2 alpha)."""
        return {tuple(x // 2 for x in e): c for e, c in self._t.items()}

    @classmethod
    def from_alpha(cls, arity: int, terms: Mapping[tuple, object]) -> "EvenPoly":
        return cls(arity, {tuple(2 * a for a in al): c for al, c in terms.items()})


class OddPoly(Poly):
    """Polynomial odd in every variable (arity 1 or 2 in practice)."""

    __slots__ = ()

    def _check(self):
        if not self.is_odd():
            raise ValueError("OddPoly needs odd exponents")


def definite_integral(p: Poly, k: int) -> Poly:
    """Integral of p over L_k from 0 to L_k.

    >>> str(definite_integral(Poly(1, {(1,): 1}), 0))
    '(1/2)·L1^2'
    """
    return p.antiderivative(k)


def beta_integral(m: int, n: int) -> Fraction:
    """int_0^L x^m (L-x)^n dx = m! n! / (m+n+1)! * L^(m+n+1); returns the constant."""
    return Fraction(math.factorial(m) * math.factorial(n), math.factorial(m + n + 1))


# ---------------------------------------------------------------------------
# one-variable Laurent series


class LaurentSeries:
    """Truncated Laurent series sum_{e >= low} c_e z^e over Q[pi^2].

    Coefficients are known for exponents below ``order``; ``order=None``
    marks an exact Laurent polynomial.
    """

    __slots__ = ("_t", "order")

    def __init__(self, terms: Mapping[int, object] | None = None, order: int | None = None):
        t = {}
        for e, c in (terms or {}).items():
            if order is not None and e >= order:
                continue
            c = PiScalar.coerce(c)
            if c:
                t[int(e)] = c
        self._t = t
        self.order = order

    @classmethod
    def from_coeffs(cls, low: int, coeffs: Sequence, order: int | None = None) -> "LaurentSeries":
        return cls({low + i: c for i, c in enumerate(coeffs)}, order)

    @property
    def low(self) -> int | None:
        return min(self._t, default=None)

    @property
    def terms(self) -> dict:
        return dict(self._t)

    def coeff(self, e: int) -> PiScalar:
        if self.order is not None and e >= self.order:
            raise TruncationError(f"coefficient of z^{e} is beyond truncation order {self.order}")
        return self._t.get(e, ZERO)

    def __bool__(self):
        return bool(self._t)

    def _order_with(self, other: "LaurentSeries") -> int | None:
        if self.order is None:
            return other.order
        if other.order is None:
            return self.order
        return min(self.order, other.order)

    def __add__(self, other):
        if isinstance(other, (int, Fraction, PiScalar)):
            other = LaurentSeries({0: other})
        order = self._order_with(other)
        t = dict(self._t)
        for e, c in other._t.items():
            t[e] = t[e] + c if e in t else c
        return LaurentSeries(t, order)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries({e: -c for e, c in self._t.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "LaurentSeries":
        c = PiScalar.coerce(c)
        return LaurentSeries({e: x * c for e, x in self._t.items()}, self.order)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PiScalar)):
            return self.scale(other)
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        # relative precision: order - low is preserved
        la, lb = self.low, other.low
        if la is None or lb is None:
            order = None
            if self.order is not None and lb is not None:
                order = self.order + lb
            if other.order is not None and la is not None:
                order = other.order + la if order is None else min(order, other.order + la)
            return LaurentSeries({}, order if order is not None else self._order_with(other))
        order = None
        if self.order is not None:
            order = self.order + lb
        if other.order is not None:
            o2 = other.order + la
            order = o2 if order is None else min(order, o2)
        t: dict[int, PiScalar] = {}
        for e1, c1 in self._t.items():
            for e2, c2 in other._t.items():
                e = e1 + e2
                if order is not None and e >= order:
                    continue
                t[e] = t[e] + c1 * c2 if e in t else c1 * c2
        return LaurentSeries(t, order)

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by z^k."""
        return LaurentSeries({e + k: c for e, c in self._t.items()},
                             None if self.order is None else self.order + k)

    def inverse(self) -> "LaurentSeries":
        """1/s; the leading coefficient must be a nonzero rational."""
        low = self.low
        if low is None:
            raise ZeroDivisionError("inverse of a zero series")
        lead = self._t[low]
        if not lead.is_rational():
            raise ValueError(f"leading coefficient {lead} is not invertible in Q[pi^2]")
        if self.order is None and len(self._t) > 1:
            raise ValueError("inverse of an exact non-monomial needs a truncation order")
        inv0 = Fraction(1) / lead.rational()
        if self.order is None:
            return LaurentSeries({-low: inv0})
        rel = self.order - low
        u = [self._t.get(low + i, ZERO) for i in range(rel)]
        v = [PiScalar((inv0,))]
        for k in range(1, rel):
            acc = ZERO
            for i in range(1, k + 1):
                if u[i]:
                    acc = acc + u[i] * v[k - i]
            v.append(acc * (-inv0))
        return LaurentSeries({i - low: c for i, c in enumerate(v)}, rel - low)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / other)
        return self * other.inverse()

    def reflect(self) -> "LaurentSeries":
        """s(-z)."""
        return LaurentSeries({e: (-c if e % 2 else c) for e, c in self._t.items()}, self.order)

    def even_part(self) -> "LaurentSeries":
        return LaurentSeries({e: c for e, c in self._t.items() if e % 2 == 0}, self.order)

    def odd_part(self) -> "LaurentSeries":
        return LaurentSeries({e: c for e, c in self._t.items() if e % 2}, self.order)

    def is_even(self) -> bool:
        return all(e % 2 == 0 for e in self._t)

    def is_odd(self) -> bool:
        return all(e % 2 for e in self._t)

    def _need_principal(self):
        if self.order is not None and self.order < 0:
            raise TruncationError("principal part not fully known at this truncation")

    def principal_part(self) -> "LaurentSeries":
        self._need_principal()
        return LaurentSeries({e: c for e, c in self._t.items() if e < 0})

    def principal_part_odd(self) -> "LaurentSeries":
        """Negative odd-exponent terms (the part odd under z -> -z)."""
        self._need_principal()
        return LaurentSeries({e: c for e, c in self._t.items() if e < 0 and e % 2})

    def principal_part_even(self) -> "LaurentSeries":
        self._need_principal()
        return LaurentSeries({e: c for e, c in self._t.items() if e < 0 and e % 2 == 0})

    def residue(self) -> PiScalar:
        return self.coeff(-1)

    def derivative(self) -> "LaurentSeries":
        return LaurentSeries({e - 1: c * e for e, c in self._t.items() if e},
                             None if self.order is None else self.order - 1)

    def integral(self) -> "LaurentSeries":
        """Antiderivative with zero constant term."""
        if self._t.get(-1):
            raise ValueError("series has a residue; no Laurent antiderivative")
        return LaurentSeries({e + 1: c * Fraction(1, e + 1) for e, c in self._t.items()},
                             None if self.order is None else self.order + 1)

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        order = self._order_with(other)
        a = {e: c for e, c in self._t.items() if order is None or e < order}
        b = {e: c for e, c in other._t.items() if order is None or e < order}
        return a == b

    __hash__ = None

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "terms": [{"exponent": e, "coeff": c.to_json()} for e, c in sorted(self._t.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "LaurentSeries":
        return cls({int(x["exponent"]): PiScalar.from_json(x["coeff"]) for x in data["terms"]},
                   data.get("order"))

    def __str__(self):
        parts = []
        for e in sorted(self._t):
            for j, x in enumerate(self._t[e].coeffs):
                if not x:
                    continue
                fac = [pi_factor(j)] if j else []
                if e:
                    fac.append("z" if e == 1 else f"z^{e}")
                parts.append(_term_str(x, fac))
        s = _join_terms(parts)
        if self.order is not None:
            s += f" + O(z^{self.order})"
        return s

    def __repr__(self):
        return f"LaurentSeries({str(self)!r})"


def cos_2piz(order: int) -> LaurentSeries:
    """cos(2 pi z) = sum (-1)^m (2pi)^(2m) z^(2m) / (2m)!, known below z^order."""
    t = {}
    m = 0
    while 2 * m < order:
        t[2 * m] = PiScalar.pi2(m, Fraction((-1) ** m * 4**m, math.factorial(2 * m)))
        m += 1
    return LaurentSeries(t, order)


def sin_2piz_over_2pi(order: int) -> LaurentSeries:
    """sin(2 pi z)/(2 pi) = sum (-1)^m (2pi)^(2m) z^(2m+1) / (2m+1)!."""
    t = {}
    m = 0
    while 2 * m + 1 < order:
        t[2 * m + 1] = PiScalar.pi2(m, Fraction((-1) ** m * 4**m, math.factorial(2 * m + 1)))
        m += 1
    return LaurentSeries(t, order)


# ---------------------------------------------------------------------------
# truncated series in hbar, t_0..t_K


class TruncSeries:
    """Truncated formal series in hbar and t_0..t_K.

    A monomial is ``(h, e)`` with ``e`` the exponent vector of t_0..t_K.
    The series is exact modulo the ideal spanned by monomials of t-degree
    above ``N`` and, when ``G`` is set, hbar-power above ``G``.  The hbar
    bound is an ideal only for series without negative hbar powers, so
    such series must use ``G=None``; they stay finite through (N, K).

    Derivatives in t lower ``N`` by one: a derivative of a series exact
    through degree N is exact only through degree N-1.
    """

    __slots__ = ("K", "N", "G", "_t")

    def __init__(self, K: int, N: int, G: int | None = None, terms: Mapping | None = None):
        if K < 0 or N < -1:
            raise ValueError("need K >= 0 and N >= -1")
        self.K, self.N, self.G = K, N, G
        t = {}
        for key, c in (terms or {}).items():
            h, e = key
            e = tuple(e)
            if len(e) != K + 1:
                raise ValueError(f"monomial {e} does not have {K + 1} t-exponents")
            if sum(e) > N or (G is not None and h > G):
                continue
            if G is not None and h < 0:
                raise ValueError("negative hbar powers need G=None")
            if not isinstance(c, PiScalar):
                c = rat(c)
            if c:
                k = (h, e)
                t[k] = t[k] + c if k in t else c
        self._t = {k: c for k, c in t.items() if c}

    @classmethod
    def _raw(cls, K, N, G, t) -> "TruncSeries":
        obj = cls.__new__(cls)
        obj.K, obj.N, obj.G, obj._t = K, N, G, t
        return obj

    @classmethod
    def one(cls, K: int, N: int, G: int | None = None) -> "TruncSeries":
        return cls(K, N, G, {(0, (0,) * (K + 1)): 1})

    @classmethod
    def var(cls, k: int, K: int, N: int, G: int | None = None) -> "TruncSeries":
        e = [0] * (K + 1)
        e[k] = 1
        return cls(K, N, G, {(0, tuple(e)): 1})

    @property
    def terms(self) -> dict:
        return dict(self._t)

    def items(self):
        return self._t.items()

    def coeff(self, h: int, e: Sequence[int]):
        e = tuple(e)
        if sum(e) > self.N or (self.G is not None and h > self.G):
            raise TruncationError(f"monomial hbar^{h} t^{e} is outside the truncation")
        return self._t.get((h, e), Fraction(0))

    def __bool__(self):
        return bool(self._t)

    def __len__(self):
        return len(self._t)

    def _bounds(self, other: "TruncSeries"):
        if self.K != other.K:
            raise ValueError("series over different t ranges")
        if self.G is None or other.G is None:
            if (self.G is None) != (other.G is None):
                G = self.G if self.G is not None else other.G
                # the result must obey the stricter hbar ideal
                return min(self.N, other.N), G
            return min(self.N, other.N), None
        return min(self.N, other.N), min(self.G, other.G)

    def _keep(self, h: int, e: tuple, N: int, G: int | None) -> bool:
        return sum(e) <= N and (G is None or h <= G)

    def __add__(self, other):
        if isinstance(other, (int, Fraction, PiScalar)):
            other = TruncSeries.one(self.K, self.N, self.G).scale(other)
        N, G = self._bounds(other)
        t = {k: c for k, c in self._t.items() if self._keep(k[0], k[1], N, G)}
        for k, c in other._t.items():
            if not self._keep(k[0], k[1], N, G):
                continue
            if k in t:
                s = t[k] + c
                if s:
                    t[k] = s
                else:
                    del t[k]
            else:
                t[k] = c
        return TruncSeries._raw(self.K, N, G, t)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries._raw(self.K, self.N, self.G, {k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "TruncSeries":
        if not c:
            return TruncSeries._raw(self.K, self.N, self.G, {})
        t = {}
        for k, x in self._t.items():
            y = x * c
            if y:
                t[k] = y
        return TruncSeries._raw(self.K, self.N, self.G, t)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PiScalar)):
            return self.scale(other)
        if not isinstance(other, TruncSeries):
            return NotImplemented
        N, G = self._bounds(other)
        # sort the right factor by degree so each left term scans only what fits
        right = sorted(((sum(e), h, e, c) for (h, e), c in other._t.items()), key=lambda r: r[0])
        degs = [r[0] for r in right]
        t: dict = {}
        for (h1, e1), c1 in self._t.items():
            d1 = sum(e1)
            stop = bisect_right(degs, N - d1)
            for i in range(stop):
                _, h2, e2, c2 = right[i]
                h = h1 + h2
                if G is not None and h > G:
                    continue
                k = (h, tuple(a + b for a, b in zip(e1, e2)))
                c = c1 * c2
                if k in t:
                    t[k] = t[k] + c
                else:
                    t[k] = c
        return TruncSeries._raw(self.K, N, G, {k: c for k, c in t.items() if c})

    __rmul__ = __mul__

    def mul_hbar(self, p: int = 1) -> "TruncSeries":
        t = {}
        for (h, e), c in self._t.items():
            if self.G is not None:
                if h + p < 0:
                    raise ValueError("negative hbar power in an hbar-truncated series")
                if h + p > self.G:
                    continue
            t[(h + p, e)] = c
        return TruncSeries._raw(self.K, self.N, self.G, t)

    def mul_t(self, k: int, power: int = 1) -> "TruncSeries":
        t = {}
        for (h, e), c in self._t.items():
            if sum(e) + power > self.N:
                continue
            t[(h, e[:k] + (e[k] + power,) + e[k + 1:])] = c
        return TruncSeries._raw(self.K, self.N, self.G, t)

    def derivative(self, k: int) -> "TruncSeries":
        """d/dt_k; exact through degree N-1."""
        if not 0 <= k <= self.K:
            raise TruncationError(f"t_{k} is outside t_0..t_{self.K}")
        t = {}
        for (h, e), c in self._t.items():
            if e[k] and sum(e) - 1 <= self.N - 1:
                t[(h, e[:k] + (e[k] - 1,) + e[k + 1:])] = c * e[k]
        return TruncSeries._raw(self.K, self.N - 1, self.G, t)

    def truncate(self, N: int | None = None, G: int | None = None, K: int | None = None) -> "TruncSeries":
        """Coarser truncation: lower N, G, or drop variables above t_K."""
        N = self.N if N is None else min(N, self.N)
        if G is None:
            G = self.G
        elif self.G is not None:
            G = min(G, self.G)
        K = self.K if K is None else min(K, self.K)
        t = {}
        for (h, e), c in self._t.items():
            if sum(e) > N or (G is not None and h > G) or any(e[K + 1:]):
                continue
            t[(h, e[:K + 1])] = c
        if G is not None and any(h < 0 for h, _ in t):
            raise ValueError("negative hbar powers need G=None")
        return TruncSeries._raw(K, N, G, t)

    def widen(self, K: int) -> "TruncSeries":
        """Same series viewed with more t variables (new ones absent)."""
        if K < self.K:
            raise ValueError("use truncate to drop variables")
        pad = (0,) * (K - self.K)
        return TruncSeries._raw(K, self.N, self.G, {(h, e + pad): c for (h, e), c in self._t.items()})

    def filter(self, pred) -> "TruncSeries":
        """Keep monomials (h, e) with pred(h, e); bounds unchanged."""
        return TruncSeries._raw(self.K, self.N, self.G,
                                {k: c for k, c in self._t.items() if pred(*k)})

    def constant_term(self):
        return self._t.get((0, (0,) * (self.K + 1)), Fraction(0))

    def _nilpotent(self) -> bool:
        return all(sum(e) > 0 or (self.G is not None and h > 0) for h, e in self._t)

    def _powers_sum(self, coeff_of_j) -> "TruncSeries":
        out = TruncSeries.one(self.K, self.N, self.G)
        term = TruncSeries.one(self.K, self.N, self.G)
        j = 0
        while True:
            j += 1
            term = term * self
            if not term:
                break
            out = out + term.scale(coeff_of_j(j))
            if j > self.N + (self.G or 0) + 1:
                raise RuntimeError("series did not become nilpotent")
        return out

    def exp(self) -> "TruncSeries":
        """exp of a series with zero constant term."""
        if not self._nilpotent():
            raise ValueError("exp needs every term to lie in the truncation ideal's radical")
        fact = [1]

        def c(j):
            while len(fact) <= j:
                fact.append(fact[-1] * len(fact))
            return Fraction(1, fact[j])

        return self._powers_sum(c)

    def log(self) -> "TruncSeries":
        """log of a series with constant term 1."""
        if self.constant_term() != 1:
            raise ValueError("log needs constant term 1")
        s = self - 1
        if not s._nilpotent():
            raise ValueError("log needs 1 + (nilpotent)")
        out = s._powers_sum(lambda j: Fraction((-1) ** (j + 1), j))
        return out - 1

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def is_zero(self) -> bool:
        return not self._t

    def to_json(self) -> dict:
        terms = []
        for (h, e), c in sorted(self._t.items(), key=lambda kv: (sum(kv[0][1]), kv[0][0], kv[0][1])):
            cj = c.to_json() if isinstance(c, PiScalar) else rat_to_json(c)
            terms.append({"hbar": h, "t": list(e), "coeff": cj})
        return {"K": self.K, "N": self.N, "G": self.G, "terms": terms}

    @classmethod
    def from_json(cls, data: Mapping) -> "TruncSeries":
        t = {}
        for item in data["terms"]:
            c = item["coeff"]
            c = PiScalar.from_json(c) if isinstance(c, list) else rat_from_json(c)
            t[(int(item["hbar"]), tuple(int(x) for x in item["t"]))] = c
        return cls(int(data["K"]), int(data["N"]), data.get("G"), t)

    def lines(self) -> list[str]:
        """One line per monomial, e.g. 't0^3/6·hbar^-1' or '3·t1/128·hbar'."""
        out = []
        for (h, e), c in sorted(self._t.items(), key=lambda kv: (sum(kv[0][1]), kv[0][0], kv[0][1])):
            out.append(format_series_term(h, e, c))
        return out or ["0"]

    def __str__(self):
        return "\n".join(self.lines())

    def __repr__(self):
        return f"TruncSeries(K={self.K}, N={self.N}, G={self.G}, {len(self._t)} terms)"


def format_series_term(h: int, e: Sequence[int], c) -> str:
    mono = []
    for k, x in enumerate(e):
        if x == 1:
            mono.append(f"t{k}")
        elif x:
            mono.append(f"t{k}^{x}")
    body = "·".join(mono)
    if isinstance(c, PiScalar) and not c.is_rational():
        s = f"({c})" + (f"·{body}" if body else "")
    else:
        q = c.rational() if isinstance(c, PiScalar) else c
        num, den = q.numerator, q.denominator
        if body:
            head = "" if num == 1 else ("-" if num == -1 else f"{num}·")
            s = head + body
        else:
            s = str(num)
        if den != 1:
            s += f"/{den}"
    if h == 1:
        s += "·hbar"
    elif h:
        s += f"·hbar^{h}"
    return s
