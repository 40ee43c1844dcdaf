"""KdV checks, the BGW initial condition, and translations of tau functions.

Translation identities (at s_1 = s, all other s_i = 0):

    Z^Theta_kappa(t)  = Z^BGW(t_0, t_1 + p_1, t_2 + p_2, ...)
    Z^WP_kappa(t)     = Z^KW(t_0, t_1, t_2 + p_1, t_3 + p_2, ...)

with 1 - exp(-sum s_i z^i) = sum p_j z^j and s = 2 pi^2.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping

from .algebra import PiScalar, Poly, TruncationError, TruncSeries
from .virasoro import Bounds, assemble_log_tau, assemble_tau
from .volumes import euler, vol_theta, vol_theta_n0, vol_wp, vol_wp_n0

S_WP = PiScalar.pi2(1, 2)  # s_1 = 2 pi^2


# ---------------------------------------------------------------------------
# p_j polynomials


def p_poly(j: int) -> Poly:
    """p_j(s_1, .., s_j) from 1 - exp(-sum s_i z^i) = sum_j p_j z^j.

    >>> p_poly(2).format("s")
    '-(1/2)·s1^2 + s2'
    """
    if j < 0:
        raise ValueError("j must be >= 0")
    if j == 0:
        return Poly(0)
    # E = exp(-S):  k E_k = sum_i i (-s_i) E_{k-i}
    E = [Poly.constant(1, j)]
    for k in range(1, j + 1):
        acc = Poly(j)
        for i in range(1, k + 1):
            s_i = Poly.monomial([1 if x == i - 1 else 0 for x in range(j)], -i)
            acc = acc + s_i * E[k - i]
        E.append(acc.scale(Fraction(1, k)))
    return -E[j]


def p_eval(j: int, s: Mapping[int, object]) -> PiScalar:
    """p_j at s_i = s[i] (missing entries are 0)."""
    if j == 0:
        return PiScalar()
    vals = [PiScalar.coerce(s.get(i + 1, 0)) for i in range(j)]
    acc = PiScalar()
    for e, c in p_poly(j).items():
        term = c
        for v, x in zip(vals, e):
            if x:
                term = term * v**x
        acc = acc + term
    return acc


def theta_shifts(s=S_WP, K: int = 4) -> dict[int, PiScalar]:
    """t_k <- t_k + p_k(s, 0, ..) = t_k - (-1)^k s^k/k!, k = 1..K."""
    s = PiScalar.coerce(s)
    return {k: s**k * Fraction(-((-1) ** k), math.factorial(k)) for k in range(1, K + 1)}


def kw_shifts(s=S_WP, K: int = 4) -> dict[int, PiScalar]:
    """t_j <- t_j + p_{j-1}(s, 0, ..), j = 2..K."""
    s = PiScalar.coerce(s)
    return {j: s ** (j - 1) * Fraction((-1) ** j, math.factorial(j - 1)) for j in range(2, K + 1)}


# ---------------------------------------------------------------------------
# KdV


def u_series(Z: TruncSeries) -> TruncSeries:
    """U = hbar d^2/dt_0^2 log Z."""
    if Z.constant_term() != 1:
        raise ValueError("Z must have constant term 1")
    return Z.log().derivative(0).derivative(0).mul_hbar(1)


def kdv_residual(Z: TruncSeries) -> TruncSeries:
    """U_{t1} - U U_{t0} - (hbar/12) U_{t0 t0 t0}; exact through degree N - 5."""
    if Z.K < 1:
        raise TruncationError("the KdV flow needs t_1")
    if Z.N < 5:
        raise TruncationError("KdV residual needs t-degree >= 5")
    U = u_series(Z)
    U0 = U.derivative(0)
    res = U.derivative(1) - U * U0 - U0.derivative(0).derivative(0).mul_hbar(1).scale(Fraction(1, 12))
    return res.truncate(N=Z.N - 5)


def kdv_check(model: str, bounds: Bounds = Bounds()) -> TruncSeries:
    """kdv_residual of a tau function assembled 5 degrees deeper, cut to bounds.

    For kw only pieces with hbar^p, p <= G, enter log Z; then log Z is exact
    for those powers and the residual is exact for hbar <= G + 1.
    """
    deep = Bounds(bounds.G, bounds.N + 5, max(bounds.K, 1))
    Z = assemble_tau(model, deep, max_hbar=bounds.G)
    res = kdv_residual(Z).truncate(K=bounds.K)
    if bounds.G is not None:
        res = res.filter(lambda h, e: h <= bounds.G)
    return res


def initial_u(Z: TruncSeries) -> TruncSeries:
    """U(t_0, 0, 0, ..) as a series in t_0 (K = 0)."""
    U = u_series(Z)
    return U.truncate(K=0)


def bgw_initial(Z: TruncSeries) -> TruncSeries:
    """U(t_0, 0, ..) - hbar/(8 (1 - t_0)^2); zero for Z^BGW."""
    U = initial_u(Z)
    if U.G is not None and U.G < 1:
        return U
    target = TruncSeries(0, U.N, U.G, {(1, (n,)): Fraction(n + 1, 8) for n in range(U.N + 1)})
    return U - target


# ---------------------------------------------------------------------------
# translation


def translate(Z: TruncSeries, shifts: Mapping[int, object], shift_degree: int) -> TruncSeries:
    """Z(.., t_k + sigma_k, ..) cut to the order it determines exactly.

    Every monomial of the full series has total degree at most shift_degree in
    the shifted variables (a grading fact the caller supplies), so outputs of
    t-degree <= N - shift_degree only receive terms from stored monomials.
    """
    N_out = Z.N - shift_degree
    if N_out < 0:
        raise TruncationError(f"shifting by degree {shift_degree} consumes all of N = {Z.N}")
    sig = {int(k): PiScalar.coerce(v) for k, v in shifts.items() if v}
    for k in sig:
        if not 0 <= k <= Z.K:
            raise TruncationError(f"shift of t_{k} outside t_0..t_{Z.K}")
    out: dict = {}
    for (h, e), c in Z.items():
        parts = [((), c)]
        for k, x in enumerate(e):
            if k not in sig or x == 0:
                parts = [(r + (x,), w) for r, w in parts]
                continue
            nxt = []
            for r, w in parts:
                for keep in range(x + 1):
                    nxt.append((r + (keep,), w * (sig[k] ** (x - keep) * math.comb(x, keep))))
            parts = nxt
        for r, w in parts:
            if sum(r) > N_out or not w:
                continue
            key = (h, r)
            out[key] = out[key] + w if key in out else w
    return TruncSeries(Z.K, N_out, Z.G, out)


def _subst_dictionary(v: Poly) -> dict[tuple, PiScalar]:
    """Monomials of v under L^(2k) -> 2^k k! t_k (L^0 -> t_0), as t-exponent tuples."""
    out: dict = {}
    for e, c in v.items():
        ks = [x // 2 for x in e]
        w = 1
        for k in ks:
            w *= 2**k * math.factorial(k)
        t = [0] * (max(ks, default=0) + 1)
        for k in ks:
            t[k] += 1
        key = tuple(t)
        out[key] = out[key] + c * w if key in out else c * w
    return out


def kappa_log_partition(flavor: str, bounds: Bounds, include_n0: bool = True) -> TruncSeries:
    """sum hbar^(g-1)/n! V_{g,n}|_{L^(2k) = 2^k k! t_k} over g - 1 <= G, n <= N.

    Includes the n = 0 volumes for g >= 2 unless include_n0 is false.
    Monomials with t_k, k > K, are dropped.
    """
    if bounds.G is None:
        raise ValueError("kappa partitions need an hbar bound")
    vol = vol_theta if flavor == "theta" else vol_wp
    n0 = vol_theta_n0 if flavor == "theta" else vol_wp_n0
    K, N, G = bounds.K, bounds.N, bounds.G
    terms: dict = {}

    def add(key, c):
        terms[key] = terms[key] + c if key in terms else c

    for g in range(0, G + 2):
        if g >= 2 and include_n0:
            add((g - 1, (0,) * (K + 1)), n0(g))
        for n in range(1, N + 1):
            if euler(g, n) <= 0:
                continue
            w = Fraction(1, math.factorial(n))
            for t, c in _subst_dictionary(vol(g, n)).items():
                if len(t) > K + 1 and any(t[K + 1:]):
                    continue
                add((g - 1, tuple(t[: K + 1]) + (0,) * (K + 1 - len(t))), c * w)
    G_ser = G if flavor == "theta" else None
    ser = TruncSeries(K, N, G_ser, terms)
    if G_ser is None:
        ser = ser.filter(lambda h, e: h <= G)
    return ser


def kappa_partition_theta(bounds: Bounds = Bounds(2, 4, 4)) -> TruncSeries:
    """Z^Theta with the kappa_1 = 2 pi^2 insertion, built from full volumes."""
    return kappa_log_partition("theta", bounds).exp()


def kappa_partition_wp(bounds: Bounds = Bounds(1, 4, 4)) -> TruncSeries:
    """Z^WP from full Weil-Petersson volumes (hbar^-1 part included, G=None)."""
    return kappa_log_partition("wp", bounds).exp()


def translated_bgw(bounds: Bounds, s=S_WP) -> TruncSeries:
    """Z^BGW(t_0, t_1 + p_1, ..) exact through bounds.

    In Z^BGW a monomial of hbar^h has weight sum k e_k = h over t_{k>=1}, so
    at most G shifted variables appear; assembling G degrees deeper with
    indices up to max(K, G) makes the result exact.
    """
    K_in = max(bounds.K, bounds.G)
    Z = assemble_tau("theta", Bounds(bounds.G, bounds.N + bounds.G, K_in))
    out = translate(Z, theta_shifts(s, K_in), bounds.G)
    return out.truncate(K=bounds.K)


def translated_log_kw(bounds: Bounds, s=S_WP, extra: int = 0) -> TruncSeries:
    """log Z^KW(t_0, t_1, t_2 + p_1, ..) exact through (hbar <= G, degree <= N, K).

    A genus-g piece has weight -e_0 + sum (k-1) e_k = 3g - 3.  An output
    monomial of degree d has weight >= -d, so at most 3g - 3 + d shifted
    insertions feed it, each with index <= 3g - 2 + d.  extra deepens both
    bounds further for stability checks.
    """
    if bounds.G is None:
        raise ValueError("need an hbar bound")
    acc = TruncSeries(bounds.K, bounds.N, None)
    for g in range(0, bounds.G + 2):
        m = max(3 * g - 3 + bounds.N, 0) + extra
        K_in = max(bounds.K, 3 * g - 2 + bounds.N) + extra
        F = assemble_log_tau("kw", Bounds(None, bounds.N + m, K_in), max_hbar=g - 1)
        F = F.filter(lambda h, e, g=g: h == g - 1)
        out = translate(F, kw_shifts(s, K_in), m).truncate(K=bounds.K)
        acc = acc + out
    return acc


def _diff_report(name: str, a: TruncSeries, b: TruncSeries) -> dict:
    diff = a - b
    mism = [
        {"hbar": h, "t": list(e), "lhs": str(a.coeff(h, e)), "rhs": str(b.coeff(h, e))}
        for (h, e), _ in sorted(diff.items(), key=lambda kv: (kv[0][0], sum(kv[0][1]), kv[0][1]))
    ]
    keys = set(a.terms) | set(b.terms)
    return {"check": name, "ok": not mism, "compared": len(keys), "mismatches": mism[:20]}


def verify_translation(flavor: str, bounds: Bounds | None = None) -> dict:
    """Termwise comparison of kappa partitions with translated tau functions.

    theta: both at Z level and at log level through (hbar <= G, degree <= N).
    wp: at log level (Z^KW carries hbar^-1, so Z-level hbar slices are not
    closed under truncation).
    """
    if flavor == "theta":
        bounds = bounds or Bounds(1, 2, 2)
        lhs = kappa_partition_theta(bounds)
        rhs = translated_bgw(bounds)
        z = _diff_report("translation-theta-Z", lhs, rhs)
        lg = _diff_report("translation-theta-log", kappa_log_partition("theta", bounds), rhs.log())
        return {"check": "translation-theta", "ok": z["ok"] and lg["ok"], "parts": [z, lg]}
    if flavor == "wp":
        bounds = bounds or Bounds(0, 4, 4)
        lhs = kappa_log_partition("wp", bounds)
        rhs = translated_log_kw(bounds)
        lg = _diff_report("translation-wp-log", lhs, rhs)
        return {"check": "translation-wp", "ok": lg["ok"], "parts": [lg]}
    raise ValueError(f"unknown flavor {flavor!r}")
