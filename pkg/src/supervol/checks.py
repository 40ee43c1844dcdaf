"""Cross-check suites shared by the CLI and the test suite.

Each check returns a Report; suites return lists of reports and never stop
at the first failure.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import kdv, kernels, specrec, virasoro, volumes
from .algebra import EvenPoly, PiScalar, Poly, TruncSeries
from .virasoro import Bounds

SUITES = ("volumes", "dilaton", "virasoro", "kdv", "translation", "specrec", "kernels")


@dataclass
class Report:
    check: str
    ok: bool
    seconds: float = 0.0
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"check": self.check, "status": "pass" if self.ok else "fail",
                "seconds": round(self.seconds, 4), "details": self.details}

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.check} ({self.seconds:.2f}s)"


def run(name: str, fn) -> Report:
    """Run fn() -> (ok, details); exceptions become failures."""
    t = time.perf_counter()
    try:
        ok, details = fn()
    except Exception as exc:  # a broken check is a failed check
        ok, details = False, {"error": f"{type(exc).__name__}: {exc}"}
    return Report(name, bool(ok), time.perf_counter() - t, details)


@dataclass(frozen=True)
class Limits:
    """Desk-scale defaults: volumes up to Euler characteristic 6, TR up to 5 (4 on the sine curve)."""

    volumes: int = 6
    wp_identities: int = 5
    theta_tr: int = 5
    sine_tr: int = 4
    tau: Bounds = Bounds(3, 4, 4)

    @classmethod
    def from_max_euler(cls, e: int | None) -> "Limits":
        if e is None:
            return cls()
        return cls(e, min(e, 5), min(e, 5), min(e, 4))


# ---------------------------------------------------------------------------
# closed-form volume tables


def theta_family(g: int, n: int) -> EvenPoly:
    """Closed forms of V^Theta_{g,n} for g = 1, 2, 3 (sums over i < j)."""
    z = (0,) * n

    def mono(*pairs):
        e = [0] * n
        for i, p in pairs:
            e[i] += p
        return tuple(e)

    if g == 1:
        return EvenPoly(n, {z: Fraction(math.factorial(n - 1), 8)})
    if g == 2:
        c = Fraction(3 * math.factorial(n + 1), 128)
        t = {z: PiScalar.pi2(1, c * (n + 2))}
        for i in range(n):
            t[mono((i, 2))] = c / 4
        return EvenPoly(n, t)
    if g == 3:
        c = Fraction(math.factorial(n + 3), 2**16 * 5)
        t = {z: PiScalar.pi2(2, c * 16 * (n + 4) * (42 * n + 185))}
        for i in range(n):
            t[mono((i, 2))] = PiScalar.pi2(1, c * 336 * (n + 4))
            t[mono((i, 4))] = c * 25
            for j in range(i + 1, n):
                t[mono((i, 2), (j, 2))] = c * 84
        return EvenPoly(n, t)
    raise ValueError("closed forms exist for g = 1, 2, 3")


def _sumsq(n: int) -> EvenPoly:
    t = {}
    for i in range(n):
        e = [0] * n
        e[i] = 2
        t[tuple(e)] = 1
    return EvenPoly(n, t)


def mirzakhani_table() -> dict[tuple, EvenPoly]:
    """Reference WP volumes; V_{1,2} carries the prefactor 1/192."""
    def shifted(n, k):
        return _sumsq(n) + Poly.constant(PiScalar.pi2(1, k), n)

    return {
        (0, 3): EvenPoly(3, {(0, 0, 0): 1}),
        (1, 1): shifted(1, 4).scale(Fraction(1, 48)),
        (0, 4): shifted(4, 4).scale(Fraction(1, 2)),
        (1, 2): (shifted(2, 4) * shifted(2, 12)).scale(Fraction(1, 192)),
    }


def _pi_graded(v: EvenPoly, top: int) -> bool:
    """Coefficient of an L^2-degree d monomial is a multiple of pi^(2(top - d))."""
    for e, c in v.items():
        d = sum(e) // 2
        if c.pi_powers() != [top - d]:
            return False
    return True


# ---------------------------------------------------------------------------
# suites


def suite_volumes(lim: Limits = Limits()) -> list[Report]:
    out = []
    th_keys = volumes.stable_keys(lim.volumes)

    def theta_tables():
        bad = [(g, n) for g, n in th_keys if g in (1, 2, 3) and volumes.vol_theta(g, n) != theta_family(g, n)]
        return not bad, {"keys": sum(1 for g, _ in th_keys if g in (1, 2, 3)), "mismatch": bad}

    def invariants(flavor):
        vol = volumes.vol_theta if flavor == "theta" else volumes.vol_wp
        top = volumes.vol_theta_top if flavor == "theta" else volumes.vol_wp_top

        def f():
            bad = {}
            for g, n in th_keys:
                v = vol(g, n)
                deg = g - 1 if flavor == "theta" else 3 * g - 3 + n
                probs = []
                if not v.is_symmetric():
                    probs.append("symmetry")
                if v and v.degree() != 2 * deg:
                    probs.append("degree")
                if v and not _pi_graded(v, deg):
                    probs.append("pi-grading")
                if v.top_part() != top(g, n):
                    probs.append("top-recursion")
                if probs:
                    bad[f"{g},{n}"] = probs
            return not bad, {"keys": len(th_keys), "failures": bad}

        return f

    def wp_table():
        ref = mirzakhani_table()
        bad = [f"{g},{n}" for (g, n), v in ref.items() if volumes.vol_wp(g, n) != v]
        return not bad, {"keys": sorted(f"{g},{n}" for g, n in ref), "mismatch": bad}

    def normalizations():
        ok = (volumes.normalize_super(1, 1, "vhat") == EvenPoly(1, {(0,): Fraction(-1, 16)})
              and volumes.normalize_super(1, 1, "vsw") == EvenPoly(1, {(0,): Fraction(-1, 8)}))
        return ok, {}

    out.append(run("volumes/theta-closed-forms", theta_tables))
    out.append(run("volumes/theta-invariants", invariants("theta")))
    out.append(run("volumes/wp-invariants", invariants("wp")))
    out.append(run("volumes/wp-table", wp_table))
    out.append(run("volumes/normalizations", normalizations))
    return out


def dilaton_one(g: int, n: int) -> Report:
    def f():
        a, b = volumes.dilaton_eval_theta(g, n)
        return a == b, {"lhs": str(a), "rhs": str(b)}

    return run(f"dilaton/theta-g{g}-n{n}", f)


def suite_dilaton(lim: Limits = Limits()) -> list[Report]:
    def theta_all():
        bad = []
        keys = [(g, n) for g, n in volumes.stable_keys(lim.volumes, min_n=0) if volumes.euler(g, n + 1) <= lim.volumes]
        for g, n in keys:
            a, b = volumes.dilaton_eval_theta(g, n)
            if a != b:
                bad.append(f"{g},{n}")
        n0 = volumes.vol_theta_n0(2)
        return not bad and n0 == PiScalar.pi2(1, Fraction(3, 64)), {
            "keys": len(keys), "mismatch": bad, "V_2_0": str(n0)}

    def wp_all():
        bad = []
        keys = volumes.stable_keys(lim.wp_identities)
        for g, n in keys:
            r = volumes.string_dilaton_wp(g, n)
            if not r["ok"]:
                bad.append(f"{g},{n}")
        return not bad, {"keys": len(keys), "mismatch": bad}

    return [run("dilaton/theta", theta_all), run("dilaton/wp-string-dilaton", wp_all)]


def suite_virasoro(lim: Limits = Limits()) -> list[Report]:
    out = []

    def dictionary(kind, E):
        def f():
            bad = []
            count = 0
            for g, n in volumes.stable_keys(E):
                if kind == "theta":
                    top = volumes.vol_theta_top(g, n)
                else:
                    top = volumes.vol_wp_top(g, n)
                for ks, val in virasoro.coeff_dictionary(top).items():
                    count += 1
                    if virasoro.bracket(kind, ks) != val:
                        bad.append(list(ks))
            # brackets the volumes say are zero must vanish too
            return not bad, {"brackets": count, "mismatch": bad}

        return f

    def pivots():
        bad = []
        for kind in ("theta", "kw"):
            for n in range(1, 5):
                for ks in virasoro.multisets(n, 4):
                    if sum(ks) > 4 and kind == "theta":
                        continue
                    ref = virasoro.bracket(kind, ks)
                    for p in range(n):
                        if virasoro.bracket(kind, ks, pivot=p) != ref:
                            bad.append([kind, list(ks), p])
        return not bad, {"mismatch": bad}

    out.append(run("virasoro/theta-brackets-vs-volumes", dictionary("theta", lim.volumes)))
    out.append(run("virasoro/kw-brackets-vs-volumes", dictionary("kw", min(lim.volumes, 5))))
    out.append(run("virasoro/pivot-independence", pivots))
    for model, ms in (("theta", range(0, 4)), ("kw", range(-1, 4))):
        for m in ms:
            def f(model=model, m=m):
                r = virasoro.virasoro_check(model, m, lim.tau)
                return r.is_zero(), {"nonzero": r.lines()[:10] if r else []}

            out.append(run(f"virasoro/{model}-L{m}", f))
    return out


def suite_kdv(lim: Limits = Limits(), bad_input: bool = False) -> list[Report]:
    out = []
    for model in ("theta", "kw"):
        def f(model=model):
            r = kdv.kdv_check(model, lim.tau)
            return r.is_zero(), {"nonzero": r.lines()[:10] if r else []}

        out.append(run(f"kdv/{model}-residual", f))

    def initial():
        Z = virasoro.assemble_tau("theta", Bounds(lim.tau.G, 8, 1))
        r = kdv.bgw_initial(Z)
        return r.is_zero() and r.N >= 6, {"through_t0_degree": r.N}

    def kw_initial():
        Z = virasoro.assemble_tau("kw", Bounds(None, 8, 1), max_hbar=2)
        U = kdv.initial_u(Z).filter(lambda h, e: h <= 1)
        return U == TruncSeries.var(0, 0, U.N), {"U": U.lines()}

    out.append(run("kdv/bgw-initial", initial))
    out.append(run("kdv/kw-initial", kw_initial))
    if bad_input:
        def control():
            Z = TruncSeries(1, 8, None, {(0, (3, 0)): 1}).exp()
            r = kdv.kdv_residual(Z)
            return r.is_zero(), {"input": "exp(t0^3)", "nonzero": r.lines()[:5]}

        out.append(run("kdv/injected-control", control))
    return out


def suite_translation(lim: Limits = Limits()) -> list[Report]:
    out = []
    for flavor in ("theta", "wp"):
        def f(flavor=flavor):
            r = kdv.verify_translation(flavor)
            return r["ok"], {p["check"]: {"compared": p["compared"], "mismatches": p["mismatches"]}
                             for p in r["parts"]}

        out.append(run(f"translation/{flavor}", f))

    def pj_identity():
        # sum p_j z^j + exp(-sum s_i z^i) = 1 through z^8, checked on random rationals
        import random

        rng = random.Random(7)
        s = {i: Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for i in range(1, 9)}
        # exp(-S) coefficients by the same recurrence, independently of p_poly
        E = [Fraction(1)]
        for k in range(1, 9):
            E.append(sum(-i * s[i] * E[k - i] for i in range(1, k + 1)) / k)
        bad = [j for j in range(1, 9) if kdv.p_eval(j, s) + PiScalar.coerce(E[j]) != 0]
        return not bad, {"orders": 8, "mismatch": bad}

    out.append(run("translation/p-polynomials", pj_identity))
    return out


def suite_specrec(lim: Limits = Limits()) -> list[Report]:
    out = []
    for curve, E, vol in ((specrec.THETA, lim.theta_tr, volumes.vol_theta),
                          (specrec.SINE, lim.sine_tr, volumes.vol_wp)):
        def bridge(curve=curve, E=E, vol=vol):
            bad = {}
            keys = volumes.stable_keys(E)
            for g, n in keys:
                w = specrec.tr_correlator(curve, g, n)
                probs = []
                if w != specrec.laplace_bridge(vol(g, n)):
                    probs.append("bridge")
                if not w.is_symmetric():
                    probs.append("symmetry")
                if w.max_pole() > curve.pole_bound(g, n):
                    probs.append("pole-order")
                if probs:
                    bad[f"{g},{n}"] = probs
            return not bad, {"keys": len(keys), "failures": bad}

        def dil(curve=curve, E=E):
            keys = [(g, n) for g, n in volumes.stable_keys(E) if volumes.euler(g, n + 1) <= E]
            bad = [f"{g},{n}" for g, n in keys if not specrec.tr_dilaton_check(curve, g, n)["ok"]]
            return not bad, {"keys": len(keys), "mismatch": bad}

        out.append(run(f"specrec/{curve.name}-bridge", bridge))
        out.append(run(f"specrec/{curve.name}-dilaton", dil))

    def w11():
        return str(specrec.tr_correlator(specrec.THETA, 1, 1)) == "(1/8)·dz1/z1^2", {}

    def theta_partition():
        b = Bounds(2, 4, 4)
        Z = specrec.tr_partition(specrec.THETA, b.G, b.N, b.K)
        full = kdv.kappa_log_partition("theta", b, include_n0=False).exp()
        bgw = virasoro.assemble_tau("theta", b)
        return Z == full and specrec.pi_slice(Z, 0) == bgw, {
            "equals_volume_partition": Z == full, "pi0_slice_equals_bgw": specrec.pi_slice(Z, 0) == bgw}

    def sine_partition():
        G, N, K = 1, 4, 4
        F = specrec.tr_log_partition(specrec.SINE, G, N, K)
        full = kdv.kappa_log_partition("wp", Bounds(G, N, K), include_n0=False)
        kw = virasoro.assemble_log_tau("kw", Bounds(None, N, K), max_hbar=G)
        return F == full and specrec.pi_slice(F, 0) == kw, {}

    out.append(run("specrec/theta-w11", w11))
    out.append(run("specrec/theta-partition", theta_partition))
    out.append(run("specrec/sine-partition", sine_partition))
    return out


def suite_kernels(lim: Limits = Limits()) -> list[Report]:
    def f():
        rows = []
        ok = True
        for kind in ("theta", "wp"):
            for k in range(3):
                for t in (1.0, 2.0):
                    q = kernels.moment_quadrature(kind, k, t)
                    x = kernels.moment_exact(kind, k, t)
                    good = abs(q - x) <= 5e-7 * abs(x)
                    ok &= good
                    rows.append({"kernel": kind, "k": k, "t": t, "quad": q, "exact": x})
        return ok, {"rows": rows}

    return [run("kernels/moment-quadrature", f)]


def run_suites(names, lim: Limits = Limits(), bad_input: bool = False) -> list[Report]:
    if "all" in names:
        names = SUITES
    table = {
        "volumes": suite_volumes, "dilaton": suite_dilaton, "virasoro": suite_virasoro,
        "translation": suite_translation, "specrec": suite_specrec, "kernels": suite_kernels,
    }
    out = []
    for name in names:
        if name == "kdv":
            out.extend(suite_kdv(lim, bad_input))
        else:
            out.extend(table[name](lim))
    return sorted(out, key=lambda r: r.check)
