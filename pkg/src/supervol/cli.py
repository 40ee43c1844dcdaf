"""Command-line interface: supervol {volume,bracket,tau,specrec,verify,cache}.

Exit codes: 0 success or all checks pass, 1 a check failed, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import checks, kdv, specrec, virasoro, volumes
from .algebra import PiScalar, TruncationError, rat_from_json, rat_to_json
from .virasoro import Bounds

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _eval_token(tok: str) -> PiScalar:
    """An L^2 value: '2pii' means (2 pi i)^2 = -4 pi^2, otherwise a rational."""
    if tok.lower() in ("2pii", "2πi"):
        return volumes.TWO_PI_I_SQ
    try:
        return PiScalar.coerce(Fraction(tok))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot read L^2 value {tok!r}; use a rational or 2pii") from None


def _emit(args, human: str, payload):
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(human)


def cmd_volume(args) -> int:
    v = volumes.volume(args.flavor, args.g, args.n)
    if args.eval:
        if len(args.eval) > v.arity:
            raise UsageError(f"{len(args.eval)} values given for {v.arity} variables")
        # substitute from the last given slot down so indices stay valid
        for i in reversed(range(len(args.eval))):
            v = v.substitute_L2(i, _eval_token(args.eval[i]))
    _emit(args, v.format(), {"flavor": args.flavor, "g": args.g, "n": args.n, "poly": v.to_json()})
    return EXIT_OK


def cmd_bracket(args) -> int:
    if args.table is not None:
        rows = virasoro.bracket_table(args.kind, args.table)
        if args.json:
            print(json.dumps(rows, sort_keys=True))
        else:
            for r in rows:
                v = rat_from_json(r["value"])
                print(f"<{' '.join(f'tau{k}' for k in r['ks'])}>_{r['g']} = {v}")
        return EXIT_OK
    if not args.ks:
        raise UsageError("give tau indices or --table")
    ks = tuple(args.ks)
    if min(ks) < 0:
        raise UsageError("tau indices must be >= 0")
    val = virasoro.bracket(args.kind, ks)
    g = virasoro.genus(args.kind, ks)
    _emit(args, str(val), {"kind": args.kind, "ks": list(ks), "g": g, "n": len(ks),
                           "value": rat_to_json(val)})
    return EXIT_OK


def _bounds(args, model: str) -> Bounds:
    if args.max_weight is not None:
        w = args.max_weight
        b = Bounds(w, w + 1, w)
    else:
        b = Bounds(args.G, args.N, args.K)
    if b.N < 0 or b.K < 0 or (b.G is not None and b.G < 0):
        raise UsageError("bounds must be non-negative")
    if model == "kw":
        return Bounds(None, b.N, b.K)
    return b


def cmd_tau(args) -> int:
    if args.model == "bgw-check":
        b = _bounds(args, "theta")
        Z = virasoro.assemble_tau("theta", Bounds(b.G, max(b.N, 2), max(b.K, 0)))
        r = kdv.bgw_initial(Z)
        U = kdv.initial_u(Z)
        payload = {"U": U.to_json(), "residual": r.to_json(), "ok": r.is_zero()}
        human = "U(t0,0,..) =\n" + "\n".join(U.lines()) + f"\nresidual: {'0' if r.is_zero() else r}"
        _emit(args, human, payload)
        return EXIT_OK if r.is_zero() else EXIT_FAIL
    b = _bounds(args, args.model)
    cap = args.G if args.model == "kw" and args.max_weight is None else None
    if args.model == "kw" and args.max_weight is not None:
        cap = args.max_weight
    S = virasoro.assemble_log_tau(args.model, b, max_hbar=cap)
    if not args.log:
        S = S.exp()
    _emit(args, "\n".join(S.lines()), S.to_json())
    return EXIT_OK


def cmd_specrec(args) -> int:
    curve = specrec.get_curve(args.curve)
    w = specrec.tr_correlator(curve, args.g, args.n)
    human = w.format() or "0"
    payload = w.to_json()
    if args.bridge:
        vol = {"theta": volumes.vol_theta, "sine": volumes.vol_wp}.get(curve.name)
        if vol is None:
            raise UsageError(f"no volume family for curve {curve.name!r}")
        same = specrec.laplace_bridge(vol(args.g, args.n)) == w
        human += f"\nbridge: {'equal' if same else 'DIFFERENT'}"
        payload = {"correlator": payload, "bridge_equal": same}
        _emit(args, human, payload)
        return EXIT_OK if same else EXIT_FAIL
    _emit(args, human, payload)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.g is not None or args.n is not None:
        if args.suite != "dilaton" or args.g is None or args.n is None:
            raise UsageError("--g/--n select a single dilaton check: verify dilaton --g G --n N")
        reports = [checks.dilaton_one(args.g, args.n)]
    else:
        lim = checks.Limits.from_max_euler(args.max_euler)
        reports = checks.run_suites([args.suite], lim, bad_input=args.bad_input)
    ok = all(r.ok for r in reports)
    if args.report:
        with open(args.report, "w") as fh:
            json.dump({"ok": ok, "checks": [r.to_json() for r in reports]}, fh, indent=1, sort_keys=True)
    if args.json:
        print(json.dumps({"ok": ok, "checks": [r.to_json() for r in reports]}, sort_keys=True))
    else:
        for r in reports:
            print(r.line())
            if "lhs" in r.details:
                print(f"  lhs: {r.details['lhs']}\n  rhs: {r.details['rhs']}")
            elif not r.ok:
                print(f"  {json.dumps(r.details, sort_keys=True)[:400]}")
        print(f"{sum(r.ok for r in reports)}/{len(reports)} checks passed")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_cache(args) -> int:
    cache = volumes.get_cache()
    if args.action == "clear":
        n = cache.clear()
        print(f"removed {n} cached files")
    elif args.action == "warm":
        for g, n in volumes.stable_keys(args.max_euler):
            for flavor in ("theta", "wp", "theta-top", "wp-top"):
                volumes.volume(flavor, g, n)
        print(f"cached {len(cache.keys())} volumes")
    else:
        for flavor, g, n in cache.keys():
            print(f"{flavor} {g} {n}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="supervol", description="Super and Weil-Petersson volumes, "
                                "intersection numbers and topological recursion in exact arithmetic.")
    p.add_argument("--cache-dir", help=f"on-disk volume cache (default: ${volumes.CACHE_ENV})")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    sp = sub.add_parser("volume", help="print a volume polynomial")
    sp.add_argument("flavor", choices=["theta", "wp", "vhat", "vsw", "theta-top", "wp-top"])
    sp.add_argument("g", type=int)
    sp.add_argument("n", type=int)
    sp.add_argument("--eval", nargs="+", metavar="L2",
                    help="values of L1^2, L2^2, ... (rational or 2pii)")
    common(sp)
    sp.set_defaults(func=cmd_volume)

    sp = sub.add_parser("bracket", help="intersection numbers")
    sp.add_argument("kind", choices=["theta", "kw"])
    sp.add_argument("ks", type=int, nargs="*", help="tau indices")
    sp.add_argument("--table", type=int, metavar="MAX_EULER", help="all brackets up to 2g-2+n")
    common(sp)
    sp.set_defaults(func=cmd_bracket)

    sp = sub.add_parser("tau", help="truncated tau functions")
    sp.add_argument("model", choices=["theta", "kw", "bgw-check"])
    sp.add_argument("--log", action="store_true", help="print log Z")
    sp.add_argument("--max-weight", type=int, help="shorthand for G=w, N=w+1, K=w")
    sp.add_argument("--G", type=int, default=3, help="max hbar power (default 3)")
    sp.add_argument("--N", type=int, default=4, help="max t-degree (default 4)")
    sp.add_argument("--K", type=int, default=4, help="max t index (default 4)")
    common(sp)
    sp.set_defaults(func=cmd_tau)

    sp = sub.add_parser("specrec", help="topological recursion correlators")
    sp.add_argument("curve", choices=sorted(specrec.CURVES))
    sp.add_argument("g", type=int)
    sp.add_argument("n", type=int)
    sp.add_argument("--bridge", action="store_true", help="compare with the bridged volume")
    common(sp)
    sp.set_defaults(func=cmd_specrec)

    sp = sub.add_parser("verify", help="run cross-check suites")
    sp.add_argument("suite", choices=["all", *checks.SUITES])
    sp.add_argument("--max-euler", type=int, help="largest 2g-2+n for volume checks")
    sp.add_argument("--g", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--report", help="write a JSON report to this file")
    sp.add_argument("--bad-input", action="store_true", help="add a KdV negative control")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("cache", help="inspect or fill the volume cache")
    sp.add_argument("action", choices=["list", "clear", "warm"])
    sp.add_argument("--max-euler", type=int, default=6)
    sp.set_defaults(func=cmd_cache)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cache_dir = args.cache_dir or os.environ.get(volumes.CACHE_ENV)
    if cache_dir:
        volumes.set_cache(volumes.VolCache(cache_dir))
    elif args.command == "cache" and args.action != "list":
        parser.error("cache needs --cache-dir or $" + volumes.CACHE_ENV)
    if getattr(args, "max_euler", None) is not None and args.max_euler < 1:
        parser.error("--max-euler must be >= 1")
    try:
        return args.func(args)
    except (UsageError, volumes.UnstableError, ValueError) as exc:
        print(f"supervol: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TruncationError as exc:
        print(f"supervol: truncation too shallow: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
