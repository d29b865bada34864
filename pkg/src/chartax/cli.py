"""Command line driver: one subcommand per module, JSON or CSV reports."""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import report
from .characters import build_group, enumerate_characters
from .dichotomy import SupportSpec, extremal_example, dichotomy_check, order_bound_check
from .distance import g_delta, g_objective, halasz_bound, minimize_over_t, weighted_delta
from .multiplicative import BUILTINS, make_builtin
from .primes import build_prime_table
from .sieve import (
    LargeSieveInstance,
    large_sieve_check,
    polya_vinogradov_max,
    smooth_count_chain_check,
    smooth_progression_count,
)
from .taxonomy import taxonomy_report


class UsageError(ValueError):
    """A parameter violates a documented precondition."""


def _require(cond: bool, message: str):
    if not cond:
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _big_int(text: str) -> int:
    """Integers, also written as 1e6 or 10**6."""
    try:
        if "**" in text:
            b, e = text.split("**")
            return int(b) ** int(e)
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v != int(v):
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    return int(v)


def parse_support(text: str, seed: int) -> SupportSpec:
    """``all``, ``random:DENSITY``, ``near:ETA``, ``mixed:DENSITY:ETA``, ``residues:1,6``."""
    kind, _, rest = text.partition(":")
    try:
        if kind == "all":
            return SupportSpec("all")
        if kind == "random":
            return SupportSpec("random", density=float(rest), seed=seed)
        if kind == "near":
            return SupportSpec("near", eta=float(rest))
        if kind == "mixed":
            d, e = rest.split(":")
            return SupportSpec("mixed", density=float(d), seed=seed, eta=float(e))
        if kind == "residues":
            return SupportSpec("residues", residues=tuple(_int_list(rest)))
    except ValueError:
        pass
    raise UsageError(f"support spec {text!r} is not one of all, random:D, near:E, mixed:D:E, residues:a,b")


def select_characters(group, spec: str):
    """``all``, ``nonprincipal``, ``order:K`` or a comma-separated index list."""
    chis = enumerate_characters(group)
    if spec == "all":
        return chis
    if spec == "nonprincipal":
        return chis[1:]
    if spec.startswith("order:"):
        k = int(spec.split(":", 1)[1])
        return [c for c in chis if c.order == k]
    idx = _int_list(spec)
    _require(all(0 <= i < len(chis) for i in idx), f"character index must lie in [0, {len(chis)})")
    return [chis[i] for i in idx]


def _function(args, table, window=None):
    chi = None
    if args.g == "character":
        _require(args.chi_mod is not None, "--g character needs --chi-mod and --chi-index")
        G = build_group(args.chi_mod)
        _require(0 <= args.chi_index < G.phi, f"--chi-index must lie in [0, {G.phi})")
        chi = enumerate_characters(G)[args.chi_index]
    return make_builtin(args.g, table, window, chi=chi, seed=args.seed, density=args.density, conjugate=args.conjugate)


# -- subcommands -----------------------------------------------------------------------


def cmd_characters(args):
    _require(1 <= args.D <= 10**5, "D must lie in [1, 100000]")
    G = build_group(args.D)
    rows = []
    for chi in enumerate_characters(G):
        row = {"index": chi.index, "exponents": list(chi.exponents), "order": chi.order, "real": chi.is_real}
        if not args.no_pv and not chi.is_principal:
            m, b = polya_vinogradov_max(chi)
            row.update(pv_max=m, pv_bound=b, pv_ok=m <= b)
        if args.values:
            row["values"] = chi.values()
        rows.append(row)
    comps = [
        {"prime": c.prime, "q": c.q, "generator": c.generator, "local_generator": c.local_generator, "order": c.order}
        for c in G.components
    ]
    ok = all(r.get("pv_ok", True) for r in rows) if args.D >= 3 else True
    result = {"modulus": args.D, "phi": G.phi, "exponent": G.exponent, "components": comps, "characters": rows, "ok": ok}
    return result, rows


def cmd_distance(args):
    _require(args.x >= 2, "x must be >= 2")
    _require(1 <= args.D <= args.x, "need 1 <= D <= x")
    table = build_prime_table(args.x)
    if args.kind == "halasz":
        _require(args.Y is not None and 1.5 <= args.Y <= args.x, "halasz needs 3/2 <= Y <= x")
        T = args.T if args.T is not None else 10.0
        _require(T >= 2, "T must be >= 2")
        g = _function(args, table, window=(int(args.Y), args.x))
        res = halasz_bound(g, args.Y, args.x, T, table)
        row = {"kind": "halasz", "Y": args.Y, "T": T, **res.to_json()}
        return {"g": g.to_json(), "profiles": [row], "ok": True}, [row]
    g = _function(args, table)
    G = build_group(args.D)
    chis = select_characters(G, args.chars)
    T = args.T if args.T is not None else args.D**args.B
    _require(T >= 0, "T must be non-negative")
    profiles, grid = [], []
    for chi in chis:
        if args.weighted != "none":
            t = args.t if args.t is not None else 0.0
            prof = weighted_delta(g, chi, t, table, args.D, args.x, args.weighted)
            profiles.append({"index": chi.index, "minimized": False, **prof.to_json()})
            continue
        if args.t is not None:
            prof = g_delta(g, chi, args.t, table, args.D, args.x)
            profiles.append({"index": chi.index, "minimized": False, **prof.to_json()})
            continue
        res = minimize_over_t(g_objective(g, chi, args.D, args.x), T)
        prof = g_delta(g, chi, res.t, table, args.D, args.x)
        profiles.append({"index": chi.index, "minimized": True, "T": T, **prof.to_json()})
        if args.grid:
            grid += [{"index": chi.index, "t": t, "raw": v} for t, v in res.grid_rows()]
    ok = all(p["delta"] is None or -1e-12 <= p["delta"] <= 4 + 1e-12 for p in profiles)
    result = {"g": g.to_json(), "profiles": profiles, "ok": ok}
    if args.grid:
        result["grid"] = grid
    return result, grid if args.grid else profiles


def cmd_dichotomy(args):
    _require(args.x >= 2, "x must be >= 2")
    _require(all(2 <= D <= args.x for D in args.D), "need 2 <= D <= x for every modulus")
    table = build_prime_table(args.x)
    cells = []
    for D in args.D:
        if args.extremal:
            S_ext, chis = extremal_example(D, args.extremal, args.x, table)
            supports = [("extremal", None)]
        else:
            chis = select_characters(build_group(D), args.chars)
            supports = [(s, parse_support(s, args.seed)) for s in args.support]
        for chi in chis:
            for t in args.t:
                for label, spec in supports:
                    S = S_ext if spec is None else spec.build(table, D, args.x, chi, t)
                    if args.r:
                        v = order_bound_check(S, chi, t, args.r, args.B, table, D, args.x, label)
                    else:
                        v = dichotomy_check(S, chi, t, args.B, table, D, args.x, label)
                    cells.append(v)
    need = [v.horn1_slack for v in cells if v.in_hypothesis and not v.horn2]
    c_emp = max([0.0, *need])
    chain_bad = sum(not v.chain.ok for v in cells)
    kernel_bad = sum((v.kernel_bound_violations or 0) > 0 for v in cells)
    unsquared_bad = sum((v.unsquared_bound_violations or 0) > 0 for v in cells)
    rows = [v.to_json() for v in cells]
    result = {
        "cells": rows, "c_emp": c_emp,
        "violations": {"chain": chain_bad, "kernel_lower_bound": kernel_bad, "unsquared_kernel_bound": unsquared_bad},
        "ok": chain_bad == 0 and kernel_bad == 0,
    }
    return result, rows


def cmd_taxonomy(args):
    _require(0 < args.eps <= 0.25, "eps must lie in (0, 1/4]")
    _require(args.x >= 4 and 2 <= args.D <= args.x**0.75, "need 2 <= D <= x^(3/4)")
    _require(math.gcd(args.a % args.D, args.D) == 1, "a must be coprime to D")
    table = build_prime_table(args.x)
    g = _function(args, table)
    refine = args.refine_real and g.is_real
    rep = taxonomy_report(g, args.D, args.x, args.eps, args.a % args.D, args.B, args.normalization, args.delta, refine)
    result = rep.to_json()
    result["ok"] = bool(rep.audit_ok and rep.closed)
    result["scans"] = [s.row() for s in rep.scans]
    return result, result["scans"]


def cmd_largesieve(args):
    _require(args.D >= 2, "D must be >= 2")
    _require(args.H >= 1, "H must be >= 1")
    _require(0 < args.eps < 1, "eps must lie in (0, 1)")
    _require(args.N >= 1 and args.Q >= 1, "need N >= 1 and Q >= 1")
    G = build_group(args.D)
    chis = enumerate_characters(G)
    _require(1 <= args.J <= len(chis), f"J must lie in [1, {len(chis)}]")
    rng = np.random.Generator(np.random.Philox(args.seed))
    rows = []
    n = np.arange(1, args.N + 1)
    for k in range(args.instances):
        pick = sorted(int(i) for i in rng.choice(len(chis), size=args.J, replace=False))
        if args.coeffs == "sign":
            a = rng.choice([-1.0, 1.0], size=args.N)
        elif args.coeffs == "phase":
            a = np.exp(2j * np.pi * rng.random(args.N))
        elif args.coeffs == "resonant":
            a = chis[pick[0]].at(n).conj()
        else:
            a = np.ones(args.N)
        inst = LargeSieveInstance(args.D, args.Q, args.H, args.eps, [chis[i] for i in pick], a, args.include_D_primes)
        res = large_sieve_check(inst)
        rows.append({"instance": k, "characters": pick, "sieve_modulus": inst.sieve_modulus, **res.to_json(),
                     "cauchy_ok": res.lhs <= res.cauchy_bound * (1 + 1e-9)})
    fitted = max((r["ratio"] for r in rows), default=None)
    result = {"instances": rows, "fitted_constant": fitted, "ok": all(r["cauchy_ok"] for r in rows)}
    return result, rows


def cmd_smooth(args):
    _require(args.c > 0, "c must be > 0")
    _require(args.k >= 1, "k must be >= 1")
    _require(all(1 <= D <= args.x for D in args.D), "need 1 <= D <= x")
    table = build_prime_table(max(args.x, 2)) if args.x <= 10**8 else None
    rows = []
    ok = True
    for D in args.D:
        s = smooth_progression_count(args.x, D, args.c, args.a, args.k, table)
        row = {"x": args.x, "D": D, "c": args.c, "a": args.a % D, "k": args.k, **s.to_json()}
        if args.chain:
            ch = smooth_count_chain_check(args.x, D, args.c, args.a, args.k)
            row["chain"] = ch.to_json()
            ok &= ch.split_ok is not False and ch.reduction_ok is not False and ch.expansion_ok is not False
        rows.append(row)
    return {"cells": rows, "ok": bool(ok)}, rows


def cmd_verify(args):
    from .verify import QUICK, run_criteria

    numbers = QUICK if args.quick else (args.only or range(1, 14))
    _require(all(1 <= n <= 13 for n in numbers), "criteria are numbered 1..13")

    def progress(res):
        print(res.line(), file=sys.stderr, flush=True)

    results = run_criteria(numbers, args.seed, args.threads, progress)
    rows = [r.to_json() for r in results]
    ok = all(r.passed for r in results)
    return {"criteria": rows, "quick": bool(args.quick), "ok": ok}, [
        {"number": r["number"], "name": r["name"], "passed": r["passed"]} for r in rows
    ]


# -- parser -----------------------------------------------------------------------------


def _add_function_args(p):
    p.add_argument("--g", choices=BUILTINS, default="moebius", help="multiplicative function")
    p.add_argument("--density", type=float, default=1.0, help="support density for --g random")
    p.add_argument("--chi-mod", type=int, help="modulus of the character for --g character")
    p.add_argument("--chi-index", type=int, default=0, help="index of the character for --g character")
    p.add_argument("--conjugate", action="store_true", help="use the conjugate character")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--threads", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("--seed", type=int, default=0, help="seed for every random draw")

    parser = argparse.ArgumentParser(prog="chartax", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("characters", parents=[common], help="group structure, orders and character sum maxima")
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--values", action="store_true", help="include value tables")
    p.add_argument("--no-pv", action="store_true", help="skip the interval-sum maxima")
    p.set_defaults(func=cmd_characters)

    p = sub.add_parser("distance", parents=[common], help="distance profiles and t-scans")
    _add_function_args(p)
    p.add_argument("--kind", choices=("g", "halasz"), default="g")
    p.add_argument("--D", type=int, default=1)
    p.add_argument("--x", type=_big_int, required=True)
    p.add_argument("--B", type=float, default=1.0, help="scan |t| <= D^B unless --T is given")
    p.add_argument("--T", type=float)
    p.add_argument("--t", type=float, help="evaluate at this t instead of minimising")
    p.add_argument("--Y", type=float, help="lower end of the prime range for --kind halasz")
    p.add_argument("--chars", default="all")
    p.add_argument("--weighted", choices=("none", "char-weighted", "self-normalized"), default="none")
    p.add_argument("--grid", action="store_true", help="emit the full t-scan")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("dichotomy", parents=[common], help="order/support dichotomy sweeps")
    p.add_argument("--D", type=_int_list, required=True, help="comma-separated moduli")
    p.add_argument("--x", type=_big_int, required=True)
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("--t", type=_float_list, default=[0.0])
    p.add_argument("--support", nargs="+", default=["all"], help="support specs")
    p.add_argument("--chars", default="nonprincipal")
    p.add_argument("--r", type=int, help="also run the order-r bound")
    p.add_argument("--extremal", type=int, metavar="R", help="use the R-th power residue support and order-R characters")
    p.set_defaults(func=cmd_dichotomy)

    p = sub.add_parser("taxonomy", parents=[common], help="exceptional characters and residual envelope")
    _add_function_args(p)
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--x", type=_big_int, required=True)
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("--delta", type=float, help="threshold parameter (default eps^2/2)")
    p.add_argument("--normalization", choices=("phi", "D"), default="phi")
    p.add_argument("--refine-real", action="store_true")
    p.set_defaults(func=cmd_taxonomy)

    p = sub.add_parser("largesieve", parents=[common], help="maximal-gap large sieve matrix")
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--J", type=int, default=1)
    p.add_argument("--H", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--N", type=int, default=1000, help="coefficient support length")
    p.add_argument("--Q", type=int, default=1)
    p.add_argument("--coeffs", choices=("sign", "phase", "resonant", "ones"), default="sign")
    p.add_argument("--instances", type=int, default=1)
    p.add_argument("--include-D-primes", action="store_true")
    p.set_defaults(func=cmd_largesieve)

    p = sub.add_parser("smooth", parents=[common], help="smooth numbers in a progression")
    p.add_argument("--x", type=_big_int, required=True)
    p.add_argument("--D", type=_int_list, required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--chain", action="store_true", help="include reduction diagnostics")
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("verify", parents=[common], help="run the acceptance criteria")
    p.add_argument("--quick", action="store_true", help="criteria 1, 2, 3, 6 and 7 only")
    p.add_argument("--only", type=_int_list, help="comma-separated criterion numbers")
    p.set_defaults(func=cmd_verify)
    return parser


_RUNTIME_KEYS = ("func", "format", "out", "threads")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    if args.seed < 0:
        parser.error("--seed must be >= 0")
    try:
        result, rows = args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ValueError, MemoryError) as exc:
        parser.error(f"precondition violated: {exc}")
    config = {k: v for k, v in vars(args).items() if k not in _RUNTIME_KEYS}
    env = report.envelope(args.subcommand, config, args.seed, result)
    report.validate(env)
    text = report.dumps(env) if args.format == "json" else report.to_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if result["ok"] else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
