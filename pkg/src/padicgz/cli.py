"""Command-line front end: evaluators, verification runs, instance generation.

Exit codes: 0 all checks pass, 1 a verification failed, 2 malformed input or
a violated invariant.  `verify` always emits line-delimited records with a
schema_version field; the other subcommands print text unless --structured
is given.  The environment variable PADIC_GZ_MAXDEPTH lowers the depth cap
(default 12); working lengths are capped at N = 64.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import List, Optional

from .errors import PadicError
from .generate import generate_instance
from .gz import GZInstance, verify_thm71, verify_thm91
from .lfactors import (LocalCharCase, LocalRepCase, alpha_ordinary_unit,
                       case_table, epsilon_sq, exceptional_zero, local_L)
from .padic import QuadContext
from .projline import mult_integral
from .serialize import (dumps, format_scalar, load_measure, report_line,
                        save_instance_dict)

MAX_N = 64
MAX_DEPTH = 12


class _CLIError(Exception):
    """Input problem detected by the front end itself (exit code 2)."""


def _depth_cap() -> int:
    raw = os.environ.get("PADIC_GZ_MAXDEPTH")
    if raw is None:
        return MAX_DEPTH
    try:
        cap = int(raw)
    except ValueError:
        raise _CLIError(f"PADIC_GZ_MAXDEPTH={raw!r} is not an integer")
    if cap < 1:
        raise _CLIError(f"PADIC_GZ_MAXDEPTH={cap} must be >= 1")
    return min(cap, MAX_DEPTH)


def _check_N(n: int) -> int:
    if not 4 <= n <= MAX_N:
        raise _CLIError(f"working length N={n} outside 4..{MAX_N}")
    return n


def _parse_point(ctx, qctx, text: str):
    """An integer, or 'a,b' coordinates when a quadratic context is active."""
    if "," in text:
        if qctx is None:
            raise _CLIError(
                f"coordinate pair {text!r} needs --quad to fix the extension")
        parts = text.split(",")
        if len(parts) != 2:
            raise _CLIError(f"expected 'a,b', got {text!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise _CLIError(f"non-integer coordinates in {text!r}")
        return qctx.from_pair(a, b)
    try:
        v = int(text)
    except ValueError:
        raise _CLIError(f"expected an integer endpoint, got {text!r}")
    return qctx.from_pair(v, 0) if qctx is not None else ctx.from_int(v)


def cmd_integrate(args) -> int:
    mu = load_measure(args.measure, N=args.N and _check_N(args.N),
                      depth_cap=_depth_cap())
    ctx = mu.ctx
    qctx = None
    if args.quad:
        qctx = (QuadContext.inert(ctx) if args.quad == "inert"
                else QuadContext.ramified(ctx, args.variant))
    t1 = _parse_point(ctx, qctx, args.tau1)
    t2 = _parse_point(ctx, qctx, args.tau2)
    got = mult_integral(mu, t1, t2, target=args.target)
    eff = "inf" if got.effective == float("inf") else int(got.effective)
    value = format_scalar(got.value)
    if args.structured:
        print(report_line({"op": "integrate", "value": value,
                           "effective": eff, "depth": got.depth,
                           "converged": got.converged}))
    else:
        print(value)
        print(f"effective digits: {eff}")
    return 0


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise _CLIError(f"not a rational number: {text!r}")


def _lfactor_row(row: dict) -> str:
    s = row["s"]
    l_txt = "pole" if row["pole"] else str(row["L"])
    return (f"{row['kind']:10s} {row['torus']:8s} "
            f"chi(w)={row['chi_omega']:+d} s={s} L={l_txt} "
            f"eps^2={row['eps_sq']} exceptional={row['exceptional']}")


def cmd_lfactor(args) -> int:
    if args.alpha:
        a = alpha_ordinary_unit(args.q)
        print(report_line({"op": "lfactor", "alpha": str(a), "q": args.q})
              if args.structured else str(a))
        return 0
    if args.table:
        rows = case_table(args.q)
        for row in rows:
            if args.structured:
                out = dict(row)
                out["s"] = str(out["s"])
                out["L"] = None if out["pole"] else str(out["L"])
                out["eps_sq"] = str(out["eps_sq"])
                print(report_line({"op": "lfactor", **out}))
            else:
                print(_lfactor_row(row))
        return 0
    if args.torus is None:
        raise _CLIError("one of --split / --inert / --ramified is required")
    if args.kind == "generic":
        if args.l_ad is None or args.l_half is None:
            raise _CLIError("--generic needs --l-ad and --l-half")
        rep = LocalRepCase.generic(_fraction(args.l_ad),
                                   _fraction(args.l_half))
    else:
        rep = LocalRepCase(args.kind)
    char = LocalCharCase(args.torus, chi_omega=args.chi_omega,
                         conductor=args.conductor, q=args.q)
    if args.eps:
        es = epsilon_sq(rep, char)
        exc = exceptional_zero(rep, char)
        if args.structured:
            print(report_line({"op": "lfactor", "kind": args.kind,
                               "torus": args.torus, "eps_sq": str(es),
                               "exceptional": exc}))
        else:
            print(es)
        return 0
    lv = local_L(rep, char, _fraction(args.s))
    exc = exceptional_zero(rep, char)
    if lv.pole:
        text = "pole (exceptional zero)" if exc else "pole"
    else:
        text = str(lv.value)
    if args.structured:
        print(report_line({"op": "lfactor", "kind": args.kind,
                           "torus": args.torus, "chi_omega": args.chi_omega,
                           "s": args.s, "q": args.q,
                           "L": None if lv.pole else str(lv.value),
                           "pole": lv.pole, "exceptional": exc}))
    else:
        print(text)
    return 0


def _verify_checks(inst: GZInstance):
    """(name, chi-row, thunk) triples in their fixed emission order."""
    rows = inst.character_rows or [tuple(0 for _ in inst.galois.orders)]
    checks = []
    for row in rows:
        if inst.r() == 1:
            checks.append(("thm71", row,
                           lambda r=row: verify_thm71(inst, r)))
        checks.append(("thm91", row, lambda r=row: verify_thm91(inst, r)))
    return checks


def cmd_verify(args) -> int:
    inst = GZInstance.load(args.instance, depth_cap=_depth_cap())
    checks = _verify_checks(inst)
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(lambda c: c[2](), checks))
    else:
        results = [thunk() for _, _, thunk in checks]
    failures = 0
    for (name, row, _), rep in zip(checks, results):
        rec = {"op": "verify", "check": name, "chi": list(row),
               "ok": rep.ok, "r": rep.r,
               "lhs": rep.lhs and list(rep.lhs),
               "rhs": rep.rhs and list(rep.rhs)}
        if name == "thm91":
            rec.update({"base": rep.base_equal, "squared": rep.squared_equal,
                        "eps_sq": rep.eps_sq})
        if rep.detail:
            rec["detail"] = rep.detail
        print(report_line(rec))
        if not rep.ok:
            failures += 1
    print(report_line({"op": "verify", "summary": True,
                       "ok": failures == 0, "checks": len(checks),
                       "failures": failures}))
    return 0 if failures == 0 else 1


def _parse_eps(text: str):
    out = []
    for part in text.split(","):
        f = _fraction(part)
        out.append((f.numerator, f.denominator))
    return out


def cmd_gen(args) -> int:
    cap = _depth_cap()
    if args.depth > cap:
        raise _CLIError(f"depth {args.depth} exceeds the cap {cap}")
    _check_N(args.N)
    try:
        primes = tuple(int(x) for x in args.primes.split(","))
    except ValueError:
        raise _CLIError(f"bad prime list {args.primes!r}")
    torus = None
    if args.torus:
        parts = args.torus.split(",")
        torus = parts[0] if len(parts) == 1 else tuple(parts)
    doc = generate_instance(
        args.seed, primes=primes, cl=args.cl, depth=args.depth, N=args.N,
        m=args.m, tensors=args.tensors, torus=torus,
        unit_index=args.unit_index,
        eps_sq=_parse_eps(args.eps_sq) if args.eps_sq else None)
    if args.out:
        save_instance_dict(doc, args.out)
        print(args.out)
    else:
        sys.stdout.write(dumps(doc))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="padic-gz",
        description="Exact local evaluators and degree-zero verification")
    ap.add_argument("--structured", action="store_true",
                    help="line-delimited records instead of plain text")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("integrate",
                       help="multiplicative integral of a measure file")
    g.add_argument("measure")
    g.add_argument("tau1")
    g.add_argument("tau2")
    g.add_argument("--N", type=int, default=None,
                   help="override the working length")
    g.add_argument("--target", type=int, default=None,
                   help="stop once this many digits certify")
    g.add_argument("--quad", choices=("inert", "ramified"), default=None)
    g.add_argument("--variant", type=int, default=0)
    g.set_defaults(func=cmd_integrate)

    g = sub.add_parser("lfactor", help="exact local factors and markers")
    tor = g.add_mutually_exclusive_group()
    tor.add_argument("--split", dest="torus", action="store_const",
                     const="split")
    tor.add_argument("--inert", dest="torus", action="store_const",
                     const="inert")
    tor.add_argument("--ramified", dest="torus", action="store_const",
                     const="ramified")
    kind = g.add_mutually_exclusive_group()
    kind.add_argument("--steinberg+", dest="kind", action="store_const",
                      const="steinberg+")
    kind.add_argument("--steinberg-", dest="kind", action="store_const",
                      const="steinberg-")
    kind.add_argument("--generic", dest="kind", action="store_const",
                      const="generic")
    g.set_defaults(kind="steinberg+", torus=None)
    g.add_argument("--chi-omega", type=int, default=1, choices=(1, -1))
    g.add_argument("--conductor", type=int, default=0)
    g.add_argument("--q", type=int, default=5)
    g.add_argument("--s", default="-1/2")
    g.add_argument("--l-ad", default=None)
    g.add_argument("--l-half", default=None)
    g.add_argument("--table", action="store_true",
                   help="all kind x torus x sign rows at s = -1/2, 1/2")
    g.add_argument("--alpha", action="store_true",
                   help="the ordinary local unit for --q")
    g.add_argument("--eps", action="store_true",
                   help="print the squared epsilon factor instead of L")
    g.set_defaults(func=cmd_lfactor)

    g = sub.add_parser("verify", help="run all identity checks on an instance")
    g.add_argument("instance")
    g.add_argument("--jobs", type=int, default=1,
                   help="parallel checks; output order is fixed regardless")
    g.set_defaults(func=cmd_verify)

    g = sub.add_parser("gen", help="write a seeded random instance")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--primes", default="3")
    g.add_argument("--cl", type=int, default=2)
    g.add_argument("--depth", type=int, default=3)
    g.add_argument("--N", type=int, default=12)
    g.add_argument("--m", type=int, default=1)
    g.add_argument("--tensors", type=int, default=1)
    g.add_argument("--torus", default=None,
                   help="'inert', 'ramified', or one per prime")
    g.add_argument("--unit-index", type=int, default=None)
    g.add_argument("--eps-sq", default=None,
                   help="comma list of rationals, e.g. '4,9/2'")
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gen)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _CLIError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except PadicError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
