"""Command-line driver.

Subcommands map one-to-one onto the kernel: ``norm``, ``order``,
``polygon``, ``check``, ``invert``, ``defect``, ``catalog``, ``mul``.
Output is deterministic; ``--format json`` emits the documented schemas,
``--format svg`` renders polygons.  Exit codes: 0 success, 1 usage or
expression errors, 2 insufficient truncation, 3 not invertible.

For the limit levels (``fir``/``finf``/``dinf``) the optional ``--k`` flag
sets a congruence probe depth: the check then classifies with the structure
visible at levels <= k only, so an operator whose level order is still
growing at the probe depth reports ``non-finite`` even if its expression is
a finite product.  Omit ``--k`` for the honest verdict on the exact data.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import catalog, diffop, exprs, jsonio, microop, newton, svg, tower
from .errors import (ExprSyntaxError, InsufficientTruncation, MicrodiffError,
                     NotCertifiable, NotInvertible, UndecidableFiniteness,
                     UnknownSymbol, WindowOverflow)
from .tower import RingLevel, UnitVerdict


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="microdiff", description=__doc__,
                  formatter_class=argparse.RawDescriptionHelpFormatter)
    common = _Parser(add_help=False)
    common.add_argument("--prime", type=int,
                        default=int(os.environ.get("MICRODIFF_PRIME", "2")))
    common.add_argument("--dim", type=int, default=1)
    common.add_argument("--prec", type=int, default=64)
    common.add_argument("--deg-cap", type=int, default=32, dest="deg_cap")
    common.add_argument("--window", type=int, default=64)
    common.add_argument("--format", choices=("text", "json", "svg"), default="text")
    common.add_argument("--out", type=str, default=None)
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_parser(name, **kwargs):
        return sub.add_parser(name, parents=[common], **kwargs)

    def level_flags(p, with_level=True):
        if with_level:
            p.add_argument("--level", choices=("dkq", "ek", "fkr", "fir",
                                               "finf", "dinf"), default=None)
        p.add_argument("--k", type=int, default=None)
        p.add_argument("--r", type=int, default=None)

    p = add_parser("norm", help="level norm of an operator")
    p.add_argument("expr")
    level_flags(p)
    p.add_argument("--mu", type=str, default=None,
                   help="rational weight a/b; overrides --level")

    p = add_parser("order", help="largest/smallest weighted order")
    p.add_argument("expr")
    level_flags(p, with_level=False)
    p.add_argument("--mu", type=str, default=None)

    p = add_parser("polygon", help="Newton polygon")
    p.add_argument("expr")

    p = add_parser("check", help="unit verdict at a ring level")
    p.add_argument("expr")
    level_flags(p)

    p = add_parser("invert", help="explicit inverse with residual target")
    p.add_argument("expr")
    level_flags(p)
    p.add_argument("--residual", type=int, default=20,
                   help="target exponent e: ||P*S - 1|| <= p^-e")

    p = add_parser("defect", help="quasi-abelian defect of a pair")
    p.add_argument("exprP")
    p.add_argument("exprQ")
    level_flags(p, with_level=False)

    p = add_parser("catalog", help="named generator operators")
    p.add_argument("name", choices=("product_op", "gauss_op", "truncated_cofactor"))
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--exact", action="store_true")

    p = add_parser("mul", help="product of two operators")
    p.add_argument("exprP")
    p.add_argument("exprQ")
    return top


def _context(args) -> exprs.EvalContext:
    return exprs.EvalContext(prime=args.prime, dim=args.dim,
                             precision=args.prec, degree_cap=args.deg_cap,
                             window_cap=args.window)


def _eval_operator(text: str, ctx: exprs.EvalContext):
    value = exprs.evaluate(exprs.parse(text), ctx)
    return exprs._as_op(value, ctx)


def _ring_level(args) -> RingLevel:
    tag = args.level or ("fkr" if args.r is not None else "dkq")
    if tag in ("dkq", "ek"):
        if args.k is None:
            raise UsageError(f"--level {tag} needs --k")
        return RingLevel(tag, k=args.k)
    if tag == "fkr":
        if args.k is None or args.r is None:
            raise UsageError("--level fkr needs --k and --r")
        return RingLevel.fkr(args.k, args.r)
    if tag == "fir":
        if args.r is None:
            raise UsageError("--level fir needs --r")
        return RingLevel.fir(args.r)
    return RingLevel(tag)


def _norm_exponent(value: Fraction, prime: int) -> Fraction:
    if value == 0:
        raise ValueError("zero norm has no exponent")
    e = 0
    v = Fraction(value)
    while v > 1:
        v /= prime
        e += 1
    while v < 1:
        v *= prime
        e -= 1
    if v != 1:
        raise ValueError(f"{value} is not a power of {prime}")
    return Fraction(e)


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _norm_report(args, exponent: Fraction) -> str:
    if args.format == "json":
        return jsonio.dumps({"prime": args.prime,
                             "exponent": jsonio.fraction_to_json(exponent)})
    return f"norm = p^{exponent}\n"


def _cmd_norm(args, ctx) -> int:
    P = _eval_operator(args.expr, ctx)
    if args.mu is not None:
        e = diffop.norm_mu(P, Fraction(args.mu))
        _emit(args, _norm_report(args, e))
        return 0
    level = _ring_level(args)
    if level.tag == "fkr":
        value = microop.norm_Fkr(P, level.k, level.r)
    elif level.tag == "ek":
        value = microop.norm_Ek(P, level.k)
    elif level.tag == "dkq":
        value = diffop.norm_k(P, level.k)
    else:
        raise UsageError("norm needs --level dkq, ek or fkr (or --mu)")
    if value == 0:
        _emit(args, jsonio.dumps({"zero": True}) if args.format == "json"
              else "norm = 0\n")
        return 0
    _emit(args, _norm_report(args, _norm_exponent(value, args.prime)))
    return 0


def _cmd_order(args, ctx) -> int:
    if args.mu is None and args.k is None:
        raise UsageError("order needs --k or --mu")
    P = _eval_operator(args.expr, ctx)
    mu = Fraction(args.mu) if args.mu is not None else Fraction(args.k)
    upper = diffop.order_Nmu(P, mu)
    lower = diffop.order_nmu(P, mu)
    if args.format == "json":
        _emit(args, jsonio.dumps({"mu": jsonio.fraction_to_json(mu),
                                  "order_upper": upper, "order_lower": lower}))
    else:
        _emit(args, f"order N = {upper}\norder n = {lower}\n")
    return 0


def _cmd_polygon(args, ctx) -> int:
    P = _eval_operator(args.expr, ctx)
    poly = newton.polygon(P)
    if args.format == "svg":
        _emit(args, svg.render_polygon(poly, title=args.expr))
    elif args.format == "json":
        _emit(args, jsonio.dumps(jsonio.polygon_to_json(poly)))
    else:
        vertices = " ".join(f"({n},{v})" for n, v in poly.vertices)
        slopes = ", ".join(str(s) for s in poly.slopes)
        _emit(args, f"vertices: {vertices}\nslopes: {slopes}\n")
    return 0


def _probed_check(P, level: RingLevel, probe_k: int | None) -> UnitVerdict:
    """Limit-level verdict through a congruence probe depth.

    With a probe, an operator whose level order is still growing at depth k
    is classified with the infinite operators: the levels <= k cannot
    distinguish it from one.
    """
    if probe_k is None or level.tag not in ("fir", "finf", "dinf"):
        return tower.check_unit(P, level)
    cls = tower.classify_surconvergent(P)
    if cls.kind == "finite" and cls.order is not None and cls.order > 0:
        if diffop.order_Nk(P, probe_k) < cls.order:
            return UnitVerdict(False, level, violated="non-finite")
    return tower.check_unit(P, level)


def _verdict_text(verdict: UnitVerdict) -> str:
    lines = [f"invertible: {'true' if verdict.invertible else 'false'}"]
    if verdict.invertible:
        lines.append(f"beta: {list(verdict.beta)}")
        if verdict.delegate:
            lines.append(f"delegate: fkr(k={verdict.delegate[0]}, r={verdict.delegate[1]})")
    else:
        lines.append(f"clause: {verdict.violated}")
        if verdict.alpha is not None:
            lines.append(f"alpha: {list(verdict.alpha)}")
    return "\n".join(lines) + "\n"


def _cmd_check(args, ctx) -> int:
    P = _eval_operator(args.expr, ctx)
    if args.level is None:
        raise UsageError("check needs --level")
    level = _ring_level(args)
    verdict = _probed_check(P, level, args.k)
    if args.format == "json":
        _emit(args, jsonio.dumps(jsonio.verdict_to_json(verdict)))
    else:
        _emit(args, _verdict_text(verdict))
    return 0


def _operator_report(args, P) -> str:
    if args.format == "json":
        return jsonio.dumps(jsonio.operator_to_json(P))
    return f"{P}\n"


def _cmd_invert(args, ctx) -> int:
    P = _eval_operator(args.expr, ctx)
    if args.level is None:
        raise UsageError("invert needs --level")
    level = _ring_level(args)
    inverse = tower.invert(P, level, window_cap=args.window,
                           residual_exponent=args.residual)
    _emit(args, _operator_report(args, inverse))
    return 0


def _cmd_defect(args, ctx) -> int:
    if args.k is None:
        raise UsageError("defect needs --k")
    P = _eval_operator(args.exprP, ctx)
    Q = _eval_operator(args.exprQ, ctx)
    value = diffop.quasi_abelian_defect(P, Q, args.k)
    if value == 0:
        _emit(args, jsonio.dumps({"zero": True}) if args.format == "json"
              else "defect = 0\n")
        return 0
    _emit(args, _norm_report(args, _norm_exponent(value, args.prime))
          .replace("norm =", "defect ="))
    return 0


def _cmd_catalog(args, ctx) -> int:
    if args.name == "product_op":
        P = catalog.product_op(args.M, args.prime, exact=args.exact)
    elif args.name == "gauss_op":
        P = catalog.gauss_op(args.M, args.prime, exact=args.exact)
    else:
        if args.k is None:
            raise UsageError("truncated_cofactor needs --k")
        P = catalog.truncated_cofactor(args.k, args.M, args.prime)
    _emit(args, _operator_report(args, P))
    return 0


def _cmd_mul(args, ctx) -> int:
    P = _eval_operator(args.exprP, ctx)
    Q = _eval_operator(args.exprQ, ctx)
    _emit(args, _operator_report(args, microop.mul(P, Q, window_cap=args.window)))
    return 0


_COMMANDS = {
    "norm": _cmd_norm,
    "order": _cmd_order,
    "polygon": _cmd_polygon,
    "check": _cmd_check,
    "invert": _cmd_invert,
    "defect": _cmd_defect,
    "catalog": _cmd_catalog,
    "mul": _cmd_mul,
}


def run(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        ctx = _context(args)
        return _COMMANDS[args.command](args, ctx)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ExprSyntaxError, UnknownSymbol, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InsufficientTruncation, NotCertifiable, UndecidableFiniteness,
            WindowOverflow) as exc:
        print(f"uncertified: {exc}", file=sys.stderr)
        return 2
    except NotInvertible as exc:
        print(f"not invertible: {exc}", file=sys.stderr)
        return 3
    except MicrodiffError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    raise SystemExit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
