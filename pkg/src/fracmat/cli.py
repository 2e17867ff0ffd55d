"""Command-line front end.

Exit codes: 0 success, 1 failed self-test, 2 invalid input, 3 numerical
failure, 4 tolerance not met.  Every error prints one line on stderr.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from collections.abc import Sequence

import numpy as np

from fracmat import balakrishnan, convergence, fraccalc, semigroup, symfun, twoband
from fracmat.errors import (
    EvalDomainError,
    FracmatError,
    NonMonotoneSamples,
    NonVanishingAtA,
    NonVanishingAtB,
    OracleNotConverged,
    OutOfRange,
    ParseError,
    ToleranceNotMet,
    UnknownCatalogEntry,
)
from fracmat.funcspec import FunctionSpec, catalog

__all__ = ["main", "build_parser"]

SCHEMA = 1
EXIT_SELFTEST = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_TOLERANCE = 4

GRAMMAR = """\
expressions (--f, --g), one variable x:
  expr   := term (('+'|'-') term)*
  term   := factor (('*'|'/') factor)*
  factor := ['-'] power
  power  := atom ['^' factor]
  atom   := number | 'x' | func '(' expr [',' expr] ')' | '(' expr ')'
  func   := exp | log | sqrt | sin | cos | abs | pow
or a catalog entry: catalog:NAME[:key=value,...] with NAME one of
  power-beta, neg-power-beta, identity, monomial, expfun
"""


class _InputError(Exception):
    pass


#: library errors that mean "the request is invalid" rather than "the numerics failed"
_PRECONDITION_ERRORS = (
    ParseError,
    EvalDomainError,
    NonMonotoneSamples,
    NonVanishingAtA,
    NonVanishingAtB,
    OutOfRange,
    UnknownCatalogEntry,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # one line, exit 2
        raise _InputError(message)


# {{{ argument types


def _finite(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _positive_float(text: str) -> float:
    v = _finite(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _float_list(text: str) -> list[float]:
    items = [s for s in text.split(",") if s.strip()]
    if not items:
        raise argparse.ArgumentTypeError("empty list")
    return [_finite(s) for s in items]


def _function(text: str, a: float, b: float) -> FunctionSpec:
    if text.startswith("catalog:"):
        parts = text.split(":")
        params = {}
        if len(parts) > 2 and parts[2]:
            for item in parts[2].split(","):
                key, _, val = item.partition("=")
                params[key.strip()] = _finite(val)
        return catalog(parts[1], a=a, b=b, **params)
    return FunctionSpec.from_string(text, a=a, b=b)


# }}}


# {{{ output


def _num(v) -> float | None:
    v = float(v)
    return None if math.isnan(v) else v


def _emit(args, payload: dict, rows: tuple[list[str], list[list]] | None) -> None:
    if args.format == "csv" and rows is not None:
        header, body = rows
        buf = io.StringIO()
        meta = {k: v for k, v in payload.items() if not isinstance(v, (list, dict))}
        buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        buf.write(",".join(header) + "\n")
        for row in body:
            buf.write(",".join(repr(float(c)) if isinstance(c, (float, np.floating)) else str(c)
                               for c in row) + "\n")
        text = buf.getvalue()
    else:
        text = json.dumps(payload, sort_keys=True, indent=1) + "\n"
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _matrix_rows(M: twoband.UpperTriangularMatrix):
    n = M.n
    return ["row", "col", "value"], [
        [s + 1, m + 1, float(M.data[s, m])] for s in range(n) for m in range(s, n)
    ]


def _diag_from_args(args) -> np.ndarray:
    if args.diag is not None:
        return np.asarray(args.diag, dtype=float)
    if args.g is None or args.n is None:
        raise _InputError("give --diag, or --g together with --n (and --a/--x)")
    grid = fraccalc.Grid(args.a, args.x, args.n)
    g = _function(args.g, args.a, args.x)
    return twoband.from_g_samples(fraccalc._g_samples(g, grid)).diag


# }}}


# {{{ commands


def cmd_matpow(args) -> int:
    if args.alpha is None:
        raise _InputError("--alpha is required")
    A = twoband.TwoBandMatrix(_diag_from_args(args))
    M = twoband.real_power(A, args.alpha)
    payload = {
        "schema": SCHEMA,
        "command": "matpow",
        "alpha": args.alpha,
        "route": M.route,
        "diag": [float(v) for v in A.diag],
        "matrix": M.to_dict(),
    }
    _emit(args, payload, _matrix_rows(M))
    return 0


def _result_payload(cmd: str, res: fraccalc.FracResult, args, extra: dict) -> tuple[dict, tuple]:
    grid = res.grid
    complex_valued = np.iscomplexobj(res.per_node)
    payload = {
        "schema": SCHEMA,
        "command": cmd,
        "alpha": res.alpha,
        "method": res.method,
        "n": grid.n,
        "h": grid.h,
        **extra,
    }
    if complex_valued:
        payload["value_re"] = float(np.real(res.value))
        payload["value_im"] = float(np.imag(res.value))
        header = ["node", "x_k", "value_re", "value_im"]
        body = [[i, float(xk), float(v.real), float(v.imag)]
                for i, (xk, v) in enumerate(zip(res.nodes, res.per_node))]
        payload["per_node"] = {"re": [float(v.real) for v in res.per_node],
                               "im": [float(v.imag) for v in res.per_node]}
    else:
        payload["value"] = float(res.value)
        header = ["node", "x_k", "value"]
        body = [[i, float(xk), float(v)] for i, (xk, v) in enumerate(zip(res.nodes, res.per_node))]
        payload["per_node"] = [float(v) for v in res.per_node]
    payload["nodes"] = [float(v) for v in res.nodes]
    return payload, (header, body)


def cmd_gl(args) -> int:
    if args.f is None or args.alpha is None or args.n is None:
        raise _InputError("gl needs --f, --alpha and --n")
    if args.side == "left":
        grid = fraccalc.Grid(args.a, args.x, args.n)
        f = _function(args.f, args.a, args.x)
        res = fraccalc.gl_left(f, grid, args.alpha)
        extra = {"a": args.a, "x": args.x, "side": "left"}
    else:
        if args.b is None:
            raise _InputError("the right-sided operator needs --b")
        grid = fraccalc.Grid(args.x, args.b, args.n)
        f = _function(args.f, args.x, args.b)
        res = fraccalc.gl_right(f, grid, args.alpha)
        extra = {"x": args.x, "b": args.b, "side": "right"}
    payload, rows = _result_payload("gl", res, args, extra)
    _emit(args, payload, rows)
    return 0


def cmd_dwrt(args) -> int:
    if args.f is None or args.g is None or args.alpha is None or args.n is None:
        raise _InputError("dwrt needs --f, --g, --alpha and --n")
    grid = fraccalc.Grid(args.a, args.x, args.n)
    f = _function(args.f, args.a, args.x)
    g = _function(args.g, args.a, args.x)
    method = args.method or "matrix-power"
    if method not in fraccalc.METHODS:
        raise _InputError(f"--method must be one of {', '.join(fraccalc.METHODS)}")
    res = fraccalc.frac_deriv_wrt(f, g, grid, args.alpha, method)
    payload, rows = _result_payload("dwrt", res, args, {"a": args.a, "x": args.x})
    _emit(args, payload, rows)
    return 0


def cmd_semigroup(args) -> int:
    if args.t is None:
        raise _InputError("semigroup needs --t")
    if args.start is not None:
        if args.g is None:
            raise _InputError("a characteristic trajectory needs --g")
        b = math.inf if args.b is None else args.b
        g = _function(args.g, args.a, b)
        C = semigroup.CharacteristicSemigroup(g, a=args.a, b=b, direction=args.direction)
        traj = [(t, C.flow(t, args.start)) for t in args.t]
        payload = {
            "schema": SCHEMA,
            "command": "semigroup",
            "kind": "characteristic",
            "g": str(g),
            "a": args.a,
            "b": None if math.isinf(b) else b,
            "start": args.start,
            "direction": args.direction,
            "t": [float(t) for t, _ in traj],
            "X": [_num(X) for _, X in traj],
        }
        _emit(args, payload, (["t", "X"], [[float(t), float(X)] for t, X in traj]))
        return 0
    if len(args.t) != 1:
        raise _InputError("the matrix semigroup takes a single --t")
    S = semigroup.MatrixSemigroup(twoband.TwoBandMatrix(_diag_from_args(args)))
    M = S.at(args.t[0])
    payload = {
        "schema": SCHEMA,
        "command": "semigroup",
        "kind": "matrix",
        "t": args.t[0],
        "strategy": S.strategy,
        "route": M.route,
        "matrix": M.to_dict(),
    }
    _emit(args, payload, _matrix_rows(M))
    return 0


def cmd_converge(args) -> int:
    if args.f is None or args.g is None or args.alpha is None:
        raise _InputError("converge needs --f, --g and --alpha")
    f = _function(args.f, args.a, args.x)
    g = _function(args.g, args.a, args.x)
    plan = convergence.wrt_plan(
        f, g, args.alpha, args.a, args.x,
        oracle=args.oracle,
        method=args.method or "matrix-power",
        regime=args.regime,
        p=args.p,
        n_min=args.n or 64,
        levels=args.levels,
    )
    rep = convergence.run_sweep(plan)
    payload = {"schema": SCHEMA, "command": "converge", "alpha": args.alpha, **rep.to_dict()}
    body = [[n, h, e] for n, h, e in zip(rep.sizes, rep.steps, rep.errors)]
    _emit(args, payload, (["n", "h", "error"], body))
    return 0


def cmd_balakrishnan_check(args) -> int:
    if args.alpha is None:
        raise _InputError("--alpha is required")
    A = twoband.TwoBandMatrix(_diag_from_args(args))
    method = args.method or "bf01"
    scheme = balakrishnan.QuadratureScheme(tol=args.tol)
    if method == "bf01":
        rep = balakrishnan.frac_power_bf01(A, args.alpha, scheme, report=True)
        exact = twoband.real_power(A, args.alpha)
    elif method == "bf02":
        rep = balakrishnan.frac_power_bf02(A, args.alpha, args.ell, scheme, report=True)
        exact = twoband.real_power(A, args.alpha)
    elif method == "bf03":
        rep = balakrishnan.neg_power_bf03(A, args.alpha, scheme, report=True)
        exact = twoband.real_power(A, -args.alpha)
    else:
        raise _InputError("--method must be one of bf01, bf02, bf03")
    err = float(np.max(np.abs(rep.value.data - exact.data)))
    payload = {
        "schema": SCHEMA,
        "command": "balakrishnan-check",
        "alpha": args.alpha,
        "method": method,
        "max_abs_error_vs_closed_form": err,
        "panels": rep.panels,
        "panels_per_decade": rep.panels_per_decade,
    }
    _emit(args, payload, None)
    return 0


def _selftest_suites() -> list[dict]:
    rng = np.random.default_rng(20240601)
    suites = []

    ok = total = 0
    for _ in range(50):
        m = int(rng.integers(1, 7))
        q = int(rng.integers(0, 7))
        a = np.sort(rng.uniform(0.1, 10.0, m))
        if not symfun.distinct(a, 1e-2):
            continue
        ref = symfun.hq_monomial(a, q)
        total += 1
        ok += (abs(symfun.hq_sylvester(a, q) - ref) <= 1e-8 * abs(ref)
               and abs(symfun.hq_recurrence(a, q) - ref) <= 1e-12 * abs(ref))
    suites.append({"name": "symfun-routes", "passed": int(ok), "total": total})

    ok = total = 0
    for m in range(1, 7):
        for q in range(0, 7):
            total += 1
            ok += symfun.hq_monomial(range(1, m + 1), q) == symfun.stirling2(q + m, m)
    suites.append({"name": "symfun-stirling", "passed": int(ok), "total": total})

    ok = total = 0
    for v in (0.3, 0.7, 1.5):
        for m in range(1, 6):
            for q in range(0, 6):
                ref = symfun.hq_monomial([v**i for i in range(m)], q)
                total += 1
                ok += abs(symfun.gaussian_binomial(m + q - 1, q, v) - ref) <= 1e-10 * abs(ref)
    suites.append({"name": "symfun-gaussian", "passed": int(ok), "total": total})

    ok = total = 0
    while total < 50:
        n = int(rng.integers(1, 13))
        a = rng.uniform(0.5, 4.0, n)
        if n > 1 and np.min(np.diff(np.sort(a))) < 0.1:
            continue
        al, be = rng.choice([0.3, 0.5, 0.7, 1.5], 2)
        lhs = twoband.real_power(a, al).data @ twoband.real_power(a, be).data
        rhs = twoband.real_power(a, al + be).data
        total += 1
        ok += np.max(np.abs(lhs - rhs)) <= 1e-8 * np.max(np.abs(rhs))
    suites.append({"name": "twoband-semigroup-law", "passed": int(ok), "total": total})
    return suites


def cmd_selftest(args) -> int:
    suites = _selftest_suites()
    passed = all(s["passed"] == s["total"] for s in suites)
    payload = {"schema": SCHEMA, "command": "selftest", "passed": passed, "suites": suites}
    rows = (["suite", "passed", "total"], [[s["name"], s["passed"], s["total"]] for s in suites])
    _emit(args, payload, rows)
    return 0 if passed else EXIT_SELFTEST


# }}}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="fracmat",
        description="Real powers of two-band matrices and fractional derivatives "
        "with respect to a function.",
        epilog=GRAMMAR,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, *, fg=True, grid=True):
        if fg:
            p.add_argument("--f", help="function f (see grammar)")
            p.add_argument("--g", help="monotone function g (see grammar)")
        if grid:
            p.add_argument("--a", type=_finite, default=0.0, help="left end (default 0)")
            p.add_argument("--x", type=_finite, default=1.0, help="evaluation point (default 1)")
            p.add_argument("--b", type=_finite, help="right end for right-sided operators")
            p.add_argument("--n", type=_positive_int, help="number of subintervals")
        p.add_argument("--alpha", type=_finite, help="order")
        p.add_argument("--diag", type=_float_list, help="diagonal 'a1,a2,...'")
        p.add_argument("--method", help="method selector")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    common(sub.add_parser("matpow", help="real power of a two-band matrix",
                          formatter_class=argparse.RawDescriptionHelpFormatter, epilog=GRAMMAR))
    p = sub.add_parser("gl", help="Grunwald-Letnikov sum", epilog=GRAMMAR,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    common(p)
    p.add_argument("--side", choices=("left", "right"), default="left")
    common(sub.add_parser("dwrt", help="fractional derivative with respect to g", epilog=GRAMMAR,
                          formatter_class=argparse.RawDescriptionHelpFormatter))
    p = sub.add_parser("semigroup", help="exp(-tA) or a characteristic trajectory",
                       epilog=GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    common(p)
    p.add_argument("--t", type=_float_list, help="time (or comma list for trajectories)")
    p.add_argument("--start", type=_finite, help="starting point of a characteristic")
    p.add_argument("--direction", type=int, choices=(1, -1), default=1)
    p = sub.add_parser("converge", help="empirical convergence rate", epilog=GRAMMAR,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    common(p)
    p.add_argument("--levels", type=_positive_int, default=4)
    p.add_argument("--regime", choices=convergence.REGIMES)
    p.add_argument("--p", type=_finite, default=0.0, help="growth exponent (polynomial regime)")
    p.add_argument("--oracle", type=_finite, help="exact value (default: quadrature)")
    p = sub.add_parser("balakrishnan-check", help="quadrature vs closed-form power")
    common(p, fg=False)
    p.add_argument("--ell", type=_positive_int, default=2)
    p.add_argument("--tol", type=_positive_float, default=1e-10, help="refinement tolerance")
    common(sub.add_parser("selftest", help="run the identity suites"), fg=False, grid=False)
    return parser


COMMANDS = {
    "matpow": cmd_matpow,
    "gl": cmd_gl,
    "dwrt": cmd_dwrt,
    "semigroup": cmd_semigroup,
    "converge": cmd_converge,
    "balakrishnan-check": cmd_balakrishnan_check,
    "selftest": cmd_selftest,
}


def _fail(code: int, message: str) -> int:
    text = " ".join(str(message).split())
    sys.stderr.write(f"fracmat: error: {text}\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _InputError("a subcommand is required")
        if getattr(args, "a", None) is not None and args.command in ("gl", "dwrt", "converge"):
            if args.command != "gl" or args.side == "left":
                if not args.a < args.x:
                    raise _InputError("need --a < --x")
        return COMMANDS[args.command](args)
    except _InputError as exc:
        return _fail(EXIT_INPUT, exc)
    except _PRECONDITION_ERRORS as exc:
        return _fail(EXIT_INPUT, f"{type(exc).__name__}: {exc}")
    except (ToleranceNotMet, OracleNotConverged) as exc:
        return _fail(EXIT_TOLERANCE, f"{type(exc).__name__}: {exc}")
    except FracmatError as exc:
        return _fail(EXIT_NUMERIC, f"{type(exc).__name__}: {exc}")
    except (ValueError, KeyError) as exc:
        return _fail(EXIT_INPUT, f"{type(exc).__name__}: {exc}")
    except OSError as exc:
        return _fail(EXIT_INPUT, f"cannot write output: {exc}")


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
