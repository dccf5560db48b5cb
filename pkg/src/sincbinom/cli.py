"""Command-line front end.

Subcommands: ``eval``, ``table``, ``integrate``, ``verify``, ``battery``.
Data goes to stdout (or ``--out``), diagnostics to stderr.  Exit codes:
0 success, 1 usage or domain error, 2 no convergence, 3 identity failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from typing import Optional, Sequence

import numpy as np

from .binomial import BinomialArgs, binom_eval
from .errors import DivergentTail, DomainError, NoConvergence
from .identities import (
    IdentityId,
    run_identity_battery,
    verify_antiderivative,
    verify_cot_identity,
    verify_rational_simple,
    verify_rational_square,
    verify_sech_integral,
    verify_sinc_representation,
    verify_triple_product,
)
from .kernels import Kernel, KernelKind
from .options import EvalOptions, Method
from .quadrature import QuadratureSpec, theorem3_evaluate, theorem3_quadrature

EXIT_OK, EXIT_USAGE, EXIT_NO_CONVERGENCE, EXIT_IDENTITY_FAILED = 0, 1, 2, 3

_REAL = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_PURE_REAL = re.compile(rf"[+-]?{_REAL}")
_PURE_IMAG = re.compile(rf"(?P<sign>[+-]?)(?P<im>{_REAL})?i")
_BOTH = re.compile(rf"(?P<re>[+-]?{_REAL})(?P<sign>[+-])(?P<im>{_REAL})?i")

_VALUE_FLAGS = {"--w", "--z", "--alpha", "--a", "--x-min", "--x-max", "--step"}


def parse_complex(text: str) -> complex:
    """Parse "1", "i", "-i", "1+2i", "1.5-0.5i" and similar."""
    # spaces are allowed around the sign only ("1 + 2i"), never inside a number
    s = re.sub(r"\s*([+-])\s*", r"\1", text.strip())
    m = _PURE_REAL.fullmatch(s)
    if m:
        return complex(float(s), 0.0)
    m = _PURE_IMAG.fullmatch(s)
    if m:
        im = float(m["im"]) if m["im"] else 1.0
        return complex(0.0, -im if m["sign"] == "-" else im)
    m = _BOTH.fullmatch(s)
    if m:
        im = float(m["im"]) if m["im"] else 1.0
        return complex(float(m["re"]), -im if m["sign"] == "-" else im)
    raise argparse.ArgumentTypeError(
        f"cannot parse {text!r} as a complex number (use forms like 1, i, -i, 1+2i, 1.5-0.5i)"
    )


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def _cjson(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--tol", type=float, default=d(None), help="absolute and relative tolerance")
    p.add_argument("--max-terms", type=int, default=d(None), help="series term budget")
    p.add_argument("--format", choices=["csv", "json"], default=d(None), help="output format")
    p.add_argument("--out", default=d(None), help="write data to this file instead of stdout")
    p.add_argument("--seed", type=int, default=d(0), help="random seed (battery)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sincbinom", description="Generalised binomial coefficients via sinc series.")
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("eval", help="evaluate C(w, z)")
    p.add_argument("--w", type=parse_complex, required=True)
    p.add_argument("--z", type=parse_complex, required=True)
    p.add_argument("--method", default="auto", help="gamma-ratio, finite-sum, sinc-series or auto")
    _add_globals(p, suppress=True)

    p = sub.add_parser("table", help="tabulate C(w, x) on a real grid")
    p.add_argument("--w", type=parse_complex, default=complex(1, 1))
    p.add_argument("--x-min", type=float, default=-2.0)
    p.add_argument("--x-max", type=float, default=8.0)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--method", default="auto")
    _add_globals(p, suppress=True)

    p = sub.add_parser("integrate", help="int C(w, x) f(x) dx by lattice sum and by quadrature")
    p.add_argument("--w", type=parse_complex, required=True)
    p.add_argument("--kernel", required=True, choices=[k.value for k in KernelKind])
    p.add_argument("--alpha", type=parse_complex, help="kernel parameter (rational-*, sech)")
    p.add_argument("--a", type=parse_complex, help="shift (sinc-shift)")
    p.add_argument("--table", help="CSV file xi,re,im (tabulated)")
    _add_globals(p, suppress=True)

    p = sub.add_parser("verify", help="check one identity")
    p.add_argument("--identity", required=True, help=", ".join(m.value for m in IdentityId))
    p.add_argument("--w", type=parse_complex)
    p.add_argument("--z", type=parse_complex)
    p.add_argument("--alpha", type=parse_complex)
    _add_globals(p, suppress=True)

    p = sub.add_parser("battery", help="seeded sweep over all identities")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--threads", type=int, default=1)
    _add_globals(p, suppress=True)
    return parser


def _glue_negative_values(argv: Sequence[str]) -> list[str]:
    """Turn ``--w -i`` into ``--w=-i`` so argparse does not read -i as a flag."""
    out: list[str] = []
    i = 0
    argv = list(argv)
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and not argv[i + 1].startswith("--"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _options(args, method: Method = Method.AUTO) -> EvalOptions:
    kw = {"method": method}
    if args.tol is not None:
        kw["abs_tol"] = kw["rel_tol"] = args.tol
    if args.max_terms is not None:
        kw["max_terms"] = args.max_terms
    return EvalOptions(**kw)


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _evaluation_dict(ev) -> dict:
    return {
        "value": _cjson(ev.value),
        "abs_error_estimate": ev.abs_error_estimate if math.isfinite(ev.abs_error_estimate) else None,
        "terms_used": ev.terms_used,
        "method": ev.method,
        "converged": ev.converged,
    }


def cmd_eval(args) -> int:
    opts = _options(args, Method.parse(args.method))
    try:
        ev = binom_eval(BinomialArgs(args.w, args.z), opts)
        code = EXIT_OK
    except NoConvergence as exc:
        print(f"sincbinom: {exc}", file=sys.stderr)
        if exc.evaluation is None:
            return EXIT_NO_CONVERGENCE
        ev, code = exc.evaluation, EXIT_NO_CONVERGENCE
    if (args.format or "json") == "csv":
        row = [format_float(ev.value.real), format_float(ev.value.imag), format_float(ev.abs_error_estimate),
               ev.terms_used, ev.method, str(ev.converged).lower()]
        _emit(args, _csv_text(["re", "im", "abs_err", "terms_used", "method", "converged"], [row]))
    else:
        _emit(args, _json_text(_evaluation_dict(ev)))
    return code


def _grid(x_min: float, x_max: float, step: float) -> np.ndarray:
    if not (math.isfinite(x_min) and math.isfinite(x_max) and math.isfinite(step)):
        raise DomainError("grid bounds must be finite")
    if not x_min < x_max:
        raise DomainError("--x-min must be below --x-max")
    if not step > 0:
        raise DomainError("--step must be positive")
    n = int(math.floor((x_max - x_min) / step + 1e-9))
    if n > 10**7:
        raise DomainError("grid too large")
    # rounding keeps lattice points such as 0 and 1 exact
    return np.round(x_min + step * np.arange(n + 1), 12)


def cmd_table(args) -> int:
    opts = _options(args, Method.parse(args.method))
    xs = _grid(args.x_min, args.x_max, args.step)
    rows = []
    code = EXIT_OK
    for x in xs:
        try:
            ev = binom_eval(BinomialArgs(args.w, float(x)), opts)
        except NoConvergence as exc:
            print(f"sincbinom: x={x}: {exc}", file=sys.stderr)
            if exc.evaluation is None:
                return EXIT_NO_CONVERGENCE
            ev, code = exc.evaluation, EXIT_NO_CONVERGENCE
        rows.append((float(x), ev.value, ev.abs_error_estimate))
    if (args.format or "csv") == "json":
        data = [{"x": x, "value": _cjson(v), "abs_err": e} for x, v, e in rows]
        _emit(args, _json_text(data))
    else:
        body = [[format_float(x), format_float(v.real), format_float(v.imag), format_float(e)] for x, v, e in rows]
        _emit(args, _csv_text(["x", "re", "im", "abs_err"], body))
    return code


def _kernel(args) -> Kernel:
    kind = KernelKind(args.kernel)
    if kind is KernelKind.TABULATED:
        if not args.table:
            raise DomainError("--table is required for the tabulated kernel")
        return Kernel.from_csv(args.table)
    if kind is KernelKind.SINC_SHIFT:
        if args.a is None:
            raise DomainError("--a is required for the sinc-shift kernel")
        return Kernel.sinc_shift(args.a)
    if args.alpha is None:
        raise DomainError(f"--alpha is required for the {kind.value} kernel")
    return {
        KernelKind.RATIONAL_SIMPLE: Kernel.rational_simple,
        KernelKind.RATIONAL_SQUARE: Kernel.rational_square,
        KernelKind.SECH: Kernel.sech,
    }[kind](args.alpha)


def cmd_integrate(args) -> int:
    kernel = _kernel(args)
    opts = _options(args)
    spec = QuadratureSpec()
    series = theorem3_evaluate(args.w, kernel, opts, spec)
    quad = theorem3_quadrature(args.w, kernel, spec)
    residual = abs(series.value - quad.value)
    if (args.format or "json") == "csv":
        rows = [[name, format_float(ev.value.real), format_float(ev.value.imag), format_float(ev.abs_error_estimate)]
                for name, ev in (("series", series), ("quadrature", quad))]
        _emit(args, _csv_text(["route", "re", "im", "abs_err"], rows))
    else:
        _emit(args, _json_text({
            "series": _evaluation_dict(series),
            "quadrature": _evaluation_dict(quad),
            "residual": residual,
        }))
    return EXIT_OK


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise DomainError(f"--identity {args.identity} needs " + ", ".join(f"--{n}" for n in missing))


def _verify(args):
    ident = IdentityId.parse(args.identity)
    # --tol sets the identity tolerance; the sums inside keep the default
    # (much tighter) tolerance
    tol_kw = {"tol": args.tol} if args.tol is not None else {}
    opts = EvalOptions() if args.max_terms is None else EvalOptions(max_terms=args.max_terms)
    if ident in (IdentityId.RATIONAL_SIMPLE, IdentityId.RATIONAL_SQUARE):
        _need(args, "w", "alpha")
        fn = verify_rational_simple if ident is IdentityId.RATIONAL_SIMPLE else verify_rational_square
        return fn(args.w, args.alpha, opts, **tol_kw)
    if ident is IdentityId.SECH:
        _need(args, "alpha")
        return verify_sech_integral(args.alpha, opts, **tol_kw)
    _need(args, "w", "z")
    fn = {
        IdentityId.ANTIDERIVATIVE: verify_antiderivative,
        IdentityId.COT: verify_cot_identity,
        IdentityId.TRIPLE_PRODUCT: verify_triple_product,
        IdentityId.SINC_REPRESENTATION: verify_sinc_representation,
    }[ident]
    return fn(args.w, args.z, opts, **tol_kw)


_REPORT_HEADER = ["identity_id", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_residual", "rel_residual",
                  "tolerance", "pass"]


def _report_row(r) -> list:
    return [r.identity_id.value, format_float(r.lhs.real), format_float(r.lhs.imag), format_float(r.rhs.real),
            format_float(r.rhs.imag), format_float(r.abs_residual), format_float(r.rel_residual),
            format_float(r.tolerance), str(r.passed).lower()]


def cmd_verify(args) -> int:
    report = _verify(args)
    if (args.format or "json") == "csv":
        _emit(args, _csv_text(_REPORT_HEADER, [_report_row(report)]))
    else:
        _emit(args, _json_text(report.to_dict()))
    return EXIT_OK if report.passed else EXIT_IDENTITY_FAILED


def cmd_battery(args) -> int:
    opts = _options(args)
    reports = run_identity_battery(args.samples, args.seed, opts, QuadratureSpec(), threads=args.threads)
    failures = sum(not r.passed for r in reports)
    if (args.format or "json") == "csv":
        _emit(args, _csv_text(_REPORT_HEADER, [_report_row(r) for r in reports]))
    else:
        _emit(args, _json_text([r.to_dict() for r in reports]))
    print(f"sincbinom: {len(reports)} reports, {failures} failures", file=sys.stderr)
    return EXIT_OK if failures == 0 else EXIT_IDENTITY_FAILED


_COMMANDS = {
    "eval": cmd_eval,
    "table": cmd_table,
    "integrate": cmd_integrate,
    "verify": cmd_verify,
    "battery": cmd_battery,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    args = parser.parse_args(_glue_negative_values(argv))
    try:
        return _COMMANDS[args.command](args)
    except (NoConvergence, DivergentTail) as exc:
        print(f"sincbinom: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (DomainError, OverflowError, ValueError) as exc:
        print(f"sincbinom: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
