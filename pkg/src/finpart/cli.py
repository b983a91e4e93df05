"""``finpart`` command-line interface.

Every command builds a report ``{command, parameters, rows, summary}`` and
prints it as JSON (17 significant digits), CSV or a text table (10 digits).

Exit codes: 0 on success, 2 when a computed error exceeds its bound,
1 on usage or domain errors (one line on standard error).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .contour import Contour, real_quad
from .errors import FinpartError
from .finite_part import FpiProblem, fpi_contour, fpi_epsilon_limit, fpi_limit
from .functions import make_builtin
from .reference import canonical_infinity, e1_expansion, igamma_expansion
from .stieltjes import (
    StieltjesProblem,
    correction_term,
    expand_origin,
    pole_exclusion_audit,
    stieltjes_direct,
)

PROG = "finpart"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _json_number(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def to_json(obj: Any) -> str:
    """Serialise with floats at 17 significant digits; non-finite as ``null``."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _json_number(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{to_json(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _cell(v: Any, digits: int) -> str:
    if isinstance(v, float):
        return format(v, f".{digits}g")
    if isinstance(v, (list, tuple)) and all(isinstance(x, (int, float)) for x in v):
        return "[" + ", ".join(_cell(x, digits) for x in v) + "]"
    if isinstance(v, (list, tuple, dict)):
        return to_json(v)
    return "" if v is None else str(v)


def render(report: Dict[str, Any], fmt: str) -> str:
    rows = report["rows"]
    cols: List[str] = []
    for r in rows:
        cols += [k for k in r if k not in cols]
    if fmt == "json":
        return to_json(report)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_cell(r.get(c), 17) for c in cols])
        return buf.getvalue().rstrip("\n")
    table = [cols] + [[_cell(r.get(c), 10) for c in cols] for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(cols))]
    lines = [f"# {report['command']}"]
    lines.append("# " + " ".join(f"{k}={_cell(v, 10)}" for k, v in report["parameters"].items()))
    for row in table:
        lines.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
    s = report["summary"]
    lines.append(f"# max_abs_error={_cell(s['max_abs_error'], 10)} bound_satisfied={str(s['bound_satisfied']).lower()}")
    return "\n".join(lines)


def _report(command: str, params: Dict[str, Any], rows: List[Dict[str, Any]], max_err: Optional[float], ok: bool):
    return {
        "command": command,
        "parameters": params,
        "rows": rows,
        "summary": {"max_abs_error": max_err, "bound_satisfied": bool(ok)},
    }


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def cmd_fpi(args) -> Dict[str, Any]:
    f = make_builtin(args.f)
    power = args.n + args.nu
    if power < 1 - 1e-12:
        raise FinpartError(f"exponent n + nu = {power:g} is integrable; nothing to regularise")
    p = FpiProblem.from_power(f, args.a, power)
    contour = Contour.parse(args.contour) if args.contour else None
    methods = {"both": ["limit", "contour"]}.get(args.method, [args.method])
    rows = []
    for m in methods:
        if m == "limit":
            r = fpi_limit(p, args.tol)
        elif m == "contour":
            r = fpi_contour(p, contour, max(args.tol, 1e-13))
        else:
            r = fpi_epsilon_limit(p)
        rows.append(
            {
                "method": r.method,
                "value": r.value,
                "error_estimate": r.error_estimate,
                "dropped_divergences": [d.as_dict() for d in r.dropped_divergences],
            }
        )
    params = {"f": args.f, "n": args.n, "nu": args.nu, "a": args.a, "method": args.method, "tol": args.tol}
    if len(rows) == 2:
        diff = abs(rows[0]["value"] - rows[1]["value"])
        ok = diff <= 1e-8 * (1 + abs(rows[0]["value"]))
        return _report("fpi", params, rows, diff, ok)
    err = rows[0]["error_estimate"]
    return _report("fpi", params, rows, err, True)


def cmd_stieltjes(args) -> Dict[str, Any]:
    f = make_builtin(args.f)
    p = StieltjesProblem(f, args.nu, args.omega, args.a)
    r = expand_origin(p, args.terms, args.tol)
    direct = r.reference
    rows = []
    ok = True
    errs = []
    for i, (s, b) in enumerate(zip(r.partial_sums, r.remainder_bounds)):
        total = s + r.correction_term
        err = abs(total - direct) if direct is not None else None
        if err is not None:
            errs.append(err)
            ok = ok and err <= b + 10 * args.tol
        rows.append(
            {"n": i + 1, "S_n": s, "correction": r.correction_term, "total": total, "bound": b, "direct": direct, "abs_err": err}
        )
    params = {"f": args.f, "nu": args.nu, "omega": args.omega, "a": args.a, "terms": r.N, "rho": r.rho_used, "tol": args.tol}
    return _report("stieltjes", params, rows, max(errs) if errs else None, ok)


def _canonical_direct(nu: float, omega: float, tol: float) -> float:
    return stieltjes_direct(StieltjesProblem(make_builtin(f"power1p({nu!r})"), 0.0, omega, math.inf), tol)


def cmd_expand_infinity(args) -> Dict[str, Any]:
    direct = _canonical_direct(args.nu, args.omega, args.tol)
    rows = []
    for n in range(1, args.terms + 1):
        _, value = canonical_infinity(args.nu, args.omega, n, corrected=not args.naive)
        rows.append({"N": n, "value": value, "direct": direct, "abs_err": abs(value - direct)})
    params = {"nu": args.nu, "omega": args.omega, "terms": args.terms, "naive": bool(args.naive)}
    return _report("expand-infinity", params, rows, rows[-1]["abs_err"], True)


def cmd_missing_terms(args) -> Dict[str, Any]:
    direct = _canonical_direct(args.nu, args.omega, args.tol)
    rows = []
    for n in range(1, args.terms + 1):
        _, naive = canonical_infinity(args.nu, args.omega, n, corrected=False)
        _, corrected = canonical_infinity(args.nu, args.omega, n, corrected=True)
        rows.append(
            {
                "N": n,
                "naive": naive,
                "corrected": corrected,
                "direct": direct,
                "naive_err": abs(naive - direct),
                "corrected_err": abs(corrected - direct),
            }
        )
    last = rows[-1]
    params = {"nu": args.nu, "omega": args.omega, "terms": args.terms}
    return _report("demo missing-terms", params, rows, last["corrected_err"], last["corrected_err"] < last["naive_err"])


def _e1_oracle(omega: float, tol: float) -> float:
    # E1(w) = e^-w ∫_0^inf e^-x / (w + x) dx
    p = StieltjesProblem(make_builtin("exp_neg"), 0.0, omega, math.inf)
    return math.exp(-omega) * stieltjes_direct(p, tol)


def _igamma_oracle(nu: float, omega: float, tol: float) -> float:
    # Γ(ν, ω) = e^-ω ∫_0^inf (ω + x)^(ν-1) e^-x dx; the tail past x = 60 is below 1e-26
    res = real_quad(lambda x: (omega + x) ** (nu - 1.0) * np.exp(-x), 0.0, 60.0, rtol=tol, atol=0.0, breakpoints=(1.0, 5.0, 20.0))
    return math.exp(-omega) * res.value


def cmd_e1(args) -> Dict[str, Any]:
    rows = []
    for w in args.omega:
        series = e1_expansion(w, args.terms)
        ref = _e1_oracle(w, args.tol)
        rows.append({"omega": w, "series": series, "reference": ref, "abs_err": abs(series - ref)})
    worst = max(r["abs_err"] for r in rows)
    return _report("demo e1", {"omega": list(args.omega), "terms": args.terms}, rows, worst, worst <= 1e-9)


def cmd_igamma(args) -> Dict[str, Any]:
    rows = []
    for nu in args.nu:
        for w in args.omega:
            series = igamma_expansion(nu, w, args.terms)
            ref = _igamma_oracle(nu, w, args.tol)
            rows.append({"nu": nu, "omega": w, "series": series, "reference": ref, "abs_err": abs(series - ref)})
    worst = max(r["abs_err"] for r in rows)
    params = {"nu": list(args.nu), "omega": list(args.omega), "terms": args.terms}
    return _report("demo igamma", params, rows, worst, worst <= 1e-9)


def cmd_pole_exclusion(args) -> Dict[str, Any]:
    p = StieltjesProblem(make_builtin(args.f), args.nu, args.omega, args.a)
    corr = correction_term(p)
    rows = []
    for n in range(args.n_min, args.n_max + 1):
        res, decay = pole_exclusion_audit(p, n)
        rows.append({"n": n, "residue_term": res, "correction": corr, "diff": res - corr, "bound_decay": decay})
    vals = [r["residue_term"] for r in rows]
    drift = max(vals) - min(vals)
    worst = max(abs(r["diff"]) for r in rows)
    params = {"f": args.f, "nu": args.nu, "omega": args.omega, "a": args.a, "n_min": args.n_min, "n_max": args.n_max}
    return _report("demo pole-exclusion", params, rows, worst, drift <= 1e-12 and worst <= 1e-10)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--tol", type=_float, default=d(1e-12), help="relative quadrature tolerance (default 1e-12)")
    p.add_argument("--format", choices=("json", "csv", "text"), default=d("text"), help="output format (default text)")
    p.add_argument("--contour", default=d(None), help="contour for the fpi contour method: circle:a | rect:a,h | rho:r,a")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description="Finite-part integrals and corrected Stieltjes expansions.")
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, help_text, **kw):
        p = sub.add_parser(name, help=help_text, description=help_text, **kw)
        _add_globals(p, suppress=True)
        return p

    p = add("fpi", "finite part of ∫_0^a f(x) / x^(n+nu) dx; rows: method, value, error_estimate, dropped_divergences")
    p.add_argument("--f", required=True, help="one | exp_neg | cos | geom(p) | poly(c0,c1,...) | power1p(nu)")
    p.add_argument("--n", type=int, required=True, help="integer part of the exponent n + nu (n >= 1)")
    p.add_argument("--nu", type=_float, default=0.0)
    p.add_argument("--a", type=_float, required=True)
    p.add_argument("--method", choices=("limit", "contour", "both", "epsilon"), default="both")
    p.set_defaults(func=cmd_fpi)

    p = add("stieltjes", "origin expansion of ∫_0^a x^-nu f(x)/(omega+x) dx; CSV columns: n, S_n, correction, total, bound, direct, abs_err")
    p.add_argument("--f", required=True)
    p.add_argument("--nu", type=_float, default=0.0)
    p.add_argument("--omega", type=_float, required=True)
    p.add_argument("--a", type=_float, required=True, help="upper limit; 'inf' allowed for exp_neg")
    p.add_argument("--terms", type=int, default=None, help="number of finite-part terms (default: until B_n < 1e-10)")
    p.add_argument("--report", choices=("json", "csv", "text"), dest="format", default=argparse.SUPPRESS, help="same as --format")
    p.set_defaults(func=cmd_stieltjes)

    p = add("expand-infinity", "large-omega expansion of ∫_0^inf (1+x)^-nu/(omega+x) dx; columns: N, value, direct, abs_err")
    p.add_argument("--nu", type=_float, required=True)
    p.add_argument("--omega", type=_float, required=True)
    p.add_argument("--terms", type=int, default=12)
    p.add_argument("--naive", action="store_true", help="drop the branch-point series")
    p.set_defaults(func=cmd_expand_infinity)

    demo = add("demo", "worked examples")
    dsub = demo.add_subparsers(dest="demo", parser_class=_Parser)
    dsub.required = True

    def add_demo(name, help_text):
        q = dsub.add_parser(name, help=help_text, description=help_text)
        _add_globals(q, suppress=True)
        return q

    q = add_demo("missing-terms", "naive vs corrected expansion at infinity; columns: N, naive, corrected, direct, naive_err, corrected_err")
    q.add_argument("--nu", type=_float, default=1.0 / 3.0)
    q.add_argument("--omega", type=_float, default=10.0)
    q.add_argument("--terms", type=int, default=12)
    q.set_defaults(func=cmd_missing_terms)

    q = add_demo("e1", "E1 origin series vs quadrature; columns: omega, series, reference, abs_err")
    q.add_argument("--omega", type=_float, nargs="+", default=[0.1, 0.5, 1.0, 2.0, 5.0])
    q.add_argument("--terms", type=int, default=None)
    q.set_defaults(func=cmd_e1)

    q = add_demo("igamma", "incomplete gamma origin series vs quadrature; columns: nu, omega, series, reference, abs_err")
    q.add_argument("--nu", type=_float, nargs="+", default=[0.25, 0.5, 0.75])
    q.add_argument("--omega", type=_float, nargs="+", default=[0.5, 1.0, 2.0])
    q.add_argument("--terms", type=int, default=None)
    q.set_defaults(func=cmd_igamma)

    q = add_demo("pole-exclusion", "residue left in the remainder vs the pole correction; columns: n, residue_term, correction, diff, bound_decay")
    q.add_argument("--f", default="exp_neg")
    q.add_argument("--nu", type=_float, default=0.5)
    q.add_argument("--omega", type=_float, default=0.25)
    q.add_argument("--a", type=_float, default=1.0)
    q.add_argument("--n-min", type=int, default=3)
    q.add_argument("--n-max", type=int, default=15)
    q.set_defaults(func=cmd_pole_exclusion)
    return parser


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    """Parse ``argv``, run one command and print its report. Returns the exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        report = args.func(args)
    except UsageError as exc:
        print(f"{PROG}: error: {exc}", file=err)
        return 1
    except (FinpartError, ValueError, ArithmeticError) as exc:
        msg = " ".join(str(exc).split())
        print(f"{PROG}: error: {type(exc).__name__}: {msg}", file=err)
        return 1
    print(render(report, args.format), file=out)
    return 0 if report["summary"]["bound_satisfied"] else 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
