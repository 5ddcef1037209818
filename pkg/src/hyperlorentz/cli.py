"""Command-line front end: constants tables, single checks, sweeps, sharpness
experiments and the acceptance self-test.

Exit status: 0 when no row is violated, 1 when a violation is found, 2 for
usage or domain errors, 3 for numerical failures (non-convergence).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .constants import conjugate, poincare_constant, sobolev_constant
from .errors import DomainError, NumericalError, PreconditionError, UnsupportedError
from .kernels import PER_DECADE
from .sharpness import SHARPNESS_COLUMNS, run_sharpness
from .verifier import (
    DEFAULT_TOL,
    REGISTRY,
    VIOLATED,
    SweepSpec,
    _fmt,
    _json_value,
    reports_to_csv,
    reports_to_json,
    summarize,
    sweep,
)

__all__ = ["main", "build_parser", "parse_range", "parse_t_log", "CONFIG_ENV"]

CONFIG_ENV = "HYPERLORENTZ_CONFIG"
EXIT_OK, EXIT_VIOLATED, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3

# keys a config file may override; values must have the listed type
_CONFIG_KEYS = {
    "tol": float,
    "per_decade": int,
    "jobs": int,
    "format": str,
    "t_log": str,
    "epsilon": float,
    "R": str,
    "seed": int,
    "count": int,
}


class UsageError(Exception):
    """Malformed command line or configuration."""


def _number(text: str) -> float:
    text = text.strip()
    try:
        if "/" in text:
            return float(Fraction(text))
        return float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a number: {text!r}") from exc


def parse_range(text: str, integer: bool = False) -> tuple:
    """Comma list (``2,3,5``, fractions allowed) or geometric ``lo:hi:count``."""
    text = str(text).strip()
    if not text:
        raise UsageError("empty parameter range")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"range {text!r} must look like lo:hi:count")
        lo, hi = _number(parts[0]), _number(parts[1])
        count = int(_number(parts[2]))
        if count < 1 or lo <= 0 or hi <= 0:
            raise UsageError(f"range {text!r} needs positive ends and count >= 1")
        values = np.geomspace(lo, hi, count).tolist()
    else:
        values = [_number(x) for x in text.split(",") if x.strip()]
    if not values:
        raise UsageError("empty parameter range")
    if integer:
        values = [int(round(v)) for v in values]
    out = []
    for v in values:
        if v not in out:
            out.append(v)
    return tuple(out)


def parse_t_log(text: str) -> tuple:
    """``lo:hi:count`` in decimal exponents, e.g. ``-9:9:200``."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise UsageError(f"--t-log {text!r} must look like lo:hi:count")
    lo, hi = _number(parts[0]), _number(parts[1])
    count = int(_number(parts[2]))
    if count < 1:
        raise UsageError("--t-log count must be >= 1")
    return tuple(np.logspace(lo, hi, count).tolist())


def _load_config() -> dict:
    path = os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {CONFIG_ENV}={path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"{CONFIG_ENV} must name a JSON object")
    out = {}
    for key, value in data.items():
        if key not in _CONFIG_KEYS:
            raise UsageError(f"unknown key {key!r} in {path}; known: {', '.join(_CONFIG_KEYS)}")
        try:
            out[key] = _CONFIG_KEYS[key](value)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad value for {key!r} in {path}") from exc
    return out


_NEGATIVE = re.compile(r"^-[0-9.]")


def _join_negative_values(argv: list[str]) -> list[str]:
    """Turn ``--t-log -9:9:200`` into ``--t-log=-9:9:200`` so argparse accepts it."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(argv) and _NEGATIVE.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(sub: argparse.ArgumentParser, defaults: dict) -> None:
    sub.add_argument("--format", choices=("csv", "json"), default=defaults.get("format", "csv"))
    sub.add_argument("--output", "-o", default=None, help="output path (default: standard output)")


def _params(sub: argparse.ArgumentParser, defaults: dict, n="3", m="1", p="2", q="2") -> None:
    sub.add_argument("--n", default=n, help="dimension(s): comma list or lo:hi:count")
    sub.add_argument("--m", default=m, help="derivative order(s)")
    sub.add_argument("--p", default=p, help="Lorentz exponent(s) p")
    if q is not None:
        sub.add_argument("--q", default=q, help="Lorentz exponent(s) q")


def _check_opts(sub: argparse.ArgumentParser, defaults: dict) -> None:
    sub.add_argument("--function", default=None, help="bump(rho0,k), plateau(r1,r2), zero, file:<path> or random")
    sub.add_argument("--t-log", default=defaults.get("t_log", "-9:9:200"), help="t grid as exponent lo:hi:count")
    sub.add_argument("--tol", type=float, default=defaults.get("tol", DEFAULT_TOL), help="relative violation tolerance")
    sub.add_argument("--per-decade", type=int, default=defaults.get("per_decade", PER_DECADE), help="majorant nodes per decade")
    sub.add_argument("--seed", type=int, default=defaults.get("seed", 0), help="seed for random profiles")
    sub.add_argument("--count", type=int, default=defaults.get("count", 20), help="number of random profiles")
    sub.add_argument("--chain", action="store_true", help="also report the chain steps of poincare-sobolev")


def build_parser(defaults: dict | None = None) -> argparse.ArgumentParser:
    defaults = defaults or {}
    parser = _Parser(prog="hyperlorentz", description="Numerical checks of sharp Lorentz-Sobolev inequalities on H^n.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = subs.add_parser("constants", help="table of C(n,m,p) and S(n,m,p)")
    _params(c, defaults, q=None)
    _common(c, defaults)

    names = sorted(REGISTRY)
    v = subs.add_parser("verify", help="one inequality at a single parameter tuple")
    v.add_argument("name", choices=names)
    _params(v, defaults)
    _check_opts(v, defaults)
    _common(v, defaults)

    s = subs.add_parser("sweep", help="one inequality over a parameter product")
    s.add_argument("name", choices=names)
    _params(s, defaults)
    _check_opts(s, defaults)
    s.add_argument("--jobs", type=int, default=defaults.get("jobs", 1), help="worker processes")
    _common(s, defaults)

    h = subs.add_parser("sharpness", help="ratio experiment with the extremal family f_R")
    _params(h, defaults, m="2")
    h.add_argument("--epsilon", type=float, default=defaults.get("epsilon", 0.01))
    h.add_argument("--R", default=defaults.get("R", "1e2,1e4,1e6"), help="R schedule")
    h.add_argument("--per-decade", type=int, default=defaults.get("per_decade", PER_DECADE))
    _common(h, defaults)

    t = subs.add_parser("selftest", help="run the acceptance criteria")
    t.add_argument("--only", default=None, help="comma list of criterion numbers")
    return parser


def _header(args: argparse.Namespace, extra: dict | None = None) -> dict:
    head = {"hyperlorentz": __version__, "command": args.command}
    for key, value in sorted(vars(args).items()):
        if key in ("command", "output", "format", "jobs") or value is None:
            continue
        head[key] = value
    head.update(extra or {})
    return head


def _emit(text: str, args: argparse.Namespace) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table_csv(columns, rows, header: dict) -> str:
    buf = io.StringIO()
    for key, value in header.items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def _table_json(rows) -> str:
    return json.dumps([{k: _json_value(v) for k, v in r.items()} for r in rows], indent=1) + "\n"


def _cmd_constants(args) -> int:
    rows = []
    for n in parse_range(args.n, integer=True):
        for m in parse_range(args.m, integer=True):
            for p in parse_range(args.p):
                row = {"n": n, "m": m, "p": p, "p_prime": conjugate(p), "C": poincare_constant(n, m, p)}
                if p >= n / m:
                    row["S"] = "n/a (p ≥ n/m)"
                else:
                    try:
                        row["S"] = sobolev_constant(n, m, p)
                    except DomainError as exc:
                        row["S"] = f"n/a ({exc})"
                rows.append(row)
    columns = ("n", "m", "p", "p_prime", "C", "S")
    text = _table_csv(columns, rows, _header(args)) if args.format == "csv" else _table_json(rows)
    _emit(text, args)
    return EXIT_OK


def _default_function(name: str) -> str:
    return "random" if REGISTRY[name].kind == "profile" else "bump(1,3)"


def _sweep_spec(args) -> SweepSpec:
    function = args.function or _default_function(args.name)
    return SweepSpec(
        name=args.name,
        n=parse_range(args.n, integer=True),
        m=parse_range(args.m, integer=True),
        p=parse_range(args.p),
        q=parse_range(args.q),
        functions=tuple(f.strip() for f in _split_functions(function)),
        t_grid=parse_t_log(args.t_log),
        tol=args.tol,
        seed=args.seed,
        count=args.count,
        chain=args.chain,
        per_decade=args.per_decade,
    )


def _split_functions(text: str) -> list[str]:
    """Split on ';' or on commas outside parentheses."""
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if (ch == ";" or (ch == "," and depth == 0)) and not text.startswith("file:"):
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    out = [x for x in out if x.strip()]
    if not out:
        raise UsageError("empty --function")
    return out


def _cmd_check(args, jobs: int = 1) -> int:
    spec = _sweep_spec(args)
    if args.command == "verify":
        multi = [k for k in ("n", "m", "p", "q") if len(getattr(spec, k)) > 1]
        if multi or len(spec.functions) > 1:
            raise UsageError("verify takes single values; use sweep for ranges")
    reports = sweep(spec, jobs=jobs)
    counts = summarize(reports)
    if args.format == "csv":
        head = _header(args, {"function": ";".join(spec.functions)})
        head.update({f"rows_{k}": v for k, v in counts.items()})
        text = reports_to_csv(reports, head)
    else:
        text = reports_to_json(reports)
    _emit(text, args)
    return EXIT_VIOLATED if any(r.status == VIOLATED for r in reports) else EXIT_OK


def _cmd_sharpness(args) -> int:
    R_values = parse_range(args.R)
    rows = []
    for n in parse_range(args.n, integer=True):
        for m in parse_range(args.m, integer=True):
            for p in parse_range(args.p):
                for q in parse_range(args.q):
                    rows.extend(r.row() for r in run_sharpness(n, m, p, q, args.epsilon, R_values, args.per_decade))
    text = _table_csv(SHARPNESS_COLUMNS, rows, _header(args)) if args.format == "csv" else _table_json(rows)
    _emit(text, args)
    return EXIT_VIOLATED if any(r["status"] == VIOLATED for r in rows) else EXIT_OK


def _cmd_selftest(args) -> int:
    from .acceptance import CRITERIA, format_line, run_all

    numbers = None
    if args.only:
        numbers = parse_range(args.only, integer=True)
        unknown = [k for k in numbers if k not in CRITERIA]
        if unknown:
            raise UsageError(f"unknown criteria {unknown}; known: 1-{max(CRITERIA)}")
    results = run_all(numbers)
    for r in results:
        print(format_line(r), flush=True)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else EXIT_VIOLATED


def main(argv=None) -> int:
    try:
        parser = build_parser(_load_config())
        argv = sys.argv[1:] if argv is None else list(argv)
        args = parser.parse_args(_join_negative_values(argv))
        if args.command == "constants":
            return _cmd_constants(args)
        if args.command == "verify":
            return _cmd_check(args)
        if args.command == "sweep":
            if args.jobs < 1:
                raise UsageError("--jobs must be >= 1")
            return _cmd_check(args, jobs=args.jobs)
        if args.command == "sharpness":
            return _cmd_sharpness(args)
        return _cmd_selftest(args)
    except UsageError as exc:
        print(f"hyperlorentz: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, PreconditionError, UnsupportedError) as exc:
        print(f"hyperlorentz: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"hyperlorentz: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"hyperlorentz: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
