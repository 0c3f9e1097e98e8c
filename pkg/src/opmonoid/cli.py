"""Command-line front end.

Every subcommand writes CSV or JSON to ``--output`` (stdout by default).
Options may also come from a flat ``key = value`` file passed with
``--config``; flags given on the command line take precedence.

Exit codes: 0 success, 1 validation error, 2 solver error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import approx, noor, vectors
from .errors import SolverError, ValidationError
from .monoids import MonoidSpec, get_monoid, verify_forward_properties
from .series import CoefficientSeries, format_series, parse_series

EXIT_OK, EXIT_VALIDATION, EXIT_SOLVER = 0, 1, 2


def _positive_int(text) -> int:
    try:
        value = int(text)
    except (TypeError, ValueError):
        raise ValidationError(f"expected an integer, got {text!r}") from None
    if value <= 0:
        raise ValidationError(f"expected a positive integer, got {value}")
    return value


def _nonneg_int(text) -> int:
    value = int(text)
    if value < 0:
        raise ValidationError(f"expected a non-negative integer, got {value}")
    return value


def _positive_float(text) -> float:
    value = float(text)
    if not value > 0:
        raise ValidationError(f"expected a positive number, got {value}")
    return value


def _float_list(text) -> list:
    return [float(t) for t in str(text).split(",") if t.strip()]


# option name -> (converter, default, help)
OPTIONS: dict = {
    "monoid": (str, "noor", 'monoid selector: shift, dilation, noor, or "scalar:RE,IM"'),
    "vector": (str, None, 'orbit generator h: series literal "c0,c1,..." or @file'),
    "sigma": (str, "aleph", 'target: series literal, @file, or "aleph"'),
    "N": (_positive_int, 8, "largest monoid index in the window"),
    "trunc": (_nonneg_int, None, "truncation degree (default: exact)"),
    "tol": (_positive_float, None, "tolerance"),
    "K": (_positive_int, 20, "largest index scanned"),
    "max_index": (_positive_int, 6, "largest index for composition checks"),
    "probe": (str, "aleph", 'probe vector, "aleph", or "random"'),
    "k": (int, 2, "h_k index"),
    "combo": (str, "2:1.0", 'h_k combination "k:beta,..."'),
    "d": (_positive_int, 1, "exponent d in f(z) = z (lambda - z^d)"),
    "lambdas": (_float_list, "0.5,1.0,2.0", "comma separated lambda grid"),
    "seed": (int, 0, "seed for random probe vectors"),
    "format": (str, None, "csv or json"),
    "output": (str, None, "output path (default stdout)"),
}

COMMANDS: dict = {
    "gram": ("dump the Gram system", ["monoid", "vector", "sigma", "N", "trunc"]),
    "approx": ("solve one optimal approximant", ["monoid", "vector", "sigma", "N", "trunc"]),
    "cyclic-trace": ("distance trace over N", ["monoid", "vector", "sigma", "N"]),
    "inner-check": ("scan <h, T_k h>", ["monoid", "vector", "K", "tol"]),
    "inner-project": ("h minus its projection on span{T_k h}", ["monoid", "vector", "K"]),
    "stabilize": ("stabilization check against the aleph", ["monoid", "vector", "N", "tol"]),
    "verify-monoid": ("check composition and forward properties", ["monoid", "max_index", "probe", "seed", "tol"]),
    "noor-hk": ("coefficients of h_k", ["k", "trunc"]),
    "rh-trace": ("c_1 trace for a combination of h_k", ["combo", "trunc", "N"]),
    "flambda": ("dist^2(z, V_N) for f = z (lambda - z^d)", ["d", "lambdas", "N"]),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="opmonoid", description="Forward operator monoid experiments.",
                     allow_abbrev=False)
    parser.add_argument("--config", help="flat key = value option file")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (help_text, opts) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, allow_abbrev=False)
        p.add_argument("--config", help="flat key = value option file")
        for opt in opts + ["format", "output"]:
            flag = "--" + opt.replace("_", "-")
            p.add_argument(flag, dest=opt, default=None, help=OPTIONS[opt][2])
    return parser


def read_config(path: str) -> dict:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def resolve_options(args: argparse.Namespace) -> dict:
    """Merge flags over config file over built-in defaults, converting types."""
    config = read_config(args.config) if args.config else {}
    allowed = COMMANDS[args.command][1] + ["format", "output"]
    unknown = set(config) - set(OPTIONS)
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(sorted(unknown))}")
    opts = {}
    for name in allowed:
        conv, default, _ = OPTIONS[name]
        raw = getattr(args, name, None)
        if raw is None:
            raw = config.get(name, default)
        try:
            opts[name] = None if raw is None else conv(raw)
        except ValueError as exc:
            raise ValidationError(f"--{name}: {exc}") from None
    return opts


# --- helpers --------------------------------------------------------------

def _load_series(text: Optional[str], what: str) -> CoefficientSeries:
    if text is None:
        raise ValidationError(f"--{what} is required")
    if text.startswith("@"):
        text = Path(text[1:]).read_text().strip()
    return parse_series(text)


def _target(m: MonoidSpec, text: str) -> CoefficientSeries:
    if text.strip().lower() == "aleph":
        if m.aleph is None:
            raise ValidationError(f"{m.name} has no registered aleph")
        return m.aleph
    return _load_series(text, "sigma")


def _is_aleph_target(text: str) -> bool:
    return text.strip().lower() == "aleph"


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _series_json(s: CoefficientSeries) -> str:
    return format_series(s)


# --- commands -------------------------------------------------------------

def cmd_gram(o):
    m = get_monoid(o["monoid"])
    g = approx.build_gram(m, _load_series(o["vector"], "vector"), _target(m, o["sigma"]), o["N"], o["trunc"])
    return "json", _json(g.to_dict())


def cmd_approx(o):
    m = get_monoid(o["monoid"])
    sigma = _target(m, o["sigma"])
    r = approx.optimal_approximant(m, _load_series(o["vector"], "vector"), sigma, o["N"], o["trunc"])
    return "json", _json(r.to_dict())


def cmd_cyclic_trace(o):
    m = get_monoid(o["monoid"])
    h = _load_series(o["vector"], "vector")
    if _is_aleph_target(o["sigma"]):
        trace = approx.cyclicity_trace(m, h, _target(m, "aleph"), o["N"])
    else:
        trace = approx.distance_trace(m, h, _target(m, o["sigma"]), o["N"])
    return "csv", trace.to_csv()


def cmd_inner_check(o):
    m = get_monoid(o["monoid"])
    tol = o["tol"] if o["tol"] is not None else vectors.POLY_TOL
    r = vectors.inner_check(m, _load_series(o["vector"], "vector"), o["K"], tol)
    return "json", _json(r.to_dict())


def cmd_inner_project(o):
    m = get_monoid(o["monoid"])
    rep = vectors.inner_project_report(m, _load_series(o["vector"], "vector"), o["K"])
    rep["series"] = _series_json(rep["series"])
    rep["series_2K"] = _series_json(rep["series_2K"])
    return "json", _json(rep)


def cmd_stabilize(o):
    m = get_monoid(o["monoid"])
    if m.aleph is None:
        raise ValidationError(f"{m.name} has no registered aleph")
    tol = o["tol"] if o["tol"] is not None else 1e-9
    r = approx.stabilization_check(m, _load_series(o["vector"], "vector"), m.aleph, o["N"], tol)
    d = r.to_dict()
    d["result"] = "pass" if r.stable else "fail"
    return "json", _json(d)


def cmd_verify_monoid(o):
    m = get_monoid(o["monoid"])
    probe_txt = o["probe"].strip().lower()
    if probe_txt == "aleph":
        probe = m.aleph if m.aleph is not None else parse_series("1,1")
    elif probe_txt == "random":
        rng = np.random.default_rng(o["seed"])
        c = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        if m.space.value == "H2_zero":
            c[0] = 0
        probe = CoefficientSeries(c)
    else:
        probe = _load_series(o["probe"], "probe")
    tol = o["tol"] if o["tol"] is not None else 1e-12
    r = verify_forward_properties(m, o["max_index"], probe, tol)
    d = r.to_dict()
    d["probe"] = format_series(probe)
    d["result"] = "pass" if r.passed else "fail"
    return "json", _json(d)


def cmd_noor_hk(o):
    D = o["trunc"] if o["trunc"] is not None else 64
    hk = noor.hk_coefficients(o["k"], D)
    lines = ["n,c_n"] + [f"{n},{float(c.real)!r}" for n, c in enumerate(hk.series.coeffs)]
    return "csv", "\n".join(lines) + "\n"


def cmd_rh_trace(o):
    D = o["trunc"] if o["trunc"] is not None else approx.DEFAULT_TRUNCATION
    r = noor.rh_trace(noor.parse_combo(o["combo"]), D, o["N"])
    header = json.dumps(r.header(), sort_keys=True)
    return "csv", header + "\n" + r.trace.to_csv()


def flambda_table(d: int, lambdas, N_max: int) -> list:
    """Rows ``(lambda, N, dist^2(z, V_N))`` for ``f = z (lambda - z^d)``."""
    from .monoids import DILATION

    rows = []
    for lam in lambdas:
        coeffs = np.zeros(d + 2, dtype=np.complex128)
        coeffs[1], coeffs[d + 1] = lam, -1.0
        f = CoefficientSeries(coeffs)
        trace = approx.cyclicity_trace(DILATION, f, DILATION.aleph, N_max)
        rows.extend((lam, r.N, r.dist_sq) for r in trace.rows)
    return rows


def cmd_flambda(o):
    rows = flambda_table(o["d"], o["lambdas"], o["N"])
    lines = ["lambda,N,dist_sq"] + [f"{lam!r},{N},{d!r}" for lam, N, d in rows]
    return "csv", "\n".join(lines) + "\n"


HANDLERS: dict = {
    "gram": cmd_gram,
    "approx": cmd_approx,
    "cyclic-trace": cmd_cyclic_trace,
    "inner-check": cmd_inner_check,
    "inner-project": cmd_inner_project,
    "stabilize": cmd_stabilize,
    "verify-monoid": cmd_verify_monoid,
    "noor-hk": cmd_noor_hk,
    "rh-trace": cmd_rh_trace,
    "flambda": cmd_flambda,
}


def run(argv=None, stdout=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
        opts = resolve_options(args)
        fmt, text = HANDLERS[args.command](opts)
        if opts["format"] not in (None, fmt):
            raise ValidationError(f"{args.command} emits {fmt}, not {opts['format']}")
        if opts["output"]:
            Path(opts["output"]).write_text(text)
        else:
            stdout.write(text)
    except SolverError as exc:
        print(f"opmonoid: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValidationError, ValueError, OSError) as exc:
        print(f"opmonoid: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
