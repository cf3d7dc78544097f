"""``twopoint`` command line.

Exit status: 0 success, 1 schema/input error, 2 unsupported regime or
family, 3 numerical failure (including a failed self-test). Errors are
reported as a JSON object on stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from .classification import classify
from .config import DEFAULTS
from .errors import SchemaError, TwoPointError, UnsupportedError
from .expansions import (KernelSpec, coefficient_table, kernel_eval, kernel_eval_points,
                         load_spec, validate_json)
from .spaces import make_space, point_from_json
from .verification import (GramExperiment, certificate_from_json, construct_null_config,
                           reports_to_csv, run_batch)

EXIT_OK, EXIT_SCHEMA, EXIT_UNSUPPORTED, EXIT_NUMERICAL = 0, 1, 2, 3

# built-in bivariate test functions for ``coeffs --function``
FUNCTIONS = {
    "const": lambda t, s: np.ones_like(t * s),
    "affine": lambda t, s: (1 + t) * (1 + s) / 4,
    "exp": lambda t, s: np.exp(t + s),
    "gaussian": lambda t, s: np.exp(-(2 - t - s)),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _report_error("UsageError", message, EXIT_SCHEMA)
        raise SystemExit(EXIT_SCHEMA)


def _report_error(kind, message, code):
    sys.stderr.write(json.dumps({"error": kind, "message": str(message), "exit": code}) + "\n")


def _read_json(path, schema=None):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None
    if schema:
        validate_json(data, schema)
    return data


def _emit(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _spec(args) -> KernelSpec:
    if not args.spec:
        raise SchemaError("--spec is required")
    spec = load_spec(args.spec)
    if getattr(args, "kmax", None) is not None:
        spec = spec.with_truncation((args.kmax, args.kmax))
    return spec


# --------------------------------------------------------------------------
# subcommands


def cmd_eval(args):
    spec = _spec(args)
    rows = []
    if args.points:
        data = _read_json(args.points, "points")
        for (x, w), (y, z) in data["pairs"]:
            px, py = point_from_json(spec.space1, x), point_from_json(spec.space1, y)
            pw, pz = point_from_json(spec.space2, w), point_from_json(spec.space2, z)
            rows.append({"value": kernel_eval_points(spec, px, pw, py, pz)})
    else:
        if args.grid:
            ts = _read_json(args.grid, "grid")["ts"]
        else:
            ts = [tuple(map(float, item.split(","))) for item in args.ts or []]
            if not ts:
                g = np.linspace(-1, 1, 5)
                ts = [(float(t), float(s)) for t in g for s in g]
        for t, s in ts:
            if not (-1 <= t <= 1 and -1 <= s <= 1):
                raise SchemaError(f"(t, s) = ({t}, {s}) outside [-1, 1]^2")
            value, _ = kernel_eval(spec, t, s)
            rows.append({"t": t, "s": s, "value": float(value)})
    tail = spec.tail_bound()
    if args.format == "csv":
        buf = io.StringIO()
        fields = list(rows[0]) if rows else ["value"]
        writer = csv.DictWriter(buf, fieldnames=fields + ["tail_bound"], lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({**{k: repr(v) for k, v in r.items()}, "tail_bound": repr(tail)})
        _emit(buf.getvalue(), args.out)
    else:
        _emit(_dump({"values": rows, "tail_bound": tail, "truncation": list(spec.truncation)}), args.out)
    return EXIT_OK


def cmd_coeffs(args):
    kmax = DEFAULTS.truncation if args.kmax is None else args.kmax
    tol = 1e-10 if args.tol is None else args.tol
    if args.spec:
        spec = load_spec(args.spec)
        s1, s2 = spec.space1, spec.space2
        f = spec.evaluate
        kmax = args.kmax if args.kmax is not None else max(spec.truncation)
    else:
        if not (args.function and args.space1 and args.space2):
            raise SchemaError("coeffs needs --spec, or --function with --space1 and --space2")
        s1, s2 = _parse_space(args.space1), _parse_space(args.space2)
        f = FUNCTIONS[args.function]
    table = coefficient_table(f, s1, s2, kmax, kmax, order=args.order)
    entries, negative = [], []
    for (k, l), a in np.ndenumerate(table):
        item = {"k": k, "l": l, "a": float(a)}
        if a > tol:
            entries.append(item)
        elif a < -tol:
            negative.append(item)
    if negative:
        sys.stderr.write(json.dumps({"warning": "negative coefficients omitted", "entries": negative}) + "\n")
    out = {"space1": s1.to_json(), "space2": s2.to_json(), "finite": entries,
           "families": [], "truncation": [kmax, kmax]}
    validate_json(out, "kernel_spec")
    _emit(_dump(out), args.out)
    return EXIT_OK


def _parse_space(text):
    try:
        family, d = text.split(":")
        return make_space(family, int(d))
    except ValueError:
        raise SchemaError(f"space must look like FAMILY:D (e.g. sphere:2), got {text!r}") from None


def cmd_classify(args):
    spec = _spec(args)
    result = classify(spec).to_json()
    validate_json(result, "classification")
    _emit(_dump(result), args.out)
    return EXIT_OK


def cmd_gram(args):
    spec = _spec(args)
    seed = 0 if args.seed is None else args.seed
    n = 30 if args.n is None else args.n
    exps = [GramExperiment(spec, n, seed + i, args.mode, experiment_id=f"exp{i:04d}")
            for i in range(args.repeat)]
    reports = run_batch(exps, workers=args.workers, rank_tol=args.tol)
    if args.format == "json":
        _emit(_dump([r.to_json(args.timing) for r in reports]), args.out)
    else:
        _emit(reports_to_csv(reports, timing=args.timing), args.out)
    return EXIT_OK


def cmd_null_config(args):
    if args.certificate:
        cert = certificate_from_json(_read_json(args.certificate, "null_certificate"))
        out = {"construction": cert.construction, "quadratic_form": cert.quadratic_form,
               "bound": cert.bound, "holds": cert.holds}
        _emit(_dump(out), args.out)
        return EXIT_OK if cert.holds else EXIT_NUMERICAL
    spec = _spec(args)
    verdict = classify(spec)
    outcome = construct_null_config(spec, reason=verdict.witness, seed=args.seed or 0)
    _emit(_dump(outcome.to_json()), args.out)
    return EXIT_OK if outcome else EXIT_UNSUPPORTED


def _suite(checks, out):
    results = [c.to_json() for c in checks]
    passed = all(r["passed"] for r in results)
    _emit(_dump({"passed": passed, "checks": results}), out)
    return EXIT_OK if passed else EXIT_NUMERICAL


def cmd_poisson_check(args):
    from .selftest import check_poisson
    return _suite([check_poisson(**({"tol": args.tol} if args.tol else {}))], args.out)


def cmd_selftest(args):
    from .selftest import run_selftest
    return _suite(run_selftest(), args.out)


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="twopoint", description="Isotropic kernels on products of two-point homogeneous spaces.")
    parser.add_argument("--version", action="version", version=f"twopoint {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, spec=True):
        if spec:
            p.add_argument("--spec", metavar="PATH", help="KernelSpec JSON file")
        p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
        return p

    p = common(sub.add_parser("eval", help="evaluate a kernel on a (t, s) grid or point pairs"))
    p.add_argument("--grid", metavar="PATH", help='JSON {"ts": [[t, s], ...]}')
    p.add_argument("--points", metavar="PATH", help='JSON {"pairs": [[[x, w], [y, z]], ...]}')
    p.add_argument("--ts", action="append", metavar="T,S", help="a single (t, s) pair; repeatable")
    p.add_argument("--kmax", type=int, help="override the truncation")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_eval)

    p = common(sub.add_parser("coeffs", help="recover a_{k,l} by quadrature"))
    p.add_argument("--function", choices=sorted(FUNCTIONS))
    p.add_argument("--space1", metavar="FAMILY:D")
    p.add_argument("--space2", metavar="FAMILY:D")
    p.add_argument("--kmax", type=int, help="largest degree recovered in each variable")
    p.add_argument("--order", type=int, help="starting quadrature order")
    p.add_argument("--tol", type=float, help="drop |a| <= tol (default 1e-10)")
    p.set_defaults(func=cmd_coeffs)

    p = common(sub.add_parser("classify", help="PD / DC-SPD / SPD verdicts"))
    p.set_defaults(func=cmd_classify)

    p = common(sub.add_parser("gram", help="run Gram-matrix experiments, CSV report"))
    p.add_argument("--n", type=int, help="points per experiment (default 30)")
    p.add_argument("--seed", type=int, help="first seed (default 0)")
    p.add_argument("--repeat", type=int, default=1, help="experiments with seeds seed, seed+1, ...")
    p.add_argument("--mode", choices=("generic", "dc", "antipodal"), default="generic")
    p.add_argument("--kmax", type=int, help="override the truncation")
    p.add_argument("--tol", type=float, help="relative rank tolerance (default 1e-9)")
    p.add_argument("--workers", type=int, help="thread pool size")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--timing", action="store_true", help="fill elapsed_s (output no longer byte-stable)")
    p.set_defaults(func=cmd_gram)

    p = common(sub.add_parser("null-config", help="explicit null configuration certificate"))
    p.add_argument("--seed", type=int)
    p.add_argument("--kmax", type=int, help="override the truncation")
    p.add_argument("--certificate", metavar="PATH", help="re-verify a previously emitted certificate")
    p.set_defaults(func=cmd_null_config)

    p = common(sub.add_parser("poisson-check", help="Poisson formula lhs/rhs suite"), spec=False)
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_poisson_check)

    p = common(sub.add_parser("selftest", help="all identity suites"), spec=False)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TwoPointError as exc:
        if isinstance(exc, SchemaError):
            code = EXIT_SCHEMA
        elif isinstance(exc, UnsupportedError):
            code = EXIT_UNSUPPORTED
        else:
            code = EXIT_NUMERICAL
        _report_error(type(exc).__name__, exc, code)
        return code


if __name__ == "__main__":
    sys.exit(main())
