"""Command-line interface: ``sgini estimate|ci|test|simulate``.

Exit status: 0 success, 2 usage error, 3 data error, 4 numeric or
calibration failure. Errors are printed to stderr as one JSON line.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

from . import __version__
from .bootstrap import BootstrapConfig, bcel_interval, boot_t_interval
from .el import el_interval
from .errors import (CalibrationError, DataError, InsufficientSampleError, OracleSizeError,
                     ParameterDomainError, SGiniError)
from .estimators import estimate
from .io import fixture_path, load_csv
from .jel import jel_interval, jel_test
from .simulation import (CSV_FIELDS, METHODS, DistributionSpec, coverage_study,
                         type1_power_study)
from .streams import default_seed, stream

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

CI_METHODS = {"el": "el", "jel": "jel", "boot-t": "boot_t", "boot_t": "boot_t", "bcel": "bcel"}


class _UsageError(Exception):
    pass


def _fmt(v, table: bool):
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        if table:
            return f"{v:.4f}" if math.isfinite(v) else str(v)
        return repr(v)
    return str(v)


def _emit(rows: list[dict], columns: list[str], fmt: str, meta: dict, out) -> None:
    if fmt == "json":
        json.dump({**meta, "rows": rows}, out, sort_keys=True)
        out.write("\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r[c], table=False) for c in columns])
    else:
        cells = [[_fmt(r[c], table=True) for c in columns] for r in rows]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(columns)]
        out.write("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip() + "\n")
        for row in cells:
            out.write("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() + "\n")


def _data(args):
    if args.fixture:
        if args.csv:
            raise _UsageError("give either a CSV path or --fixture, not both")
        return load_csv(fixture_path(), args.column or "income",
                        "quarter" if args.group is None else (args.group or None))
    if not args.csv:
        raise _UsageError("a CSV path (or --fixture) is required")
    return load_csv(args.csv, args.column, args.group or None)


def _group_seed(seed: int, index: int) -> int:
    return int(stream(seed, index, domain=2).integers(0, 2**63))


def cmd_estimate(args, out) -> None:
    data = _data(args)
    rows = []
    for label, s in data.groups.items():
        row = {"group": label, "n": s.n, "mean": s.mean}
        p = estimate(s, args.nu, "plug-in")
        row.update(plugin_absolute=p.absolute, plugin_relative=p.relative)
        try:
            u = estimate(s, args.nu, "u-statistic")
            row.update(ustat_absolute=u.absolute, ustat_relative=u.relative)
        except (ParameterDomainError, InsufficientSampleError):
            # non-integer nu has no U-statistic form
            row.update(ustat_absolute=math.nan, ustat_relative=math.nan)
        rows.append(row)
    cols = ["group", "n", "mean", "plugin_absolute", "plugin_relative",
            "ustat_absolute", "ustat_relative"]
    _emit(rows, cols, args.format, {"command": "estimate", "nu": args.nu}, out)


def cmd_ci(args, out) -> None:
    method = CI_METHODS[args.method]
    data = _data(args)
    rows = []
    for gi, (label, s) in enumerate(data.groups.items()):
        if method == "el":
            ci = el_interval(s, args.nu, args.level)
        elif method == "jel":
            ci = jel_interval(s, args.nu, args.level)
        else:
            cfg = BootstrapConfig(args.outer_b, args.inner_b, _group_seed(args.seed, gi), method)
            f = boot_t_interval if method == "boot_t" else bcel_interval
            ci = f(s, args.nu, args.level, cfg)
        rows.append({"group": label, "n": s.n, "estimate": ci.center, "lower": ci.lower,
                     "upper": ci.upper, "length": ci.length})
    meta = {"command": "ci", "method": method, "nu": args.nu, "level": args.level}
    if method in ("boot_t", "bcel"):
        meta.update(seed=args.seed, outer_b=args.outer_b, inner_b=args.inner_b)
    _emit(rows, ["group", "n", "estimate", "lower", "upper", "length"], args.format, meta, out)


def cmd_test(args, out) -> None:
    data = _data(args)
    rows = []
    for label, s in data.groups.items():
        r = jel_test(s, args.nu, args.r0, args.level)
        rows.append({"group": label, "n": s.n, "r0": r.r0, "statistic": r.statistic,
                     "p_value": r.p_value, "reject": r.reject})
    meta = {"command": "test", "nu": args.nu, "level": args.level}
    _emit(rows, ["group", "n", "r0", "statistic", "p_value", "reject"], args.format, meta, out)


def cmd_simulate(args, out) -> None:
    dist = DistributionSpec.parse(args.family, args.params)
    workers = max(1, args.threads)
    if args.study == "coverage":
        rep = coverage_study(dist, args.nu, args.n, args.level or 0.95, CI_METHODS[args.method],
                             args.reps, args.seed, args.outer_b, args.inner_b, workers)
    else:
        if args.study == "power" and args.r0 is None:
            raise _UsageError("--study power needs --r0")
        r0 = None if args.study == "type1" else args.r0
        rep = type1_power_study(dist, args.nu, args.n, r0, args.level or 0.05,
                                args.reps, args.seed, workers)
    row = rep.csv_row()
    meta = {"command": "simulate", "study": args.study, "failures": rep.failures,
            "flagged": rep.flagged, "truth": rep.truth}
    _emit([row], list(CSV_FIELDS), args.format, meta, out)


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    seed_default = default_seed()
    p = argparse.ArgumentParser(prog="sgini", description="S-Gini index estimation and inference.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--nu", type=float, default=3.0, help="S-Gini order (default 3)")
    common.add_argument("--format", choices=("table", "csv", "json"), default="table")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("csv", nargs="?", help="headered CSV file")
    data.add_argument("--fixture", action="store_true",
                      help="use the bundled synthetic income file (quarter, income)")
    data.add_argument("--column", help="value column (default: sole column or 'value')")
    data.add_argument("--group", help="group column, e.g. a quarter label")

    boot = argparse.ArgumentParser(add_help=False)
    boot.add_argument("--seed", type=int, default=seed_default,
                      help="master seed (default $SGINI_SEED or %(default)s)")
    boot.add_argument("--outer-b", type=_positive_int, default=1000)
    boot.add_argument("--inner-b", type=_positive_int, default=50)

    s = sub.add_parser("estimate", parents=[common, data], help="point estimates")
    s.set_defaults(func=cmd_estimate)

    s = sub.add_parser("ci", parents=[common, data, boot], help="confidence intervals")
    s.add_argument("--method", choices=("el", "jel", "boot-t", "bcel"), default="jel")
    s.add_argument("--level", type=float, default=0.95, help="confidence level")
    s.set_defaults(func=cmd_ci)

    s = sub.add_parser("test", parents=[common, data], help="JEL test of R_nu = r0")
    s.add_argument("--r0", type=float, required=True)
    s.add_argument("--level", type=float, default=0.05, help="significance level")
    s.set_defaults(func=cmd_test)

    s = sub.add_parser("simulate", parents=[common, boot], help="Monte-Carlo study")
    s.add_argument("--family", choices=("exp", "exponential", "pareto", "lognormal"),
                   required=True)
    s.add_argument("--params", required=True,
                   help="comma-separated: rate | scale,shape | mu,sigma2")
    s.add_argument("--n", type=_positive_int, required=True)
    s.add_argument("--reps", type=_positive_int, default=1000)
    s.add_argument("--study", choices=("coverage", "type1", "power"), default="coverage")
    s.add_argument("--method", choices=("el", "jel", "boot-t", "bcel"), default="jel")
    s.add_argument("--r0", type=float)
    s.add_argument("--level", type=float,
                   help="confidence level for coverage (0.95) or significance for tests (0.05)")
    s.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1)
    s.set_defaults(func=cmd_simulate)
    return p


def _fail(code: int, exc: BaseException, err) -> int:
    err.write(json.dumps({"error": type(exc).__name__, "exit": code, "message": str(exc)}) + "\n")
    return code


def run_cli(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    buf = io.StringIO()
    try:
        args.func(args, buf)
    except (_UsageError, ParameterDomainError) as exc:
        return _fail(EXIT_USAGE, exc, err)
    except (DataError, InsufficientSampleError) as exc:
        return _fail(EXIT_DATA, exc, err)
    except (CalibrationError, OracleSizeError, SGiniError, ArithmeticError) as exc:
        return _fail(EXIT_NUMERIC, exc, err)
    out.write(buf.getvalue())
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run_cli(argv))


if __name__ == "__main__":
    main()
