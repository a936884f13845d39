"""Command-line driver.

    rotvisits simulate --config exp.json [--out result.json] [--format json|csv]
    rotvisits scan --config exp.json --axis d --grid 2,4,8
    rotvisits moments --config query.json
    rotvisits check-independence --config query.json
    rotvisits verify [all|quick|c1..c9]
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from .config import ConfigError, ExperimentConfig, load_json, parse_intervals
from .counting import IntervalSpec
from .montecarlo import convergence_scan
from .records import scan_csv, scan_rows_to_dicts, simulate
from .reference import MomentQuery, limiting_joint_moment
from .spectrum import group_centers, independence_predicate, intervals_overlap


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def cmd_simulate(config: ExperimentConfig):
    return simulate(config)


def cmd_scan(config: ExperimentConfig, axis: str, grid):
    return convergence_scan(config, axis, grid)


def cmd_moments(intervals, order=None) -> dict:
    """Exact large-d limiting mixed moment plus the independence verdict."""
    intervals = list(intervals)
    order = list(order) if order is not None else [1] * len(intervals)
    value = limiting_joint_moment(MomentQuery.from_intervals(intervals, order))
    independent = independence_predicate(intervals)
    return {
        "order": order,
        "moment": _frac(value),
        "moment_float": float(value),
        "groups": group_centers([iv.xi for iv in intervals]),
        "verdict": "independent" if independent else "dependent",
    }


def cmd_check_independence(intervals) -> dict:
    """Large-d independence verdict with the supporting exact moments."""
    intervals = list(intervals)
    sigmas = [iv.sigma for iv in intervals]
    product = math.prod(sigmas, start=Fraction(1))
    joint = limiting_joint_moment(MomentQuery.from_intervals(intervals))
    obstructions = []
    for j in range(len(intervals)):
        for k in range(j + 1, len(intervals)):
            a, b = intervals[j], intervals[k]
            if a.xi == b.xi and intervals_overlap(a.bounds, b.bounds):
                pair = limiting_joint_moment(MomentQuery.from_intervals([a, b]))
                obstructions.append({
                    "pair": [j, k],
                    "center": str(a.xi),
                    "limiting_covariance": _frac(pair - a.sigma * b.sigma),
                })
    if independence_predicate(intervals):
        verdict = "independent: product of Poissons, parameters (" + ", ".join(_frac(s) for s in sigmas) + ")"
    else:
        verdict = "dependent: equal centers with overlapping targets " + ", ".join(
            f"({o['pair'][0]}, {o['pair'][1]})" for o in obstructions
        )
    return {
        "verdict": verdict,
        "independent": not obstructions,
        "joint_moment": _frac(joint),
        "product_of_sigmas": _frac(product),
        "obstructions": obstructions,
    }


def cmd_verify(suite: str = "all"):
    from .acceptance import run_suite

    return run_suite(suite)


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _read_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(path, exc.strerror or str(exc)) from None
    return load_json(text, path)


def _experiment(args) -> ExperimentConfig:
    raw = _read_config(args.config)
    return ExperimentConfig.from_dict(raw, seed=args.seed, workers=args.workers)


def _query(args) -> tuple[list[IntervalSpec], list[int] | None]:
    raw = _read_config(args.config)
    if not isinstance(raw, dict) or "intervals" not in raw:
        raise ConfigError("intervals", "missing required field")
    intervals = list(parse_intervals(raw["intervals"]))
    order = raw.get("order")
    if order is not None:
        if (not isinstance(order, list) or len(order) != len(intervals)
                or any(isinstance(k, bool) or not isinstance(k, int) or k < 0 for k in order)):
            raise ConfigError("order", "must list one nonnegative integer per interval")
        if not any(order):
            raise ConfigError("order", "must not be all zero")
    return intervals, order


def _parse_grid(text: str) -> list:
    out = []
    for item in text.split(","):
        v = float(item)
        out.append(int(v) if v.is_integer() else v)
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rotvisits", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, experiment=True):
        sp.add_argument("--config", required=True, help="JSON config file")
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        if experiment:
            sp.add_argument("--seed", type=int, help="override the config seed")
            sp.add_argument("--workers", type=int, help="worker processes (results do not change)")

    common(sub.add_parser("simulate", help="Monte Carlo joint histogram"))
    scan = sub.add_parser("scan", help="convergence scan over N or d")
    common(scan)
    scan.add_argument("--axis", choices=("N", "d"), required=True)
    scan.add_argument("--grid", required=True, help="comma-separated increasing values")
    common(sub.add_parser("moments", help="exact limiting mixed moment"), experiment=False)
    common(sub.add_parser("check-independence", help="large-d independence verdict"), experiment=False)
    ver = sub.add_parser("verify", help="run acceptance suites")
    ver.add_argument("suite", nargs="?", default="all")
    ver.add_argument("--out")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            record = cmd_simulate(_experiment(args))
            text = record.histogram_csv() if args.format == "csv" else record.to_json()
        elif args.command == "scan":
            rows = cmd_scan(_experiment(args), args.axis, _parse_grid(args.grid))
            if args.format == "csv":
                text = scan_csv(args.axis, rows)
            else:
                text = json.dumps({"axis": args.axis, "rows": scan_rows_to_dicts(args.axis, rows),
                                   "histograms": [_cells(r.histogram) for r in rows]},
                                  indent=2, sort_keys=True) + "\n"
        elif args.command == "moments":
            report = cmd_moments(*_query(args))
            text = _dump(report, args.format)
        elif args.command == "check-independence":
            intervals, _ = _query(args)
            report = cmd_check_independence(intervals)
            text = _dump(report, args.format)
        else:
            results = cmd_verify(args.suite)
            text = "".join(r.line() + "\n" for r in results)
            _write(text, args.out)
            return 0 if all(r.passed for r in results) else 1
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _write(text, args.out)
    return 0


def _cells(hist) -> list[list[int]]:
    return [list(k) + [t] for k, t in sorted(hist.cells.items())]


def _dump(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in report.items():
        w.writerow([k, v if isinstance(v, str) else json.dumps(v)])
    return buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
