"""Result records and their JSON / CSV serializations."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field

from . import __version__
from .config import ExperimentConfig
from .montecarlo import JointHistogram, ScanRow, diagnose, empirical_moment, run_experiment


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


@dataclass
class ResultRecord:
    """Self-describing output of one simulation.

    Everything except ``runtime`` is a deterministic function of the config.
    """

    config: dict
    box: dict
    histogram: JointHistogram
    moments: list[dict]
    covariance: list[list[float | None]]
    diagnostics: dict
    software: dict = field(default_factory=lambda: {"name": "rotvisits", "version": __version__})
    runtime: dict = field(default_factory=dict)

    def to_dict(self, include_runtime: bool = True) -> dict:
        h = self.histogram
        out = {
            "software": self.software,
            "config": self.config,
            "box": self.box,
            "histogram": {
                "dims": h.dims,
                "samples": h.samples,
                "overflow_cap": h.overflow_cap,
                "cells": [list(k) + [t] for k, t in sorted(h.cells.items())],
            },
            "moments": self.moments,
            "covariance": self.covariance,
            "diagnostics": self.diagnostics,
        }
        if include_runtime:
            out["runtime"] = self.runtime
        return out

    def to_json(self, include_runtime: bool = True) -> str:
        return json.dumps(self.to_dict(include_runtime), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, raw: dict) -> ResultRecord:
        hraw = raw["histogram"]
        hist = JointHistogram(hraw["dims"], hraw["overflow_cap"], samples=hraw["samples"])
        hist.cells = {tuple(row[:-1]): row[-1] for row in hraw["cells"]}
        return cls(
            config=raw["config"],
            box=raw["box"],
            histogram=hist,
            moments=raw["moments"],
            covariance=raw["covariance"],
            diagnostics=raw["diagnostics"],
            software=raw["software"],
            runtime=raw.get("runtime", {}),
        )

    @classmethod
    def from_json(cls, text: str) -> ResultRecord:
        return cls.from_dict(json.loads(text))

    def histogram_csv(self) -> str:
        return histogram_csv(self.histogram)


def simulate(config: ExperimentConfig) -> ResultRecord:
    """Run an experiment and package histogram, moments, covariances and TV."""
    start = time.perf_counter()
    hist = run_experiment(config)
    row = diagnose(config, hist)
    n = hist.dims
    moments = []
    if hist.samples >= 2:
        orders = [m.order for m in row.means] + [m.order for m in row.second_moments]
        orders += [tuple(int(i in (j, k)) for i in range(n)) for j in range(n) for k in range(j + 1, n)]
        for order in orders:
            est = empirical_moment(hist, order)
            moments.append({"order": list(order), "value": est.value, "std_error": est.std_error})
    cov = [[None] * n for _ in range(n)]
    if hist.samples >= 2:
        for j in range(n):
            var = empirical_moment(hist, row.second_moments[j].order).value - row.means[j].value ** 2
            cov[j][j] = var
        for (j, k), c in row.covariances.items():
            cov[j][k] = cov[k][j] = c
    box = config.box
    return ResultRecord(
        config=config.to_dict(),
        box={"d": box.d, "M": box.M, "N": box.N, "expected_mean_scale": box.expected_scale},
        histogram=hist,
        moments=moments,
        covariance=cov,
        diagnostics={
            "reference": "product of Poisson(sigma_j)",
            "tv": _clean(row.tv),
            "tv_lower": _clean(row.tv_lower),
            "tv_upper": _clean(row.tv_upper),
            "overflowed_samples": hist.overflowed(),
        },
        runtime={"wall_clock_s": round(time.perf_counter() - start, 6), "workers": config.workers},
    )


def histogram_csv(hist: JointHistogram) -> str:
    """One row per nonempty cell: x1..xn then tally."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x{j + 1}" for j in range(hist.dims)] + ["tally"])
    for key, t in sorted(hist.cells.items()):
        w.writerow(list(key) + [t])
    return buf.getvalue()


def scan_rows_to_dicts(axis: str, rows: list[ScanRow]) -> list[dict]:
    out = []
    for r in rows:
        d = {"axis": axis, "value": r.value, "M": r.M, "N": r.N, "samples": r.samples,
             "tv": _clean(r.tv), "tv_lower": _clean(r.tv_lower), "tv_upper": _clean(r.tv_upper)}
        for j, m in enumerate(r.means):
            d[f"mean_{j + 1}"] = m.value
            d[f"mean_{j + 1}_se"] = m.std_error
        for j, m in enumerate(r.second_moments):
            d[f"second_{j + 1}"] = m.value
        for (j, k), c in r.covariances.items():
            d[f"cov_{j + 1}_{k + 1}"] = c
        out.append(d)
    return out


def scan_csv(axis: str, rows: list[ScanRow]) -> str:
    dicts = scan_rows_to_dicts(axis, rows)
    buf = io.StringIO()
    if dicts:
        w = csv.DictWriter(buf, fieldnames=list(dicts[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(dicts)
    return buf.getvalue()
