"""Experiment configuration: dataclasses, validation, and dict/JSON parsing."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any

import numpy as np

from .counting import BoxSpec, IntervalSpec, check_precision, integer_root


class ConfigError(ValueError):
    """Malformed or inconsistent configuration; ``where`` names the field or line."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


@dataclass(frozen=True)
class SamplingLaw:
    """Law of each alpha coordinate: uniform, or a piecewise-linear density.

    For ``kind="piecewise-linear"`` the density takes value ``density[i]`` at
    ``knots[i]`` and is linear in between; knots run from 0 to 1.
    """

    kind: str = "uniform"
    knots: tuple[float, ...] = ()
    density: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind == "uniform":
            return
        if self.kind != "piecewise-linear":
            raise ValueError(f"unknown sampling law {self.kind!r}")
        x = np.asarray(self.knots, dtype=float)
        f = np.asarray(self.density, dtype=float)
        if x.size < 2 or x.shape != f.shape:
            raise ValueError("piecewise-linear law needs matching knots and density, at least 2 each")
        if x[0] != 0.0 or x[-1] != 1.0 or np.any(np.diff(x) <= 0):
            raise ValueError("knots must increase strictly from 0 to 1")
        if np.any(f < 0):
            raise ValueError("density must be nonnegative")
        mass = float(np.sum(np.diff(x) * (f[1:] + f[:-1]) / 2))
        if abs(mass - 1.0) > 1e-9:
            raise ValueError(f"density integrates to {mass}, not 1")

    def transform(self, u: np.ndarray) -> np.ndarray:
        """Map uniform [0, 1) variates through the inverse CDF."""
        if self.kind == "uniform":
            return u
        x = np.asarray(self.knots, dtype=float)
        f = np.asarray(self.density, dtype=float)
        h = np.diff(x)
        seg_mass = h * (f[1:] + f[:-1]) / 2
        cum = np.concatenate([[0.0], np.cumsum(seg_mass)])
        seg = np.clip(np.searchsorted(cum, u, side="right") - 1, 0, h.size - 1)
        m = u - cum[seg]
        f0 = f[seg]
        slope = (f[seg + 1] - f0) / h[seg]
        with np.errstate(divide="ignore", invalid="ignore"):
            quad = (-f0 + np.sqrt(np.maximum(f0 * f0 + 2 * slope * m, 0.0))) / slope
            lin = m / f0
        step = np.where(np.abs(slope) > 1e-12, quad, lin)
        step = np.nan_to_num(step, nan=0.0, posinf=0.0)
        return np.clip(x[seg] + np.clip(step, 0.0, h[seg]), 0.0, np.nextafter(1.0, 0.0))

    def to_dict(self) -> dict:
        if self.kind == "uniform":
            return {"kind": "uniform"}
        return {"kind": self.kind, "knots": list(self.knots), "density": list(self.density)}


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo experiment.

    Exactly one of ``N`` and ``M`` is usually given.  With only ``M`` the
    scale is ``N = M**(d-1)``; with only ``N`` the box side is
    ``floor(N**(1/(d-1)))``.  ``workers`` never affects results.
    """

    d: int
    intervals: tuple[IntervalSpec, ...]
    samples: int
    seed: int
    N: float | None = None
    M: int | None = None
    workers: int = 1
    law: SamplingLaw = field(default_factory=SamplingLaw)
    overflow_cap: int = 64

    @property
    def box(self) -> BoxSpec:
        if self.M is None and self.N is None:
            raise ConfigError("N", "one of N or M is required")
        if self.M is None:
            return BoxSpec.from_N(self.d, self.N)
        if self.N is None:
            return BoxSpec.from_M(self.d, self.M)
        return BoxSpec(self.d, self.M, self.N)

    def validate(self) -> ExperimentConfig:
        if not isinstance(self.d, int) or self.d < 2:
            raise ConfigError("d", f"must be an integer >= 2, got {self.d!r}")
        if self.samples < 0:
            raise ConfigError("samples", f"must be >= 0, got {self.samples}")
        if self.workers < 1:
            raise ConfigError("workers", f"must be >= 1, got {self.workers}")
        if not self.intervals:
            raise ConfigError("intervals", "at least one interval is required")
        try:
            box = self.box
        except ValueError as exc:
            raise ConfigError("N" if self.M is None else "M", str(exc)) from None
        if self.M is not None and self.N is not None and self.M != integer_root(self.N, self.d - 1):
            raise ConfigError("M", f"M={self.M} is inconsistent with N={self.N} (floor root is "
                              f"{integer_root(self.N, self.d - 1)})")
        for j, iv in enumerate(self.intervals):
            try:
                check_precision(box, iv)
            except ValueError as exc:
                raise ConfigError(f"intervals[{j}].sigma", str(exc)) from None
            mean = box.expected_scale * float(iv.sigma)
            if mean + 10 * math.sqrt(mean) > self.overflow_cap:
                raise ConfigError(
                    f"intervals[{j}].sigma",
                    f"mean count {mean:g} leaves non-negligible mass above overflow_cap "
                    f"{self.overflow_cap}",
                )
        return self

    def with_axis(self, axis: str, value) -> ExperimentConfig:
        """Copy with N or d replaced; a new d keeps N = M^(d-1) near the old N."""
        if axis == "N":
            return replace(self, N=value, M=None)
        if axis == "d":
            target = self.box.N
            return replace(self, d=int(value), M=max(1, integer_root(target, int(value) - 1)), N=None)
        raise ValueError(f"unknown scan axis {axis!r}")

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"d": self.d}
        if self.N is not None:
            out["N"] = self.N
        if self.M is not None:
            out["M"] = self.M
        out["intervals"] = [
            {"xi": str(iv.xi), "tau": _frac_text(iv.tau), "sigma": _frac_text(iv.sigma)}
            for iv in self.intervals
        ]
        out.update(
            samples=self.samples,
            seed=self.seed,
            law=self.law.to_dict(),
            overflow_cap=self.overflow_cap,
        )
        return out

    @classmethod
    def from_dict(cls, raw: dict, **overrides) -> ExperimentConfig:
        if not isinstance(raw, dict):
            raise ConfigError("config", "top level must be an object")
        raw = {**raw, **{k: v for k, v in overrides.items() if v is not None}}
        known = {"d", "N", "M", "intervals", "samples", "seed", "workers", "law", "overflow_cap"}
        extra = sorted(set(raw) - known - {"output", "format"})
        if extra:
            raise ConfigError(extra[0], "unknown field")
        for key in ("d", "intervals", "samples", "seed"):
            if key not in raw:
                raise ConfigError(key, "missing required field")
        if "N" not in raw and "M" not in raw:
            raise ConfigError("N", "one of N or M is required")
        intervals = parse_intervals(raw["intervals"])
        law_raw = raw.get("law", {"kind": "uniform"})
        try:
            law = SamplingLaw(
                kind=law_raw.get("kind", "uniform"),
                knots=tuple(law_raw.get("knots", ())),
                density=tuple(law_raw.get("density", ())),
            )
        except (ValueError, AttributeError) as exc:
            raise ConfigError("law", str(exc)) from None
        cfg = cls(
            d=_int_field(raw, "d"),
            intervals=intervals,
            samples=_int_field(raw, "samples"),
            seed=_int_field(raw, "seed"),
            N=_number_field(raw, "N") if "N" in raw else None,
            M=_int_field(raw, "M") if "M" in raw else None,
            workers=_int_field(raw, "workers") if "workers" in raw else 1,
            law=law,
            overflow_cap=_int_field(raw, "overflow_cap") if "overflow_cap" in raw else 64,
        )
        return cfg.validate()


def parse_intervals(raw) -> tuple[IntervalSpec, ...]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("intervals", "must be a nonempty list")
    out = []
    for j, item in enumerate(raw):
        where = f"intervals[{j}]"
        if not isinstance(item, dict):
            raise ConfigError(where, "must be an object with xi, tau, sigma")
        for key in ("xi", "sigma"):
            if key not in item:
                raise ConfigError(f"{where}.{key}", "missing required field")
        try:
            tau = parse_rational(item.get("tau", 0))
        except ValueError as exc:
            raise ConfigError(f"{where}.tau", str(exc)) from None
        try:
            sigma = parse_rational(item["sigma"])
        except ValueError as exc:
            raise ConfigError(f"{where}.sigma", str(exc)) from None
        try:
            out.append(IntervalSpec(item["xi"], tau, sigma))
        except ValueError as exc:
            field_name = "sigma" if "sigma" in str(exc) else "xi"
            raise ConfigError(f"{where}.{field_name}", str(exc)) from None
    return tuple(out)


def parse_rational(value) -> Fraction:
    """Exact value of a JSON number or a string like ``"3/2"`` or ``"0.25"``."""
    if isinstance(value, bool):
        raise ValueError(f"expected a number, got {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"expected a finite number, got {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"malformed rational {value!r}") from None
    raise ValueError(f"expected a number, got {value!r}")


def _frac_text(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _int_field(raw: dict, key: str) -> int:
    v = raw[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(key, f"must be an integer, got {v!r}")
    return v


def _number_field(raw: dict, key: str):
    v = raw[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
        raise ConfigError(key, f"must be a positive number, got {v!r}")
    return v


def load_json(text: str, source: str = "<config>") -> dict:
    """json.loads with a line/column diagnostic on failure."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}", exc.msg) from None
