"""Run configs (JSON) and curve files (CSV)."""
from __future__ import annotations

import io
import json
import math
import os
import re
import sys
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from .frenet import Tolerances
from .manifold_core import StructureDims
from .trajectory import (MagneticCurveParams, SampledCurve, closed_form,
                         params_from_initial_conditions)

FLOAT_FMT = "%.17g"
SEED_ENV = "CMAGNET_SEED"


class ConfigError(ValueError):
    pass


class CurveFormatError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config

@dataclass(frozen=True)
class RunConfig:
    dims: StructureDims
    t_end: float
    dt: float
    q: float | None = None
    initial_point: np.ndarray | None = None
    initial_tangent: np.ndarray | None = None
    params: MagneticCurveParams | None = None
    seed: int = 0
    tolerances: Tolerances = field(default_factory=Tolerances)

    def curve_params(self) -> MagneticCurveParams:
        if self.params is not None:
            return self.params
        return params_from_initial_conditions(self.dims, self.q, self.initial_point,
                                              self.initial_tangent)

    def initial_conditions(self) -> tuple[float, np.ndarray, np.ndarray]:
        """(q, p0, T0), derived from the closed form at t = 0 for params configs."""
        if self.params is None:
            return self.q, self.initial_point, self.initial_tangent
        at0 = closed_form(self.dims, self.params, [0.0])
        return self.params.q, at0.points[0], at0.derivs[0]


def _require(data: dict, key: str):
    if key not in data:
        raise ConfigError(f"missing required key {key!r}")
    return data[key]


def _real(data: dict, key: str) -> float:
    value = _require(data, key)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{key!r} must be a finite number, got {value!r}")
    return float(value)


def _vector(data: dict, key: str, dim: int) -> np.ndarray:
    value = _require(data, key)
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"{key!r} must be an array of numbers") from None
    if arr.shape != (dim,) or not np.all(np.isfinite(arr)):
        raise ConfigError(f"{key!r} must hold {dim} finite numbers, got {value!r}")
    return arr


def resolve_seed(value=None) -> int:
    if value is None:
        value = os.environ.get(SEED_ENV, 0)
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"seed must be an integer, got {value!r}") from None


def tolerances_from(overrides: dict | None, base: Tolerances | None = None) -> Tolerances:
    base = base or Tolerances()
    if not overrides:
        return base
    values = base.to_dict()
    for key, val in overrides.items():
        name = key.replace("-", "_")
        if name not in values:
            raise ConfigError(f"unknown tolerance {key!r}; known: {', '.join(values)}")
        if isinstance(val, bool) or not isinstance(val, (int, float)) or not val > 0:
            raise ConfigError(f"tolerance {key!r} must be a positive number, got {val!r}")
        values[name] = float(val)
    return Tolerances(**values)


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    try:
        dims = StructureDims(_require(data, "n"), _require(data, "s"))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    t_end = _real(data, "t_end")
    dt = _real(data, "dt")
    if not (t_end > 0 and 0 < dt <= t_end):
        raise ConfigError(f"need t_end > 0 and 0 < dt <= t_end, got t_end={t_end}, dt={dt}")

    has_ic = "initial_point" in data or "initial_tangent" in data
    has_params = "params" in data
    if has_ic == has_params:
        raise ConfigError("give exactly one of (initial_point + initial_tangent) or params")

    common = dict(dims=dims, t_end=t_end, dt=dt, seed=resolve_seed(data.get("seed")),
                  tolerances=tolerances_from(data.get("tolerances")))
    try:
        if has_params:
            raw = data["params"]
            if not isinstance(raw, dict):
                raise ConfigError("params must be an object")
            params = MagneticCurveParams.from_dict(raw)
            if params.dims != dims:
                raise ConfigError(f"params describe {params.dims}, config says {dims}")
            if "q" in data and _real(data, "q") != params.q:
                raise ConfigError("top-level q disagrees with params.q")
            return RunConfig(q=params.q, params=params, **common)
        q = _real(data, "q")
        p0 = _vector(data, "initial_point", dims.dim)
        T0 = _vector(data, "initial_tangent", dims.dim)
        # validates q != 0 and |T0| = 1 up front
        params_from_initial_conditions(dims, q, p0, T0)
        return RunConfig(q=q, initial_point=p0, initial_tangent=T0, **common)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(source: str) -> RunConfig:
    """Read a config from a path, or from stdin when ``source`` is ``-``."""
    try:
        if source == "-":
            data = json.load(sys.stdin)
        else:
            with open(source, encoding="utf-8") as fh:
                data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return parse_config(data)


# ---------------------------------------------------------------------------
# curve CSV: header t,x1..xn,y1..yn,z1..zs

def csv_header(dims: StructureDims) -> str:
    return ",".join(["t"] + dims.coord_names())


def write_curve_csv(curve: SampledCurve, fh: TextIO) -> None:
    data = np.column_stack([curve.t, curve.points])
    np.savetxt(fh, data, fmt=FLOAT_FMT, delimiter=",", newline="\n",
               header=csv_header(curve.dims), comments="")


def curve_to_csv(curve: SampledCurve) -> str:
    buf = io.StringIO()
    write_curve_csv(curve, buf)
    return buf.getvalue()


_COLUMN = re.compile(r"^([xyz])(\d+)$")


def _dims_from_header(header: str) -> StructureDims:
    cols = [c.strip() for c in header.strip().split(",")]
    if not cols or cols[0] != "t":
        raise CurveFormatError("first column must be 't'")
    counts = {"x": 0, "y": 0, "z": 0}
    for col in cols[1:]:
        m = _COLUMN.match(col)
        if not m:
            raise CurveFormatError(f"unexpected column {col!r}")
        counts[m.group(1)] += 1
    if counts["x"] != counts["y"] or counts["x"] < 1 or counts["z"] < 1:
        raise CurveFormatError(f"header has {counts} coordinate columns")
    dims = StructureDims(counts["x"], counts["z"])
    if header.strip() != csv_header(dims):
        raise CurveFormatError(f"header must read {csv_header(dims)!r}")
    return dims


def read_curve_csv(fh: TextIO) -> SampledCurve:
    """Parse a curve CSV into a positions-only :class:`SampledCurve`."""
    text = fh.read()
    lines = text.splitlines()
    if not lines:
        raise CurveFormatError("empty curve file")
    dims = _dims_from_header(lines[0])
    rows = [ln for ln in lines[1:] if ln.strip()]
    if not rows:
        raise CurveFormatError("curve file has no samples")
    try:
        data = np.array([[float(v) for v in row.split(",")] for row in rows])
    except ValueError as exc:
        raise CurveFormatError(f"non-numeric value: {exc}") from None
    if data.ndim != 2 or data.shape[1] != dims.dim + 1:
        raise CurveFormatError(f"every row needs {dims.dim + 1} values")
    try:
        return SampledCurve(dims, data[:, 0], data[:, 1:])
    except ValueError as exc:
        raise CurveFormatError(str(exc)) from None


def load_curve_csv(source: str) -> SampledCurve:
    if source == "-":
        return read_curve_csv(sys.stdin)
    try:
        with open(source, encoding="utf-8", newline="") as fh:
            return read_curve_csv(fh)
    except OSError as exc:
        raise CurveFormatError(f"cannot read curve: {exc}") from None


def _finite(obj):
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def dumps_json(obj) -> str:
    """Stable JSON; non-finite floats become null."""
    return json.dumps(_finite(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"
