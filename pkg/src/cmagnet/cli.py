"""Command-line front end.

    cmagnet generate  --config cfg.json [--out curve.csv]
    cmagnet integrate --config cfg.json [--out curve.csv]
    cmagnet analyze   curve.csv [--q Q] [--out report.json]
    cmagnet compare   --config cfg.json [--out report.json]

Exit codes: 0 success, 2 input error (JSON on stderr), 3 curve is not a
normal magnetic curve (analyze only).
"""
from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager

import numpy as np

from . import __version__
from .frenet import CurveCase, Tolerances, classify
from .io import (ConfigError, CurveFormatError, RunConfig, dumps_json, load_config,
                 load_curve_csv, tolerances_from, write_curve_csv)
from .manifold_core import verify_structure
from .trajectory import closed_form, integrate, time_grid

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_MAGNETIC = 3


class InputError(Exception):
    pass


def generate_curve(config: RunConfig):
    params = config.curve_params()
    return params, closed_form(config.dims, params, time_grid(config.t_end, config.dt))


def integrate_curve(config: RunConfig, dt: float | None = None):
    q, p0, T0 = config.initial_conditions()
    return integrate(config.dims, q, p0, T0, config.t_end, config.dt if dt is None else dt)


def run_compare(config: RunConfig, dt: float | None = None) -> dict:
    """Integrate and evaluate the closed form on the same grid; report deviations."""
    dt = config.dt if dt is None else float(dt)
    numeric = integrate_curve(config, dt)
    exact = closed_form(config.dims, config.curve_params(), numeric.t)
    dist = np.linalg.norm(numeric.points - exact.points, axis=-1)
    speed = np.abs(np.linalg.norm(numeric.derivs, axis=-1) - 1.0)
    z = numeric.derivs[:, config.dims.z_slice]
    slant = np.max(np.abs(z - z[0]), axis=0)
    check = verify_structure(config.dims, samples=100, seed=config.seed)
    return {
        "n": config.dims.n,
        "s": config.dims.s,
        "q": config.curve_params().q,
        "t_end": config.t_end,
        "dt": dt,
        "samples": int(numeric.t.size),
        "max_distance": float(np.max(dist)),
        "max_speed_drift": float(np.max(speed)),
        "max_slant_drift": float(np.max(slant)),
        "slant_drift": slant.tolist(),
        "structure_check": check.to_dict(),
    }


@contextmanager
def _output(path: str):
    if path == "-":
        yield sys.stdout
    else:
        try:
            fh = open(path, "w", encoding="utf-8", newline="\n")
        except OSError as exc:
            raise InputError(f"cannot open output {path!r}: {exc}") from None
        with fh:
            yield fh


def _tolerance_overrides(args) -> dict:
    return {name: getattr(args, f"tol_{name}") for name in Tolerances.names()
            if getattr(args, f"tol_{name}", None) is not None}


def _config(args) -> RunConfig:
    config = load_config(args.config)
    overrides = _tolerance_overrides(args)
    if overrides:
        config = RunConfig(**{**config.__dict__,
                              "tolerances": tolerances_from(overrides, config.tolerances)})
    return config


def cmd_generate(args) -> int:
    config = _config(args)
    params, curve = generate_curve(config)
    echo = dumps_json({"params": params.to_dict(), "n": config.dims.n, "s": config.dims.s})
    with _output(args.out) as fh:
        write_curve_csv(curve, fh)
    (sys.stderr if args.out == "-" else sys.stdout).write(echo)
    return EXIT_OK


def cmd_integrate(args) -> int:
    config = _config(args)
    curve = integrate_curve(config)
    with _output(args.out) as fh:
        write_curve_csv(curve, fh)
    return EXIT_OK


def cmd_analyze(args) -> int:
    curve = load_curve_csv(args.curve)
    tol = tolerances_from(_tolerance_overrides(args))
    try:
        result = classify(curve, q=args.q, tol=tol)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    report = result.to_dict()
    report.update({"n": curve.dims.n, "s": curve.dims.s, "samples": len(curve),
                   "q_given": args.q, "tolerances": tol.to_dict()})
    with _output(args.out) as fh:
        fh.write(dumps_json(report))
    return EXIT_NOT_MAGNETIC if result.case is CurveCase.NOT_NORMAL_MAGNETIC else EXIT_OK


def cmd_compare(args) -> int:
    config = _config(args)
    report = run_compare(config)
    with _output(args.out) as fh:
        fh.write(dumps_json(report))
    return EXIT_OK


def _add_tolerance_flags(p: argparse.ArgumentParser) -> None:
    defaults = Tolerances()
    for name in Tolerances.names():
        p.add_argument(f"--tol-{name.replace('_', '-')}", dest=f"tol_{name}", type=float,
                       metavar="X", help=f"override tolerance (default {getattr(defaults, name):g})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cmagnet",
        description="Normal magnetic curves on the flat C-manifold R^(2n+s).")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func, help_ in (
            ("generate", cmd_generate, "sample the closed-form curve to CSV"),
            ("integrate", cmd_integrate, "integrate the Lorentz equation with RK4 to CSV"),
            ("compare", cmd_compare, "report RK4 vs closed-form deviations as JSON")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="config JSON path, or - for stdin")
        p.add_argument("--out", default="-", help="output path (default stdout)")
        _add_tolerance_flags(p)
        p.set_defaults(func=func)

    p = sub.add_parser("analyze", help="classify a curve CSV; exit 3 if not magnetic")
    p.add_argument("curve", help="curve CSV path, or - for stdin")
    p.add_argument("--q", type=float, default=None, help="check the Lorentz equation for this charge")
    p.add_argument("--out", default="-", help="report path (default stdout)")
    _add_tolerance_flags(p)
    p.set_defaults(func=cmd_analyze)
    return parser


def _fail(kind: str, message: str) -> int:
    sys.stderr.write(dumps_json({"error": kind, "message": message}))
    return EXIT_INPUT


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail("config", str(exc))
    except CurveFormatError as exc:
        return _fail("curve_format", str(exc))
    except InputError as exc:
        return _fail("input", str(exc))
    except ValueError as exc:
        return _fail("invalid_argument", str(exc))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
