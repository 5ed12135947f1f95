"""Command-line front end.

Examples::

    rieffel-fields calibrate --output kappa.json
    rieffel-fields deform --input f.json g.json --cocycle c.json
    rieffel-fields norm --input h.json --cocycle c.json --N 32
    rieffel-fields field-check --input spec.json --seed 7
    rieffel-fields scan --input rotation.json --jobs 4
    rieffel-fields scenario tsu2-disk --input eta.json --output profile.csv

Exit status: 0 ok, 1 invalid input, 2 numerical guard tripped, 3 a check failed.
Errors are reported as one JSON object on stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any

import numpy as np

from . import io as rio
from .cocycle import PhaseCocycle, deformed_mul
from .fields import (
    CovariantFieldSpec,
    FieldError,
    check_centrality,
    check_covariance,
    check_module_axiom,
    continuity_report,
    quantized_norm_profile,
    random_ct_function,
    sup_axiom_check,
)
from .norms import BracketError, SupportBlowup, norm_bracket
from .quadrature import DEFAULT_EPS, CalibrationError, QuadratureError, calibrate_phase_constant
from .scenarios import build_hbar_family, build_rotation_family, build_tsu2_disk, semiclassical_action
from .torus import CharacterAction, DimensionError, SkewForm

log = logging.getLogger("rieffel_fields")

EXIT_INPUT, EXIT_NUMERIC, EXIT_CHECK = 1, 2, 3
SCENARIOS = ("hbar", "rotation", "tsu2-disk")


class CheckFailed(Exception):
    """A check suite ran to completion and at least one check failed."""


def _version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0"


def _round(obj: Any) -> Any:
    """Floats to 12 significant digits, recursively; tuples become lists."""
    if isinstance(obj, float):
        return float(f"{obj:.12g}") if math.isfinite(obj) else repr(obj)
    if isinstance(obj, np.generic):
        return _round(obj.item())
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def _emit(text: str, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _report(args, payload: dict, params: dict) -> str:
    header = {"tool": "rieffel-fields", "version": _version(), "command": args.command,
              "parameters": params}
    return rio.dumps(_round({"header": header, **payload}))


def _load_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise rio.FormatError(f"{path}: {exc}") from exc


def _load_cocycle(path: str | None, dim: int) -> PhaseCocycle:
    if path is None:
        return PhaseCocycle.classical(CharacterAction.identity(dim))
    return rio.cocycle_from_json(_load_json(path))


# ----------------------------------------------------------------------------
# commands


def cmd_calibrate(args) -> int:
    eps = tuple(args.eps) if args.eps else DEFAULT_EPS
    J = A = None
    if args.input:
        cfg = _load_json(args.input[0])
        J = SkewForm(cfg["J"]) if "J" in cfg else None
        A = CharacterAction(cfg["M"]) if "M" in cfg else None
    res = calibrate_phase_constant(J, A, eps_list=eps, box=args.box, points=args.quad_points,
                                   quad_tol=args.tolerance)
    params = {"eps": list(eps), "box": args.box, "quad_points": args.quad_points,
              "quad_tol": args.tolerance}
    _emit(_report(args, {"calibration": res.to_dict()}, params), args.output)
    return 0


def cmd_deform(args) -> int:
    if len(args.input) != 2:
        raise rio.FormatError("deform needs exactly two --input files")
    f, g = (rio.trigpoly_from_json(_load_json(p)) for p in args.input)
    C = _load_cocycle(args.cocycle, f.dim)
    prod = deformed_mul(f, g, C)
    payload = {"product": rio.trigpoly_to_json(prod), "cocycle": rio.cocycle_to_json(C)}
    _emit(_report(args, payload, {}), args.output)
    return 0


def cmd_norm(args) -> int:
    f = rio.trigpoly_from_json(_load_json(args.input[0]))
    C = _load_cocycle(args.cocycle, f.dim)
    b = norm_bracket(f, C, N=args.N, power_doublings=args.power_doublings, grid=args.grid)
    params = {"N": args.N, "power_doublings": args.power_doublings, "grid": args.grid}
    _emit(_report(args, {"bracket": b.to_dict(), "lower": b.lower, "upper": b.upper}, params),
          args.output)
    return 0


def cmd_field_check(args) -> int:
    spec = rio.spec_from_json(_load_json(args.input[0]))
    if not spec.elements:
        raise rio.FormatError("field spec has no elements")
    rng = np.random.default_rng(args.seed)
    tol = args.tolerance if args.tolerance is not None else 1e-12
    names = sorted(spec.elements)
    F = spec.elements[names[0]]
    G = spec.elements[names[1]] if len(names) > 1 else F
    phi = random_ct_function(spec, rng)
    X = rng.normal(size=spec.group_dim)
    reports = [check_module_axiom(spec, phi, F),
               check_covariance(spec, phi, F, X, tol=tol),
               check_centrality(spec, phi, F, G, tol=tol)]
    payload = {"elements": names[:2], "X": X.tolist(), "checks": [r.to_dict() for r in reports],
               "passed": all(r.passed for r in reports)}
    _emit(_report(args, payload, {"seed": args.seed, "tolerance": tol}), args.output)
    if not payload["passed"]:
        raise CheckFailed("field-check: " + ", ".join(r.name for r in reports if not r.passed))
    return 0


def _build(name: str, cfg: dict, level=None) -> CovariantFieldSpec:
    """Scenario builder from a config dict; ``level`` overrides the resolution parameter."""
    if name == "hbar":
        f = rio.trigpoly_from_json(cfg["element"])
        hbars = level if level is not None else cfg.get("hbars", [0.0] + [2.0 ** -j for j in range(9)])
        J0 = SkewForm(cfg["J"]) if "J" in cfg else SkewForm.standard(1)
        A = CharacterAction(cfg["M"]) if "M" in cfg else semiclassical_action()
        return build_hbar_family(f, J0, A, hbars)
    if name == "rotation":
        f = rio.trigpoly_from_json(cfg["element"])
        thetas = level if level is not None else cfg.get("thetas", 9)
        return build_rotation_family(f, thetas if isinstance(thetas, int) else [float(t) for t in thetas])
    if name == "tsu2-disk":
        f = rio.su2poly_from_json(cfg["element"])
        n_radial = level if level is not None else cfg.get("n_radial", 8)
        J = SkewForm(cfg["J"]) if "J" in cfg else None
        return build_tsu2_disk(f, int(n_radial), int(cfg.get("n_angular", 4)), J,
                               scale=float(cfg.get("scale", 1.0)))
    raise rio.FormatError(f"unknown scenario {name!r}; expected one of {SCENARIOS}")


def _profile_rows(spec, profile) -> list[dict]:
    return [{"id": t, "coords": list(spec.sample(t).coords), **profile[t].to_dict()} for t in spec.ids]


def cmd_scan(args) -> int:
    cfg = _load_json(args.input[0])
    name = cfg.get("scenario")
    if name not in SCENARIOS:
        raise rio.FormatError(f"scan config needs 'scenario' in {SCENARIOS}")
    levels = cfg.get("levels") or [None]
    cache: dict = {}
    runs = []
    for level in levels:
        spec = _build(name, cfg, level)
        F = spec.elements["f"]
        prof = quantized_norm_profile(spec, F, N=args.N, power_doublings=args.power_doublings,
                                      grid=args.grid, jobs=args.jobs, cache=cache)
        runs.append((spec, prof, sup_axiom_check(spec, F, prof)))
    cont = continuity_report(runs[0][1], runs[0][0], [(s, p) for s, p, _ in runs[1:]])
    payload = {
        "scenario": name,
        "levels": [{"level": lvl, "profile": _profile_rows(s, p), "sup_axiom": chk.to_dict()}
                   for lvl, (s, p, chk) in zip(levels, runs)],
        "continuity": cont,
    }
    params = {"N": args.N, "power_doublings": args.power_doublings, "grid": args.grid}
    _emit(_report(args, payload, params), args.output)
    if args.csv:
        Path(args.csv).write_text(rio.profile_to_csv(runs[-1][1], runs[-1][0]))
    if not all(chk.passed for _, _, chk in runs):
        raise CheckFailed("scan: sup axiom interval check failed")
    return 0


def cmd_scenario(args) -> int:
    cfg = _load_json(args.input[0])
    if "element" not in cfg:
        # a bare element file
        cfg = {"element": cfg}
    for key in ("thetas", "hbars", "n_radial", "n_angular", "scale"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    spec = _build(args.name, cfg)
    prof = quantized_norm_profile(spec, spec.elements["f"], N=args.N,
                                  power_doublings=args.power_doublings, grid=args.grid, jobs=args.jobs)
    _emit(rio.profile_to_csv(prof, spec), args.output)
    if args.spec_output:
        Path(args.spec_output).write_text(rio.dumps(rio.spec_to_json(spec)))
    return 0


# ----------------------------------------------------------------------------
# argument parsing


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", nargs="+", default=[], help="input file(s)")
    common.add_argument("--output", default=None, help="output path (default: stdout)")
    common.add_argument("--jobs", type=_positive_int, default=1, help="worker processes")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tolerance", type=_positive_float, default=None)
    common.add_argument("--cocycle", default=None, help="cocycle JSON {M, B} or {M, J, hbar}")
    norm_opts = argparse.ArgumentParser(add_help=False)
    norm_opts.add_argument("--N", type=_positive_int, default=16, help="truncation radius")
    norm_opts.add_argument("--power-doublings", type=int, default=5, help="power trick exponent m")
    norm_opts.add_argument("--grid", type=_positive_int, default=1024, help="sup-norm grid per axis")

    p = argparse.ArgumentParser(prog="rieffel-fields", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("calibrate", parents=[common], help="fit the phase constant by quadrature")
    c.add_argument("--eps", type=_positive_float, nargs="+", default=None, help="damping values")
    c.add_argument("--box", type=_positive_float, default=None, help="integration half-width")
    c.add_argument("--quad-points", type=_positive_int, default=None, help="nodes per axis")

    sub.add_parser("deform", parents=[common], help="deformed product of two elements")
    sub.add_parser("norm", parents=[common, norm_opts], help="norm bracket of an element")
    sub.add_parser("field-check", parents=[common], help="module, covariance and centrality checks")

    s = sub.add_parser("scan", parents=[common, norm_opts], help="norm profile with refinements")
    s.add_argument("--csv", default=None, help="also write the finest profile as CSV")

    sc = sub.add_parser("scenario", parents=[common, norm_opts], help="run a named scenario")
    sc.add_argument("name", choices=SCENARIOS)
    sc.add_argument("--thetas", type=_positive_int, default=None, help="rotation grid size")
    sc.add_argument("--hbars", type=float, nargs="+", default=None)
    sc.add_argument("--n-radial", dest="n_radial", type=_positive_int, default=None)
    sc.add_argument("--n-angular", dest="n_angular", type=_positive_int, default=None)
    sc.add_argument("--scale", type=float, default=None, help="deformation scale on the disk")
    sc.add_argument("--spec-output", default=None, help="write the built field spec as JSON")
    return p


COMMANDS = {"calibrate": cmd_calibrate, "deform": cmd_deform, "norm": cmd_norm,
            "field-check": cmd_field_check, "scan": cmd_scan, "scenario": cmd_scenario}


def _fail(code: int, kind: str, exc: BaseException) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": str(exc), "exit_code": code}) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("RIEFFEL_FIELDS_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else 0
    if args.command != "calibrate" and not args.input:
        return _fail(EXIT_INPUT, "invalid_input", ValueError("--input is required"))
    for path in args.input + ([args.cocycle] if args.cocycle else []):
        if not Path(path).is_file():
            return _fail(EXIT_INPUT, "invalid_input", FileNotFoundError(f"no such file: {path}"))
    try:
        return COMMANDS[args.command](args)
    except CheckFailed as exc:
        return _fail(EXIT_CHECK, "check_failed", exc)
    except (SupportBlowup, QuadratureError, CalibrationError, BracketError) as exc:
        return _fail(EXIT_NUMERIC, "numerical_guard", exc)
    except (rio.FormatError, FieldError, DimensionError, ValueError, KeyError, TypeError) as exc:
        return _fail(EXIT_INPUT, "invalid_input", exc)


if __name__ == "__main__":
    sys.exit(main())
