"""JSON and CSV formats for elements, cocycles, field specs and norm profiles.

All writers are deterministic: terms and samples are emitted in a fixed order
and floats use Python's shortest round-trip repr, so equal inputs give
byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
from typing import Any, Mapping

import numpy as np

from .cocycle import PHASE_CONSTANT, PhaseCocycle, build_cocycle
from .fields import BaseSample, CovariantFieldSpec, FiberNormProfile, FiberSpec
from .norms import NormBracket
from .scenarios import SU2Poly
from .torus import CharacterAction, SkewForm, TrigPoly

__all__ = [
    "FormatError",
    "dumps",
    "trigpoly_to_json",
    "trigpoly_from_json",
    "su2poly_to_json",
    "su2poly_from_json",
    "cocycle_to_json",
    "cocycle_from_json",
    "bracket_to_json",
    "bracket_from_json",
    "spec_to_json",
    "spec_from_json",
    "profile_to_csv",
]


class FormatError(ValueError):
    """Malformed input document."""


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _need(d: Mapping, key: str, where: str):
    if not isinstance(d, Mapping) or key not in d:
        raise FormatError(f"{where}: missing key {key!r}")
    return d[key]


def _complex(term: Mapping, where: str) -> complex:
    try:
        return complex(float(term.get("re", 0.0)), float(term.get("im", 0.0)))
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{where}: bad coefficient") from exc


def trigpoly_to_json(f: TrigPoly) -> dict:
    return {"dim": f.dim,
            "terms": [{"k": list(k), "re": c.real, "im": c.imag} for k, c in f]}


def trigpoly_from_json(d: Mapping) -> TrigPoly:
    dim = _need(d, "dim", "trigpoly")
    terms = _need(d, "terms", "trigpoly")
    coeffs: dict[tuple[int, ...], complex] = {}
    for i, term in enumerate(terms):
        k = _need(term, "k", f"trigpoly term {i}")
        if len(k) != dim or any(int(x) != x for x in k):
            raise FormatError(f"trigpoly term {i}: index {k} is not in Z^{dim}")
        key = tuple(int(x) for x in k)
        coeffs[key] = coeffs.get(key, 0j) + _complex(term, f"trigpoly term {i}")
    return TrigPoly(int(dim), coeffs)


def su2poly_to_json(f: SU2Poly) -> dict:
    keys = "mpqrs"
    return {"terms": [dict(zip(keys, k), re=c.real, im=c.imag) for k, c in sorted(f.terms.items())]}


def su2poly_from_json(d: Mapping) -> SU2Poly:
    terms = _need(d, "terms", "su2poly")
    out = []
    for i, term in enumerate(terms):
        key = tuple(int(term.get(x, 0)) for x in "mpqrs")
        out.append((key, _complex(term, f"su2poly term {i}")))
    try:
        return SU2Poly(out)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def cocycle_to_json(C: PhaseCocycle) -> dict:
    return {"M": C.action.M.tolist(), "B": None if not C.B.any() else C.B.tolist()}


def cocycle_from_json(d: Mapping) -> PhaseCocycle:
    """Either {"M", "B"} (B null for classical) or {"M", "J", "hbar"} giving B = hbar kappa J^{-1}."""
    action = CharacterAction(np.asarray(_need(d, "M", "cocycle"), dtype=float))
    if "J" in d:
        hbar = float(d.get("hbar", 1.0))
        if hbar < 0:
            raise FormatError("cocycle: hbar must be nonnegative")
        return build_cocycle(SkewForm(d["J"]), action, PHASE_CONSTANT * hbar)
    B = d.get("B")
    if B is None:
        return PhaseCocycle.classical(action)
    return PhaseCocycle(np.asarray(B, dtype=float), action)


def bracket_to_json(b: NormBracket) -> dict:
    return b.to_dict()


def bracket_from_json(d: Mapping) -> NormBracket:
    return NormBracket.from_dict(d)


def spec_to_json(spec: CovariantFieldSpec) -> dict:
    return {
        "base": {"samples": [{"id": s.id, "coords": list(s.coords),
                              "adj": [{"id": n, "dist": dist} for n, dist in s.adj]}
                             for s in spec.base]},
        "fibers": [dict(id=t, **cocycle_to_json(spec.fibers[t].cocycle)) for t in spec.ids],
        "elements": {name: {t: trigpoly_to_json(el[t]) for t in spec.ids}
                     for name, el in sorted(spec.elements.items())},
    }


def spec_from_json(d: Mapping) -> CovariantFieldSpec:
    base = _need(_need(d, "base", "spec"), "samples", "spec.base")
    samples = []
    for s in base:
        sid = str(_need(s, "id", "sample"))
        adj = tuple((str(_need(a, "id", f"adjacency of {sid}")), float(_need(a, "dist", f"adjacency of {sid}")))
                    for a in s.get("adj", ()))
        samples.append(BaseSample(sid, tuple(float(x) for x in s.get("coords", ())), adj))
    fibers = [FiberSpec(str(_need(fb, "id", "fiber")), cocycle_from_json(fb)) for fb in _need(d, "fibers", "spec")]
    elements = {name: {str(t): trigpoly_from_json(p) for t, p in el.items()}
                for name, el in d.get("elements", {}).items()}
    return CovariantFieldSpec(samples, fibers, elements)


def profile_to_csv(profile: FiberNormProfile, spec: CovariantFieldSpec) -> str:
    """One row per sample in spec order; floats with 12 significant digits."""
    ncoord = max((len(s.coords) for s in spec.base), default=0)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id"] + [f"coord_{i}" for i in range(ncoord)]
               + ["norm_lower", "norm_upper", "lower_method", "upper_method"])
    for s in spec.base:
        b = profile[s.id]
        coords = [f"{x:.12g}" for x in s.coords] + [""] * (ncoord - len(s.coords))
        w.writerow([s.id] + coords + [f"{b.lower:.12g}", f"{b.upper:.12g}", b.lower_method, b.upper_method])
    return buf.getvalue()
