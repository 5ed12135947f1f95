"""Covariant fields of deformed algebras over a finite sample of the base space.

A field is a list of base samples (with an adjacency graph), one fiber per
sample (a translation action and a phase cocycle; a zero cocycle marks a
classical fiber) and named elements given by their restrictions to every
fiber.  C(T) acts by fiberwise scalar multiplication.  The checks below test
the C(T)-algebra axioms and covariance coefficientwise, and the norm profile
deforms each fiber independently.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .cocycle import PhaseCocycle, deformed_mul
from .norms import NormBracket, norm_bracket, sup_norm
from .torus import TrigPoly, act

__all__ = [
    "BaseSample",
    "FiberSpec",
    "FiberedElement",
    "CTFunction",
    "CovariantFieldSpec",
    "FiberNormProfile",
    "CheckReport",
    "FieldError",
    "module_action",
    "check_module_axiom",
    "check_covariance",
    "check_centrality",
    "quantized_norm_profile",
    "sup_axiom_check",
    "continuity_report",
    "indicator",
    "random_ct_function",
]

log = logging.getLogger(__name__)


class FieldError(ValueError):
    """Inconsistent sample ids, adjacency or fiber data."""


@dataclass(frozen=True)
class BaseSample:
    id: str
    coords: tuple[float, ...]
    adj: tuple[tuple[str, float], ...] = ()

    def neighbors(self) -> list[str]:
        return [n for n, _ in self.adj]


@dataclass(frozen=True)
class FiberSpec:
    id: str
    cocycle: PhaseCocycle

    @property
    def action(self):
        return self.cocycle.action

    @property
    def classical(self) -> bool:
        return self.cocycle.is_classical


class FiberedElement(dict):
    """Mapping sample id -> TrigPoly, the restrictions of one global element."""

    def residual(self, other: "FiberedElement") -> dict[str, float]:
        if set(self) != set(other):
            raise FieldError("fibered elements live on different samples")
        return {t: self[t].max_abs_diff(other[t]) for t in self}

    def max_residual(self, other: "FiberedElement") -> float:
        return max(self.residual(other).values(), default=0.0)


class CTFunction(dict):
    """Sampled continuous function on the base: sample id -> complex value."""

    def __mul__(self, other: "CTFunction") -> "CTFunction":
        if set(self) != set(other):
            raise FieldError("functions sampled on different bases")
        return CTFunction({t: self[t] * other[t] for t in self})

    @classmethod
    def constant(cls, ids: Iterable[str], value: complex) -> "CTFunction":
        return cls({t: complex(value) for t in ids})


class FiberNormProfile(dict):
    """Mapping sample id -> NormBracket."""


@dataclass
class CheckReport:
    name: str
    passed: bool
    max_residual: float = 0.0
    tolerance: float = 0.0
    per_sample: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "max_residual": self.max_residual,
                "tolerance": self.tolerance, "per_sample": self.per_sample, "details": self.details}


class CovariantFieldSpec:
    """Sampled base space, per-sample fibers and named fibered elements."""

    def __init__(self, base: Iterable[BaseSample], fibers: Iterable[FiberSpec],
                 elements: Mapping[str, Mapping[str, TrigPoly]] | None = None):
        self.base = list(base)
        self.fibers = {fb.id: fb for fb in fibers}
        self.elements = {name: FiberedElement(el) for name, el in (elements or {}).items()}
        self.validate()

    @property
    def ids(self) -> list[str]:
        return [s.id for s in self.base]

    def sample(self, t: str) -> BaseSample:
        return self._by_id[t]

    def validate(self) -> None:
        self._by_id = {s.id: s for s in self.base}
        if len(self._by_id) != len(self.base):
            raise FieldError("duplicate sample ids")
        if set(self.fibers) != set(self._by_id):
            raise FieldError("fibers and base samples have different ids")
        group_dims = {fb.action.group_dim for fb in self.fibers.values()}
        if len(group_dims) > 1:
            raise FieldError(f"fibers are acted on by groups of different dimensions {group_dims}")
        for s in self.base:
            for n, dist in s.adj:
                if n not in self._by_id:
                    raise FieldError(f"sample {s.id} has unknown neighbor {n}")
                if not dist > 0:
                    raise FieldError(f"nonpositive distance on edge {s.id}-{n}")
                back = dict(self._by_id[n].adj)
                if s.id not in back or not math.isclose(back[s.id], dist, rel_tol=1e-12):
                    raise FieldError(f"adjacency not symmetric on edge {s.id}-{n}")
        for name, el in self.elements.items():
            self._check_element(el, name)

    def _check_element(self, el: Mapping[str, TrigPoly], name: str = "element") -> None:
        if set(el) != set(self._by_id):
            raise FieldError(f"{name} is not defined on every sample")
        for t, f in el.items():
            if f.dim != self.fibers[t].action.torus_dim:
                raise FieldError(f"{name} at {t} lives on T^{f.dim}, fiber is T^{self.fibers[t].action.torus_dim}")

    def edges(self) -> list[tuple[str, str, float]]:
        """Undirected adjacency edges, each once, in sample order."""
        seen = set()
        out = []
        for s in self.base:
            for n, dist in s.adj:
                key = frozenset((s.id, n))
                if key not in seen:
                    seen.add(key)
                    out.append((s.id, n, dist))
        return out

    @property
    def group_dim(self) -> int:
        return next(iter(self.fibers.values())).action.group_dim

    def add_element(self, name: str, el: Mapping[str, TrigPoly]) -> None:
        el = FiberedElement(el)
        self._check_element(el, name)
        self.elements[name] = el


# ----------------------------------------------------------------------------
# C(T)-module structure


def _same_base(phi: Mapping, F: Mapping) -> None:
    if set(phi) != set(F):
        raise FieldError("function and element are sampled on different ids")


def module_action(phi: CTFunction, F: FiberedElement) -> FiberedElement:
    """(phi * F)(t) = phi(t) F(t)."""
    _same_base(phi, F)
    return FiberedElement({t: F[t].scale(phi[t]) for t in F})


def indicator(spec: CovariantFieldSpec, t: str, width: float | None = None) -> CTFunction:
    """Continuous bump equal to 1 at sample ``t`` and 0 at every other sample.

    The hat function max(0, 1 - dist / width) in base coordinates, with the
    default width the distance to the nearest other sample.
    """
    c0 = np.asarray(spec.sample(t).coords, dtype=float)
    dists = {s.id: float(np.linalg.norm(np.asarray(s.coords, dtype=float) - c0)) for s in spec.base}
    if width is None:
        width = min((d for s, d in dists.items() if s != t), default=1.0)
    return CTFunction({s: complex(max(0.0, 1.0 - d / width)) for s, d in dists.items()})


def random_ct_function(spec: CovariantFieldSpec, rng: np.random.Generator) -> CTFunction:
    vals = rng.normal(size=len(spec.base)) + 1j * rng.normal(size=len(spec.base))
    return CTFunction(zip(spec.ids, vals))


def check_module_axiom(spec: CovariantFieldSpec, phi: CTFunction, F: FiberedElement) -> CheckReport:
    """Restriction of phi * F equals phi(t) times the restriction, with exact equality."""
    prod = module_action(phi, F)
    bad = [t for t in spec.ids if prod[t] != F[t].scale(phi[t])]
    # scalar associativity only holds up to rounding of the complex products
    assoc = module_action(phi, module_action(phi, F)).max_residual(module_action(phi * phi, F))
    scale = max((abs(v) ** 2 * F[t].l1_norm() for t, v in phi.items()), default=0.0)
    return CheckReport("module_axiom", not bad and assoc <= 1e-14 * max(1.0, scale), 0.0, 0.0,
                       details={"failed_samples": bad, "associativity_residual": assoc})


def _report(name: str, per_sample: dict[str, float], tol: float, **details) -> CheckReport:
    worst = max(per_sample.values(), default=0.0)
    failed = sorted(t for t, r in per_sample.items() if not r <= tol)
    details["failed_samples"] = failed
    return CheckReport(name, not failed, worst, tol, per_sample, details)


def check_covariance(spec: CovariantFieldSpec, phi: CTFunction, F: FiberedElement, X,
                     tol: float = 1e-12, acted: FiberedElement | None = None) -> CheckReport:
    """Theta_X(phi * F) = phi * Theta_X(F) fiberwise.

    When ``acted`` holds the restrictions of the globally transformed element
    Theta_X(f), the fiber actions are also checked against it: restriction must
    intertwine the global and fiberwise actions, which exposes a corrupted fiber.
    """
    _same_base(phi, F)
    res = {}
    for t in spec.ids:
        A = spec.fibers[t].action
        moved = act(F[t], A, X)
        res[t] = act(F[t].scale(phi[t]), A, X).max_abs_diff(moved.scale(phi[t]))
        if acted is not None:
            res[t] = max(res[t], moved.max_abs_diff(acted[t]))
    return _report("covariance", res, tol, X=list(map(float, X)), intertwining=acted is not None)


def check_centrality(spec: CovariantFieldSpec, phi: CTFunction, F: FiberedElement,
                     G: FiberedElement, tol: float = 1e-12) -> CheckReport:
    """phi * (F # G) = (phi * F) # G = F # (phi * G) with each fiber's own product."""
    _same_base(phi, F)
    _same_base(phi, G)
    res = {}
    for t in spec.ids:
        C = spec.fibers[t].cocycle
        a = deformed_mul(F[t], G[t], C).scale(phi[t])
        b = deformed_mul(F[t].scale(phi[t]), G[t], C)
        c = deformed_mul(F[t], G[t].scale(phi[t]), C)
        scale = max(1.0, a.l1_norm())
        res[t] = max(a.max_abs_diff(b), a.max_abs_diff(c)) / scale
    return _report("centrality", res, tol)


# ----------------------------------------------------------------------------
# norm profiles


def _fiber_bracket(args) -> NormBracket:
    f, C, N, m, grid = args
    if C.is_classical:
        return sup_norm(f, grid)
    return norm_bracket(f, C, N, m, grid)


def _fiber_key(f: TrigPoly, C: PhaseCocycle) -> tuple:
    return (f, C.B.tobytes(), C.action.M.tobytes(), C.action.M.shape)


def quantized_norm_profile(spec: CovariantFieldSpec, F: FiberedElement, N: int = 16,
                           power_doublings: int = 5, grid: int = 1024, jobs: int = 1,
                           cache: dict | None = None) -> FiberNormProfile:
    """Norm bracket of the deformed restriction on every fiber.

    Classical fibers use the certified sup-norm bracket.  Fibers that carry the
    same element and cocycle share one computation; ``cache`` may be passed in
    to share work across several profiles computed with the same parameters.
    """
    spec._check_element(F)
    cache = {} if cache is None else cache
    todo = {}
    for t in spec.ids:
        C = spec.fibers[t].cocycle
        key = _fiber_key(F[t], C) + (N, power_doublings, grid)
        if key not in cache and key not in todo:
            todo[key] = (F[t], C, N, power_doublings, grid)
    keys = list(todo)
    if jobs > 1 and len(keys) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_fiber_bracket, [todo[k] for k in keys]))
    else:
        results = [_fiber_bracket(todo[k]) for k in keys]
    cache.update(zip(keys, results))
    profile = FiberNormProfile()
    for t in spec.ids:
        C = spec.fibers[t].cocycle
        profile[t] = cache[_fiber_key(F[t], C) + (N, power_doublings, grid)]
    return profile


def sup_axiom_check(spec: CovariantFieldSpec, F: FiberedElement, profile: FiberNormProfile) -> CheckReport:
    """Interval consistency of ||F|| = sup_t ||F(t)||: sup of lowers <= max of uppers."""
    if set(profile) != set(spec.ids):
        raise FieldError("profile is not complete over the base")
    spec._check_element(F)
    sup_lower = max(br.lower for br in profile.values())
    max_upper = max(br.upper for br in profile.values())
    attained = sorted(t for t, br in profile.items() if br.upper >= sup_lower)
    return CheckReport("sup_axiom", sup_lower <= max_upper, 0.0, 0.0, details={
        "sup_lower": sup_lower, "global_upper": max_upper,
        "global_bracket": [sup_lower, max_upper], "attaining_samples": attained})


def _jump_stats(spec: CovariantFieldSpec, profile: FiberNormProfile) -> dict:
    jumps = [profile[a].gap(profile[b]) for a, b, _ in spec.edges()]
    usc = []
    for s in spec.base:
        up = profile[s.id].upper
        usc.append(max((max(0.0, profile[n].lower - up) for n in s.neighbors()), default=0.0))
    return {
        "samples": len(spec.base),
        "edges": len(jumps),
        "max_jump": max(jumps, default=0.0),
        "mean_jump": float(np.mean(jumps)) if jumps else 0.0,
        "max_usc_excess": max(usc, default=0.0),
        "max_width": max(br.width for br in profile.values()),
    }


def continuity_report(profile: FiberNormProfile, spec: CovariantFieldSpec,
                      refinements: Iterable[tuple[CovariantFieldSpec, FiberNormProfile]] = ()) -> dict:
    """Bracket-aware jump statistics on a base and its refinements.

    The jump across an edge is the gap between the two brackets (zero when they
    overlap).  Shrinking maximal jumps under refinement is evidence of
    continuity of t -> ||F(t)||; the one-sided statistic (neighbor lower bound
    above the center's upper bound) is the upper-semicontinuity analogue.
    """
    levels = [(spec, profile)] + list(refinements)
    for i, (sp_, pr) in enumerate(levels):
        if set(pr) != set(sp_.ids):
            raise FieldError(f"profile at level {i} is incomplete")
        if i:
            coarse = set(levels[i - 1][0].ids)
            if not coarse <= set(sp_.ids):
                raise FieldError(f"level {i} does not contain the samples of level {i - 1}")
            for t in coarse:
                if levels[i - 1][0].sample(t).coords != sp_.sample(t).coords:
                    raise FieldError(f"sample {t} moved between levels {i - 1} and {i}")
    stats = [_jump_stats(sp_, pr) for sp_, pr in levels]
    max_jumps = [s["max_jump"] for s in stats]
    usc = [s["max_usc_excess"] for s in stats]
    # a profile with no jumps at all is trivially continuous
    strictly = all(b < a or a == b == 0.0 for a, b in zip(max_jumps, max_jumps[1:]))
    nonincreasing = all(b <= a for a, b in zip(max_jumps, max_jumps[1:]))
    return {
        "levels": stats,
        "max_jumps": max_jumps,
        "continuity_evidence": strictly,
        "jumps_nonincreasing": nonincreasing,
        "usc_evidence": all(b <= a for a, b in zip(usc, usc[1:])),
        "summary": ("evidence of continuity: maximal bracket gaps shrink under refinement"
                    if strictly else "no continuity evidence: maximal bracket gaps do not shrink"),
    }
