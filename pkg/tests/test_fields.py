import math

import numpy as np
import pytest

from rieffel_fields.cocycle import PhaseCocycle, deformed_mul, rotation_cocycle
from rieffel_fields.fields import (
    BaseSample,
    CovariantFieldSpec,
    CTFunction,
    FiberedElement,
    FiberSpec,
    FieldError,
    check_centrality,
    check_covariance,
    check_module_axiom,
    continuity_report,
    indicator,
    module_action,
    quantized_norm_profile,
    random_ct_function,
    sup_axiom_check,
)
from rieffel_fields.norms import sup_norm
from rieffel_fields.scenarios import almost_mathieu, build_rotation_family
from rieffel_fields.torus import CharacterAction, TrigPoly

H = almost_mathieu()


def classical_chain(elements, coords=None):
    """Chain base with classical 2-torus fibers carrying the given elements."""
    n = len(elements)
    coords = coords if coords is not None else [i / (n - 1) for i in range(n)]
    ids = [f"t={x:.12g}" for x in coords]
    base = []
    for i, t in enumerate(ids):
        adj = []
        if i:
            adj.append((ids[i - 1], coords[i] - coords[i - 1]))
        if i + 1 < n:
            adj.append((ids[i + 1], coords[i + 1] - coords[i]))
        base.append(BaseSample(t, (coords[i],), tuple(adj)))
    C = PhaseCocycle.classical(CharacterAction.identity(2))
    return CovariantFieldSpec(base, [FiberSpec(t, C) for t in ids], {"f": dict(zip(ids, elements))})


def test_spec_validation():
    spec = build_rotation_family(H, 3)
    with pytest.raises(FieldError):
        CovariantFieldSpec(spec.base[:2], spec.fibers.values())
    bad = [BaseSample("a", (0.0,), (("b", 1.0),)), BaseSample("b", (1.0,), ())]
    C = rotation_cocycle(0.1)
    with pytest.raises(FieldError):
        CovariantFieldSpec(bad, [FiberSpec("a", C), FiberSpec("b", C)])
    with pytest.raises(FieldError):
        spec.add_element("g", {t: TrigPoly.one(3) for t in spec.ids})
    assert len(spec.edges()) == 2


def test_module_action_examples(rng):
    spec = build_rotation_family(H, 5)
    F = spec.elements["f"]
    assert module_action(CTFunction.constant(spec.ids, 1.0), F) == F
    zero = module_action(CTFunction.constant(spec.ids, 0.0), F)
    assert all(not zero[t] for t in spec.ids)
    phi, psi = random_ct_function(spec, rng), random_ct_function(spec, rng)
    lhs = module_action(phi * psi, F)
    rhs = module_action(phi, module_action(psi, F))
    assert lhs.max_residual(rhs) < 1e-14 * max(1.0, max(abs(phi[t] * psi[t]) for t in spec.ids) * 4)


def test_module_axiom_is_exact(rng):
    spec = build_rotation_family(TrigPoly.random(rng), 9)
    report = check_module_axiom(spec, random_ct_function(spec, rng), spec.elements["f"])
    assert report.passed and not report.details["failed_samples"]


def test_covariance(rng):
    spec = build_rotation_family(TrigPoly.random(rng), 9)
    F = spec.elements["f"]
    phi = random_ct_function(spec, rng)
    assert check_covariance(spec, phi, F, np.zeros(2)).max_residual == 0.0
    rep = check_covariance(spec, phi, F, rng.normal(size=2))
    assert rep.passed and rep.max_residual < 1e-14 * max(1.0, max(abs(v) for v in phi.values()) * 30)


def test_covariance_flags_corrupted_fiber(rng):
    spec = build_rotation_family(H, 5)
    F = spec.elements["f"]
    X = np.array([0.3, -0.1])
    good = FiberedElement({t: F[t].map_coeffs(lambda k, c: c * np.exp(2j * np.pi * np.dot(k, X))) for t in spec.ids})
    phi = CTFunction.constant(spec.ids, 1.0)
    assert check_covariance(spec, phi, F, X, acted=good).passed
    corrupted = dict(good)
    t = spec.ids[2]
    corrupted[t] = corrupted[t] + TrigPoly.character((1, 0), 0.01)
    rep = check_covariance(spec, phi, F, X, acted=FiberedElement(corrupted))
    assert not rep.passed and rep.details["failed_samples"] == [t]


def test_centrality(rng):
    spec = build_rotation_family(TrigPoly.random(rng), 9)
    F = spec.elements["f"]
    G = FiberedElement({t: TrigPoly.random(rng) for t in spec.ids})
    one = CTFunction.constant(spec.ids, 1.0)
    rep = check_centrality(spec, one, F, G)
    assert rep.max_residual == 0.0
    rep = check_centrality(spec, random_ct_function(spec, rng), F, G)
    assert rep.passed and rep.max_residual < 1e-13


def test_centrality_classical_fibers(rng):
    spec = classical_chain([TrigPoly.random(rng) for _ in range(4)])
    G = FiberedElement({t: TrigPoly.random(rng) for t in spec.ids})
    rep = check_centrality(spec, random_ct_function(spec, rng), spec.elements["f"], G)
    assert rep.passed


def test_indicator_separates_samples():
    spec = build_rotation_family(H, 5)
    for t in spec.ids:
        phi = indicator(spec, t)
        assert phi[t] == 1.0
        assert all(phi[s] == 0.0 for s in spec.ids if s != t)


def test_profile_examples():
    spec = classical_chain([H] * 4)
    prof = quantized_norm_profile(spec, spec.elements["f"], N=8)
    assert len({(b.lower, b.upper) for b in prof.values()}) == 1
    rot = build_rotation_family(TrigPoly.character((3, -2), 0.5j), 5)
    prof = quantized_norm_profile(rot, rot.elements["f"], N=6)
    assert all(b.lower == pytest.approx(0.5, rel=1e-12) and b.upper == pytest.approx(0.5, rel=1e-11)
               for b in prof.values())
    rot = build_rotation_family(H, 5)
    prof = quantized_norm_profile(rot, rot.elements["f"], N=16)
    assert prof["theta=0.5"].contains(2 * math.sqrt(2))
    assert prof["theta=0"].overlaps(sup_norm(H))


def test_profile_is_independent_of_jobs():
    rot = build_rotation_family(H, 5)
    a = quantized_norm_profile(rot, rot.elements["f"], N=8, power_doublings=3, jobs=1)
    b = quantized_norm_profile(rot, rot.elements["f"], N=8, power_doublings=3, jobs=2)
    assert a == b


def test_sup_axiom_check():
    single = classical_chain([H, H])
    prof = quantized_norm_profile(single, single.elements["f"], N=8)
    assert sup_axiom_check(single, single.elements["f"], prof).passed
    rot = build_rotation_family(H, 5)
    prof = quantized_norm_profile(rot, rot.elements["f"], N=8)
    assert sup_axiom_check(rot, rot.elements["f"], prof).passed


def test_continuity_constant_profile():
    spec = classical_chain([TrigPoly.character((1, 1))] * 5)
    prof = quantized_norm_profile(spec, spec.elements["f"], N=4)
    rep = continuity_report(prof, spec)
    assert rep["max_jumps"] == [0.0]
    assert rep["continuity_evidence"]


def test_continuity_classical_family_bounded_by_modulus():
    levels = []
    for n in (5, 9, 17):
        ts = [i / (n - 1) for i in range(n)]
        spec = classical_chain([TrigPoly(2, {(0, 0): 1.0, (1, 0): t}) for t in ts], ts)
        levels.append((spec, quantized_norm_profile(spec, spec.elements["f"], N=8, grid=256)))
    rep = continuity_report(levels[0][1], levels[0][0], [(s, p) for s, p in levels[1:]])
    # | ||f_s|| - ||f_t|| | <= ||f_s - f_t||_l1 = |s - t|
    for (spec, _), jump in zip(levels, rep["max_jumps"]):
        assert jump <= max(d for _, _, d in spec.edges()) + 1e-12
    assert rep["jumps_nonincreasing"]


def test_continuity_requires_nested_levels():
    a = build_rotation_family(H, 3)
    b = build_rotation_family(H, 4)
    pa = quantized_norm_profile(a, a.elements["f"], N=4)
    pb = quantized_norm_profile(b, b.elements["f"], N=4)
    with pytest.raises(FieldError):
        continuity_report(pa, a, [(b, pb)])
