import cmath
import math

import numpy as np
import pytest

from rieffel_fields.cocycle import deformed_mul
from rieffel_fields.fields import quantized_norm_profile
from rieffel_fields.norms import norm_bracket, norm_lower, sup_norm
from rieffel_fields.scenarios import (
    SU2Poly,
    almost_mathieu,
    build_hbar_family,
    build_rotation_family,
    build_tsu2_disk,
    restrict_su2,
    semiclassical_action,
    su2_act,
    su2_deformed_mul,
)
from rieffel_fields.torus import SkewForm, TrigPoly, act, pointwise_mul

H = almost_mathieu()
ETA, Z, W = SU2Poly.eta(), SU2Poly.z(), SU2Poly.w()
RELATION = Z * Z.star() + W * W.star()


def random_su2(rng, n=5):
    keys = [(int(rng.integers(-2, 3)), *map(int, rng.integers(0, 3, size=4))) for _ in range(n)]
    return SU2Poly({k: complex(*rng.normal(size=2)) for k in keys})


def disk_points(rng, n=6):
    return [0j, 1.0 + 0j, cmath.exp(0.7j)] + [rng.random() * cmath.exp(2j * math.pi * rng.random()) for _ in range(n)]


def test_hbar_family_structure():
    spec = build_hbar_family(H, SkewForm.standard(1), semiclassical_action(), [0.5, 0.0, 0.25])
    assert spec.ids == ["hbar=0", "hbar=0.25", "hbar=0.5"]
    assert spec.fibers["hbar=0"].classical
    # the Darboux orientation gives rotation number -hbar/2 mod 1
    assert spec.fibers["hbar=0.5"].cocycle.effective_theta() == pytest.approx(0.75, abs=1e-12)
    with pytest.raises(ValueError):
        build_hbar_family(H, SkewForm.standard(1), semiclassical_action(), [-0.1, 0.0])


def test_hbar_family_examples():
    spec = build_hbar_family(H, SkewForm.standard(1), semiclassical_action(), [0.0, 0.5, 1.0])
    prof = quantized_norm_profile(spec, spec.elements["f"], N=8)
    assert prof["hbar=0"] == sup_norm(H, 1024)
    one = build_hbar_family(TrigPoly.character((1, 2), 2.0), SkewForm.standard(1), semiclassical_action(), [0.0, 0.3])
    assert all(b.lower == pytest.approx(2.0) for b in quantized_norm_profile(one, one.elements["f"], N=4).values())


def test_rotation_family_examples():
    spec = build_rotation_family(H, 9)
    assert spec.fibers["theta=0"].classical
    assert spec.fibers["theta=1"].cocycle.effective_theta() == 0.0
    b = norm_bracket(H, spec.fibers["theta=0.5"].cocycle, N=16)
    assert b.contains(2 * math.sqrt(2))
    with pytest.raises(ValueError):
        build_rotation_family(H, [0.5, 0.2])


@pytest.mark.parametrize("theta", [0.1, 0.25, 0.375])
def test_rotation_reflection_symmetry(theta):
    spec = build_rotation_family(H, [theta, 1 - theta])
    a, b = (norm_lower(H, spec.fibers[t].cocycle, 12) for t in spec.ids)
    assert a == pytest.approx(b, abs=1e-10)


def test_restriction_examples(rng):
    for z0 in disk_points(rng):
        r = restrict_su2(RELATION, z0)
        assert r.max_abs_diff(TrigPoly.one(r.dim)) < 1e-14
        e = restrict_su2(ETA, z0)
        assert e == TrigPoly.character((1,) + (0,) * (e.dim - 1))
    assert restrict_su2(W, 0) == TrigPoly.character((0, 1))
    assert not restrict_su2(W, 1.0)
    assert restrict_su2(W, 1.0).dim == 1
    with pytest.raises(ValueError):
        restrict_su2(W, 1.1)


def test_restriction_matches_pointwise_values(rng):
    f = random_su2(rng)
    z0 = 0.4 + 0.3j
    w0 = math.sqrt(1 - abs(z0) ** 2)
    g = restrict_su2(f, z0)
    for a, b in rng.random((5, 2)):
        val = f(cmath.exp(2j * math.pi * a), z0, w0 * cmath.exp(2j * math.pi * b))
        assert g.evaluate([[a, b]])[0] == pytest.approx(val, abs=1e-12)


def test_restriction_is_star_homomorphism(rng):
    for _ in range(5):
        f, g = random_su2(rng), random_su2(rng)
        for z0 in disk_points(rng, 3):
            rf, rg = restrict_su2(f, z0), restrict_su2(g, z0)
            assert restrict_su2(f * g, z0).max_abs_diff(pointwise_mul(rf, rg)) < 1e-12
            star = restrict_su2(f.star(), z0)
            conj = TrigPoly(rf.dim, {tuple(-x for x in k): c.conjugate() for k, c in rf})
            assert star.max_abs_diff(conj) < 1e-14


def test_relation_invariance(rng):
    f, h = random_su2(rng), random_su2(rng)
    g = f + (RELATION - 1) * h
    assert g.equals(f)
    for z0 in disk_points(rng):
        assert restrict_su2(g, z0).max_abs_diff(restrict_su2(f, z0)) < 1e-12


def test_boundary_decay_of_beta_frequencies():
    f = W * W + W.star() + ETA * W
    prev = None
    for rho in (0.9, 0.99, 0.999, 0.9999):
        r = restrict_su2(f, rho)
        mass = sum(abs(c) for k, c in r if k[1] != 0)
        w0 = math.sqrt(1 - rho ** 2)
        assert mass <= 3 * w0 + 1e-15
        assert prev is None or mass < prev
        prev = mass


def test_tsu2_disk_structure():
    spec = build_tsu2_disk(ETA, 4, 6)
    assert len(spec.ids) == 1 + 4 * 6
    ring = [t for t in spec.ids if t.startswith("r=1,")]
    assert all(spec.fibers[t].classical and spec.elements["f"][t].dim == 1 for t in ring)
    assert not spec.fibers["r=0"].classical
    assert set(build_tsu2_disk(ETA, 2, 6).ids) <= set(spec.ids)
    with pytest.raises(ValueError):
        build_tsu2_disk(ETA, 1, 4)


def test_tsu2_disk_examples():
    spec = build_tsu2_disk(ETA, 3, 3)
    prof = quantized_norm_profile(spec, spec.elements["f"], N=4)
    assert all((b.lower, b.upper) == (1.0, 1.0) for b in prof.values())
    spec = build_tsu2_disk(W, 4, 2)
    prof = quantized_norm_profile(spec, spec.elements["f"], N=4)
    for s in spec.base:
        w0 = math.sqrt(max(0.0, 1 - s.coords[0] ** 2 - s.coords[1] ** 2))
        assert prof[s.id].lower == pytest.approx(w0, abs=1e-12)
        assert prof[s.id].upper == pytest.approx(w0, abs=1e-10)
    f = ETA + ETA.star() + W + W.star()
    spec = build_tsu2_disk(f, 4, 2)
    prof = quantized_norm_profile(spec, spec.elements["f"], N=12)
    assert prof["r=1,a=0"].contains(2.0)


def test_deform_then_restrict(rng):
    spec = build_tsu2_disk(ETA, 4, 3, scale=0.3)
    B = spec.fibers["r=0"].cocycle.B
    for _ in range(5):
        f, g = random_su2(rng), random_su2(rng)
        fg = su2_deformed_mul(f, g, B)
        for t in spec.ids:
            s = spec.sample(t)
            z0 = complex(*s.coords)
            C = spec.fibers[t].cocycle
            lhs = restrict_su2(fg, z0)
            rhs = deformed_mul(restrict_su2(f, z0), restrict_su2(g, z0), C)
            assert lhs.max_abs_diff(rhs) < 1e-12 * max(1.0, lhs.l1_norm())


def test_global_action_intertwines_restriction(rng):
    spec = build_tsu2_disk(ETA, 3, 3)
    f = random_su2(rng)
    X = rng.normal(size=2)
    for t in spec.ids:
        z0 = complex(*spec.sample(t).coords)
        lhs = restrict_su2(su2_act(f, X), z0)
        rhs = act(restrict_su2(f, z0), spec.fibers[t].action, X)
        assert lhs.max_abs_diff(rhs) < 1e-12


def test_orbit_representative_independence():
    # another representative of the same orbit differs by a phase on w
    f = ETA + ETA.star() + W + W.star()
    spec = build_tsu2_disk(f, 4, 2)
    t = "r=0.5,a=0"
    C = spec.fibers[t].cocycle
    base = spec.elements["f"][t]
    moved = act(base, C.action, np.array([0.13, 0.21]))
    assert norm_lower(moved, C, 10) == pytest.approx(norm_lower(base, C, 10), abs=1e-12)
