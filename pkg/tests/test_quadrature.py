import numpy as np
import pytest

from rieffel_fields.cocycle import PHASE_CONSTANT, build_cocycle, deformed_mul
from rieffel_fields.quadrature import (
    QuadratureError,
    calibration_instance,
    character_integral,
    classical_limit_sweep,
    deformed_mul_quadrature,
    extrapolate_character_product,
)
from rieffel_fields.torus import TrigPoly

# Oracle output of the full calibration run (5 pairs, eps = 0.2, 0.1, 0.05),
# frozen here so regressions in the quadrature are caught without rerunning it.
FROZEN_KAPPA = 19.73919006


def test_unit_is_preserved():
    J, A = calibration_instance()
    one = TrigPoly.one(2)
    out = deformed_mul_quadrature(one, one, J, A, eps=0.05)
    assert out.support == frozenset({(0, 0)})
    # the damped integral of the unit is 1 / (1 + eps^2)
    assert out[(0, 0)] == pytest.approx(1 / (1 + 0.05 ** 2), rel=1e-10)


def test_support_is_contained_in_sumset(rng):
    J, A = calibration_instance()
    f = TrigPoly(2, {(1, 0): 1.0, (0, 1): 0.5j})
    g = TrigPoly(2, {(0, -1): 1.0, (2, 1): -1.0})
    out = deformed_mul_quadrature(f, g, J, A, eps=0.1)
    sums = {(a[0] + b[0], a[1] + b[1]) for a in f.support for b in g.support}
    assert out.support <= sums


def test_zero_pairing_gives_zero_phase():
    J, A = calibration_instance()
    a = A.freq((1, 1))
    ext = extrapolate_character_product(a, 2 * a, J)
    assert abs(ext["phase"]) < 1e-9


def test_extrapolated_phase_matches_closed_form():
    J, A = calibration_instance()
    C = build_cocycle(J, A)
    k, l = (1, 0), (0, 1)
    ext = extrapolate_character_product(A.freq(k), A.freq(l), J)
    closed = np.angle(C(k, l))
    assert ext["phase"] == pytest.approx(closed, abs=1e-3)
    # the amplitude is extrapolated linearly in eps, so it is only good to O(eps^2)
    assert ext["amplitude"] == pytest.approx(1.0, abs=5e-3)


def test_quadrature_product_tracks_closed_form():
    J, A = calibration_instance()
    C = build_cocycle(J, A)
    f = TrigPoly(2, {(1, 0): 1.0, (0, 1): 1.0})
    g = TrigPoly(2, {(0, 1): 1.0, (-1, 1): 0.5})
    approx = deformed_mul_quadrature(f, g, J, A, eps=0.1)
    exact = deformed_mul(f, g, C)
    # damping only perturbs at order eps
    assert approx.max_abs_diff(exact) < 0.1


def test_convergence_guard_trips():
    J, A = calibration_instance()
    with pytest.raises(QuadratureError):
        character_integral(A.freq((1, 0)), A.freq((0, 1)), J, eps=0.2, box=3.0, points=40, tol=1e-9)


def test_classical_limit_phase_decays():
    phases = [r["phase"] for r in classical_limit_sweep([1, 4, 16], eps_list=(0.4, 0.2))]
    assert abs(phases[0]) > abs(phases[1]) > abs(phases[2])
    assert phases[1] * 4 == pytest.approx(phases[0], rel=1e-3)
    assert phases[2] * 16 == pytest.approx(phases[0], rel=1e-3)


def test_frozen_oracle_value_agrees_with_prediction():
    assert abs(FROZEN_KAPPA - PHASE_CONSTANT) / PHASE_CONSTANT < 1e-6
