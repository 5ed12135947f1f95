"""Rieffel deformation of function algebras on tori and covariant fields of deformed algebras."""
from .cocycle import PHASE_CONSTANT, PhaseCocycle, build_cocycle, deformed_mul, deformed_power, rotation_cocycle
from .fields import (
    BaseSample,
    CheckReport,
    CovariantFieldSpec,
    CTFunction,
    FiberedElement,
    FiberNormProfile,
    FiberSpec,
    FieldError,
    check_centrality,
    check_covariance,
    check_module_axiom,
    continuity_report,
    module_action,
    quantized_norm_profile,
    sup_axiom_check,
)
from .norms import NormBracket, SupportBlowup, exact_rational_norm, norm_bracket, norm_lower, norm_upper, sup_norm
from .quadrature import CalibrationError, QuadratureError, calibrate_phase_constant, deformed_mul_quadrature
from .scenarios import (
    SU2Poly,
    almost_mathieu,
    build_hbar_family,
    build_rotation_family,
    build_tsu2_disk,
    restrict_su2,
    semiclassical_action,
)
from .smoothing import SampledWeight, bump, integrated_action
from .torus import CharacterAction, DimensionError, SkewForm, TrigPoly, act, derivative, involution, seminorm_classical

__version__ = "0.1.0"
