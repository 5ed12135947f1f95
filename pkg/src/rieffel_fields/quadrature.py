"""Direct quadrature of the deformed product and calibration of the phase constant.

The product of two characters is

    e_k # e_l = I(freq(k), freq(l)) e_{k+l},
    I(a, b) = pi^{-2n} int int dY dZ exp(2i Y^T J Z) exp(2 pi i (a.Y + b.Z)),

an oscillatory integral.  We regularize it with the Gaussian damping
exp(-eps(|Y|^2 + |Z|^2)), truncate to a box and apply the tensor trapezoid
rule; the eps -> 0 limit is taken by polynomial (Richardson) extrapolation.
This is deliberately independent of the closed form in :mod:`cocycle`.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .cocycle import PHASE_CONSTANT
from .torus import CharacterAction, DimensionError, SkewForm, TrigPoly

__all__ = [
    "QuadratureError",
    "CalibrationError",
    "character_integral",
    "deformed_mul_quadrature",
    "extrapolate_character_product",
    "calibrate_phase_constant",
    "CalibrationResult",
    "DEFAULT_CALIBRATION_PAIRS",
    "classical_limit_sweep",
]

log = logging.getLogger(__name__)

DEFAULT_EPS = (0.2, 0.1, 0.05)
DEFAULT_CALIBRATION_PAIRS = (
    ((1, 0), (0, 1)),
    ((1, 1), (0, 1)),
    ((2, 1), (-1, 1)),
    ((1, -1), (1, 2)),
    ((0, 2), (1, 0)),
)


class QuadratureError(RuntimeError):
    """The regularized integral did not stabilize under box/grid refinement."""


class CalibrationError(RuntimeError):
    """Extracted phases are not consistent with a single constant."""


def default_box(eps: float, decay: float = 36.0) -> float:
    """Half-width R with exp(-eps R^2) = exp(-decay)."""
    return math.sqrt(decay / eps)


def default_points(box: float, step: float = 0.12) -> int:
    return 2 * int(math.ceil(box / step)) + 1


def _trapezoid(box: float, points: int) -> tuple[np.ndarray, np.ndarray]:
    z = np.linspace(-box, box, points)
    w = np.full(points, z[1] - z[0])
    w[[0, -1]] *= 0.5
    return z, w


def _integral(a: np.ndarray, b: np.ndarray, J: np.ndarray, eps: float, box: float,
              points: int, chunk: int = 4096) -> complex:
    n2 = J.shape[0]
    z, w = _trapezoid(box, points)
    wz = w * np.exp(-eps * z * z)
    # outer grid over Y, inner Z-integral factorizes over the 2n axes:
    # int dZ exp(-eps|Z|^2) exp(i Z.(2 J^T Y + 2 pi b)) = prod_j sum_z wz exp(i z w_j)
    partial_re: list[float] = []
    partial_im: list[float] = []
    grid = np.stack(np.meshgrid(*([z] * n2), indexing="ij"), axis=-1).reshape(-1, n2)
    wgrid = np.prod(np.stack(np.meshgrid(*([wz] * n2), indexing="ij"), axis=-1).reshape(-1, n2), axis=1)
    for start in range(0, grid.shape[0], chunk):
        Y = grid[start:start + chunk]
        omega = 2.0 * Y @ J + 2.0 * np.pi * b  # (m, 2n); row i is 2 J^T Y_i + 2 pi b
        inner = np.ones(Y.shape[0], dtype=complex)
        for j in range(n2):
            inner *= np.exp(1j * np.outer(omega[:, j], z)) @ wz
        vals = wgrid[start:start + chunk] * np.exp(2j * np.pi * (Y @ a)) * inner
        # pairwise sums per chunk, compensated across chunks: order independent
        partial_re.append(float(vals.real.sum()))
        partial_im.append(float(vals.imag.sum()))
    total = complex(math.fsum(partial_re), math.fsum(partial_im))
    return total * np.pi ** (-n2)


def character_integral(a, b, J: SkewForm, eps: float, box: float | None = None,
                       points: int | None = None, tol: float | None = None) -> complex:
    """Regularized I(a, b) at damping ``eps`` on [-box, box]^{2n} x [-box, box]^{2n}.

    With ``tol`` set, the value is recomputed on a 25% larger box with a 25%
    finer grid and a :class:`QuadratureError` is raised if the two differ by
    more than ``tol``.
    """
    if eps <= 0:
        raise ValueError("damping eps must be positive")
    if not isinstance(J, SkewForm):
        J = SkewForm(J)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != (J.dim,) or b.shape != (J.dim,):
        raise DimensionError("frequencies must live in the same space as the skew form")
    if J.dim > 2:
        log.warning("quadrature over R^%d x R^%d is expensive", J.dim, J.dim)
    box = default_box(eps) if box is None else float(box)
    points = default_points(box) if points is None else int(points)
    if points < 3 or box <= 0:
        raise ValueError("need a positive box and at least 3 points per axis")
    val = _integral(a, b, J.J, eps, box, points)
    if tol is not None:
        fine_points = 2 * int(math.ceil(0.625 * (points - 1))) + 1
        finer = _integral(a, b, J.J, eps, 1.25 * box, fine_points)
        if abs(finer - val) > tol:
            raise QuadratureError(
                f"quadrature not converged at eps={eps}, box={box:.3g}, points={points}: "
                f"change {abs(finer - val):.3e} > tol {tol:.1e}")
    return val


def deformed_mul_quadrature(f: TrigPoly, g: TrigPoly, J: SkewForm, A: CharacterAction,
                            eps: float, box: float | None = None, points: int | None = None,
                            tol: float | None = None) -> TrigPoly:
    """Deformed product computed by regularized quadrature, one integral per frequency pair."""
    if eps <= 0:
        raise ValueError("damping eps must be positive")
    if f.dim != A.torus_dim or g.dim != A.torus_dim:
        raise DimensionError("element and action dimensions differ")
    cache: dict[tuple, complex] = {}
    out: dict[tuple[int, ...], complex] = {}
    for (k, c), (l, d) in product(f, g):
        a, b = A.freq(k), A.freq(l)
        key = (tuple(a), tuple(b))
        if key not in cache:
            cache[key] = character_integral(a, b, J, eps, box, points, tol)
        kl = tuple(x + y for x, y in zip(k, l))
        out[kl] = out.get(kl, 0j) + c * d * cache[key]
    return TrigPoly(f.dim, out)


def _extrapolate(eps: np.ndarray, values: np.ndarray, power: int) -> float:
    """Value at eps = 0 of the interpolating polynomial in eps**power."""
    x = eps ** power
    coeffs = np.polyfit(x, values, len(x) - 1)
    return float(np.polyval(coeffs, 0.0))


def extrapolate_character_product(a, b, J: SkewForm, eps_list=DEFAULT_EPS, box=None,
                                  points=None, tol=None) -> dict:
    """Richardson-extrapolated amplitude and phase of I(a, b) as eps -> 0.

    The phase of the damped integral is even in eps (for a Darboux form it is
    exactly phi_0 / (1 + eps^2)), so it is extrapolated in eps^2; the
    amplitude carries odd terms and is extrapolated in eps.
    """
    eps = np.array(sorted(eps_list, reverse=True), dtype=float)
    vals = np.array([character_integral(a, b, J, e, box, points, tol) for e in eps])
    phases = np.unwrap(np.angle(vals))
    return {
        "eps": eps.tolist(),
        "values": vals,
        "phase": _extrapolate(eps, phases, 2),
        "amplitude": _extrapolate(eps, np.abs(vals), 1),
    }


@dataclass
class CalibrationResult:
    kappa: float
    spread: float
    residual: float
    prediction: float = PHASE_CONSTANT
    pairs: list = field(default_factory=list)

    @property
    def relative_deviation(self) -> float:
        return abs(self.kappa - self.prediction) / self.prediction

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "spread": self.spread,
            "residual": self.residual,
            "prediction": self.prediction,
            "relative_deviation": self.relative_deviation,
            "pairs": self.pairs,
        }


def calibration_instance() -> tuple[SkewForm, CharacterAction]:
    """Darboux form on R^2 and a slow translation action on T^2.

    The small action scale keeps every calibration phase inside (-pi, pi).
    """
    return SkewForm.standard(1), CharacterAction.identity(2, scale=0.15)


def calibrate_phase_constant(J: SkewForm | None = None, A: CharacterAction | None = None,
                             pairs=DEFAULT_CALIBRATION_PAIRS, eps_list=DEFAULT_EPS,
                             box=None, points=None, quad_tol=None,
                             fit_tol: float = 1e-4) -> CalibrationResult:
    """Fit kappa in  phase(e_k # e_l) = kappa freq(k)^T J^{-1} freq(l)  from quadrature.

    Pairs with a vanishing symplectic pairing must come out with zero phase and
    are excluded from the fit.  A :class:`CalibrationError` is raised when the
    largest phase residual of the fitted constant exceeds ``fit_tol``.
    """
    if J is None or A is None:
        J0, A0 = calibration_instance()
        J = J0 if J is None else J
        A = A0 if A is None else A
    Jinv = J.inverse()
    records = []
    kappas = []
    rows = []
    for k, l in pairs:
        a, b = A.freq(k), A.freq(l)
        s = float(a @ Jinv @ b)
        ext = extrapolate_character_product(a, b, J, eps_list, box, points, quad_tol)
        rec = {"k": list(k), "l": list(l), "pairing": s,
               "phase": ext["phase"], "amplitude": ext["amplitude"]}
        if abs(s) > 1e-12:
            rec["kappa"] = ext["phase"] / s
            kappas.append(rec["kappa"])
            rows.append((s, ext["phase"]))
        records.append(rec)
        log.info("calibration pair %s %s: phase %.9f", k, l, ext["phase"])
    if not kappas:
        raise CalibrationError("no calibration pair has a nonzero symplectic pairing")
    s_arr, ph_arr = np.array(rows).T
    kappa = float(s_arr @ ph_arr / (s_arr @ s_arr))
    zero_pairs = [abs(r["phase"]) for r in records if "kappa" not in r]
    residual = float(max(np.abs(ph_arr - kappa * s_arr).max(), max(zero_pairs, default=0.0)))
    result = CalibrationResult(kappa=kappa, spread=float(np.ptp(kappas)),
                               residual=residual, pairs=records)
    if residual > fit_tol:
        raise CalibrationError(f"phase fit residual {residual:.3e} exceeds {fit_tol:.1e}: {result.to_dict()}")
    return result


def classical_limit_sweep(scales, k=(1, 0), l=(0, 1), eps_list=DEFAULT_EPS) -> list[dict]:
    """Extrapolated phase of e_k # e_l when the form is scaled to s J, for each s.

    Rescaling Y, Z by 1/sqrt(s) turns the form s J back into J while shrinking
    frequencies by 1/sqrt(s), so the sweep runs the oracle with the action
    scaled by s^{-1/2}.  The phase decays like 1/s.
    """
    J, A = calibration_instance()
    out = []
    for s in scales:
        As = CharacterAction(A.M / math.sqrt(s))
        ext = extrapolate_character_product(As.freq(k), As.freq(l), J, eps_list)
        out.append({"scale": float(s), "phase": ext["phase"]})
    return out
