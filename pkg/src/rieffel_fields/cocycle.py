"""Phase cocycles and the deformed product on characters.

For a translation action the deformed product of two characters is again a
character, ``e_k # e_l = c(k, l) e_{k+l}`` with the bilinear phase
``c(k, l) = exp(i freq(k)^T B freq(l))`` and ``B = kappa J^{-1}``.  The constant
``kappa`` is fixed by the quadrature oracle in :mod:`rieffel_fields.quadrature`;
stationary phase predicts ``kappa = 2 pi^2`` for characters ``exp(2 pi i k.s)``.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .torus import CharacterAction, DimensionError, SkewForm, TrigPoly, twisted_convolution

__all__ = [
    "PHASE_CONSTANT",
    "PhaseCocycle",
    "build_cocycle",
    "deformed_mul",
    "deformed_power",
    "rotation_cocycle",
]

#: Calibrated phase constant (confirmed by ``calibrate_phase_constant``).
PHASE_CONSTANT = 2.0 * np.pi ** 2


class PhaseCocycle:
    """Skew phase matrix B on frequency space together with the action it twists."""

    __slots__ = ("B", "action", "_Q")

    def __init__(self, B, action: CharacterAction):
        B = np.array(B, dtype=float)
        n2 = action.group_dim
        if B.shape != (n2, n2):
            raise DimensionError(f"phase matrix must be {n2}x{n2}, got {B.shape}")
        if not np.allclose(B, -B.T, atol=1e-12 * max(1.0, np.abs(B).max()), rtol=0):
            raise ValueError("phase matrix must be skew")
        B = 0.5 * (B - B.T)
        Q = action.M @ B @ action.M.T
        Q = 0.5 * (Q - Q.T)
        B.setflags(write=False)
        Q.setflags(write=False)
        self.B = B
        self.action = action
        self._Q = Q

    @classmethod
    def classical(cls, action: CharacterAction) -> "PhaseCocycle":
        n2 = action.group_dim
        return cls(np.zeros((n2, n2)), action)

    @property
    def torus_dim(self) -> int:
        return self.action.torus_dim

    @property
    def lattice_form(self) -> np.ndarray:
        """Skew matrix Q = M B M^T so that c(k, l) = exp(i k^T Q l)."""
        return self._Q

    @property
    def is_classical(self) -> bool:
        """True when the lattice cocycle is identically 1 (B may still be nonzero)."""
        return not self._Q.any()

    def exponent(self, k, l) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        l = np.asarray(l, dtype=float)
        return (l @ self._Q.T) @ k if l.ndim > 1 else float(k @ self._Q @ l)

    def __call__(self, k, l):
        """c(k, l); ``l`` may be an (m, d) array of lattice points."""
        return np.exp(1j * self.exponent(k, l))

    def phases(self, ks: np.ndarray, ls: np.ndarray) -> np.ndarray:
        """Matrix c(ks[i], ls[j])."""
        ks = np.asarray(ks, dtype=float)
        ls = np.asarray(ls, dtype=float)
        return np.exp(1j * (ks @ self._Q @ ls.T))

    def scaled(self, s: float) -> "PhaseCocycle":
        return PhaseCocycle(s * self.B, self.action)

    def commutation_phase(self, k, l) -> complex:
        """e_k # e_l = commutation_phase * e_l # e_k, i.e. c(k, l)^2."""
        return complex(np.exp(2j * self.exponent(k, l)))

    def effective_theta(self) -> float:
        """Rotation number theta in [0, 1) of a 2-torus cocycle (c(e1, e2)^2 = exp(2 pi i theta))."""
        if self.torus_dim != 2:
            raise DimensionError("rotation number is defined for 2-torus fibers only")
        return float((self._Q[0, 1] / np.pi) % 1.0)

    def __repr__(self) -> str:
        return f"PhaseCocycle(B={self.B.tolist()!r}, M={self.action.M.tolist()!r})"


def build_cocycle(J: SkewForm, A: CharacterAction, kappa: float = PHASE_CONSTANT) -> PhaseCocycle:
    """Cocycle with B = kappa J^{-1} for the deformation along (J, A)."""
    if not isinstance(J, SkewForm):
        J = SkewForm(J)
    if J.dim != A.group_dim:
        raise DimensionError(f"skew form on R^{J.dim} but action of R^{A.group_dim}")
    return PhaseCocycle(float(kappa) * J.inverse(), A)


def rotation_cocycle(theta: float | Fraction, action: CharacterAction | None = None) -> PhaseCocycle:
    """Cocycle on T^2 with e_k # e_l = exp(2 pi i theta (k1 l2 - k2 l1)) e_l # e_k.

    The default action is plain translation (M = identity).  For a general
    invertible 2x2 action matrix B is solved so that M B M^T = pi theta [[0,1],[-1,0]].
    """
    action = CharacterAction.identity(2) if action is None else action
    if action.M.shape != (2, 2):
        raise DimensionError("rotation cocycles need a 2x2 action matrix")
    Q = np.pi * float(theta) * np.array([[0.0, 1.0], [-1.0, 0.0]])
    Minv = np.linalg.inv(action.M)
    return PhaseCocycle(Minv @ Q @ Minv.T, action)


def _check(f: TrigPoly, C: PhaseCocycle) -> None:
    if f.dim != C.torus_dim:
        raise DimensionError(f"element on T^{f.dim} but cocycle on T^{C.torus_dim}")


def deformed_mul(f: TrigPoly, g: TrigPoly, C: PhaseCocycle) -> TrigPoly:
    """Deformed product f # g = sum c_k d_l c(k, l) e_{k+l}."""
    _check(f, C)
    _check(g, C)
    if C.is_classical:
        return twisted_convolution(f, g)
    return twisted_convolution(f, g, C)


def deformed_power(f: TrigPoly, n: int, C: PhaseCocycle) -> TrigPoly:
    if n < 0:
        raise ValueError("power must be nonnegative")
    out = TrigPoly.one(f.dim)
    for _ in range(n):
        out = deformed_mul(out, f, C)
    return out
