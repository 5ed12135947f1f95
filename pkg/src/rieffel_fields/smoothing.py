"""Integrated form of the action: smoothing by a compactly supported weight.

Theta_Phi(f) = int dY Phi(Y) Theta_Y(f) acts on characters as the Fourier
multiplier c_k -> hat(Phi)(freq(k)) c_k with hat(Phi)(a) = int Phi(Y) exp(2 pi i a.Y) dY.
"""
from __future__ import annotations

import math

import numpy as np

from .torus import CharacterAction, DimensionError, TrigPoly

__all__ = ["SampledWeight", "bump", "integrated_action", "central_difference_weights"]


def central_difference_weights(order: int) -> np.ndarray:
    """Stencil weights w_{-p..p} of the order-``order`` central first derivative (unit step)."""
    if order < 2 or order % 2:
        raise ValueError("central differences need an even order >= 2")
    p = order // 2
    offsets = np.arange(-p, p + 1, dtype=float)
    # Vandermonde system: sum_j w_j offsets_j^m = delta_{m,1}
    V = np.vander(offsets, increasing=True).T
    rhs = np.zeros(len(offsets))
    rhs[1] = 1.0
    return np.linalg.solve(V, rhs)


class SampledWeight:
    """A function on R^{2n} sampled on a uniform grid covering its support box.

    ``values[i_1, ..., i_2n]`` is the sample at ``lower + i * step``; the
    function is taken to vanish outside the box.
    """

    def __init__(self, values, lower, step):
        values = np.asarray(values, dtype=float)
        lower = np.broadcast_to(np.asarray(lower, dtype=float), (values.ndim,)).copy()
        step = np.broadcast_to(np.asarray(step, dtype=float), (values.ndim,)).copy()
        if values.size == 0 or not np.any(values):
            raise ValueError("weight has empty support")
        if np.any(step <= 0):
            raise ValueError("grid steps must be positive")
        self.values = values
        self.lower = lower
        self.step = step

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def cell(self) -> float:
        return float(np.prod(self.step))

    def nodes(self, axis: int) -> np.ndarray:
        return self.lower[axis] + self.step[axis] * np.arange(self.values.shape[axis])

    def l1_norm(self) -> float:
        return float(np.abs(self.values).sum() * self.cell)

    def integral(self) -> float:
        return float(self.values.sum() * self.cell)

    def fourier(self, a) -> complex:
        """Riemann-sum approximation of int Phi(Y) exp(2 pi i a.Y) dY."""
        a = np.asarray(a, dtype=float)
        if a.shape != (self.dim,):
            raise DimensionError(f"frequency must have shape ({self.dim},)")
        out = self.values.astype(complex)
        # separable phase: contract one axis at a time
        for ax in range(self.dim - 1, -1, -1):
            out = out @ np.exp(2j * np.pi * a[ax] * self.nodes(ax))
        return complex(out) * self.cell

    def derivative(self, axis: int, order: int = 8) -> "SampledWeight":
        """Partial derivative along ``axis`` by central differences, zero outside the box."""
        w = central_difference_weights(order)
        p = len(w) // 2
        pad = [(0, 0)] * self.dim
        pad[axis] = (p, p)
        padded = np.pad(self.values, pad)
        n = self.values.shape[axis]
        out = np.zeros_like(self.values)
        for j, wj in enumerate(w):
            if wj:
                out += wj * np.take(padded, np.arange(j, j + n), axis=axis)
        return SampledWeight(out / self.step[axis], self.lower, self.step)


def bump(dim: int, radius: float = 1.0, points: int = 201, center=None,
         normalize: bool = True) -> SampledWeight:
    """Smooth bump exp(-1 / (1 - |Y - center|^2 / radius^2)) sampled on its support box."""
    center = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
    axes = [np.linspace(c - radius, c + radius, points) for c in center]
    grids = np.meshgrid(*axes, indexing="ij")
    r2 = sum((g - c) ** 2 for g, c in zip(grids, center)) / radius ** 2
    vals = np.zeros_like(r2)
    inside = r2 < 1.0
    vals[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    step = 2.0 * radius / (points - 1)
    w = SampledWeight(vals, center - radius, step)
    if normalize:
        w = SampledWeight(vals / w.integral(), w.lower, w.step)
    return w


def integrated_action(f: TrigPoly, A: CharacterAction, phi: SampledWeight) -> TrigPoly:
    """Theta_Phi(f): multiply each coefficient by hat(Phi)(freq(k))."""
    if f.dim != A.torus_dim:
        raise DimensionError(f"element on T^{f.dim} but action on T^{A.torus_dim}")
    if phi.dim != A.group_dim:
        raise DimensionError(f"weight on R^{phi.dim} but action of R^{A.group_dim}")
    cache: dict[tuple, complex] = {}

    def mult(k, c):
        key = tuple(A.freq(k))
        if key not in cache:
            cache[key] = phi.fourier(A.freq(k))
        return c * cache[key]

    return f.map_coeffs(mult)


def l1_bound_holds(f: TrigPoly, A: CharacterAction, phi: SampledWeight, slack: float = 1e-12) -> bool:
    """||Theta_Phi f||_l1 <= ||Phi||_L1 ||f||_l1."""
    lhs = integrated_action(f, A, phi).l1_norm()
    return lhs <= phi.l1_norm() * f.l1_norm() * (1 + slack) + math.ulp(1.0)
