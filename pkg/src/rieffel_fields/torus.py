"""Sparse trigonometric polynomials on the d-torus with a linear R^{2n}-action.

Elements are finite Fourier series ``f(s) = sum_k c_k exp(2 pi i k.s)`` stored
as a mapping from lattice points to complex coefficients.  The vector group
Xi = R^{2n} acts by translations ``s -> s + M X (mod 1)``, so every character
is an eigenvector of the action with frequency ``freq(k) = M^T k``.
"""
from __future__ import annotations

import math
from itertools import product
from types import MappingProxyType
from typing import Callable, Iterable, Iterator, Mapping

import numpy as np

__all__ = [
    "DimensionError",
    "SkewForm",
    "CharacterAction",
    "TrigPoly",
    "act",
    "derivative",
    "multi_indices",
    "pointwise_mul",
    "involution",
    "sup_estimate",
    "seminorm_classical",
]


class DimensionError(ValueError):
    """Raised when operands live on tori (or frequency spaces) of different dimension."""


class SkewForm:
    """Nondegenerate skew form [[Y, Z]] = Y^T J Z on R^{2n}, normalized to |det J| = 1."""

    __slots__ = ("J",)

    def __init__(self, J, atol: float = 1e-10):
        J = np.array(J, dtype=float)
        if J.ndim != 2 or J.shape[0] != J.shape[1] or J.shape[0] % 2:
            raise ValueError(f"skew form must be an even square matrix, got shape {J.shape}")
        if not np.allclose(J, -J.T, atol=atol, rtol=0):
            raise ValueError("skew form is not antisymmetric")
        det = np.linalg.det(J)
        if abs(det) < atol:
            raise ValueError("skew form is singular")
        if abs(abs(det) - 1.0) > 1e-8:
            raise ValueError(f"skew form must satisfy |det J| = 1, got {abs(det):.6g}")
        J = 0.5 * (J - J.T)
        J.setflags(write=False)
        self.J = J

    @classmethod
    def standard(cls, n: int = 1) -> "SkewForm":
        """Darboux form [[0, I], [-I, 0]] on R^{2n}."""
        eye = np.eye(n)
        zero = np.zeros((n, n))
        return cls(np.block([[zero, eye], [-eye, zero]]))

    @property
    def dim(self) -> int:
        return self.J.shape[0]

    def inverse(self) -> np.ndarray:
        Jinv = np.linalg.inv(self.J)
        return 0.5 * (Jinv - Jinv.T)

    def __call__(self, Y, Z) -> float:
        return float(np.asarray(Y) @ self.J @ np.asarray(Z))

    def __repr__(self) -> str:
        return f"SkewForm({self.J.tolist()!r})"


class CharacterAction:
    """Translation action of R^{2n} on the d-torus, sigma -> sigma + M X mod 1."""

    __slots__ = ("M",)

    def __init__(self, M):
        M = np.array(M, dtype=float)
        if M.ndim != 2:
            raise ValueError("action matrix must be two dimensional (d x 2n)")
        M.setflags(write=False)
        self.M = M

    @classmethod
    def identity(cls, d: int = 2, scale: float = 1.0) -> "CharacterAction":
        return cls(scale * np.eye(d))

    @property
    def torus_dim(self) -> int:
        return self.M.shape[0]

    @property
    def group_dim(self) -> int:
        return self.M.shape[1]

    def freq(self, k) -> np.ndarray:
        """Frequency M^T k in R^{2n} of the character e_k."""
        return self.M.T @ np.asarray(k, dtype=float)

    def freqs(self, ks: np.ndarray) -> np.ndarray:
        """Row-wise frequencies for an (m, d) integer array of lattice points."""
        return np.asarray(ks, dtype=float).reshape(-1, self.torus_dim) @ self.M

    def __repr__(self) -> str:
        return f"CharacterAction({self.M.tolist()!r})"


def _as_key(k, dim: int) -> tuple[int, ...]:
    key = tuple(int(x) for x in k)
    if len(key) != dim:
        raise DimensionError(f"lattice point {key} does not have dimension {dim}")
    return key


class TrigPoly:
    """Finite Fourier series on the d-torus.

    Coefficients are kept in a read-only mapping ``{k: c_k}``; exact zeros are
    dropped and nothing else is pruned.  Instances are immutable and hashable
    by value.

    >>> f = TrigPoly.character((1, 0)) + TrigPoly.character((0, 1))
    >>> sorted(f.support)
    [(0, 1), (1, 0)]
    """

    __slots__ = ("dim", "_coeffs")

    def __init__(self, dim: int, coeffs: Mapping | Iterable = ()):
        if int(dim) < 0:
            raise ValueError("torus dimension must be nonnegative")
        self.dim = int(dim)
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        table: dict[tuple[int, ...], complex] = {}
        for k, c in items:
            key = _as_key(k, self.dim)
            table[key] = table.get(key, 0j) + complex(c)
        self._coeffs = MappingProxyType({k: c for k, c in table.items() if c != 0})

    # construction -----------------------------------------------------
    @classmethod
    def zero(cls, dim: int) -> "TrigPoly":
        return cls(dim)

    @classmethod
    def constant(cls, value: complex, dim: int = 2) -> "TrigPoly":
        return cls(dim, {(0,) * dim: value})

    @classmethod
    def one(cls, dim: int = 2) -> "TrigPoly":
        return cls.constant(1.0, dim)

    @classmethod
    def character(cls, k, coeff: complex = 1.0) -> "TrigPoly":
        k = tuple(int(x) for x in k)
        return cls(len(k), {k: coeff})

    @classmethod
    def random(cls, rng: np.random.Generator, dim: int = 2, degree: int = 3,
               n_terms: int = 6, unit: bool = False) -> "TrigPoly":
        """Random element with ``n_terms`` lattice points in the box |k|_inf <= degree.

        With ``unit=True`` every coefficient is a unimodular complex number.
        """
        ks = rng.integers(-degree, degree + 1, size=(n_terms, dim))
        if unit:
            cs = np.exp(2j * np.pi * rng.random(n_terms))
        else:
            cs = rng.normal(size=n_terms) + 1j * rng.normal(size=n_terms)
        return cls(dim, zip(map(tuple, ks), cs))

    # mapping interface --------------------------------------------------
    @property
    def coeffs(self) -> Mapping[tuple[int, ...], complex]:
        return self._coeffs

    @property
    def support(self) -> frozenset:
        return frozenset(self._coeffs)

    def __getitem__(self, k) -> complex:
        return self._coeffs.get(tuple(int(x) for x in k), 0j)

    def __iter__(self) -> Iterator[tuple[tuple[int, ...], complex]]:
        return iter(sorted(self._coeffs.items()))

    def __len__(self) -> int:
        return len(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return self.dim == other.dim and dict(self._coeffs) == dict(other._coeffs)

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self._coeffs.items())))

    def __reduce__(self):
        return (TrigPoly, (self.dim, dict(self._coeffs)))

    def __repr__(self) -> str:
        terms = ", ".join(f"{k}: {c:.6g}" for k, c in self)
        return f"TrigPoly(dim={self.dim}, {{{terms}}})"

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Lattice points as an (m, d) int array and coefficients as a complex vector (sorted by k)."""
        if not self._coeffs:
            return np.zeros((0, self.dim), dtype=int), np.zeros(0, dtype=complex)
        ks, cs = zip(*self)
        return np.array(ks, dtype=int).reshape(-1, self.dim), np.array(cs, dtype=complex)

    # linear structure ----------------------------------------------------
    def _check(self, other: "TrigPoly") -> None:
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, TrigPoly):
            other = TrigPoly.constant(other, self.dim)
        self._check(other)
        out = dict(self._coeffs)
        for k, c in other._coeffs.items():
            out[k] = out.get(k, 0j) + c
        return TrigPoly(self.dim, out)

    __radd__ = __add__

    def __neg__(self) -> "TrigPoly":
        return TrigPoly(self.dim, {k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s: complex) -> "TrigPoly":
        s = complex(s)
        return TrigPoly(self.dim, {k: s * c for k, c in self._coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, TrigPoly):
            return pointwise_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def map_coeffs(self, fn: Callable[[tuple[int, ...], complex], complex]) -> "TrigPoly":
        return TrigPoly(self.dim, {k: fn(k, c) for k, c in self._coeffs.items()})

    # scalar summaries ----------------------------------------------------
    @property
    def degree(self) -> int:
        """Largest |k|_inf over the support (0 for the zero element)."""
        return max((max(map(abs, k), default=0) for k in self._coeffs), default=0)

    def l1_norm(self) -> float:
        return math.fsum(abs(c) for c in self._coeffs.values())

    def lipschitz_weight(self) -> float:
        """sum_k |c_k| |k|_1, the frequency-weighted l1 mass."""
        return math.fsum(abs(c) * sum(map(abs, k)) for k, c in self._coeffs.items())

    def max_abs_diff(self, other: "TrigPoly") -> float:
        """Coefficientwise sup distance."""
        self._check(other)
        keys = set(self._coeffs) | set(other._coeffs)
        return max((abs(self[k] - other[k]) for k in keys), default=0.0)

    def evaluate(self, points) -> np.ndarray:
        """Values at torus points ``points`` of shape (..., d)."""
        pts = np.asarray(points, dtype=float)
        ks, cs = self.arrays()
        if not len(cs):
            return np.zeros(pts.shape[:-1], dtype=complex)
        return np.exp(2j * np.pi * pts @ ks.T.astype(float)) @ cs

    def dense(self, radius: int | None = None) -> np.ndarray:
        """Coefficients on the box [-radius, radius]^d as a dense array (index k + radius)."""
        r = self.degree if radius is None else int(radius)
        if r < self.degree:
            raise ValueError(f"radius {r} smaller than degree {self.degree}")
        arr = np.zeros((2 * r + 1,) * self.dim, dtype=complex)
        for k, c in self._coeffs.items():
            arr[tuple(np.add(k, r))] = c
        return arr

    @classmethod
    def from_dense(cls, arr: np.ndarray) -> "TrigPoly":
        arr = np.asarray(arr)
        r = (arr.shape[0] - 1) // 2
        idx = np.argwhere(arr != 0)
        return cls(arr.ndim, ((tuple(i - r), arr[tuple(i)]) for i in idx))


# ----------------------------------------------------------------------------
# operations


def _check_action(f: TrigPoly, A: CharacterAction) -> None:
    if f.dim != A.torus_dim:
        raise DimensionError(f"element on T^{f.dim} but action on T^{A.torus_dim}")


def act(f: TrigPoly, A: CharacterAction, X) -> TrigPoly:
    """Translate ``f`` by the group element X: c_k -> exp(2 pi i freq(k).X) c_k."""
    _check_action(f, A)
    X = np.asarray(X, dtype=float)
    if X.shape != (A.group_dim,):
        raise DimensionError(f"group element must have shape ({A.group_dim},)")
    return f.map_coeffs(lambda k, c: c * np.exp(2j * np.pi * float(A.freq(k) @ X)))


def derivative(f: TrigPoly, A: CharacterAction, alpha) -> TrigPoly:
    """Infinitesimal generator delta^alpha of the action applied to ``f``."""
    _check_action(f, A)
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != A.group_dim or min(alpha, default=0) < 0:
        raise ValueError(f"multi-index must have {A.group_dim} nonnegative entries")
    if not any(alpha):
        return f

    def weight(k, c):
        w = 2j * np.pi * A.freq(k)
        return c * complex(np.prod([w[j] ** a for j, a in enumerate(alpha) if a]))

    return f.map_coeffs(weight)


def multi_indices(dim: int, order: int) -> Iterator[tuple[int, ...]]:
    """All multi-indices of length ``dim`` with |alpha| <= order, graded."""
    for total in range(order + 1):
        for alpha in product(range(total + 1), repeat=dim):
            if sum(alpha) == total:
                yield alpha


def twisted_convolution(f: TrigPoly, g: TrigPoly,
                        phase: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None) -> TrigPoly:
    """sum_{k,l} c_k d_l phase(k, l) e_{k+l}; ``phase=None`` is the plain convolution.

    Products are formed as (c_k * d_l) * phase and each output coefficient is a
    correctly rounded sum (math.fsum), so the result does not depend on term
    order: the untwisted product is exactly commutative and a phase of exactly
    1 reproduces it bit for bit.
    """
    f._check(g)
    if not f or not g:
        return TrigPoly.zero(f.dim)
    kf, cf = f.arrays()
    kg, cg = g.arrays()
    terms: dict[tuple[int, ...], list[complex]] = {}
    gr, gi = cg.real, cg.imag
    for k, c in zip(kf, cf):
        # explicit real arithmetic keeps c * d == d * c bit for bit
        prods = (c.real * gr - c.imag * gi) + 1j * (c.real * gi + c.imag * gr)
        if phase is not None:
            prods = prods * phase(k, kg)
        for l, p in zip((kg + k).tolist(), prods.tolist()):
            terms.setdefault(tuple(l), []).append(p)
    out = {key: complex(math.fsum(p.real for p in ps), math.fsum(p.imag for p in ps))
           for key, ps in terms.items()}
    return TrigPoly(f.dim, out)


def pointwise_mul(f: TrigPoly, g: TrigPoly) -> TrigPoly:
    """Undeformed (pointwise) product: convolution of coefficient tables."""
    return twisted_convolution(f, g)


def involution(f: TrigPoly) -> TrigPoly:
    """f* : c_k -> conj(c_{-k})."""
    return TrigPoly(f.dim, {tuple(-x for x in k): c.conjugate() for k, c in f.coeffs.items()})


def _grid_max(f: TrigPoly, grid: int, chunk: int = 1 << 20) -> float:
    """max |f| over the uniform grid {j / grid}^d, by separable per-axis contraction."""
    if not f:
        return 0.0
    d = f.dim
    if d == 0:
        return abs(f[()])
    r = f.degree
    arr = f.dense(r)
    ks = np.arange(-r, r + 1)
    s = np.arange(grid) / grid
    E = np.exp(2j * np.pi * np.outer(s, ks))  # (grid, 2r+1)
    # contract every axis but the first, then the first in row chunks
    tail = arr
    for ax in range(d - 1, 0, -1):
        tail = np.tensordot(tail, E, axes=([ax], [1]))
        tail = np.moveaxis(tail, -1, ax)
    rows = max(1, chunk // max(1, grid ** (d - 1)))
    best = 0.0
    for start in range(0, grid, rows):
        vals = np.tensordot(E[start:start + rows], tail, axes=([1], [0]))
        best = max(best, float(np.abs(vals).max()))
    return best


def sup_estimate(f: TrigPoly, grid: int = 256) -> tuple[float, float]:
    """Certified (lower, upper) bounds on sup |f| from a uniform grid.

    Every torus point is within 1/grid (per axis) of a grid point and
    |grad f| <= 2 pi sum |c_k| |k|_1, which gives the upper side.
    """
    if grid < 1:
        raise ValueError("grid must be positive")
    lower = _grid_max(f, grid)
    if len(f) == 1:
        # |c e_k| is constant on the torus
        lower = abs(next(iter(f.coeffs.values())))
    return lower, lower + 2.0 * np.pi * f.lipschitz_weight() / grid


def seminorm_classical(f: TrigPoly, A: CharacterAction, order: int, grid: int = 128) -> float:
    """Certified upper estimate of sum_{|alpha| <= order} ||delta^alpha f||_inf / |alpha|!."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    _check_action(f, A)
    terms = []
    for alpha in multi_indices(A.group_dim, order):
        _, upper = sup_estimate(derivative(f, A, alpha), grid)
        terms.append(upper / math.factorial(sum(alpha)))
    return math.fsum(terms)
