"""Builders for concrete covariant fields.

* ``build_hbar_family``: one fixed element deformed with hbar * J0, hbar on a grid;
* ``build_rotation_family``: the almost-Mathieu style theta-family of rotation algebras;
* ``build_tsu2_disk``: functions on T x SU(2) restricted to the orbits of the action
  (eta; z, w) -> (e^{-2 pi i x} eta; z, e^{4 pi i y} w), parametrized by the closed unit disk.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .cocycle import PHASE_CONSTANT, PhaseCocycle, build_cocycle, rotation_cocycle
from .fields import BaseSample, CovariantFieldSpec, FiberSpec
from .torus import CharacterAction, SkewForm, TrigPoly

__all__ = [
    "almost_mathieu",
    "semiclassical_action",
    "build_hbar_family",
    "build_rotation_family",
    "SU2Poly",
    "restrict_su2",
    "su2_deformed_mul",
    "su2_act",
    "TSU2_INTERIOR_ACTION",
    "TSU2_BOUNDARY_ACTION",
    "build_tsu2_disk",
    "disk_samples",
]


def almost_mathieu(coupling: float = 1.0) -> TrigPoly:
    """h = e_(1,0) + e_(-1,0) + coupling (e_(0,1) + e_(0,-1)); classical sup norm 2 + 2 coupling."""
    return TrigPoly(2, {(1, 0): 1.0, (-1, 0): 1.0, (0, 1): coupling, (0, -1): coupling})


def semiclassical_action() -> CharacterAction:
    """Translation action on T^2 normalized so that hbar * J0 has rotation number -hbar / 2.

    With the Darboux form and the phase constant 2 pi^2, translations at speed
    s give theta = -2 pi s^2 hbar (mod 1); s = 1 / (2 sqrt(pi)) maps hbar in
    [0, 1] onto |theta| in [0, 1/2].  The sign is the orientation of J0 and
    does not affect the norm of the almost-Mathieu element.
    """
    return CharacterAction.identity(2, scale=1.0 / (2.0 * math.sqrt(math.pi)))


def _label(name: str, x: float) -> str:
    return f"{name}={x:.12g}"


def _chain(ids: Sequence[str], coords: Sequence[float]) -> list[BaseSample]:
    out = []
    for i, (t, x) in enumerate(zip(ids, coords)):
        adj = []
        if i > 0:
            adj.append((ids[i - 1], abs(x - coords[i - 1])))
        if i + 1 < len(ids):
            adj.append((ids[i + 1], abs(coords[i + 1] - x)))
        out.append(BaseSample(t, (float(x),), tuple(adj)))
    return out


def build_hbar_family(f: TrigPoly, J0: SkewForm, A: CharacterAction, hbars: Iterable[float],
                      kappa: float = PHASE_CONSTANT) -> CovariantFieldSpec:
    """Constant element over hbar samples; the fiber at hbar has B = hbar * kappa * J0^{-1}."""
    hbars = sorted(set(float(h) for h in hbars))
    if not hbars:
        raise ValueError("need at least one hbar value")
    if hbars[0] < 0:
        raise ValueError("hbar must be nonnegative")
    if f.dim != A.torus_dim:
        raise ValueError("element and action live on tori of different dimension")
    ids = [_label("hbar", h) for h in hbars]
    fibers = [FiberSpec(t, build_cocycle(J0, A, kappa * h)) for t, h in zip(ids, hbars)]
    return CovariantFieldSpec(_chain(ids, hbars), fibers, {"f": {t: f for t in ids}})


def build_rotation_family(f: TrigPoly, thetas: Iterable[float] | int) -> CovariantFieldSpec:
    """Rotation algebras A_theta over a sorted theta grid in [0, 1].

    An integer argument n means the uniform grid of n points on [0, 1].
    """
    if f.dim != 2:
        raise ValueError("the rotation family lives on the 2-torus")
    if isinstance(thetas, int):
        thetas = [Fraction(i, thetas - 1) for i in range(thetas)]
    thetas = [float(t) for t in thetas]
    if any(b <= a for a, b in zip(thetas, thetas[1:])):
        raise ValueError("theta grid must be strictly increasing")
    ids = [_label("theta", t) for t in thetas]
    fibers = [FiberSpec(t, rotation_cocycle(th)) for t, th in zip(ids, thetas)]
    return CovariantFieldSpec(_chain(ids, thetas), fibers, {"f": {t: f for t in ids}})


# ----------------------------------------------------------------------------
# T x SU(2)


class SU2Poly:
    """Polynomial sum c eta^m z^p zbar^q w^r wbar^s on T x S^3.

    Keys are (m, p, q, r, s) with m any integer and p, q, r, s >= 0.  The
    relation |z|^2 + |w|^2 = 1 makes representatives non-unique, so equality
    of functions is decided through restrictions (see :meth:`equals`).
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        table: dict[tuple[int, ...], complex] = {}
        for key, c in items:
            key = tuple(int(x) for x in key)
            if len(key) != 5 or min(key[1:]) < 0:
                raise ValueError(f"bad SU2Poly index {key}")
            table[key] = table.get(key, 0j) + complex(c)
        self.terms = {k: c for k, c in table.items() if c != 0}

    @classmethod
    def monomial(cls, m=0, p=0, q=0, r=0, s=0, coeff: complex = 1.0) -> "SU2Poly":
        return cls({(m, p, q, r, s): coeff})

    @classmethod
    def eta(cls) -> "SU2Poly":
        return cls.monomial(m=1)

    @classmethod
    def z(cls) -> "SU2Poly":
        return cls.monomial(p=1)

    @classmethod
    def w(cls) -> "SU2Poly":
        return cls.monomial(r=1)

    @classmethod
    def constant(cls, c: complex) -> "SU2Poly":
        return cls.monomial(coeff=c)

    def __add__(self, other):
        if not isinstance(other, SU2Poly):
            other = SU2Poly.constant(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0j) + c
        return SU2Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return SU2Poly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, SU2Poly):
            return SU2Poly({k: complex(other) * c for k, c in self.terms.items()})
        out: dict[tuple[int, ...], complex] = {}
        for k, c in self.terms.items():
            for l, d in other.terms.items():
                kl = tuple(a + b for a, b in zip(k, l))
                out[kl] = out.get(kl, 0j) + c * d
        return SU2Poly(out)

    __rmul__ = __mul__

    def star(self) -> "SU2Poly":
        """Complex conjugate function: eta -> eta^{-1}, z <-> zbar, w <-> wbar."""
        return SU2Poly({(-m, q, p, s, r): c.conjugate() for (m, p, q, r, s), c in self.terms.items()})

    def __call__(self, eta: complex, z: complex, w: complex) -> complex:
        return sum(c * eta ** m * z ** p * z.conjugate() ** q * w ** r * w.conjugate() ** s
                   for (m, p, q, r, s), c in self.terms.items())

    def equals(self, other: "SU2Poly", radii=(0.0, 0.3, 0.7, 0.95, 1.0), angles: int = 5,
               tol: float = 1e-12) -> bool:
        """Equality as functions, tested on the restrictions to a set of orbits."""
        for r in radii:
            for j in range(angles):
                z0 = r * cmath.exp(2j * math.pi * j / angles)
                a, b = restrict_su2(self, z0), restrict_su2(other, z0)
                if a.max_abs_diff(b) > tol:
                    return False
        return True

    def __repr__(self) -> str:
        return f"SU2Poly({self.terms!r})"


def _orbit_radius(z0: complex) -> tuple[bool, float]:
    rho = abs(z0)
    if rho > 1.0 + 1e-12:
        raise ValueError(f"|z0| = {rho} exceeds 1")
    boundary = rho >= 1.0 - 1e-12
    return boundary, 0.0 if boundary else math.sqrt(1.0 - rho * rho)


def restrict_su2(f: SU2Poly, z0: complex) -> TrigPoly:
    """Restriction of f to the orbit through (1, z0, sqrt(1 - |z0|^2)).

    The orbit is parametrized by (alpha, beta) with eta = e^{2 pi i alpha},
    w = w0 e^{2 pi i beta}; a monomial lands on the character (m, r - s) with
    coefficient c z0^p conj(z0)^q w0^{r+s}.  On |z0| = 1 the orbit is a circle
    and only the w-free terms survive.
    """
    z0 = complex(z0)
    boundary, w0 = _orbit_radius(z0)
    out: dict[tuple[int, ...], complex] = {}
    for (m, p, q, r, s), c in f.terms.items():
        if boundary:
            if r or s:
                continue
            key: tuple[int, ...] = (m,)
            val = c * z0 ** p * z0.conjugate() ** q
        else:
            key = (m, r - s)
            val = c * z0 ** p * z0.conjugate() ** q * w0 ** (r + s)
        out[key] = out.get(key, 0j) + val
    return TrigPoly(1 if boundary else 2, out)


#: Lattice-to-frequency maps read off the action: alpha -> alpha - x, beta -> beta + 2 y.
TSU2_INTERIOR_ACTION = CharacterAction([[-1.0, 0.0], [0.0, 2.0]])
TSU2_BOUNDARY_ACTION = CharacterAction([[-1.0, 0.0]])


def _su2_freq(key: tuple[int, ...]) -> np.ndarray:
    m, _, _, r, s = key
    return np.array([-m, 2 * (r - s)], dtype=float)


def su2_act(f: SU2Poly, X) -> SU2Poly:
    """Global action (eta; z, w) -> (e^{-2 pi i x} eta; z, e^{4 pi i y} w) at X = (x, y)."""
    X = np.asarray(X, dtype=float)
    return SU2Poly({k: c * np.exp(2j * np.pi * float(_su2_freq(k) @ X)) for k, c in f.terms.items()})


def su2_deformed_mul(f: SU2Poly, g: SU2Poly, B) -> SU2Poly:
    """Global deformed product on T x S^3: monomials are eigenvectors of the action.

    Representatives are multiplied term by term with the phase
    exp(i freq(a)^T B freq(b)); the result is well defined on functions because
    the relation |z|^2 + |w|^2 is invariant (frequency zero).
    """
    B = np.asarray(B, dtype=float)
    out: dict[tuple[int, ...], complex] = {}
    for k, c in f.terms.items():
        for l, d in g.terms.items():
            kl = tuple(a + b for a, b in zip(k, l))
            out[kl] = out.get(kl, 0j) + c * d * np.exp(1j * float(_su2_freq(k) @ B @ _su2_freq(l)))
    return SU2Poly(out)


def disk_samples(n_radial: int, n_angular: int) -> list[tuple[str, complex]]:
    """Polar grid of the closed unit disk: the center plus rings i / n_radial, i = 1..n_radial."""
    pts = [("r=0", 0j)]
    for i in range(1, n_radial + 1):
        r = i / n_radial
        for j in range(n_angular):
            a = j / n_angular
            pts.append((f"r={r:.12g},a={a:.12g}", r * cmath.exp(2j * math.pi * a)))
    return pts


def _disk_adjacency(n_radial: int, n_angular: int, pts: dict[str, complex]) -> dict[str, list]:
    def rid(i, j):
        if i == 0:
            return "r=0"
        return f"r={i / n_radial:.12g},a={(j % n_angular) / n_angular:.12g}"

    adj: dict[str, dict[str, float]] = {t: {} for t in pts}

    def link(a, b):
        if a != b:
            d = abs(pts[a] - pts[b])
            adj[a][b] = d
            adj[b][a] = d

    for i in range(1, n_radial + 1):
        for j in range(n_angular):
            link(rid(i, j), rid(i - 1, j))
            link(rid(i, j), rid(i, j + 1))
    return {t: sorted(nb.items()) for t, nb in adj.items()}


def build_tsu2_disk(f: SU2Poly, n_radial: int, n_angular: int, J: SkewForm | None = None,
                    scale: float = 1.0, kappa: float = PHASE_CONSTANT) -> CovariantFieldSpec:
    """Field over the closed unit disk of orbits of T x SU(2).

    Interior samples carry 2-tori with the deformation ``scale * kappa * J^{-1}``;
    boundary samples carry circles, on which the induced lattice cocycle is
    trivial, so those fibers are classical.
    """
    if n_radial < 2 or n_angular < 2:
        raise ValueError("polar grid needs at least 2 radial and 2 angular points")
    J = SkewForm.standard(1) if J is None else J
    interior = build_cocycle(J, TSU2_INTERIOR_ACTION, kappa * scale)
    boundary = PhaseCocycle(interior.B, TSU2_BOUNDARY_ACTION)
    pts = dict(disk_samples(n_radial, n_angular))
    adj = _disk_adjacency(n_radial, n_angular, pts)
    base, fibers, element = [], [], {}
    for t, z0 in pts.items():
        on_boundary, _ = _orbit_radius(z0)
        base.append(BaseSample(t, (z0.real, z0.imag), tuple(adj[t])))
        fibers.append(FiberSpec(t, boundary if on_boundary else interior))
        element[t] = restrict_su2(f, z0)
    return CovariantFieldSpec(base, fibers, {"f": element})
