"""Two-sided bounds on the C*-norm of the deformed algebra.

The deformed algebra of trigonometric polynomials is the twisted group
algebra of Z^d for the lattice cocycle c(k, l); its norm is the norm in the
left c-twisted regular representation on l^2(Z^d).

* lower bounds: largest singular value of the compression of that
  representation to the box [-N, N]^d;
* upper bounds: l^1 norm, refined by the C*-identity
  ||f||^{2^{m+1}} = ||(f* # f)^{2^m}|| <= ||(f* # f)^{2^m}||_1;
* exact values for rational rotation numbers from the finite-dimensional
  clock-and-shift representations.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np
import scipy.sparse as sp

from .cocycle import PhaseCocycle, deformed_mul
from .torus import DimensionError, TrigPoly, involution, sup_estimate

__all__ = [
    "BracketError",
    "SupportBlowup",
    "NormBracket",
    "box_points",
    "rep_matrix",
    "norm_lower",
    "norm_upper",
    "norm_bracket",
    "exact_rational_norm",
    "sup_norm",
]

log = logging.getLogger(__name__)

DENSE_LIMIT = 1000
SUPPORT_CAP = 4_000_000
#: relative inflation of power-trick values so that float roundoff never undercuts the norm
UPPER_SLACK = 1e-12


class BracketError(ArithmeticError):
    """A lower bound exceeded an upper bound by more than roundoff."""


class SupportBlowup(RuntimeError):
    """Intermediate support of a power computation exceeded the configured cap."""


@dataclass(frozen=True)
class NormBracket:
    lower: float
    upper: float
    lower_method: str = ""
    upper_method: str = ""
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.lower < 0:
            raise BracketError(f"negative lower bound {self.lower}")
        if self.lower > self.upper:
            raise BracketError(f"empty bracket [{self.lower!r}, {self.upper!r}]")

    @classmethod
    def combine(cls, lowers: dict[str, float], uppers: dict[str, float], params=None,
                rtol: float = 1e-12) -> "NormBracket":
        """Best lower and best upper; roundoff-level inversions are collapsed."""
        lm, lo = max(lowers.items(), key=lambda kv: kv[1])
        um, up = min(uppers.items(), key=lambda kv: kv[1])
        lo = max(lo, 0.0)
        if lo > up:
            if lo - up > rtol * max(1.0, up):
                raise BracketError(f"lower bound {lm}={lo!r} exceeds upper bound {um}={up!r}")
            up = lo
        return cls(lo, up, lm, um, dict(params or {}))

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= x <= self.upper + tol

    def gap(self, other: "NormBracket") -> float:
        """Distance between the two intervals (0 when they overlap)."""
        return max(0.0, self.lower - other.upper, other.lower - self.upper)

    def overlaps(self, other: "NormBracket", tol: float = 0.0) -> bool:
        return self.gap(other) <= tol

    def squared(self) -> "NormBracket":
        """Bracket for ||f||^2 = ||f* # f||."""
        return NormBracket(self.lower ** 2, self.upper ** 2, self.lower_method, self.upper_method,
                           dict(self.params))

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "lower_method": self.lower_method,
                "upper_method": self.upper_method, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, data: dict) -> "NormBracket":
        return cls(float(data["lower"]), float(data["upper"]), data.get("lower_method", ""),
                   data.get("upper_method", ""), dict(data.get("params", {})))


# ----------------------------------------------------------------------------
# truncated twisted regular representation


def box_points(d: int, N: int) -> np.ndarray:
    """Lattice points of [-N, N]^d in lexicographic order, shape ((2N+1)^d, d)."""
    return np.array(list(product(range(-N, N + 1), repeat=d)), dtype=int).reshape(-1, d)


def _box_index(pts: np.ndarray, N: int) -> np.ndarray:
    side = 2 * N + 1
    idx = np.zeros(pts.shape[0], dtype=np.int64)
    for j in range(pts.shape[1]):
        idx = idx * side + (pts[:, j] + N)
    return idx


def _check(f: TrigPoly, C: PhaseCocycle) -> None:
    if f.dim != C.torus_dim:
        raise DimensionError(f"element on T^{f.dim} but cocycle on T^{C.torus_dim}")


def rep_operator(f: TrigPoly, C: PhaseCocycle, N: int) -> sp.csr_matrix:
    """Sparse compression P_N pi(f) P_N with (pi(e_k) xi)(m) = c(k, m - k) xi(m - k)."""
    _check(f, C)
    if N < 0:
        raise ValueError("box radius must be nonnegative")
    if f.degree > N:
        log.warning("box radius %d smaller than element degree %d", N, f.degree)
    d = f.dim
    pts = box_points(d, N)
    rows, cols, vals = [], [], []
    for k, c in f:
        k = np.array(k)
        src = pts - k
        ok = np.all(np.abs(src) <= N, axis=1)
        m, s = pts[ok], src[ok]
        phase = np.ones(len(s), dtype=complex) if C.is_classical else C(k, s)
        rows.append(_box_index(m, N))
        cols.append(_box_index(s, N))
        vals.append(c * phase)
    dim = pts.shape[0]
    if not rows:
        return sp.csr_matrix((dim, dim), dtype=complex)
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=(dim, dim))


def rep_matrix(f: TrigPoly, C: PhaseCocycle, N: int) -> np.ndarray:
    """Dense matrix of the truncated representation (see :func:`rep_operator`)."""
    return rep_operator(f, C, N).toarray()


def norm_lower(f: TrigPoly, C: PhaseCocycle, N: int, dense_limit: int = DENSE_LIMIT) -> float:
    """Largest singular value of the compression to [-N, N]^d; a lower bound on ||f||.

    Above ``dense_limit`` the top singular vector is found by Lanczos and the
    returned value is the Rayleigh quotient ||A x|| / ||x|| of that vector,
    which stays a lower bound whether or not the iteration fully converged.
    """
    A = rep_operator(f, C, N)
    if A.nnz == 0:
        return 0.0
    if A.shape[0] <= dense_limit:
        return float(np.linalg.norm(A.toarray(), 2))
    x = _top_right_singular_vector(A)
    return float(np.linalg.norm(A @ x) / np.linalg.norm(x))


def _top_right_singular_vector(A: sp.csr_matrix, max_steps: int = 400,
                               rtol: float = 1e-14) -> np.ndarray:
    """Top Ritz vector of A^H A from Lanczos with full reorthogonalization.

    Clustered top singular values (small rotation numbers) stall per-vector
    convergence tests such as ARPACK's, but the extreme Ritz value still converges
    quickly; iteration stops once it is stable to ``rtol``.
    """
    n = A.shape[0]
    AH = A.conj().T.tocsr()
    rng = np.random.default_rng(0)
    q = rng.normal(size=n) + 1j * rng.normal(size=n)
    q /= np.linalg.norm(q)
    alphas: list[float] = []
    betas: list[float] = []
    Qm = np.zeros((min(max_steps, n) + 1, n), dtype=complex)
    Qm[0] = q
    history: list[float] = []
    for step in range(min(max_steps, n)):
        w = AH @ (A @ Qm[step])
        alphas.append(float(np.vdot(Qm[step], w).real))
        block = Qm[:step + 1]
        for _ in range(2):
            w = w - block.T @ (block.conj() @ w)
        beta = float(np.linalg.norm(w))
        last = step == min(max_steps, n) - 1
        if step % 8 == 7 or last or beta <= rtol * max(alphas):
            T = np.diag(alphas) + np.diag(betas, 1) + np.diag(betas, -1)
            vals, vecs = np.linalg.eigh(T)
            history.append(vals[-1])
            # stop once the top Ritz value is stable over two checkpoints
            stable = len(history) >= 3 and abs(history[-1] - history[-3]) <= rtol * abs(history[-1])
            if stable or last or beta <= rtol * abs(vals[-1]):
                return Qm[:step + 1].T @ vecs[:, -1]
        betas.append(beta)
        Qm[step + 1] = w / beta
    raise AssertionError("unreachable")


# ----------------------------------------------------------------------------
# l1 / power-trick upper bounds


def _dense_twisted_left(ks: np.ndarray, cs: np.ndarray, Q: np.ndarray | None,
                        B: np.ndarray, R: int, deg: int) -> tuple[np.ndarray, int]:
    """(sum_k c_k e_k) # B for dense B on [-R, R]^d; result lives on [-(R+deg), R+deg]^d."""
    d = B.ndim
    R2 = R + deg
    out = np.zeros((2 * R2 + 1,) * d, dtype=complex)
    lat = np.arange(-R, R + 1, dtype=float)
    for k, c in zip(ks, cs):
        term = c * B
        if Q is not None:
            v = k @ Q  # c(k, l) = exp(i v.l)
            for ax in range(d):
                shape = [1] * d
                shape[ax] = -1
                term = term * np.exp(1j * v[ax] * lat).reshape(shape)
        sl = tuple(slice(deg + kj, deg + kj + 2 * R + 1) for kj in k)
        out[sl] += term
    return out, R2


def norm_upper(f: TrigPoly, C: PhaseCocycle, power_doublings: int = 0,
               support_cap: int = SUPPORT_CAP) -> float:
    """(||(f* # f)^{2^m}||_1)^{1 / 2^{m+1}}, an upper bound on ||f|| nonincreasing in m.

    The value is inflated by the relative slack ``UPPER_SLACK`` to absorb roundoff.
    """
    _check(f, C)
    m = int(power_doublings)
    if m < 0:
        raise ValueError("power_doublings must be nonnegative")
    if not f:
        return 0.0
    a = deformed_mul(involution(f), f, C)
    if m == 0:
        return math.sqrt(a.l1_norm()) * (1 + UPPER_SLACK)
    ks, cs = a.arrays()
    deg = a.degree
    Q = None if C.is_classical else C.lattice_form
    n_factors = 2 ** m
    final_radius = deg * n_factors
    if (2 * final_radius + 1) ** f.dim > support_cap:
        raise SupportBlowup(
            f"(f* # f)^{n_factors} needs {(2 * final_radius + 1) ** f.dim} coefficients "
            f"(cap {support_cap})")
    P, R = a.dense(deg), deg
    log_l1 = 0.0
    for _ in range(n_factors - 1):
        s = np.abs(P).sum()
        if s == 0:
            return 0.0
        log_l1 += math.log(s)
        P, R = _dense_twisted_left(ks, cs, Q, P / s, R, deg)
    s = np.abs(P).sum()
    if s == 0:
        return 0.0
    log_l1 += math.log(s)
    return math.exp(log_l1 / (2 * n_factors)) * (1 + UPPER_SLACK)


def sup_norm(f: TrigPoly, grid: int = 1024) -> NormBracket:
    """Certified bracket for the sup norm of a classical element."""
    lo, up = sup_estimate(f, grid)
    return NormBracket.combine({"grid_max": lo}, {"l1": f.l1_norm(), "grid_max+lipschitz": up},
                               {"grid": grid})


def norm_bracket(f: TrigPoly, C: PhaseCocycle, N: int = 16, power_doublings: int = 4,
                 grid: int = 1024, support_cap: int = SUPPORT_CAP) -> NormBracket:
    """Combine truncated-representation lower bounds with the l1 and power-trick upper bounds.

    Classical cocycles also contribute the certified sup-norm bracket.
    """
    _check(f, C)
    params = {"N": N, "power_doublings": power_doublings}
    lowers = {"truncated_rep": norm_lower(f, C, N)}
    uppers = {"l1": f.l1_norm()}
    m = power_doublings
    while m >= 0:
        try:
            uppers["power_trick"] = norm_upper(f, C, m, support_cap)
            params["power_doublings"] = m
            break
        except SupportBlowup:
            log.info("power trick with m=%d exceeds the support cap, retrying with m=%d", m, m - 1)
            m -= 1
    if C.is_classical:
        lo, up = sup_estimate(f, grid)
        lowers["grid_max"] = lo
        uppers["grid_max+lipschitz"] = up
        params["grid"] = grid
    return NormBracket.combine(lowers, uppers, params)


# ----------------------------------------------------------------------------
# rational rotation numbers


def _clock_shift_terms(f: TrigPoly, phase01: float, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Matrices exp(-i phase01 k1 k2) D^{k1} S^{k2} for the support of f (q x q each)."""
    omega = np.exp(2j * phase01 * np.arange(q))  # clock: exp(2 i phase01) = exp(2 pi i theta)
    ks, cs = f.arrays()
    mats = np.empty((len(cs), q, q), dtype=complex)
    idx = np.arange(q)
    for i, (k1, k2) in enumerate(ks):
        shift = np.zeros((q, q))
        shift[(idx + k2) % q, idx] = 1.0
        mats[i] = np.exp(-1j * phase01 * k1 * k2) * (omega ** k1)[:, None] * shift
    return ks, mats * cs[:, None, None]


def exact_rational_norm(f: TrigPoly, theta, grid: int = 256, cocycle: PhaseCocycle | None = None,
                        chunk: int = 1 << 14) -> NormBracket:
    """Norm of f in the rational rotation algebra via its q x q fiber representations.

    The irreducible representations are U -> e^{2 pi i u} clock, V -> e^{2 pi i v} shift,
    and the fiber norm is 1/q-periodic in u and v, so (u, v) runs over a grid x grid
    mesh of [0, 1/q)^2.  The grid maximum is a lower bound; adding the Lipschitz term
    2 pi sum |c_k| |k|_1 / (q grid) gives the upper bound.
    """
    if f.dim != 2:
        raise DimensionError("exact rational norms are for elements on the 2-torus")
    theta = Fraction(theta).limit_denominator(10 ** 6)
    p, q = theta.numerator, theta.denominator
    if cocycle is None:
        phase01 = math.pi * float(theta)
    else:
        if cocycle.torus_dim != 2:
            raise DimensionError("cocycle is not on the 2-torus")
        phase01 = float(cocycle.lattice_form[0, 1])
        if abs(np.exp(2j * phase01) - np.exp(2j * np.pi * p / q)) > 1e-9:
            raise ValueError(
                f"cocycle has rotation number {cocycle.effective_theta():.12g}, not {p}/{q}")
    if not f:
        return NormBracket(0.0, 0.0, "clock_shift_grid", "clock_shift_grid+lipschitz")
    ks, mats = _clock_shift_terms(f, phase01, q)
    s = np.arange(grid) / (q * grid)
    uu, vv = np.meshgrid(s, s, indexing="ij")
    uv = np.stack([uu.ravel(), vv.ravel()], axis=1)
    best = 0.0
    flat = mats.reshape(len(mats), -1)
    rows = max(1, chunk // max(1, q * q))
    for start in range(0, uv.shape[0], rows):
        w = np.exp(2j * np.pi * uv[start:start + rows] @ ks.T.astype(float))
        F = (w @ flat).reshape(-1, q, q)
        best = max(best, float(np.linalg.norm(F, 2, axis=(1, 2)).max()))
    if len(f) == 1:
        best = abs(next(iter(f.coeffs.values())))
    cert = 2.0 * math.pi * f.lipschitz_weight() / (q * grid)
    return NormBracket(best, best + cert, "clock_shift_grid", "clock_shift_grid+lipschitz",
                       {"theta": f"{p}/{q}", "grid": grid})
