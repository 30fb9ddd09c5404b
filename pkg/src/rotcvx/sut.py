"""Orthogonal matrices with prescribed strictly upper triangular entries.

For sigma in the interior of the SUT projection of the operator-norm ball,
the orthogonal matrices whose entries above the diagonal equal sigma form a
finite set of 2^n matrices X_rho(sigma), one per sign pattern rho.  Each is
built column by column from the bottom-right corner: given the trailing
block, the next column is pinned down up to the sign of one scalar, and
rho_i = +1 picks the larger diagonal entry.  The i-th diagonal entry takes
only two values alpha_i < beta_i across the whole fiber and
det X_rho = prod(rho).

Linear objectives on the diagonal over such a fiber are then solved by
picking signs coordinatewise.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DimensionMismatch,
    DimensionTooLarge,
    NonFinite,
    NotFound,
    NotInterior,
    RankDeficient,
    SingularBlock,
    TooManyVectors,
)
from .linalg import DEFAULT_TOL, ToleranceConfig, project_op_ball

__all__ = [
    "sut_length",
    "sut_dimension",
    "project_sut",
    "complete_first_column",
    "construct_x_rho",
    "DiagBounds",
    "diag_bounds",
    "fiber_enumerate",
    "OrthOpt",
    "SpecialOpt",
    "sut_opt_orth",
    "sut_opt_special",
    "reduce_low_rank",
    "RankOneConstraint",
    "LowRankResult",
    "feasibility_low_rank",
]

MAX_FIBER_N = 12


def sut_length(n: int) -> int:
    return n * (n - 1) // 2


def sut_dimension(length: int) -> int:
    """n with n(n-1)/2 == length."""
    n = int(round((1 + math.sqrt(1 + 8 * length)) / 2))
    if sut_length(n) != length:
        raise DimensionMismatch(f"{length} is not of the form n(n-1)/2")
    return n


def _as_sigma(sigma, n: int | None = None) -> np.ndarray:
    s = np.asarray(sigma, dtype=float).reshape(-1)
    if not np.all(np.isfinite(s)):
        raise NonFinite("sigma has non-finite entries")
    if n is not None and s.size != sut_length(n):
        raise DimensionMismatch(f"sigma must have {sut_length(n)} entries for n={n}")
    return s


def _as_rho(rho, n: int) -> np.ndarray:
    r = np.asarray(rho, dtype=float).reshape(-1)
    if r.size != n or not np.all(np.isin(r, (-1.0, 1.0))):
        raise ValueError(f"rho must be a length-{n} vector of +1/-1")
    return r


def project_sut(x) -> np.ndarray:
    """Entries above the diagonal in row-major order (1,2), (1,3), ..., (n-1,n)."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionMismatch("expected a square matrix")
    return x[np.triu_indices(x.shape[0], k=1)]


def _sut_rows(s: np.ndarray, n: int):
    rows, k = [], 0
    for m in range(n - 1):
        rows.append(s[k : k + n - 1 - m])
        k += n - 1 - m
    return rows


def _sm_update(ginv: np.ndarray, x: np.ndarray, tol: float):
    """Inverse of (G - x x^T) from G^{-1} by Sherman-Morrison."""
    y = ginv @ x
    den = 1.0 - float(x @ y)
    if not den > tol:
        raise NotInterior("reduced Gram matrix is not positive definite")
    return ginv + np.outer(y, y) / den


def _trailing_inverse(pinv: np.ndarray) -> np.ndarray:
    """Inverse of G[1:, 1:] from P = G^{-1}."""
    return pinv[1:, 1:] - np.outer(pinv[1:, 0], pinv[0, 1:]) / pinv[0, 0]


def _solve_column(x, u22, g11, p, q, rho, tol):
    """First column u with [u | U~] having the prescribed Gram, U~ = [x; u22].

    u = u0 + t z, where u0 = U~ p is the particular solution of U~^T u = G21
    and z = (1, -u22 q) spans the kernel of U~^T.  t solves |u|^2 = G11.
    """
    u0 = np.concatenate(([x @ p], u22 @ p)) if x.size else np.zeros(1)
    z = np.concatenate(([1.0], -(u22 @ q))) if x.size else np.ones(1)
    a = float(z @ z)
    b = 2.0 * float(u0 @ z)
    c = float(u0 @ u0) - g11
    disc = b * b - 4.0 * a * c
    if not disc > tol:
        raise NotInterior("quadratic for the completed column has no two distinct roots")
    t = (-b + rho * math.sqrt(disc)) / (2.0 * a)
    return u0 + t * z


def complete_first_column(u_tilde, gram, gram22_inv=None, tol: float = DEFAULT_TOL.tol_interior):
    """The two first columns u completing ``u_tilde`` to an orthogonal-like
    matrix [u | u_tilde] with Gram matrix ``gram``.

    ``u_tilde`` is n x (n-1) with u_tilde^T u_tilde = gram[1:, 1:] and an
    invertible bottom block.  Returns (u_plus, u_minus); u_plus has the
    larger first coordinate.  Given ``gram22_inv`` the work is O(n^2).
    """
    u_tilde = np.asarray(u_tilde, dtype=float)
    gram = np.asarray(gram, dtype=float)
    n = gram.shape[0]
    if u_tilde.shape != (n, n - 1):
        raise DimensionMismatch("u_tilde must be n x (n-1)")
    if gram22_inv is None:
        try:
            gram22_inv = np.linalg.inv(gram[1:, 1:]) if n > 1 else np.zeros((0, 0))
        except np.linalg.LinAlgError as exc:
            raise SingularBlock("gram[1:, 1:] is singular") from exc
    x, u22 = u_tilde[0], u_tilde[1:]
    if n > 1 and abs(np.linalg.det(u22)) < 1e-14:
        raise SingularBlock("bottom block of u_tilde is singular")
    p = gram22_inv @ gram[1:, 0]
    s = gram[0, 0] - gram[1:, 0] @ p
    if not s > tol:
        raise NotInterior("Schur complement is not positive")
    q = _sm_update(gram22_inv, x, tol) @ x if n > 1 else np.zeros(0)
    return (_solve_column(x, u22, gram[0, 0], p, q, 1.0, tol),
            _solve_column(x, u22, gram[0, 0], p, q, -1.0, tol))


@dataclass(frozen=True)
class _Level:
    g11: float
    p: np.ndarray
    q: np.ndarray


class _Fiber:
    """Top-down pass shared by every sign pattern of one sigma."""

    def __init__(self, sigma, n: int | None = None, tol: ToleranceConfig = DEFAULT_TOL):
        s = _as_sigma(sigma)
        self.n = n if n is not None else sut_dimension(s.size)
        if s.size != sut_length(self.n):
            raise DimensionMismatch(f"sigma must have {sut_length(self.n)} entries")
        self.tol = tol.tol_interior
        self.rows = _sut_rows(s, self.n)
        self.levels: list[_Level] = []
        g = np.eye(self.n)
        ginv22 = np.eye(self.n - 1)
        for x in self.rows:
            g21 = g[1:, 0]
            p = ginv22 @ g21
            schur = g[0, 0] - g21 @ p
            if not schur > self.tol:
                raise NotInterior("sigma is not in the interior of the fiber domain")
            gp_inv = _sm_update(ginv22, x, self.tol)
            self.levels.append(_Level(float(g[0, 0]), p, gp_inv @ x))
            g = g[1:, 1:] - np.outer(x, x)
            ginv22 = _trailing_inverse(gp_inv) if g.shape[0] > 1 else np.zeros((0, 0))
        if not g[0, 0] > self.tol:
            raise NotInterior("sigma is not in the interior of the fiber domain")
        self.g_last = float(g[0, 0])

    def assemble(self, rho) -> np.ndarray:
        n = self.n
        rho = _as_rho(rho, n)
        x = np.zeros((n, n))
        x[n - 1, n - 1] = rho[n - 1] * math.sqrt(self.g_last)
        for m in range(n - 2, -1, -1):
            lv = self.levels[m]
            row = self.rows[m]
            u = _solve_column(row, x[m + 1 :, m + 1 :], lv.g11, lv.p, lv.q, rho[m], self.tol)
            x[m, m + 1 :] = row
            x[m:, m] = u
        return x


def construct_x_rho(sigma, rho, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """The orthogonal matrix with SUT entries ``sigma`` and diagonal signs ``rho``.

    rho_i = +1 selects the larger of the two admissible values of X_ii;
    det(X) = prod(rho).  Raises NotInterior when sigma is not interior.
    """
    fiber = _Fiber(sigma, tol=tol)
    return fiber.assemble(rho)


class DiagBounds(NamedTuple):
    alpha: np.ndarray
    beta: np.ndarray


def _bounds(fiber: _Fiber) -> DiagBounds:
    n = fiber.n
    return DiagBounds(np.diag(fiber.assemble(-np.ones(n))).copy(),
                      np.diag(fiber.assemble(np.ones(n))).copy())


def diag_bounds(sigma, tol: ToleranceConfig = DEFAULT_TOL) -> DiagBounds:
    """The two values alpha_i < beta_i that X_ii takes across the fiber."""
    return _bounds(_Fiber(sigma, tol=tol))


def fiber_enumerate(sigma, tol: ToleranceConfig = DEFAULT_TOL) -> list[np.ndarray]:
    """All 2^n orthogonal matrices with SUT entries ``sigma`` (n <= 12)."""
    s = _as_sigma(sigma)
    n = sut_dimension(s.size)
    if n > MAX_FIBER_N:
        raise DimensionTooLarge(f"fiber enumeration is limited to n <= {MAX_FIBER_N}")
    fiber = _Fiber(s, n, tol)
    return [fiber.assemble(r) for r in itertools.product((1.0, -1.0), repeat=n)]


class OrthOpt(NamedTuple):
    matrix: np.ndarray
    value: float


class SpecialOpt(NamedTuple):
    matrix: np.ndarray
    value: float
    gap_bound: float


def _check_a(a_diag, n):
    a = np.asarray(a_diag, dtype=float).reshape(-1)
    if a.size != n:
        raise DimensionMismatch(f"a_diag must have length {n}")
    if not np.all(np.isfinite(a)):
        raise NonFinite("a_diag has non-finite entries")
    return a


def sut_opt_orth(sigma, a_diag, tol: ToleranceConfig = DEFAULT_TOL) -> OrthOpt:
    """Maximize sum_i a_i X_ii over orthogonal X with SUT entries sigma.

    The optimum also equals the maximum over the operator-norm ball.
    """
    fiber = _Fiber(sigma, tol=tol)
    a = _check_a(a_diag, fiber.n)
    rho = np.where(a >= 0, 1.0, -1.0)
    x = fiber.assemble(rho)
    return OrthOpt(x, float(a @ np.diag(x)))


def sut_opt_special(sigma, a_diag, tol: ToleranceConfig = DEFAULT_TOL) -> SpecialOpt:
    """Maximize sum_i a_i X_ii over rotations X with SUT entries sigma.

    Signs are chosen greedily; if their product is -1 the coordinate whose
    flip costs least, |a_i| (beta_i - alpha_i), is flipped.  ``gap_bound`` is
    the distance to the orthogonal (relaxation) optimum.
    """
    fiber = _Fiber(sigma, tol=tol)
    n = fiber.n
    a = _check_a(a_diag, n)
    alpha, beta = _bounds(fiber)
    rho = np.where(a >= 0, 1.0, -1.0)
    relax = float(np.sum(np.where(rho > 0, a * beta, a * alpha)))
    if np.prod(rho) < 0:
        i = int(np.argmin(np.abs(a) * (beta - alpha)))
        rho[i] = -rho[i]
    x = fiber.assemble(rho)
    value = float(a @ np.diag(x))
    return SpecialOpt(x, value, relax - value)


def _as_vectors(vs, name):
    arr = [np.asarray(v, dtype=float).reshape(-1) for v in vs]
    if arr and not all(np.all(np.isfinite(v)) for v in arr):
        raise NonFinite(f"{name} has non-finite entries")
    return arr


def reduce_low_rank(us, vs, tol: float = 1e-10):
    """Rotations U, V such that U u_i is supported on the first i+1
    coordinates and V v_i on coordinates i+1..n-1 (0-based).

    Writing X = U^T Y V, each u_i^T X v_i = <(U u_i)(V v_i)^T, Y> then reads
    only strictly upper triangular entries of Y.
    """
    us = _as_vectors(us, "us")
    vs = _as_vectors(vs, "vs")
    if len(us) != len(vs) or not us:
        raise DimensionMismatch("need the same positive number of u and v vectors")
    n = us[0].size
    if any(v.size != n for v in us + vs):
        raise DimensionMismatch("all vectors must have the same length")
    k = len(us)
    if k > n - 1:
        raise TooManyVectors(f"at most n-1 = {n - 1} vector pairs are supported")

    q, _ = np.linalg.qr(np.column_stack(us), mode="complete")
    u_mat = q.T.copy()
    if np.linalg.det(u_mat) < 0:
        u_mat[-1] = -u_mat[-1]
    q, _ = np.linalg.qr(np.column_stack(vs[::-1]), mode="complete")
    v_mat = q.T[::-1].copy()
    if np.linalg.det(v_mat) < 0:
        v_mat[0] = -v_mat[0]

    for i in range(k):
        su = u_mat @ us[i]
        sv = v_mat @ vs[i]
        scale_u = max(1.0, float(np.linalg.norm(us[i])))
        scale_v = max(1.0, float(np.linalg.norm(vs[i])))
        if np.max(np.abs(su[i + 1 :]), initial=0.0) > tol * scale_u or \
                np.max(np.abs(sv[: i + 1]), initial=0.0) > tol * scale_v:
            raise RankDeficient("vectors do not admit the triangular support pattern")
    return u_mat, v_mat


@dataclass(frozen=True)
class RankOneConstraint:
    """The equality u^T X v = target."""

    u: np.ndarray
    v: np.ndarray
    target: float

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float).reshape(-1)
        v = np.asarray(self.v, dtype=float).reshape(-1)
        if u.size != v.size:
            raise DimensionMismatch("u and v must have the same length")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v)) and math.isfinite(self.target)):
            raise NonFinite("constraint data must be finite")
        if not (np.any(u) and np.any(v)):
            raise ValueError("u and v must be nonzero")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "target", float(self.target))

    @classmethod
    def entry(cls, n: int, i: int, j: int, target: float) -> "RankOneConstraint":
        """X[i, j] = target (0-based)."""
        e = np.eye(n)
        return cls(e[i], e[j], target)

    def residual(self, x) -> float:
        return float(self.u @ np.asarray(x) @ self.v - self.target)


@dataclass
class LowRankResult:
    matrix: np.ndarray
    residuals: np.ndarray
    iterations: int


def feasibility_low_rank(constraints, eps: float = 1e-3, tol: ToleranceConfig = DEFAULT_TOL,
                         max_iter: int = 100_000) -> LowRankResult:
    """Find X in SO(n) with u_i^T X v_i = target_i.

    At most n-1 constraints are accepted unless every u_i v_i^T is already
    strictly upper triangular.

    After triangularizing with :func:`reduce_low_rank`, a point of the
    operator-norm ball meeting the (now SUT-only) equalities is found with
    Dykstra's alternating projections; its SUT part is shrunk by (1 - eps)
    into the interior and completed to a rotation.
    """
    constraints = list(constraints)
    if not constraints:
        raise ValueError("need at least one constraint")
    if not eps > 0 or eps >= 1:
        raise ValueError("eps must lie in (0, 1)")
    n = constraints[0].u.size
    if any(c.u.size != n for c in constraints):
        raise DimensionMismatch("all constraints must have the same dimension")
    lower = np.tril(np.ones((n, n), dtype=bool))
    if all(np.all(np.outer(c.u, c.v)[lower] == 0) for c in constraints):
        # already reads only SUT entries: no reduction needed, any count works
        u_mat = v_mat = np.eye(n)
    else:
        u_mat, v_mat = reduce_low_rank([c.u for c in constraints], [c.v for c in constraints])
    # rows scaled so that each functional has unit norm on the unit ball
    norms = np.array([np.linalg.norm(c.u) * np.linalg.norm(c.v) for c in constraints])
    cmat = np.array([np.outer(u_mat @ c.u, v_mat @ c.v).ravel() for c in constraints])
    cmat /= norms[:, None]
    t = np.array([c.target for c in constraints]) / norms
    gram_pinv = np.linalg.pinv(cmat @ cmat.T)

    def affine(y):
        r = cmat @ y.ravel() - t
        return y - (cmat.T @ (gram_pinv @ r)).reshape(n, n)

    y = np.zeros((n, n))
    p = np.zeros((n, n))
    q = np.zeros((n, n))
    it = 0
    for it in range(1, max_iter + 1):
        a = affine(y + p)
        p = y + p - a
        y_new = project_op_ball(a + q)
        q = a + q - y_new
        step = float(np.max(np.abs(y_new - y)))
        y = y_new
        if step <= eps / 10 and np.max(np.abs(cmat @ y.ravel() - t)) <= eps / 10:
            break
    res = cmat @ y.ravel() - t
    if np.max(np.abs(res)) > eps:
        raise NotFound("no operator-norm-ball point meets the constraints")

    sigma = (1.0 - eps) * project_sut(y)
    y_rot = construct_x_rho(sigma, np.ones(n), tol)
    x = u_mat.T @ y_rot @ v_mat
    residuals = np.array([c.residual(x) for c in constraints])
    return LowRankResult(x, residuals, it)
