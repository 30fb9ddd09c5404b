"""Dense kernels: SVD with determinant-sign tracking, the special trace, norms,
torus matrices and simple projections.

Matrices are plain square ``numpy.ndarray`` objects of dtype float64.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonFinite

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOL",
    "SvdResult",
    "as_matrix",
    "svd",
    "special_trace",
    "special_trace_value",
    "orth_trace_max",
    "trace_norm",
    "op_norm",
    "torus_matrix",
    "random_rotation",
    "project_op_ball",
    "membership",
    "inner",
]


@dataclass(frozen=True)
class ToleranceConfig:
    tol_orth: float = 1e-9
    tol_recon: float = 1e-9
    tol_feas: float = 1e-8
    tol_interior: float = 1e-10

    def __post_init__(self):
        for name in ("tol_orth", "tol_recon", "tol_feas", "tol_interior"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_TOL = ToleranceConfig()


@dataclass(frozen=True)
class SvdResult:
    """``m = u @ diag(sigma) @ v.T`` with ``det_sign = sign(det(u) det(v))``."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray
    det_sign: int

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.sigma) @ self.v.T


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Validate and convert ``m`` to a finite square float array."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionMismatch(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite(f"{name} has non-finite entries")
    return a


def inner(a: np.ndarray, b: np.ndarray) -> float:
    """Trace inner product <a, b> = tr(a^T b)."""
    return float(np.vdot(a, b))


def _sign_of_det(q: np.ndarray) -> int:
    # q is orthogonal, so |det q| = 1 and the LU determinant is well conditioned.
    return 1 if np.linalg.det(q) > 0 else -1


def svd(m) -> SvdResult:
    """Full SVD backed by LAPACK; deterministic for a fixed input."""
    a = as_matrix(m)
    u, s, vt = np.linalg.svd(a)
    v = vt.T
    return SvdResult(u=u, sigma=s, v=v, det_sign=_sign_of_det(u) * _sign_of_det(v))


def special_trace(m) -> tuple[float, np.ndarray]:
    """Maximum of <m, X> over SO(n) and a maximizer.

    The value is the sum of the singular values with the smallest one
    sign-corrected by ``det(u) det(v)``; the maximizer is
    ``u diag(1, ..., 1, det_sign) v^T``.
    """
    r = svd(m)
    d = np.ones_like(r.sigma)
    d[-1] = r.det_sign
    value = float(np.sum(r.sigma * d))
    x = (r.u * d) @ r.v.T
    return value, x


def special_trace_value(m) -> float:
    """Value of :func:`special_trace` without forming singular vectors.

    ``sign(det m) = det(u) det(v)`` whenever m is nonsingular; when it is
    singular the smallest singular value is zero and the sign is irrelevant.
    """
    a = np.asarray(m, dtype=float)
    s = np.linalg.svd(a, compute_uv=False)
    sign, _ = np.linalg.slogdet(a)
    if sign < 0:
        return float(np.sum(s[:-1]) - s[-1])
    return float(np.sum(s))


def orth_trace_max(m) -> tuple[float, np.ndarray]:
    """Maximum of <m, X> over O(n): the trace norm, attained at ``u v^T``."""
    r = svd(m)
    return float(np.sum(r.sigma)), r.u @ r.v.T


def trace_norm(m) -> float:
    return float(np.sum(np.linalg.svd(as_matrix(m), compute_uv=False)))


def op_norm(m) -> float:
    return float(np.linalg.svd(as_matrix(m), compute_uv=False)[0])


def torus_matrix(n: int, thetas) -> np.ndarray:
    """Block-diagonal rotation R(theta_1, ..., theta_k), k = floor(n/2).

    Each block is ``[[cos, sin], [-sin, cos]]``; for odd ``n`` a leading 1
    occupies the top-left corner.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if n < 1 or thetas.shape != (n // 2,):
        raise DimensionMismatch(f"need {n // 2} angles for n={n}, got {thetas.shape[0]}")
    if not np.all(np.isfinite(thetas)):
        raise NonFinite("angles must be finite")
    r = np.eye(n)
    off = n % 2
    for i, t in enumerate(thetas):
        p = off + 2 * i
        c, s = np.cos(t), np.sin(t)
        r[p, p] = c
        r[p, p + 1] = s
        r[p + 1, p] = -s
        r[p + 1, p + 1] = c
    return r


def random_rotation(n: int, seed=None) -> np.ndarray:
    """Haar-distributed element of SO(n) from a seeded Gaussian QR."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    q = q * np.where(np.diag(r) < 0, -1.0, 1.0)
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def project_op_ball(m) -> np.ndarray:
    """Nearest point (Frobenius) in the unit operator-norm ball."""
    r = svd(m)
    return (r.u * np.minimum(r.sigma, 1.0)) @ r.v.T


def membership(m, which: str, tol: float) -> bool:
    """Test ``m`` for membership in ``"SO"``, ``"O"`` or ``"Bop"``."""
    a = as_matrix(m)
    if which == "Bop":
        return op_norm(a) <= 1.0 + tol
    if which not in ("SO", "O"):
        raise ValueError(f"unknown set {which!r}")
    n = a.shape[0]
    if np.max(np.abs(a.T @ a - np.eye(n))) > tol:
        return False
    return which == "O" or np.linalg.det(a) >= 0
