"""Rotations with a prescribed diagonal.

Given d in the parity polytope we build X in SO(n) with diag(X) = d:

1. pick a torus matrix R whose diagonal c majorizes d,
2. find planar rotations Q_1, ..., Q_m with diag(Q^T diag(c) Q) = d,
3. return Q^T R Q.  R - diag(c) is skew, so conjugation leaves its diagonal
   contribution at zero and diag(Q^T R Q) = d.

``decide_diag_feasibility`` searches PP_n intersected with a polyhedron by a
central-cut ellipsoid method and hands the point it finds to step 1-3.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NotInParityPolytope, NotMajorized
from .linalg import DEFAULT_TOL, ToleranceConfig, torus_matrix
from .parity import as_vector, pp_contains, pp_separate

__all__ = [
    "PlanarRotation",
    "PolyhedralSet",
    "DiagSearchResult",
    "majorizes",
    "torus_majorant_diagonal",
    "chan_li_rotations",
    "apply_rotations",
    "construct_with_diagonal",
    "decide_diag_feasibility",
]


@dataclass(frozen=True)
class PlanarRotation:
    """Identity except for the block ``[[c, s], [-s, c]]`` on rows/cols (i, j)."""

    i: int
    j: int
    c: float
    s: float

    def __post_init__(self):
        if not 0 <= self.i < self.j:
            raise ValueError("PlanarRotation needs 0 <= i < j")
        if abs(self.c * self.c + self.s * self.s - 1.0) > 1e-9:
            raise ValueError("c^2 + s^2 must equal 1")

    def matrix(self, n: int) -> np.ndarray:
        g = np.eye(n)
        g[self.i, self.i] = g[self.j, self.j] = self.c
        g[self.i, self.j] = self.s
        g[self.j, self.i] = -self.s
        return g

    def conjugate_(self, m: np.ndarray) -> None:
        """In place ``m <- G^T m G``; O(n)."""
        i, j, c, s = self.i, self.j, self.c, self.s
        ci, cj = m[:, i].copy(), m[:, j].copy()
        m[:, i] = c * ci - s * cj
        m[:, j] = s * ci + c * cj
        ri, rj = m[i, :].copy(), m[j, :].copy()
        m[i, :] = c * ri - s * rj
        m[j, :] = s * ri + c * rj


def apply_rotations(m: np.ndarray, rotations) -> np.ndarray:
    """Return ``Q^T m Q`` for ``Q = G_1 G_2 ... G_k``."""
    out = np.array(m, dtype=float, copy=True)
    for g in rotations:
        g.conjugate_(out)
    return out


def majorizes(c, d, tol: float = 1e-8) -> bool:
    """True iff c majorizes d: sorted partial sums dominate, totals agree."""
    c = as_vector(c, "c")
    d = as_vector(d, "d")
    if c.shape != d.shape:
        raise DimensionMismatch("c and d must have the same length")
    t = tol * max(1.0, float(np.max(np.abs(c))), float(np.max(np.abs(d))))
    pc = np.cumsum(np.sort(c)[::-1])
    pd = np.cumsum(np.sort(d)[::-1])
    return abs(pc[-1] - pd[-1]) <= t and bool(np.all(pc >= pd - t))


def _even_majorant(m: int, t: float) -> np.ndarray:
    t = min(max(t, 0.0), m / 2)
    jm1 = min(int(math.floor(t)), m // 2)
    delta = t - jm1
    mid = min(max(1.0 - 2.0 * delta, -1.0), 1.0)
    c = np.ones(m)
    c[: 2 * jm1] = -1.0
    if 2 * jm1 < m:
        c[2 * jm1 : 2 * jm1 + 2] = mid
    return c


def torus_majorant_diagonal(d, tol: float = DEFAULT_TOL.tol_feas) -> np.ndarray:
    """Diagonal of a torus matrix that majorizes ``d`` (d must lie in PP_n).

    With t = (n - sum d) / 4 the entries are 2*floor(t) copies of -1, a
    pair equal to 1 - 2*frac(t), and ones elsewhere.  For odd n the leading
    fixed 1 of the torus is prepended and the same t is used on the rest.
    """
    d = as_vector(d, "d")
    if not pp_contains(d, tol):
        raise NotInParityPolytope("d is not in the parity polytope", cut=pp_separate(d))
    n = d.size
    t = (n - float(d.sum())) / 4.0
    if n % 2 == 0:
        return _even_majorant(n, t)
    return np.concatenate(([1.0], _even_majorant(n - 1, t)))


def chan_li_rotations(c, d, tol: float = DEFAULT_TOL.tol_feas) -> list[PlanarRotation]:
    """Planar rotations G_1..G_m with diag(Q^T diag(c) Q) = d, Q = G_1 ... G_m.

    Targets are fixed one coordinate at a time.  For target value t the two
    free values that bracket it most tightly (a below, b above) are mixed by
    a rotation with sin^2 = (x - t) / (x - y), leaving t on one coordinate and
    a + b - t on the other.  Which coordinate ends up holding which value is
    decided up front, so when c is not already laid out in that order the
    list starts with quarter-turn swaps (at most n - 1) that permute the
    diagonal; at most n - 1 mixing rotations follow.
    """
    c = as_vector(c, "c")
    d = as_vector(d, "d")
    if c.shape != d.shape:
        raise DimensionMismatch("c and d must have the same length")
    if not majorizes(c, d, tol):
        raise NotMajorized("c does not majorize d")
    n = c.size
    scale = max(1.0, float(np.max(np.abs(c))))
    eq_tol = 1e-13 * scale

    # Value-space pass.  Tokens are free diagonal values; each carries the
    # original coordinate ("origin") of the lineage it belongs to.
    values = list(map(float, c))
    origin = list(range(n))
    free = sorted((values[k], k) for k in range(n))
    merges = []  # (dying token, surviving token, target) in processing order
    home = [-1] * n  # home[origin] = target coordinate where that lineage ends

    def remove(tok):
        del free[bisect.bisect_left(free, (values[tok], tok))]

    for k in range(n):
        t = float(d[k])
        if len(free) == 1:
            tok = free.pop()[1]
            home[origin[tok]] = k
            continue
        pos = bisect.bisect_left(free, (t - eq_tol, -1))
        equal = [tok for v, tok in free[pos:pos + 2] if abs(v - t) <= eq_tol]
        lo = bisect.bisect_left(free, (t, -1)) - 1
        hi = bisect.bisect_right(free, (t, n + 1))
        if equal or lo < 0 or hi >= len(free):
            if equal:
                own = [tok for tok in equal if origin[tok] == k]
                tok = own[0] if own else equal[0]
            else:
                tok = free[0][1] if lo < 0 else free[-1][1]
            remove(tok)
            home[origin[tok]] = k
            continue
        below, above = free[lo][1], free[hi][1]
        if origin[below] == k:
            die, surv = below, above
        else:
            die, surv = above, below
        remove(die)
        remove(surv)
        new_val = values[die] + values[surv] - t
        merges.append((die, surv, t, values[die], values[surv]))
        home[origin[die]] = k
        new_tok = len(values)
        values.append(new_val)
        origin.append(origin[surv])
        bisect.insort(free, (new_val, new_tok))

    rotations: list[PlanarRotation] = []

    # Swaps: coordinate home[o] must start out holding c[o].
    layout = list(range(n))  # layout[p] = origin currently sitting at p
    where = list(range(n))
    for o in range(n):
        p = home[o]
        q = where[o]
        if p != q:
            i, j = min(p, q), max(p, q)
            rotations.append(PlanarRotation(i, j, 0.0, 1.0))
            op = layout[p]
            layout[p], layout[q] = o, op
            where[o], where[op] = p, q

    for die, surv, t, x, y in merges:
        p, q = home[origin[die]], home[origin[surv]]
        s2 = (x - t) / (x - y)
        s2 = min(max(s2, 0.0), 1.0)
        i, j = min(p, q), max(p, q)
        rotations.append(PlanarRotation(i, j, math.sqrt(1.0 - s2), math.sqrt(s2)))
    return rotations


def construct_with_diagonal(d, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Rotation X in SO(n) with diag(X) = d, for d in the parity polytope."""
    d = as_vector(d, "d")
    if not pp_contains(d, tol.tol_feas):
        raise NotInParityPolytope("d is not in the parity polytope", cut=pp_separate(d))
    n = d.size
    c = torus_majorant_diagonal(d, tol.tol_feas)
    r = torus_matrix(n, np.arccos(c[n % 2 :: 2]))
    return apply_rotations(r, chan_li_rotations(c, d, tol=max(tol.tol_feas, 1e-8)))


@dataclass
class PolyhedralSet:
    """Rows ``<a_i, x> <= b_i``; equalities are stored as two opposite rows."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.a = np.atleast_2d(np.asarray(self.a, dtype=float))
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        if self.a.shape[0] != self.b.size:
            raise DimensionMismatch("need one right-hand side per row")
        if not (np.all(np.isfinite(self.a)) and np.all(np.isfinite(self.b))):
            raise ValueError("polyhedral rows must be finite")

    @property
    def dim(self) -> int:
        return self.a.shape[1]

    @classmethod
    def from_rows(cls, rows) -> "PolyhedralSet":
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        return cls(rows[:, :-1], rows[:, -1])

    @classmethod
    def fixed_point(cls, d) -> "PolyhedralSet":
        d = as_vector(d, "d")
        eye = np.eye(d.size)
        return cls(np.vstack([eye, -eye]), np.concatenate([d, -d]))

    def equality_mask(self, tol: float = 1e-12) -> np.ndarray:
        m = self.a.shape[0]
        mask = np.zeros(m, dtype=bool)
        for i in range(m):
            if mask[i]:
                continue
            for j in range(i + 1, m):
                if (not mask[j] and np.allclose(self.a[j], -self.a[i], atol=tol)
                        and abs(self.b[j] + self.b[i]) <= tol):
                    mask[i] = mask[j] = True
                    break
        return mask


@dataclass
class DiagSearchResult:
    found: bool
    eps: float
    iterations: int
    point: np.ndarray | None = None
    matrix: np.ndarray | None = None
    last_cut: dict | None = field(default=None, repr=False)


def _snap(x):
    # entries a hair away from +-1 would cost sqrt(roundoff) off the diagonal
    return np.where(np.abs(np.abs(x) - 1.0) <= 1e-12, np.sign(x), x)


def _found(x, eps, it, tol):
    x = _snap(x)
    return DiagSearchResult(True, eps, it, x, construct_with_diagonal(x, tol))


def _violations(x, ineq_a, ineq_b, tol):
    """Violated cuts at x as (normal, violation, description) triples."""
    out = []
    cut = pp_separate(x, tol)
    if cut is not None:
        out.append((cut.normal, cut.violation, cut.as_dict()))
    if ineq_a.size:
        r = ineq_a @ x - ineq_b
        for i in np.flatnonzero(r > tol):
            out.append((ineq_a[i], float(r[i]), {"kind": "row", "row": int(i),
                                                 "violation": float(r[i])}))
    return out


def decide_diag_feasibility(c_set: PolyhedralSet, eps: float = 1e-6,
                            tol: ToleranceConfig = DEFAULT_TOL) -> DiagSearchResult:
    """Find X in SO(n) with diag(X) in ``c_set``, or report that none exists
    up to balls of radius ``eps``.

    Paired opposite rows are treated as equalities and eliminated first; the
    ellipsoid then runs on the remaining affine slice, starting from the ball
    of radius sqrt(n) around the minimum-norm point of the slice.
    """
    n = c_set.dim
    if not (np.all(np.isfinite(c_set.a)) and np.all(np.isfinite(c_set.b))):
        raise ValueError("polyhedral rows must be finite")
    t = tol.tol_feas
    eq = c_set.equality_mask()
    ineq_a, ineq_b = c_set.a[~eq], c_set.b[~eq]

    if eq.any():
        ea, eb = c_set.a[eq], c_set.b[eq]
        x0, *_ = np.linalg.lstsq(ea, eb, rcond=None)
        if np.max(np.abs(ea @ x0 - eb)) > t:
            return DiagSearchResult(False, eps, 0)
        _, sv, vt = np.linalg.svd(ea)
        rank = int(np.sum(sv > 1e-12 * max(1.0, sv[0])))
        basis = vt[rank:].T
    else:
        x0 = np.zeros(n)
        basis = np.eye(n)

    m = basis.shape[1]
    if m == 0:
        if not _violations(x0, ineq_a, ineq_b, t):
            return _found(x0, eps, 0, tol)
        return DiagSearchResult(False, eps, 0)

    radius = math.sqrt(n)
    z = np.zeros(m)
    p = radius ** 2 * np.eye(m)
    cap = max(1, math.ceil(2 * m * (m + 1) * math.log(max(radius / eps, math.e))))
    last = None
    for it in range(1, cap + 1):
        x = x0 + basis @ z
        cuts = _violations(x, ineq_a, ineq_b, t)
        if not cuts:
            return _found(x, eps, it, tol)
        best = None
        for normal, viol, desc in cuts:
            g = basis.T @ normal
            gpg = float(g @ p @ g)
            if gpg <= 1e-300:
                # slice violates the cut everywhere, or the ellipsoid is flat
                return DiagSearchResult(False, eps, it, last_cut=desc)
            depth = viol / math.sqrt(gpg)
            if best is None or depth > best[0]:
                best = (depth, g, gpg, desc)
        _, g, gpg, last = best
        sign, logdet = np.linalg.slogdet(p)
        if sign <= 0 or 0.5 * logdet < m * math.log(eps):
            # no ball of radius eps fits any more
            return DiagSearchResult(False, eps, it, last_cut=last)
        b = p @ g / math.sqrt(gpg)
        if m == 1:
            z = z - b / 2
            p = p / 4
        else:
            z = z - b / (m + 1)
            p = (m * m / (m * m - 1.0)) * (p - (2.0 / (m + 1)) * np.outer(b, b))
    return DiagSearchResult(False, eps, cap, last_cut=last)
