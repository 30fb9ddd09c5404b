"""Membership, separation and linear optimization over the parity polytope.

PP_n is the convex hull of the sign vectors in {-1, +1}^n with an even number
of -1 entries.  Inside the box [-1, 1]^n its facets are

    <x, 1 - 2 * 1_S> <= n - 2        for every odd-cardinality S,

so the most violated facet is found by sorting x and scanning odd-length
prefixes of the ascending order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFinite

__all__ = [
    "Cut",
    "as_vector",
    "pp_contains",
    "pp_separate",
    "pp_maximize",
    "pp_random_point",
    "pp_vertices",
]


@dataclass(frozen=True)
class Cut:
    """Violated inequality ``<normal, x> <= rhs``.

    ``kind`` is ``"box"`` for |x_i| <= 1 and ``"odd"`` for an odd-set facet,
    in which case ``subset`` holds the (0-based, sorted) indices of S.
    """

    kind: str
    normal: np.ndarray
    rhs: float
    violation: float
    subset: tuple = ()

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "subset": [int(i) for i in self.subset],
            "normal": [float(v) for v in self.normal],
            "rhs": float(self.rhs),
            "violation": float(self.violation),
        }


def as_vector(d, name: str = "vector") -> np.ndarray:
    x = np.asarray(d, dtype=float).reshape(-1)
    if x.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(x)):
        raise NonFinite(f"{name} has non-finite entries")
    return x


def _odd_prefix_scan(x: np.ndarray):
    """Return (best_subset_indices, min_odd_prefix_sum)."""
    order = np.argsort(x, kind="stable")
    prefix = np.cumsum(x[order])
    odd = prefix[0::2]  # prefix lengths 1, 3, 5, ...
    j = int(np.argmin(odd))
    return order[: 2 * j + 1], float(odd[j])


def _box_cut(x: np.ndarray):
    i = int(np.argmax(np.abs(x)))
    viol = abs(x[i]) - 1.0
    normal = np.zeros_like(x)
    normal[i] = 1.0 if x[i] >= 0 else -1.0
    return Cut("box", normal, 1.0, float(viol), (i,))


def _odd_cut(x: np.ndarray):
    n = x.size
    s, _ = _odd_prefix_scan(x)
    normal = np.ones(n)
    normal[s] = -1.0
    viol = float(normal @ x - (n - 2))
    return Cut("odd", normal, float(n - 2), viol, tuple(sorted(int(i) for i in s)))


def pp_contains(d, tol: float = 1e-8) -> bool:
    """True iff ``d`` lies in PP_n inflated by ``tol`` (scaled by max(1, |d|_inf))."""
    x = as_vector(d, "d")
    scale = max(1.0, float(np.max(np.abs(x))))
    t = tol * scale
    if np.max(np.abs(x)) > 1.0 + t:
        return False
    n = x.size
    _, m = _odd_prefix_scan(x)
    return m >= 0.5 * (x.sum() - (n - 2)) - t


def pp_separate(d, tol: float = 0.0):
    """Most violated cut for ``d`` or ``None`` when ``d`` is inside.

    Box cuts take precedence over odd-set cuts.  A constraint counts as
    violated only when its violation exceeds ``tol``.
    """
    x = as_vector(d, "d")
    box = _box_cut(x)
    if box.violation > tol:
        return box
    odd = _odd_cut(x)
    if odd.violation > tol:
        return odd
    return None


def pp_maximize(w):
    """Maximize <w, x> over PP_n; returns ``(vertex, value)``.

    The optimal vertex is 1 - 2 * 1_S for the even set S minimizing
    sum_{i in S} w_i: take the negative entries and, if there is an odd
    number of them, either drop the one closest to zero or add the smallest
    nonnegative entry, whichever is cheaper.
    """
    w = as_vector(w, "w")
    neg = w < 0
    if np.count_nonzero(neg) % 2 == 1:
        neg_idx = np.flatnonzero(neg)
        drop = neg_idx[np.argmax(w[neg_idx])]
        drop_cost = -w[drop]
        pos_idx = np.flatnonzero(~neg)
        if pos_idx.size:
            add = pos_idx[np.argmin(w[pos_idx])]
            add_cost = w[add]
        else:
            add_cost = np.inf
        if drop_cost <= add_cost:
            neg[drop] = False
        else:
            neg[add] = True
    vertex = np.where(neg, -1.0, 1.0)
    return vertex, float(w @ vertex)


def pp_vertices(n: int) -> np.ndarray:
    """All 2^(n-1) vertices of PP_n as rows (test scale only)."""
    if n > 20:
        raise ValueError("vertex enumeration is limited to n <= 20")
    grid = np.array(np.meshgrid(*[[1.0, -1.0]] * n, indexing="ij")).reshape(n, -1).T
    return grid[np.prod(grid, axis=1) > 0]


def pp_random_point(n: int, seed=None, n_vertices: int | None = None) -> np.ndarray:
    """Random convex combination of even-parity sign vectors."""
    rng = np.random.default_rng(seed)
    if n == 1:
        return np.ones(1)
    k = n_vertices if n_vertices is not None else int(rng.integers(1, n + 2))
    signs = rng.choice([-1.0, 1.0], size=(k, n))
    odd_rows = np.prod(signs, axis=1) < 0
    flip = rng.integers(0, n, size=k)
    signs[odd_rows, flip[odd_rows]] *= -1.0
    weights = rng.dirichlet(np.ones(k))
    return weights @ signs
