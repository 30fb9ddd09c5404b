"""Linear optimization over SO(n) with one extra linear constraint.

The image of SO(n) (n >= 3) under X -> (<A, X>, <B, X>) is a convex planar
set K whose support function is h(y) = str(y_1 A + y_2 B).  Maximizing <A, X>
subject to <B, X> in [a, b] therefore becomes a 2-D convex program over K,
solved here with a central-cut ellipsoid method.  Membership queries go
through a weak separation oracle that minimizes h(y) - <y, x> over the unit
L1 sphere by golden-section search on its four edges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import DimensionMismatch, Infeasible, NonFinite
from .linalg import as_matrix, inner, special_trace, special_trace_value, trace_norm

__all__ = [
    "TwoDImage",
    "SupportEvaluation",
    "Certificate",
    "GoldenResult",
    "Separation",
    "OneConstraintResult",
    "support_point",
    "golden_minimize",
    "weak_separation",
    "solve_one_constraint",
    "round_certificate",
    "image_boundary_polygon",
]

PHI = (1.0 + math.sqrt(5.0)) / 2.0
INV_PHI = 1.0 / PHI

# (s1, s2) for the four edges y = (s1 * alpha, s2 * (1 - alpha)) of the L1 sphere
_EDGES = ((1, 1), (-1, 1), (-1, -1), (1, -1))


@dataclass
class TwoDImage:
    """A and B rescaled to unit trace norm, with the original scales."""

    a_mat: np.ndarray
    b_mat: np.ndarray
    scale_a: float
    scale_b: float
    str_calls: int = 0

    @classmethod
    def from_matrices(cls, a, b) -> "TwoDImage":
        a = as_matrix(a, "A")
        b = as_matrix(b, "B")
        if a.shape != b.shape:
            raise DimensionMismatch("A and B must have the same shape")
        sa, sb = trace_norm(a), trace_norm(b)
        if sa == 0 or sb == 0:
            raise ValueError("A and B must be nonzero")
        return cls(a / sa, b / sb, sa, sb)

    @property
    def n(self) -> int:
        return self.a_mat.shape[0]

    def h(self, y1: float, y2: float) -> float:
        """Support function str(y1 A + y2 B) of the image."""
        self.str_calls += 1
        return special_trace_value(y1 * self.a_mat + y2 * self.b_mat)


@dataclass(frozen=True)
class SupportEvaluation:
    y: np.ndarray
    value: float
    point: np.ndarray
    matrix: np.ndarray


@dataclass(frozen=True)
class Certificate:
    """Normalized multipliers with |alpha| + |beta| = 1 and the attained slack."""

    alpha: float
    beta: float
    slack: float

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "slack": self.slack}


class GoldenResult(NamedTuple):
    alpha: float
    value: float
    evaluations: int


@dataclass(frozen=True)
class Separation:
    """``inside`` is True, or ``y`` (with |y|_1 = 1) separates the query."""

    inside: bool
    y: np.ndarray | None
    value: float
    evaluations: int


@dataclass
class OneConstraintResult:
    value: float
    point: np.ndarray
    certificate: Certificate
    oracle_calls: int
    str_calls: int
    iterations: int


def support_point(img: TwoDImage, y) -> SupportEvaluation:
    """Maximize <y_1 A + y_2 B, X> over SO(n) and map the maximizer to the plane."""
    y = np.asarray(y, dtype=float).reshape(2)
    if not np.all(np.isfinite(y)):
        raise NonFinite("direction must be finite")
    value, x = special_trace(y[0] * img.a_mat + y[1] * img.b_mat)
    img.str_calls += 1
    point = np.array([inner(img.a_mat, x), inner(img.b_mat, x)])
    return SupportEvaluation(y, value, point, x)


def _segment_min_of_max(lines, lo, hi):
    """Minimum over [lo, hi] of max_k (p_k + q_k x)."""
    cand = [lo, hi]
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            dq = lines[i][1] - lines[j][1]
            if dq != 0:
                x = (lines[j][0] - lines[i][0]) / dq
                if lo < x < hi:
                    cand.append(x)
    return min(max(p + q * x for p, q in lines) for x in cand)


def _convex_lower_bound(xs, gs, lipschitz):
    """Lower bound on min g over [xs[0], xs[-1]] from samples of a convex,
    ``lipschitz``-continuous g (secant extensions and Lipschitz cones)."""
    m = len(xs)
    best = math.inf
    for k in range(m - 1):
        x0, x1 = xs[k], xs[k + 1]
        lines = [(gs[k] + lipschitz * x0, -lipschitz), (gs[k + 1] - lipschitz * x1, lipschitz)]
        if k >= 1 and xs[k] > xs[k - 1]:
            q = (gs[k] - gs[k - 1]) / (xs[k] - xs[k - 1])
            lines.append((gs[k] - q * xs[k], q))
        if k + 2 < m and xs[k + 2] > xs[k + 1]:
            q = (gs[k + 2] - gs[k + 1]) / (xs[k + 2] - xs[k + 1])
            lines.append((gs[k + 1] - q * xs[k + 1], q))
        best = min(best, _segment_min_of_max(lines, x0, x1))
    return best


def golden_minimize(g: Callable[[float], float], eps: float, lipschitz: float = 1.0,
                    threshold: float | None = None, g0: float | None = None,
                    g1: float | None = None) -> GoldenResult:
    """Golden-section search for a convex, ``lipschitz``-continuous g on [0, 1].

    Returns the best evaluated point; its value is within ``eps`` of min g.
    With ``threshold`` set, the search also stops as soon as a value
    <= threshold is seen, or once convexity proves min g > threshold - eps.
    Known endpoint values may be passed as ``g0`` and ``g1``.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    evals = 0
    a, b = 0.0, 1.0
    ga, gb = g0, g1
    best_x, best_v = None, math.inf
    for x, v in ((0.0, ga), (1.0, gb)):
        if v is not None and v < best_v:
            best_x, best_v = x, v

    def stop():
        if threshold is None:
            return False
        if best_v <= threshold:
            return True
        pts = [(x1, f1), (x2, f2)]
        if ga is not None:
            pts.insert(0, (a, ga))
        if gb is not None:
            pts.append((b, gb))
        lb = _convex_lower_bound([p[0] for p in pts], [p[1] for p in pts], lipschitz)
        if ga is None:
            lb = min(lb, f1 - lipschitz * (x1 - a))
        if gb is None:
            lb = min(lb, f2 - lipschitz * (b - x2))
        return lb > threshold - eps

    if threshold is not None and best_v <= threshold:
        return GoldenResult(best_x, best_v, 0)

    x1 = b - (b - a) * INV_PHI
    x2 = a + (b - a) * INV_PHI
    f1, f2 = g(x1), g(x2)
    evals += 2
    for x, v in ((x1, f1), (x2, f2)):
        if v < best_v:
            best_x, best_v = x, v
    while (b - a) * lipschitz > eps and not stop():
        if f1 <= f2:
            b, gb = x2, f2
            x2, f2 = x1, f1
            x1 = b - (b - a) * INV_PHI
            f1 = g(x1)
            x, v = x1, f1
        else:
            a, ga = x1, f1
            x1, f1 = x2, f2
            x2 = a + (b - a) * INV_PHI
            f2 = g(x2)
            x, v = x2, f2
        evals += 1
        if v < best_v:
            best_x, best_v = x, v
    return GoldenResult(float(best_x), float(best_v), evals)


def weak_separation(img: TwoDImage, x, eps: float) -> Separation:
    """Either certify x is near the image or return a separating direction.

    A returned y (|y|_1 = 1) satisfies <y, x> >= str(y_1 A + y_2 B) + eps/2,
    so the image lies strictly inside the half-plane {z : <y, z> <= <y, x>}.
    Otherwise x is reported inside: every direction has
    str(y_1 A + y_2 B) - <y, x> > -3 eps / 2, i.e. x lies in the image
    inflated by 3 eps / 2 in the max norm.  Points of the image itself are
    therefore never separated, even on flat parts of its boundary.
    """
    x = np.asarray(x, dtype=float).reshape(2)
    if not np.all(np.isfinite(x)):
        raise NonFinite("query point must be finite")
    i = int(np.argmax(np.abs(x)))
    if abs(x[i]) > 1.0 + eps:
        y = np.zeros(2)
        y[i] = math.copysign(1.0, x[i])
        return Separation(False, y, float(1.0 - abs(x[i])), 0)

    def f(y1, y2):
        return img.h(y1, y2) - y1 * x[0] - y2 * x[1]

    axis = {(1, 0): f(1, 0), (0, 1): f(0, 1), (-1, 0): f(-1, 0), (0, -1): f(0, -1)}
    evals = 4
    cut = -0.5 * eps
    best = min(axis, key=axis.get)
    if axis[best] <= cut:
        return Separation(False, np.array(best, dtype=float), axis[best], evals)

    lip = 4.0 + 2.0 * eps
    edges = sorted(_EDGES, key=lambda e: axis[(e[0], 0)] + axis[(0, e[1])])
    best_val, best_y = axis[best], np.array(best, dtype=float)
    for s1, s2 in edges:
        res = golden_minimize(
            lambda al, s1=s1, s2=s2: f(s1 * al, s2 * (1.0 - al)),
            eps, lipschitz=lip, threshold=cut,
            g0=axis[(0, s2)], g1=axis[(s1, 0)],
        )
        evals += res.evaluations
        if res.value < best_val:
            best_val = res.value
            best_y = np.array([s1 * res.alpha, s2 * (1.0 - res.alpha)])
        if res.value <= cut:
            return Separation(False, best_y, best_val, evals)
    return Separation(True, None, best_val, evals)


def _certificate(img: TwoDImage, xhat: np.ndarray, eps: float) -> Certificate:
    # an eps-optimal point for the unconstrained problem gets multiplier zero
    free = img.h(1.0, 0.0) - xhat[0]
    if free <= eps:
        return Certificate(1.0, 0.0, float(free))
    best = None
    for s2 in (1, -1):
        res = golden_minimize(
            lambda al: img.h(al, s2 * (1.0 - al)) - al * xhat[0] - s2 * (1.0 - al) * xhat[1],
            eps, lipschitz=4.0 + 2.0 * eps,
        )
        if best is None or res.value < best[0]:
            best = (res.value, res.alpha, s2 * (1.0 - res.alpha))
    slack, alpha, beta = best
    return Certificate(float(alpha), float(beta), float(slack))


def _solve_segment(img, sign, lo, hi):
    """B = sign * A (normalized): the image is a segment on x2 = sign * x1."""
    top = img.h(1.0, 0.0)
    bottom = -img.h(-1.0, 0.0)
    if sign > 0:
        cap_lo, cap_hi = lo, hi
    else:
        cap_lo, cap_hi = -hi, -lo
    x1 = min(top, cap_hi)
    if x1 < max(bottom, cap_lo):
        raise Infeasible("constraint interval misses the image")
    point = np.array([x1, sign * x1])
    if x1 >= top:
        cert = Certificate(1.0, 0.0, 0.0)
    else:
        cert = Certificate(0.5, -0.5 * sign, 0.0)
    return point, cert


def solve_one_constraint(a, b, interval, eps: float = 1e-4, max_iter: int | None = None
                         ) -> OneConstraintResult:
    """Maximize <A, X> over X in SO(n) subject to <B, X> in [lo, hi].

    Inputs are rescaled to unit trace norm internally; ``value`` and
    ``point`` are returned in the original units, the certificate (alpha,
    beta) refers to the normalized matrices.  ``eps`` is the additive
    accuracy in normalized units.
    """
    lo, hi = (float(v) for v in interval)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise NonFinite("interval must be finite")
    if lo > hi:
        raise ValueError("interval must satisfy lo <= hi")
    if not eps > 0:
        raise ValueError("eps must be positive")
    img = TwoDImage.from_matrices(a, b)
    if img.n < 3:
        raise DimensionMismatch("one-constraint solver needs n >= 3")
    lo_n, hi_n = lo / img.scale_b, hi / img.scale_b

    x2max = img.h(0.0, 1.0)
    x2min = -img.h(0.0, -1.0)
    if lo_n > x2max + eps or hi_n < x2min - eps:
        raise Infeasible("constraint interval misses the image")
    lo_n, hi_n = max(lo_n, x2min), min(hi_n, x2max)
    if lo_n > hi_n:
        lo_n = hi_n = 0.5 * (lo_n + hi_n)

    for sign in (1, -1):
        if np.max(np.abs(img.b_mat - sign * img.a_mat)) <= 1e-12:
            point, cert = _solve_segment(img, sign, lo_n, hi_n)
            return OneConstraintResult(
                point[0] * img.scale_a, point * [img.scale_a, img.scale_b], cert,
                0, img.str_calls, 0)

    inner_eps = eps / 4.0
    strip = eps / 4.0
    c = np.zeros(2)
    p = 4.0 * np.eye(2)
    best, best_pt = -math.inf, None
    oracle_calls = 0
    cap = max_iter or int(60 * math.log(8.0 / eps)) + 200
    it = 0
    for it in range(1, cap + 1):
        if best_pt is not None and c[0] + math.sqrt(p[0, 0]) - best <= eps:
            break
        if c[1] > hi_n + strip:
            g = np.array([0.0, 1.0])
        elif c[1] < lo_n - strip:
            g = np.array([0.0, -1.0])
        else:
            sep = weak_separation(img, c, inner_eps)
            oracle_calls += 1
            if sep.inside:
                if c[0] > best:
                    best, best_pt = float(c[0]), c.copy()
                g = np.array([-1.0, 0.0])
            else:
                g = sep.y
        gpg = float(g @ p @ g)
        if gpg <= 1e-300:
            break
        bvec = p @ g / math.sqrt(gpg)
        c = c - bvec / 3.0
        p = (4.0 / 3.0) * (p - (2.0 / 3.0) * np.outer(bvec, bvec))
        if np.sqrt(max(np.linalg.det(p), 0.0)) < (1e-3 * eps) ** 2:
            break
    if best_pt is None:
        raise Infeasible("no image point meets the constraint interval within eps")

    cert = _certificate(img, best_pt, eps)
    return OneConstraintResult(
        best * img.scale_a,
        best_pt * np.array([img.scale_a, img.scale_b]),
        cert,
        oracle_calls,
        img.str_calls,
        it,
    )


def round_certificate(a, b, certificate: Certificate) -> np.ndarray:
    """Heuristic rotation: the maximizer of <alpha A + beta B, X> over SO(n),
    with A and B normalized to unit trace norm."""
    img = TwoDImage.from_matrices(a, b)
    _, x = special_trace(certificate.alpha * img.a_mat + certificate.beta * img.b_mat)
    return x


def image_boundary_polygon(a, b, k: int) -> np.ndarray:
    """``k`` support points of the image of SO(n) under X -> (<A, X>, <B, X>),
    for directions (cos 2 pi j / k, sin 2 pi j / k); A and B are used as given."""
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    if a.shape != b.shape:
        raise DimensionMismatch("A and B must have the same shape")
    if k < 1:
        raise ValueError("k must be positive")
    pts = np.empty((k, 2))
    for j in range(k):
        t = 2.0 * math.pi * j / k
        _, x = special_trace(math.cos(t) * a + math.sin(t) * b)
        pts[j] = inner(a, x), inner(b, x)
    return pts
