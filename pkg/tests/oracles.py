"""Independent brute-force oracles shared by the test modules."""
from __future__ import annotations

import itertools

import numpy as np


def euler_rotation(phi, theta, psi):
    """R = Rz(phi) Ry(theta) Rz(psi)."""
    def rz(t):
        c, s = np.cos(t), np.sin(t)
        return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1.0]])

    c, s = np.cos(theta), np.sin(theta)
    ry = np.array([[c, 0, s], [0, 1.0, 0], [-s, 0, c]])
    return rz(phi) @ ry @ rz(psi)


def _psi_coeffs(m, phi, theta):
    """Coefficients (p0, p1, p2) with <m, R> = p0 + p1 cos(psi) + p2 sin(psi)
    for R = W Rz(psi), W = Rz(phi) Ry(theta); phi, theta broadcast."""
    cp, sp = np.cos(phi), np.sin(phi)
    ct, st = np.cos(theta), np.sin(theta)
    w = [[cp * ct, -sp + 0 * ct, cp * st],
         [sp * ct, cp + 0 * ct, sp * st],
         [-st + 0 * cp, 0 * cp * ct, ct + 0 * cp]]

    def n(i, j):
        return sum(w[k][i] * m[k, j] for k in range(3))

    return n(2, 2), n(0, 0) + n(1, 1), n(1, 0) - n(0, 1)


def _constrained_max(a, b, lo, hi, phi, theta):
    """Max over psi of <a, R> with <b, R> in [lo, hi], for each (phi, theta)."""
    a0, a1, a2 = _psi_coeffs(a, phi, theta)
    b0, b1, b2 = _psi_coeffs(b, phi, theta)

    def f(psi):
        return a0 + a1 * np.cos(psi) + a2 * np.sin(psi)

    def g(psi):
        return b0 + b1 * np.cos(psi) + b2 * np.sin(psi)

    tol = 1e-12
    best = np.full(np.broadcast(a0, b0).shape, -np.inf)
    psi = np.arctan2(a2, a1)
    gv = g(psi)
    best = np.where((gv >= lo - tol) & (gv <= hi + tol), f(psi), best)
    r = np.hypot(b1, b2)
    base = np.arctan2(b2, b1)
    for level in (lo, hi):
        k = (level - b0) / np.where(r > 0, r, 1.0)
        ok = (np.abs(k) <= 1.0) & (r > 0)
        delta = np.arccos(np.clip(k, -1.0, 1.0))
        for sgn in (1.0, -1.0):
            val = np.where(ok, f(base + sgn * delta), -np.inf)
            best = np.maximum(best, val)
    return best


def euler_grid_max(a, b, lo, hi, coarse=0.01, fine=1e-3, top=40, window=0.02):
    """Max of <a, R> over R in SO(3) with <b, R> in [lo, hi].

    psi is handled in closed form; (phi, theta) are scanned on a grid of
    spacing ``coarse`` and then on grids of spacing ``fine`` around the
    ``top`` best coarse cells.  Returns -inf when nothing is feasible.
    """
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    phis = np.arange(0.0, 2 * np.pi, coarse)
    thetas = np.linspace(0.0, np.pi, int(np.ceil(np.pi / coarse)) + 1)
    vals = _constrained_max(a, b, lo, hi, phis[:, None], thetas[None, :])
    best = float(vals.max())
    flat = np.argsort(vals, axis=None)[::-1][:top]
    offs = np.arange(-window, window + fine / 2, fine)
    for idx in flat:
        if not np.isfinite(vals.flat[idx]):
            break
        i, j = np.unravel_index(idx, vals.shape)
        ph = phis[i] + offs
        th = np.clip(thetas[j] + offs, 0.0, np.pi)
        v = _constrained_max(a, b, lo, hi, ph[:, None], th[None, :])
        best = max(best, float(v.max()))
    return best


def pp_member_lp(d, tol=1e-9):
    """Membership in the parity polytope by an LP over its explicit vertices."""
    from scipy.optimize import linprog

    d = np.asarray(d, float)
    n = d.size
    verts = np.array([v for v in itertools.product([1.0, -1.0], repeat=n)
                      if np.prod(v) > 0])
    k = len(verts)
    a_eq = np.vstack([verts.T, np.ones((1, k))])
    b_eq = np.concatenate([d, [1.0]])
    res = linprog(np.zeros(k), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * k,
                  method="highs")
    return res.status == 0


def pp_vertex_max(w):
    w = np.asarray(w, float)
    return max(float(w @ np.array(v)) for v in itertools.product([1.0, -1.0], repeat=w.size)
               if np.prod(v) > 0)
