"""Kinetic nearest / furthest partner tracking.

For a point ``p`` and candidates ``Q`` the squared distances ``|p(t)-q(t)|^2``
are polynomials of degree at most ``2s``; the partner changes only at a real
root of the difference between the current partner's function and another
candidate's. Ties go to the smaller candidate index, and an isolated tie
(the functions touch without swapping order) is not a change.
"""
from __future__ import annotations

import math

import numpy as np

from . import kernels
from .trajectory import ROOT_TOL, MovingPointSet, _conv, horner


def sqdist_polys(P: MovingPointSet, i: int, candidates) -> np.ndarray:
    """Coefficients of ``|p_i(t) - p_q(t)|^2`` for each candidate ``q``."""
    diff = P.coeffs[np.asarray(candidates)] - P.coeffs[i][None]  # (m, d, L)
    return _conv(diff, diff).sum(axis=1)


def sqdist_to_static(P: MovingPointSet, i: int, sites: np.ndarray) -> np.ndarray:
    """Squared distance polynomials from ``p_i`` to fixed sites."""
    c = np.repeat(P.coeffs[i][None], len(sites), axis=0).copy()
    c[:, :, 0] -= sites
    return _conv(c, c).sum(axis=1)


def _taylor(coeffs, t0):
    """Coefficients of ``g(t0 + h)`` in powers of ``h`` (rows)."""
    coeffs = np.atleast_2d(coeffs)
    L = coeffs.shape[1]
    out = np.zeros_like(coeffs)
    for k in range(L):
        binom = np.array([math.comb(j, k) * t0 ** (j - k) if j >= k else 0.0 for j in range(L)])
        out[:, k] = coeffs @ binom
    return out


def _order_after(F, t0, maximize, rel=1e-9):
    """Index of the best function just after ``t0`` (ties to smaller index).

    Compares Taylor expansions at ``t0`` lexicographically, treating
    differences within ``rel`` of the coefficient scale as ties.
    """
    tay = _taylor(F, t0)
    if maximize:
        tay = -tay
    alive = np.arange(len(F))
    for k in range(tay.shape[1]):
        col = tay[alive, k]
        scale = max(1.0, float(np.abs(tay[:, k]).max()))
        best = col.min()
        alive = alive[col <= best + rel * scale]
        if len(alive) == 1:
            break
    return int(alive[0])


def track(F: np.ndarray, horizon, maximize: bool = False, tol: float = ROOT_TOL):
    """Piecewise-constant argmin (or argmax) of the polynomial rows of ``F``.

    Returns a list of ``(start, end, row)`` covering the horizon in order.
    """
    F = np.asarray(F, dtype=float)
    lo, hi = horizon
    m = len(F)
    if m == 0:
        raise ValueError("no candidates to track")
    cur = _order_after(F, lo, maximize)
    t0 = lo
    out = []
    while True:
        G = F - F[cur]
        if maximize:
            G = -G
        G[cur] = 0.0
        roots, owner = kernels.real_roots_batch(G, t0, hi, tol)
        nxt = None
        if len(roots):
            order = np.lexsort((owner, roots))
            roots, owner = roots[order], owner[order]
            ahead = roots > t0 + tol
            roots, owner = roots[ahead], owner[ahead]
            for r, q in zip(roots.tolist(), owner.tolist()):
                if nxt is not None and r > nxt + tol:
                    break
                later = roots[(owner == q) & (roots > r + tol)]
                probe = 0.5 * (r + (later[0] if len(later) else hi))
                if probe <= r:
                    continue
                if horner(G[q], probe) < 0.0:
                    nxt = r if nxt is None else min(nxt, r)
        if nxt is None:
            out.append((t0, hi, cur))
            return out
        new = _order_after(F, nxt, maximize)
        if new == cur:  # numerically a touch; step past it
            t0 = nxt
            continue
        out.append((t0, nxt, cur))
        cur, t0 = new, nxt


def merge_pieces(pieces):
    """Fuse adjacent pieces with the same partner."""
    out = []
    for s, e, q in pieces:
        if out and out[-1][2] == q:
            out[-1] = (out[-1][0], e, q)
        else:
            out.append((s, e, q))
    return out


def ds_cap(m: int, s: int) -> int:
    """Upper bound on partner changes of an envelope of ``m`` functions whose
    pairwise differences have at most ``2s`` roots."""
    order = 2 * s
    if m <= 1 or order == 0:
        return 0
    if order == 1:
        pieces = m
    elif order == 2:
        pieces = 2 * m - 1
    else:
        pieces = order * math.comb(m, 2) + 1
    return pieces - 1
