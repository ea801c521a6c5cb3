"""Two-colorings of kinetic hypergraphs and their discrepancy."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bits
from .hypergraph import HyperedgeCatalog, enumerate_kinetic_hyperedges
from .trajectory import MovingPointSet


@dataclass(frozen=True)
class Coloring:
    values: tuple
    seed: int | None = None

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        if not vals or any(v not in (-1, 1) for v in vals):
            raise ValueError("a coloring is a nonempty sequence of +1/-1 values")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def array(self) -> np.ndarray:
        return np.array(self.values, dtype=np.int64)

    def __neg__(self):
        return Coloring(tuple(-v for v in self.values), self.seed)

    def export(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("index,color\n")
            for i, v in enumerate(self.values):
                fh.write(f"{i},{v}\n")


def color_random(n: int, seed: int = 0) -> Coloring:
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    return Coloring(tuple((2 * rng.integers(0, 2, n) - 1).tolist()), seed)


def membership(catalog: HyperedgeCatalog) -> np.ndarray:
    """Edge-by-point 0/1 matrix (int8)."""
    return bits.unpack(catalog.masks, catalog.n).astype(np.int8)


def _catalog(P, fam, catalog):
    return catalog if catalog is not None else enumerate_kinetic_hyperedges(P, fam)


def signed_sums(M: np.ndarray, chi: np.ndarray) -> np.ndarray:
    return M.astype(np.int64) @ chi


def kinetic_discrepancy(P: MovingPointSet, fam, chi, catalog: HyperedgeCatalog | None = None):
    """``(max |chi(S)|, witness edge)`` over the kinetic catalog."""
    cat = _catalog(P, fam, catalog)
    x = chi.array() if isinstance(chi, Coloring) else np.asarray(chi, dtype=np.int64)
    if len(x) != P.n:
        raise ValueError("coloring length differs from the number of points")
    if len(cat) == 0:
        return 0, ()
    s = np.abs(signed_sums(membership(cat), x))
    i = int(np.argmax(s))
    return int(s[i]), bits.to_indices(cat.masks[i])


def improve_coloring(P: MovingPointSet, fam, chi, iterations: int = 1000,
                     catalog: HyperedgeCatalog | None = None) -> Coloring:
    """Greedy single flips while they lower (max imbalance, edges at the max).

    Each step evaluates every flip on the edges whose imbalance is within 4
    of the current maximum; edges further below cannot reach it after one
    flip. The maximum never increases.
    """
    cat = _catalog(P, fam, catalog)
    x = (chi.array() if isinstance(chi, Coloring) else np.asarray(chi, dtype=np.int64)).copy()
    seed = chi.seed if isinstance(chi, Coloring) else None
    if len(cat) == 0:
        return Coloring(tuple(x.tolist()), seed)
    M = membership(cat)
    s = signed_sums(M, x)
    for _ in range(iterations):
        a = np.abs(s)
        cur = int(a.max())
        if cur <= 1:
            break
        at_max = int(np.count_nonzero(a == cur))
        hot = a >= cur - 4
        Mh = M[hot].astype(np.int64)
        new = np.abs(s[hot][:, None] - 2 * Mh * x[None, :])  # (h, n)
        nmax = new.max(axis=0)
        ncount = (new == nmax[None, :]).sum(axis=0)
        key = nmax * (len(s) + 1) + ncount
        i = int(np.argmin(key))
        if (nmax[i], ncount[i]) >= (cur, at_max):
            break
        x[i] = -x[i]
        s = s + 2 * x[i] * M[:, i]
    return Coloring(tuple(x.tolist()), seed)


def union_bound(n: int, m: int) -> float:
    """Random-coloring tail reference ``sqrt(2 n ln(2 m))``."""
    return math.sqrt(2.0 * n * math.log(2.0 * max(m, 1)))


def loglog_slope(xs, ys) -> float:
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])


def write_trend(path, rows, d: int) -> None:
    """Rows of ``(n, measured)``; reference curves for both exponents."""
    e1 = 0.5 - 1.0 / (2 * d + 2)
    e2 = 0.5 - 1.0 / (2 * d)
    with open(path, "w") as fh:
        fh.write("n,measured_disc,ref_kinetic,ref_shatter\n")
        for n, disc in rows:
            fh.write(f"{n},{disc!r},{n ** e1!r},{n ** e2!r}\n")
