"""Polynomial trajectories, determinant event polynomials and root isolation."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels

ROOT_TOL = 1e-10
PERTURB_MAGNITUDE = 1e-7
# |det| at t=0 below this fraction of the Hadamard bound counts as degenerate
DEGENERACY_REL = 1e-12


class DegenerateError(ValueError):
    """Raised when a configuration violates general position."""

    def __init__(self, message, tuples=()):
        super().__init__(message)
        self.tuples = list(tuples)


def _trim(coeffs):
    c = [float(v) for v in coeffs]
    while c and c[-1] == 0.0:
        c.pop()
    return tuple(c)


def _conv(a, b):
    """Batched product of ascending coefficient arrays along the last axis."""
    la, lb = a.shape[-1], b.shape[-1]
    shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1]) + (la + lb - 1,)
    out = np.zeros(shape)
    for i in range(la):
        out[..., i:i + lb] += a[..., i:i + 1] * b
    return out


def horner(coeffs, t):
    """Evaluate ascending coefficients (last axis) at ``t`` (broadcasting)."""
    coeffs = np.asarray(coeffs, dtype=float)
    t = np.asarray(t, dtype=float)
    v = np.zeros(np.broadcast_shapes(coeffs.shape[:-1], t.shape))
    for i in range(coeffs.shape[-1] - 1, -1, -1):
        v = v * t + coeffs[..., i]
    return v


@dataclass(frozen=True)
class Polynomial:
    """Univariate polynomial with ascending coefficients, trimmed."""

    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, t):
        if not self.coeffs:
            return np.zeros_like(np.asarray(t, dtype=float)) if np.ndim(t) else 0.0
        v = horner(np.array(self.coeffs), t)
        return float(v) if np.ndim(v) == 0 else v

    def _pad(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0.0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0.0] * (n - len(other.coeffs))
        return a, b

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial((float(other),))
        a, b = self._pad(other)
        return Polynomial([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-x for x in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial((float(other),))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial([x * float(other) for x in self.coeffs])
        if self.is_zero() or other.is_zero():
            return Polynomial()
        return Polynomial(_conv(np.array(self.coeffs), np.array(other.coeffs)).tolist())

    __rmul__ = __mul__

    def derivative(self):
        return Polynomial([i * c for i, c in enumerate(self.coeffs)][1:])

    def scale(self, t: float = 1.0) -> float:
        """Sum of |c_i| * max(1, |t|)**i, the natural magnitude for residual checks."""
        m = max(1.0, abs(t))
        return sum(abs(c) * m**i for i, c in enumerate(self.coeffs))


@dataclass(frozen=True)
class Trajectory:
    components: tuple

    def __post_init__(self):
        comps = tuple(c if isinstance(c, Polynomial) else Polynomial(c) for c in self.components)
        if not comps:
            raise ValueError("a trajectory needs at least one coordinate")
        object.__setattr__(self, "components", comps)

    @property
    def dimension(self) -> int:
        return len(self.components)

    @property
    def degree(self) -> int:
        return max(max(c.degree for c in self.components), 0)

    def __call__(self, t):
        return evaluate(self, t)


def evaluate(traj: Trajectory, t: float) -> np.ndarray:
    """Position of ``traj`` at time ``t`` (Horner per coordinate)."""
    return np.array([float(c(t)) if not c.is_zero() else 0.0 for c in traj.components])


class MovingPointSet:
    """n trajectories in R^d with coordinate degree at most s over [0, T].

    Coefficients live in one array of shape ``(n, d, s + 1)``, ascending powers.
    """

    def __init__(self, coeffs, horizon: float = 1.0, max_degree: int | None = None):
        c = np.array(coeffs, dtype=float)
        if c.ndim == 2:  # (n, L) shorthand for d = 1
            c = c[:, None, :]
        if c.ndim != 3 or c.shape[0] == 0:
            raise ValueError("coefficients must have shape (n, d, degree + 1)")
        nz = np.nonzero(np.any(c != 0.0, axis=(0, 1)))[0]
        actual = int(nz[-1]) if len(nz) else 0
        s = actual if max_degree is None else int(max_degree)
        if actual > s:
            raise ValueError(f"trajectory degree {actual} exceeds bound {s}")
        width = s + 1
        if c.shape[2] < width:
            c = np.concatenate([c, np.zeros(c.shape[:2] + (width - c.shape[2],))], axis=2)
        self.coeffs = np.ascontiguousarray(c[:, :, :width])
        self.coeffs.setflags(write=False)
        T = float(horizon)
        if not T > 0.0:
            raise ValueError("horizon must be positive")
        self.horizon = (0.0, T)

    @classmethod
    def from_trajectories(cls, trajectories: Sequence[Trajectory], horizon=1.0, max_degree=None):
        d = trajectories[0].dimension
        if any(tr.dimension != d for tr in trajectories):
            raise ValueError("all trajectories must share the same dimension")
        s = max(tr.degree for tr in trajectories)
        if max_degree is not None:
            s = max(s, int(max_degree))
        c = np.zeros((len(trajectories), d, s + 1))
        for i, tr in enumerate(trajectories):
            for j, comp in enumerate(tr.components):
                c[i, j, : len(comp.coeffs)] = comp.coeffs
        return cls(c, horizon, max_degree=s if max_degree is None else max_degree)

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]

    @property
    def dimension(self) -> int:
        return self.coeffs.shape[1]

    @property
    def max_degree(self) -> int:
        return self.coeffs.shape[2] - 1

    @property
    def T(self) -> float:
        return self.horizon[1]

    def __len__(self):
        return self.n

    def check_time(self, t):
        lo, hi = self.horizon
        t = np.asarray(t, dtype=float)
        slack = 1e-9 * max(1.0, hi)
        if np.any(t < lo - slack) or np.any(t > hi + slack):
            raise ValueError(f"time outside horizon [{lo}, {hi}]")
        return float(t) if t.ndim == 0 else t

    def positions(self, t: float) -> np.ndarray:
        self.check_time(t)
        return horner(self.coeffs, float(t))

    def positions_at(self, times) -> np.ndarray:
        """Positions at several times: shape ``(len(times), n, d)``."""
        times = np.asarray(times, dtype=float)
        self.check_time(times)
        return horner(self.coeffs[None], times[:, None, None])

    def trajectory(self, i: int) -> Trajectory:
        return Trajectory(tuple(Polynomial(row) for row in self.coeffs[i]))

    def subset(self, indices) -> "MovingPointSet":
        return MovingPointSet(self.coeffs[list(indices)], self.T, self.max_degree)

    def with_horizon(self, T: float) -> "MovingPointSet":
        return MovingPointSet(self.coeffs, T, self.max_degree)

    def is_static(self) -> bool:
        return not np.any(self.coeffs[:, :, 1:])

    def __eq__(self, other):
        return (
            isinstance(other, MovingPointSet)
            and self.horizon == other.horizon
            and self.coeffs.shape == other.coeffs.shape
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __repr__(self):
        return f"MovingPointSet(n={self.n}, d={self.dimension}, s={self.max_degree}, T={self.T})"


# --------------------------------------------------------------------------
# determinant event polynomials


def det_poly_batch(entries: np.ndarray) -> np.ndarray:
    """Determinants of polynomial matrices by Leibniz expansion.

    ``entries`` has shape ``(m, k, k, L)`` (ascending coefficients); the
    result has shape ``(m, k * (L - 1) + 1)``.
    """
    entries = np.asarray(entries, dtype=float)
    m, k, _, L = entries.shape
    out = np.zeros((m, k * (L - 1) + 1))
    for perm in itertools.permutations(range(k)):
        sign = _perm_sign(perm)
        term = entries[:, 0, perm[0], :]
        for row in range(1, k):
            term = _conv(term, entries[:, row, perm[row], :])
        out[:, : term.shape[1]] += sign * term
    return out


def _perm_sign(perm):
    sign = 1
    seen = list(perm)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def affine_rows(coeffs: np.ndarray, tuples: np.ndarray) -> np.ndarray:
    """Matrix rows ``[x_1(t) .. x_d(t), 1]`` for each tuple: ``(m, k, d+1, L)``."""
    sel = coeffs[tuples]  # (m, k, d, L)
    one = np.zeros(sel.shape[:2] + (1, sel.shape[3]))
    one[..., 0, 0] = 1.0
    return np.concatenate([sel, one], axis=2)


def lifted_rows(coeffs: np.ndarray, tuples: np.ndarray) -> np.ndarray:
    """Rows ``[x(t), |x(t)|^2, 1]`` for the cosphericality determinant."""
    sel = coeffs[tuples]  # (m, k, d, L)
    sq = _conv(sel, sel).sum(axis=2, keepdims=True)  # (m, k, 1, 2L-1)
    L2 = sq.shape[-1]
    pad = np.zeros(sel.shape[:3] + (L2 - sel.shape[3],))
    sel = np.concatenate([sel, pad], axis=3)
    one = np.zeros(sel.shape[:2] + (1, L2))
    one[..., 0, 0] = 1.0
    return np.concatenate([sel, sq, one], axis=2)


def determinant_polynomial(trajectories: Sequence[Trajectory], strict: bool = False) -> Polynomial:
    """Affine-dependence determinant of d+1 trajectories as one polynomial in t.

    An identically zero result means the tuple is degenerate for all time;
    with ``strict=True`` that raises :class:`DegenerateError`.
    """
    d = trajectories[0].dimension
    if len(trajectories) != d + 1 or any(tr.dimension != d for tr in trajectories):
        raise ValueError(f"need exactly {d + 1} trajectories of dimension {d}")
    P = MovingPointSet.from_trajectories(list(trajectories))
    rows = affine_rows(P.coeffs, np.arange(d + 1)[None, :])
    poly = Polynomial(det_poly_batch(rows)[0].tolist())
    if strict and _is_negligible(poly.coeffs, rows):
        raise DegenerateError("determinant polynomial is identically zero", [tuple(range(d + 1))])
    return poly


def _is_negligible(coeffs, rows) -> bool:
    scale = max(1.0, float(np.abs(rows).sum()))
    return all(abs(c) <= 1e-13 * scale for c in coeffs)


def real_roots(p: Polynomial, window=(0.0, 1.0), tol: float = ROOT_TOL) -> list[float]:
    """Sorted distinct real roots of ``p`` in the closed window.

    Sturm sign-variation counting isolates the roots, bisection refines them
    to ``tol``; roots closer than ``2 * tol`` are merged.
    """
    if not isinstance(p, Polynomial):
        p = Polynomial(p)
    if p.is_zero():
        raise DegenerateError("identically zero polynomial has no isolated roots")
    lo, hi = float(window[0]), float(window[1])
    if lo > hi:
        raise ValueError("window lower bound exceeds upper bound")
    roots, _ = kernels.real_roots_batch(np.array([p.coeffs]), lo, hi, tol)
    return roots.tolist()


def cauchy_bound(coeffs: np.ndarray) -> np.ndarray:
    """Upper bound on |root| per row: 1 + max |c_i / c_lead|."""
    coeffs = np.asarray(coeffs, dtype=float)
    out = np.zeros(len(coeffs))
    for i, row in enumerate(coeffs):
        nz = np.nonzero(row)[0]
        if len(nz) < 2:
            continue
        lead = row[nz[-1]]
        out[i] = 1.0 + np.max(np.abs(row[: nz[-1]] / lead))
    return out


# --------------------------------------------------------------------------
# general position


@dataclass
class ValidationReport:
    valid: bool
    checked: int
    exhaustive: bool
    degenerate_at_start: list = field(default_factory=list)
    identically_zero: list = field(default_factory=list)

    @property
    def offending(self):
        return sorted(set(map(tuple, self.degenerate_at_start)) | set(map(tuple, self.identically_zero)))


def _tuples(n, k, max_tuples, seed):
    total = math.comb(n, k)
    if total <= max_tuples:
        return np.array(list(itertools.combinations(range(n), k)), dtype=np.int64).reshape(-1, k), True
    rng = np.random.default_rng(seed)
    out = np.empty((max_tuples, k), dtype=np.int64)
    for i in range(max_tuples):
        out[i] = np.sort(rng.choice(n, k, replace=False))
    return out, False


def validate_general_position(P: MovingPointSet, max_tuples: int = 200_000, seed: int = 0) -> ValidationReport:
    """Check that no d+1 points of P(0) share a hyperplane.

    Every (d+1)-tuple is examined when there are at most ``max_tuples`` of
    them; beyond that a seeded uniform sample of ``max_tuples`` tuples is
    checked and the report is marked non-exhaustive.
    """
    d = P.dimension
    if P.n < d + 1:
        return ValidationReport(True, 0, True)
    tuples, exhaustive = _tuples(P.n, d + 1, max_tuples, seed)
    bad0, zero = [], []
    for s in range(0, len(tuples), 20_000):
        chunk = tuples[s:s + 20_000]
        rows = affine_rows(P.coeffs, chunk)
        dets = det_poly_batch(rows)
        # Hadamard bound of the t=0 matrix
        row_norms = np.sqrt((rows[..., 0] ** 2).sum(axis=2)).prod(axis=1)
        bad0.extend(map(tuple, chunk[np.abs(dets[:, 0]) <= DEGENERACY_REL * row_norms].tolist()))
        coef_scale = np.abs(rows).sum(axis=(1, 2, 3))
        zmask = np.all(np.abs(dets) <= 1e-13 * np.maximum(coef_scale, 1.0)[:, None] ** (d + 1), axis=1)
        zero.extend(map(tuple, chunk[zmask].tolist()))
    return ValidationReport(not bad0 and not zero, len(tuples), exhaustive, bad0, zero)


def perturb(P: MovingPointSet, magnitude: float = PERTURB_MAGNITUDE, seed: int = 0) -> MovingPointSet:
    """Add seeded uniform noise of the given magnitude to constant coefficients."""
    rng = np.random.default_rng(seed)
    c = P.coeffs.copy()
    c[:, :, 0] += rng.uniform(-magnitude, magnitude, size=c.shape[:2])
    return MovingPointSet(c, P.T, P.max_degree)


def ensure_general_position(P: MovingPointSet, seed: int = 0, attempts: int = 5):
    """Return ``(P', perturbed)``; perturbs only if validation fails."""
    report = validate_general_position(P, seed=seed)
    if report.valid:
        return P, False
    Q = P
    for k in range(attempts):
        Q = perturb(P, seed=seed + k)
        if validate_general_position(Q, seed=seed).valid:
            return Q, True
    raise DegenerateError("could not restore general position by perturbation", report.offending)
