"""Scenario files and seeded instance generators.

A scenario file is JSON with a fixed key order, one point per line and
floats in shortest round-trip form, so ``dumps(loads(text)) == text``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .ranges import FAMILIES
from .trajectory import MovingPointSet, ensure_general_position

GENERATORS = ("uniform", "static", "linear1d", "crossing_fan")
_PARAM_KEYS = ("epsilon", "k", "grid")


@dataclass(frozen=True)
class Scenario:
    dimension: int
    degree: int
    horizon: float
    seed: int
    points: np.ndarray  # (n, d, degree + 1), ascending coefficients
    family: str = "balls"
    params: dict = field(default_factory=dict)
    generator: str = "custom"
    perturbed: bool = False

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 3 or pts.shape[1] != self.dimension or pts.shape[2] != self.degree + 1:
            raise ValueError(f"points must have shape (n, {self.dimension}, {self.degree + 1}), got {pts.shape}")
        if pts.shape[0] < 1:
            raise ValueError("a scenario needs at least one point")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError("horizon must be positive")
        unknown = set(self.params) - set(_PARAM_KEYS)
        if unknown:
            raise ValueError(f"unknown parameters {sorted(unknown)}")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def moving_points(self) -> MovingPointSet:
        return MovingPointSet(self.points, horizon=self.horizon, max_degree=self.degree)

    def dumps(self) -> str:
        params = {k: self.params[k] for k in _PARAM_KEYS if k in self.params}
        head = [
            ("dimension", self.dimension),
            ("degree", self.degree),
            ("horizon", float(self.horizon)),
            ("seed", int(self.seed)),
            ("family", self.family),
            ("generator", self.generator),
            ("perturbed", bool(self.perturbed)),
            ("params", params),
        ]
        lines = ["{"]
        for key, val in head:
            lines.append(f"  {json.dumps(key)}: {json.dumps(val)},")
        lines.append('  "points": [')
        rows = [json.dumps(p) for p in self.points.tolist()]
        lines.extend(f"    {r}," for r in rows[:-1])
        lines.append(f"    {rows[-1]}")
        lines.append("  ]")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.dumps())


def loads(text: str) -> Scenario:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed scenario: {exc}") from None
    try:
        return Scenario(
            dimension=int(raw["dimension"]),
            degree=int(raw["degree"]),
            horizon=float(raw["horizon"]),
            seed=int(raw["seed"]),
            points=np.array(raw["points"], dtype=float),
            family=raw.get("family", "balls"),
            params=dict(raw.get("params", {})),
            generator=raw.get("generator", "custom"),
            perturbed=bool(raw.get("perturbed", False)),
        )
    except KeyError as exc:
        raise ValueError(f"scenario is missing key {exc}") from None


def load(path) -> Scenario:
    with open(path) as fh:
        return loads(fh.read())


def _finish(coeffs, dimension, degree, horizon, seed, family, params, generator) -> Scenario:
    P = MovingPointSet(coeffs, horizon=horizon, max_degree=degree)
    P2, perturbed = ensure_general_position(P, seed=seed)
    return Scenario(dimension, degree, float(horizon), int(seed), P2.coeffs, family, dict(params or {}),
                    generator, perturbed)


def generate_scenario(n: int, dimension: int = 2, degree: int = 1, horizon: float = 1.0, seed: int = 0,
                      generator: str = "uniform", family: str | None = None, box: float = 1.0,
                      params: dict | None = None) -> Scenario:
    """Seeded instance; general position is enforced by perturbation (recorded)."""
    if generator not in GENERATORS:
        raise ValueError(f"unknown generator {generator!r}; choose from {GENERATORS}")
    if n < 1 or dimension < 1 or degree < 0:
        raise ValueError("need n >= 1, dimension >= 1, degree >= 0")
    if not horizon > 0 or not box > 0:
        raise ValueError("horizon and box must be positive")
    if family is None:
        family = "intervals" if dimension == 1 else "balls"
    rng = np.random.default_rng(seed)
    if generator == "uniform":
        coeffs = rng.uniform(-box, box, (n, dimension, degree + 1))
    elif generator == "static":
        coeffs = rng.uniform(-box, box, (n, dimension, 1))
        degree = 0
    else:
        if dimension != 1:
            raise ValueError(f"{generator} is a one-dimensional generator")
        if generator == "linear1d":
            coeffs = rng.uniform(-box, box, (n, 1, 2))
        else:
            coeffs = _crossing_fan(n, horizon, box, rng)
        degree = 1
    return _finish(coeffs, dimension, degree, horizon, seed, family, params, generator)


def _crossing_fan(n, horizon, box, rng):
    # lines x_i(t) = m_i (t - p_i) with increasing slopes and pivots jittered
    # around mid-horizon: every pair crosses once, at distinct times inside
    m = box * (1.0 + np.arange(n)) / n
    p = 0.5 * horizon + rng.uniform(-1.0, 1.0, n) * horizon / (8.0 * n)
    coeffs = np.empty((n, 1, 2))
    coeffs[:, 0, 0] = -m * p
    coeffs[:, 0, 1] = m
    return coeffs


def with_params(sc: Scenario, **kw) -> Scenario:
    params = dict(sc.params)
    params.update({k: v for k, v in kw.items() if v is not None})
    return replace(sc, params=params)
