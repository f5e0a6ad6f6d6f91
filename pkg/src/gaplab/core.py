"""Shared numeric primitives: [0, inf]-valued costs, grids, densities, measures.

Conventions used throughout the package:

* Extended-real cost values live in ``[0, inf]`` and are stored as plain
  ``float`` / ``float64`` with ``math.inf`` for the infinite value.
* ``inf * 0 == 0``: integrating an infinite cost over zero mass gives zero.
  numpy would produce ``nan`` here, so summation against plans is done with
  explicit masking (see :func:`gaplab.costs.plan_cost`), never by a bare
  elementwise product.
* The unit square is discretized by the grid of right cell endpoints
  ``i/n`` for ``i = 1..n``; the cell owning atom ``i/n`` is the half-open
  square ``((i-1)/n, i/n] x ((j-1)/n, j/n]``.

All container types are immutable after construction (arrays are frozen),
so values can be shared freely across worker threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INF = math.inf

#: tolerance for exact geometric matches (atom-on-segment, atom-in-box)
GEOM_TOL = 1e-12

#: tolerance for mass / measure identities
MASS_TOL = 1e-12


class ConfigurationError(ValueError):
    """A descriptor or instance is malformed (does not cover, bad density, ...)."""


def is_inf(v: float) -> bool:
    return math.isinf(v) and v > 0


def check_cost_value(v: float) -> float:
    """Validate a single extended-real cost value (finite >= 0, or +inf)."""
    v = float(v)
    if math.isnan(v) or v < 0:
        raise ConfigurationError(f"cost values live in [0, inf], got {v!r}")
    return v


def extreal_to_json(v: float):
    """Serialize an extended real: finite numbers stay numbers, +inf -> "inf"."""
    return "inf" if is_inf(v) else float(v)


def extreal_from_json(v) -> float:
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "+inf", "infinity"):
            return INF
        raise ConfigurationError(f"not an extended real: {v!r}")
    return float(v)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Grid:
    """Uniform grid on (0, 1]: atoms at i/n, cells half-open to the left.

    The right-endpoint convention means every atom lies in exactly one cell
    at every coarser dyadic resolution, which the block-partition machinery
    relies on.
    """

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ConfigurationError(f"grid resolution must be >= 1, got {self.n}")

    @property
    def atoms(self) -> np.ndarray:
        return _frozen(np.arange(1, self.n + 1) / self.n)

    def cell_bounds(self, i: int) -> tuple[float, float]:
        """Bounds (lo, hi] of the cell owning atom ``i`` (0-based index)."""
        return (i / self.n, (i + 1) / self.n)

    @property
    def is_dyadic(self) -> bool:
        return self.n & (self.n - 1) == 0

    @property
    def depth(self) -> int:
        """Number of dyadic halvings until index ranges become singletons."""
        return max(1, math.ceil(math.log2(self.n))) if self.n > 1 else 1


@dataclass(frozen=True)
class DensitySpec:
    """Piecewise-constant probability density on [0, 1].

    ``breakpoints`` is the increasing sequence 0 = b_0 < ... < b_k = 1 and
    ``values[i]`` the density on (b_i, b_{i+1}).  Atomless by construction.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        bp, vals = self.breakpoints, self.values
        if len(bp) != len(vals) + 1 or len(vals) == 0:
            raise ConfigurationError("need k+1 breakpoints for k density pieces")
        if abs(bp[0]) > GEOM_TOL or abs(bp[-1] - 1.0) > GEOM_TOL:
            raise ConfigurationError("density breakpoints must span [0, 1]")
        if any(b1 <= b0 for b0, b1 in zip(bp, bp[1:])):
            raise ConfigurationError("breakpoints must be strictly increasing")
        if any(v < 0 for v in vals):
            raise ConfigurationError("densities are non-negative")
        if abs(self.measure(0.0, 1.0) - 1.0) > MASS_TOL:
            raise ConfigurationError("density must integrate to 1")

    @classmethod
    def uniform(cls) -> "DensitySpec":
        return cls(breakpoints=(0.0, 1.0), values=(1.0,))

    @property
    def is_uniform(self) -> bool:
        return len(self.values) == 1

    def measure(self, a: float, b: float) -> float:
        """Exact measure of the interval (a, b) under this density."""
        if b <= a:
            return 0.0
        total = 0.0
        for lo, hi, v in zip(self.breakpoints, self.breakpoints[1:], self.values):
            overlap = min(b, hi) - max(a, lo)
            if overlap > 0:
                total += v * overlap
        return total

    def cell_weights(self, grid: Grid) -> np.ndarray:
        """Integrate the density over each grid cell."""
        n = grid.n
        return np.array([self.measure(i / n, (i + 1) / n) for i in range(n)])

    def to_json_dict(self) -> dict:
        if self.is_uniform:
            return {"kind": "uniform"}
        return {
            "kind": "piecewise",
            "breakpoints": list(self.breakpoints),
            "values": list(self.values),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "DensitySpec":
        if d.get("kind") == "uniform":
            return cls.uniform()
        if d.get("kind") == "piecewise":
            return cls(tuple(d["breakpoints"]), tuple(d["values"]))
        raise ConfigurationError(f"unknown density spec {d!r}")


@dataclass(frozen=True)
class DiscreteMeasure:
    """Non-negative weights on the atoms of a grid; total mass in [0, 1]."""

    weights: np.ndarray

    def __post_init__(self):
        w = _frozen(self.weights)
        if w.ndim != 1:
            raise ConfigurationError("measure weights must be a vector")
        if np.any(w < -MASS_TOL):
            raise ConfigurationError("measure weights must be non-negative")
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_density(cls, spec: DensitySpec, grid: Grid) -> "DiscreteMeasure":
        return cls(spec.cell_weights(grid))

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.weights > 0)

    @property
    def is_probability(self) -> bool:
        return abs(self.total - 1.0) <= MASS_TOL

    def reweighted(self, factors: np.ndarray) -> "DiscreteMeasure":
        return DiscreteMeasure(self.weights * np.asarray(factors, dtype=float))
