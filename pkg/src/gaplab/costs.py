"""Cost descriptors over the unit square and their grid realizations.

A cost is described declaratively as an ordered list of regions, each a
(matcher, value) pair; sampling at a point returns the value of the last
matching region.  Matching uses the half-open convention of the grid cells:
rectangles are (x0, x1] x (y0, y1], with degenerate sides matched exactly.

The ``complement_of_intervals`` kind (an indicator along one axis, constant
along the other) is the one region whose grid realization is *not* point
sampling: ``discretize_cost`` blends it into each cell by the exact Lebesgue
fraction of the cell lying outside the intervals, so that cost integrals
against couplings reproduce interval measures exactly instead of atom
counts.  Point queries through ``sample_cost`` remain pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    GEOM_TOL,
    INF,
    ConfigurationError,
    Grid,
    check_cost_value,
    extreal_from_json,
    extreal_to_json,
)

# ---------------------------------------------------------------------------
# region matchers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BelowDiagonal:
    def matches(self, x: float, y: float) -> bool:
        return y < x - GEOM_TOL


@dataclass(frozen=True)
class Diagonal:
    def matches(self, x: float, y: float) -> bool:
        return abs(x - y) <= GEOM_TOL


@dataclass(frozen=True)
class AboveDiagonal:
    def matches(self, x: float, y: float) -> bool:
        return y > x + GEOM_TOL


@dataclass(frozen=True)
class Rectangle:
    """(x0, x1] x (y0, y1]; a degenerate side (x0 == x1) matches exactly."""

    x0: float
    x1: float
    y0: float
    y1: float

    def _axis_match(self, lo: float, hi: float, t: float) -> bool:
        if hi - lo <= GEOM_TOL:
            return abs(t - lo) <= GEOM_TOL
        return lo + GEOM_TOL < t <= hi + GEOM_TOL

    def matches(self, x: float, y: float) -> bool:
        return self._axis_match(self.x0, self.x1, x) and self._axis_match(
            self.y0, self.y1, y
        )


@dataclass(frozen=True)
class Segment:
    """Straight graph segment y = f(x) over [x0, x1], f affine."""

    x0: float
    x1: float
    y_start: float
    y_end: float

    def __post_init__(self):
        if self.x1 < self.x0:
            raise ConfigurationError("segment needs x0 <= x1")

    @property
    def is_constant(self) -> bool:
        return abs(self.y_end - self.y_start) <= GEOM_TOL

    def value_at(self, x: float) -> float:
        if self.x1 == self.x0:
            return self.y_start
        t = (x - self.x0) / (self.x1 - self.x0)
        return (1 - t) * self.y_start + t * self.y_end

    @property
    def y_interval(self) -> tuple[float, float]:
        return (min(self.y_start, self.y_end), max(self.y_start, self.y_end))

    def matches(self, x: float, y: float) -> bool:
        if not (self.x0 - GEOM_TOL <= x <= self.x1 + GEOM_TOL):
            return False
        return abs(self.value_at(x) - y) <= GEOM_TOL


@dataclass(frozen=True)
class Graph:
    """Piecewise-linear graph: union of finitely many segments."""

    segments: tuple[Segment, ...]

    def matches(self, x: float, y: float) -> bool:
        return any(s.matches(x, y) for s in self.segments)


@dataclass(frozen=True)
class PointSet:
    points: tuple[tuple[float, float], ...]

    def matches(self, x: float, y: float) -> bool:
        return any(
            abs(x - px) <= GEOM_TOL and abs(y - py) <= GEOM_TOL
            for px, py in self.points
        )


@dataclass(frozen=True)
class CountableMarker:
    """Symbolic modification on a countable (hence L-negligible) set.

    Every grid atom pair has rational coordinates, so sampling a countable
    modification would repaint the whole grid; the marker therefore never
    matches and only records that the modification happened on a null set.
    """

    def matches(self, x: float, y: float) -> bool:
        return False


@dataclass(frozen=True)
class ComplementOfIntervals:
    """Points whose ``axis`` coordinate avoids every open interval, constant
    along the other axis."""

    intervals: tuple[tuple[float, float], ...]
    axis: str = "x"

    def __post_init__(self):
        if self.axis not in ("x", "y"):
            raise ConfigurationError("axis must be 'x' or 'y'")

    def matches(self, x: float, y: float) -> bool:
        t = x if self.axis == "x" else y
        return all(not (a < t < b) for a, b in self.intervals)

    def outside_fraction(self, lo: float, hi: float) -> float:
        """Lebesgue fraction of (lo, hi] not covered by the open intervals."""
        if hi <= lo:
            return 0.0
        covered = 0.0
        events = sorted((max(a, lo), min(b, hi)) for a, b in self.intervals)
        cur_lo, cur_hi = None, None
        for a, b in events:
            if b <= a:
                continue
            if cur_hi is None or a > cur_hi:
                if cur_hi is not None:
                    covered += cur_hi - cur_lo
                cur_lo, cur_hi = a, b
            else:
                cur_hi = max(cur_hi, b)
        if cur_hi is not None:
            covered += cur_hi - cur_lo
        return max(0.0, (hi - lo) - covered) / (hi - lo)


RegionKind = (
    BelowDiagonal
    | Diagonal
    | AboveDiagonal
    | Rectangle
    | Graph
    | PointSet
    | CountableMarker
    | ComplementOfIntervals
)


@dataclass(frozen=True)
class Region:
    where: RegionKind
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", check_cost_value(self.value))


@dataclass(frozen=True)
class CostDescriptor:
    """Ordered region list; the last matching region wins at every point."""

    regions: tuple[Region, ...]

    def __post_init__(self):
        if not self.regions:
            raise ConfigurationError("a cost descriptor needs at least one region")


def whole_square(value: float) -> Region:
    return Region(Rectangle(0.0, 1.0, 0.0, 1.0), value)


def diagonal_split(below: float, on: float, above: float) -> CostDescriptor:
    return CostDescriptor(
        (
            Region(BelowDiagonal(), below),
            Region(Diagonal(), on),
            Region(AboveDiagonal(), above),
        )
    )


# ---------------------------------------------------------------------------
# sampling and grid realization
# ---------------------------------------------------------------------------


def sample_cost(descriptor: CostDescriptor, x: float, y: float) -> float:
    """Evaluate the descriptor at one point of (0, 1]^2 (last match wins)."""
    if not (0 < x <= 1 + GEOM_TOL and 0 < y <= 1 + GEOM_TOL):
        raise ConfigurationError(f"sample point ({x}, {y}) outside (0, 1]^2")
    value = None
    for region in descriptor.regions:
        if region.where.matches(x, y):
            value = region.value
    if value is None:
        raise ConfigurationError(f"descriptor has no region matching ({x}, {y})")
    return value


def _axis_mask(lo: float, hi: float, atoms: np.ndarray) -> np.ndarray:
    if hi - lo <= GEOM_TOL:
        return np.abs(atoms - lo) <= GEOM_TOL
    return (atoms > lo + GEOM_TOL) & (atoms <= hi + GEOM_TOL)


def _grid_mask(kind: RegionKind, atoms: np.ndarray) -> np.ndarray:
    """Boolean atom-pair mask for a point-sampled region kind."""
    x = atoms[:, None]
    y = atoms[None, :]
    if isinstance(kind, BelowDiagonal):
        return y < x - GEOM_TOL
    if isinstance(kind, Diagonal):
        return np.abs(x - y) <= GEOM_TOL
    if isinstance(kind, AboveDiagonal):
        return y > x + GEOM_TOL
    if isinstance(kind, Rectangle):
        return (
            _axis_mask(kind.x0, kind.x1, atoms)[:, None]
            & _axis_mask(kind.y0, kind.y1, atoms)[None, :]
        )
    if isinstance(kind, Graph):
        mask = np.zeros((atoms.size, atoms.size), dtype=bool)
        for s in kind.segments:
            xs = (atoms >= s.x0 - GEOM_TOL) & (atoms <= s.x1 + GEOM_TOL)
            fx = np.array([s.value_at(a) for a in atoms])
            mask |= xs[:, None] & (np.abs(fx[:, None] - y) <= GEOM_TOL)
        return mask
    if isinstance(kind, PointSet):
        mask = np.zeros((atoms.size, atoms.size), dtype=bool)
        for px, py in kind.points:
            mask |= (np.abs(atoms - px) <= GEOM_TOL)[:, None] & (
                np.abs(atoms - py) <= GEOM_TOL
            )[None, :]
        return mask
    raise ConfigurationError(f"no grid mask for region kind {kind!r}")


def discretize_cost(descriptor: CostDescriptor, grid: Grid) -> np.ndarray:
    """Realize the descriptor as an n x n matrix over the grid atoms.

    Regions are painted in order onto the matrix.  All kinds are sampled at
    the atoms except ``ComplementOfIntervals``, which is blended by the exact
    per-cell fraction lying outside its intervals (cells fully outside take
    the region value, fully covered cells keep the value underneath), so that
    coupling integrals reproduce interval measures exactly.
    """
    n = grid.n
    atoms = grid.atoms
    C = np.full((n, n), np.nan)
    painted = np.zeros((n, n), dtype=bool)
    for region in descriptor.regions:
        kind = region.where
        if isinstance(kind, ComplementOfIntervals):
            fracs = np.array(
                [kind.outside_fraction(*grid.cell_bounds(i)) for i in range(n)]
            )
            under = np.where(painted, C, np.nan)
            axis_fr = (
                np.repeat(fracs[:, None], n, axis=1)
                if kind.axis == "x"
                else np.repeat(fracs[None, :], n, axis=0)
            )
            full = axis_fr >= 1.0 - GEOM_TOL
            empty = axis_fr <= GEOM_TOL
            partial = ~full & ~empty
            if np.any(partial & ~painted):
                raise ConfigurationError(
                    "complement_of_intervals blends into uncovered cells"
                )
            # partial cells blend with the value underneath; inf stays inf
            with np.errstate(invalid="ignore"):
                mixed = axis_fr * region.value + (1.0 - axis_fr) * under
            C[full] = region.value
            C[partial] = mixed[partial]
            painted |= ~empty
        elif isinstance(kind, CountableMarker):
            continue
        else:
            mask = _grid_mask(kind, atoms)
            C[mask] = region.value
            painted |= mask
    if not painted.all():
        raise ConfigurationError("descriptor regions do not cover the grid")
    return C


def truncate_cost(C: np.ndarray, level: int) -> np.ndarray:
    """Clamp every entry into [0, level]; +inf maps to the level."""
    if level < 1:
        raise ValueError(f"truncation level must be a positive integer, got {level}")
    return np.minimum(np.asarray(C, dtype=float), float(level))


def plan_cost(C: np.ndarray, pi: np.ndarray) -> float:
    """Integral of the cost against a plan with the inf * 0 = 0 convention."""
    C = np.asarray(C, dtype=float)
    pi = np.asarray(pi, dtype=float)
    if C.shape != pi.shape:
        raise ValueError(f"shape mismatch: cost {C.shape} vs plan {pi.shape}")
    mask = pi > 0
    if np.any(np.isinf(C[mask])):
        return INF
    return float(np.sum(C[mask] * pi[mask]))


def max_finite_entry(C: np.ndarray) -> float:
    """Largest finite entry of C, or 0.0 if there is none."""
    C = np.asarray(C, dtype=float)
    finite = C[np.isfinite(C)]
    return float(finite.max()) if finite.size else 0.0


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def region_to_json(region: Region) -> dict:
    k = region.where
    v = extreal_to_json(region.value)
    if isinstance(k, BelowDiagonal):
        return {"kind": "below_diagonal", "value": v}
    if isinstance(k, Diagonal):
        return {"kind": "diagonal", "value": v}
    if isinstance(k, AboveDiagonal):
        return {"kind": "above_diagonal", "value": v}
    if isinstance(k, Rectangle):
        return {"kind": "rectangle", "box": [k.x0, k.x1, k.y0, k.y1], "value": v}
    if isinstance(k, Graph):
        return {
            "kind": "graph",
            "segments": [[s.x0, s.x1, s.y_start, s.y_end] for s in k.segments],
            "value": v,
        }
    if isinstance(k, PointSet):
        return {"kind": "point_set", "points": [list(p) for p in k.points], "value": v}
    if isinstance(k, CountableMarker):
        return {"kind": "countable_marker", "value": v}
    if isinstance(k, ComplementOfIntervals):
        return {
            "kind": "complement_of_intervals",
            "intervals": [list(iv) for iv in k.intervals],
            "axis": k.axis,
            "value": v,
        }
    raise ConfigurationError(f"unserializable region kind {k!r}")


def region_from_json(d: dict) -> Region:
    kind = d.get("kind")
    value = extreal_from_json(d["value"])
    if kind == "below_diagonal":
        return Region(BelowDiagonal(), value)
    if kind == "diagonal":
        return Region(Diagonal(), value)
    if kind == "above_diagonal":
        return Region(AboveDiagonal(), value)
    if kind == "rectangle":
        return Region(Rectangle(*map(float, d["box"])), value)
    if kind == "graph":
        segs = tuple(Segment(*map(float, s)) for s in d["segments"])
        return Region(Graph(segs), value)
    if kind == "point_set":
        pts = tuple((float(p[0]), float(p[1])) for p in d["points"])
        return Region(PointSet(pts), value)
    if kind == "countable_marker":
        return Region(CountableMarker(), value)
    if kind == "complement_of_intervals":
        ivs = tuple((float(a), float(b)) for a, b in d["intervals"])
        return Region(ComplementOfIntervals(ivs, d.get("axis", "x")), value)
    raise ConfigurationError(f"unknown region kind {kind!r}")


def descriptor_to_json(desc: CostDescriptor) -> dict:
    return {"regions": [region_to_json(r) for r in desc.regions]}


def descriptor_from_json(d: dict) -> CostDescriptor:
    return CostDescriptor(tuple(region_from_json(r) for r in d["regions"]))
