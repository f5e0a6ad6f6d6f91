"""Deciding L-negligibility for declarative subsets of the unit square.

A set A is L-negligible when it fits inside (M x Y) union (X x N) for null
sets M, N of the marginals.  Over the closed piece grammar below (rectangles,
piecewise-linear graphs, finite point sets, symbolic countable sets) and
atomless marginal densities, the decision is rule-based and produces an
explicit witness cover (M, N) or the piece that blocks it.

The Kellerer-style numeric cross-check is :func:`max_plan_mass`: the largest
mass any coupling can place on the set's grid atoms, obtained by minimizing
the cost that is -1 on the set and 0 elsewhere.  Negligible sets must see
this tend to zero with the witness cover mass; non-negligible sets stay
bounded away from it.  Finite-grid evidence only, reported as a trend.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import GEOM_TOL, ConfigurationError, DensitySpec, Grid, extreal_to_json
from .costs import (
    CostDescriptor,
    CountableMarker,
    Graph,
    PointSet,
    Rectangle,
    Region,
    Segment,
    _axis_mask,
    _grid_mask,
    check_cost_value,
)
from .instance import Instance
from .solver import solve_primal

__all__ = [
    "RectanglePiece",
    "GraphPiece",
    "PointSetPiece",
    "CountableSetPiece",
    "SetDescriptor",
    "NullSet",
    "NegligibilityVerdict",
    "is_L_negligible",
    "grid_indicator",
    "max_plan_mass",
    "witness_cover_mass",
    "apply_null_modification",
    "NotNegligibleError",
]


@dataclass(frozen=True)
class RectanglePiece:
    x0: float
    x1: float
    y0: float
    y1: float


@dataclass(frozen=True)
class GraphPiece:
    segments: tuple[Segment, ...]


@dataclass(frozen=True)
class PointSetPiece:
    points: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class CountableSetPiece:
    """Symbolic countable subset (e.g. all rational pairs)."""


Piece = RectanglePiece | GraphPiece | PointSetPiece | CountableSetPiece


@dataclass(frozen=True)
class SetDescriptor:
    pieces: tuple[Piece, ...]


@dataclass(frozen=True)
class NullSet:
    """A null subset of [0, 1]: points, zero-measure intervals, and possibly
    a countable tail that no finite list captures."""

    points: tuple[float, ...] = ()
    intervals: tuple[tuple[float, float], ...] = ()
    countable: bool = False

    def union(self, other: "NullSet") -> "NullSet":
        return NullSet(
            points=tuple(sorted(set(self.points) | set(other.points))),
            intervals=tuple(sorted(set(self.intervals) | set(other.intervals))),
            countable=self.countable or other.countable,
        )


@dataclass(frozen=True)
class NegligibilityVerdict:
    negligible: bool
    witness: tuple[NullSet, NullSet] | None = None
    blocking_piece: int | None = None

    def to_json_dict(self) -> dict:
        d = {"negligible": self.negligible}
        if self.witness is not None:
            M, N = self.witness
            d["witness"] = {
                "M": {"points": list(M.points), "intervals": [list(iv) for iv in M.intervals], "countable": M.countable},
                "N": {"points": list(N.points), "intervals": [list(iv) for iv in N.intervals], "countable": N.countable},
            }
        if self.blocking_piece is not None:
            d["blocking_piece"] = self.blocking_piece
        return d


class NotNegligibleError(ValueError):
    def __init__(self, piece_index: int):
        super().__init__(f"set is not L-negligible (blocking piece {piece_index})")
        self.piece_index = piece_index


def is_L_negligible(
    A: SetDescriptor, mu_spec: DensitySpec, nu_spec: DensitySpec
) -> NegligibilityVerdict:
    """Rule-based decision over the piece grammar, atomless marginals assumed.

    Witnesses compose by finite union: each piece contributes its own null
    cover, and the first piece with no null cover blocks the verdict.
    """
    M = NullSet()
    N = NullSet()
    for idx, piece in enumerate(A.pieces):
        if isinstance(piece, RectanglePiece):
            if mu_spec.measure(piece.x0, piece.x1) <= GEOM_TOL:
                M = M.union(_interval_null(piece.x0, piece.x1))
            elif nu_spec.measure(piece.y0, piece.y1) <= GEOM_TOL:
                N = N.union(_interval_null(piece.y0, piece.y1))
            else:
                return NegligibilityVerdict(False, blocking_piece=idx)
        elif isinstance(piece, GraphPiece):
            for seg in piece.segments:
                if seg.is_constant:
                    N = N.union(NullSet(points=(seg.y_start,)))
                elif mu_spec.measure(seg.x0, seg.x1) <= GEOM_TOL:
                    M = M.union(_interval_null(seg.x0, seg.x1))
                elif nu_spec.measure(*seg.y_interval) <= GEOM_TOL:
                    N = N.union(_interval_null(*seg.y_interval))
                else:
                    # a strictly sloped segment maps positive mu-mass onto
                    # positive nu-mass: no null cover can exist
                    return NegligibilityVerdict(False, blocking_piece=idx)
        elif isinstance(piece, PointSetPiece):
            M = M.union(NullSet(points=tuple(p[0] for p in piece.points)))
        elif isinstance(piece, CountableSetPiece):
            M = M.union(NullSet(countable=True))
        else:
            raise ConfigurationError(f"unknown piece {piece!r}")
    return NegligibilityVerdict(True, witness=(M, N))


def _interval_null(a: float, b: float) -> NullSet:
    if b - a <= GEOM_TOL:
        return NullSet(points=(a,))
    return NullSet(intervals=((a, b),))


# ---------------------------------------------------------------------------
# grid realization and the Kellerer cross-check
# ---------------------------------------------------------------------------


def _piece_mask(piece: Piece, atoms: np.ndarray) -> np.ndarray:
    n = atoms.size
    if isinstance(piece, RectanglePiece):
        return (
            _axis_mask(piece.x0, piece.x1, atoms)[:, None]
            & _axis_mask(piece.y0, piece.y1, atoms)[None, :]
        )
    if isinstance(piece, GraphPiece):
        return _grid_mask(Graph(piece.segments), atoms)
    if isinstance(piece, PointSetPiece):
        return _grid_mask(PointSet(piece.points), atoms)
    if isinstance(piece, CountableSetPiece):
        # symbolic: every atom is rational, but the set is null; it owns no
        # grid atoms, matching the sampling convention for markers
        return np.zeros((n, n), dtype=bool)
    raise ConfigurationError(f"unknown piece {piece!r}")


def grid_indicator(A: SetDescriptor, grid: Grid) -> np.ndarray:
    atoms = grid.atoms
    mask = np.zeros((grid.n, grid.n), dtype=bool)
    for piece in A.pieces:
        mask |= _piece_mask(piece, atoms)
    return mask


def max_plan_mass(A: SetDescriptor, mu, nu, n: int) -> float:
    """Largest mass any coupling of (mu, nu) puts on the grid atoms of A."""
    grid = Grid(n)
    ind = grid_indicator(A, grid)
    cost = np.where(ind, -1.0, 0.0)
    report = solve_primal(cost, mu, nu)
    return float(-report.value) + 0.0  # normalize -0.0


def witness_cover_mass(
    witness: tuple[NullSet, NullSet],
    mu_spec: DensitySpec,
    nu_spec: DensitySpec,
    n: int,
) -> float:
    """Grid mass of the witness cover: mu-mass of atoms hit by M plus nu-mass
    of atoms hit by N (the Kellerer bound for max_plan_mass)."""
    grid = Grid(n)
    atoms = grid.atoms
    M, N = witness
    total = 0.0
    for side, spec in ((M, mu_spec), (N, nu_spec)):
        w = spec.cell_weights(grid)
        hit = np.zeros(n, dtype=bool)
        for p in side.points:
            hit |= np.abs(atoms - p) <= GEOM_TOL
        for a, b in side.intervals:
            hit |= (atoms > a + GEOM_TOL) & (atoms <= b + GEOM_TOL)
        total += float(w[hit].sum())
    return total


# ---------------------------------------------------------------------------
# null modifications
# ---------------------------------------------------------------------------


def _piece_to_region(piece: Piece, value: float) -> Region:
    if isinstance(piece, RectanglePiece):
        return Region(Rectangle(piece.x0, piece.x1, piece.y0, piece.y1), value)
    if isinstance(piece, GraphPiece):
        return Region(Graph(piece.segments), value)
    if isinstance(piece, PointSetPiece):
        return Region(PointSet(piece.points), value)
    if isinstance(piece, CountableSetPiece):
        return Region(CountableMarker(), value)
    raise ConfigurationError(f"unknown piece {piece!r}")


def set_descriptor_to_json(A: SetDescriptor) -> dict:
    pieces = []
    for p in A.pieces:
        if isinstance(p, RectanglePiece):
            pieces.append({"kind": "rectangle", "box": [p.x0, p.x1, p.y0, p.y1]})
        elif isinstance(p, GraphPiece):
            pieces.append(
                {
                    "kind": "graph",
                    "segments": [[s.x0, s.x1, s.y_start, s.y_end] for s in p.segments],
                }
            )
        elif isinstance(p, PointSetPiece):
            pieces.append({"kind": "point_set", "points": [list(q) for q in p.points]})
        elif isinstance(p, CountableSetPiece):
            pieces.append({"kind": "countable_set"})
    return {"pieces": pieces}


def set_descriptor_from_json(d: dict) -> SetDescriptor:
    pieces: list[Piece] = []
    for p in d["pieces"]:
        kind = p.get("kind")
        if kind == "rectangle":
            pieces.append(RectanglePiece(*map(float, p["box"])))
        elif kind == "graph":
            pieces.append(
                GraphPiece(tuple(Segment(*map(float, s)) for s in p["segments"]))
            )
        elif kind == "point_set":
            pieces.append(
                PointSetPiece(tuple((float(q[0]), float(q[1])) for q in p["points"]))
            )
        elif kind == "countable_set":
            pieces.append(CountableSetPiece())
        else:
            raise ConfigurationError(f"unknown set piece kind {kind!r}")
    return SetDescriptor(tuple(pieces))


def apply_null_modification(
    instance: Instance, A: SetDescriptor, new_value: float
) -> Instance:
    """Override the cost on A, refusing unless A is L-negligible.

    The override is appended as final regions (last match wins), so grid
    atoms inside A take the new value while the transport values stay within
    the mass of the touched cells; countable pieces never touch an atom.
    """
    new_value = check_cost_value(new_value)
    verdict = is_L_negligible(A, instance.marginal_x, instance.marginal_y)
    if not verdict.negligible:
        raise NotNegligibleError(verdict.blocking_piece)
    override = tuple(_piece_to_region(p, new_value) for p in A.pieces)
    return replace(
        instance,
        name=instance.name + "+mod",
        cost=CostDescriptor(instance.cost.regions + override),
        modification={
            "set": set_descriptor_to_json(A),
            "value": extreal_to_json(new_value),
        },
    )
