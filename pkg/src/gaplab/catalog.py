"""Canonical instance catalog: every quantitative phenomenon in one place.

Each entry couples a transport instance with its known continuum values
(primal, dual, rectified primal) and a short note on why those values hold.
The values are attached data, never recomputed here; the solver and the
acceptance suite confront them with grid results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import INF, ConfigurationError, DensitySpec
from .costs import (
    ComplementOfIntervals,
    CostDescriptor,
    CountableMarker,
    Rectangle,
    Region,
    diagonal_split,
    whole_square,
)
from .instance import Instance

__all__ = [
    "CatalogEntry",
    "catalog",
    "catalog_names",
    "get_instance",
    "diag_inf",
    "diag_M",
    "rational_nullmod",
    "fat_set",
    "trivial_zero",
    "random_finite",
    "rational_enumeration",
    "excluded_intervals",
    "fat_set_alpha",
    "complement_measure",
]


@dataclass(frozen=True)
class CatalogEntry:
    instance: Instance
    continuum_values: dict
    notes: dict
    tags: tuple[str, ...]


# ---------------------------------------------------------------------------
# the fat closed set D = [0,1] minus a union of shrinking rational intervals
# ---------------------------------------------------------------------------


def rational_enumeration(count: int) -> list[Fraction]:
    """First ``count`` rationals in [0, 1], ordered by denominator then
    numerator, each in lowest terms (0/1, 1/1, 1/2, 1/3, 2/3, 1/4, 3/4, ...)."""
    out: list[Fraction] = []
    d = 1
    while len(out) < count:
        for p in range(0, d + 1):
            if math.gcd(p, d) == 1:
                out.append(Fraction(p, d))
                if len(out) == count:
                    return out
        d += 1
    return out


def excluded_intervals(alpha: float, count: int) -> list[tuple[float, float]]:
    """Open intervals (q_k - alpha/2^k, q_k + alpha/2^k) for k = 1..count."""
    qs = rational_enumeration(count)
    return [
        (float(q) - alpha / 2**k, float(q) + alpha / 2**k)
        for k, q in enumerate(qs, start=1)
    ]


def _union_measure(intervals, lo: float = 0.0, hi: float = 1.0) -> float:
    """Lebesgue measure of (union of open intervals) intersected with [lo, hi]."""
    clipped = sorted(
        (max(a, lo), min(b, hi)) for a, b in intervals if min(b, hi) > max(a, lo)
    )
    total = 0.0
    cur_lo = cur_hi = None
    for a, b in clipped:
        if cur_hi is None or a > cur_hi:
            if cur_hi is not None:
                total += cur_hi - cur_lo
            cur_lo, cur_hi = a, b
        else:
            cur_hi = max(cur_hi, b)
    if cur_hi is not None:
        total += cur_hi - cur_lo
    return total


def complement_measure(alpha: float, count: int) -> float:
    """lambda([0,1] minus the first ``count`` excluded intervals)."""
    return 1.0 - _union_measure(excluded_intervals(alpha, count))


#: enough intervals that the neglected tail is far below double precision
_ALPHA_DEPTH = 80


def fat_set_alpha(target: float = 0.5, depth: int = _ALPHA_DEPTH) -> float:
    """Solve complement_measure(alpha, depth) == target by bisection.

    The interval-union measure is continuous and strictly decreasing in
    alpha until the union covers [0, 1], so plain bisection is exact to
    floating precision.  Intervals past ``depth`` have total length below
    2*alpha*2^-depth and cannot move the answer at double precision.
    """
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if complement_measure(mid, depth) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# instances
# ---------------------------------------------------------------------------

_UNIFORM = DensitySpec.uniform()


def diag_inf() -> Instance:
    """Zero below the diagonal, one on it, forbidden above it."""
    return Instance(
        name="diag_inf",
        marginal_x=_UNIFORM,
        marginal_y=_UNIFORM,
        cost=diagonal_split(0.0, 1.0, INF),
        known_rectified=diagonal_split(0.0, 0.0, INF),
        known_values={"P_c": 1.0, "D_c": 0.0, "P_rectified": 0.0},
    )


def diag_M(M: float = 2.0) -> Instance:
    """Finite variant: the forbidden region costs M > 1 instead of +inf."""
    if not M > 1:
        raise ConfigurationError(f"the finite variant needs M > 1, got {M}")
    return Instance(
        name=f"diag_M_{M:g}",
        marginal_x=_UNIFORM,
        marginal_y=_UNIFORM,
        cost=diagonal_split(0.0, 1.0, M),
        known_rectified=diagonal_split(0.0, 0.0, M),
        known_values={"P_c": 0.0, "D_c": 0.0, "P_rectified": 0.0},
    )


def rational_nullmod() -> Instance:
    """c == 1 modified to 0 on the rational pairs: a null modification that
    leaves the problem equivalent to the constant-one cost."""
    return Instance(
        name="rational_nullmod",
        marginal_x=_UNIFORM,
        marginal_y=_UNIFORM,
        cost=CostDescriptor((whole_square(1.0), Region(CountableMarker(), 0.0))),
        known_rectified=CostDescriptor((whole_square(1.0),)),
        known_values={"P_c": 1.0, "D_c": 1.0, "P_rectified": 1.0},
    )


def fat_set(K: int = 20, alpha: float | None = None) -> Instance:
    """Indicator of a fat closed set D (measure 1/2 in the limit), tensored
    with zero: the cost depends on x only, so primal and dual both equal the
    measure of the K-interval approximation of D."""
    if K < 1:
        raise ConfigurationError("fat_set needs at least one excluded interval")
    if alpha is None:
        alpha = fat_set_alpha()
    intervals = tuple(excluded_intervals(alpha, K))
    return Instance(
        name=f"fat_set_{K}",
        marginal_x=_UNIFORM,
        marginal_y=_UNIFORM,
        cost=CostDescriptor(
            (
                whole_square(0.0),
                Region(ComplementOfIntervals(intervals, "x"), 1.0),
            )
        ),
        known_rectified=CostDescriptor(
            (
                whole_square(0.0),
                Region(ComplementOfIntervals(intervals, "x"), 1.0),
            )
        ),
        known_values={"P_c": 0.5, "D_c": 0.5, "P_rectified": 0.5},
    )


def trivial_zero() -> Instance:
    return Instance(
        name="trivial_zero",
        marginal_x=_UNIFORM,
        marginal_y=_UNIFORM,
        cost=CostDescriptor((whole_square(0.0),)),
        known_rectified=CostDescriptor((whole_square(0.0),)),
        known_values={"P_c": 0.0, "D_c": 0.0, "P_rectified": 0.0},
    )


def random_finite(
    seed: int, n: int, value_range: tuple[float, float] = (0.0, 1.0)
) -> Instance:
    """Seeded finite-cost instance: one constant value per grid cell, uniform
    marginals.  Deterministic per (seed, n, value_range)."""
    if n > 64:
        raise ConfigurationError("random instances are capped at n = 64")
    lo, hi = value_range
    if not (0 <= lo < hi):
        raise ConfigurationError("value range must satisfy 0 <= lo < hi")
    rng = np.random.default_rng(seed)
    values = rng.uniform(lo, hi, size=(n, n))
    regions = [whole_square(float(values[0, 0]))]
    for i in range(n):
        for j in range(n):
            if i == 0 and j == 0:
                continue
            regions.append(
                Region(
                    Rectangle(i / n, (i + 1) / n, j / n, (j + 1) / n),
                    float(values[i, j]),
                )
            )
    return Instance(
        name=f"random_finite_s{seed}_n{n}",
        marginal_x=_UNIFORM,
        marginal_y=_UNIFORM,
        cost=CostDescriptor(tuple(regions)),
    )


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------


def catalog(M: float = 2.0, K: int = 20, seed: int = 0, n: int = 8) -> list[CatalogEntry]:
    """All canonical entries; parameters feed the parametrized families."""
    return [
        CatalogEntry(
            instance=diag_inf(),
            continuum_values={"P_c": 1.0, "D_c": 0.0, "P_rectified": 0.0},
            notes={
                "P_c": "the only finite-cost coupling is the diagonal one",
                "D_c": "feasible pairs exceed zero on at most countably many x",
                "P_rectified": "zeroing the diagonal value restores duality",
            },
            tags=("duality-gap", "forbidden-arcs"),
        ),
        CatalogEntry(
            instance=diag_M(M),
            continuum_values={"P_c": 0.0, "D_c": 0.0, "P_rectified": 0.0},
            notes={
                "P_c": "infimum 0 not attained; optimizers drift to the diagonal",
                "D_c": "bounded cost, duality holds",
                "P_rectified": "rectified cost vanishes on and below the diagonal",
            },
            tags=("non-attainment", "finite-cost"),
        ),
        CatalogEntry(
            instance=rational_nullmod(),
            continuum_values={"P_c": 1.0, "D_c": 1.0, "P_rectified": 1.0},
            notes={
                "P_c": "modification lives on a null set; equivalent to cost 1",
                "D_c": "same",
                "P_rectified": "rectification leaves the constant cost alone",
            },
            tags=("null-modification",),
        ),
        CatalogEntry(
            instance=fat_set(K),
            continuum_values={"P_c": 0.5, "D_c": 0.5, "P_rectified": 0.5},
            notes={
                "P_c": "cost depends on x only: every coupling pays mu(D)",
                "D_c": "indicator pair (I_D, 0) is an optimal dual pair",
                "P_rectified": "no lower semi-continuous minorant does better",
            },
            tags=("fat-set", "attained"),
        ),
        CatalogEntry(
            instance=trivial_zero(),
            continuum_values={"P_c": 0.0, "D_c": 0.0, "P_rectified": 0.0},
            notes={"P_c": "zero cost", "D_c": "zero cost", "P_rectified": "zero cost"},
            tags=("trivial",),
        ),
        CatalogEntry(
            instance=random_finite(seed, n),
            continuum_values={},
            notes={},
            tags=("random", "finite-cost"),
        ),
    ]


def catalog_names() -> list[str]:
    return ["diag_inf", "diag_M", "rational_nullmod", "fat_set", "trivial_zero", "random_finite"]


def get_instance(
    name: str,
    M: float = 2.0,
    K: int = 20,
    seed: int = 0,
    n: int = 8,
) -> Instance:
    """Instantiate a catalog family by name (CLI entry point)."""
    if name == "diag_inf":
        return diag_inf()
    if name == "diag_M":
        return diag_M(M)
    if name == "rational_nullmod":
        return rational_nullmod()
    if name == "fat_set":
        return fat_set(K)
    if name == "trivial_zero":
        return trivial_zero()
    if name == "random_finite":
        return random_finite(seed, n)
    raise ConfigurationError(f"unknown catalog instance {name!r}")
