"""Transport problem instances and their on-disk JSON format."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .core import (
    ConfigurationError,
    DensitySpec,
    DiscreteMeasure,
    Grid,
    extreal_from_json,
    extreal_to_json,
)
from .costs import (
    CostDescriptor,
    descriptor_from_json,
    descriptor_to_json,
    discretize_cost,
    sample_cost,
)


@dataclass(frozen=True)
class Instance:
    """A transport problem on the unit square with marginal densities.

    ``known_rectified`` and ``known_values`` carry closed forms attached to
    the instance (see the catalog); they are inputs, never computed here.
    ``modification`` records an applied null-set cost override for the file
    format (the override regions are already baked into ``cost``).
    """

    name: str
    marginal_x: DensitySpec
    marginal_y: DensitySpec
    cost: CostDescriptor
    known_rectified: CostDescriptor | None = None
    known_values: dict | None = None
    modification: dict | None = None

    def with_cost(self, cost: CostDescriptor, suffix: str = "") -> "Instance":
        return replace(self, name=self.name + suffix, cost=cost)


def discretize(
    instance: Instance, n: int
) -> tuple[np.ndarray, DiscreteMeasure, DiscreteMeasure]:
    """Grid realization: cost matrix plus both marginal measures at resolution n."""
    grid = Grid(n)
    C = discretize_cost(instance.cost, grid)
    mu = DiscreteMeasure.from_density(instance.marginal_x, grid)
    nu = DiscreteMeasure.from_density(instance.marginal_y, grid)
    return C, mu, nu


def sample_instance_cost(instance: Instance, x: float, y: float) -> float:
    return sample_cost(instance.cost, x, y)


# ---------------------------------------------------------------------------
# instance files
# ---------------------------------------------------------------------------


def instance_to_json_dict(inst: Instance) -> dict:
    d = {
        "name": inst.name,
        "marginal_x": inst.marginal_x.to_json_dict(),
        "marginal_y": inst.marginal_y.to_json_dict(),
        "cost": descriptor_to_json(inst.cost),
    }
    if inst.known_rectified is not None:
        d["known_rectified"] = descriptor_to_json(inst.known_rectified)
    if inst.known_values is not None:
        d["known_values"] = {
            k: extreal_to_json(v) for k, v in sorted(inst.known_values.items())
        }
    if inst.modification is not None:
        d["modification"] = inst.modification
    return d


def instance_from_json_dict(d: dict) -> Instance:
    try:
        known_values = None
        if "known_values" in d:
            known_values = {
                k: extreal_from_json(v) for k, v in d["known_values"].items()
            }
        return Instance(
            name=str(d["name"]),
            marginal_x=DensitySpec.from_json_dict(d["marginal_x"]),
            marginal_y=DensitySpec.from_json_dict(d["marginal_y"]),
            cost=descriptor_from_json(d["cost"]),
            known_rectified=(
                descriptor_from_json(d["known_rectified"])
                if "known_rectified" in d
                else None
            ),
            known_values=known_values,
            modification=d.get("modification"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"malformed instance document: {exc}") from exc


def dumps_instance(inst: Instance) -> str:
    """Canonical serialization (sorted keys) so round-trips are byte-exact."""
    return json.dumps(instance_to_json_dict(inst), sort_keys=True, indent=2) + "\n"


def loads_instance(text: str) -> Instance:
    try:
        return instance_from_json_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"instance file is not valid JSON: {exc}") from exc


def save_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(dumps_instance(inst))


def load_instance(path: str | Path) -> Instance:
    return loads_instance(Path(path).read_text())
