"""Generator families by name, with their parameter names and types."""

from dataclasses import dataclass, replace
from typing import Callable

from src.errors import InvalidParameterError
from src.geometry.cloud import PointCloud
from src.generators.helix import (
    gen_helix_single_turn,
    gen_helix_spread,
    gen_helix_sqrt,
    gen_lower_bound,
    gen_mattress,
)
from src.generators.seams import DEFAULT_EPS, gen_seams
from src.generators.spheres import gen_ball_rows, gen_random_ball_rows, gen_sphere_spiral


@dataclass(frozen=True)
class Family:
    """A generator and the keyword parameters it takes."""

    name: str
    build: Callable[..., PointCloud]
    params: dict
    defaults: dict
    seeded: bool = False


FAMILIES = {
    f.name: f for f in (
        Family("helix", gen_helix_sqrt, {"n": int, "caps": bool}, {"caps": False}),
        Family("helix-spread", gen_helix_spread, {"n": int, "spread": float}, {}),
        Family("mattress", gen_mattress, {"n": int, "spread": float}, {}),
        Family("single-turn", gen_helix_single_turn, {"n": int, "spacing": str}, {"spacing": "even"}, seeded=True),
        Family("seams", gen_seams, {"m": int, "eps": float}, {"eps": DEFAULT_EPS}),
        Family("ball-rows", gen_ball_rows, {"k": int, "per_sphere": int}, {"per_sphere": 128}, seeded=True),
        Family("random-ball-rows", gen_random_ball_rows, {"k": int, "n": int}, {}, seeded=True),
        Family("lower-bound", gen_lower_bound, {"n": int, "spread": float}, {}),
        Family("sphere", gen_sphere_spiral, {"count": int}, {}, seeded=True),
    )
}


def generate(family: str, seed: int = 0, **params) -> PointCloud:
    """Build a cloud by family name.

    Args:
        family: One of FAMILIES (underscores are accepted for hyphens)
        seed: Used by seeded families and recorded by all
        **params: Family parameters; unknown names are rejected

    Returns:
        PointCloud whose provenance carries the materialised seed
    """
    key = family.replace("_", "-")
    if key not in FAMILIES:
        raise InvalidParameterError(f"unknown generator family '{family}'; choose from {sorted(FAMILIES)}")
    fam = FAMILIES[key]

    unknown = set(params) - set(fam.params)
    if unknown:
        raise InvalidParameterError(f"{key} does not take {sorted(unknown)}")
    args = {**fam.defaults, **{k: v for k, v in params.items() if v is not None}}
    missing = [name for name in fam.params if name not in args]
    if missing:
        raise InvalidParameterError(f"{key} requires {missing}")
    args = {name: fam.params[name](value) for name, value in args.items()}

    cloud = fam.build(seed=seed, **args) if fam.seeded else fam.build(**args)
    if cloud.provenance.seed != seed:
        cloud = PointCloud(cloud.points, replace(cloud.provenance, seed=seed), cloud.surface)
    return cloud
