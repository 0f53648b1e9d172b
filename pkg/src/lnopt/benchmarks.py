"""Benchmark problems: classic pseudo-Boolean functions and deceptive
continuous landscapes with per-instance random translations.

All problems are minimization with optimum value 0. Continuous problems live
on the [-5, 5] box; the optimum sits at a standard-normal translation drawn
from the instance seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels as kernels
from .space import SearchSpace
from .util import stable_seed

CONT_LO, CONT_HI = -5.0, 5.0

DISCRETE_SIZES = (25, 50, 100)
CONTINUOUS_DIMS = (2, 5, 10)
DECEPTIVE_INSTANCES = 5


def default_budget_grid() -> list[int]:
    return [25, 37, 50, 75, 87, 100, 200, 400, 800, 1600, 3200, 6400, 12800]


_DISCRETE_LOSSES = {
    "onemax": kernels.onemax_loss,
    "leadingones": kernels.leadingones_loss,
    "ising_ring": kernels.ising_ring_loss,
}

_CONTINUOUS_LOSSES = {
    "sphere": kernels.sphere_loss,
    "illcond": kernels.illcond_loss,
    "multimodal": kernels.multimodal_loss,
    "path": kernels.path_loss,
}


@dataclass
class ProblemInstance:
    """One benchmark problem: id, search space, optional translation."""

    id: str
    family: str
    space: SearchSpace
    translation: Optional[np.ndarray] = None
    instance_seed: Optional[int] = None

    def loss(self, values: np.ndarray) -> float:
        fn = _DISCRETE_LOSSES.get(self.family)
        if fn is not None:
            return fn(values)
        fn = _CONTINUOUS_LOSSES[self.family]
        return fn(values - self.translation)

    def optimum(self) -> np.ndarray:
        """A loss-0 point (all-ones string for the discrete problems)."""
        if self.family in _DISCRETE_LOSSES:
            return np.ones(self.space.n)
        return self.translation.copy()


def onemax(n: int) -> ProblemInstance:
    return ProblemInstance(f"onemax-{n}", "onemax", SearchSpace.boolean(n))


def leadingones(n: int) -> ProblemInstance:
    return ProblemInstance(f"leadingones-{n}", "leadingones", SearchSpace.boolean(n))


def ising_ring(n: int) -> ProblemInstance:
    return ProblemInstance(f"ising-{n}", "ising_ring", SearchSpace.boolean(n))


def _translated(family: str, dim: int, instance_seed: int, min_dim: int = 1) -> ProblemInstance:
    if dim < min_dim:
        raise ValueError(f"{family} needs dim >= {min_dim}")
    rng = np.random.default_rng(stable_seed("translation", family, dim, instance_seed))
    translation = rng.standard_normal(dim)
    return ProblemInstance(
        id=f"{family}-d{dim}-i{instance_seed}",
        family=family,
        space=SearchSpace.real_box(CONT_LO, CONT_HI, dim),
        translation=translation,
        instance_seed=instance_seed,
    )


def sphere(dim: int, instance_seed: int = 0) -> ProblemInstance:
    return _translated("sphere", dim, instance_seed)


def deceptive_illcond(dim: int, instance_seed: int = 0) -> ProblemInstance:
    return _translated("illcond", dim, instance_seed, min_dim=2)


def deceptive_multimodal(dim: int, instance_seed: int = 0) -> ProblemInstance:
    return _translated("multimodal", dim, instance_seed)


def deceptive_path(dim: int, instance_seed: int = 0) -> ProblemInstance:
    return _translated("path", dim, instance_seed, min_dim=2)


def _discrete_suite() -> list[ProblemInstance]:
    out = []
    for n in DISCRETE_SIZES:
        out += [onemax(n), leadingones(n), ising_ring(n)]
    return out


def _deceptive_suite() -> list[ProblemInstance]:
    out = []
    for maker in (deceptive_illcond, deceptive_multimodal, deceptive_path):
        for dim in CONTINUOUS_DIMS:
            for inst in range(DECEPTIVE_INSTANCES):
                out.append(maker(dim, inst))
    return out


def _sphere_suite() -> list[ProblemInstance]:
    # Single-instance sanity suite.
    return [sphere(5, 0)]


SUITES = {
    "discrete": _discrete_suite,
    "deceptive": _deceptive_suite,
    "sphere": _sphere_suite,
}


def suite(name: str) -> list[ProblemInstance]:
    try:
        factory = SUITES[name]
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; valid: {sorted(SUITES)}") from None
    return factory()
