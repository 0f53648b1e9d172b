"""Algorithm registry: string ids, modifier prefixes, and aliases.

Ids compose as [loss-modifier-][smooth-modifier-]base, e.g.
"gsm-supersmooth-lognormal". Aliases algo1..algo6 name the modifier stacks
used in the attack experiments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .modifiers import SMOOTH_FREQUENCIES, SmoothConfig, SmoothedOptimizer
from .optimizers import (
    LOGNORMAL_PRESETS,
    AdaptiveOptimizer,
    AnisotropicOptimizer,
    LenglerOptimizer,
    LogNormalOptimizer,
    OneFifthESOptimizer,
    Optimizer,
    RandomSearchOptimizer,
)
from .space import SearchSpace


class UnknownAlgorithmError(ValueError):
    def __init__(self, algo_id: str, extra: str = ""):
        self.algo_id = algo_id
        msg = f"unknown algorithm id {algo_id!r}{extra}; valid ids: {', '.join(known_ids())}"
        super().__init__(msg)


def _make_lognormal(preset):
    return lambda space, rng: LogNormalOptimizer(space, rng, preset)


_BASE_BUILDERS = {name: _make_lognormal(cfg) for name, cfg in LOGNORMAL_PRESETS.items()}
_BASE_BUILDERS.update(
    {
        "rs": RandomSearchOptimizer,
        "adaptive": AdaptiveOptimizer,
        "lengler": LenglerOptimizer,
        "anisotropic": AnisotropicOptimizer,
        "one-fifth-es": OneFifthESOptimizer,
    }
)

# Shorthand names for the modifier stacks used in the attack experiments.
ALIASES = {
    "algo1": "gsm-supersmooth-lognormal",
    "algo2": "g-supersmooth-lognormal",
    "algo3": "supersmooth-lognormal",
    "algo4": "lognormal",
    "algo5": "gsm-big-lognormal",
    "algo6": "g-big-lognormal",
}

_LOSS_PREFIXES = ("gsm-", "sm-", "g-")
_SMOOTH_PREFIXES = {name + "-": freq for name, freq in SMOOTH_FREQUENCIES.items()}

# Reserved: depends on the noisy-optimization bandit wrapper, which is out
# of scope here.
_RESERVED = {"oln"}


@dataclass(frozen=True)
class ParsedAlgorithm:
    base: str
    smooth_frequency: Optional[float] = None
    loss_mod: Optional[str] = None


def known_ids() -> list[str]:
    return sorted(_BASE_BUILDERS) + sorted(ALIASES)


def resolve_alias(algo_id: str) -> str:
    return ALIASES.get(algo_id, algo_id)


def parse_algorithm_id(algo_id: str) -> ParsedAlgorithm:
    rest = resolve_alias(algo_id.strip().lower())
    if rest in _RESERVED:
        raise UnknownAlgorithmError(
            algo_id, " (reserved preset: needs the out-of-scope noisy-optimization wrapper)"
        )
    smooth = None
    loss_mod = None
    while True:
        if rest in _BASE_BUILDERS:
            return ParsedAlgorithm(rest, smooth, loss_mod)
        matched = False
        if loss_mod is None:
            for pfx in _LOSS_PREFIXES:
                if rest.startswith(pfx):
                    loss_mod = pfx[:-1]
                    rest = rest[len(pfx):]
                    matched = True
                    break
        if not matched and smooth is None:
            for pfx, freq in _SMOOTH_PREFIXES.items():
                if rest.startswith(pfx):
                    smooth = freq
                    rest = rest[len(pfx):]
                    matched = True
                    break
        if not matched:
            raise UnknownAlgorithmError(algo_id)


def build_base_optimizer(base: str, space: SearchSpace, rng: np.random.Generator) -> Optimizer:
    return _BASE_BUILDERS[base](space, rng)


def build_optimizer(parsed: ParsedAlgorithm, space: SearchSpace, seed) -> Optimizer:
    """Instantiate the optimizer stack (base + optional smooth wrapper).

    The root seed is split into one stream per component so that wrapping an
    algorithm never perturbs the base algorithm's draws.
    """
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    opt_seed, wrapper_seed = ss.spawn(2)
    opt = build_base_optimizer(parsed.base, space, np.random.default_rng(opt_seed))
    if parsed.smooth_frequency is not None:
        opt = SmoothedOptimizer(
            opt, SmoothConfig(frequency=parsed.smooth_frequency), np.random.default_rng(wrapper_seed)
        )
    return opt
