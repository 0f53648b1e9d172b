"""(1+lambda) EA with self-adaptive log-normal mutation, plus the comparator
heuristics (random search, adaptive and anisotropic rate control, scheduled
rate decay, (1+1)-ES with the one-fifth rule).

Everything minimizes. Offspring acceptance is elitist: the best offspring
replaces the parent when its loss is less than or equal to the parent's.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .space import (
    Candidate,
    SearchSpace,
    _resample_discrete,
    _resample_real,
    mutate,
    sample_binomial_positive,
    sample_uniform,
)

_MASK_REJECTION_CAP = 10**6


class BudgetExhaustedError(RuntimeError):
    """An evaluation was requested after the budget ran out."""


class Objective:
    """Black-box objective over a search space with evaluation accounting.

    `fn` maps a candidate's value vector to a real loss and must be
    deterministic. An optional `stop_when` predicate (checked on every
    recorded loss) lets callers terminate a run early, e.g. on a successful
    attack query.
    """

    def __init__(
        self,
        space: SearchSpace,
        fn: Callable[[np.ndarray], float],
        budget: Optional[int] = None,
        stop_when: Optional[Callable[[float], bool]] = None,
    ):
        if budget is not None and budget < 1:
            raise ValueError("budget must be >= 1")
        self.space = space
        self.fn = fn
        self.budget = budget
        self.stop_when = stop_when
        self.losses: list[float] = []
        self.stopped = False

    @property
    def evals(self) -> int:
        return len(self.losses)

    @property
    def remaining(self) -> float:
        if self.budget is None:
            return math.inf
        return self.budget - self.evals

    def eval(self, cand: Candidate) -> float:
        if self.remaining <= 0:
            raise BudgetExhaustedError("evaluation budget exhausted")
        loss = float(self.fn(cand.values))
        cand.loss = loss
        self.losses.append(loss)
        if self.stop_when is not None and self.stop_when(loss):
            self.stopped = True
        return loss


def lognormal_update_rate(p: float, q: float, gamma: float = 0.22) -> float:
    """Multiplicative log-normal perturbation of a mutation rate.

    Monotone decreasing in q; q=0 is a fixed point, so the median of the
    updated rate equals the current rate.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"rate must lie strictly in (0,1), got {p}")
    return 1.0 / (1.0 + (1.0 - p) / p * math.exp(gamma * q))


@dataclass(frozen=True)
class LogNormalConfig:
    initial_p: float = 0.2
    lam: int = 12
    gamma: float = 0.22

    def __post_init__(self):
        if not 0.0 < self.initial_p < 1.0:
            raise ValueError("initial_p must lie in (0,1)")
        if self.lam < 1:
            raise ValueError("lambda must be >= 1")


# Named variants: (initial rate, population size); gamma stays 0.22.
LOGNORMAL_PRESETS = {
    "lognormal": LogNormalConfig(0.2, 12),
    "big-lognormal": LogNormalConfig(0.2, 120),
    "huge-lognormal": LogNormalConfig(0.2, 1200),
    "small-lognormal": LogNormalConfig(0.2, 4),
    "x-lognormal": LogNormalConfig(0.8, 12),
    "xsmall-lognormal": LogNormalConfig(0.8, 4),
}


class Optimizer:
    """Base for single-parent minimizers driven by an external run loop."""

    def __init__(self, space: SearchSpace, rng: np.random.Generator):
        self.space = space
        self.rng = rng
        self.parent: Optional[Candidate] = None
        self.t = 0

    def initialize(self, objective: Objective, x0: Optional[np.ndarray] = None):
        if x0 is not None:
            cand = Candidate(np.array(x0, dtype=float))
        else:
            cand = sample_uniform(self.space, self.rng)
        objective.eval(cand)
        self.parent = cand

    def step(self, objective: Objective):
        raise NotImplementedError

    def _out_of_budget(self, objective: Objective) -> bool:
        return objective.remaining <= 0 or objective.stopped


class LogNormalOptimizer(Optimizer):
    """(1+lambda) EA whose mutation rate self-adapts log-normally.

    Per offspring: draw q ~ N(0,1), derive a tentative rate, draw a
    positive binomial strength, mutate, evaluate. The rate of the first
    best offspring is adopted; the parent is replaced when the best
    offspring is at least as good. A budget hit mid-generation still
    applies selection over the offspring evaluated so far.
    """

    def __init__(self, space, rng, config: LogNormalConfig = LogNormalConfig()):
        super().__init__(space, rng)
        self.config = config
        self.p = config.initial_p

    def step(self, objective: Objective):
        n = self.space.n
        best: Optional[Candidate] = None
        best_rate = self.p
        for _ in range(self.config.lam):
            if self._out_of_budget(objective):
                break
            q = self.rng.standard_normal()
            rate = lognormal_update_rate(self.p, q, self.config.gamma)
            ell = sample_binomial_positive(n, rate, self.rng)
            child = mutate(self.space, self.parent, ell, self.rng)
            objective.eval(child)
            if best is None or child.loss < best.loss:
                best = child
                best_rate = rate
        if best is None:
            return
        self.p = best_rate
        if best.loss <= self.parent.loss:
            self.parent = best
        self.t += 1


class RandomSearchOptimizer(Optimizer):
    """Uniform resampling of every variable each step; keeps the best."""

    def step(self, objective: Objective):
        cand = sample_uniform(self.space, self.rng)
        objective.eval(cand)
        if cand.loss < self.parent.loss:
            self.parent = cand
        self.t += 1


class AdaptiveOptimizer(Optimizer):
    """(1+1) EA with multiplicative success-based rate control: rate is
    scaled by F**s on success and divided by F on failure, clamped to
    [1/(4n), 1/2]."""

    def __init__(self, space, rng, initial_p: float = 0.2, big_f: float = 2.0, s: float = 1.0):
        super().__init__(space, rng)
        self.big_f = big_f
        self.s = s
        self.p_min = 1.0 / (4.0 * space.n)
        self.p_max = 0.5
        self.p = min(self.p_max, max(self.p_min, initial_p))

    def step(self, objective: Objective):
        ell = sample_binomial_positive(self.space.n, self.p, self.rng)
        child = mutate(self.space, self.parent, ell, self.rng)
        objective.eval(child)
        if child.loss <= self.parent.loss:
            self.parent = child
            self.p = min(self.p_max, self.big_f**self.s * self.p)
        else:
            self.p = max(self.p_min, self.p / self.big_f)
        self.t += 1


def lengler_strength(n: int, t: int) -> int:
    """Deterministic mutation-strength schedule: harmonic decay to 1."""
    return max(1, n // (t + 2))


class LenglerOptimizer(Optimizer):
    """(1+1) EA with the scheduled (non-adaptive) mutation strength."""

    def step(self, objective: Objective):
        ell = lengler_strength(self.space.n, self.t)
        child = mutate(self.space, self.parent, ell, self.rng)
        objective.eval(child)
        if child.loss <= self.parent.loss:
            self.parent = child
        self.t += 1


class AnisotropicOptimizer(Optimizer):
    """(1+1) EA with one self-adaptive rate per coordinate.

    Each step log-normally perturbs every rate, mutates coordinate i with
    probability rate_i (redrawing the all-unchanged mask), and adopts the
    offspring's rate vector only on elitist acceptance.
    """

    def __init__(self, space, rng, initial_p: float = 0.2, gamma: float = 0.22):
        super().__init__(space, rng)
        self.gamma = gamma
        self.rates = np.full(space.n, initial_p)

    def _mutate_rates(self) -> np.ndarray:
        q = self.rng.standard_normal(self.space.n)
        return 1.0 / (1.0 + (1.0 - self.rates) / self.rates * np.exp(self.gamma * q))

    def step(self, objective: Objective):
        space = self.space
        rates = self._mutate_rates()
        for attempt in range(_MASK_REJECTION_CAP):
            mask = self.rng.random(space.n) < rates
            if mask.any():
                break
        else:
            raise RuntimeError("anisotropic mask rejection exceeded its cap")
        positions = np.flatnonzero(mask)
        values = self.parent.values.copy()
        kinds = space._kind_codes[positions]
        bpos = positions[kinds == 0]
        if bpos.size:
            values[bpos] = 1.0 - values[bpos]
        dpos = positions[kinds == 1]
        if dpos.size:
            _resample_discrete(values, dpos, space._ilo[dpos], space._ihi[dpos], self.rng)
        rpos = positions[kinds == 2]
        if rpos.size:
            _resample_real(values, rpos, space._lo[rpos], space._hi[rpos], self.rng)
        child = Candidate(values)
        objective.eval(child)
        if child.loss <= self.parent.loss:
            self.parent = child
            self.rates = rates
        self.t += 1


class OneFifthESOptimizer(Optimizer):
    """(1+1) evolution strategy with the one-fifth success rule, in the
    multiplicative form sigma*e^(1/3) on success, sigma*e^(-1/12) on failure.
    Continuous spaces only."""

    GROW = math.exp(1.0 / 3.0)
    SHRINK = math.exp(-1.0 / 12.0)

    def __init__(self, space, rng, initial_sigma: Optional[float] = None):
        if not space.all_real:
            raise ValueError("one-fifth ES requires an all-real search space")
        super().__init__(space, rng)
        if initial_sigma is None:
            initial_sigma = float(np.mean(space._hi - space._lo)) / 6.0
        self.sigma = initial_sigma

    def step(self, objective: Objective):
        space = self.space
        step = self.sigma * self.rng.standard_normal(space.n)
        values = np.clip(self.parent.values + step, space._lo, space._hi)
        child = Candidate(values)
        objective.eval(child)
        if child.loss <= self.parent.loss:
            self.parent = child
            self.sigma *= self.GROW
        else:
            self.sigma *= self.SHRINK
        self.t += 1
