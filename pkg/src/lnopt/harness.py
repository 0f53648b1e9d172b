"""Run driver and grid executor.

A run consumes exactly its evaluation budget (unless stopped early through
the objective's stop predicate) and records the best-so-far trace. Grids run
one independent seeded run per (algorithm, problem, budget, seed-index)
cell; cell seeds derive from a stable hash, so outputs are identical under
any parallelism.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .benchmarks import ProblemInstance
from .modifiers import LossWrapperConfig, wrap_loss
from .optimizers import Objective
from .registry import build_optimizer, parse_algorithm_id
from .util import stable_seed


@dataclass
class RunRecord:
    """Outcome of one budgeted run."""

    algo: str
    problem: str
    budget: int
    seed: int
    final_loss: float
    trace: Optional[np.ndarray] = None


@dataclass
class FailedRun:
    algo: str
    problem: str
    budget: int
    seed: int
    error: str


@dataclass
class GridResult:
    records: list[RunRecord]
    failures: list[FailedRun]


def run(
    algo_id: str,
    objective: Objective,
    budget: int,
    seed: int,
    problem: str = "",
    x0: Optional[np.ndarray] = None,
    loss_config: Optional[LossWrapperConfig] = None,
    keep_trace: bool = True,
) -> RunRecord:
    """Run `algo_id` on `objective` for exactly `budget` evaluations."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    parsed = parse_algorithm_id(algo_id)
    objective.budget = budget
    if parsed.loss_mod is not None:
        cfg = loss_config if loss_config is not None else LossWrapperConfig()
        objective.fn = wrap_loss(objective.fn, parsed.loss_mod, objective.space.shape, cfg)
    opt = build_optimizer(parsed, objective.space, seed)
    opt.initialize(objective, x0)
    while objective.remaining > 0 and not objective.stopped:
        opt.step(objective)
    trace = np.minimum.accumulate(np.asarray(objective.losses))
    return RunRecord(
        algo=algo_id,
        problem=problem,
        budget=budget,
        seed=seed,
        final_loss=float(trace[-1]),
        trace=trace if keep_trace else None,
    )


def cell_seed(algo: str, problem: str, budget: int, seed_index: int) -> int:
    return stable_seed("bench", algo, problem, budget, seed_index)


def _run_cell(args):
    algo, instance, budget, seed_index, keep_trace = args
    try:
        objective = Objective(instance.space, instance.loss)
        rec = run(
            algo,
            objective,
            budget,
            cell_seed(algo, instance.id, budget, seed_index),
            problem=instance.id,
            keep_trace=keep_trace,
        )
        rec.seed = seed_index  # report the grid index, not the derived stream seed
        return rec
    except Exception as exc:  # failures are recorded, not fatal
        return FailedRun(algo, instance.id, budget, seed_index, f"{type(exc).__name__}: {exc}")


def run_grid(
    algos: Sequence[str],
    problems: Sequence[ProblemInstance],
    budgets: Sequence[int],
    seeds: int,
    parallelism: int = 1,
    keep_traces: bool = False,
) -> GridResult:
    """One independent run per grid cell (never truncations of longer runs)."""
    if not algos or not problems or not budgets or seeds < 1:
        raise ValueError("grid needs algorithms, problems, budgets and seeds >= 1")
    cells = [
        (algo, instance, int(budget), seed_index, keep_traces)
        for algo in algos
        for instance in problems
        for budget in budgets
        for seed_index in range(seeds)
    ]
    if parallelism > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            chunk = max(1, len(cells) // (parallelism * 8))
            outcomes = list(pool.map(_run_cell, cells, chunksize=chunk))
    else:
        outcomes = [_run_cell(c) for c in cells]
    records = [o for o in outcomes if isinstance(o, RunRecord)]
    failures = [o for o in outcomes if isinstance(o, FailedRun)]
    records.sort(key=lambda r: (r.algo, r.problem, r.budget, r.seed))
    failures.sort(key=lambda r: (r.algo, r.problem, r.budget, r.seed))
    return GridResult(records, failures)
