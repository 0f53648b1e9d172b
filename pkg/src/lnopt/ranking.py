"""Pairwise win-frequency scoring and the consecutive-budget stability bound.

Scoring recipe: average the final loss per (algorithm, problem, budget) cell
over seeds; score_{a,a'} is the frequency over common cells at which a's
mean is strictly below a''s; an algorithm's score is its mean row (self
included, scoring 0); ranks order by descending score with id tie-break.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .harness import RunRecord


class RankingError(ValueError):
    pass


@dataclass
class ScoreTable:
    algos: list[str]
    pairwise: np.ndarray  # pairwise[i, j] = score_{algos[i], algos[j]}
    scores: np.ndarray
    ranks: np.ndarray  # ranks[i] = rank of algos[i], 0 is best

    def score_of(self, algo: str) -> float:
        return float(self.scores[self.algos.index(algo)])

    def rank_of(self, algo: str) -> int:
        return int(self.ranks[self.algos.index(algo)])


def mean_losses(records: Sequence[RunRecord]) -> dict:
    """Mean final loss per (algo, problem, budget), averaged over seeds."""
    sums: dict = {}
    counts: dict = {}
    for rec in records:
        key = (rec.algo, rec.problem, rec.budget)
        sums[key] = sums.get(key, 0.0) + rec.final_loss
        counts[key] = counts.get(key, 0) + 1
    return {key: sums[key] / counts[key] for key in sums}


def compute_scores(records: Sequence[RunRecord]) -> ScoreTable:
    if not records:
        raise RankingError("no records to score")
    means = mean_losses(records)
    algos = sorted({a for a, _, _ in means})
    cells_by_algo = {a: {} for a in algos}
    for (a, p, b), m in means.items():
        cells_by_algo[a][(p, b)] = m
    n = len(algos)
    pairwise = np.zeros((n, n))
    for i, a in enumerate(algos):
        for j, b in enumerate(algos):
            if i == j:
                continue  # strict inequality: self-score stays 0
            common = cells_by_algo[a].keys() & cells_by_algo[b].keys()
            if not common:
                raise RankingError(f"no common cells between {a!r} and {b!r}")
            wins = sum(1 for c in common if cells_by_algo[a][c] < cells_by_algo[b][c])
            pairwise[i, j] = wins / len(common)
    scores = pairwise.mean(axis=1)
    order = sorted(range(n), key=lambda i: (-scores[i], algos[i]))
    ranks = np.empty(n, dtype=int)
    for pos, i in enumerate(order):
        ranks[i] = pos
    return ScoreTable(algos, pairwise, scores, ranks)


@dataclass
class StabilityEntry:
    problem: str
    k: int  # consecutive largest budgets with mean(A) < mean(B)
    bound: float  # 1/2**k significance bound under the equal-distribution null


def stability_report(
    records: Sequence[RunRecord], algo_a: str, algo_b: str
) -> list[StabilityEntry]:
    """Per problem, count how many of the largest consecutive budgets have
    algo_a's mean loss strictly below algo_b's; the chance of that under the
    same-distribution null is at most 1/2**k."""
    means = mean_losses(records)
    problems = sorted({p for _, p, _ in means})
    out = []
    for problem in problems:
        budgets = sorted(
            b
            for (a, p, b) in means
            if p == problem and a == algo_a and (algo_b, p, b) in means
        )
        k = 0
        for b in reversed(budgets):
            if means[(algo_a, problem, b)] < means[(algo_b, problem, b)]:
                k += 1
            else:
                break
        out.append(StabilityEntry(problem, k, 0.5**k))
    return out
