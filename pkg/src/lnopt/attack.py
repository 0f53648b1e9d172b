"""Black-box evasion attacks: minimize the detector score over an L-infinity
perturbation box around a fixed image.

The objective is score(clamp(image + T(e))) where T is the identity or a
sign/blur transform selected through the algorithm id's modifier prefixes.
Attacks start from the zero perturbation, so the first query scores the
clean image. With early stopping, the first query under the decision
threshold ends the attack as a success.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernels as kernels
from .detectors import Detector, DetectorError
from .harness import run
from .images import Image
from .modifiers import LossWrapperConfig
from .optimizers import Objective
from .registry import parse_algorithm_id
from .space import SearchSpace
from .util import stable_seed


@dataclass(frozen=True)
class AttackConfig:
    algo: str = "lognormal"
    budget: int = 10000
    linf: float = 0.03
    threshold: float = 0.5
    early_stop: bool = True
    kernel_sigma: Optional[float] = None

    def __post_init__(self):
        if self.linf <= 0:
            raise ValueError("linf amplitude must be positive")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        parse_algorithm_id(self.algo)  # fail fast on unknown ids


@dataclass
class AttackResult:
    image_id: str
    success: bool
    queries_used: int
    initial_score: float
    final_score: float
    perturbation: Optional[np.ndarray] = None
    error: Optional[str] = None
    skipped: bool = False


@dataclass
class AttackSummary:
    results: list[AttackResult]
    attacked: int
    successes: int
    skipped: int
    errors: int

    @property
    def success_rate(self) -> Optional[float]:
        """Successes over attacked (errored attacks excluded); None when no
        image was attacked."""
        denominator = self.attacked - self.errors
        if denominator <= 0:
            return None
        return self.successes / denominator


def attack_one(image: Image, detector: Detector, config: AttackConfig, seed: int) -> AttackResult:
    """Attack a single image already known to score above the threshold."""
    shape = image.pixels.shape
    size = int(np.prod(shape))
    space = SearchSpace.real_box(-config.linf, config.linf, size, shape=shape)
    pixels = np.ascontiguousarray(image.pixels)
    best_score = np.inf
    best_pert: Optional[np.ndarray] = None

    def fn(values: np.ndarray) -> float:
        # `values` arrives post-transform: it IS the effective perturbation.
        nonlocal best_score, best_pert
        pert = values.reshape(shape)
        applied = kernels.clamp_add(pixels, pert)
        score = detector.score(applied)
        if score < best_score:
            best_score = score
            best_pert = np.array(pert)
        return score

    stop_when = (lambda loss: loss < config.threshold) if config.early_stop else None
    objective = Objective(space, fn, budget=config.budget, stop_when=stop_when)
    loss_config = LossWrapperConfig(amplitude=config.linf, kernel_sigma=config.kernel_sigma)
    try:
        run(
            config.algo,
            objective,
            config.budget,
            seed,
            problem=image.id,
            x0=np.zeros(size),
            loss_config=loss_config,
            keep_trace=False,
        )
    except DetectorError as exc:
        initial = objective.losses[0] if objective.losses else float("nan")
        return AttackResult(
            image_id=image.id,
            success=False,
            queries_used=objective.evals,
            initial_score=initial,
            final_score=best_score if objective.losses else float("nan"),
            perturbation=best_pert,
            error=str(exc),
        )
    return AttackResult(
        image_id=image.id,
        success=bool(best_score < config.threshold),
        queries_used=objective.evals,
        initial_score=objective.losses[0],
        final_score=float(best_score),
        perturbation=best_pert,
    )


def image_seed(global_seed: int, image_id: str) -> int:
    return stable_seed("attack", global_seed, image_id)


def _attack_or_skip(image: Image, detector: Detector, config: AttackConfig, global_seed: int) -> AttackResult:
    try:
        clean = detector.score(image.pixels)
    except DetectorError as exc:
        return AttackResult(image.id, False, 0, float("nan"), float("nan"), error=str(exc))
    if clean < config.threshold:
        # Not flagged as fake: nothing to evade.
        return AttackResult(image.id, False, 0, clean, clean, skipped=True)
    return attack_one(image, detector, config, image_seed(global_seed, image.id))


_WORKER_DETECTOR: Optional[Detector] = None
_WORKER_FACTORY = None


def _init_worker(factory):
    global _WORKER_FACTORY, _WORKER_DETECTOR
    _WORKER_FACTORY = factory
    _WORKER_DETECTOR = None


def _worker_attack(args):
    global _WORKER_DETECTOR
    image, config, global_seed = args
    if _WORKER_DETECTOR is None:
        _WORKER_DETECTOR = _WORKER_FACTORY()
    return _attack_or_skip(image, _WORKER_DETECTOR, config, global_seed)


def attack_dataset(
    images: Sequence[Image],
    detector: Optional[Detector],
    config: AttackConfig,
    seed: int,
    parallelism: int = 1,
    detector_factory: Optional[Callable[[], Detector]] = None,
) -> AttackSummary:
    """Filter to images the detector flags as fake, attack each, summarize.

    Only correctly-classified (score >= threshold) images enter the success
    rate. Parallel execution needs a picklable `detector_factory`; each
    worker owns its own detector connection.
    """
    if parallelism > 1:
        if detector_factory is None:
            raise ValueError("parallel attacks need a detector_factory")
        tasks = [(img, config, seed) for img in images]
        with ProcessPoolExecutor(
            max_workers=parallelism, initializer=_init_worker, initargs=(detector_factory,)
        ) as pool:
            results = list(pool.map(_worker_attack, tasks))
    else:
        own = detector is None
        det = detector if detector is not None else detector_factory()
        try:
            results = [_attack_or_skip(img, det, config, seed) for img in images]
        finally:
            if own:
                det.close()
    skipped = sum(1 for r in results if r.skipped)
    errors = sum(1 for r in results if r.error is not None)
    attacked = len(results) - skipped
    successes = sum(1 for r in results if r.success)
    return AttackSummary(results, attacked, successes, skipped, errors)


ATTACK_CSV_COLUMNS = "image_id,algo,budget,linf,seed,success,queries_used,initial_score,final_score"


def attack_rows(summary: AttackSummary, config: AttackConfig, seed: int) -> list[str]:
    """One row per input image (skipped ones report zero queries)."""
    rows = []
    for r in summary.results:
        rows.append(
            f"{r.image_id},{config.algo},{config.budget},{config.linf!r},{seed},"
            f"{'true' if r.success else 'false'},{r.queries_used},"
            f"{r.initial_score!r},{r.final_score!r}"
        )
    return rows
