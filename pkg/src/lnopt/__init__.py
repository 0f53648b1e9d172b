"""Self-adaptive log-normal mutation EA over mixed search spaces, with a
benchmark/ranking harness and a black-box detector attack harness."""

import os as _os

# Threaded BLAS could make GEMM summation order differ between a fresh
# process and a forked worker, breaking the bit-identical-outputs contract
# across --parallelism levels. The kernels here are small; one thread is
# also simply faster once runs execute in parallel. Must happen before the
# first numpy import to take effect.
for _var in ("OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "OMP_NUM_THREADS"):
    _os.environ.setdefault(_var, "1")

__version__ = "0.1.0"

from . import _kernels
from .attack import AttackConfig, AttackResult, AttackSummary, attack_dataset, attack_one
from .benchmarks import ProblemInstance, default_budget_grid, suite
from .detectors import (
    BuiltinToyDetector,
    Detector,
    DetectorError,
    SubprocessDetector,
    builtin_toy_detector,
)
from .harness import GridResult, RunRecord, run, run_grid
from .images import Image, generate_synthetic_fakes, read_ppm, write_ppm
from .modifiers import (
    LossWrapperConfig,
    SmoothConfig,
    SmoothedOptimizer,
    gaussian_blur,
    smooth_tensor,
    wrap_loss,
)
from .optimizers import (
    LogNormalConfig,
    LOGNORMAL_PRESETS,
    Objective,
    lognormal_update_rate,
)
from .ranking import ScoreTable, compute_scores, stability_report
from .registry import ALIASES, UnknownAlgorithmError, known_ids, parse_algorithm_id
from .space import (
    Candidate,
    CoordinateDomain,
    SearchSpace,
    boolean,
    categorical,
    integer,
    mutate,
    real,
    sample_binomial_positive,
    sample_uniform,
)

backend_name = _kernels.backend_name
