"""Tensor-aware wrappers: the Smooth operator family and the sign/blur loss
transforms used for image-shaped domains.

Loss transforms map the candidate vector before the underlying loss sees it:

  g:    v -> amplitude * sign(v)          (sign(0) = 0)
  sm:   v -> gaussian_blur(v)             (per channel, truncated kernel)
  gsm:  v -> amplitude * sign(gaussian_blur(v))   (blur first, then sign)

The blur kernel is renormalized where the window is truncated by a border,
so constant tensors pass through unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from . import _kernels as kernels
from .optimizers import Objective, Optimizer
from .space import Candidate, SearchSpace

SMOOTH_FREQUENCIES = {
    "zetasmooth": 1.0 / 2.0,
    "ultrasmooth": 1.0 / 3.0,
    "supersmooth": 1.0 / 9.0,
    "smooth": 1.0 / 55.0,
}

SMOOTH_WINDOW = 3
SMOOTH_KEEP_PROB = 0.75


class ModifierError(ValueError):
    """A modifier was applied to a space it cannot operate on."""


@dataclass(frozen=True)
class SmoothConfig:
    """Parameters of the periodic smoothing attempt."""

    frequency: float = SMOOTH_FREQUENCIES["smooth"]
    window: int = SMOOTH_WINDOW
    keep_prob: float = SMOOTH_KEEP_PROB

    def __post_init__(self):
        if self.frequency not in SMOOTH_FREQUENCIES.values():
            valid = sorted(SMOOTH_FREQUENCIES.values())
            raise ValueError(f"frequency must be one of {valid}, got {self.frequency}")
        if self.window != SMOOTH_WINDOW:
            raise ValueError("smoothing window is fixed at 3")


def _check_tensor_space(space: SearchSpace):
    if space.shape is None:
        raise ModifierError("space carries no tensor shape annotation")
    if not space.all_real:
        raise ModifierError("tensor modifiers need all-real coordinates")
    if len(space.shape) not in (1, 2, 3):
        raise ModifierError(f"unsupported tensor rank {len(space.shape)}")


def _neighborhood_means(x: np.ndarray) -> np.ndarray:
    if x.ndim == 1:
        return kernels.neighborhood_mean_1d(x)
    if x.ndim == 2:
        return kernels.neighborhood_mean_2d(x)
    out = np.empty_like(x)
    for c in range(x.shape[2]):
        out[:, :, c] = kernels.neighborhood_mean_2d(np.ascontiguousarray(x[:, :, c]))
    return out


def smooth_with_mask(values: np.ndarray, shape: tuple, keep_mask: np.ndarray) -> np.ndarray:
    """Deterministic core of the Smooth operator: cells where keep_mask is
    False are replaced by their truncated 3x3 (Chebyshev<=1, per channel)
    neighborhood mean, center included."""
    x = values.reshape(shape)
    means = _neighborhood_means(x)
    return np.where(keep_mask.reshape(shape), x, means).ravel()


def smooth_tensor(
    values: np.ndarray,
    shape: tuple,
    rng: np.random.Generator,
    keep_prob: float = SMOOTH_KEEP_PROB,
) -> np.ndarray:
    """Per cell independently keep the value with probability `keep_prob`,
    otherwise replace it with its neighborhood mean."""
    keep = rng.random(values.size) < keep_prob
    return smooth_with_mask(values, shape, keep)


class SmoothedOptimizer(Optimizer):
    """Wraps an optimizer with periodic tentative smoothing of its parent.

    With probability `frequency` per iteration the smoothed parent is
    evaluated (consuming budget) and replaces the parent only when strictly
    better. The wrapper draws from its own RNG stream, leaving the inner
    optimizer's sampling untouched.
    """

    def __init__(self, inner: Optimizer, config: SmoothConfig, rng: np.random.Generator):
        _check_tensor_space(inner.space)
        self.inner = inner  # before super(): the parent property delegates to it
        super().__init__(inner.space, rng)
        self.config = config

    @property
    def parent(self):
        return self.inner.parent

    @parent.setter
    def parent(self, cand):
        self.inner.parent = cand

    def initialize(self, objective: Objective, x0=None):
        self.inner.initialize(objective, x0)

    def step(self, objective: Objective):
        self.inner.step(objective)
        attempt = self.rng.random() < self.config.frequency
        if not attempt or objective.remaining <= 0 or objective.stopped:
            return
        smoothed = smooth_tensor(
            self.inner.parent.values, self.space.shape, self.rng, self.config.keep_prob
        )
        cand = Candidate(smoothed)
        objective.eval(cand)
        if cand.loss < self.inner.parent.loss:
            self.inner.parent = cand


@dataclass(frozen=True)
class LossWrapperConfig:
    """Parameters of the adversarial loss transforms."""

    amplitude: float = 0.03
    kernel_sigma: Optional[float] = None  # None: image width / 8

    def __post_init__(self):
        if self.amplitude <= 0:
            raise ValueError("amplitude must be positive")


@lru_cache(maxsize=64)
def _blur_matrix(size: int, sigma: float) -> np.ndarray:
    """1D truncated Gaussian as a row-normalized (size x size) operator."""
    radius = int(math.ceil(3.0 * sigma))
    offsets = np.arange(-radius, radius + 1)
    weights = np.exp(-0.5 * (offsets / sigma) ** 2)
    mat = np.zeros((size, size))
    for i in range(size):
        cols = i + offsets
        valid = (cols >= 0) & (cols < size)
        mat[i, cols[valid]] = weights[valid]
    mat /= mat.sum(axis=1, keepdims=True)
    return mat


def gaussian_blur(x: np.ndarray, sigma: float) -> np.ndarray:
    """Separable truncated Gaussian blur of a (h,w) or (h,w,c) tensor with
    border renormalization; channels are blurred independently."""
    if x.ndim == 2:
        kv = _blur_matrix(x.shape[0], sigma)
        kh = _blur_matrix(x.shape[1], sigma)
        return kv @ x @ kh.T
    if x.ndim == 3:
        h, w, c = x.shape
        kv = _blur_matrix(h, sigma)
        kh = _blur_matrix(w, sigma)
        # Keep both passes as single contiguous GEMMs: rows mix under kv with
        # (w,c) flattened, then columns mix under kh with (h,c) flattened.
        vert = (kv @ x.reshape(h, w * c)).reshape(h, w, c)
        horiz = vert.transpose(0, 2, 1).reshape(h * c, w) @ kh.T
        return np.ascontiguousarray(horiz.reshape(h, c, w).transpose(0, 2, 1))
    raise ModifierError(f"blur expects a 2D or 2D-with-channels tensor, got ndim={x.ndim}")


def default_kernel_sigma(shape: tuple) -> float:
    if len(shape) < 2:
        raise ModifierError("blur needs a 2D (or 2D x channels) shape")
    return shape[1] / 8.0


def transform_g(values: np.ndarray, amplitude: float) -> np.ndarray:
    return amplitude * np.sign(values)


def make_transform(
    mod: str, shape: Optional[tuple], config: LossWrapperConfig
) -> Callable[[np.ndarray], np.ndarray]:
    """Value transform for modifier `mod` in {"g", "sm", "gsm"}."""
    if mod == "g":
        amp = config.amplitude
        return lambda v: amp * np.sign(v)
    if mod not in ("sm", "gsm"):
        raise ValueError(f"unknown loss modifier {mod!r}")
    if shape is None or len(shape) not in (2, 3):
        raise ModifierError("sm/gsm modifiers need a 2D (or 2D x channels) shaped space")
    sigma = config.kernel_sigma if config.kernel_sigma is not None else default_kernel_sigma(shape)
    if mod == "sm":
        return lambda v: gaussian_blur(v.reshape(shape), sigma).ravel()
    amp = config.amplitude
    return lambda v: amp * np.sign(gaussian_blur(v.reshape(shape), sigma)).ravel()


def wrap_loss(
    fn: Callable[[np.ndarray], float],
    mod: str,
    shape: Optional[tuple],
    config: LossWrapperConfig,
) -> Callable[[np.ndarray], float]:
    transform = make_transform(mod, shape, config)
    return lambda v: fn(transform(v))
