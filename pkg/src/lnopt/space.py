"""Mixed search domains, candidates, uniform sampling and the generalized
per-coordinate mutation operator.

A space is a product of per-coordinate domains (boolean, bounded integer,
bounded real, categorical). Candidate values are stored in a single float64
vector: discrete coordinates hold integral floats (categoricals as codes
0..k-1). All randomness flows through an injected numpy Generator, so runs
with equal seeds are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

BOOL = "bool"
INT = "int"
REAL = "real"
CAT = "cat"

_REAL_RESAMPLE_CAP = 100
_REJECTION_CAP = 10**6


class DegenerateDomainError(ValueError):
    """A coordinate domain effectively holds a single value."""


@dataclass(frozen=True)
class CoordinateDomain:
    """One coordinate's domain. Use the boolean/integer/real/categorical
    factories rather than the raw constructor."""

    kind: str
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if self.kind not in (BOOL, INT, REAL, CAT):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind in (INT, REAL) and not self.lo < self.hi:
            raise ValueError(f"{self.kind} domain needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.kind == CAT and self.hi < 1:
            raise ValueError("categorical domain needs cardinality >= 2")

    @property
    def is_discrete(self) -> bool:
        return self.kind != REAL

    def contains(self, v: float) -> bool:
        if self.kind == REAL:
            return self.lo <= v <= self.hi
        return float(v).is_integer() and self.lo <= v <= self.hi


def boolean() -> CoordinateDomain:
    return CoordinateDomain(BOOL, 0.0, 1.0)


def integer(lo: int, hi: int) -> CoordinateDomain:
    return CoordinateDomain(INT, float(int(lo)), float(int(hi)))


def real(lo: float, hi: float) -> CoordinateDomain:
    return CoordinateDomain(REAL, float(lo), float(hi))


def categorical(k: int) -> CoordinateDomain:
    if k < 2:
        raise ValueError("categorical cardinality must be >= 2")
    return CoordinateDomain(CAT, 0.0, float(k - 1))


class SearchSpace:
    """Ordered product of coordinate domains, optionally tensor-shaped.

    `shape` is metadata only (consulted by the smooth/blur modifiers); all
    operations see the flat vector.
    """

    def __init__(self, coords: Sequence[CoordinateDomain], shape: Optional[tuple] = None):
        coords = tuple(coords)
        if len(coords) == 0:
            raise ValueError("search space needs at least one coordinate")
        if shape is not None:
            shape = tuple(int(d) for d in shape)
            if any(d <= 0 for d in shape):
                raise ValueError("shape dims must be positive")
            if int(np.prod(shape)) != len(coords):
                raise ValueError(f"shape {shape} does not cover {len(coords)} coordinates")
        self.coords = coords
        self.shape = shape
        kinds = np.array([c.kind for c in coords])
        lo = np.array([c.lo for c in coords])
        hi = np.array([c.hi for c in coords])
        self._bool_idx = np.flatnonzero(kinds == BOOL)
        self._disc_idx = np.flatnonzero((kinds == INT) | (kinds == CAT))
        self._real_idx = np.flatnonzero(kinds == REAL)
        codes = np.full(len(coords), 1, dtype=np.int8)
        codes[self._bool_idx] = 0
        codes[self._real_idx] = 2
        self._kind_codes = codes
        self._ilo = lo.astype(np.int64)
        self._ihi = hi.astype(np.int64)
        self._lo = lo
        self._hi = hi
        # Homogeneous spaces (every coordinate identical) take scalar-bounds
        # fast paths in sampling; that matters at image dimensionalities.
        first = coords[0]
        self._homo = first if all(c == first for c in coords) else None

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def all_real(self) -> bool:
        return self._real_idx.size == self.n

    @property
    def all_boolean(self) -> bool:
        return self._bool_idx.size == self.n

    def contains(self, values: np.ndarray) -> bool:
        values = np.asarray(values, dtype=float)
        if values.shape != (self.n,):
            return False
        return all(c.contains(v) for c, v in zip(self.coords, values))

    @classmethod
    def boolean(cls, n: int) -> "SearchSpace":
        return cls([boolean()] * n)

    @classmethod
    def real_box(cls, lo: float, hi: float, n: int, shape: Optional[tuple] = None) -> "SearchSpace":
        return cls([real(lo, hi)] * n, shape=shape)

    @classmethod
    def integer_box(cls, lo: int, hi: int, n: int) -> "SearchSpace":
        return cls([integer(lo, hi)] * n)

    def __repr__(self):
        return f"SearchSpace(n={self.n}, shape={self.shape})"


@dataclass
class Candidate:
    """A point in a search space plus its loss once evaluated."""

    values: np.ndarray
    loss: Optional[float] = field(default=None)

    def copy(self) -> "Candidate":
        return Candidate(self.values.copy(), self.loss)


def sample_uniform(space: SearchSpace, rng: np.random.Generator) -> Candidate:
    """Draw each coordinate independently uniformly from its domain."""
    homo = space._homo
    if homo is not None:
        if homo.kind == REAL:
            return Candidate(rng.uniform(homo.lo, homo.hi, space.n))
        return Candidate(
            rng.integers(int(homo.lo), int(homo.hi) + 1, size=space.n).astype(float)
        )
    v = np.empty(space.n)
    idx = space._bool_idx
    if idx.size:
        v[idx] = rng.integers(0, 2, size=idx.size).astype(float)
    idx = space._disc_idx
    if idx.size:
        v[idx] = rng.integers(space._ilo[idx], space._ihi[idx] + 1).astype(float)
    idx = space._real_idx
    if idx.size:
        v[idx] = rng.uniform(space._lo[idx], space._hi[idx])
    return Candidate(v)


def _resample_discrete(values, idx, ilo, ihi, rng):
    cur = values[idx]
    new = rng.integers(ilo, ihi + 1).astype(float)
    colliding = np.flatnonzero(new == cur)
    while colliding.size:
        draw = rng.integers(ilo[colliding], ihi[colliding] + 1).astype(float)
        new[colliding] = draw
        colliding = colliding[draw == cur[colliding]]
    values[idx] = new


def _resample_real(values, idx, lo, hi, rng, scalar_bounds=False):
    cur = values[idx]
    if scalar_bounds:
        new = rng.uniform(lo, hi, idx.size)
    else:
        new = rng.uniform(lo, hi)
    colliding = np.flatnonzero(new == cur)
    tries = 0
    while colliding.size:
        tries += 1
        if tries > _REAL_RESAMPLE_CAP:
            raise DegenerateDomainError(
                "real coordinate resampling failed to produce a distinct value "
                f"after {_REAL_RESAMPLE_CAP} tries (degenerate bounds?)"
            )
        if scalar_bounds:
            draw = rng.uniform(lo, hi, colliding.size)
        else:
            draw = rng.uniform(lo[colliding], hi[colliding])
        new[colliding] = draw
        colliding = colliding[draw == cur[colliding]]
    values[idx] = new


def mutate(space: SearchSpace, x: Candidate, ell: int, rng: np.random.Generator) -> Candidate:
    """Resample exactly `ell` uniformly chosen distinct coordinates, each to a
    value drawn uniformly from its domain and distinct from the current one.
    Boolean coordinates reduce to bit flips."""
    n = space.n
    if not 1 <= ell <= n:
        raise ValueError(f"mutation strength must be in [1, {n}], got {ell}")
    positions = rng.choice(n, size=ell, replace=False)
    values = x.values.copy()

    if space.all_boolean:
        values[positions] = 1.0 - values[positions]
        return Candidate(values)
    if space.all_real:
        if space._homo is not None:
            _resample_real(
                values, positions, space._homo.lo, space._homo.hi, rng, scalar_bounds=True
            )
        else:
            _resample_real(values, positions, space._lo[positions], space._hi[positions], rng)
        return Candidate(values)

    kinds = space._kind_codes[positions]
    bpos = positions[kinds == 0]
    if bpos.size:
        values[bpos] = 1.0 - values[bpos]
    dpos = positions[kinds == 1]
    if dpos.size:
        _resample_discrete(values, dpos, space._ilo[dpos], space._ihi[dpos], rng)
    rpos = positions[kinds == 2]
    if rpos.size:
        _resample_real(values, rpos, space._lo[rpos], space._hi[rpos], rng)
    return Candidate(values)


def _binomial_inversion(n: int, p: float, u: float) -> int:
    q = 1.0 - p
    pmf = math.exp(n * math.log1p(-p))  # q**n, stable for large n
    cdf = pmf
    ratio = p / q
    k = 0
    while u > cdf and k < n:
        pmf *= (n - k) / (k + 1.0) * ratio
        k += 1
        cdf += pmf
    return k


# Rejection is pointless once P(ell > 0) drops below this; self-adaptation
# legitimately wanders to tiny rates on plateaus, so instead of erroring we
# switch to inverting the conditioned distribution directly (same law).
_REJECTION_FLOOR = 1e-3


def _conditioned_inversion(n: int, p: float, u: float, positive_prob: float) -> int:
    if positive_prob <= 0.0:
        return 1  # Bin>0 is concentrated at 1 beyond float resolution
    q = 1.0 - p
    pmf = n * p * math.exp((n - 1) * math.log1p(-p)) / positive_prob
    cdf = pmf
    ratio = p / q
    k = 1
    while u > cdf and k < n:
        pmf *= (n - k) / (k + 1.0) * ratio
        k += 1
        cdf += pmf
    return k


def sample_binomial_positive(n: int, p: float, rng: np.random.Generator) -> int:
    """Bin(n, p) conditioned on a positive outcome.

    Rejection sampling: exact CDF inversion for n <= 64, a Bernoulli sum
    above that, redrawing zeros, capped at 1e6 retries. A zero from the
    n > 64 Bernoulli sum certifies that n*p is
    small, so retries there switch to the (equally exact, now cheap) CDF
    inversion rather than drawing n uniforms per retry. When the success
    probability is so small that rejection cannot finish (rates drift
    arbitrarily low on plateaus), the conditioned distribution is inverted
    directly instead, which is the same law.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"rate must lie strictly in (0,1), got {p}")
    if n < 1:
        raise ValueError("dimensionality must be >= 1")
    positive_prob = -math.expm1(n * math.log1p(-p))
    if positive_prob < _REJECTION_FLOOR:
        return _conditioned_inversion(n, p, rng.random(), positive_prob)
    retries = 0
    if n > 64:
        ell = int((rng.random(n) < p).sum())
        if ell > 0:  # overwhelmingly the only draw for healthy rates
            return ell
        retries = 1
    while retries < _REJECTION_CAP:
        ell = _binomial_inversion(n, p, rng.random())
        if ell > 0:
            return ell
        retries += 1
    raise RuntimeError(
        f"Bin>0({n}, {p}) rejection sampling exceeded {_REJECTION_CAP} retries"
    )
