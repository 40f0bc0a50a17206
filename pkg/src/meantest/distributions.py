"""Seeded synthetic samplers for the distribution families used in experiments.

Every family is constructed mean-exact: ``mean_of(spec)`` is the true mean
of the sampled law, not an approximation. Gaussian covariance is specified
through a factor L with Sigma = L L^T (scalar, diagonal, or full lower
triangular), which keeps rank-deficient covariances unproblematic. The
non-Gaussian families are coordinatewise log-concave laws (Laplace,
uniform, centered exponential) with a common per-coordinate scale.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .validation import check_nonnegative_int, check_positive, check_positive_int

__all__ = [
    "Family",
    "Seed",
    "DistributionSpec",
    "sample",
    "mean_of",
    "covariance_of",
    "covariance_frobenius",
]

_MAX_SEED = 2**64


class Family(str, enum.Enum):
    GAUSSIAN = "gaussian"
    PRODUCT_LAPLACE = "product_laplace"
    PRODUCT_UNIFORM = "product_uniform"
    PRODUCT_EXPONENTIAL_CENTERED = "product_exponential_centered"


@dataclass(frozen=True)
class Seed:
    """Root entropy plus a trial index selecting one derived stream.

    Distinct ``trial_index`` values under the same ``value`` yield
    statistically independent streams (spawn-key derivation), which makes
    parallel trial generation race-free and schedule-independent.
    """

    value: int
    trial_index: int = 0

    def __post_init__(self):
        if not isinstance(self.value, (int, np.integer)) or isinstance(self.value, bool):
            raise ValueError(f"seed value must be an integer, got {self.value!r}")
        if not 0 <= self.value < _MAX_SEED:
            raise ValueError(f"seed value must be a 64-bit unsigned integer, got {self.value}")
        check_nonnegative_int(self.trial_index, "trial_index")

    def for_trial(self, trial_index: int) -> "Seed":
        return Seed(self.value, trial_index)

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence(self.value, spawn_key=(self.trial_index,))
        )


@dataclass(frozen=True, eq=False)
class DistributionSpec:
    """Declarative description of one sampling distribution.

    ``cov_factor`` (GAUSSIAN only) may be None (identity), a nonnegative
    scalar s (Sigma = s^2 I), a nonnegative d-vector v (Sigma = diag(v^2)),
    or a d x d lower-triangular matrix L (Sigma = L L^T). ``scale`` is the
    per-coordinate scale of the non-Gaussian families.
    """

    dim: int
    family: Family = Family.GAUSSIAN
    mean: np.ndarray | None = None
    cov_factor: float | np.ndarray | None = None
    scale: float = 1.0

    def __post_init__(self):
        dim = check_positive_int(self.dim, "dim")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "family", Family(self.family))

        mean = np.zeros(dim) if self.mean is None else np.asarray(self.mean, dtype=np.float64)
        if mean.shape != (dim,):
            raise ValueError(f"mean must have shape ({dim},), got {mean.shape}")
        if not np.isfinite(mean).all():
            raise ValueError("mean must be finite")
        mean = mean.copy()
        mean.flags.writeable = False
        object.__setattr__(self, "mean", mean)

        if self.family is Family.GAUSSIAN:
            object.__setattr__(self, "cov_factor", self._normalized_factor(dim))
        else:
            if self.cov_factor is not None:
                raise ValueError(f"cov_factor only applies to the {Family.GAUSSIAN.value} family")
            object.__setattr__(self, "scale", check_positive(self.scale, "scale"))

    def _normalized_factor(self, dim):
        factor = self.cov_factor
        if factor is None:
            return None
        if np.isscalar(factor) or (isinstance(factor, np.ndarray) and factor.ndim == 0):
            factor = float(factor)
            if not math.isfinite(factor) or factor < 0:
                raise ValueError(f"scalar cov_factor must be nonnegative and finite, got {factor!r}")
            return factor
        factor = np.asarray(factor, dtype=np.float64)
        if not np.isfinite(factor).all():
            raise ValueError("cov_factor must be finite")
        if factor.ndim == 1:
            if factor.shape != (dim,):
                raise ValueError(f"diagonal cov_factor must have shape ({dim},), got {factor.shape}")
            if (factor < 0).any():
                raise ValueError("diagonal cov_factor entries must be nonnegative")
        elif factor.ndim == 2:
            if factor.shape != (dim, dim):
                raise ValueError(f"cov_factor must have shape ({dim}, {dim}), got {factor.shape}")
            if not np.array_equal(factor, np.tril(factor)):
                raise ValueError("matrix cov_factor must be lower triangular")
        else:
            raise ValueError(f"cov_factor must be a scalar, vector, or matrix, got ndim={factor.ndim}")
        factor = factor.copy()
        factor.flags.writeable = False
        return factor

    def __eq__(self, other):
        if not isinstance(other, DistributionSpec):
            return NotImplemented
        if (self.dim, self.family, self.scale) != (other.dim, other.family, other.scale):
            return False
        if not np.array_equal(self.mean, other.mean):
            return False
        mine, theirs = self.cov_factor, other.cov_factor
        if isinstance(mine, np.ndarray) != isinstance(theirs, np.ndarray):
            return False
        if isinstance(mine, np.ndarray):
            return mine.shape == theirs.shape and np.array_equal(mine, theirs)
        return mine == theirs

    def __hash__(self):
        factor = self.cov_factor
        factor_key = factor.tobytes() if isinstance(factor, np.ndarray) else factor
        return hash((self.dim, self.family, self.scale, self.mean.tobytes(), factor_key))

    @classmethod
    def gaussian(cls, mean, cov_factor=None) -> "DistributionSpec":
        mean = np.atleast_1d(np.asarray(mean, dtype=np.float64))
        return cls(dim=mean.shape[0], family=Family.GAUSSIAN, mean=mean, cov_factor=cov_factor)

    @classmethod
    def standard_normal(cls, dim: int) -> "DistributionSpec":
        return cls(dim=dim, family=Family.GAUSSIAN)


def sample(spec: DistributionSpec, count: int, seed: Seed) -> np.ndarray:
    """Draw ``count`` i.i.d. rows from the spec's law, deterministically in
    (spec, count, seed). Returns a (count, dim) float64 array."""
    count = check_positive_int(count, "count")
    rng = seed.generator()
    mean = spec.mean
    if spec.family is Family.GAUSSIAN:
        g = rng.standard_normal((count, spec.dim))
        factor = spec.cov_factor
        if factor is None:
            x = g
        elif isinstance(factor, float):
            x = g * factor
        elif factor.ndim == 1:
            x = g * factor
        else:
            x = g @ factor.T
        return x + mean
    if spec.family is Family.PRODUCT_LAPLACE:
        return rng.laplace(loc=mean, scale=spec.scale, size=(count, spec.dim))
    if spec.family is Family.PRODUCT_UNIFORM:
        half_width = math.sqrt(3.0) * spec.scale
        return rng.uniform(mean - half_width, mean + half_width, size=(count, spec.dim))
    # centered exponential: Exp(scale) has mean `scale`, subtract it
    draws = rng.exponential(scale=spec.scale, size=(count, spec.dim))
    return draws - spec.scale + mean


def mean_of(spec: DistributionSpec) -> np.ndarray:
    """Exact mean vector of the spec's law."""
    return spec.mean.copy()


def covariance_of(spec: DistributionSpec) -> np.ndarray:
    """Exact covariance matrix Sigma of the spec's law."""
    d = spec.dim
    if spec.family is Family.GAUSSIAN:
        factor = spec.cov_factor
        if factor is None:
            return np.eye(d)
        if isinstance(factor, float):
            return factor * factor * np.eye(d)
        if factor.ndim == 1:
            return np.diag(factor * factor)
        return factor @ factor.T
    if spec.family is Family.PRODUCT_LAPLACE:
        var = 2.0 * spec.scale * spec.scale
    else:  # uniform on +-sqrt(3) s and centered exponential both have variance s^2
        var = spec.scale * spec.scale
    return var * np.eye(d)


def covariance_frobenius(spec: DistributionSpec) -> float:
    """Frobenius norm of the spec's covariance matrix."""
    if spec.family is Family.GAUSSIAN:
        factor = spec.cov_factor
        if factor is None:
            return math.sqrt(spec.dim)
        if isinstance(factor, float):
            return factor * factor * math.sqrt(spec.dim)
        if factor.ndim == 1:
            return float(math.sqrt(np.sum(factor**4)))
        return float(np.linalg.norm(factor @ factor.T, "fro"))
    return float(np.linalg.norm(covariance_of(spec), "fro"))
