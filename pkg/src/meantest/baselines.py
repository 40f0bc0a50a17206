"""Reference statistics that contextualize the split tester.

The unsplit plug-in norm ||mean of all rows||^2 is biased upward by
tr(Sigma)/n (the two "halves" of the inner product are fully correlated),
which is exactly what the split statistic avoids. The sign map sends each
coordinate to {-1, +1}; composing it with the plug-in norm gives a naive
hypercube baseline. Neither baseline carries an optimality claim.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .validation import check_samples

__all__ = ["BaselineKind", "BaselineStatistic", "unsplit_plugin", "sign_map", "sign_mean_norm"]


class BaselineKind(str, enum.Enum):
    UNSPLIT_PLUGIN = "unsplit_plugin"
    SIGN_MEAN_NORM = "sign_mean_norm"


@dataclass(frozen=True)
class BaselineStatistic:
    kind: BaselineKind
    value: float
    n: int
    dim: int


def unsplit_plugin(samples) -> BaselineStatistic:
    """Squared norm of the sample mean over all rows.

    E = ||mu||^2 + tr(Sigma)/n, i.e. biased by tr(Sigma)/n relative to the
    split statistic.
    """
    X = check_samples(samples)
    mean = X.mean(axis=0)
    return BaselineStatistic(
        kind=BaselineKind.UNSPLIT_PLUGIN,
        value=float(mean @ mean),
        n=X.shape[0],
        dim=X.shape[1],
    )


def sign_map(samples) -> np.ndarray:
    """Coordinatewise sign transform onto {-1, +1}; sign(0) = +1."""
    X = check_samples(samples)
    return np.where(X >= 0.0, 1.0, -1.0)


def sign_mean_norm(samples) -> BaselineStatistic:
    """Plug-in norm of the sign-mapped sample mean (hypercube baseline)."""
    X = check_samples(samples)
    signs = np.where(X >= 0.0, 1.0, -1.0)
    mean = signs.mean(axis=0)
    return BaselineStatistic(
        kind=BaselineKind.SIGN_MEAN_NORM,
        value=float(mean @ mean),
        n=X.shape[0],
        dim=X.shape[1],
    )
