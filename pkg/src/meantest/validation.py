"""Input validation helpers shared across the package."""

from __future__ import annotations

import math

import numpy as np


class InsufficientDataError(ValueError):
    """Raised when a batch has too few rows for the requested operation."""


def check_positive(value, name: str) -> float:
    """Validate a strictly positive, finite scalar and return it as float."""
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be positive and finite, got {value!r}")
    return value


def check_positive_int(value, name: str) -> int:
    """Validate a strictly positive integer (integral floats are accepted)."""
    if isinstance(value, bool):
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"{name} must be a positive integer, got {value!r}")
        value = int(value)
    if not isinstance(value, (int, np.integer)):
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    if value < 1:
        raise ValueError(f"{name} must be >= 1, got {value}")
    return int(value)


def check_nonnegative_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ValueError(f"{name} must be a nonnegative integer, got {value!r}")
    if value < 0:
        raise ValueError(f"{name} must be >= 0, got {value}")
    return int(value)


def check_samples(X, *, name: str = "samples", min_count: int = 1, dim: int | None = None) -> np.ndarray:
    """Validate a batch of row-vector samples.

    Returns a float64 2-D array of shape (count, dim). Rejects non-2-D input,
    batches with fewer than ``min_count`` rows, and any NaN/infinity (the
    error names the first offending row).
    """
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D (count, dim) array, got shape {arr.shape}")
    if arr.shape[1] < 1:
        raise ValueError(f"{name} must have at least one column, got shape {arr.shape}")
    if arr.shape[0] < min_count:
        raise InsufficientDataError(f"{name} needs at least {min_count} rows, got {arr.shape[0]}")
    if dim is not None and arr.shape[1] != dim:
        raise ValueError(f"{name} has {arr.shape[1]} columns, expected dim={dim}")
    finite_rows = np.isfinite(arr).all(axis=1)
    if not finite_rows.all():
        row = int(np.flatnonzero(~finite_rows)[0])
        col = int(np.flatnonzero(~np.isfinite(arr[row]))[0])
        raise ValueError(f"{name} contains a non-finite value at row {row}, column {col}")
    return arr
