"""Input validation helpers shared by every module."""

import numpy as np

from .exceptions import DimensionError, ValidationError

STOCHASTIC_ATOL = 1e-12


def as_float_array(x, name, ndim=None):
    try:
        arr = np.asarray(x, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} is not a numeric array: {exc}") from None
    if ndim is not None and arr.ndim != ndim:
        raise DimensionError(f"{name} must have {ndim} dimension(s), got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr


def check_distribution(p, name="distribution", atol=STOCHASTIC_ATOL):
    """Return ``p`` as a 1-d float array after checking it lies on the simplex."""
    arr = as_float_array(p, name, ndim=1)
    if arr.size == 0:
        raise ValidationError(f"{name} is empty")
    if np.any(arr < 0):
        raise ValidationError(f"{name} has negative entries")
    if abs(arr.sum() - 1.0) > atol:
        raise ValidationError(f"{name} sums to {arr.sum():.17g}, not 1")
    return arr


def check_stochastic(matrix, name="matrix", ndim=2, atol=STOCHASTIC_ATOL):
    """Check that the last axis of ``matrix`` holds probability distributions."""
    arr = as_float_array(matrix, name, ndim=ndim)
    if arr.size == 0:
        raise ValidationError(f"{name} is empty")
    if np.any(arr < 0):
        raise ValidationError(f"{name} has negative entries")
    sums = arr.sum(axis=-1)
    worst = np.max(np.abs(sums - 1.0))
    if worst > atol:
        raise ValidationError(f"{name} rows are not stochastic (max deviation {worst:.3g})")
    return arr


def check_shape(arr, shape, name):
    if arr.shape != tuple(shape):
        raise DimensionError(f"{name} has shape {arr.shape}, expected {tuple(shape)}")
    return arr


def check_positive(value, name):
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} must be a positive finite number, got {value!r}")
    return value


def check_choice(value, choices, name):
    if value not in choices:
        raise ValidationError(f"{name} must be one of {sorted(choices)}, got {value!r}")
    return value


def frozen(arr):
    """Return a read-only copy so containers stay immutable after construction."""
    out = np.array(arr, dtype=float, copy=True)
    out.setflags(write=False)
    return out
