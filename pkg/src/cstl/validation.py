"""Input validation helpers shared by the data types and estimators."""

import numpy as np


def as_float_matrix(x, name="X"):
    """Coerce to a 2-d float array, rejecting anything else."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array, got shape {arr.shape}")
    return arr


def as_float_vector(x, name="y"):
    """Coerce to a 1-d float array, rejecting anything else."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-d array, got shape {arr.shape}")
    return arr


def check_finite_matrix(arr, name="X"):
    """Raise naming the first offending (row, column) if any entry is not finite."""
    mask = ~np.isfinite(arr)
    if mask.any():
        i, j = np.argwhere(mask)[0]
        raise ValueError(
            f"{name} contains a non-finite entry at row {i + 1}, column {j + 1}"
        )


def check_finite_vector(arr, name="y"):
    """Raise naming the first offending position if any entry is not finite."""
    mask = ~np.isfinite(arr)
    if mask.any():
        i = int(np.argwhere(mask)[0][0])
        raise ValueError(f"{name} contains a non-finite entry at position {i + 1}")


def check_design_response(X, y, x_name="X", y_name="y"):
    """Validate a design/response pair and return them as float arrays."""
    X = as_float_matrix(X, x_name)
    y = as_float_vector(y, y_name)
    if X.shape[0] != y.shape[0]:
        raise ValueError(
            f"{x_name} has {X.shape[0]} rows but {y_name} has length {y.shape[0]}"
        )
    check_finite_matrix(X, x_name)
    check_finite_vector(y, y_name)
    return X, y
