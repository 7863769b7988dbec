"""Input validation helpers shared by the functional API and the estimators."""

import numbers

import numpy as np


class ShapeError(ValueError):
    """Raised when array shapes disagree or do not meet an operation's contract."""


def check_frame(x, name="frame", min_size=1):
    """Return ``x`` as a finite float64 ``(H, W)`` array."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D (H, W), got shape {arr.shape}")
    if arr.shape[0] < min_size or arr.shape[1] < min_size:
        raise ShapeError(f"{name} must be at least {min_size}x{min_size}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_feature_map(x, name="feature map"):
    """Return ``x`` as a finite float64 ``(C, H, W)`` array; 2-D input gains C=1."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3 or min(arr.shape) < 1:
        raise ShapeError(f"{name} must be (C, H, W), got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_sequence(x, name="sequence", min_length=1):
    """Return ``x`` as a float64 ``(n, H, W)`` frame stack."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3:
        raise ShapeError(f"{name} must be (n, H, W), got shape {arr.shape}")
    if arr.shape[0] < min_length:
        raise ShapeError(f"{name} needs at least {min_length} frames, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_same_shape(*arrays, names=None):
    shapes = [np.shape(a) for a in arrays]
    if any(s != shapes[0] for s in shapes[1:]):
        names = names or [f"arg{i}" for i in range(len(arrays))]
        desc = ", ".join(f"{n}={s}" for n, s in zip(names, shapes))
        raise ShapeError(f"shape mismatch: {desc}")


def check_weight_map(w, shape=None, name="weight map"):
    """Weights must be finite and inside [0, 1]."""
    arr = np.asarray(w, dtype=np.float64)
    if shape is not None and arr.shape != tuple(shape):
        raise ShapeError(f"{name} has shape {arr.shape}, expected {tuple(shape)}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise ValueError(f"{name} values must lie in [0, 1]")
    return arr


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_frame_size(height, width):
    return check_positive_int(height, "height"), check_positive_int(width, "width")
