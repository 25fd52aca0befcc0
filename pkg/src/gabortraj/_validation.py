"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""

import numbers

import numpy as np

from .exceptions import PreconditionError

#: Largest Hermite index supported anywhere in the package.
N_MAX = 64


def check_coefficients(coeffs, name="coeffs"):
    """Return ``coeffs`` as a finite 1-D complex array (at least one entry)."""
    arr = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    if arr.ndim != 1:
        raise PreconditionError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        arr = np.zeros(1, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise PreconditionError(f"{name} contains non-finite values")
    if arr.size - 1 > N_MAX:
        raise PreconditionError(
            f"{name} has highest index {arr.size - 1} > N_max={N_MAX}")
    return arr


def check_index(n, name="n"):
    if not isinstance(n, numbers.Integral) or n < 0:
        raise PreconditionError(f"{name} must be a non-negative integer, got {n!r}")
    if n > N_MAX:
        raise PreconditionError(f"{name}={n} exceeds N_max={N_MAX}")
    return int(n)


def check_points(z, name="z"):
    """Coerce phase-space points to an ``(k, 2)`` float array.

    Accepts a single pair, an array of pairs, or complex numbers ``x + i xi``.
    """
    arr = np.asarray(z)
    if np.iscomplexobj(arr):
        arr = np.atleast_1d(arr).ravel()
        arr = np.stack([arr.real, arr.imag], axis=-1)
    arr = np.asarray(arr, dtype=float)
    if arr.ndim == 1:
        if arr.shape[0] != 2:
            raise PreconditionError(f"{name} must have a trailing dimension of 2")
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise PreconditionError(f"{name} must have shape (k, 2), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise PreconditionError(f"{name} contains non-finite values")
    return arr


def check_positive(value, name, strict=True):
    if not isinstance(value, numbers.Real) or not np.isfinite(value):
        raise PreconditionError(f"{name} must be a finite real number, got {value!r}")
    if strict and value <= 0:
        raise PreconditionError(f"{name} must be positive, got {value}")
    if not strict and value < 0:
        raise PreconditionError(f"{name} must be non-negative, got {value}")
    return float(value)


def check_box(box):
    """Normalise a truncation box to ``(x0, x1, y0, y1)``.

    A scalar ``b`` means the square ``[-b, b]^2``.
    """
    if isinstance(box, numbers.Real):
        b = check_positive(box, "box")
        return (-b, b, -b, b)
    vals = tuple(float(v) for v in box)
    if len(vals) != 4:
        raise PreconditionError("box must be a scalar or (x0, x1, y0, y1)")
    x0, x1, y0, y1 = vals
    if not (x0 < x1 and y0 < y1):
        raise PreconditionError(f"degenerate box {vals}")
    return vals
