"""Input validation helpers shared by the estimators and the functional API."""

from __future__ import annotations

from typing import Sequence

import numpy as np


class DimensionError(ValueError):
    """Raised when array shapes are incompatible."""


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


def as_complex_matrix(m) -> np.ndarray:
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("matrix has non-finite entries")
    return arr


def check_square(m: np.ndarray) -> np.ndarray:
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def check_unitary(u, tol: float = 1e-10) -> np.ndarray:
    u = check_square(as_complex_matrix(u))
    residual = np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0])), initial=0.0)
    if residual > tol:
        raise ValidationError(f"matrix is not unitary (residual {residual:.3e} > {tol:g})")
    return u


def check_pattern(d: Sequence[int], n_modes: int, n_photons: int | None = None) -> tuple[int, ...]:
    """Return ``d`` as a tuple of ints after checking it is a detection pattern.

    By default the photon number must equal the number of modes.
    """
    arr = np.asarray(d)
    if arr.ndim != 1:
        raise DimensionError(f"pattern must be 1-D, got shape {arr.shape}")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if not np.all(arr == np.rint(arr)):
            raise ValidationError(f"pattern counts must be integers: {d!r}")
        arr = np.rint(arr).astype(np.int64)
    if arr.shape[0] != n_modes:
        raise DimensionError(f"pattern has {arr.shape[0]} modes, expected {n_modes}")
    if np.any(arr < 0):
        raise ValidationError(f"pattern counts must be non-negative: {d!r}")
    expected = n_modes if n_photons is None else n_photons
    if int(arr.sum()) != expected:
        raise ValidationError(f"pattern {tuple(arr.tolist())} does not hold {expected} photons")
    return tuple(int(x) for x in arr)


def check_patterns(X, n_modes: int | None = None) -> np.ndarray:
    """Validate a batch of detection patterns, one per row."""
    arr = np.asarray(X)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise DimensionError(f"patterns must be 2-D, got shape {arr.shape}")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if not np.all(arr == np.rint(arr)):
            raise ValidationError("pattern counts must be integers")
    arr = np.rint(arr).astype(np.int64)
    if n_modes is not None and arr.shape[1] != n_modes:
        raise DimensionError(f"patterns have {arr.shape[1]} modes, expected {n_modes}")
    if np.any(arr < 0):
        raise ValidationError("pattern counts must be non-negative")
    bad = arr.sum(axis=1) != arr.shape[1]
    if np.any(bad):
        row = int(np.flatnonzero(bad)[0])
        raise ValidationError(f"pattern {arr[row].tolist()} does not hold {arr.shape[1]} photons")
    return arr


def check_state(v, tol: float = 1e-12, name: str = "state") -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"{name} must be a non-empty vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValidationError(f"{name} has non-finite entries")
    norm = float(np.vdot(v, v).real)
    if abs(norm - 1.0) > tol:
        raise ValidationError(f"{name} is not normalised (squared norm {norm!r})")
    return v


def check_overlap(c) -> float:
    c = float(c)
    if not np.isfinite(c) or c < 0.0 or c > 1.0:
        raise ValidationError(f"overlap must lie in [0, 1], got {c!r}")
    return c


def check_random_state(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
