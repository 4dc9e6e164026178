"""Dense complex matrices, root-of-unity matrices and permanents.

Complex matrices are plain ``numpy`` arrays of dtype ``complex128``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .validation import DimensionError, as_complex_matrix, check_square

__all__ = [
    "RootOfUnityMatrix",
    "permanent",
    "permanent_naive",
    "permanent_ryser",
    "is_unitary",
    "repeat_columns",
    "remove_row",
]

NAIVE_MAX_DIM = 10
RYSER_MAX_DIM = 30

# Gray-code steps handled per vectorised block; each block restarts from
# exact row sums so rounding does not accumulate across the whole sweep.
_RYSER_BLOCK = 1 << 12


@dataclass(frozen=True, eq=False)
class RootOfUnityMatrix:
    """Matrix with entries ``exp(2j*pi*exponents[i, j] / order)``.

    Exponents are kept as integers so that callers can do exact modular
    arithmetic instead of comparing floats.
    """

    order: int
    exponents: np.ndarray

    def __post_init__(self):
        if int(self.order) < 1:
            raise ValueError(f"order must be a positive integer, got {self.order}")
        exps = np.asarray(self.exponents)
        if exps.ndim != 2:
            raise DimensionError(f"exponents must be 2-D, got shape {exps.shape}")
        if not np.issubdtype(exps.dtype, np.integer):
            raise TypeError("exponents must be integers")
        exps = np.mod(exps.astype(np.int64), int(self.order))
        exps.setflags(write=False)
        object.__setattr__(self, "order", int(self.order))
        object.__setattr__(self, "exponents", exps)

    @property
    def shape(self) -> tuple[int, int]:
        return self.exponents.shape

    def to_complex(self) -> np.ndarray:
        # exact values for the four quarter turns, everything else via exp
        return _roots_of_unity(self.order)[self.exponents]

    @classmethod
    def from_complex(cls, m, order: int, atol: float = 1e-9) -> "RootOfUnityMatrix":
        """Recover integer exponents from a complex matrix of ``order``-th roots."""
        m = as_complex_matrix(m)
        k = np.rint(np.angle(m) * order / (2 * np.pi)).astype(np.int64) % order
        if not np.allclose(_roots_of_unity(order)[k], m, rtol=0, atol=atol):
            raise ValueError(f"matrix entries are not {order}-th roots of unity")
        return cls(order, k)

    def __eq__(self, other):
        if not isinstance(other, RootOfUnityMatrix):
            return NotImplemented
        return self.order == other.order and np.array_equal(self.exponents, other.exponents)

    def __repr__(self):
        return f"RootOfUnityMatrix(order={self.order}, exponents={self.exponents.tolist()})"


def _roots_of_unity(order: int) -> np.ndarray:
    roots = np.exp(2j * np.pi * np.arange(order) / order)
    if order % 4 == 0:
        q = order // 4
        roots[[0, q, 2 * q, 3 * q]] = [1, 1j, -1, -1j]
    elif order % 2 == 0:
        roots[[0, order // 2]] = [1, -1]
    else:
        roots[0] = 1
    return roots


def permanent_naive(m) -> complex:
    """Permanent by summing over all ``n!`` permutations (oracle, ``n <= 10``)."""
    m = check_square(as_complex_matrix(m))
    n = m.shape[0]
    if n > NAIVE_MAX_DIM:
        raise DimensionError(f"permanent_naive supports n <= {NAIVE_MAX_DIM}, got {n}")
    if n == 0:
        return 1 + 0j
    rows = np.arange(n)
    total = 0j
    for sigma in itertools.permutations(range(n)):
        total += np.prod(m[rows, sigma])
    return complex(total)


def permanent_ryser(m) -> complex:
    """Permanent via Ryser's inclusion-exclusion formula.

    Column subsets are visited in Gray-code order so that each step only
    adds or removes a single column from the running row sums, giving
    ``O(2**n * n)`` work.
    """
    m = check_square(as_complex_matrix(m))
    n = m.shape[0]
    if n > RYSER_MAX_DIM:
        raise DimensionError(f"permanent_ryser supports n <= {RYSER_MAX_DIM}, got {n}")
    if n == 0:
        return 1 + 0j
    if n == 1:
        return complex(m[0, 0])

    n_steps = 1 << n
    block = min(_RYSER_BLOCK, n_steps)
    bit_values = 1 << np.arange(n, dtype=np.int64)
    total = 0j
    for start in range(0, n_steps, block):
        t = np.arange(start, start + block, dtype=np.int64)
        gray = t ^ (t >> 1)
        first = int(gray[0])
        first_cols = (first >> np.arange(n)) & 1
        row_sums0 = m @ first_cols.astype(np.complex128)

        # column flipped between consecutive gray codes, and whether it was added
        flipped = gray[1:] ^ gray[:-1]
        col = np.log2(flipped).astype(np.int64)
        added = (gray[1:] & bit_values[col]) != 0
        deltas = m[:, col].T * np.where(added, 1.0, -1.0)[:, None]
        row_sums = np.vstack([row_sums0, row_sums0 + np.cumsum(deltas, axis=0)])

        sizes = _popcount(gray)
        signs = np.where(sizes % 2 == n % 2, 1.0, -1.0)
        # the empty subset contributes a zero product
        total += np.sum(signs * np.prod(row_sums, axis=1))
    return complex(total)


def _popcount(x: np.ndarray) -> np.ndarray:
    x = x.copy()
    count = np.zeros_like(x)
    while np.any(x):
        count += x & 1
        x >>= 1
    return count


def permanent(m) -> complex:
    """Permanent using the fast kernel."""
    return permanent_ryser(m)


def is_unitary(m, tol: float = 1e-12) -> bool:
    m = check_square(as_complex_matrix(m))
    residual = m @ m.conj().T - np.eye(m.shape[0])
    return bool(np.max(np.abs(residual), initial=0.0) <= tol)


def repeat_columns(m, counts: Sequence[int]) -> np.ndarray:
    """Repeat column ``k`` of ``m`` ``counts[k]`` times, keeping source order."""
    m = as_complex_matrix(m)
    counts = np.asarray(counts, dtype=np.int64)
    if counts.ndim != 1 or counts.shape[0] != m.shape[1]:
        raise DimensionError(
            f"pattern of length {counts.shape} does not match {m.shape[1]} columns"
        )
    if np.any(counts < 0):
        raise ValueError("column multiplicities must be non-negative")
    return np.repeat(m, counts, axis=1)


def remove_row(m, i: int) -> np.ndarray:
    m = as_complex_matrix(m)
    if not 0 <= i < m.shape[0]:
        raise IndexError(f"row index {i} out of range for {m.shape[0]} rows")
    return np.delete(m, i, axis=0)
