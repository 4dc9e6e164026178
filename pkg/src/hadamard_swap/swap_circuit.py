"""Statevector simulation of controlled-swap circuits on ``M`` qudit registers.

Register 0 holds phi and registers ``1..M-1`` hold psi.  ``n = log2(M)``
ancilla qubits start in ``|+>``, each controls one layer of swaps, and are
finally rotated back with Hadamards; the test accepts when every ancilla
reads 0.  Ancillas are the leading tensor axes of the statevector.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .matrix import permanent_naive
from .validation import DimensionError, ValidationError, check_state

__all__ = [
    "QuditState",
    "CircuitLayout",
    "build_layout",
    "simulate",
    "accept_probability",
    "post_measurement_state",
    "symmetrized_state",
    "symmetric_bound",
    "symmetric_projector",
    "projector_bound",
    "copies_lower_bound",
]

MAX_QUBITS = 22
_H = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


@dataclass(frozen=True)
class QuditState:
    local_dim: int
    amplitudes: np.ndarray
    register_count: int
    ancilla_count: int = 0

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        expected = self.local_dim ** self.register_count * 2 ** self.ancilla_count
        if amps.size != expected:
            raise DimensionError(f"expected {expected} amplitudes, got {amps.size}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def tensor(self) -> np.ndarray:
        shape = (2,) * self.ancilla_count + (self.local_dim,) * self.register_count
        return self.amplitudes.reshape(shape)


@dataclass(frozen=True)
class CircuitLayout:
    """Controlled-swap layers: ``(control ancilla, swap pairs)`` in application order."""

    size: int
    layers: tuple[tuple[int, tuple[tuple[int, int], ...]], ...]
    variant: str

    @property
    def n_ancillas(self) -> int:
        return len(self.layers)

    @property
    def swap_count(self) -> int:
        return sum(len(pairs) for _, pairs in self.layers)

    def reordered(self, order: Sequence[int]) -> "CircuitLayout":
        if sorted(order) != list(range(len(self.layers))):
            raise ValidationError(f"not a layer ordering: {list(order)}")
        return CircuitLayout(self.size, tuple(self.layers[k] for k in order), self.variant)


def build_layout(m: int, variant: str = "full") -> CircuitLayout:
    """Swap layers for ``M = 2**n`` registers.

    ``full``: layer ``k`` swaps ``j*2**(k+1) + i`` with that index plus
    ``2**k`` for every ``i < 2**k``, ``j < 2**(n-k-1)``.  ``simplified``:
    layer ``k`` swaps ``l`` with ``l + 2**k`` for ``l < 2**k`` and must be
    applied in ascending ``k``.
    """
    if m < 2 or m & (m - 1):
        raise ValidationError(f"circuit size must be a power of two >= 2, got {m}")
    n = m.bit_length() - 1
    layers = []
    for k in range(n):
        step = 1 << k
        if variant == "full":
            pairs = tuple(
                (j * 2 * step + i, j * 2 * step + i + step)
                for j in range(1 << (n - k - 1))
                for i in range(step)
            )
        elif variant == "simplified":
            pairs = tuple((l, l + step) for l in range(step))
        else:
            raise ValueError(f"unknown variant {variant!r}")
        layers.append((k, pairs))
    return CircuitLayout(m, tuple(layers), variant)


def _input_state(layout: CircuitLayout, phi, psi) -> tuple[np.ndarray, int]:
    phi = check_state(phi, tol=1e-9, name="phi")
    psi = check_state(psi, tol=1e-9, name="psi")
    if phi.shape != psi.shape:
        raise DimensionError(f"phi and psi have different dimensions: {phi.size} vs {psi.size}")
    d = phi.size
    total = layout.size * math.log2(d) + layout.n_ancillas
    if total > MAX_QUBITS + 1e-9:
        raise ValueError(f"circuit needs {total:.1f} qubits, more than {MAX_QUBITS}")
    regs = phi
    for _ in range(layout.size - 1):
        regs = np.multiply.outer(regs, psi)
    regs = regs.reshape((d,) * layout.size)
    return regs, d


def _swap_axes(perm: list[int], pairs: Sequence[tuple[int, int]], offset: int) -> list[int]:
    perm = list(perm)
    for a, b in pairs:
        perm[offset + a], perm[offset + b] = perm[offset + b], perm[offset + a]
    return perm


def _hadamard(state: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(_H, state, axes=([1], [axis])), 0, axis)


def simulate(layout: CircuitLayout, phi, psi) -> QuditState:
    """Full pre-measurement statevector (ancillas first)."""
    regs, d = _input_state(layout, phi, psi)
    n_anc = layout.n_ancillas
    state = np.zeros((2,) * n_anc + regs.shape, dtype=np.complex128)
    state[(0,) * n_anc] = regs
    for a in range(n_anc):
        state = _hadamard(state, a)
    for ctrl, pairs in layout.layers:
        sub = [slice(None)] * state.ndim
        sub[ctrl] = 1
        sub = tuple(sub)
        branch = state[sub]
        # a product of disjoint swaps is an involution, so the axis
        # permutation is its own inverse
        axes = _swap_axes(list(range(branch.ndim)), pairs, n_anc - 1)
        state[sub] = np.transpose(branch, axes).copy()
    for a in range(n_anc):
        state = _hadamard(state, a)
    return QuditState(d, state.ravel(), layout.size, n_anc)


def post_measurement_state(layout: CircuitLayout, phi, psi) -> QuditState:
    """Unnormalised register state after projecting every ancilla on ``|0>``."""
    full = simulate(layout, phi, psi)
    t = full.tensor()[(0,) * layout.n_ancillas]
    return QuditState(full.local_dim, t.ravel(), layout.size)


def accept_probability(layout: CircuitLayout, phi, psi) -> float:
    return post_measurement_state(layout, phi, psi).norm_squared


def symmetrized_state(phi, psi, m: int) -> np.ndarray:
    """``(1/M) * sum_k |psi..phi(k)..psi>`` built directly as a tensor sum."""
    phi = np.asarray(phi, dtype=np.complex128)
    psi = np.asarray(psi, dtype=np.complex128)
    total = np.zeros(phi.size ** m, dtype=np.complex128)
    for pos in range(m):
        term = np.ones(1, dtype=np.complex128)
        for k in range(m):
            term = np.kron(term, phi if k == pos else psi)
        total += term
    return total / m


def _check_states(states) -> list[np.ndarray]:
    states = [check_state(s, tol=1e-9, name=f"state {i}") for i, s in enumerate(states)]
    if not states:
        raise ValidationError("need at least one state")
    if len({s.size for s in states}) != 1:
        raise DimensionError("states have different dimensions")
    return states


def symmetric_bound(states) -> float:
    """``(1/M!) sum_sigma prod_k <psi_k|psi_sigma(k)>``, by enumerating permutations.

    This is the acceptance probability of the projector onto the symmetric
    subspace, hence a lower bound on the false-accept probability of any
    one-sided identity test.
    """
    states = _check_states(states)
    m = len(states)
    if m > 6:
        raise ValueError(f"symmetric_bound enumerates M! terms; M <= 6 supported, got {m}")
    gram = np.array([[np.vdot(a, b) for b in states] for a in states])
    value = permanent_naive(gram) / math.factorial(m)
    if abs(value.imag) > 1e-12:
        raise ArithmeticError(f"permutation sum has imaginary part {value.imag:.3e}")
    return float(value.real)


def symmetric_projector(d: int, m: int) -> np.ndarray:
    """Dense ``(1/M!) sum_sigma P_sigma`` on ``(C^d)^{(x) M}``."""
    dim = d ** m
    if dim > 4096:
        raise ValueError(f"projector of dimension {dim} is too large")
    columns = np.eye(dim).reshape((d,) * m + (dim,))
    proj = np.zeros((dim, dim))
    for sigma in itertools.permutations(range(m)):
        proj += np.transpose(columns, sigma + (m,)).reshape(dim, dim)
    return proj / math.factorial(m)


def projector_bound(states) -> float:
    """``Tr[P_S |psi_0..psi_{M-1}><psi_0..psi_{M-1}|]`` with an explicit projector."""
    states = _check_states(states)
    vec = np.ones(1, dtype=np.complex128)
    for s in states:
        vec = np.kron(vec, s)
    proj = symmetric_projector(states[0].size, len(states))
    return float(np.vdot(vec, proj @ vec).real)


def copies_lower_bound(epsilon) -> int:
    """Fewest program copies ``N`` with ``N >= 1/epsilon - 1``."""
    eps = Fraction(epsilon).limit_denominator(10 ** 12) if isinstance(epsilon, float) else Fraction(epsilon)
    if eps <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return max(0, math.ceil(1 / eps - 1))
