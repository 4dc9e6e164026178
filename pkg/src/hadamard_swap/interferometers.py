"""Hadamard-Walsh, Fourier and abelian-group interferometers.

Group interferometers are returned unnormalised as ``RootOfUnityMatrix``
objects (entries are roots of unity); divide ``to_complex()`` by
``sqrt(M)`` to get the unitary.  Tensor factors use mixed-radix indexing
with the first invariant factor as the most significant digit, which is
the ordinary Kronecker-product order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .matrix import RootOfUnityMatrix
from .validation import ValidationError

__all__ = [
    "GroupSpec",
    "BeamSplitterLayer",
    "Decomposition",
    "hadamard_walsh",
    "qft",
    "group_unitary",
    "group_interferometer",
    "generator_rows",
    "row_closure",
    "decompose_hadamard",
    "reconstruct",
    "permute_modes",
    "is_power_of_two",
]

HADAMARD_MAX_N = 10

_H = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


def is_power_of_two(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


@dataclass(frozen=True)
class GroupSpec:
    """Invariant factors ``(a_1, ..., a_N)`` of a finite abelian group."""

    invariant_factors: tuple[int, ...]

    def __post_init__(self):
        factors = tuple(int(a) for a in self.invariant_factors)
        if not factors:
            raise ValidationError("a group needs at least one invariant factor")
        if any(a < 1 for a in factors):
            raise ValidationError(f"invariant factors must be positive: {factors}")
        for a, b in zip(factors, factors[1:]):
            if b % a:
                raise ValidationError(f"invariant factors must form a divisibility chain: {factors}")
        object.__setattr__(self, "invariant_factors", factors)

    @classmethod
    def hadamard(cls, n: int) -> "GroupSpec":
        """The group ``(Z/2)^n``; ``n = 0`` gives the trivial group."""
        return cls((2,) * n if n else (1,))

    @classmethod
    def cyclic(cls, m: int) -> "GroupSpec":
        return cls((m,))

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        try:
            factors = tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok)
        except ValueError as exc:
            raise ValidationError(f"cannot parse group {text!r}") from exc
        return cls(factors)

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def exponent(self) -> int:
        # lcm of the factors, which is the last one for a divisibility chain
        return self.invariant_factors[-1]

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def is_hadamard(self) -> bool:
        return all(a == 2 for a in self.invariant_factors)

    def strides(self) -> tuple[int, ...]:
        """Row-index stride of each tensor factor."""
        out = []
        for i in range(self.rank):
            out.append(math.prod(self.invariant_factors[i + 1:]))
        return tuple(out)

    def digits(self, index: int) -> tuple[int, ...]:
        return tuple((index // s) % a for s, a in zip(self.strides(), self.invariant_factors))

    def __str__(self):
        return ",".join(str(a) for a in self.invariant_factors)


def hadamard_walsh(n: int) -> np.ndarray:
    """Normalised Hadamard-Walsh transform of order ``n`` (size ``2**n``)."""
    if n < 0 or n > HADAMARD_MAX_N:
        raise ValueError(f"n must be in [0, {HADAMARD_MAX_N}], got {n}")
    h = np.ones((1, 1), dtype=np.complex128)
    for _ in range(n):
        h = np.block([[h, h], [h, -h]]) / np.sqrt(2.0)
    return h


def qft(a: int) -> RootOfUnityMatrix:
    """Unnormalised Fourier matrix of order ``a`` as integer exponents."""
    if a < 1:
        raise ValueError(f"QFT order must be positive, got {a}")
    k = np.arange(a)
    return RootOfUnityMatrix(a, np.outer(k, k) % a)


def group_unitary(g: GroupSpec) -> RootOfUnityMatrix:
    """Tensor product of the Fourier matrices of each invariant factor.

    All factors are expressed over the common order ``a_N`` so the result is
    a single exact exponent table.
    """
    order = g.exponent
    exps = np.zeros((1, 1), dtype=np.int64)
    for a in g.invariant_factors:
        scale = order // a
        factor = qft(a).exponents * scale
        exps = (exps[:, None, :, None] + factor[None, :, None, :]).reshape(
            exps.shape[0] * a, exps.shape[1] * a
        )
    return RootOfUnityMatrix(order, exps % order)


def group_interferometer(g: GroupSpec) -> np.ndarray:
    """Normalised unitary of the interferometer attached to ``g``."""
    f = group_unitary(g)
    return f.to_complex() / np.sqrt(g.order)


def generator_rows(g: GroupSpec) -> list[int]:
    """Row indices generating every row of ``group_unitary(g)``.

    One generator per tensor factor, at that factor's stride; for
    ``(2, ..., 2)`` these are the rows ``1, 2, 4, ...``.
    """
    rows = {s for s, a in zip(g.strides(), g.invariant_factors) if a > 1}
    return sorted(rows) if rows else [0]


def row_closure(table: RootOfUnityMatrix, rows: Iterable[int]) -> set[tuple[int, ...]]:
    """All rows reachable from ``rows`` by element-wise multiplication.

    Returned as exponent tuples; the identity row is always included.
    """
    order = table.order
    identity = tuple([0] * table.shape[1])
    gens = [tuple(int(x) for x in table.exponents[r]) for r in rows]
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for row in frontier:
            for gen in gens:
                prod = tuple((x + y) % order for x, y in zip(row, gen))
                if prod not in seen:
                    seen.add(prod)
                    nxt.append(prod)
        frontier = nxt
    return seen


def permute_modes(u, perm: Sequence[int]):
    """Relabel the output modes of an interferometer (columns of ``u``)."""
    perm = np.asarray(perm, dtype=np.int64)
    if sorted(perm.tolist()) != list(range(len(perm))):
        raise ValidationError(f"not a permutation: {perm.tolist()}")
    if isinstance(u, RootOfUnityMatrix):
        return RootOfUnityMatrix(u.order, u.exponents[:, perm])
    return np.asarray(u)[:, perm]


@dataclass(frozen=True)
class BeamSplitterLayer:
    """One column of balanced beam splitters.

    ``permutation[i]`` is the physical mode that abstract mode ``i`` is
    routed to; the beam splitters act on abstract pairs ``(2q, 2q + 1)``,
    so physically on ``(permutation[2q], permutation[2q + 1])``.
    """

    permutation: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        perm = tuple(int(p) for p in self.permutation)
        m = len(perm)
        if m % 2 or sorted(perm) != list(range(m)):
            raise ValidationError(f"layer permutation is not a bijection on an even mode set: {perm}")
        pairs = tuple((perm[2 * q], perm[2 * q + 1]) for q in range(m // 2))
        if self.pairs and tuple(tuple(p) for p in self.pairs) != pairs:
            raise ValidationError("pairs do not match the layer permutation")
        object.__setattr__(self, "permutation", perm)
        object.__setattr__(self, "pairs", pairs)

    @property
    def size(self) -> int:
        return len(self.permutation)

    def unitary(self) -> np.ndarray:
        u = np.zeros((self.size, self.size), dtype=np.complex128)
        for a, b in self.pairs:
            u[np.ix_([a, b], [a, b])] = _H
        return u


@dataclass(frozen=True)
class Decomposition:
    layers: tuple[BeamSplitterLayer, ...]
    size: int

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        for layer in self.layers:
            if layer.size != self.size:
                raise ValidationError(f"layer of size {layer.size} in a decomposition of size {self.size}")

    @property
    def beam_splitter_count(self) -> int:
        return sum(len(layer.pairs) for layer in self.layers)


def decompose_hadamard(n: int) -> Decomposition:
    """Balanced beam-splitter layers whose product is ``hadamard_walsh(n)``.

    Built inductively: going from ``n`` to ``n + 1`` every existing layer
    permutation ``p`` becomes ``Q (I_2 (x) p)`` where ``Q`` is the perfect
    shuffle taking mode ``a*M + x`` to ``2*x + a``, and an identity layer
    is appended last.
    """
    if n < 1 or n > 8:
        raise ValueError(f"n must be in [1, 8], got {n}")
    perms = [np.arange(2)]
    for level in range(1, n):
        half = 1 << level
        lifted = []
        for p in perms:
            a, x = np.divmod(np.arange(2 * half), half)
            lifted.append(2 * p[x] + a)
        lifted.append(np.arange(2 * half))
        perms = lifted
    layers = tuple(BeamSplitterLayer(tuple(p.tolist())) for p in perms)
    return Decomposition(layers, 1 << n)


def reconstruct(d: Decomposition) -> np.ndarray:
    """Product of the layer unitaries, first layer leftmost."""
    return reduce(lambda acc, layer: acc @ layer.unitary(), d.layers, np.eye(d.size, dtype=np.complex128))
