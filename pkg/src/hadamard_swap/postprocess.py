"""Classical post-processing of detection patterns.

A pattern ``D`` is accepted (output bit 0, "states identical") when
``pi(D) = sum_i prod_j f_ij ** d_j`` equals ``M``, where ``f_ij`` are the
root-of-unity entries of the unnormalised group interferometer.  Row ``i``
contributes ``omega ** x_i`` with ``x_i = sum_j d_j e_ij mod order``, so
everything is done on integer exponents.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .interferometers import GroupSpec, generator_rows, group_unitary, permute_modes, row_closure
from .matrix import RootOfUnityMatrix
from .photon_stats import PatternDistribution, as_overlap, distribution
from .validation import DimensionError, ValidationError, as_complex_matrix, check_pattern, check_patterns

__all__ = [
    "DecisionRule",
    "EquivalenceReport",
    "pi_value",
    "pi_values",
    "accept",
    "accept_many",
    "hadamard_parity_test",
    "acceptance_probability",
    "analytic_acceptance",
    "equivalence_report",
]


@dataclass(frozen=True, eq=False)
class DecisionRule:
    """Exponent table of ``F_G`` plus the generator rows used by the fast test."""

    group: GroupSpec
    generators: tuple[int, ...]
    exponent_table: RootOfUnityMatrix
    mode_permutation: tuple[int, ...] | None = field(default=None)

    def __post_init__(self):
        table = self.exponent_table
        m = self.group.order
        if table.shape != (m, m):
            raise DimensionError(f"exponent table shape {table.shape} does not match group order {m}")
        if np.any(table.exponents[0] != 0):
            raise ValidationError("row 0 of the exponent table must be the identity row")
        rows = {tuple(int(x) for x in r) for r in table.exponents}
        if len(rows) != m or row_closure(table, self.generators) != rows:
            raise ValidationError(f"rows {list(self.generators)} do not generate the table rows")
        object.__setattr__(self, "generators", tuple(int(g) for g in self.generators))

    @classmethod
    def from_group(cls, g: GroupSpec, mode_permutation: Sequence[int] | None = None) -> "DecisionRule":
        table = group_unitary(g)
        perm = None
        if mode_permutation is not None:
            table = permute_modes(table, mode_permutation)
            perm = tuple(int(p) for p in mode_permutation)
        return cls(g, tuple(generator_rows(g)), table, perm)

    @property
    def n_modes(self) -> int:
        return self.group.order

    @property
    def order(self) -> int:
        return self.exponent_table.order

    def unitary(self) -> np.ndarray:
        return self.exponent_table.to_complex() / np.sqrt(self.n_modes)


def _row_exponents(rule: DecisionRule, d: Sequence[int]) -> np.ndarray:
    d = np.asarray(check_pattern(d, rule.n_modes), dtype=np.int64)
    return (rule.exponent_table.exponents @ d) % rule.order


@lru_cache(maxsize=None)
def _cyclotomic(n: int) -> tuple[int, ...]:
    from sympy import Symbol, cyclotomic_poly

    x = Symbol("x")
    coeffs = cyclotomic_poly(n, x, polys=True).all_coeffs()
    return tuple(int(c) for c in reversed(coeffs))


def _reduce_cyclotomic(coeffs: list[int], n: int) -> list[int]:
    """Remainder of ``sum coeffs[r] x**r`` modulo the ``n``-th cyclotomic polynomial."""
    phi = _cyclotomic(n)
    deg = len(phi) - 1
    coeffs = list(coeffs)
    for top in range(len(coeffs) - 1, deg - 1, -1):
        c = coeffs[top]
        if c:
            shift = top - deg
            for k, p in enumerate(phi):
                coeffs[shift + k] -= c * p
    return coeffs[:deg] + [0] * max(0, deg - len(coeffs))


def pi_value(rule: DecisionRule, d: Sequence[int]) -> int:
    """Exact value of ``pi(D)``.

    The sum of roots of unity is reduced in ``Z[omega]`` (modulo the
    cyclotomic polynomial of the table order), so no floating-point
    tolerance is involved.  Raises ``ArithmeticError`` if the value is not a
    rational integer, which cannot happen for a group table.
    """
    x = _row_exponents(rule, d)
    counts = np.bincount(x, minlength=rule.order).tolist()
    rem = _reduce_cyclotomic(counts, rule.order)
    if any(rem[1:]):
        raise ArithmeticError(f"pi(D) is not an integer for pattern {tuple(d)}")
    return int(rem[0])


def pi_values(rule: DecisionRule, X, chunk: int = 65536) -> np.ndarray:
    """Exact ``pi(D)`` for every row of ``X``; same arithmetic as ``pi_value``."""
    X = check_patterns(X, rule.n_modes)
    order = rule.order
    phi = _cyclotomic(order)
    deg = len(phi) - 1
    exps = rule.exponent_table.exponents
    out = np.empty(X.shape[0], dtype=np.int64)
    for start in range(0, X.shape[0], chunk):
        x = (X[start:start + chunk] @ exps.T) % order
        counts = np.zeros((x.shape[0], max(order, deg + 1)), dtype=np.int64)
        rows = np.repeat(np.arange(x.shape[0]), x.shape[1])
        np.add.at(counts, (rows, x.ravel()), 1)
        for top in range(counts.shape[1] - 1, deg - 1, -1):
            c = counts[:, top].copy()
            counts[:, top - deg:top + 1] -= c[:, None] * np.array(phi)[None, :]
        if np.any(counts[:, 1:deg]):
            raise ArithmeticError("pi(D) is not an integer for some pattern")
        out[start:start + chunk] = counts[:, 0]
    return out


def accept(rule: DecisionRule, d: Sequence[int]) -> int:
    """0 if every generator row satisfies ``sum_j d_j e_gj = 0 mod order``, else 1."""
    d = np.asarray(check_pattern(d, rule.n_modes), dtype=np.int64)
    exps = rule.exponent_table.exponents
    for g in rule.generators:
        if int(exps[g] @ d) % rule.order:
            return 1
    return 0


def accept_many(rule: DecisionRule, X) -> np.ndarray:
    """Vectorised ``accept`` over the rows of ``X``."""
    X = check_patterns(X, rule.n_modes)
    gens = rule.exponent_table.exponents[list(rule.generators)]
    return np.any((X @ gens.T) % rule.order, axis=1).astype(np.int64)


def hadamard_parity_test(d: Sequence[int]) -> int:
    """Post-processing for the unpermuted Hadamard interferometer.

    Only the photon-number parity of each mode is used: keep the modes with
    an odd count and require, for each row ``2**k``, an even number of
    ``-1`` entries among them.  ``s_ij = (-1) ** popcount(i & j)``.
    """
    m = len(d)
    if m < 1 or m & (m - 1):
        raise ValidationError(f"the Hadamard test needs a power-of-two size, got {m}")
    odd = [j for j, dj in enumerate(d) if dj % 2]
    for k in range(m.bit_length() - 1):
        minus_ones = sum(1 for j in odd if (j >> k) & 1)
        if minus_ones % 2:
            return 1
    return 0


def analytic_acceptance(m: int, c: float) -> float:
    return 1.0 / m + (m - 1) / m * c


def _check_matches(rule: DecisionRule, u, tol: float = 1e-10) -> np.ndarray:
    u = as_complex_matrix(u)
    expected = rule.unitary()
    if u.shape != expected.shape or np.max(np.abs(u - expected)) > tol:
        raise ValidationError("unitary does not match the decision rule's exponent table")
    return u


def acceptance_probability(
    rule: DecisionRule, u, o, dist: PatternDistribution | None = None
) -> float:
    """Probability that the rule outputs 0 for overlap ``o``."""
    o = as_overlap(o)
    u = _check_matches(rule, u)
    if dist is None:
        dist = distribution(u)
    mask = accept_many(rule, dist.patterns) == 0
    return float(np.sum(dist.mixed(o)[mask]))


@dataclass
class EquivalenceReport:
    """Pattern-by-pattern check of ``pi != 0 <=> pi = M <=> Pr_i != 0 <=> Pr_d = Pr_i / M``."""

    n_modes: int
    n_patterns: int
    counterexamples: list[dict]
    tol: float

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def equivalence_report(
    rule: DecisionRule, u, tol: float = 1e-10, dist: PatternDistribution | None = None
) -> EquivalenceReport:
    u = _check_matches(rule, u)
    m = rule.n_modes
    if m > 10:
        raise ValueError(f"equivalence_report supports M <= 10, got {m}")
    if dist is None:
        dist = distribution(u)
    bad = []
    for d, pi_i, pi_d in zip(dist.patterns, dist.prob_i, dist.prob_d):
        pi = pi_value(rule, d)
        nonzero_i = pi_i > tol
        tight = abs(pi_d - pi_i / m) <= tol
        statements = (pi != 0, pi == m, nonzero_i, tight)
        if len(set(statements)) != 1:
            bad.append(
                {
                    "pattern": list(d),
                    "pi": pi,
                    "prob_i": float(pi_i),
                    "prob_d": float(pi_d),
                    "slack": float(pi_d - pi_i / m),
                }
            )
    return EquivalenceReport(m, len(dist.patterns), bad, tol)
