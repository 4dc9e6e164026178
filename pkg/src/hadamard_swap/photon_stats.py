"""Detection statistics of an interferometer fed one photon in state phi and
``M - 1`` photons in state psi, one photon per input mode.

The photon in phi enters mode 0.  Only the overlap ``c = |<phi|psi>|^2``
matters: the output distribution is ``c * Pr_i + (1 - c) * Pr_d`` where
``Pr_i`` is the fully indistinguishable case and ``Pr_d`` the case where
the mode-0 photon is orthogonal to the others.  Row ``i`` of ``U`` holds the
amplitudes for input mode ``i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .matrix import permanent, remove_row, repeat_columns
from .validation import (
    ValidationError,
    check_overlap,
    check_pattern,
    check_random_state,
    check_state,
    check_unitary,
)

__all__ = [
    "OverlapSpec",
    "PatternDistribution",
    "BoundReport",
    "enumerate_patterns",
    "pattern_factorial",
    "prob_indistinguishable",
    "prob_distinguishable",
    "prob_mixture",
    "laplace_terms",
    "distribution",
    "verify_bound",
    "sample",
]

MAX_MODES = 12
UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class OverlapSpec:
    """Squared overlap ``c = |<phi|psi>|^2``, optionally with its source states."""

    c: float
    source_states: tuple[np.ndarray, np.ndarray] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "c", check_overlap(self.c))
        if self.source_states is not None:
            phi, psi = self.source_states
            phi = check_state(phi, tol=1e-9, name="phi")
            psi = check_state(psi, tol=1e-9, name="psi")
            if phi.shape != psi.shape:
                raise ValidationError(f"phi and psi have different dimensions: {phi.size} vs {psi.size}")
            c = abs(np.vdot(phi, psi)) ** 2
            if abs(c - self.c) > 1e-12:
                raise ValidationError(f"overlap {self.c} does not match the source states ({c})")
            object.__setattr__(self, "source_states", (phi, psi))

    @classmethod
    def from_states(cls, phi, psi) -> "OverlapSpec":
        phi = np.asarray(phi, dtype=np.complex128)
        psi = np.asarray(psi, dtype=np.complex128)
        c = min(1.0, float(abs(np.vdot(phi, psi)) ** 2))
        return cls(c, (phi, psi))


def as_overlap(o) -> OverlapSpec:
    return o if isinstance(o, OverlapSpec) else OverlapSpec(o)


def enumerate_patterns(m: int) -> list[tuple[int, ...]]:
    """All ways of placing ``m`` photons in ``m`` modes, lexicographically descending
    from ``(m, 0, ..., 0)``.
    """
    if m < 1 or m > MAX_MODES:
        raise ValueError(f"number of modes must be in [1, {MAX_MODES}], got {m}")
    return list(_compositions(m, m))


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def pattern_factorial(d: Sequence[int]) -> int:
    return math.prod(math.factorial(x) for x in d)


def prob_indistinguishable(u, d: Sequence[int]) -> float:
    """``|Per(U_D)|^2 / D!`` for ``M`` indistinguishable photons."""
    u = check_unitary(u, UNITARY_TOL)
    d = check_pattern(d, u.shape[0])
    return _prob_i(u, d)


def _prob_i(u: np.ndarray, d: tuple[int, ...]) -> float:
    return abs(permanent(repeat_columns(u, d))) ** 2 / pattern_factorial(d)


def prob_distinguishable(u, d: Sequence[int]) -> float:
    """Probability of ``d`` when the mode-0 photon is distinguishable.

    That photon lands in mode ``k`` with probability ``|u_0k|^2`` while the
    remaining ``M - 1`` photons produce ``d - 1_k``.
    """
    u = check_unitary(u, UNITARY_TOL)
    d = check_pattern(d, u.shape[0])
    return _prob_d(u, d)


def _sub_permanents(u: np.ndarray, d: tuple[int, ...], cache: dict | None = None) -> np.ndarray:
    """``Per(U_{0, D - 1_k})`` for each ``k`` (zero where ``d_k = 0``).

    ``cache`` maps reduced patterns to permanents; patterns of one unitary
    share most of them.
    """
    rest = remove_row(u, 0)
    out = np.zeros(len(d), dtype=np.complex128)
    counts = list(d)
    for k, dk in enumerate(d):
        if not dk:
            continue
        counts[k] -= 1
        key = tuple(counts)
        if cache is not None and key in cache:
            out[k] = cache[key]
        else:
            out[k] = permanent(repeat_columns(rest, key))
            if cache is not None:
                cache[key] = out[k]
        counts[k] += 1
    return out


def _prob_d(u: np.ndarray, d: tuple[int, ...], subperms: np.ndarray | None = None) -> float:
    if subperms is None:
        subperms = _sub_permanents(u, d)
    counts = np.array(d, dtype=float)
    return float(np.sum(counts * np.abs(u[0] * subperms) ** 2) / pattern_factorial(d))


def laplace_terms(u, d: Sequence[int]) -> np.ndarray:
    """The per-mode amplitudes ``p_k(D) = u_0k Per(U_{0,D-1_k}) / sqrt(D!)``.

    With them ``Pr_i = |sum_k d_k p_k|^2`` and ``Pr_d = sum_k d_k |p_k|^2``.
    """
    u = check_unitary(u, UNITARY_TOL)
    d = check_pattern(d, u.shape[0])
    return u[0] * _sub_permanents(u, d) / math.sqrt(pattern_factorial(d))


def prob_mixture(u, d: Sequence[int], o) -> float:
    o = as_overlap(o)
    u = check_unitary(u, UNITARY_TOL)
    d = check_pattern(d, u.shape[0])
    pd = _prob_d(u, d)
    return pd + o.c * (_prob_i(u, d) - pd)


@dataclass
class PatternDistribution:
    """Exact ``Pr_i`` and ``Pr_d`` over every detection pattern of ``M`` modes.

    Raw values are kept unclamped; ``probabilities`` clamps for reporting.
    """

    patterns: list[tuple[int, ...]]
    prob_i: np.ndarray
    prob_d: np.ndarray

    @property
    def n_modes(self) -> int:
        return len(self.patterns[0])

    def mixed(self, o) -> np.ndarray:
        c = as_overlap(o).c
        return self.prob_d + c * (self.prob_i - self.prob_d)

    def probabilities(self, o) -> np.ndarray:
        return np.clip(self.mixed(o), 0.0, None)

    def entries(self, o=None) -> dict[tuple[int, ...], tuple[float, float, float]]:
        mixed = self.mixed(o if o is not None else 0.0)
        return {
            d: (float(max(pi, 0.0)), float(max(pd, 0.0)), float(max(pm, 0.0)))
            for d, pi, pd, pm in zip(self.patterns, self.prob_i, self.prob_d, mixed)
        }

    def index(self, d: Sequence[int]) -> int:
        return _pattern_index(len(d))[tuple(d)]


@lru_cache(maxsize=None)
def _pattern_index(m: int) -> dict[tuple[int, ...], int]:
    return {d: i for i, d in enumerate(enumerate_patterns(m))}


def distribution(u) -> PatternDistribution:
    """Exact distributions of every pattern for the unitary ``u``."""
    u = check_unitary(u, UNITARY_TOL)
    patterns = enumerate_patterns(u.shape[0])
    prob_i = np.empty(len(patterns))
    prob_d = np.empty(len(patterns))
    cache: dict = {}
    for idx, d in enumerate(patterns):
        subperms = _sub_permanents(u, d, cache)
        # Laplace expansion along row 0 reuses the sub-permanents
        per = np.sum(np.array(d) * u[0] * subperms)
        prob_i[idx] = abs(per) ** 2 / pattern_factorial(d)
        prob_d[idx] = _prob_d(u, d, subperms)
    return PatternDistribution(patterns, prob_i, prob_d)


@dataclass
class BoundReport:
    """Outcome of checking ``Pr_d >= Pr_i / M`` and its mixed-state corollary."""

    n_modes: int
    min_slack: float
    violations: list[tuple[tuple[int, ...], float]]
    equality_patterns: list[tuple[int, ...]]
    mixture_min_slack: float
    mixture_violations: list[tuple[float, tuple[int, ...], float]]
    tol: float

    @property
    def ok(self) -> bool:
        return not self.violations and not self.mixture_violations


def verify_bound(
    u,
    tol: float = 1e-10,
    overlaps: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 1.0),
    dist: PatternDistribution | None = None,
) -> BoundReport:
    """Check ``Pr_d(D) >= Pr_i(D) / M`` on every pattern.

    Also checks ``Pr(D) >= (1/M + (M-1)/M * c) Pr_i(D)`` at each overlap in
    ``overlaps``.  Patterns with ``Pr_i`` above ``tol`` where the first bound
    is tight (within ``tol``) are listed in ``equality_patterns``.
    """
    u = check_unitary(u, UNITARY_TOL)
    m = u.shape[0]
    if m > 10:
        raise ValueError(f"verify_bound supports M <= 10, got {m}")
    if dist is None:
        dist = distribution(u)
    slack = dist.prob_d - dist.prob_i / m
    violations = [(d, float(s)) for d, s in zip(dist.patterns, slack) if s < -tol]
    equality = [
        d for d, s, pi in zip(dist.patterns, slack, dist.prob_i) if abs(s) <= tol and pi > tol
    ]
    mixture_min = math.inf
    mixture_violations = []
    for c in overlaps:
        c = check_overlap(c)
        mix_slack = dist.mixed(c) - (1.0 / m + (m - 1) / m * c) * dist.prob_i
        mixture_min = min(mixture_min, float(mix_slack.min()))
        for d, s in zip(dist.patterns, mix_slack):
            if s < -tol:
                mixture_violations.append((c, d, float(s)))
    return BoundReport(
        n_modes=m,
        min_slack=float(slack.min()),
        violations=violations,
        equality_patterns=equality,
        mixture_min_slack=mixture_min,
        mixture_violations=mixture_violations,
        tol=tol,
    )


def sample(u, o, shots: int, seed=None, dist: PatternDistribution | None = None) -> list[tuple[int, ...]]:
    """Draw ``shots`` detection patterns by inverse-CDF sampling of the exact
    distribution, patterns taken in ``enumerate_patterns`` order.
    """
    if shots < 0:
        raise ValueError(f"shots must be non-negative, got {shots}")
    o = as_overlap(o)
    if shots == 0:
        return []
    if dist is None:
        u = check_unitary(u, UNITARY_TOL)
        if u.shape[0] > 10:
            raise ValueError(f"sampling supports M <= 10, got {u.shape[0]}")
        dist = distribution(u)
    idx = _draw(dist, o, shots, seed)
    return [dist.patterns[i] for i in idx]


def _draw(dist: PatternDistribution, o: OverlapSpec, shots: int, seed) -> np.ndarray:
    rng = check_random_state(seed)
    cdf = np.cumsum(dist.probabilities(o))
    cdf /= cdf[-1]
    idx = np.searchsorted(cdf, rng.random(shots), side="right")
    return np.minimum(idx, len(cdf) - 1)
