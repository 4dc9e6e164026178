"""scikit-learn style wrappers.

``InterferometricSwapTest`` precomputes the exact detection statistics of
a group interferometer in ``fit`` and then behaves like a classifier over
detection patterns: ``transform`` gives ``pi(D)``, ``predict`` the output
bit.  ``SwapCircuitTest`` is the qubit-circuit counterpart.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import photon_stats, postprocess, swap_circuit
from .interferometers import GroupSpec, is_power_of_two
from .validation import ValidationError, check_patterns

__all__ = ["InterferometricSwapTest", "SwapCircuitTest", "resolve_group"]


def resolve_group(group=None, size=None) -> GroupSpec:
    """``group`` wins; otherwise a power-of-two ``size`` gives the Hadamard
    group and any other size the cyclic group.
    """
    if group is not None:
        if isinstance(group, GroupSpec):
            g = group
        elif isinstance(group, str):
            g = GroupSpec.parse(group)
        else:
            g = GroupSpec(tuple(group))
        if size is not None and g.order != size:
            raise ValidationError(f"group {g} has order {g.order}, not {size}")
        return g
    if size is None:
        raise ValidationError("either group or size is required")
    size = int(size)
    if size < 1:
        raise ValidationError(f"size must be positive, got {size}")
    if is_power_of_two(size):
        return GroupSpec.hadamard(size.bit_length() - 1)
    return GroupSpec.cyclic(size)


class InterferometricSwapTest(ClassifierMixin, TransformerMixin, BaseEstimator):
    """Swap test of order ``M`` realised by a group interferometer.

    Parameters
    ----------
    group : GroupSpec, str or sequence of int, optional
        Invariant factors of the abelian group.
    size : int, optional
        Number of modes; used when ``group`` is omitted (Hadamard group for
        powers of two, cyclic otherwise).  If both are omitted the size is
        read from the patterns passed to ``fit``.
    mode_permutation : sequence of int, optional
        Relabelling of the output modes applied to the interferometer and
        to the decision rule alike.
    """

    def __init__(self, group=None, size=None, mode_permutation=None):
        self.group = group
        self.size = size
        self.mode_permutation = mode_permutation

    def fit(self, X=None, y=None):
        size = self.size
        if size is None and self.group is None and X is not None:
            size = check_patterns(X).shape[1]
        self.group_ = resolve_group(self.group, size)
        m = self.group_.order
        if m > 10:
            raise ValidationError(f"exact statistics are limited to M <= 10, got {m}")
        self.rule_ = postprocess.DecisionRule.from_group(self.group_, self.mode_permutation)
        self.unitary_ = self.rule_.unitary()
        self.distribution_ = photon_stats.distribution(self.unitary_)
        self.patterns_ = np.array(self.distribution_.patterns, dtype=np.int64)
        self.accepted_ = postprocess.accept_many(self.rule_, self.patterns_) == 0
        self.n_features_in_ = m
        self.classes_ = np.array([0, 1])
        return self

    def transform(self, X):
        """``pi(D)`` of each pattern (row) of ``X``."""
        check_is_fitted(self)
        X = check_patterns(X, self.n_features_in_)
        return postprocess.pi_values(self.rule_, X)

    def predict(self, X):
        """Output bit per pattern: 0 = identical to the program state, 1 = different."""
        check_is_fitted(self)
        X = check_patterns(X, self.n_features_in_)
        return postprocess.accept_many(self.rule_, X)

    def pattern_probabilities(self, overlap) -> np.ndarray:
        """Probability of each pattern in ``patterns_`` for squared overlap ``overlap``."""
        check_is_fitted(self)
        return self.distribution_.mixed(overlap)

    def acceptance_probability(self, overlap) -> float:
        check_is_fitted(self)
        return float(np.sum(self.pattern_probabilities(overlap)[self.accepted_]))

    def sample(self, overlap, shots: int, random_state=None) -> np.ndarray:
        """Seeded detection patterns, shape ``(shots, M)``."""
        check_is_fitted(self)
        draws = photon_stats.sample(
            self.unitary_, overlap, shots, seed=random_state, dist=self.distribution_
        )
        return np.array(draws, dtype=np.int64).reshape(len(draws), self.n_features_in_)


class SwapCircuitTest(BaseEstimator):
    """Controlled-swap circuit of order ``size`` acting on qudits of ``local_dim``."""

    def __init__(self, size=2, variant="full", local_dim=2):
        self.size = size
        self.variant = variant
        self.local_dim = local_dim

    def fit(self, X=None, y=None):
        self.layout_ = swap_circuit.build_layout(int(self.size), self.variant)
        return self

    def _states(self, phi, psi):
        phi = np.asarray(phi, dtype=np.complex128)
        psi = np.asarray(psi, dtype=np.complex128)
        if phi.size != self.local_dim or psi.size != self.local_dim:
            raise ValidationError(f"states must have dimension {self.local_dim}")
        return phi, psi

    def acceptance_probability(self, phi, psi) -> float:
        check_is_fitted(self)
        return swap_circuit.accept_probability(self.layout_, *self._states(phi, psi))

    def post_measurement_state(self, phi, psi):
        check_is_fitted(self)
        return swap_circuit.post_measurement_state(self.layout_, *self._states(phi, psi))
