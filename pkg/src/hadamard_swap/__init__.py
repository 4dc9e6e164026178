"""Exact simulation of swap tests of order M with linear-optical interferometers
and controlled-swap circuits."""

from .estimators import InterferometricSwapTest, SwapCircuitTest
from .interferometers import (
    BeamSplitterLayer,
    Decomposition,
    GroupSpec,
    decompose_hadamard,
    generator_rows,
    group_interferometer,
    group_unitary,
    hadamard_walsh,
    qft,
    reconstruct,
)
from .matrix import (
    RootOfUnityMatrix,
    is_unitary,
    permanent,
    permanent_naive,
    permanent_ryser,
    remove_row,
    repeat_columns,
)
from .photon_stats import (
    OverlapSpec,
    PatternDistribution,
    distribution,
    enumerate_patterns,
    prob_distinguishable,
    prob_indistinguishable,
    prob_mixture,
    sample,
    verify_bound,
)
from .postprocess import (
    DecisionRule,
    accept,
    acceptance_probability,
    analytic_acceptance,
    equivalence_report,
    pi_value,
)
from .swap_circuit import (
    CircuitLayout,
    QuditState,
    accept_probability,
    build_layout,
    copies_lower_bound,
    post_measurement_state,
    symmetric_bound,
)
from .validation import DimensionError, ValidationError

__version__ = "0.1.0"
