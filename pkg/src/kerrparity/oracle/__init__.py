"""Brute-force simulation of the qubit-bus evolution with every imperfection inserted explicitly."""

from .measure import (
    ErrorReport,
    HomodyneOutcome,
    TwoQubitDensity,
    coherence_ratio,
    conditional_matrix,
    extract_report,
    fidelity,
    homodyne_point,
    homodyne_window,
    ideal_parity_density,
)
from .mismatch import (
    MismatchMixture,
    biased_dephased_state,
    mixture_dephasing,
    mixture_over_delta,
    reconstruction_residual,
)
from .modes import RegroupedProjector, mode_mismatch_outcome, mode_mismatch_state, projector_weights, regroup
from .states import (
    ALL_KEYS,
    EQUAL_COEFFICIENTS,
    STANDARD_KEYS,
    CoherentBranch,
    CoherentBranchState,
    FockBranch,
    FockBusState,
    Level,
    QubitBranchKey,
    apply_cross_kerr,
    apply_loss,
    apply_self_kerr,
    parity_gate,
    prepare_input,
    to_fock,
)

__all__ = [name for name in dir() if not name.startswith("_")]
