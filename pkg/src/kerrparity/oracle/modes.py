"""Effective measurement operator of the gate under mode mismatch."""

from __future__ import annotations

from dataclasses import dataclass

from ..numerics import NORMALIZED, QuadratureConvention, quadrature_amplitude
from .measure import homodyne_point
from .states import ALL_KEYS, STANDARD_KEYS, Level, QubitBranchKey, parity_gate, prepare_input

Z, O, X = Level.ZERO, Level.ONE_MATCHED, Level.ONE_ORTHOGONAL


def projector_weights(
    lambda1_a: float,
    lambda1_b: float,
    alpha: float = 10.0,
    theta: float = 0.6,
    conv: QuadratureConvention | str = NORMALIZED,
) -> dict[QubitBranchKey, complex]:
    """Diagonal entries of the measurement operator at ``p = 0``, per output branch key.

    Each logical basis state is pushed through the simulated gate on its own;
    the amplitude reaching every (possibly mode-tagged) output key, divided by
    the amplitude of the undisplaced probe, is that key's weight.
    """
    conv = QuadratureConvention.parse(conv)
    ref = quadrature_amplitude(0.0, alpha, conv)
    weights = {k: 0j for k in ALL_KEYS}
    for i, key in enumerate(STANDARD_KEYS):
        c = [0.0] * 4
        c[i] = 1.0
        state = parity_gate(prepare_input(c, alpha), theta, theta, lambda1_a, lambda1_b)
        for b in state.branches:
            weights[b.key] += b.coefficient * quadrature_amplitude(0.0, b.bus, conv) / ref
    return weights


@dataclass(frozen=True)
class RegroupedProjector:
    """Measurement operator split into the ideal parity projector and the rest."""

    ideal: complex  # weight shared by |00><00| and |11><11| in the matched mode
    residual_00: complex
    w_01_orth: complex
    w_10_orth: complex
    w_11_orth: complex

    @property
    def error_probability(self) -> float:
        ideal = 2.0 * abs(self.ideal) ** 2
        rest = abs(self.residual_00) ** 2 + abs(self.w_01_orth) ** 2 + abs(self.w_10_orth) ** 2 + abs(self.w_11_orth) ** 2
        return 1.0 - ideal / (ideal + rest)


def regroup(weights: dict[QubitBranchKey, complex]) -> RegroupedProjector:
    ideal = weights[QubitBranchKey(O, O)]
    return RegroupedProjector(
        ideal=ideal,
        residual_00=weights[QubitBranchKey(Z, Z)] - ideal,
        w_01_orth=weights[QubitBranchKey(Z, X)],
        w_10_orth=weights[QubitBranchKey(X, Z)],
        w_11_orth=weights[QubitBranchKey(X, X)],
    )


def mode_mismatch_state(lambda1_a, lambda1_b, alpha, theta, coefficients=(0.5, 0.5, 0.5, 0.5)):
    """Gate output with mode-tagged branches, before measurement."""
    return parity_gate(prepare_input(coefficients, alpha), theta, theta, lambda1_a, lambda1_b)


def mode_mismatch_outcome(lambda1_a, lambda1_b, alpha=10.0, theta=0.6, conv=NORMALIZED, coefficients=(0.5, 0.5, 0.5, 0.5)):
    return homodyne_point(mode_mismatch_state(lambda1_a, lambda1_b, alpha, theta, coefficients), 0.0, conv)
