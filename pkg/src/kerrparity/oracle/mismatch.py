"""Uniform average of conditional states over an unknown coupling mismatch."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import UsageError
from ..numerics import PAPER, QuadratureConvention, quadrature_amplitude
from .measure import K00, K11, TwoQubitDensity, conditional_matrix
from .states import EQUAL_COEFFICIENTS, STANDARD_KEYS, parity_gate, prepare_input

DEFAULT_GRID = 2001
_EVEN = [STANDARD_KEYS.index(K00), STANDARD_KEYS.index(K11)]


def simpson_weights(n: int, width: float) -> np.ndarray:
    """Composite Simpson weights on ``n`` (odd) equally spaced nodes spanning ``width``."""
    if n < 3 or n % 2 == 0:
        raise UsageError(f"Simpson's rule needs an odd number of nodes >= 3, got {n}")
    h = width / (n - 1)
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * h / 3.0


@dataclass(frozen=True, eq=False)
class MismatchMixture:
    """Average over ``Delta`` of the conditional state at ``p = 0``.

    ``scaled`` is the averaged (unnormalised) matrix divided by the weight of
    the unrotated ``|00>`` probe component, so its ``|00><00|`` entry is
    ``|c00|^2``.  ``even`` keeps only the ``{|00>, |11>}`` block of ``scaled``,
    i.e. the state with post-selection errors removed.
    """

    scaled: np.ndarray
    even: np.ndarray
    density: TwoQubitDensity
    convention: QuadratureConvention


def mixture_over_delta(
    alpha: float,
    delta0: float,
    n_grid: int = DEFAULT_GRID,
    conv: QuadratureConvention | str = PAPER,
    coefficients: Sequence[complex] = EQUAL_COEFFICIENTS,
    theta: float = 0.1,
) -> MismatchMixture:
    """Simulate the gate with ``theta_a - theta_b = Delta`` on a uniform grid and average.

    Each grid point runs the full branch evolution and homodyne projection;
    ``theta`` fixes ``theta_b`` (the even block does not depend on it).
    """
    conv = QuadratureConvention.parse(conv)
    if n_grid < 11 or n_grid % 2 == 0:
        raise UsageError(f"n_grid must be odd and >= 11, got {n_grid}")
    if not delta0 >= 0:
        raise UsageError(f"delta0 must be >= 0, got {delta0!r}")
    psi_in = prepare_input(coefficients, alpha)

    def cond(delta):
        return conditional_matrix(parity_gate(psi_in, theta + delta, theta), 0.0, conv)

    if delta0 == 0:
        avg = cond(0.0)
    else:
        grid = np.linspace(-delta0, delta0, n_grid)
        weights = simpson_weights(n_grid, 2.0 * delta0) / (2.0 * delta0)
        avg = sum(w * cond(d) for w, d in zip(weights, grid))

    scale = abs(quadrature_amplitude(0.0, alpha, conv)) ** 2
    scaled = avg / scale
    even = np.zeros_like(scaled)
    even[np.ix_(_EVEN, _EVEN)] = scaled[np.ix_(_EVEN, _EVEN)]
    density = TwoQubitDensity(avg, STANDARD_KEYS, conv).normalized()
    return MismatchMixture(scaled, even, density, conv)


def biased_dephased_state(p: float, mu: float, coefficients: Sequence[complex] = EQUAL_COEFFICIENTS) -> np.ndarray:
    """``(1-p)|psi_b><psi_b| + p Z|psi_b><psi_b|Z`` with ``psi_b = c00|00> + mu c11|11>``."""
    c00, _, _, c11 = (complex(x) for x in coefficients)
    psi = np.zeros(4, dtype=complex)
    psi[0] = c00
    psi[3] = mu * c11
    z = np.diag([1.0, 1.0, -1.0, -1.0])
    proj = np.outer(psi, psi.conj())
    return (1.0 - p) * proj + p * z @ proj @ z


def reconstruction_residual(mixture: MismatchMixture, p: float, mu: float, coefficients=EQUAL_COEFFICIENTS) -> float:
    """Frobenius distance between the simulated even block and the dephased biased state."""
    return float(np.linalg.norm(mixture.even - biased_dephased_state(p, mu, coefficients)))


def mixture_dephasing(mixture: MismatchMixture, coefficients=EQUAL_COEFFICIENTS) -> tuple[float, float]:
    """Read ``(p, mu)`` back off the simulated even block."""
    c00, _, _, c11 = (complex(x) for x in coefficients)
    e = mixture.even
    mu = math.sqrt(e[3, 3].real / abs(c11) ** 2)
    mean_lambda = (e[3, 0] / (c11 * c00.conjugate())).real
    return 0.5 * (1.0 - mean_lambda / mu), mu
