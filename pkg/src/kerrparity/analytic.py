"""Closed-form error models for the bus-mediated parity gate.

Each imperfection is reduced to a number that can be compared against a
fault-tolerance threshold: a parity-error probability, a dephasing
probability, or a projection bias.  Where the quadrature normalisation
matters the functions take a :class:`QuadratureConvention`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, UsageError
from .numerics import (
    DEFAULT_TOL,
    NORMALIZED,
    PAPER,
    QuadratureConvention,
    erf,
    erfc,
    hermite_functions,
    integrate,
)

# ---------------------------------------------------------------------------
# parameter records


@dataclass(frozen=True)
class GateParams:
    """Operating point of the gate: probe amplitude, coupling angles and window."""

    alpha: float
    theta_a: float
    theta_b: float
    window_halfwidth_x0: float = 0.0

    def __post_init__(self):
        if not self.alpha >= 0:
            raise UsageError(f"alpha must be >= 0, got {self.alpha!r}")
        for name in ("theta_a", "theta_b"):
            if not abs(getattr(self, name)) <= math.pi:
                raise UsageError(f"|{name}| must be <= pi, got {getattr(self, name)!r}")
        if not self.window_halfwidth_x0 >= 0:
            raise UsageError(f"window half-width must be >= 0, got {self.window_halfwidth_x0!r}")

    @property
    def delta(self) -> float:
        return self.theta_a - self.theta_b


@dataclass(frozen=True)
class LossParams:
    eta_prime: float

    def __post_init__(self):
        if not 0.0 <= self.eta_prime <= 1.0:
            raise UsageError(f"eta_prime must lie in [0, 1], got {self.eta_prime!r}")

    @property
    def eta(self) -> float:
        return math.sqrt(1.0 - self.eta_prime**2)


@dataclass(frozen=True)
class MismatchParams:
    delta0: float

    def __post_init__(self):
        if not self.delta0 >= 0:
            raise UsageError(f"delta0 must be >= 0, got {self.delta0!r}")


@dataclass(frozen=True)
class ModeOverlapParams:
    """Mode overlaps of the two photonic qubits with the bus mode."""

    lambda1_a: float
    lambda1_b: float

    def __post_init__(self):
        for name in ("lambda1_a", "lambda1_b"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise UsageError(f"{name} must lie in [0, 1], got {getattr(self, name)!r}")

    @property
    def lambda0_a(self) -> float:
        return math.sqrt(1.0 - self.lambda1_a**2)

    @property
    def lambda0_b(self) -> float:
        return math.sqrt(1.0 - self.lambda1_b**2)


def default_cutoff(alpha: float) -> int:
    """Fock cutoff keeping the Poisson tail of ``|alpha>`` below ~1e-15."""
    return int(math.ceil(alpha * alpha + 10.0 * alpha + 30.0))


@dataclass(frozen=True)
class SelfKerrParams:
    """Self-Kerr strength and Fock truncation.

    ``lambda_sk`` is the phase per photon squared acquired in one pass;
    ``passes`` counts how many times it is applied before the measurement, so
    Fock component ``n`` picks up ``exp(i * passes * lambda_sk * n^2)``.
    ``n_cutoff=None`` selects :func:`default_cutoff` for the probe amplitude.
    """

    lambda_sk: float
    n_cutoff: int | None = None
    passes: int = 1

    def __post_init__(self):
        if not math.isfinite(self.lambda_sk):
            raise UsageError(f"lambda_sk must be finite, got {self.lambda_sk!r}")
        if self.n_cutoff is not None and self.n_cutoff < 0:
            raise UsageError(f"n_cutoff must be >= 0, got {self.n_cutoff!r}")
        if self.passes < 0:
            raise UsageError(f"passes must be >= 0, got {self.passes!r}")

    def cutoff_for(self, alpha: float) -> int:
        return default_cutoff(alpha) if self.n_cutoff is None else int(self.n_cutoff)

    @property
    def total_phase(self) -> float:
        return self.passes * self.lambda_sk


@dataclass(frozen=True)
class DephasingChannel:
    """``rho -> (1 - p) rho + p Z rho Z``."""

    p_flip: float

    def __post_init__(self):
        if not 0.0 <= self.p_flip <= 0.5:
            raise UsageError(f"p_flip must lie in [0, 1/2], got {self.p_flip!r}")

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Apply the channel with ``Z`` on the first of two qubits (basis 00,01,10,11)."""
        z = np.diag([1.0, 1.0, -1.0, -1.0])
        return (1.0 - self.p_flip) * rho + self.p_flip * z @ rho @ z


@dataclass(frozen=True)
class BiasedProjection:
    """Weight ``mu`` of ``|11>`` relative to ``|00>`` after projection."""

    mu: float

    def __post_init__(self):
        if not self.mu >= 0:
            raise UsageError(f"mu must be >= 0, got {self.mu!r}")


# ---------------------------------------------------------------------------
# post-selection


def separation_d(alpha: float, theta: float) -> float:
    """Phase-space distance ``2 alpha sin(theta)`` between probe components."""
    return 2.0 * alpha * math.sin(theta)


def postselect_error_point(d: float, conv: QuadratureConvention | str = PAPER) -> float:
    """Parity-error probability when conditioning exactly on ``p = 0``.

    ``PAPER_VERBATIM`` gives ``e^{-d^2}/(1+e^{-d^2})``; ``NORMALIZED`` halves the
    exponent, ``e^{-d^2/2}/(1+e^{-d^2/2})``.
    """
    conv = QuadratureConvention.parse(conv)
    if not d >= 0:
        raise UsageError(f"d must be >= 0, got {d!r}")
    k = d * d if conv is PAPER else 0.5 * d * d
    w = math.exp(-k)
    return w / (1.0 + w)


def _erf_pair_sum(x0: float, d: float) -> float:
    # erf(x0 + d) + erf(x0 - d), written to avoid cancellation when d >> x0
    if d > x0:
        return erfc(d - x0) - erfc(d + x0)
    return erf(x0 + d) + erf(x0 - d)


def postselect_error_window(x0: float, d: float, conv: QuadratureConvention | str = PAPER) -> float:
    """Parity-error probability for outcomes accepted in ``|p| <= x0``.

    With ``PAPER_VERBATIM`` this is the printed erf expression.  The
    ``NORMALIZED`` convention gives exactly the same expression with the
    separation rescaled to ``d / sqrt(2)``.
    """
    conv = QuadratureConvention.parse(conv)
    if x0 == 0:
        raise UsageError("zero-width window has no error rate; use postselect_error_point instead")
    if not x0 > 0:
        raise UsageError(f"x0 must be > 0, got {x0!r}")
    if not d >= 0:
        raise UsageError(f"d must be >= 0, got {d!r}")
    if conv is NORMALIZED:
        d = d / math.sqrt(2.0)
    odd = _erf_pair_sum(x0, d)
    return odd / (2.0 * erf(x0) + odd)


# ---------------------------------------------------------------------------
# bus loss


def loss_gamma(alpha: float, theta: float, eta_prime: float) -> float:
    """Coherence factor ``|<eta' alpha|eta' alpha e^{i theta}>|`` left after bus loss."""
    LossParams(eta_prime)
    # cos(theta) - 1 = -2 sin^2(theta/2), without cancellation at small theta
    s = math.sin(0.5 * theta)
    return math.exp(-2.0 * alpha * alpha * eta_prime * eta_prime * s * s)


def loss_gamma_small_theta(alpha: float, theta: float, eta_prime: float) -> float:
    """Second-order form ``exp(-alpha^2 theta^2 eta'^2 / 2)``."""
    LossParams(eta_prime)
    x = alpha * theta * eta_prime
    return math.exp(-0.5 * x * x)


def loss_dephasing(gamma_mod: float) -> DephasingChannel:
    if not 0.0 <= gamma_mod <= 1.0:
        raise UsageError(f"|gamma| must lie in [0, 1], got {gamma_mod!r}")
    return DephasingChannel(0.5 * (1.0 - gamma_mod))


@dataclass(frozen=True)
class LossThreshold:
    eta_prime: float
    loss_fraction: float
    saturated: bool
    product_limit: float  # largest admissible alpha * theta * eta'


def loss_product_threshold(p_target: float) -> float:
    """Largest ``alpha*theta*eta'`` with small-angle dephasing ``<= p_target``."""
    if not 0.0 < p_target < 0.5:
        raise UsageError(f"p_target must lie in (0, 1/2), got {p_target!r}")
    return math.sqrt(-2.0 * math.log(1.0 - 2.0 * p_target))


def loss_threshold(alpha: float, theta: float, p_target: float) -> LossThreshold:
    """Maximal loss amplitude ``eta'`` keeping the dephasing below ``p_target``."""
    x_max = loss_product_threshold(p_target)
    scale = alpha * abs(theta)
    if scale == 0 or x_max / scale >= 1.0:
        return LossThreshold(1.0, 1.0, True, x_max)
    eta_prime = x_max / scale
    return LossThreshold(eta_prime, eta_prime * eta_prime, False, x_max)


# ---------------------------------------------------------------------------
# unknown coupling mismatch


def mismatch_lambda(alpha: float, delta: float, conv: QuadratureConvention | str = PAPER) -> complex:
    """Relative amplitude ``gamma_Delta / gamma_0`` of the ``|11>`` branch at ``p = 0``."""
    conv = QuadratureConvention.parse(conv)
    k = 1.0 if conv is PAPER else 0.5
    return cmath.exp(k * alpha * alpha * (cmath.exp(2j * delta) - 1.0))


@dataclass(frozen=True)
class MismatchResult:
    """Dephasing and bias produced by a uniformly distributed mismatch.

    ``p`` and ``mu`` satisfy ``1 - 2p = mean_lambda / mu`` exactly.
    ``mu_printed`` is ``(1/(2 delta0)) sqrt(int |lambda|^2)``, kept for comparison.
    """

    p: float
    mu: float
    mu_printed: float
    mean_lambda: float
    mean_abs2: float
    convention: QuadratureConvention

    @property
    def channel(self) -> DephasingChannel:
        return DephasingChannel(self.p)

    @property
    def bias(self) -> BiasedProjection:
        return BiasedProjection(self.mu)

    def p_with_mu(self, mu: float) -> float:
        """Dephasing probability implied by the identity for an alternative ``mu``."""
        return 0.5 * (1.0 - self.mean_lambda / mu)


def mismatch_dephasing(
    alpha: float,
    delta0: float,
    conv: QuadratureConvention | str = PAPER,
    tol: float = DEFAULT_TOL,
) -> MismatchResult:
    """Average the conditional state over ``Delta`` uniform in ``[-delta0, delta0]``."""
    conv = QuadratureConvention.parse(conv)
    MismatchParams(delta0)
    if delta0 == 0:
        return MismatchResult(0.0, 1.0, math.inf, 1.0, 1.0, conv)
    width = 2.0 * delta0
    # lambda_{-D} = conj(lambda_D): the integral of lambda is real
    int_re = integrate(lambda t: mismatch_lambda(alpha, t, conv).real, -delta0, delta0, tol)
    int_abs2 = integrate(lambda t: abs(mismatch_lambda(alpha, t, conv)) ** 2, -delta0, delta0, tol)
    mean_lambda = float(int_re) / width
    mean_abs2 = float(int_abs2) / width
    mu = math.sqrt(mean_abs2)
    p = 0.5 * (1.0 - mean_lambda / mu)
    mu_printed = math.sqrt(int_abs2) / width
    return MismatchResult(p, mu, mu_printed, mean_lambda, mean_abs2, conv)


# ---------------------------------------------------------------------------
# mode mismatch


def mode_mismatch_error(params: ModeOverlapParams) -> float:
    """Weight of the undesired terms of the regrouped mode-mismatch projector."""
    l1 = params.lambda1_a * params.lambda1_b
    ideal = 2.0 * l1 * l1
    rest = (1.0 - l1) ** 2 + params.lambda0_a**2 + params.lambda0_b**2 + (params.lambda0_a * params.lambda0_b) ** 2
    return 1.0 - ideal / (ideal + rest)


def gaussian_mode_overlap(delta_t: float, sigma: float) -> float:
    """Overlap of two unit-norm Gaussian amplitude profiles offset by ``delta_t``.

    The profiles are ``pi^(-1/4) sigma^(-1/2) exp(-t^2 / (2 sigma^2))``, so the
    overlap is ``exp(-delta_t^2 / (4 sigma^2))``.
    """
    if not sigma > 0:
        raise UsageError(f"sigma must be > 0, got {sigma!r}")
    return math.exp(-(delta_t * delta_t) / (4.0 * sigma * sigma))


def gaussian_offset_for_overlap(overlap: float, sigma: float) -> float:
    """Offset ``delta_t >= 0`` at which :func:`gaussian_mode_overlap` equals ``overlap``."""
    if not sigma > 0:
        raise UsageError(f"sigma must be > 0, got {sigma!r}")
    if not 0.0 < overlap <= 1.0:
        raise UsageError(f"overlap must lie in (0, 1], got {overlap!r}")
    return 2.0 * sigma * math.sqrt(-math.log(overlap))


# ---------------------------------------------------------------------------
# self-Kerr

TAIL_TOL = 1e-14


def coherent_fock_amplitudes(beta: complex, n_cutoff: int) -> np.ndarray:
    """Fock amplitudes ``exp(-|b|^2/2) b^n / sqrt(n!)`` for ``n <= n_cutoff``.

    Moduli are built recursively in the log domain; no factorial is formed.
    """
    beta = complex(beta)
    n = np.arange(n_cutoff + 1)
    r = abs(beta)
    if r == 0.0:
        out = np.zeros(n_cutoff + 1, dtype=complex)
        out[0] = 1.0
        return out
    log_mod = np.empty(n_cutoff + 1)
    log_mod[0] = -0.5 * r * r
    if n_cutoff:
        log_mod[1:] = math.log(r) - 0.5 * np.log(n[1:])
        log_mod = np.cumsum(log_mod)
    phase = cmath.phase(beta)
    return np.exp(log_mod) * np.exp(1j * phase * n)


def self_kerr_gamma(p: float, alpha: float, theta: float, sk: SelfKerrParams) -> complex:
    """``<p| U_sk |alpha e^{i theta}>`` as a Fock series in Hermite functions.

    Equals the normalised quadrature amplitude when the self-Kerr phase is zero.
    Raises :class:`NumericalError` if the last few terms are not negligible.
    """
    n_cutoff = sk.cutoff_for(alpha)
    coeff = coherent_fock_amplitudes(alpha * cmath.exp(1j * theta), n_cutoff)
    n = np.arange(n_cutoff + 1)
    phases = np.exp(1j * (sk.total_phase * n * n - 0.5 * math.pi * n))
    terms = coeff * phases * hermite_functions(p, n_cutoff)
    value = complex(np.sum(terms))
    scale = float(np.sum(np.abs(terms)))
    tail = float(np.max(np.abs(terms[-3:])))
    if scale > 0 and tail > TAIL_TOL * scale:
        raise NumericalError(
            f"Fock cutoff {n_cutoff} too small for alpha={alpha}: tail/sum = {tail / scale:.3g}",
            estimate=value,
            error_estimate=tail,
        )
    return value


def self_kerr_error(alpha: float, theta: float, sk: SelfKerrParams, p: float = 0.0) -> float:
    """Relative weight of the odd-parity amplitudes with the self-Kerr phase included."""
    g0 = abs(self_kerr_gamma(p, alpha, 0.0, sk)) ** 2
    gp = abs(self_kerr_gamma(p, alpha, theta, sk)) ** 2
    gm = abs(self_kerr_gamma(p, alpha, -theta, sk)) ** 2
    denom = 2.0 * g0 + gp + gm
    if denom == 0.0:
        raise NumericalError(f"all amplitudes vanish at p={p}; error probability undefined")
    return (gp + gm) / denom

