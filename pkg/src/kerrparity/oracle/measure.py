"""Homodyne conditioning of hybrid states and extraction of error metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import eval_hermite, gammaln

from ..errors import ConventionError, NumericalError, UsageError
from ..numerics import DEFAULT_TOL, NORMALIZED, QuadratureConvention, coherent_overlap, integrate, quadrature_amplitude
from .states import (
    STANDARD_KEYS,
    FockBusState,
    Level,
    QubitBranchKey,
)

HERMITIAN_TOL = 1e-12
EIGEN_FLOOR = -1e-10


@dataclass(frozen=True, eq=False)
class TwoQubitDensity:
    """Density matrix over branch keys (basis 00, 01, 10, 11, plus mode-tagged keys if present)."""

    matrix: np.ndarray
    keys: tuple[QubitBranchKey, ...] = STANDARD_KEYS
    convention: QuadratureConvention | None = None

    def __post_init__(self):
        n = len(self.keys)
        if self.matrix.shape != (n, n):
            raise UsageError(f"matrix shape {self.matrix.shape} does not match {n} keys")

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def index(self, key: QubitBranchKey) -> int:
        return self.keys.index(key)

    def element(self, row: QubitBranchKey, col: QubitBranchKey) -> complex:
        return complex(self.matrix[self.index(row), self.index(col)])

    def population(self, key: QubitBranchKey) -> float:
        return float(np.real(self.element(key, key)))

    def normalized(self) -> "TwoQubitDensity":
        tr = self.trace
        if not tr > 0:
            raise NumericalError("density matrix has zero trace; the outcome is impossible")
        return TwoQubitDensity(self.matrix / tr, self.keys, self.convention)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def min_eigenvalue(self) -> float:
        h = 0.5 * (self.matrix + self.matrix.conj().T)
        return float(np.min(np.linalg.eigvalsh(h)))

    def validate(self, normalized: bool = True) -> None:
        scale = max(self.trace, 1e-300)
        if self.hermiticity_error() > HERMITIAN_TOL * max(scale, 1.0):
            raise NumericalError(f"density not Hermitian (error {self.hermiticity_error():.3g})")
        if self.min_eigenvalue() < EIGEN_FLOOR * max(scale, 1.0):
            raise NumericalError(f"density not positive semidefinite (eigenvalue {self.min_eigenvalue():.3g})")
        if normalized and abs(self.trace - 1.0) > 1e-10:
            raise NumericalError(f"density trace {self.trace!r} is not 1")

    def embed(self, keys: Sequence[QubitBranchKey]) -> "TwoQubitDensity":
        """Same operator written in a larger key basis (missing rows/columns are zero)."""
        keys = tuple(keys)
        out = np.zeros((len(keys), len(keys)), dtype=complex)
        idx = [keys.index(k) for k in self.keys]
        out[np.ix_(idx, idx)] = self.matrix
        return TwoQubitDensity(out, keys, self.convention)

    def trace_mode_tags(self) -> "TwoQubitDensity":
        """Discard which-mode information: orthogonal-mode photons become an environment flag.

        A photon in the orthogonal mode marks a distinct environment state, so
        coherences between tagged and untagged sectors are dropped and the
        logical populations are summed.
        """
        out = np.zeros((4, 4), dtype=complex)

        def split(k):
            logical = STANDARD_KEYS.index(QubitBranchKey(*(Level.ZERO if x is Level.ZERO else Level.ONE_MATCHED for x in k)))
            env = tuple(x is Level.ONE_ORTHOGONAL for x in k)
            return logical, env

        parts = [split(k) for k in self.keys]
        for i, (li, ei) in enumerate(parts):
            for j, (lj, ej) in enumerate(parts):
                if ei == ej:
                    out[li, lj] += self.matrix[i, j]
        return TwoQubitDensity(out, STANDARD_KEYS, self.convention)


def pure_density(amplitudes: dict, keys=STANDARD_KEYS) -> TwoQubitDensity:
    v = np.array([complex(amplitudes.get(k, 0.0)) for k in keys])
    return TwoQubitDensity(np.outer(v, v.conj()), tuple(keys))


def ideal_parity_density(coefficients: Sequence[complex]) -> TwoQubitDensity:
    """Normalised ``c00|00> + c11|11>``: the output of a perfect even-parity projection."""
    c00, _, _, c11 = (complex(x) for x in coefficients)
    norm = math.sqrt(abs(c00) ** 2 + abs(c11) ** 2)
    if norm == 0:
        raise UsageError("input has no even-parity component")
    return pure_density({STANDARD_KEYS[0]: c00 / norm, STANDARD_KEYS[3]: c11 / norm})


# ---------------------------------------------------------------------------
# quadrature projection


def fock_quadrature_row(p: float, n_cutoff: int) -> np.ndarray:
    """``<p|n>`` for ``n <= n_cutoff`` in the normalised convention, i.e. ``(-i)^n psi_n(p)``.

    Evaluated from the explicit Hermite polynomials with a log-domain norm,
    independently of the recurrence used by the analytic series.
    """
    n = np.arange(n_cutoff + 1)
    log_norm = -0.5 * p * p - 0.5 * (n * math.log(2.0) + gammaln(n + 1)) - 0.25 * math.log(math.pi)
    psi = eval_hermite(n, p) * np.exp(log_norm)
    return psi * (-1j) ** n


def _branch_amplitudes(state, p: float, conv: QuadratureConvention) -> np.ndarray:
    if isinstance(state, FockBusState):
        if conv is not NORMALIZED:
            raise ConventionError("the Fock backend only supports the normalized quadrature convention")
        row = fock_quadrature_row(p, state.n_cutoff)
        return np.array([b.coefficient * complex(row @ b.amplitudes) for b in state.branches])
    return np.array([b.coefficient * quadrature_amplitude(p, b.bus, conv) for b in state.branches])


def _env_gram(state) -> np.ndarray:
    n = len(state.branches)
    e = np.ones((n, n), dtype=complex)
    for i, bi in enumerate(state.branches):
        for j, bj in enumerate(state.branches):
            for li, lj in zip(bi.loss_modes, bj.loss_modes):
                # tr_L |L_i><L_j| = <L_j|L_i>
                e[i, j] *= coherent_overlap(lj, li)
    return e


def conditional_matrix(state, p: float, conv: QuadratureConvention | str, env: np.ndarray | None = None) -> np.ndarray:
    conv = QuadratureConvention.parse(conv)
    keys = state.keys()
    index = [keys.index(b.key) for b in state.branches]
    v = _branch_amplitudes(state, p, conv)
    if env is None:
        env = _env_gram(state)
    contrib = np.outer(v, v.conj()) * env
    rho = np.zeros((len(keys), len(keys)), dtype=complex)
    np.add.at(rho, (np.array(index)[:, None], np.array(index)[None, :]), contrib)
    return rho


@dataclass(frozen=True, eq=False)
class HomodyneOutcome:
    """Unnormalised conditional qubit state and the probability (density) of the outcome."""

    unnormalized: TwoQubitDensity
    probability: float

    @property
    def density(self) -> TwoQubitDensity:
        return self.unnormalized.normalized()


def homodyne_point(state, p: float, conv: QuadratureConvention | str = NORMALIZED) -> HomodyneOutcome:
    """Project the bus onto ``<p|`` and trace the loss modes exactly through coherent overlaps."""
    conv = QuadratureConvention.parse(conv)
    rho = conditional_matrix(state, p, conv)
    out = TwoQubitDensity(rho, state.keys(), conv)
    return HomodyneOutcome(out, out.trace)


def homodyne_window(
    state, x0: float, conv: QuadratureConvention | str = NORMALIZED, tol: float = DEFAULT_TOL
) -> HomodyneOutcome:
    """Integrate the conditional matrix over outcomes ``|p| <= x0``.

    ``probability`` is the success probability of the post-selection (only a
    true probability in the normalised convention).
    """
    conv = QuadratureConvention.parse(conv)
    if not x0 > 0:
        raise UsageError(f"window half-width must be > 0, got {x0!r}")
    env = _env_gram(state)
    rho = integrate(lambda p: conditional_matrix(state, p, conv, env), -x0, x0, tol)
    out = TwoQubitDensity(rho, state.keys(), conv)
    return HomodyneOutcome(out, out.trace)


# ---------------------------------------------------------------------------
# metrics

K00 = STANDARD_KEYS[0]
K11 = STANDARD_KEYS[3]


@dataclass(frozen=True)
class ErrorReport:
    parity_error: float
    dephasing_p: float
    bias_mu: float
    success_prob: float
    fidelity_ideal: float
    flags: tuple[str, ...] = ()


def coherence_ratio(rho: TwoQubitDensity) -> complex:
    """``<00|rho|11> / sqrt(rho_00 rho_11)``; modulus 1 for a pure even-parity state."""
    p00 = rho.population(K00)
    p11 = rho.population(K11)
    if p00 <= 0 or p11 <= 0:
        raise NumericalError("coherence undefined: an even-parity population vanishes")
    return rho.element(K00, K11) / math.sqrt(p00 * p11)


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity ``(tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2``."""

    def psd_sqrt(m):
        w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
        return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T

    s = psd_sqrt(sigma)
    inner = s @ rho @ s
    w = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))) ** 2)


def extract_report(rho: TwoQubitDensity, ideal: TwoQubitDensity, success_prob: float | None = None) -> ErrorReport:
    """Parity error, dephasing, bias and fidelity of a conditional state.

    ``parity_error`` is the population outside ``{|00>, |11>}`` in the matched
    mode, i.e. odd-parity and orthogonal-mode sectors.  ``success_prob``
    defaults to the trace of ``rho`` before normalisation.
    """
    flags = []
    if success_prob is None:
        success_prob = rho.trace
    rho = rho.normalized()
    if ideal.keys != rho.keys:
        ideal = ideal.embed(rho.keys)
    ideal = ideal.normalized()

    p00 = rho.population(K00)
    p11 = rho.population(K11)
    parity_error = max(0.0, 1.0 - p00 - p11)

    if p00 > 0 and p11 > 0:
        ratio = abs(rho.element(K00, K11)) / math.sqrt(p00 * p11)
        dephasing_p = 0.5 * (1.0 - ratio)
    else:
        dephasing_p = math.nan
        flags.append("dephasing_undefined")

    i00 = ideal.population(K00)
    i11 = ideal.population(K11)
    if p00 > 0 and i11 > 0 and i00 > 0:
        bias_mu = math.sqrt(p11 / p00) * math.sqrt(i00 / i11)
    else:
        bias_mu = math.nan
        flags.append("bias_undefined")

    return ErrorReport(
        parity_error=parity_error,
        dephasing_p=dephasing_p,
        bias_mu=bias_mu,
        success_prob=float(success_prob),
        fidelity_ideal=fidelity(rho.matrix, ideal.matrix),
        flags=tuple(flags),
    )
