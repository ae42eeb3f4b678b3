"""Hybrid qubit-bus states and the unitary/lossy operations acting on them.

Two backends share one branch layout.  :class:`CoherentBranchState` stores
each bus component as a coherent label, which is exact for cross-Kerr phases,
beamsplitter loss and coupling mismatch at any amplitude.
:class:`FockBusState` stores truncated number-basis amplitudes and is needed
once a self-Kerr phase shears the probe.  States are immutable; every
operation returns a new state.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np

from ..analytic import coherent_fock_amplitudes, default_cutoff
from ..errors import UsageError
from ..numerics import check_label, coherent_overlap


class Level(enum.IntEnum):
    ZERO = 0
    ONE_MATCHED = 1
    ONE_ORTHOGONAL = 2

    @property
    def symbol(self) -> str:
        return ("0", "1", "1'")[self]

    @property
    def logical(self) -> int:
        return 0 if self is Level.ZERO else 1


class QubitBranchKey(NamedTuple):
    qubit_a: Level
    qubit_b: Level

    @property
    def label(self) -> str:
        return self.qubit_a.symbol + self.qubit_b.symbol

    @property
    def logical(self) -> tuple[int, int]:
        return (self.qubit_a.logical, self.qubit_b.logical)

    @property
    def mode_matched(self) -> bool:
        return Level.ONE_ORTHOGONAL not in self

    def level(self, qubit: str) -> Level:
        return self.qubit_a if _qubit_index(qubit) == 0 else self.qubit_b

    def with_level(self, qubit: str, level: Level) -> "QubitBranchKey":
        if _qubit_index(qubit) == 0:
            return QubitBranchKey(level, self.qubit_b)
        return QubitBranchKey(self.qubit_a, level)


Z, O, X = Level.ZERO, Level.ONE_MATCHED, Level.ONE_ORTHOGONAL
STANDARD_KEYS = (
    QubitBranchKey(Z, Z),
    QubitBranchKey(Z, O),
    QubitBranchKey(O, Z),
    QubitBranchKey(O, O),
)
ALL_KEYS = tuple(QubitBranchKey(a, b) for a in Level for b in Level)


def _qubit_index(qubit: str) -> int:
    q = str(qubit).upper()
    if q not in ("A", "B"):
        raise UsageError(f"qubit must be 'A' or 'B', got {qubit!r}")
    return 0 if q == "A" else 1


def canonical_keys(keys) -> tuple[QubitBranchKey, ...]:
    """Matrix basis for a set of branch keys: the four standard keys, plus any tagged ones."""
    keys = set(keys)
    if all(k.mode_matched for k in keys):
        return STANDARD_KEYS
    return ALL_KEYS


# ---------------------------------------------------------------------------
# coherent backend


class CoherentBranch(NamedTuple):
    key: QubitBranchKey
    coefficient: complex
    bus: complex
    loss_modes: tuple[complex, ...] = ()


def _env_overlap(left: Sequence[complex], right: Sequence[complex]) -> complex:
    out = 1.0 + 0j
    for a, b in zip(left, right):
        out *= coherent_overlap(a, b)
    return out


@dataclass(frozen=True)
class CoherentBranchState:
    branches: tuple[CoherentBranch, ...]

    def __post_init__(self):
        lengths = {len(b.loss_modes) for b in self.branches}
        if len(lengths) > 1:
            raise UsageError("all branches must carry the same number of loss modes")
        for b in self.branches:
            check_label(b.bus)
            for m in b.loss_modes:
                check_label(m)

    @property
    def n_loss_modes(self) -> int:
        return len(self.branches[0].loss_modes) if self.branches else 0

    def keys(self) -> tuple[QubitBranchKey, ...]:
        return canonical_keys(b.key for b in self.branches)

    def branch(self, key: QubitBranchKey) -> CoherentBranch:
        hits = [b for b in self.branches if b.key == key]
        if len(hits) != 1:
            raise KeyError(f"expected exactly one branch with key {key.label}, found {len(hits)}")
        return hits[0]

    def gram_matrix(self) -> np.ndarray:
        """Overlaps between the branch vectors (qubit, bus and loss modes together)."""
        n = len(self.branches)
        g = np.zeros((n, n), dtype=complex)
        for i, bi in enumerate(self.branches):
            for j, bj in enumerate(self.branches):
                if bi.key != bj.key:
                    continue
                g[i, j] = coherent_overlap(bi.bus, bj.bus) * _env_overlap(bi.loss_modes, bj.loss_modes)
        return g

    def norm_squared(self) -> float:
        c = np.array([b.coefficient for b in self.branches])
        return float(np.real(np.conj(c) @ self.gram_matrix() @ c))


def prepare_input(coefficients: Sequence[complex], alpha: complex) -> CoherentBranchState:
    """``|alpha> (c00|00> + c01|01> + c10|10> + c11|11>)``."""
    c = [complex(x) for x in coefficients]
    if len(c) != 4:
        raise UsageError(f"expected four coefficients (c00, c01, c10, c11), got {len(c)}")
    total = sum(abs(x) ** 2 for x in c)
    if abs(total - 1.0) > 1e-12:
        raise UsageError(f"input coefficients are not normalised: sum |c|^2 = {total!r}")
    alpha = check_label(alpha)
    return CoherentBranchState(tuple(CoherentBranch(k, x, alpha) for k, x in zip(STANDARD_KEYS, c)))


EQUAL_COEFFICIENTS = (0.5, 0.5, 0.5, 0.5)


def _split_overlap(overlap: float) -> tuple[float, float]:
    if not 0.0 <= overlap <= 1.0:
        raise UsageError(f"mode overlap must lie in [0, 1], got {overlap!r}")
    return overlap, math.sqrt(1.0 - overlap * overlap)


def apply_cross_kerr(state, qubit: str, theta: float, overlap: float = 1.0):
    """Rotate the bus by ``theta`` on branches where ``qubit`` holds a mode-matched photon.

    With ``overlap < 1`` the photon of ``qubit`` is first decomposed into a
    matched part (weight ``overlap``), which interacts, and an orthogonal part
    (weight ``sqrt(1 - overlap^2)``), which does not.  Branches already tagged
    orthogonal are left alone.
    """
    lam1, lam0 = _split_overlap(overlap)
    rot = cmath.exp(1j * theta)
    if isinstance(state, FockBusState):
        n = np.arange(state.n_cutoff + 1)
        phase = np.exp(1j * theta * n)
        new = []
        for b in state.branches:
            if b.key.level(qubit) is not Level.ONE_MATCHED:
                new.append(b)
                continue
            if lam1 < 1.0:
                new.append(replace(b, key=b.key.with_level(qubit, Level.ONE_ORTHOGONAL), coefficient=b.coefficient * lam0))
            if lam1 > 0.0:
                new.append(replace(b, coefficient=b.coefficient * lam1, amplitudes=b.amplitudes * phase))
        return FockBusState(tuple(new), state.n_cutoff)

    new = []
    for b in state.branches:
        if b.key.level(qubit) is not Level.ONE_MATCHED:
            new.append(b)
            continue
        if lam1 < 1.0:
            new.append(b._replace(key=b.key.with_level(qubit, Level.ONE_ORTHOGONAL), coefficient=b.coefficient * lam0))
        if lam1 > 0.0:
            new.append(b._replace(coefficient=b.coefficient * lam1, bus=b.bus * rot))
    return CoherentBranchState(tuple(new))


def parity_gate(state, theta_a: float, theta_b: float | None = None, overlap_a: float = 1.0, overlap_b: float = 1.0):
    """``U_PB(-theta_b) U_PA(theta_a)``; ``theta_b`` defaults to ``theta_a``."""
    theta_b = theta_a if theta_b is None else theta_b
    state = apply_cross_kerr(state, "A", theta_a, overlap_a)
    return apply_cross_kerr(state, "B", -theta_b, overlap_b)


def apply_loss(state: CoherentBranchState, eta: float) -> CoherentBranchState:
    """Beamsplitter with amplitude transmissivity ``eta``; the reflected mode is kept as a loss mode."""
    if isinstance(state, FockBusState):
        raise UsageError("loss acts on coherent labels; apply it before converting to the Fock backend")
    if not 0.0 <= eta <= 1.0:
        raise UsageError(f"eta must lie in [0, 1], got {eta!r}")
    eta_prime = math.sqrt(1.0 - eta * eta)
    return CoherentBranchState(
        tuple(b._replace(bus=eta * b.bus, loss_modes=b.loss_modes + (eta_prime * b.bus,)) for b in state.branches)
    )


# ---------------------------------------------------------------------------
# Fock backend

FOCK_ALPHA_CEILING = 8.0


@dataclass(frozen=True, eq=False)
class FockBranch:
    key: QubitBranchKey
    coefficient: complex
    amplitudes: np.ndarray
    loss_modes: tuple[complex, ...] = field(default=())


@dataclass(frozen=True, eq=False)
class FockBusState:
    branches: tuple[FockBranch, ...]
    n_cutoff: int

    def __post_init__(self):
        for b in self.branches:
            if b.amplitudes.shape != (self.n_cutoff + 1,):
                raise UsageError("branch amplitude vectors must have length n_cutoff + 1")
            if not np.all(np.isfinite(b.amplitudes)):
                raise UsageError("branch amplitudes must be finite")

    def keys(self) -> tuple[QubitBranchKey, ...]:
        return canonical_keys(b.key for b in self.branches)

    def gram_matrix(self) -> np.ndarray:
        n = len(self.branches)
        g = np.zeros((n, n), dtype=complex)
        for i, bi in enumerate(self.branches):
            for j, bj in enumerate(self.branches):
                if bi.key != bj.key:
                    continue
                g[i, j] = np.vdot(bi.amplitudes, bj.amplitudes) * _env_overlap(bi.loss_modes, bj.loss_modes)
        return g

    def norm_squared(self) -> float:
        c = np.array([b.coefficient for b in self.branches])
        return float(np.real(np.conj(c) @ self.gram_matrix() @ c))


def to_fock(state: CoherentBranchState, n_cutoff: int | None = None, alpha_ceiling: float = FOCK_ALPHA_CEILING) -> FockBusState:
    """Expand every coherent bus label in the number basis up to ``n_cutoff``."""
    largest = max((abs(b.bus) for b in state.branches), default=0.0)
    if largest > alpha_ceiling:
        raise UsageError(
            f"bus amplitude {largest:.4g} exceeds the Fock backend ceiling {alpha_ceiling:g}; "
            "use the coherent backend"
        )
    if n_cutoff is None:
        n_cutoff = default_cutoff(largest)
    branches = tuple(
        FockBranch(b.key, b.coefficient, coherent_fock_amplitudes(b.bus, n_cutoff), b.loss_modes) for b in state.branches
    )
    return FockBusState(branches, n_cutoff)


def apply_self_kerr(state: FockBusState, lambda_sk: float, passes: int = 2) -> FockBusState:
    """Multiply Fock amplitude ``n`` by ``exp(i * passes * lambda_sk * n^2)``."""
    if not isinstance(state, FockBusState):
        raise UsageError("self-Kerr evolution needs the Fock backend; convert with to_fock()")
    n = np.arange(state.n_cutoff + 1)
    phase = np.exp(1j * passes * lambda_sk * n * n)
    return FockBusState(tuple(replace(b, amplitudes=b.amplitudes * phase) for b in state.branches), state.n_cutoff)
