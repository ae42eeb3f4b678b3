"""Special functions and quadrature used throughout the package.

Everything here is pure Python plus numpy arrays for vector outputs.  Complex
amplitudes are plain :class:`complex` values; coherent-state labels are complex
numbers validated by :func:`check_label`.
"""

from __future__ import annotations

import cmath
import enum
import math
from typing import Callable

import numpy as np

from .errors import ConventionError, DomainError, NumericalError, UsageError

MAX_LABEL_MODULUS = 1.0e4

_INV_SQRT_PI = 1.0 / math.sqrt(math.pi)
_PI_QUARTER = math.pi ** -0.25
_SQRT2 = math.sqrt(2.0)


class QuadratureConvention(enum.Enum):
    """How the bus is projected onto a quadrature eigenstate.

    ``PAPER_VERBATIM`` uses ``exp[-|a|^2 - (p - 2ia)^2/4]``, which is not
    normalised over ``p``.  ``NORMALIZED`` is the physical wavefunction of a
    coherent state in the convention ``x = (a + a^dag)/sqrt(2)``.
    """

    PAPER_VERBATIM = "paper"
    NORMALIZED = "normalized"

    @classmethod
    def parse(cls, value: "QuadratureConvention | str") -> "QuadratureConvention":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {
            "paper": cls.PAPER_VERBATIM,
            "paperverbatim": cls.PAPER_VERBATIM,
            "paper_verbatim": cls.PAPER_VERBATIM,
            "normalized": cls.NORMALIZED,
            "normalised": cls.NORMALIZED,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ConventionError(f"unknown quadrature convention {value!r}; use 'paper' or 'normalized'") from None


PAPER = QuadratureConvention.PAPER_VERBATIM
NORMALIZED = QuadratureConvention.NORMALIZED


def check_label(a: complex, max_modulus: float = MAX_LABEL_MODULUS) -> complex:
    """Return ``a`` as a complex coherent label, rejecting non-finite or huge values."""
    a = complex(a)
    if not (math.isfinite(a.real) and math.isfinite(a.imag)):
        raise DomainError(f"coherent label {a!r} is not finite")
    if abs(a) > max_modulus:
        raise DomainError(f"coherent label modulus {abs(a):.6g} exceeds the guard {max_modulus:.6g}")
    return a


# ---------------------------------------------------------------------------
# coherent states


def log_coherent_overlap(a: complex, b: complex) -> complex:
    """Logarithm of ``<a|b>`` for coherent states ``|a>``, ``|b>``."""
    a = check_label(a)
    b = check_label(b)
    return -0.5 * abs(a) ** 2 - 0.5 * abs(b) ** 2 + a.conjugate() * b


def coherent_overlap(a: complex, b: complex) -> complex:
    """Inner product ``<a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b)``."""
    return cmath.exp(log_coherent_overlap(a, b))


def log_quadrature_amplitude(p: float, a: complex, conv: QuadratureConvention | str) -> complex:
    conv = QuadratureConvention.parse(conv)
    p = float(p)
    if not math.isfinite(p):
        raise DomainError(f"quadrature value {p!r} is not finite")
    a = check_label(a)
    if conv is PAPER:
        return -abs(a) ** 2 - (p - 2j * a) ** 2 / 4.0
    return math.log(_PI_QUARTER) - 0.5 * p * p - 0.5 * abs(a) ** 2 - 1j * _SQRT2 * p * a + 0.5 * a * a


def quadrature_amplitude(p: float, a: complex, conv: QuadratureConvention | str) -> complex:
    """Overlap ``<p|a>`` between a p-quadrature eigenstate and the coherent state ``|a>``.

    Both conventions are evaluated in the log domain and exponentiated last, so
    large labels (``|a| ~ 100``) do not overflow.
    """
    return cmath.exp(log_quadrature_amplitude(p, a, conv))


# ---------------------------------------------------------------------------
# error function

_ERF_SPLIT = 3.0


def _erf_series(x: float) -> float:
    # erf(x) = 2/sqrt(pi) exp(-x^2) sum_n 2^n x^(2n+1) / (2n+1)!!  -- positive terms only
    x2 = x * x
    term = x
    total = x
    n = 0
    while True:
        n += 1
        term *= 2.0 * x2 / (2 * n + 1)
        total += term
        if term <= 1e-17 * total:
            break
    return 2.0 * _INV_SQRT_PI * math.exp(-x2) * total


def _erfc_continued_fraction(x: float) -> float:
    # erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), modified Lentz
    tiny = 1e-300
    f = x
    c = x
    d = 0.0
    for k in range(1, 500):
        a = 0.5 * k
        d = x + a * d
        if abs(d) < tiny:
            d = tiny
        d = 1.0 / d
        c = x + a / c
        if abs(c) < tiny:
            c = tiny
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-x * x) * _INV_SQRT_PI / f


def erf(x: float) -> float:
    """Error function, absolute accuracy well below 1e-12 on the whole real line."""
    x = float(x)
    if math.isnan(x):
        return math.nan
    if x < 0.0:
        return -erf(-x)
    if x == 0.0:
        return 0.0
    if x < _ERF_SPLIT:
        return _erf_series(x)
    if x > 6.5:
        return 1.0
    return 1.0 - _erfc_continued_fraction(x)


def erfc(x: float) -> float:
    """Complementary error function with good relative accuracy in the right tail."""
    x = float(x)
    if math.isnan(x):
        return math.nan
    if x < 0.0:
        return 2.0 - erfc(-x)
    if x < _ERF_SPLIT:
        return 1.0 - erf(x)
    if x > 27.3:
        return 0.0
    return _erfc_continued_fraction(x)


# ---------------------------------------------------------------------------
# Hermite functions

_RESCALE_HIGH = 1e150
_RESCALE_LOW = 1e-150


def hermite_functions(p: float, n_max: int) -> np.ndarray:
    """Normalised Hermite functions ``psi_0(p) .. psi_{n_max}(p)``.

    Uses the forward recurrence
    ``psi_{n+1} = sqrt(2/(n+1)) p psi_n - sqrt(n/(n+1)) psi_{n-1}``
    with a running power-of-e scale so neither the Gaussian prefactor nor the
    growth in the forbidden region over- or underflows before the final value.
    """
    if int(n_max) != n_max or n_max < 0:
        raise UsageError(f"n_max must be a non-negative integer, got {n_max!r}")
    n_max = int(n_max)
    p = float(p)
    if not math.isfinite(p):
        raise DomainError(f"argument {p!r} is not finite")

    out = np.empty(n_max + 1)
    # psi_0 = pi^(-1/4) exp(-p^2/2) represented as m0 * exp(log_scale)
    log_scale = -0.5 * p * p + math.log(_PI_QUARTER)
    prev = 0.0
    cur = 1.0
    out[0] = math.exp(log_scale)
    for n in range(n_max):
        nxt = math.sqrt(2.0 / (n + 1)) * p * cur - math.sqrt(n / (n + 1)) * prev
        prev, cur = cur, nxt
        mag = abs(cur)
        if mag > _RESCALE_HIGH or (0.0 < mag < _RESCALE_LOW and abs(prev) < _RESCALE_LOW):
            shift = math.log(mag)
            cur /= mag
            prev /= mag
            log_scale += shift
        if cur == 0.0:
            out[n + 1] = 0.0
        else:
            out[n + 1] = math.copysign(math.exp(math.log(abs(cur)) + log_scale), cur)
    return out


# ---------------------------------------------------------------------------
# adaptive quadrature

DEFAULT_TOL = 1e-10
MAX_DEPTH = 50
MAX_INTERVALS = 200_000


def _magnitude(x) -> float:
    return float(np.max(np.abs(x)))


def integrate(
    f: Callable[[float], object],
    lo: float,
    hi: float,
    tol: float = DEFAULT_TOL,
    *,
    max_depth: int = MAX_DEPTH,
    max_intervals: int = MAX_INTERVALS,
    initial_panels: int = 4,
):
    """Adaptive Simpson quadrature of ``f`` over ``[lo, hi]``.

    ``f`` may return a float, a complex number or a numpy array (integrated
    elementwise; the error test uses the largest component).  The estimated
    absolute error of the result is at most ``tol``.  Raises
    :class:`NumericalError` carrying the best estimate when an interval needs
    more than ``max_depth`` bisections or the total interval budget runs out.
    """
    lo = float(lo)
    hi = float(hi)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise UsageError("integration limits must be finite")
    if hi < lo:
        raise UsageError(f"integration requires lo <= hi, got [{lo}, {hi}]")
    if not tol > 0:
        raise UsageError(f"tolerance must be positive, got {tol!r}")
    if hi == lo:
        return f(lo) * 0.0

    edges = np.linspace(lo, hi, initial_panels + 1)
    panel_tol = tol / initial_panels
    stack = []
    for a, b in reversed(list(zip(edges[:-1], edges[1:]))):
        m = 0.5 * (a + b)
        fa, fm, fb = f(a), f(m), f(b)
        whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
        stack.append((a, b, fa, fm, fb, whole, panel_tol, 0))

    total = None
    err_total = 0.0
    failed = False
    processed = 0
    while stack:
        a, b, fa, fm, fb, whole, t, depth = stack.pop()
        processed += 1
        m = 0.5 * (a + b)
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        diff = left + right - whole
        err = _magnitude(diff) / 15.0
        if err <= t or depth >= max_depth or processed >= max_intervals:
            if err > t:
                failed = True
            piece = left + right + diff / 15.0
            total = piece if total is None else total + piece
            err_total += err
            continue
        stack.append((m, b, fm, frm, fb, right, 0.5 * t, depth + 1))
        stack.append((a, m, fa, flm, fm, left, 0.5 * t, depth + 1))

    if failed:
        raise NumericalError(
            f"adaptive quadrature on [{lo}, {hi}] did not reach tol={tol:g} "
            f"(estimated error {err_total:.3g})",
            estimate=total,
            error_estimate=err_total,
        )
    return total
