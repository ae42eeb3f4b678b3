"""Parameter sweeps, threshold inversion and analytic-versus-oracle verification.

Rows are plain ``dict`` objects whose key order is the column order; every row
of a sweep has the same keys.  Grid points are evaluated in row-major order of
the axes (first axis outermost).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import analytic as an
from .errors import NumericalError, UsageError
from .numerics import DEFAULT_TOL, NORMALIZED, PAPER, QuadratureConvention
from . import oracle as orc

CHANNELS = ("postselect", "loss", "mismatch", "modematch", "selfkerr")

# parameter name -> default value; None means "derived unless given"
CHANNEL_PARAMS: dict[str, dict[str, float | None]] = {
    "postselect": {"alpha": 10.0, "theta": 0.1, "d": None, "x0": 0.0},
    "loss": {"alpha": 107.2, "theta": 0.01, "eta_prime": 0.1, "x": None},
    "mismatch": {"alpha": 1.0, "delta0": 0.5, "n_grid": 2001},
    "modematch": {"lambda1_a": 1.0, "lambda1_b": 1.0, "lambda1": None},
    "selfkerr": {"alpha": 2.0, "theta": 0.1, "lambda_sk": 0.0, "p": 0.0, "passes": 1, "n_cutoff": None},
}


def check_channel(channel: str) -> str:
    if channel not in CHANNELS:
        raise UsageError(f"unknown channel {channel!r}; choose one of {', '.join(CHANNELS)}")
    return channel


def check_param(channel: str, name: str) -> str:
    valid = CHANNEL_PARAMS[check_channel(channel)]
    if name not in valid:
        raise UsageError(f"invalid parameter {name!r} for channel {channel!r}; valid names: {', '.join(valid)}")
    return name


def conventions_for(selection: str) -> tuple[QuadratureConvention, ...]:
    selection = str(selection).strip().lower()
    if selection == "both":
        return (PAPER, NORMALIZED)
    return (QuadratureConvention.parse(selection),)


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    n_points: int
    scale: str = "linear"

    def __post_init__(self):
        if self.n_points < 2:
            raise UsageError(f"axis {self.name!r} needs at least 2 points, got {self.n_points}")
        if self.scale not in ("linear", "log"):
            raise UsageError(f"axis scale must be 'linear' or 'log', got {self.scale!r}")
        if self.scale == "log" and not (self.lo > 0 and self.hi > 0):
            raise UsageError(f"log axis {self.name!r} needs positive limits")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.n_points)
        return np.linspace(self.lo, self.hi, self.n_points)

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """``name=lo:hi:n`` or ``name=lo:hi:n:log``."""
        try:
            name, rng = text.split("=", 1)
            parts = rng.split(":")
            if len(parts) not in (3, 4):
                raise ValueError
            scale = parts[3].strip().lower() if len(parts) == 4 else "linear"
            scale = {"lin": "linear", "linear": "linear", "log": "log"}[scale]
            return cls(name.strip(), float(parts[0]), float(parts[1]), int(parts[2]), scale)
        except (ValueError, KeyError):
            raise UsageError(f"cannot parse axis {text!r}; expected name=lo:hi:n[:lin|log]") from None


@dataclass(frozen=True)
class SweepSpec:
    channel: str
    axes: tuple[Axis, ...] = ()
    fixed: dict = field(default_factory=dict)
    convention: str = "both"
    oracle_check: bool = False
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        check_channel(self.channel)
        if len(self.axes) > 3:
            raise UsageError("at most three axes are supported")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise UsageError(f"duplicate axis names: {names}")
        for name in names + list(self.fixed):
            check_param(self.channel, name)
        conventions_for(self.convention)
        if not self.tol > 0:
            raise UsageError(f"tol must be positive, got {self.tol!r}")

    @property
    def n_rows(self) -> int:
        return math.prod(a.n_points for a in self.axes) if self.axes else 1


# ---------------------------------------------------------------------------
# channel evaluators


def _resolve(channel: str, point: dict) -> dict:
    params = dict(CHANNEL_PARAMS[channel])
    params.update(point)
    return params


def _eval_postselect(params, provided, convs, oracle, tol):
    if "d" in provided:
        d = abs(params["d"])
        theta = params["theta"]
        alpha = d / (2.0 * math.sin(theta)) if math.sin(theta) != 0 else math.nan
    else:
        alpha, theta = params["alpha"], params["theta"]
        d = abs(an.separation_d(alpha, theta))
    x0 = params["x0"]
    row = {"alpha": alpha, "theta": theta, "d": d, "x0": x0}
    for c in convs:
        row[f"point_{c.value}"] = an.postselect_error_point(d, c)
        row[f"window_{c.value}"] = an.postselect_error_window(x0, d, c) if x0 > 0 else math.nan
    if oracle:
        ideal = orc.ideal_parity_density(orc.EQUAL_COEFFICIENTS)
        state = orc.parity_gate(orc.prepare_input(orc.EQUAL_COEFFICIENTS, alpha), theta)
        for c in convs:
            rep = orc.extract_report(orc.homodyne_point(state, 0.0, c).unnormalized, ideal)
            row[f"oracle_point_{c.value}"] = rep.parity_error
            row[f"absdev_point_{c.value}"] = abs(rep.parity_error - row[f"point_{c.value}"])
            if x0 > 0:
                rep = orc.extract_report(orc.homodyne_window(state, x0, c, tol).unnormalized, ideal)
                row[f"oracle_window_{c.value}"] = rep.parity_error
                row[f"absdev_window_{c.value}"] = abs(rep.parity_error - row[f"window_{c.value}"])
            else:
                row[f"oracle_window_{c.value}"] = math.nan
                row[f"absdev_window_{c.value}"] = math.nan
    return row


def loss_oracle_gamma(alpha: float, theta: float, eta_prime: float, conv=NORMALIZED) -> complex:
    """Coherence ratio of the simulated gate with bus loss between the two interactions."""
    eta = math.sqrt(1.0 - eta_prime * eta_prime)
    state = orc.prepare_input(orc.EQUAL_COEFFICIENTS, alpha)
    state = orc.apply_cross_kerr(state, "A", theta)
    state = orc.apply_loss(state, eta)
    state = orc.apply_cross_kerr(state, "B", -theta)
    return orc.coherence_ratio(orc.homodyne_point(state, 0.0, conv).unnormalized)


def _eval_loss(params, provided, convs, oracle, tol):
    if "x" in provided:
        x = params["x"]
        alpha = theta = eta_prime = math.nan
        gamma_exact = math.nan
    else:
        alpha, theta, eta_prime = params["alpha"], params["theta"], params["eta_prime"]
        x = alpha * theta * eta_prime
        gamma_exact = an.loss_gamma(alpha, theta, eta_prime)
    gamma_small = math.exp(-0.5 * x * x)
    row = {
        "alpha": alpha,
        "theta": theta,
        "eta_prime": eta_prime,
        "x": x,
        "gamma_exact": gamma_exact,
        "gamma_small": gamma_small,
        "p_flip_exact": 0.5 * (1.0 - gamma_exact),
        "p_flip_small": 0.5 * (1.0 - gamma_small),
    }
    if oracle:
        for c in convs:
            if "x" in provided:
                row[f"oracle_gamma_{c.value}"] = math.nan
                row[f"absdev_gamma_{c.value}"] = math.nan
                continue
            g = abs(loss_oracle_gamma(alpha, theta, eta_prime, c))
            row[f"oracle_gamma_{c.value}"] = g
            row[f"absdev_gamma_{c.value}"] = abs(g - gamma_exact)
    return row


def _eval_mismatch(params, provided, convs, oracle, tol):
    alpha, delta0 = params["alpha"], params["delta0"]
    row = {"alpha": alpha, "delta0": delta0}
    results = {}
    for c in convs:
        r = an.mismatch_dephasing(alpha, delta0, c, tol)
        results[c] = r
        row[f"p_{c.value}"] = float(r.p)
        row[f"mu_{c.value}"] = float(r.mu)
        row[f"mu_printed_{c.value}"] = float(r.mu_printed)
    if oracle:
        n_grid = int(params["n_grid"])
        for c in convs:
            r = results[c]
            mix = orc.mixture_over_delta(alpha, delta0, n_grid, c)
            row[f"residual_{c.value}"] = orc.reconstruction_residual(mix, r.p, r.mu)
            if delta0 > 0:
                row[f"residual_printed_{c.value}"] = orc.reconstruction_residual(mix, r.p_with_mu(r.mu_printed), r.mu_printed)
            else:
                row[f"residual_printed_{c.value}"] = math.nan
    return row


def _eval_modematch(params, provided, convs, oracle, tol):
    if "lambda1" in provided:
        la = lb = params["lambda1"]
    else:
        la, lb = params["lambda1_a"], params["lambda1_b"]
    p_err = an.mode_mismatch_error(an.ModeOverlapParams(la, lb))
    row = {"lambda1_a": la, "lambda1_b": lb, "p_error": p_err}
    if oracle:
        proj = orc.regroup(orc.projector_weights(la, lb)).error_probability
        out = orc.mode_mismatch_outcome(la, lb)
        pop = orc.extract_report(out.unnormalized, orc.ideal_parity_density(orc.EQUAL_COEFFICIENTS)).parity_error
        row["oracle_projector_error"] = proj
        row["absdev_projector"] = abs(proj - p_err)
        row["oracle_population_error"] = pop
    return row


def selfkerr_oracle_error(alpha, theta, sk: an.SelfKerrParams, p=0.0) -> float:
    """Parity error of the Fock-backend simulation, conditioned on quadrature value ``p``."""
    state = orc.parity_gate(orc.prepare_input(orc.EQUAL_COEFFICIENTS, alpha), theta)
    state = orc.apply_self_kerr(orc.to_fock(state, sk.cutoff_for(alpha)), sk.lambda_sk, sk.passes)
    out = orc.homodyne_point(state, p, NORMALIZED)
    return orc.extract_report(out.unnormalized, orc.ideal_parity_density(orc.EQUAL_COEFFICIENTS)).parity_error


def _eval_selfkerr(params, provided, convs, oracle, tol):
    alpha, theta, lam, p = params["alpha"], params["theta"], params["lambda_sk"], params["p"]
    n_cutoff = params["n_cutoff"]
    sk = an.SelfKerrParams(lam, None if n_cutoff is None else int(n_cutoff), int(params["passes"]))
    p_err = an.self_kerr_error(alpha, theta, sk, p)
    row = {"alpha": alpha, "theta": theta, "lambda_sk": lam, "p": p, "passes": float(sk.passes), "p_error": p_err}
    if oracle:
        if alpha > orc.states.FOCK_ALPHA_CEILING:
            row["oracle_p_error"] = math.nan
            row["absdev"] = math.nan
            row["oracle_status"] = f"skipped: alpha above Fock ceiling {orc.states.FOCK_ALPHA_CEILING:g}"
        else:
            o = selfkerr_oracle_error(alpha, theta, sk, p)
            row["oracle_p_error"] = o
            row["absdev"] = abs(o - p_err)
            row["oracle_status"] = "ok"
    return row


_EVALUATORS = {
    "postselect": _eval_postselect,
    "loss": _eval_loss,
    "mismatch": _eval_mismatch,
    "modematch": _eval_modematch,
    "selfkerr": _eval_selfkerr,
}


def evaluate_point(spec: SweepSpec, point: dict) -> dict:
    params = _resolve(spec.channel, {**spec.fixed, **point})
    provided = set(spec.fixed) | set(point)
    convs = conventions_for(spec.convention)
    return _EVALUATORS[spec.channel](params, provided, convs, spec.oracle_check, spec.tol)


def grid_points(spec: SweepSpec):
    names = [a.name for a in spec.axes]
    for combo in itertools.product(*(a.values() for a in spec.axes)):
        yield {n: float(v) for n, v in zip(names, combo)}


def run_sweep(spec: SweepSpec) -> list[dict]:
    """Evaluate every grid point in row-major order (first axis outermost)."""
    return [evaluate_point(spec, point) for point in grid_points(spec)]


# ---------------------------------------------------------------------------
# figures

FIGURES = {
    "fig1": SweepSpec("postselect", (Axis("x0", 0.01, 2.0, 41), Axis("d", 0.0, 4.0, 41))),
    "fig2": SweepSpec("loss", (Axis("x", 0.0, 2.0, 101),)),
    "fig3": SweepSpec("mismatch", (Axis("alpha", 0.1, 3.0, 21), Axis("delta0", 0.0, 1.0, 21))),
    "fig4": SweepSpec(
        "selfkerr",
        (Axis("alpha", 2.0, 4.0, 2), Axis("lambda_sk", 0.0, 0.05, 21), Axis("theta", 0.0, 0.2, 21)),
    ),
}


def figure_spec(name: str, **overrides) -> SweepSpec:
    if name not in FIGURES:
        raise UsageError(f"unknown figure {name!r}; choose one of {', '.join(FIGURES)}")
    base = FIGURES[name]
    axes = list(base.axes)
    for ax in overrides.pop("axes", ()):
        for i, old in enumerate(axes):
            if old.name == ax.name:
                axes[i] = ax
                break
        else:
            axes.append(ax)
    fixed = {**base.fixed, **overrides.pop("fixed", {})}
    kwargs = {k: v for k, v in overrides.items() if v is not None}
    return SweepSpec(base.channel, tuple(axes), fixed, **{"convention": base.convention, "oracle_check": base.oracle_check, "tol": base.tol, **kwargs})


# ---------------------------------------------------------------------------
# thresholds

THRESHOLD_BRACKETS = {
    ("postselect", "alpha"): (1e-9, 1e4),
    ("postselect", "d"): (0.0, 50.0),
    ("postselect", "theta"): (0.0, math.pi / 2),
    ("loss", "x"): (0.0, 10.0),
    ("loss", "alpha"): (0.0, 1e4),
    ("loss", "theta"): (0.0, math.pi),
    ("loss", "eta_prime"): (0.0, 1.0),
    ("mismatch", "delta0"): (0.0, math.pi / 2),
    ("mismatch", "alpha"): (0.0, 10.0),
    ("modematch", "lambda1"): (0.0, 1.0),
    ("modematch", "lambda1_a"): (0.0, 1.0),
    ("modematch", "lambda1_b"): (0.0, 1.0),
    ("selfkerr", "lambda_sk"): (0.0, 0.05),
    ("selfkerr", "theta"): (0.0, 0.5),
    ("selfkerr", "alpha"): (0.1, 8.0),
}


def channel_metric(channel: str, params: dict, conv: QuadratureConvention = PAPER, tol: float = DEFAULT_TOL) -> float:
    """The error probability a threshold is placed on, for each channel.

    postselect: point (or window, if ``x0 > 0``) parity error; loss: small-angle
    dephasing probability; mismatch: dephasing probability; modematch: regrouped
    projector error; selfkerr: series parity error.
    """
    p = _resolve(channel, params)
    if channel == "postselect":
        d = abs(p["d"]) if p["d"] is not None else abs(an.separation_d(p["alpha"], p["theta"]))
        return an.postselect_error_window(p["x0"], d, conv) if p["x0"] > 0 else an.postselect_error_point(d, conv)
    if channel == "loss":
        x = p["x"] if p["x"] is not None else p["alpha"] * p["theta"] * p["eta_prime"]
        return 0.5 * (1.0 - math.exp(-0.5 * x * x))
    if channel == "mismatch":
        return float(an.mismatch_dephasing(p["alpha"], p["delta0"], conv, tol).p)
    if channel == "modematch":
        if p["lambda1"] is not None:
            return an.mode_mismatch_error(an.ModeOverlapParams(p["lambda1"], p["lambda1"]))
        return an.mode_mismatch_error(an.ModeOverlapParams(p["lambda1_a"], p["lambda1_b"]))
    sk = an.SelfKerrParams(p["lambda_sk"], p["n_cutoff"], int(p["passes"]))
    return an.self_kerr_error(p["alpha"], p["theta"], sk, p["p"])


@dataclass(frozen=True)
class ThresholdResult:
    channel: str
    free_param: str
    target: float
    value: float
    metric: float
    lo: float
    hi: float
    iterations: int

    def as_row(self) -> dict:
        return {
            "channel": self.channel,
            "free_param": self.free_param,
            "target": self.target,
            "value": self.value,
            "metric_at_value": self.metric,
            "bracket_lo": self.lo,
            "bracket_hi": self.hi,
            "iterations": float(self.iterations),
        }


def bisect(f, lo: float, hi: float, xtol: float = 1e-10, max_iter: int = 500) -> tuple[float, int]:
    """Root of ``f`` in ``[lo, hi]`` by bisection; ``f(lo)`` and ``f(hi)`` must differ in sign."""
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo, 0
    if fhi == 0:
        return hi, 0
    if (flo > 0) == (fhi > 0):
        raise NumericalError(
            f"no sign change on bracket [{lo:.10g}, {hi:.10g}] (f = {flo:.6g}, {fhi:.6g}); target infeasible",
            estimate=(lo, hi),
        )
    it = 0
    while hi - lo > xtol and it < max_iter:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = f(mid)
        it += 1
        if fm == 0:
            return mid, it
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi), it


def solve_threshold(
    channel: str,
    p_target: float,
    free_param: str,
    fixed: dict | None = None,
    lo: float | None = None,
    hi: float | None = None,
    conv: QuadratureConvention | str = PAPER,
    xtol: float = 1e-10,
) -> ThresholdResult:
    """Value of ``free_param`` at which the channel's error metric equals ``p_target``."""
    check_channel(channel)
    check_param(channel, free_param)
    fixed = dict(fixed or {})
    for name in fixed:
        check_param(channel, name)
    conv = QuadratureConvention.parse(conv)
    default_lo, default_hi = THRESHOLD_BRACKETS.get((channel, free_param), (None, None))
    lo = default_lo if lo is None else lo
    hi = default_hi if hi is None else hi
    if lo is None or hi is None:
        raise UsageError(f"no default bracket for {channel}/{free_param}; pass lo and hi")
    if not lo < hi:
        raise UsageError(f"bracket must satisfy lo < hi, got [{lo}, {hi}]")

    def f(v):
        return channel_metric(channel, {**fixed, free_param: v}, conv) - p_target

    value, it = bisect(f, float(lo), float(hi), xtol)
    return ThresholdResult(channel, free_param, p_target, value, f(value) + p_target, float(lo), float(hi), it)


# ---------------------------------------------------------------------------
# verification


@dataclass
class VerificationReport:
    channel: str
    tolerance: float
    rows: list = field(default_factory=list)
    max_dev: dict = field(default_factory=dict)
    verdict: str = "neither"
    passed: bool = False
    skipped: int = 0
    notes: list = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "channel": self.channel,
            "tolerance": self.tolerance,
            "points": len(self.rows),
            "skipped": self.skipped,
            "max_dev": dict(self.max_dev),
            "verdict": self.verdict,
            "passed": self.passed,
            "notes": list(self.notes),
        }


VERIFY_TOL = {"postselect": 1e-8, "loss": 1e-8, "mismatch": 1e-8, "modematch": 1e-12, "selfkerr": 1e-8}


def _logit(p):
    return math.log(p / (1.0 - p))


def _verdict(report: VerificationReport, candidates) -> None:
    matched = [c for c in candidates if report.max_dev.get(c, math.inf) <= report.tolerance]
    if len(matched) == len(candidates) and len(candidates) > 1:
        report.verdict = "both"
    elif matched:
        report.verdict = matched[0]
    else:
        report.verdict = "neither"
    report.passed = bool(matched)


def _verify_postselect(g, report):
    devs = {"paper": 0.0, "normalized": 0.0}
    for alpha in np.linspace(1.0, 4.0, g):
        for d in np.linspace(0.5, 3.0, g):
            row = {"alpha": float(alpha), "d": float(d)}
            if d > 2 * alpha:
                row.update(status="skipped: d > 2 alpha", theta=math.nan)
                report.skipped += 1
                report.rows.append(row)
                continue
            theta = math.asin(d / (2 * alpha))
            state = orc.parity_gate(orc.prepare_input(orc.EQUAL_COEFFICIENTS, alpha), theta)
            ideal = orc.ideal_parity_density(orc.EQUAL_COEFFICIENTS)
            fock = orc.extract_report(orc.homodyne_point(orc.to_fock(state), 0.0).unnormalized, ideal).parity_error
            coh = orc.extract_report(orc.homodyne_point(state, 0.0, NORMALIZED).unnormalized, ideal).parity_error
            paper = an.postselect_error_point(d, PAPER)
            norm = an.postselect_error_point(d, NORMALIZED)
            row.update(
                status="ok",
                theta=theta,
                oracle_fock=fock,
                oracle_coherent=coh,
                point_paper=paper,
                point_normalized=norm,
                dev_paper=abs(fock - paper),
                dev_normalized=abs(fock - norm),
                backend_dev=abs(fock - coh),
                exponent_ratio=_logit(paper) / _logit(fock),
            )
            devs["paper"] = max(devs["paper"], row["dev_paper"])
            devs["normalized"] = max(devs["normalized"], row["dev_normalized"], row["backend_dev"])
            report.rows.append(row)
    report.max_dev = devs
    report.notes.append("exponent_ratio = logit(paper-convention formula) / logit(oracle); 2 means that exponent is doubled")
    _verdict(report, ("normalized", "paper"))


def _verify_loss(g, report):
    devs = {"paper": 0.0, "normalized": 0.0}
    for alpha in np.geomspace(1.0, 50.0, g):
        for theta in np.geomspace(0.01, 0.1, g):
            for ep in np.linspace(0.1, 0.3, g):
                exact = an.loss_gamma(alpha, theta, ep)
                row = {"alpha": float(alpha), "theta": float(theta), "eta_prime": float(ep), "gamma_exact": exact}
                for c in (PAPER, NORMALIZED):
                    o = abs(loss_oracle_gamma(alpha, theta, ep, c))
                    row[f"oracle_{c.value}"] = o
                    row[f"dev_{c.value}"] = abs(o - exact)
                    devs[c.value] = max(devs[c.value], row[f"dev_{c.value}"])
                report.rows.append(row)
    report.max_dev = devs
    _verdict(report, ("paper", "normalized"))


def _verify_mismatch(g, report):
    devs = {"paper": 0.0, "normalized": 0.0}
    for alpha in np.linspace(0.5, 2.0, g):
        for delta0 in np.linspace(0.2, 0.8, g):
            row = {"alpha": float(alpha), "delta0": float(delta0)}
            for c in (PAPER, NORMALIZED):
                r = an.mismatch_dephasing(alpha, delta0, c)
                mix = orc.mixture_over_delta(alpha, delta0, conv=c)
                row[f"p_{c.value}"] = float(r.p)
                row[f"mu_{c.value}"] = float(r.mu)
                row[f"residual_{c.value}"] = orc.reconstruction_residual(mix, r.p, r.mu)
                row[f"residual_printed_mu_{c.value}"] = orc.reconstruction_residual(mix, r.p_with_mu(r.mu_printed), r.mu_printed)
                devs[c.value] = max(devs[c.value], row[f"residual_{c.value}"])
            report.rows.append(row)
    report.max_dev = devs
    report.notes.append("residual = Frobenius distance of the simulated average from (1-p)|psi_b><psi_b| + p Z|psi_b><psi_b|Z")
    _verdict(report, ("paper", "normalized"))


def _verify_modematch(g, report):
    dev = 0.0
    for la in np.linspace(0.5, 1.0, g):
        for lb in np.linspace(0.5, 1.0, g):
            a = an.mode_mismatch_error(an.ModeOverlapParams(la, lb))
            o = orc.regroup(orc.projector_weights(la, lb)).error_probability
            report.rows.append({"lambda1_a": float(la), "lambda1_b": float(lb), "p_error": a, "oracle": o, "dev": abs(a - o)})
            dev = max(dev, abs(a - o))
    report.max_dev = {"convention-free": dev}
    report.verdict = "convention-free" if dev <= report.tolerance else "neither"
    report.passed = dev <= report.tolerance


def _verify_selfkerr(g, report):
    dev = 0.0
    for alpha in np.linspace(1.0, 10.0, g):
        for theta in np.linspace(0.05, 0.1, g):
            for lam in np.linspace(0.0, 0.02, g):
                sk = an.SelfKerrParams(float(lam))
                row = {"alpha": float(alpha), "theta": float(theta), "lambda_sk": float(lam), "p_error": an.self_kerr_error(alpha, theta, sk)}
                if alpha > orc.states.FOCK_ALPHA_CEILING:
                    row.update(status=f"skipped: alpha above Fock ceiling {orc.states.FOCK_ALPHA_CEILING:g}", oracle=math.nan, dev=math.nan)
                    report.skipped += 1
                else:
                    o = selfkerr_oracle_error(alpha, theta, sk)
                    row.update(status="ok", oracle=o, dev=abs(o - row["p_error"]))
                    dev = max(dev, row["dev"])
                report.rows.append(row)
    report.max_dev = {"normalized": dev}
    _verdict(report, ("normalized",))


_VERIFIERS = {
    "postselect": _verify_postselect,
    "loss": _verify_loss,
    "mismatch": _verify_mismatch,
    "modematch": _verify_modematch,
    "selfkerr": _verify_selfkerr,
}


def verify(channel: str, grid_density: int = 3, tol: float | None = None) -> VerificationReport:
    """Run analytic formulas and the oracle side by side on a grid and compare."""
    check_channel(channel)
    if grid_density < 2:
        raise UsageError(f"grid density must be >= 2, got {grid_density}")
    report = VerificationReport(channel, VERIFY_TOL[channel] if tol is None else tol)
    _VERIFIERS[channel](int(grid_density), report)
    return report
