"""Convergent model sequences and the checks run along them.

A :class:`PerturbationSchedule` turns a true model into models
``n = 1..steps`` whose parameters approach the truth geometrically
(``decay**n``); :func:`run_sweep` records means, integrability numbers,
Laplace probes, distances and optimal portfolios along the sequence and
:func:`check_convergence` judges the trends against a :class:`ToleranceSpec`.

Tolerance defaults are engineering calibration from sweeps at
``steps=12, decay=0.5``; no convergence rates are claimed.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .distances import distance_report
from .mixing import (
    AtomicGgc,
    FiniteGammaConvolution,
    Gig,
    MixingLaw,
    UnsupportedLawError,
    as_thorin,
    gamma,
    integrability_number,
    laplace,
    mean,
    thorin_partial_mean,
)
from .models import ModelError, NmvmModel, check_spd
from .portfolio import MarketSpec, optimal_portfolio

LAW_PATH_KINDS = ("scale_drift", "shape_drift", "drift_shift", "gig_path")


class ScheduleError(ValueError):
    """A perturbation schedule produced an invalid model."""


class IrregularModelError(ArithmeticError):
    """The true model has no regular optimal portfolio."""


# ---------------------------------------------------------------------------
# law paths


@dataclass(frozen=True)
class LawPath:
    """Parametric path ``law_n -> law`` as ``n -> inf``.

    ``coefficients`` are the ``c`` values: one per component for the drift
    kinds (a single value is broadcast), one for ``drift_shift`` and
    ``(c_lambda, c_a, c_b)`` for ``gig_path``, where ``lambda`` moves
    additively and ``a``, ``b`` multiplicatively.
    """

    kind: str
    coefficients: tuple

    def __post_init__(self):
        if self.kind not in LAW_PATH_KINDS:
            raise ScheduleError(f"unknown law path kind {self.kind!r}; expected one of {LAW_PATH_KINDS}")
        coeffs = tuple(float(c) for c in np.atleast_1d(self.coefficients))
        if not coeffs or not all(math.isfinite(c) for c in coeffs):
            raise ScheduleError("law path coefficients must be finite and non-empty")
        if self.kind == "gig_path" and len(coeffs) != 3:
            raise ScheduleError("gig_path takes three coefficients (c_lambda, c_a, c_b)")
        if self.kind == "drift_shift" and len(coeffs) != 1:
            raise ScheduleError("drift_shift takes a single coefficient")
        object.__setattr__(self, "coefficients", coeffs)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "coefficients": list(self.coefficients)}


def _broadcast(coeffs, size, kind):
    c = np.asarray(coeffs, dtype=float)
    if c.size == 1:
        return np.full(size, c[0])
    if c.size != size:
        raise ScheduleError(f"{kind} needs 1 or {size} coefficients, got {c.size}")
    return c


def law_at(law: MixingLaw, paths: Sequence[LawPath], factor: float) -> MixingLaw:
    """Move ``law`` along ``paths`` with weight ``factor = decay**n``.

    Composed paths act on the same parameter arrays of ``law``, so their
    coefficients index the components of the target law in storage order.
    """
    paths = tuple(paths)
    if isinstance(law, Gig):
        lam, a, b = law.lam, law.a, law.b
        for p in paths:
            if p.kind != "gig_path":
                raise ScheduleError(f"{p.kind} does not apply to a GIG law")
            cl, ca, cb = p.coefficients
            lam, a, b = lam + factor * cl, a * (1.0 + factor * ca), b * (1.0 + factor * cb)
        return Gig(lam, a, b)
    if isinstance(law, AtomicGgc):
        conv = FiniteGammaConvolution([(w, 1.0 / t) for t, w in law.generator.atoms], law.tau)
    else:
        conv = law
    alphas, betas, tau = conv.alphas.copy(), conv.betas.copy(), conv.tau
    for p in paths:
        if p.kind == "scale_drift":
            betas = betas * (1.0 + factor * _broadcast(p.coefficients, betas.size, p.kind))
        elif p.kind == "shape_drift":
            alphas = alphas * (1.0 + factor * _broadcast(p.coefficients, alphas.size, p.kind))
        elif p.kind == "drift_shift":
            tau = tau + factor * p.coefficients[0]
        else:
            raise ScheduleError("gig_path applies only to GIG laws")
    try:
        moved = FiniteGammaConvolution(list(zip(alphas, betas)), tau)
    except ValueError as exc:
        raise ScheduleError(f"law path left the parameter space: {exc}") from None
    if isinstance(law, AtomicGgc):
        return AtomicGgc(as_thorin(moved))
    return moved


# ---------------------------------------------------------------------------
# schedules


@dataclass(frozen=True, eq=False)
class PerturbationSchedule:
    """Geometric perturbation ``theta_n = theta + decay**n * d_theta``.

    Directions left as ``None`` are drawn from ``seed`` (standard normal
    scaled by 0.01), so a schedule is reproducible from its seed alone.
    """

    steps: int
    decay: float
    dmu: np.ndarray | None = None
    dgamma: np.ndarray | None = None
    dA: np.ndarray | None = None
    law_path: tuple = ()
    seed: int = 0

    def __post_init__(self):
        if int(self.steps) < 1:
            raise ScheduleError("steps must be >= 1")
        if not 0.0 < self.decay < 1.0:
            raise ScheduleError(f"decay must lie in (0, 1), got {self.decay!r}")
        object.__setattr__(self, "steps", int(self.steps))
        lp = self.law_path
        if isinstance(lp, LawPath):
            lp = (lp,)
        object.__setattr__(self, "law_path", tuple(lp))

    def directions(self, dim: int):
        """``(dmu, dgamma, dA)`` with missing ones filled from the seed; dA symmetrised."""
        rng = np.random.default_rng(np.random.SeedSequence(int(self.seed)))
        drawn = [0.01 * rng.standard_normal(dim), 0.01 * rng.standard_normal(dim),
                 0.01 * rng.standard_normal((dim, dim))]
        out = []
        for given, fallback, shape in zip(
            (self.dmu, self.dgamma, self.dA), drawn, ((dim,), (dim,), (dim, dim))
        ):
            arr = fallback if given is None else np.asarray(given, dtype=float).reshape(np.shape(given))
            if arr.shape != shape:
                raise ScheduleError(f"direction has shape {arr.shape}, expected {shape}")
            out.append(arr)
        out[2] = 0.5 * (out[2] + out[2].T)
        return tuple(out)

    def to_dict(self) -> dict:
        doc = {"steps": self.steps, "decay": self.decay, "seed": self.seed}
        for key in ("dmu", "dgamma", "dA"):
            val = getattr(self, key)
            if val is not None:
                doc[key] = np.asarray(val, dtype=float).tolist()
        doc["law_path"] = [p.to_dict() for p in self.law_path]
        return doc


def make_schedule(model: NmvmModel, spec: PerturbationSchedule) -> list[NmvmModel]:
    """Models ``n = 1..steps`` converging to ``model``."""
    dmu, dgamma, d_a = spec.directions(model.dim)
    out = []
    for n in range(1, spec.steps + 1):
        f = spec.decay**n
        a_n = model.a_matrix + f * d_a
        try:
            check_spd(a_n)
        except ModelError as exc:
            raise ScheduleError(f"step {n}: perturbed A is invalid ({exc})") from None
        law_n = law_at(model.law, spec.law_path, f) if spec.law_path else model.law
        out.append(NmvmModel(model.mu + f * dmu, model.gamma_vec + f * dgamma, a_n, law_n))
    return out


def adversarial_schedule(model: NmvmModel, steps: int = 12) -> list[NmvmModel]:
    """Non-convergent sequence ``law_n = Gamma(1, scale n)``; all else fixed."""
    return [model.replace(law=gamma(1.0, float(n))) for n in range(1, steps + 1)]


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class ToleranceSpec:
    tol_mean: float = 1e-4
    tol_in: float = 1e-6
    tol_lap: float = 1e-4
    tol_dist: float = 1e-2
    tol_port: float = 1e-3
    tol_qmin: float = 1e-4

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class StepRecord:
    n: int
    mean: float
    s_hat: float
    probes: tuple
    d_tv: float
    d_kol: float
    fm_lo: float
    fm_hi: float
    q_min: float
    x_err: float
    q_err: float
    regular: bool
    constants_err: tuple
    mean_err: float
    s_hat_err: float
    probe_err: tuple


@dataclass(frozen=True, eq=False)
class RobustnessReport:
    probe_points: tuple
    true_mean: float
    true_s_hat: float
    true_probes: tuple
    true_q_min: float
    true_x_star: np.ndarray
    records: tuple
    summary: dict = field(default_factory=dict)

    @property
    def steps(self) -> int:
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    def csv_header(self) -> list[str]:
        probes = [f"L_n({s!r})" for s in self.probe_points]
        return ["n", "EZ_n", "s_hat_n", *probes, "d_tv", "d_kol", "fm_lo", "fm_hi", "q_min_n", "x_err"]

    def csv_rows(self) -> list[list]:
        return [
            [r.n, r.mean, r.s_hat, *r.probes, r.d_tv, r.d_kol, r.fm_lo, r.fm_hi, r.q_min, r.x_err]
            for r in self.records
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.csv_header())
        for row in self.csv_rows():
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [
            f"steps = {self.steps}",
            f"true_mean = {_fmt(self.true_mean)}",
            f"true_s_hat = {_fmt(self.true_s_hat)}",
            f"true_q_min = {_fmt(self.true_q_min)}",
            "true_x_star = [" + ", ".join(_fmt(v) for v in self.true_x_star) + "]",
            f"irregular_steps = {[r.n for r in self.records if not r.regular]}",
        ]
        for name, res in self.summary.items():
            lines.append(f"check {name}: {'pass' if res.passed else 'FAIL'} ({res.detail})")
        return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def _safe_laplace(law, s):
    try:
        return float(laplace(law, s))
    except ValueError:
        return math.inf


def _abs_err(a, b):
    if a == b:
        return 0.0
    return abs(a - b) if math.isfinite(a) and math.isfinite(b) else math.inf


def _step(n, model, market, truth, probe_points):
    law = model.law
    ez, sh = mean(law), integrability_number(law)
    probes = tuple(_safe_laplace(law, s) for s in probe_points)
    dist = distance_report(law, truth["law"])
    sol = optimal_portfolio(model, market)
    c, tc = sol.constants, truth["constants"]
    if sol.regular:
        x_err = float(np.linalg.norm(sol.x_star - truth["x_star"]))
        q_err = abs(sol.q_min - truth["q_min"])
    else:
        x_err = q_err = math.nan
    return StepRecord(
        n=n, mean=ez, s_hat=sh, probes=probes,
        d_tv=dist.total_variation, d_kol=dist.kolmogorov, fm_lo=dist.fm_lower, fm_hi=dist.fm_upper,
        q_min=sol.q_min, x_err=x_err, q_err=q_err, regular=sol.regular,
        constants_err=(abs(c.cal_a - tc.cal_a), abs(c.cal_b - tc.cal_b), abs(c.cal_c - tc.cal_c)),
        mean_err=_abs_err(ez, truth["mean"]),
        s_hat_err=abs(sh - truth["s_hat"]),
        probe_err=tuple(_abs_err(p, t) for p, t in zip(probes, truth["probes"])),
    )


def default_probes(law: MixingLaw) -> tuple:
    """``s_hat / 2`` (strictly negative when ``s_hat < 0``) plus ``0.5`` and ``1``."""
    sh = integrability_number(law)
    return tuple(p for p in (0.5 * sh, 0.5, 1.0) if p != 0.0)


def run_sweep(
    true_model: NmvmModel,
    market: MarketSpec,
    schedule: Sequence[NmvmModel],
    probe_points: Sequence[float] | None = None,
    workers: int = 1,
) -> RobustnessReport:
    """Evaluate every step of ``schedule`` against ``true_model``.

    Irregular steps are kept with ``regular=False`` and NaN portfolio errors.

    Raises
    ------
    IrregularModelError
        If the true model's optimal portfolio is not regular.
    """
    truth_sol = optimal_portfolio(true_model, market)
    if not truth_sol.regular:
        raise IrregularModelError(
            f"true model is irregular: {truth_sol.diagnostics.get('reason', 'unknown')}"
        )
    law = true_model.law
    probes = tuple(float(s) for s in (default_probes(law) if probe_points is None else probe_points))
    truth = {
        "law": law,
        "mean": mean(law),
        "s_hat": integrability_number(law),
        "probes": tuple(_safe_laplace(law, s) for s in probes),
        "constants": truth_sol.constants,
        "q_min": truth_sol.q_min,
        "x_star": truth_sol.x_star,
    }
    items = list(enumerate(schedule, start=1))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda it: _step(it[0], it[1], market, truth, probes), items))
    else:
        records = [_step(n, m, market, truth, probes) for n, m in items]
    return RobustnessReport(
        probes, truth["mean"], truth["s_hat"], truth["probes"],
        truth_sol.q_min, truth_sol.x_star, tuple(records),
    )


# ---------------------------------------------------------------------------
# checks


class CheckResult(NamedTuple):
    passed: bool
    detail: str


CHECK_NAMES = ("(i) mean", "(ii) integrability", "(iii) laplace", "(iv) distance", "(v) portfolio", "(vi) q_min")


def _nonincreasing(vals):
    return all(b <= a for a, b in zip(vals[:-1], vals[1:]))


def check_convergence(report: RobustnessReport, criteria: ToleranceSpec | None = None) -> dict:
    """Pass/fail per check, keyed by the names in :data:`CHECK_NAMES`.

    (i) final mean error within ``tol_mean`` and the last three errors
    nonincreasing; (ii) final ``|s_hat_n - s_hat|`` within ``tol_in``;
    (iii) every probe's final Laplace error within ``tol_lap``; (iv) final
    TV and Kolmogorov distances within ``tol_dist``; (v) final portfolio
    error within ``tol_port``; (vi) final ``|q_min_n - q_min|`` within
    ``tol_qmin``. Portfolio checks use the last regular step.
    """
    tol = criteria or ToleranceSpec()
    recs = report.records
    if not recs:
        raise ValueError("empty report")
    last = recs[-1]
    out = {}

    errs = [r.mean_err for r in recs]
    tail = errs[-3:]
    ok = errs[-1] <= tol.tol_mean and _nonincreasing(tail)
    out[CHECK_NAMES[0]] = CheckResult(ok, f"final={errs[-1]:.3g} tol={tol.tol_mean:.3g} last3_monotone={_nonincreasing(tail)}")

    out[CHECK_NAMES[1]] = CheckResult(
        last.s_hat_err <= tol.tol_in, f"final={last.s_hat_err:.3g} tol={tol.tol_in:.3g}"
    )

    worst = max(last.probe_err) if last.probe_err else 0.0
    out[CHECK_NAMES[2]] = CheckResult(
        worst <= tol.tol_lap,
        f"final_max={worst:.3g} tol={tol.tol_lap:.3g} probes={list(report.probe_points)}",
    )

    out[CHECK_NAMES[3]] = CheckResult(
        last.d_tv <= tol.tol_dist and last.d_kol <= tol.tol_dist,
        f"tv={last.d_tv:.3g} kol={last.d_kol:.3g} tol={tol.tol_dist:.3g}",
    )

    regular = [r for r in recs if r.regular]
    if regular:
        fin = regular[-1]
        out[CHECK_NAMES[4]] = CheckResult(fin.x_err <= tol.tol_port, f"final={fin.x_err:.3g} tol={tol.tol_port:.3g} step={fin.n}")
        out[CHECK_NAMES[5]] = CheckResult(fin.q_err <= tol.tol_qmin, f"final={fin.q_err:.3g} tol={tol.tol_qmin:.3g} step={fin.n}")
    else:
        out[CHECK_NAMES[4]] = CheckResult(False, "no regular step")
        out[CHECK_NAMES[5]] = CheckResult(False, "no regular step")
    object.__setattr__(report, "summary", out)
    return out


def failed_checks(summary: dict) -> list[str]:
    return [name for name, res in summary.items() if not res.passed]


# ---------------------------------------------------------------------------
# Thorin-side diagnostic


def partial_mean_diagnostic(laws: Sequence[MixingLaw], true_law: MixingLaw, delta: float):
    """``(g_n(delta) per step, g(delta))`` with ``g(delta) = int_0^delta nu(dt) / t``.

    Raises
    ------
    UnsupportedLawError
        For GIG laws, whose Thorin measure is not available in closed form.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    for law in (*laws, true_law):
        if isinstance(law, Gig):
            raise UnsupportedLawError("partial_mean_diagnostic needs explicit Thorin measures")
    return [thorin_partial_mean(law, delta) for law in laws], thorin_partial_mean(true_law, delta)


__all__ = [
    "CHECK_NAMES",
    "CheckResult",
    "IrregularModelError",
    "LAW_PATH_KINDS",
    "LawPath",
    "PerturbationSchedule",
    "RobustnessReport",
    "ScheduleError",
    "StepRecord",
    "ToleranceSpec",
    "adversarial_schedule",
    "check_convergence",
    "default_probes",
    "failed_checks",
    "law_at",
    "make_schedule",
    "partial_mean_diagnostic",
    "run_sweep",
]
