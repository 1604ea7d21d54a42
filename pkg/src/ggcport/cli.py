"""Command-line front end: ``ggcport --config run.toml [--seed N] [--out PATH] [--format csv|text]``.

The config document names the command and carries every model input::

    command = "optimize"
    seed = 0

    [output]
    path = "x_star.csv"
    format = "csv"

    [market]
    r_f = 0.01

    [model]
    mu = [0.05, 0.08]
    gamma = [0.1, -0.05]
    a_matrix = [[0.2, 0.05], [0.05, 0.3]]

    [law]
    kind = "gig"
    lambda = 1.0
    a = 1.0
    b = 2.0

Exit status is 0 on success, 1 on domain errors and 2 on config errors.
Results are written atomically; stdout receives one ``key=value`` summary
line and diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile
from typing import Annotated, Literal, Optional, Union

import numpy as np
import tomli_w
from pydantic import BaseModel, ConfigDict, Field, ValidationError

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import distances, mixing, portfolio, robustness, sampling
from .models import MarketSpec, ModelError, NmvmModel, check_spd

COMMANDS = ("laplace", "mean", "density", "distance", "optimize", "sweep", "sample")
LAW_KINDS = ("gamma_convolution", "gig", "atomic_ggc")

EXIT_OK, EXIT_DOMAIN, EXIT_CONFIG = 0, 1, 2

PositiveFloat = Annotated[float, Field(gt=0, allow_inf_nan=False)]
FiniteFloat = Annotated[float, Field(allow_inf_nan=False)]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ComponentConfig(_Section):
    alpha: PositiveFloat
    beta: PositiveFloat


class AtomConfig(_Section):
    location: PositiveFloat
    weight: PositiveFloat


class GammaConvolutionConfig(_Section):
    kind: Literal["gamma_convolution"]
    tau: Annotated[float, Field(ge=0, allow_inf_nan=False)] = 0.0
    components: list[ComponentConfig] = Field(min_length=1)


class AtomicGgcConfig(_Section):
    kind: Literal["atomic_ggc"]
    tau: Annotated[float, Field(ge=0, allow_inf_nan=False)] = 0.0
    atoms: list[AtomConfig] = Field(min_length=1)


class GigConfig(_Section):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)
    kind: Literal["gig"]
    lam: FiniteFloat = Field(alias="lambda")
    a: PositiveFloat
    b: PositiveFloat


LawConfig = Annotated[
    Union[GammaConvolutionConfig, AtomicGgcConfig, GigConfig], Field(discriminator="kind")
]


class MarketConfig(_Section):
    r_f: FiniteFloat
    a: PositiveFloat = 1.0
    w0: PositiveFloat = 1.0


class ModelConfig(_Section):
    mu: list[FiniteFloat] = Field(min_length=1)
    gamma: list[FiniteFloat] = Field(min_length=1)
    a_matrix: list[list[FiniteFloat]] = Field(min_length=1)


class LawPathConfig(_Section):
    kind: Literal["scale_drift", "shape_drift", "drift_shift", "gig_path"]
    coefficients: list[FiniteFloat] = Field(min_length=1)


class ScheduleConfig(_Section):
    steps: int = Field(12, ge=1)
    decay: Annotated[float, Field(gt=0, lt=1)] = 0.5
    seed: int = 0
    dmu: Optional[list[FiniteFloat]] = None
    dgamma: Optional[list[FiniteFloat]] = None
    dA: Optional[list[list[FiniteFloat]]] = None
    law_path: list[LawPathConfig] = Field(default_factory=list)


class TolerancesConfig(_Section):
    tol_mean: PositiveFloat = robustness.ToleranceSpec.tol_mean
    tol_in: PositiveFloat = robustness.ToleranceSpec.tol_in
    tol_lap: PositiveFloat = robustness.ToleranceSpec.tol_lap
    tol_dist: PositiveFloat = robustness.ToleranceSpec.tol_dist
    tol_port: PositiveFloat = robustness.ToleranceSpec.tol_port
    tol_qmin: PositiveFloat = robustness.ToleranceSpec.tol_qmin


class QueryConfig(_Section):
    s: list[FiniteFloat] = Field(default_factory=list)
    x: list[FiniteFloat] = Field(default_factory=list)
    n: int = Field(1000, ge=1)
    grid_points: int = Field(4097, ge=3)


class OutputConfig(_Section):
    path: Optional[str] = None
    format: Literal["csv", "text"] = "csv"


class RunConfig(_Section):
    command: Literal[COMMANDS]
    seed: int = 0
    output: OutputConfig = Field(default_factory=OutputConfig)
    market: Optional[MarketConfig] = None
    model: Optional[ModelConfig] = None
    law: Optional[LawConfig] = None
    other_law: Optional[LawConfig] = None
    schedule: Optional[ScheduleConfig] = None
    tolerances: TolerancesConfig = Field(default_factory=TolerancesConfig)
    query: QueryConfig = Field(default_factory=QueryConfig)


REQUIRED_SECTIONS = {
    "laplace": ("law",),
    "mean": ("law",),
    "density": ("law",),
    "distance": ("law", "other_law"),
    "optimize": ("market", "model", "law"),
    "sweep": ("market", "model", "law", "schedule"),
    "sample": ("law",),
}


class ConfigError(ValueError):
    """Config document is malformed or invalid; ``errors`` lists every problem."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def _loc_path(loc) -> str:
    parts = []
    for i, item in enumerate(loc):
        if isinstance(item, int):
            parts.append(f"[{item}]")
            continue
        # drop the union tag pydantic inserts after a discriminated field
        if item in LAW_KINDS and i > 0 and loc[i - 1] in ("law", "other_law"):
            continue
        if item == "lam":
            item = "lambda"
        parts.append(("." if parts else "") + str(item))
    return "".join(parts)


def _semantic_errors(cfg: RunConfig) -> list[str]:
    errors = []
    for section in REQUIRED_SECTIONS[cfg.command]:
        if getattr(cfg, section) is None:
            errors.append(f"{section}: section required by command {cfg.command!r}")
    if cfg.model is not None:
        d = len(cfg.model.mu)
        if len(cfg.model.gamma) != d:
            errors.append(f"model.gamma: length {len(cfg.model.gamma)} does not match mu length {d}")
        rows = cfg.model.a_matrix
        if len(rows) != d or any(len(r) != d for r in rows):
            errors.append(f"model.a_matrix: expected a {d}x{d} matrix")
        else:
            try:
                check_spd(np.array(rows))
            except ModelError as exc:
                errors.append(f"model.a_matrix: {exc}")
        if cfg.schedule is not None:
            for key in ("dmu", "dgamma"):
                val = getattr(cfg.schedule, key)
                if val is not None and len(val) != d:
                    errors.append(f"schedule.{key}: length {len(val)} does not match mu length {d}")
            if cfg.schedule.dA is not None:
                da = cfg.schedule.dA
                if len(da) != d or any(len(r) != d for r in da):
                    errors.append(f"schedule.dA: expected a {d}x{d} matrix")
    if cfg.command == "laplace" and not cfg.query.s:
        errors.append("query.s: laplace needs at least one argument")
    if cfg.command == "density" and not cfg.query.x:
        errors.append("query.x: density needs at least one point")
    return errors


def parse_config(document: str) -> RunConfig:
    """Parse and validate a TOML run config.

    Raises
    ------
    ConfigError
        Carrying every syntax or validation problem found, with field paths
        such as ``law.components[0].alpha``.
    """
    try:
        raw = tomllib.loads(document)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"syntax error: {exc}"]) from None
    try:
        cfg = RunConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(
            [f"{_loc_path(e['loc']) or '<root>'}: {e['msg']}" for e in exc.errors()]
        ) from None
    errors = _semantic_errors(cfg)
    if errors:
        raise ConfigError(errors)
    return cfg


def serialize(cfg: RunConfig) -> str:
    """Canonical TOML text; ``serialize(parse_config(doc))`` is a fixed point."""
    doc = cfg.model_dump(by_alias=True, exclude_none=True)
    return tomli_w.dumps(doc)


# ---------------------------------------------------------------------------
# conversions to domain objects


def law_of(section) -> mixing.MixingLaw:
    return mixing.law_from_dict(section.model_dump(by_alias=True))


def model_of(cfg: RunConfig) -> NmvmModel:
    m = cfg.model
    return NmvmModel(m.mu, m.gamma, m.a_matrix, law_of(cfg.law))


def market_of(cfg: RunConfig) -> MarketSpec:
    return MarketSpec(cfg.market.r_f, cfg.market.a, cfg.market.w0)


def schedule_of(cfg: RunConfig) -> robustness.PerturbationSchedule:
    s = cfg.schedule
    return robustness.PerturbationSchedule(
        steps=s.steps, decay=s.decay, dmu=s.dmu, dgamma=s.dgamma, dA=s.dA,
        law_path=tuple(robustness.LawPath(p.kind, tuple(p.coefficients)) for p in s.law_path),
        seed=s.seed,
    )


# ---------------------------------------------------------------------------
# command handlers: each returns (document text, summary fields)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return f"{float(v):.17g}"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _text(record: dict) -> str:
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in record.items())


def _table(header, rows, fmt) -> str:
    if fmt == "csv":
        return _csv(header, rows)
    return "".join(" ".join(_fmt(v) for v in row) + "\n" for row in [header, *rows])


def _record(record: dict, fmt) -> str:
    return _csv(list(record), [list(record.values())]) if fmt == "csv" else _text(record)


def _cmd_laplace(cfg, fmt):
    law = law_of(cfg.law)
    vals = [mixing.laplace(law, s) for s in cfg.query.s]
    return _table(["s", "laplace"], zip(cfg.query.s, vals), fmt), {"n": len(vals)}


def _cmd_mean(cfg, fmt):
    law = law_of(cfg.law)
    rec = {
        "law": mixing.describe(law),
        "mean": mixing.mean(law),
        "variance": mixing.variance(law),
        "s_hat": mixing.integrability_number(law),
    }
    return _record(rec, fmt), {"mean": rec["mean"]}


def _cmd_density(cfg, fmt):
    law = law_of(cfg.law)
    x = np.array(cfg.query.x)
    pdf, cdf = mixing.exact_pdf(law, x), mixing.exact_cdf(law, x)
    return _table(["x", "pdf", "cdf"], zip(x, pdf, cdf), fmt), {"n": x.size}


def _cmd_distance(cfg, fmt):
    grid = mixing.DensityGridSpec(cfg.query.grid_points)
    rep = distances.distance_report(law_of(cfg.law), law_of(cfg.other_law), grid)
    rec = rep.to_record()
    return _record(rec, fmt), {"d_tv": rep.total_variation, "d_kol": rep.kolmogorov}


def _cmd_optimize(cfg, fmt):
    sol = portfolio.optimal_portfolio(model_of(cfg), market_of(cfg))
    rec = sol.to_record()
    return _record(rec, fmt), {"q_min": sol.q_min, "regular": sol.regular}


def _cmd_sweep(cfg, fmt):
    model = model_of(cfg)
    models = robustness.make_schedule(model, schedule_of(cfg))
    rep = robustness.run_sweep(model, market_of(cfg), models)
    tol = robustness.ToleranceSpec(**cfg.tolerances.model_dump())
    summary = robustness.check_convergence(rep, tol)
    failed = robustness.failed_checks(summary)
    text = rep.to_csv() if fmt == "csv" else rep.to_text()
    return text, {"steps": rep.steps, "failed": "|".join(failed) or "none"}


def _cmd_sample(cfg, fmt):
    batch = sampling.sample_mixing(law_of(cfg.law), cfg.query.n, cfg.seed)
    text = sampling.format_batch(batch) if fmt == "csv" else sampling.batch_summary(batch) + "\n"
    return text, {"n": len(batch), "mean": float(batch.values.mean())}


HANDLERS = {
    "laplace": _cmd_laplace,
    "mean": _cmd_mean,
    "density": _cmd_density,
    "distance": _cmd_distance,
    "optimize": _cmd_optimize,
    "sweep": _cmd_sweep,
    "sample": _cmd_sample,
}


def write_atomic(path, text: str) -> None:
    path = os.fspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


DOMAIN_ERRORS = (
    ValueError,
    ArithmeticError,
    TypeError,
    RuntimeError,
)


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """Execute ``cfg``; returns the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if not cfg.output.path:
        print("config error: output.path: required (set it or pass --out)", file=stderr)
        return EXIT_CONFIG
    try:
        text, fields = HANDLERS[cfg.command](cfg, cfg.output.format)
    except DOMAIN_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_DOMAIN
    write_atomic(cfg.output.path, text)
    summary = " ".join(f"{k}={_fmt(v)}" for k, v in fields.items())
    print(f"status=ok command={cfg.command} out={cfg.output.path} {summary}".rstrip(), file=stdout)
    return EXIT_OK


def _parser():
    p = argparse.ArgumentParser(prog="ggcport", description=__doc__.splitlines()[0])
    p.add_argument("--config", required=True, metavar="PATH")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--format", choices=("csv", "text"))
    return p


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        with open(args.config, encoding="utf-8") as fh:
            document = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = parse_config(document)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None or args.format is not None:
        out = cfg.output.model_copy(update={
            k: v for k, v in (("path", args.out), ("format", args.format)) if v is not None
        })
        overrides["output"] = out
    if overrides:
        cfg = cfg.model_copy(update=overrides)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
