"""Random variates for mixing laws and NMVM returns, plus Monte-Carlo oracles.

Reproducibility contract: a given ``(law, n, seed)`` always yields the same
values, however the work is split. Gamma and normal variates come from
independent PCG64 streams, one per block of ``BLOCK`` consecutive draw
indices, spawned from ``SeedSequence(seed)``. GIG variates use a stateless
counter generator keyed by ``(seed, draw index, attempt)``, so every draw
owns its stream.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import optimize

from . import _kernels
from .mixing import (
    Gig,
    MixingLaw,
    as_gamma_convolution,
    describe,
    law_from_dict,
    law_to_dict,
)
from .models import MarketSpec, NmvmModel
from .specfun import log_bessel_k

BLOCK = 1 << 16

_TAG_GAMMA = 1
_TAG_GIG = 2
_TAG_NORMAL = 3

MIN_ACCEPTANCE = 0.1


@dataclass(frozen=True, eq=False)
class SampleBatch:
    values: np.ndarray
    seed: int
    law_descriptor: dict
    acceptance_rate: float | None = None

    def __len__(self):
        return self.values.size


def _seed_sequence(seed: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=key)


def _block_rng(seed: int, tag: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(_seed_sequence(seed, tag, block)))


def _blocks(n: int):
    return [(start, min(BLOCK, n - start)) for start in range(0, n, BLOCK)]


def _run_blocks(fn, n: int, workers: int):
    blocks = _blocks(n)
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: fn(*b), blocks))
    else:
        parts = [fn(*b) for b in blocks]
    return parts


# ---------------------------------------------------------------------------
# GIG rejection envelope


@dataclass(frozen=True)
class GigEnvelope:
    """Three-piece envelope for the log-concave density of ``log Z``.

    A flat piece on ``[t_left, t_right]`` (where the log density is within 1
    of its peak) and exponential tails tangent at both ends.
    """

    t_left: float
    t_right: float
    slope_left: float
    slope_right: float
    g_mode: float
    g_left: float
    g_right: float
    p_mid: float
    p_left: float
    acceptance_rate: float

    def as_tuple(self):
        return (
            self.t_left, self.t_right, self.slope_left, self.slope_right,
            self.g_mode, self.g_left, self.g_right, self.p_mid, self.p_left,
        )


def gig_envelope(law: Gig) -> GigEnvelope:
    lam, a, b = law.lam, law.a, law.b
    a2h, b2h = 0.5 * a * a, 0.5 * b * b

    def g(t):
        return lam * t - a2h * math.exp(-t) - b2h * math.exp(t)

    def dg(t):
        return lam + a2h * math.exp(-t) - b2h * math.exp(t)

    m = math.log((lam + math.hypot(lam, a * b)) / (b * b))
    gm = g(m)

    def drop(direction):
        step = 1.0
        while g(m + direction * step) > gm - 1.0:
            step *= 2.0
        return optimize.brentq(lambda t: g(t) - (gm - 1.0), *sorted((m, m + direction * step)), xtol=1e-14)

    tl, tr = drop(-1.0), drop(1.0)
    sl, sr = dg(tl), dg(tr)
    w_mid = tr - tl
    w_left = math.exp(-1.0) / sl
    w_right = math.exp(-1.0) / -sr
    total = w_mid + w_left + w_right
    log_mass = math.log(2.0) + lam * (math.log(a) - math.log(b)) + log_bessel_k(lam, a * b)
    rate = math.exp(log_mass - gm) / total
    if rate < MIN_ACCEPTANCE:
        raise RuntimeError(f"GIG envelope acceptance {rate:.3f} below floor {MIN_ACCEPTANCE}")
    return GigEnvelope(tl, tr, sl, sr, gm, g(tl), g(tr), w_mid / total, w_left / total, rate)


def _gig_key(seed: int) -> int:
    return int(_seed_sequence(seed, _TAG_GIG).generate_state(1, np.uint64)[0])


# ---------------------------------------------------------------------------
# public samplers


def sample_mixing(law: MixingLaw, n: int, seed: int, workers: int = 1) -> SampleBatch:
    """Draw ``n`` i.i.d. variates from ``law``.

    Atomic GGCs are sampled as ``tau + sum_i Gamma(w_i, scale 1/t_i)``, which
    is the Wiener-Gamma integral evaluated exactly for an atomic Thorin
    measure. GIG uses rejection on ``log Z``; the envelope's theoretical
    acceptance rate is stored on the batch.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(law, Gig):
        env = gig_envelope(law)
        key = _gig_key(seed)

        def draw(start, m):
            t, _ = _kernels.gig_log_rejection(key, start, m, law.lam, law.a, law.b, env.as_tuple())
            return np.exp(t)

        values = np.concatenate(_run_blocks(draw, n, workers))
        return SampleBatch(values, seed, law_to_dict(law), env.acceptance_rate)

    conv = as_gamma_convolution(law)

    def draw(start, m):
        rng = _block_rng(seed, _TAG_GAMMA, start // BLOCK)
        out = np.full(m, conv.tau)
        for alpha, beta in conv.components:
            out += rng.gamma(alpha, beta, size=m)
        return out

    values = np.concatenate(_run_blocks(draw, n, workers))
    return SampleBatch(values, seed, law_to_dict(law))


def sample_nmvm(model: NmvmModel, n: int, seed: int, workers: int = 1) -> np.ndarray:
    """Draw ``n`` return vectors ``mu + gamma Z + sqrt(Z) A N`` as an ``(n, d)`` array."""
    z = sample_mixing(model.law, n, seed, workers).values
    d = model.dim

    def draw(start, m):
        return _block_rng(seed, _TAG_NORMAL, start // BLOCK).standard_normal((m, d))

    normals = np.concatenate(_run_blocks(draw, n, workers))
    return model.mu + np.outer(z, model.gamma_vec) + np.sqrt(z)[:, None] * (normals @ model.a_matrix.T)


class MCEstimate(NamedTuple):
    estimate: float
    stderr: float


def _utility_estimates(returns, market: MarketSpec, xs: np.ndarray):
    excess = returns - market.r_f
    riskless = market.w0 * (1.0 + market.r_f)
    est = np.empty(len(xs))
    se = np.empty(len(xs))
    n = returns.shape[0]
    for i, x in enumerate(xs):
        wealth = riskless + market.w0 * (excess @ x)
        u = -np.exp(-market.a * wealth)
        # shift by the first draw so a constant sample averages exactly
        est[i] = u[0] + np.mean(u - u[0])
        se[i] = np.std(u, ddof=1) / math.sqrt(n) if n > 1 else math.inf
    return est, se


def mc_expected_utility(
    model: NmvmModel, market: MarketSpec, x, n: int, seed: int, workers: int = 1
):
    """Monte-Carlo estimate of ``E[-exp(-a W(x))]`` with its standard error.

    ``x`` may be a single portfolio ``(d,)`` or a stack ``(k, d)``; a stack is
    evaluated on one common set of return draws and returns arrays.
    """
    if n < 1000:
        raise ValueError("mc_expected_utility needs n >= 1000")
    x = np.asarray(x, dtype=float)
    xs = np.atleast_2d(x)
    returns = sample_nmvm(model, n, seed, workers)
    with np.errstate(over="ignore", invalid="ignore"):
        est, se = _utility_estimates(returns, market, xs)
    if x.ndim == 1:
        return MCEstimate(float(est[0]), float(se[0]))
    return MCEstimate(est, se)


def mc_growth_diagnostic(model, market, x, sizes=(10**3, 10**4, 10**5, 10**6), seed=0):
    """Estimates and standard errors at increasing sample sizes.

    For a portfolio whose expected utility is ``-inf`` the estimates keep
    drifting downward and the standard error fails to shrink like ``n^-1/2``.
    """
    returns = sample_nmvm(model, max(sizes), seed)
    rows = []
    for n in sizes:
        with np.errstate(over="ignore", invalid="ignore"):
            est, se = _utility_estimates(returns[:n], market, np.atleast_2d(x))
        rows.append((n, float(est[0]), float(se[0])))
    return rows


# ---------------------------------------------------------------------------
# batch files


def format_batch(batch: SampleBatch) -> str:
    """One value per line under a ``#`` header naming law, seed and size."""
    lines = [
        f"# law: {json.dumps(batch.law_descriptor, sort_keys=True)}",
        f"# seed: {batch.seed}",
        f"# n: {batch.values.size}",
        "value",
        *(repr(float(v)) for v in batch.values),
    ]
    return "\n".join(lines) + "\n"


def export_batch(batch: SampleBatch, path) -> None:
    """Write :func:`format_batch` output atomically (temp file + rename)."""
    path = os.fspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)), suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(format_batch(batch))
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def read_batch(path) -> SampleBatch:
    header = {}
    values = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].partition(":")
                header[key.strip()] = val.strip()
            elif line.strip() and line.strip() != "value":
                values.append(float(line))
    law = json.loads(header["law"])
    law_from_dict(law)  # validates
    return SampleBatch(np.array(values), int(header["seed"]), law)


def batch_summary(batch: SampleBatch) -> str:
    law = law_from_dict(batch.law_descriptor)
    return f"sample law={describe(law)} n={batch.values.size} seed={batch.seed} mean={batch.values.mean()!r}"


__all__ = [
    "BLOCK",
    "GigEnvelope",
    "MCEstimate",
    "SampleBatch",
    "batch_summary",
    "export_batch",
    "format_batch",
    "gig_envelope",
    "mc_expected_utility",
    "mc_growth_diagnostic",
    "read_batch",
    "sample_mixing",
    "sample_nmvm",
]
