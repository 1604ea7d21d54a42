"""Generalized gamma convolution (GGC) mixing laws.

Three concrete laws share one functional surface:

* :class:`FiniteGammaConvolution` -- ``tau + sum_i Gamma(alpha_i, scale beta_i)``;
* :class:`AtomicGgc` -- the GGC whose Thorin measure is a finite list of atoms;
* :class:`Gig` -- the generalized inverse Gaussian law.

Finite gamma convolutions and atomic GGCs are the same family written two
ways, related by ``(t_i, w_i) = (1 / beta_i, alpha_i)``.

The integrability number ``s_hat = inf{s : E exp(-s Z) < inf}`` is always
reported with the sign convention ``s_hat <= 0``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy import integrate, optimize, special, stats

from . import _kernels
from .specfun import log_bessel_k

INF = math.inf

# Density magnitude / tail mass at which grids are cut off.
TAIL_DENSITY = 1e-12
TAIL_MASS = 1e-13
# Largest self-reported discretisation error tolerated by density().
MAX_GRID_ERROR = 1e-4
_MAX_SERIES_TERMS = 200_000


class MixingError(ValueError):
    """Invalid mixing-law parameters."""


class UnsupportedLawError(TypeError):
    """Operation needs an explicit Thorin generator (not available for GIG)."""


class PreconditionError(ValueError):
    """Inputs violate the hypothesis of a bound or formula."""


class GridTooCoarseError(ArithmeticError):
    """Discretisation error estimate exceeds the tolerated bound."""


def _positive(name, value):
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise MixingError(f"{name} must be positive and finite, got {value!r}")
    return value


# ---------------------------------------------------------------------------
# law types


@dataclass(frozen=True)
class ThorinPair:
    """Generator ``(tau, nu)`` of a GGC with atomic Thorin measure.

    ``atoms`` is stored canonically: sorted by location, equal locations merged.
    """

    tau: float
    atoms: tuple

    def __init__(self, tau: float = 0.0, atoms: Sequence = ()):
        tau = float(tau)
        if not (tau >= 0 and math.isfinite(tau)):
            raise MixingError(f"tau must be non-negative, got {tau!r}")
        merged: dict[float, float] = {}
        for i, (t, w) in enumerate(atoms):
            t = _positive(f"atoms[{i}].location", t)
            w = _positive(f"atoms[{i}].weight", w)
            merged[t] = merged.get(t, 0.0) + w
        if not merged:
            raise MixingError("a GGC needs at least one atom with positive weight")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "atoms", tuple(sorted(merged.items())))

    @property
    def locations(self) -> np.ndarray:
        return np.array([t for t, _ in self.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms])

    @property
    def total_weight(self) -> float:
        return float(sum(w for _, w in self.atoms))


@dataclass(frozen=True)
class FiniteGammaConvolution:
    """Law of ``tau + sum_i xi_i`` with independent ``xi_i ~ Gamma(alpha_i, scale beta_i)``.

    Components with equal scale are merged (shapes add), so a convolution
    of equal-scale gammas is stored as a single gamma.
    """

    tau: float
    components: tuple

    def __init__(self, components: Sequence, tau: float = 0.0):
        tau = float(tau)
        if not (tau >= 0 and math.isfinite(tau)):
            raise MixingError(f"tau must be non-negative, got {tau!r}")
        merged: dict[float, float] = {}
        for i, (alpha, beta) in enumerate(components):
            alpha = _positive(f"components[{i}].alpha", alpha)
            beta = _positive(f"components[{i}].beta", beta)
            merged[beta] = merged.get(beta, 0.0) + alpha
        if not merged:
            raise MixingError("a gamma convolution needs at least one component")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(
            self, "components", tuple((a, b) for b, a in sorted(merged.items()))
        )

    @property
    def alphas(self) -> np.ndarray:
        return np.array([a for a, _ in self.components])

    @property
    def betas(self) -> np.ndarray:
        return np.array([b for _, b in self.components])


@dataclass(frozen=True)
class AtomicGgc:
    """GGC with Laplace transform ``exp(-tau s - sum_i w_i log(1 + s / t_i))``."""

    generator: ThorinPair

    @property
    def tau(self) -> float:
        return self.generator.tau


@dataclass(frozen=True)
class Gig:
    """Generalized inverse Gaussian law.

    Density ``(b/a)^lam / (2 K_lam(ab)) x^(lam-1) exp(-(a^2/x + b^2 x)/2)``.
    """

    lam: float
    a: float
    b: float

    def __post_init__(self):
        if not math.isfinite(float(self.lam)):
            raise MixingError(f"lambda must be finite, got {self.lam!r}")
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "a", _positive("a", self.a))
        object.__setattr__(self, "b", _positive("b", self.b))

    tau = 0.0


MixingLaw = Union[FiniteGammaConvolution, AtomicGgc, Gig]


def gamma(alpha: float, beta: float, tau: float = 0.0) -> FiniteGammaConvolution:
    """Single Gamma(alpha, scale beta), optionally shifted by ``tau``."""
    return FiniteGammaConvolution([(alpha, beta)], tau=tau)


def atomic(atoms: Sequence, tau: float = 0.0) -> AtomicGgc:
    return AtomicGgc(ThorinPair(tau, atoms))


# ---------------------------------------------------------------------------
# generator conversions


def as_thorin(law: MixingLaw) -> ThorinPair:
    """Exact generator of a gamma convolution or atomic GGC."""
    if isinstance(law, AtomicGgc):
        return law.generator
    if isinstance(law, FiniteGammaConvolution):
        return ThorinPair(law.tau, [(1.0 / b, a) for a, b in law.components])
    raise UnsupportedLawError(
        f"{type(law).__name__} has no closed-form Thorin measure"
    )


def as_gamma_convolution(law: MixingLaw) -> FiniteGammaConvolution:
    """Inverse of :func:`as_thorin`: atoms ``(t, w)`` become ``Gamma(w, 1/t)``."""
    if isinstance(law, FiniteGammaConvolution):
        return law
    gen = as_thorin(law)
    return FiniteGammaConvolution([(w, 1.0 / t) for t, w in gen.atoms], tau=gen.tau)


# ---------------------------------------------------------------------------
# transforms and moments


def _gig_log_laplace(law: Gig, s: float) -> float:
    psi = law.b * law.b + 2.0 * s
    lam, a, b = law.lam, law.a, law.b
    if psi > 0:
        r = math.sqrt(psi)
        return (
            lam * (math.log(b) - math.log(r))
            + log_bessel_k(lam, a * r)
            - log_bessel_k(lam, a * b)
        )
    if psi == 0 and lam < 0:
        # limit of the Bessel ratio as psi -> 0
        return (
            math.log(0.5) + special.gammaln(-lam) + lam * math.log(a * b / 2.0)
            - log_bessel_k(lam, a * b)
        )
    return INF


def log_laplace(law: MixingLaw, s: float) -> float:
    """``ln E exp(-s Z)``; ``+inf`` where the transform diverges."""
    s = float(s)
    if isinstance(law, Gig):
        return _gig_log_laplace(law, s)
    conv = as_gamma_convolution(law)
    if s <= integrability_number(conv):
        return INF
    return float(-conv.tau * s - np.sum(conv.alphas * np.log1p(conv.betas * s)))


def laplace(law: MixingLaw, s):
    """Laplace transform ``E exp(-s Z)``.

    Returns ``math.inf`` (not an exception) where the transform diverges.
    Accepts a scalar or an array of arguments.
    """
    if np.ndim(s):
        return np.array([laplace(law, si) for si in np.ravel(s)]).reshape(np.shape(s))
    ll = log_laplace(law, s)
    return INF if ll == INF else math.exp(ll) if ll < 709.78 else INF


def mean(law: MixingLaw) -> float:
    """Exact mean ``E Z``."""
    if isinstance(law, Gig):
        lk = log_bessel_k(law.lam + 1, law.a * law.b) - log_bessel_k(law.lam, law.a * law.b)
        return law.a / law.b * math.exp(lk)
    gen = as_thorin(law)
    return gen.tau + float(np.sum(gen.weights / gen.locations))


def variance(law: MixingLaw) -> float:
    if isinstance(law, Gig):
        ab = law.a * law.b
        k0 = log_bessel_k(law.lam, ab)
        r1 = math.exp(log_bessel_k(law.lam + 1, ab) - k0)
        r2 = math.exp(log_bessel_k(law.lam + 2, ab) - k0)
        return (law.a / law.b) ** 2 * (r2 - r1 * r1)
    gen = as_thorin(law)
    return float(np.sum(gen.weights / gen.locations**2))


def integrability_number(law: MixingLaw) -> float:
    """``s_hat = inf{s : E exp(-s Z) < inf}`` (non-positive)."""
    if isinstance(law, Gig):
        return -0.5 * law.b * law.b
    if isinstance(law, FiniteGammaConvolution):
        return -1.0 / float(law.betas.max())
    return -float(as_thorin(law).locations.min())


def laplace_diverges_at_s_hat(law: MixingLaw) -> bool:
    """Whether ``E exp(-s_hat Z) = inf``.

    True for every gamma convolution / atomic GGC; for GIG it fails when
    ``lam < 0`` (the inverse Gaussian is the familiar example).
    """
    if isinstance(law, Gig):
        return law.lam >= 0
    return True


def thorin_partial_mean(law: MixingLaw, delta: float) -> float:
    """``g(delta) = int_0^delta nu(dt) / t`` for an explicit generator."""
    gen = as_thorin(law)
    t, w = gen.locations, gen.weights
    return float(np.sum(w[t <= delta] / t[t <= delta]))


def wiener_gamma_h(generator: ThorinPair, s):
    """Integrand ``h(s) = 1 / F_nu^{-1}(s)`` of the Wiener-Gamma representation.

    ``F_nu`` is the cumulative atom weight; ``F_nu^{-1}(s) = inf{t : F_nu(t) >= s}``.
    The result is a non-increasing step function, zero past the total weight.
    """
    if isinstance(generator, (AtomicGgc, FiniteGammaConvolution)):
        generator = as_thorin(generator)
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr <= 0):
        raise ValueError("wiener_gamma_h needs s > 0")
    cum = np.cumsum(generator.weights)
    idx = np.searchsorted(cum, s_arr, side="left")
    loc = generator.locations
    out = np.where(idx < loc.size, 1.0 / loc[np.minimum(idx, loc.size - 1)], 0.0)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# densities


@dataclass(frozen=True)
class DensityGridSpec:
    """Uniform grid on ``[lower, upper]`` with ``n_points`` nodes.

    ``None`` bounds are resolved per law: ``lower`` to the law's left
    extremity, ``upper`` to where density and tail mass are negligible.
    """

    n_points: int = 4097
    lower: float | None = None
    upper: float | None = None

    def __post_init__(self):
        if self.n_points < 3:
            raise ValueError("a density grid needs at least 3 points")


class _GammaSeries:
    """Series representation of a multi-scale gamma convolution (tau removed).

    ``f(y) = C sum_k delta_k y^(rho+k-1) e^(-y/beta_min) / (Gamma(rho+k) beta_min^(rho+k))``
    """

    def __init__(self, conv: FiniteGammaConvolution):
        alphas, betas = conv.alphas, conv.betas
        self.beta_min = float(betas.min())
        self.rho = float(alphas.sum())
        r = 1.0 - self.beta_min / betas
        self.v = float(r.max())
        self.log_c = float(np.sum(alphas * np.log(self.beta_min / betas)))
        self.alphas = alphas
        self.ratios = r / self.v if self.v > 0 else r
        # mass of the majorising negative binomial, C (1 - v)^-rho
        self.log_majorant = self.log_c - self.rho * math.log1p(-self.v)
        self.upper = self._upper_limit()
        z_max = self.v * self.upper / self.beta_min
        k_pdf, self.truncation_pdf = _poisson_cut(z_max, 1e-17)
        k_cdf, tail = _negbin_cut(self.rho, self.v, 1e-16 * math.exp(-self.log_majorant))
        self.truncation_cdf = tail * math.exp(self.log_majorant)
        n_terms = max(k_pdf, k_cdf, 8) + 1
        if n_terms > _MAX_SERIES_TERMS:
            raise GridTooCoarseError(
                f"gamma-convolution series needs {n_terms} terms; scales too spread"
            )
        self.n_terms = n_terms
        self.coeffs = _kernels.moschopoulos_coefficients(self.ratios, alphas, n_terms)

    def _upper_limit(self) -> float:
        # Tail mass of the Moschopoulos majorant is C (1-v)^-rho Q(rho, y (1-v)/beta_min).
        scale = self.beta_min / (1.0 - self.v)
        target = TAIL_MASS * math.exp(-self.log_majorant)
        y = scale * float(special.gammainccinv(self.rho, min(target, 0.5)))
        log_pref = self.log_c - self.rho * math.log(self.beta_min) - special.gammaln(self.rho)

        def log_bound(x):
            return log_pref + (self.rho - 1) * math.log(x) - x / scale

        while log_bound(y) > math.log(TAIL_DENSITY):
            y *= 1.25
        return y

    def pdf(self, y):
        return _kernels.moschopoulos_pdf(
            np.asarray(y, dtype=float), self.coeffs, self.rho, self.beta_min, self.v, self.log_c
        )

    def cdf(self, y):
        return _kernels.moschopoulos_cdf(
            np.asarray(y, dtype=float), self.coeffs, self.rho, self.beta_min, self.v, self.log_c
        )


def _poisson_cut(z, tol):
    """Smallest K with P(Poisson(z) > K) <= tol, and that tail probability."""
    if z <= 0:
        return 0, 0.0
    k = 0
    log_p = -z
    while True:
        # pmf(k + 1) / (1 - z / (k + 2)) bounds the tail once k + 2 > z
        log_next = log_p + math.log(z) - math.log(k + 1)
        if k + 2 > z:
            tail = math.exp(log_next) / (1.0 - z / (k + 2))
            if tail <= tol:
                return k, tail
        log_p = log_next
        k += 1
        if k > _MAX_SERIES_TERMS:
            return k, math.exp(log_next)


def _negbin_cut(rho, v, tol):
    """Smallest K with P(NegBin(rho, 1 - v) > K) <= tol, and that tail probability."""
    if v <= 0:
        return 0, 0.0
    k = 0
    log_p = rho * math.log1p(-v)
    while True:
        log_next = log_p + math.log(v) + math.log((k + rho) / (k + 1))
        ratio = v * (k + 1 + rho) / (k + 2)
        if ratio < 1.0 and k > rho * v / (1.0 - v):
            tail = math.exp(log_next) / (1.0 - ratio)
            if tail <= tol:
                return k, tail
        log_p = log_next
        k += 1
        if k > _MAX_SERIES_TERMS:
            return k, math.exp(log_next)


@functools.lru_cache(maxsize=256)
def _series(conv: FiniteGammaConvolution) -> _GammaSeries:
    return _GammaSeries(conv)


def _gamma_pdf(y, alpha, beta):
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        logf = special.xlogy(alpha - 1.0, y) - y / beta - alpha * math.log(beta) - special.gammaln(alpha)
        out = np.where(y > 0, np.exp(logf), 0.0)
    if alpha == 1.0:
        out = np.where(y == 0, 1.0 / beta, out)
    return out


def _gig_pdf(x, law: Gig):
    x = np.asarray(x, dtype=float)
    lam, a, b = law.lam, law.a, law.b
    log_norm = lam * (math.log(b) - math.log(a)) - math.log(2.0) - log_bessel_k(lam, a * b)
    with np.errstate(divide="ignore", invalid="ignore"):
        xs = np.where(x > 0, x, 1.0)
        logf = log_norm + (lam - 1.0) * np.log(xs) - 0.5 * (a * a / xs + b * b * xs)
    return np.where(x > 0, np.exp(logf), 0.0)


def exact_pdf(law: MixingLaw, x):
    """Pointwise density without grid discretisation (series or closed form)."""
    x = np.asarray(x, dtype=float)
    if isinstance(law, Gig):
        return _gig_pdf(x, law)
    conv = as_gamma_convolution(law)
    y = x - conv.tau
    if len(conv.components) == 1:
        (alpha, beta), = conv.components
        return np.where(y >= 0, _gamma_pdf(np.maximum(y, 0.0), alpha, beta), 0.0) * (
            (y > 0) | (alpha == 1.0)
        )
    return np.where(y > 0, _series(conv).pdf(np.maximum(y, 0.0)), 0.0)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _gl_cell_integrals(f, left, right):
    mid = 0.5 * (left + right)
    half = 0.5 * (right - left)
    pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    return half * (f(pts) @ _GL_WEIGHTS)


def exact_cdf(law: MixingLaw, x):
    """Pointwise CDF. GIG uses adaptive quadrature; the rest are exact series."""
    x = np.asarray(x, dtype=float)
    if isinstance(law, Gig):
        flat = np.ravel(x)
        out = np.empty(flat.size)
        mode = gig_mode(law)
        for i, xi in enumerate(flat):
            if xi <= 0:
                out[i] = 0.0
            elif xi <= mode:
                out[i] = integrate.quad(lambda t: float(_gig_pdf(t, law)), 0.0, xi, epsabs=1e-15, epsrel=1e-12, limit=200)[0]
            else:
                tail = integrate.quad(lambda t: float(_gig_pdf(t, law)), xi, np.inf, epsabs=1e-15, epsrel=1e-12, limit=200)[0]
                out[i] = 1.0 - tail
        return out.reshape(x.shape)
    conv = as_gamma_convolution(law)
    y = x - conv.tau
    if len(conv.components) == 1:
        (alpha, beta), = conv.components
        return np.where(y > 0, special.gammainc(alpha, np.maximum(y, 0.0) / beta), 0.0)
    return np.where(y > 0, _series(conv).cdf(np.maximum(y, 0.0)), 0.0)


def gig_mode(law: Gig) -> float:
    lam, a, b = law.lam, law.a, law.b
    return ((lam - 1.0) + math.sqrt((lam - 1.0) ** 2 + a * a * b * b)) / (b * b)


def support_bounds(law: MixingLaw) -> tuple[float, float]:
    """``(left extremity, x_max)`` with density and tail mass negligible past ``x_max``."""
    if isinstance(law, Gig):
        x = max(gig_mode(law), mean(law)) + 10.0 * math.sqrt(variance(law))
        while True:
            tail = integrate.quad(lambda t: float(_gig_pdf(t, law)), x, np.inf)[0]
            if tail < TAIL_MASS and float(_gig_pdf(x, law)) < TAIL_DENSITY:
                return 0.0, x
            x *= 1.25
    conv = as_gamma_convolution(law)
    if len(conv.components) == 1:
        (alpha, beta), = conv.components
        y = beta * float(special.gammainccinv(alpha, TAIL_MASS))
        while float(_gamma_pdf(y, alpha, beta)) > TAIL_DENSITY:
            y *= 1.25
        return conv.tau, conv.tau + y
    return conv.tau, conv.tau + _series(conv).upper


@dataclass(frozen=True)
class DensityTable:
    """Density and CDF tabulated on a uniform grid."""

    law: object
    x: np.ndarray
    pdf: np.ndarray
    cdf: np.ndarray
    truncation: float

    @property
    def spacing(self) -> float:
        return float(self.x[1] - self.x[0])

    def cdf_at(self, pts):
        """CDF at arbitrary points, refined from the nearest node below."""
        pts = np.asarray(pts, dtype=float)
        if not isinstance(self.law, Gig):
            return exact_cdf(self.law, pts)
        j = np.clip(np.searchsorted(self.x, pts, side="right") - 1, 0, self.x.size - 1)
        base = np.where(pts >= self.x[0], self.cdf[j], 0.0)
        left = np.where(pts >= self.x[0], self.x[j], 0.0)
        extra = _gl_cell_integrals(lambda p: _gig_pdf(p, self.law), np.ravel(left), np.ravel(pts))
        return np.clip(base + extra.reshape(pts.shape), 0.0, 1.0)


def tabulate(law: MixingLaw, grid: DensityGridSpec | np.ndarray | None = None) -> DensityTable:
    """Tabulate density and CDF on a uniform grid (resolved per law if needed)."""
    if isinstance(grid, np.ndarray):
        x = grid
    else:
        grid = grid or DensityGridSpec()
        lo, hi = support_bounds(law)
        lower = lo if grid.lower is None else grid.lower
        upper = hi if grid.upper is None else grid.upper
        x = np.linspace(lower, upper, grid.n_points)
    pdf = exact_pdf(law, x)
    if isinstance(law, Gig):
        cells = _gl_cell_integrals(lambda p: _gig_pdf(p, law), x[:-1], x[1:])
        first = float(exact_cdf(law, x[:1])[0]) if x[0] > 0 else 0.0
        cdf = np.clip(first + np.concatenate([[0.0], np.cumsum(cells)]), 0.0, 1.0)
        trunc = 1e-12
    else:
        cdf = exact_cdf(law, x)
        conv = as_gamma_convolution(law)
        trunc = _series(conv).truncation_cdf if len(conv.components) > 1 else 0.0
    return DensityTable(law, x, pdf, cdf, trunc)


def density(law: MixingLaw, x, grid: DensityGridSpec | None = None):
    """Probability density of ``law`` at ``x``.

    GIG and single gammas use their closed forms. Multi-scale convolutions
    are evaluated from the gamma-series; when ``grid`` is given, the value
    is instead linearly interpolated from the grid tabulation and
    :class:`GridTooCoarseError` is raised if the interpolation error estimate
    (series vs. interpolant at the query points and the midpoints of their
    cells) exceeds ``MAX_GRID_ERROR``.
    """
    x_arr = np.asarray(x, dtype=float)
    conv = None if isinstance(law, Gig) else as_gamma_convolution(law)
    if grid is None or conv is None or len(conv.components) == 1:
        out = exact_pdf(law, x_arr)
        return float(out) if out.ndim == 0 else out
    table = tabulate(law, grid)
    out = np.interp(x_arr, table.x, table.pdf, left=0.0, right=0.0)
    j = np.clip(np.searchsorted(table.x, x_arr, side="right") - 1, 0, table.x.size - 2)
    mids = 0.5 * (table.x[j] + table.x[j + 1])
    err = np.maximum(
        np.abs(exact_pdf(law, mids) - 0.5 * (table.pdf[j] + table.pdf[j + 1])),
        np.abs(exact_pdf(law, x_arr) - out),
    )
    inside = (x_arr >= table.x[0]) & (x_arr <= table.x[-1])
    worst = float(np.max(np.where(inside, err, 0.0)))
    if worst > MAX_GRID_ERROR:
        raise GridTooCoarseError(
            f"interpolation error estimate {worst:.3g} exceeds {MAX_GRID_ERROR:g}"
        )
    return float(out) if out.ndim == 0 else out


def moschopoulos_bound(conv: MixingLaw, x):
    """Upper bound on the density of a drift-free, multi-scale gamma convolution.

    ``g(x) <= C / (beta_m^rho Gamma(rho)) x^(rho-1) exp(-x (1 - v) / beta_m)`` with
    ``beta_m = min beta_i``, ``C = prod (beta_m/beta_i)^alpha_i``,
    ``rho = sum alpha_i`` and ``v = max (1 - beta_m/beta_i)``.
    """
    conv = as_gamma_convolution(conv)
    if conv.tau != 0:
        raise PreconditionError("the bound applies to drift-free convolutions")
    if len(conv.components) < 2:
        raise PreconditionError("the bound needs scales that are not all equal")
    alphas, betas = conv.alphas, conv.betas
    bm = float(betas.min())
    rho = float(alphas.sum())
    log_c = float(np.sum(alphas * np.log(bm / betas)))
    v = float(np.max(1.0 - bm / betas))
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        logb = (
            log_c - rho * math.log(bm) - special.gammaln(rho)
            + special.xlogy(rho - 1.0, x) - x * (1.0 - v) / bm
        )
    out = np.exp(logb)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# serialisation


def law_to_dict(law: MixingLaw) -> dict:
    if isinstance(law, Gig):
        return {"kind": "gig", "lambda": law.lam, "a": law.a, "b": law.b}
    if isinstance(law, FiniteGammaConvolution):
        return {
            "kind": "gamma_convolution",
            "tau": law.tau,
            "components": [{"alpha": a, "beta": b} for a, b in law.components],
        }
    return {
        "kind": "atomic_ggc",
        "tau": law.tau,
        "atoms": [{"location": t, "weight": w} for t, w in law.generator.atoms],
    }


def law_from_dict(doc: dict) -> MixingLaw:
    kind = doc.get("kind")
    if kind == "gig":
        return Gig(doc["lambda"], doc["a"], doc["b"])
    if kind == "gamma_convolution":
        return FiniteGammaConvolution(
            [(c["alpha"], c["beta"]) for c in doc["components"]], tau=doc.get("tau", 0.0)
        )
    if kind == "atomic_ggc":
        return atomic([(c["location"], c["weight"]) for c in doc["atoms"]], tau=doc.get("tau", 0.0))
    raise MixingError(f"unknown law kind {kind!r}")


def describe(law: MixingLaw) -> str:
    """Compact single-line descriptor, e.g. ``gig(lambda=1, a=1, b=2)``."""
    d = law_to_dict(law)
    kind = d.pop("kind")
    parts = []
    for key, val in d.items():
        if isinstance(val, list):
            val = "[" + ";".join(",".join(f"{v!r}" for v in item.values()) for item in val) + "]"
        else:
            val = repr(val)
        parts.append(f"{key}={val}")
    return f"{kind}({', '.join(parts)})"
