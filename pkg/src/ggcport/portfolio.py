"""Exponential-utility optimal portfolio for NMVM returns.

With ``Sigma = A A^T`` and excess location ``m = mu - 1 r_f``::

    cal_a = g' Sigma^-1 g,   cal_b = g' Sigma^-1 m,   cal_c = m' Sigma^-1 m
    Q(theta) = exp(cal_c theta) L_Z(cal_a / 2 - theta^2 cal_c / 2)
    x* = (Sigma^-1 g - q_min Sigma^-1 m) / (a W0)

where ``q_min`` minimises Q over ``(-theta_hat, 0)`` and
``theta_hat = sqrt((cal_a - 2 s_hat) / cal_c)``. Along the curve
``x(theta)`` the expected utility equals ``-exp(-a W0 (1 + r_f) - cal_b) Q(theta)``,
so minimising Q is maximising utility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import linalg

from .mixing import MixingLaw, integrability_number, laplace_diverges_at_s_hat, log_laplace
from .models import MarketSpec, NmvmModel

INF = math.inf
_GOLDEN = 0.5 * (3.0 - math.sqrt(5.0))


class SingularSigmaError(ArithmeticError):
    """``Sigma = A A^T`` could not be factorised."""


class ZeroExcessReturnError(ValueError):
    """``mu - 1 r_f = 0``, so cal_c vanishes and Q is undefined."""


class BoundaryAttractionError(ArithmeticError):
    """The minimiser of Q runs into ``-theta_hat``: the solution is irregular."""

    def __init__(self, message, q_min, q_value, iterations, bracket):
        super().__init__(message)
        self.q_min = q_min
        self.q_value = q_value
        self.iterations = iterations
        self.bracket = bracket


@dataclass(frozen=True)
class ModelConstants:
    cal_a: float
    cal_b: float
    cal_c: float
    s_hat: float
    theta_hat: float
    sigma_inv_gamma: np.ndarray = field(repr=False)
    sigma_inv_excess: np.ndarray = field(repr=False)


def _solve_factor(sigma):
    try:
        factor = linalg.cho_factor(sigma, lower=True, check_finite=True)
    except linalg.LinAlgError:
        raise SingularSigmaError("Sigma = A A^T is not positive definite") from None
    diag = np.abs(np.diag(factor[0]))
    if diag.min() <= 1e-14 * diag.max():
        raise SingularSigmaError("Sigma = A A^T is numerically singular")
    return factor


def model_constants(model: NmvmModel, market: MarketSpec) -> ModelConstants:
    sigma = model.sigma
    factor = _solve_factor(sigma)
    excess = model.mu - market.r_f
    if not np.any(excess):
        raise ZeroExcessReturnError("mu - 1 r_f must be non-zero")
    y_g = linalg.cho_solve(factor, model.gamma_vec)
    y_m = linalg.cho_solve(factor, excess)
    cal_a = float(model.gamma_vec @ y_g)
    cal_b = float(model.gamma_vec @ y_m)
    cal_c = float(excess @ y_m)
    s_hat = integrability_number(model.law)
    theta_hat = math.sqrt((cal_a - 2.0 * s_hat) / cal_c)
    return ModelConstants(cal_a, cal_b, cal_c, s_hat, theta_hat, y_g, y_m)


def laplace_argument(constants: ModelConstants, theta: float) -> float:
    return 0.5 * constants.cal_a - 0.5 * theta * theta * constants.cal_c


def log_q(constants: ModelConstants, law: MixingLaw, theta: float) -> float:
    ll = log_laplace(law, laplace_argument(constants, theta))
    return INF if ll == INF else constants.cal_c * theta + ll


def q_objective(constants: ModelConstants, law: MixingLaw, theta: float) -> float:
    """``Q(theta)``; ``math.inf`` where the Laplace transform diverges."""
    lq = log_q(constants, law, theta)
    return INF if lq == INF or lq > 709.78 else math.exp(lq)


class QMinimum(NamedTuple):
    q_min: float
    q_value: float
    iterations: int
    bracket: tuple


def _brent(f, lo, hi, tol, max_iter=500):
    """Golden-section search with parabolic steps (Brent) on ``[lo, hi]``."""
    a, b = lo, hi
    x = w = v = a + _GOLDEN * (b - a)
    fx = fw = fv = f(x)
    d = e = 0.0
    for it in range(1, max_iter + 1):
        m = 0.5 * (a + b)
        tol1 = tol * 0.5 + 1e-15 * abs(x)
        tol2 = 2.0 * tol1
        if abs(x - m) <= tol2 - 0.5 * (b - a):
            return x, fx, it, (a, b)
        use_golden = True
        if abs(e) > tol1 and math.isfinite(fx) and math.isfinite(fw) and math.isfinite(fv):
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0:
                p = -p
            q = abs(q)
            if abs(p) < abs(0.5 * q * e) and q * (a - x) < p < q * (b - x):
                e, d = d, p / q
                u = x + d
                if u - a < tol2 or b - u < tol2:
                    d = tol1 if m >= x else -tol1
                use_golden = False
        if use_golden:
            e = (a - x) if x >= m else (b - x)
            d = _GOLDEN * e
        u = x + d if abs(d) >= tol1 else x + (tol1 if d > 0 else -tol1)
        fu = f(u)
        if fu <= fx:
            if u >= x:
                a = x
            else:
                b = x
            v, fv, w, fw, x, fx = w, fw, x, fx, u, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, fv, w, fw = w, fw, u, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
    return x, fx, max_iter, (a, b)


def minimize_q(constants: ModelConstants, law: MixingLaw, tol: float = 1e-10) -> QMinimum:
    """Minimise Q over ``(-theta_hat, 0)``.

    Q is strictly convex there, so a derivative-free bracketed search is
    enough; the search runs on ``log Q``, which has the same minimiser.

    Raises
    ------
    BoundaryAttractionError
        If the minimiser sits within ``tol`` of ``-theta_hat`` with Q still
        decreasing towards it (an irregular solution).
    """
    if not constants.theta_hat > 0:
        raise ValueError("empty search interval: theta_hat <= 0")
    lo = -constants.theta_hat * (1.0 - 1e-9)
    hi = -1e-12
    q, lq, iterations, bracket = _brent(lambda t: log_q(constants, law, t), lo, hi, tol)
    q_value = q_objective(constants, law, q)
    if q - lo <= 2.0 * tol:
        edge = log_q(constants, law, lo)
        if edge <= log_q(constants, law, lo + 2.0 * tol):
            raise BoundaryAttractionError(
                f"minimiser attracted to -theta_hat = {-constants.theta_hat:.6g}",
                q, q_value, iterations, bracket,
            )
    return QMinimum(q, q_value, iterations, bracket)


@dataclass(frozen=True, eq=False)
class PortfolioSolution:
    q_min: float
    x_star: np.ndarray
    q_value: float
    regular: bool
    constants: ModelConstants
    diagnostics: dict

    def to_record(self) -> dict:
        rec = {
            "q_min": self.q_min,
            "q_value": self.q_value,
            "regular": self.regular,
            "cal_a": self.constants.cal_a,
            "cal_b": self.constants.cal_b,
            "cal_c": self.constants.cal_c,
            "s_hat": self.constants.s_hat,
            "theta_hat": self.constants.theta_hat,
            "iterations": self.diagnostics.get("iterations"),
        }
        for i, xi in enumerate(self.x_star):
            rec[f"x_{i}"] = float(xi)
        return rec


def portfolio_for_theta(constants: ModelConstants, market: MarketSpec, theta) -> np.ndarray:
    """``x(theta) = (Sigma^-1 g - theta Sigma^-1 m) / (a W0)``; vectorised over ``theta``."""
    theta = np.asarray(theta, dtype=float)
    x = constants.sigma_inv_gamma - theta[..., None] * constants.sigma_inv_excess
    return x / (market.a * market.w0)


def optimal_portfolio(model: NmvmModel, market: MarketSpec, tol: float = 1e-10) -> PortfolioSolution:
    """Regular exponential-utility optimum, or an irregular one flagged ``regular=False``."""
    constants = model_constants(model, market)
    diagnostics = {"tol": tol}
    try:
        q, q_value, iterations, bracket = minimize_q(constants, model.law, tol)
        interior = True
    except BoundaryAttractionError as exc:
        q, q_value, iterations, bracket = exc.q_min, exc.q_value, exc.iterations, exc.bracket
        interior = False
        diagnostics["reason"] = str(exc)
    diagnostics.update(iterations=iterations, bracket=bracket)
    finite = math.isfinite(log_laplace(model.law, laplace_argument(constants, q)))
    regular = interior and finite
    if not regular and "reason" not in diagnostics:
        diagnostics["reason"] = "Laplace transform infinite at the minimiser"
    if not interior and not laplace_diverges_at_s_hat(model.law):
        diagnostics["note"] = "Laplace transform finite at s_hat; Q may attain its minimum on the boundary"
    x_star = portfolio_for_theta(constants, market, q)
    return PortfolioSolution(q, x_star, q_value, regular, constants, diagnostics)


def expected_utility(model: NmvmModel, market: MarketSpec, x) -> float:
    """Closed-form ``E[-exp(-a W(x))]``; ``-inf`` where it diverges.

    Conditioning on Z gives
    ``-exp(-a W0 (1 + r_f) - a W0 x'm) L_Z(a W0 x'g - (a W0)^2 x' Sigma x / 2)``.
    """
    x = np.asarray(x, dtype=float)
    k = market.a * market.w0
    excess = model.mu - market.r_f
    s = k * float(x @ model.gamma_vec) - 0.5 * k * k * float(x @ model.sigma @ x)
    ll = log_laplace(model.law, s)
    if ll == INF:
        return -INF
    expo = -k * (1.0 + market.r_f) - k * float(x @ excess) + ll
    return -math.exp(expo) if expo < 709.78 else -INF
