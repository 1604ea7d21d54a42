import math
import warnings

import numpy as np
import pytest

from ggcport.specfun import BesselOverflowWarning, DomainError, bessel_k, bessel_k_ratio, log_bessel_k, log_gamma

from .oracles import bessel_k_quad


@pytest.mark.parametrize("x, want", [(1.0, 0.0), (5.0, math.log(24.0)), (0.5, 0.5 * math.log(math.pi))])
def test_log_gamma_known_values(x, want):
    assert log_gamma(x) == pytest.approx(want, rel=1e-14, abs=1e-15)


def test_log_gamma_recurrence(rng):
    xs = 10 ** rng.uniform(-3, 3, 200)
    for x in xs:
        lhs = log_gamma(x + 1.0)
        rhs = log_gamma(x) + math.log(x)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("x", [0.0, -1.0, float("nan")])
def test_log_gamma_domain(x):
    with pytest.raises(DomainError):
        log_gamma(x)


def test_bessel_half_order_closed_form():
    assert bessel_k(0.5, 2.0) == pytest.approx(math.sqrt(math.pi / 4) * math.exp(-2.0), rel=1e-14)


def test_bessel_symmetry(rng):
    for _ in range(100):
        lam, x = rng.uniform(-10, 10), 10 ** rng.uniform(-3, math.log10(50))
        assert bessel_k(lam, x) == pytest.approx(bessel_k(-lam, x), rel=1e-12)
    assert bessel_k(-3.2, 1.7) == bessel_k(3.2, 1.7)


@pytest.mark.parametrize("order, x", [(1.0, 1.0), (0.0, 0.3), (2.5, 7.0), (-4.0, 0.05), (9.0, 40.0)])
def test_bessel_against_integral_representation(order, x):
    assert bessel_k(order, x) == pytest.approx(bessel_k_quad(order, x), rel=1e-10)


def test_bessel_recurrence():
    # non-negative orders: for lam < 0 the identity cancels catastrophically
    for lam in np.linspace(0, 8, 17):
        for x in np.geomspace(1e-2, 40, 25):
            lhs = bessel_k(lam + 1, x)
            rhs = bessel_k(lam - 1, x) + 2 * lam / x * bessel_k(lam, x)
            assert lhs == pytest.approx(rhs, rel=1e-9)


def test_log_bessel_finite_where_k_overflows():
    lk = log_bessel_k(80.0, 1e-3)
    assert math.isfinite(lk) and lk > 709.78
    # small-argument asymptote K_v(x) ~ Gamma(v)/2 (2/x)^v
    assert lk == pytest.approx(math.lgamma(80.0) - math.log(2) + 80 * math.log(2e3), rel=1e-6)


def test_bessel_overflow_saturates_with_warning():
    with pytest.warns(BesselOverflowWarning):
        val = bessel_k(80.0, 1e-3)
    assert val == np.finfo(float).max


def test_bessel_no_warning_in_range():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        bessel_k(10.0, 1e-3)


@pytest.mark.parametrize("x", [0.0, -2.0])
def test_bessel_domain(x):
    with pytest.raises(DomainError):
        bessel_k(1.0, x)


def test_bessel_ratio():
    assert bessel_k_ratio(1.5, 0.5, 2.0) == pytest.approx(bessel_k(1.5, 2.0) / bessel_k(0.5, 2.0), rel=1e-13)
    # K_{3/2}(x)/K_{1/2}(x) = 1 + 1/x
    assert bessel_k_ratio(1.5, 0.5, 2.0) == pytest.approx(1.5, rel=1e-13)
