"""Compiled and numpy kernels must agree; both are exercised directly."""

import numpy as np
import pytest
from scipy import special

from ggcport import _kernels
from ggcport.mixing import FiniteGammaConvolution, Gig
from ggcport.sampling import gig_envelope

BACKENDS = [pytest.param(_kernels.python, id="python")]
if _kernels.compiled is not None:
    BACKENDS.append(pytest.param(_kernels.compiled, id="cython"))


def _series_inputs(alphas, betas, n_terms=400):
    alphas, betas = np.asarray(alphas, float), np.asarray(betas, float)
    bm = betas.min()
    v = float(np.max(1 - bm / betas))
    ratios = (1 - bm / betas) / v
    log_c = float(np.sum(alphas * np.log(bm / betas)))
    return ratios, alphas, bm, v, log_c, float(alphas.sum()), n_terms


@pytest.mark.parametrize("impl", BACKENDS)
def test_counter_uniform_range_and_determinism(impl):
    idx = np.arange(10_000, dtype=np.uint64)
    u = np.array([impl.counter_uniform(12345, int(i), 0) for i in idx[:2000]])
    assert np.all((u > 0) & (u < 1))
    assert u.mean() == pytest.approx(0.5, abs=0.03)
    assert impl.counter_uniform(12345, 7, 3) == impl.counter_uniform(12345, 7, 3)
    assert impl.counter_uniform(12345, 7, 3) != impl.counter_uniform(12345, 7, 4)


def test_counter_uniform_backends_agree():
    if _kernels.compiled is None:
        pytest.skip("extension not built")
    for i in range(200):
        assert _kernels.compiled.counter_uniform(99, i, i % 5) == _kernels.python.counter_uniform(99, i, i % 5)


@pytest.mark.parametrize("impl", BACKENDS)
def test_series_two_exponentials(impl):
    # Exp(1) + Exp(2): density (e^{-y/2} - e^{-y}) and CDF in closed form
    ratios, alphas, bm, v, log_c, rho, n = _series_inputs([1, 1], [1, 2])
    coeffs = impl.moschopoulos_coefficients(ratios, alphas, n)
    y = np.linspace(0.01, 30, 301)
    pdf = impl.moschopoulos_pdf(y, coeffs, rho, bm, v, log_c)
    cdf = impl.moschopoulos_cdf(y, coeffs, rho, bm, v, log_c)
    assert np.allclose(pdf, np.exp(-y / 2) - np.exp(-y), rtol=1e-12, atol=1e-15)
    assert np.allclose(cdf, 1 - 2 * np.exp(-y / 2) + np.exp(-y), rtol=1e-11, atol=1e-14)


@pytest.mark.parametrize("impl", BACKENDS)
def test_series_cdf_matches_direct_sum(impl):
    ratios, alphas, bm, v, log_c, rho, n = _series_inputs([0.7, 1.3, 2.2], [0.4, 1.1, 2.5], 600)
    coeffs = impl.moschopoulos_coefficients(ratios, alphas, n)
    y = np.linspace(0.05, 40, 200)
    k = np.arange(n)
    # direct: sum_k C delta_k P(rho + k, y / beta_min)
    direct = np.exp(log_c) * (coeffs * v**k) @ special.gammainc(rho + k[:, None], y / bm)
    got = impl.moschopoulos_cdf(y, coeffs, rho, bm, v, log_c)
    assert np.allclose(got, direct, rtol=0, atol=2e-12)


def test_series_backends_agree():
    if _kernels.compiled is None:
        pytest.skip("extension not built")
    ratios, alphas, bm, v, log_c, rho, n = _series_inputs([0.7, 1.3, 2.2], [0.4, 1.1, 2.5], 600)
    cc = _kernels.compiled.moschopoulos_coefficients(ratios, alphas, n)
    pc = _kernels.python.moschopoulos_coefficients(ratios, alphas, n)
    assert np.allclose(cc, pc, rtol=1e-13, atol=0)
    y = np.linspace(0.0, 40, 513)
    for name in ("moschopoulos_pdf", "moschopoulos_cdf"):
        a = getattr(_kernels.compiled, name)(y, cc, rho, bm, v, log_c)
        b = getattr(_kernels.python, name)(y, pc, rho, bm, v, log_c)
        assert np.allclose(a, b, rtol=1e-11, atol=1e-13), name


def test_series_scalar_input_keeps_shape():
    ratios, alphas, bm, v, log_c, rho, n = _series_inputs([1, 1], [1, 2])
    for impl in [p.values[0] for p in BACKENDS]:
        coeffs = impl.moschopoulos_coefficients(ratios, alphas, n)
        assert np.shape(impl.moschopoulos_pdf(np.float64(1.0), coeffs, rho, bm, v, log_c)) == ()


def test_gig_rejection_backends_identical():
    if _kernels.compiled is None:
        pytest.skip("extension not built")
    law = Gig(-0.5, 1.3, 0.8)
    env = gig_envelope(law).as_tuple()
    tc, nc = _kernels.compiled.gig_log_rejection(77, 1000, 5000, law.lam, law.a, law.b, env)
    tp, np_ = _kernels.python.gig_log_rejection(77, 1000, 5000, law.lam, law.a, law.b, env)
    # exp/log may differ in the last ulp between libm and numpy
    assert np.allclose(tc, tp, rtol=1e-13, atol=0)
    assert np.array_equal(nc, np_)


def test_backend_flag():
    assert _kernels.BACKEND in ("cython", "python")
    if _kernels.compiled is not None and _kernels.BACKEND == "cython":
        assert _kernels.moschopoulos_cdf is _kernels.compiled.moschopoulos_cdf
