import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ggcport.mixing import Gig, UnsupportedLawError, atomic, gamma, mean
from ggcport.models import MarketSpec, NmvmModel
from ggcport.robustness import (
    CHECK_NAMES,
    IrregularModelError,
    LawPath,
    PerturbationSchedule,
    ScheduleError,
    ToleranceSpec,
    adversarial_schedule,
    check_convergence,
    failed_checks,
    law_at,
    make_schedule,
    partial_mean_diagnostic,
    run_sweep,
)

MU, GAMMA, A = [0.05, 0.08], [0.1, -0.05], [[0.2, 0.05], [0.05, 0.3]]
MARKET = MarketSpec(0.01)


def model_with(law):
    return NmvmModel(MU, GAMMA, A, law)


# -- schedules ---------------------------------------------------------------


def test_schedule_offsets_are_geometric():
    sched = PerturbationSchedule(3, 0.5, dmu=[1.0, 0.0], dgamma=[0.0, 0.0], dA=np.zeros((2, 2)))
    models = make_schedule(model_with(gamma(1.0, 1.0)), sched)
    offsets = [m.mu[0] - MU[0] for m in models]
    assert offsets == pytest.approx([0.5, 0.25, 0.125], abs=1e-16)


def test_dA_is_symmetrised():
    sched = PerturbationSchedule(2, 0.5, dA=[[0.0, 0.02], [0.0, 0.0]])
    _, _, d_a = sched.directions(2)
    np.testing.assert_array_equal(d_a, [[0.0, 0.01], [0.01, 0.0]])
    for m in make_schedule(model_with(gamma(1.0, 1.0)), sched):
        np.testing.assert_array_equal(m.a_matrix, m.a_matrix.T)


def test_missing_directions_drawn_from_seed():
    a = PerturbationSchedule(2, 0.5, seed=7).directions(3)
    b = PerturbationSchedule(2, 0.5, seed=7).directions(3)
    c = PerturbationSchedule(2, 0.5, seed=8).directions(3)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x, y)
    assert not np.array_equal(a[0], c[0])


def test_spd_violation_names_step():
    # the first step pushes A's smallest eigenvalue below zero
    sched = PerturbationSchedule(3, 0.5, dA=[[-1.0, 0.0], [0.0, 0.0]])
    with pytest.raises(ScheduleError, match="step 1"):
        make_schedule(model_with(gamma(1.0, 1.0)), sched)


@pytest.mark.parametrize("bad", [dict(steps=0, decay=0.5), dict(steps=3, decay=1.0), dict(steps=3, decay=0.0)])
def test_schedule_validation(bad):
    with pytest.raises(ScheduleError):
        PerturbationSchedule(**bad)


def test_law_path_validation():
    with pytest.raises(ScheduleError):
        LawPath("sideways", (1.0,))
    with pytest.raises(ScheduleError):
        LawPath("gig_path", (1.0, 2.0))
    with pytest.raises(ScheduleError):
        law_at(Gig(1.0, 1.0, 1.0), [LawPath("scale_drift", (1.0,))], 0.5)


def test_gig_path_integrability_numbers():
    law = Gig(1.0, 1.0, 2.0)
    path = LawPath("gig_path", (0.1, 0.2, 0.3))
    sched = PerturbationSchedule(4, 0.5, dmu=[0, 0], dgamma=[0, 0], dA=np.zeros((2, 2)), law_path=path)
    rep = run_sweep(model_with(law), MARKET, make_schedule(model_with(law), sched))
    f = 0.5 ** np.arange(1, 5)
    # s_hat = -b^2 / 2 along b_n = b (1 + 0.3 f)
    np.testing.assert_allclose(rep.column("s_hat"), -0.5 * (2.0 * (1 + 0.3 * f)) ** 2, rtol=1e-15)


def test_atomic_law_path_acts_on_components():
    law = atomic([(1.0, 2.0), (4.0, 0.5)])
    moved = law_at(law, [LawPath("shape_drift", (0.1, -0.2))], 0.5)
    # coefficients follow the gamma-convolution storage order: ascending scale 1/t
    assert dict(moved.generator.atoms) == pytest.approx({4.0: 0.5 * 1.05, 1.0: 2.0 * 0.9})


# -- sweeps and checks -------------------------------------------------------


def test_identity_schedule_is_exact():
    true = model_with(gamma(2.0, 0.5))
    sched = PerturbationSchedule(3, 0.5, dmu=[0, 0], dgamma=[0, 0], dA=np.zeros((2, 2)))
    rep = run_sweep(true, MARKET, make_schedule(true, sched))
    for name in ("mean_err", "s_hat_err", "d_tv", "d_kol", "x_err", "q_err"):
        assert np.all(rep.column(name) == 0.0), name
    zero = ToleranceSpec(0, 0, 0, 0, 0, 0)
    assert failed_checks(check_convergence(rep, zero)) == []


def test_mean_check_at_exact_threshold():
    alpha, beta, decay, steps = 2.0, 1.5, 0.5, 12
    true = model_with(gamma(alpha, beta))
    sched = PerturbationSchedule(
        steps, decay, dmu=[0, 0], dgamma=[0, 0], dA=np.zeros((2, 2)),
        law_path=LawPath("scale_drift", (1.0,)),
    )
    rep = run_sweep(true, MARKET, make_schedule(true, sched))
    final = alpha * beta * decay**steps
    assert rep.records[-1].mean_err == pytest.approx(final, rel=1e-10)
    assert check_convergence(rep, ToleranceSpec(tol_mean=1.01 * final))[CHECK_NAMES[0]].passed
    assert not check_convergence(rep, ToleranceSpec(tol_mean=0.99 * final))[CHECK_NAMES[0]].passed


@settings(max_examples=25, deadline=None)
@given(
    comps=st.lists(st.tuples(st.floats(0.2, 5.0), st.floats(0.2, 5.0)), min_size=1, max_size=3),
    c=st.floats(0.05, 0.5),
    decay=st.floats(0.2, 0.8),
)
def test_mean_errors_shrink_geometrically(comps, c, decay):
    from ggcport.mixing import FiniteGammaConvolution

    law = FiniteGammaConvolution(comps)
    errs = [abs(mean(law_at(law, [LawPath("scale_drift", (c,))], decay**n)) - mean(law)) for n in range(1, 6)]
    np.testing.assert_allclose(np.array(errs[1:]) / errs[:-1], decay, rtol=1e-8)


def test_constants_converge(canonical_model, canonical_market):
    sched = PerturbationSchedule(8, 0.5, seed=3)
    rep = run_sweep(canonical_model, canonical_market, make_schedule(canonical_model, sched))
    errs = np.array([max(r.constants_err) for r in rep.records])
    # first-order in the perturbation, so each step roughly halves the error
    np.testing.assert_allclose(errs[1:] / errs[:-1], 0.5, atol=0.05)


def test_adversarial_sequence_fails_named_checks(canonical_market):
    true = model_with(gamma(1.0, 1.0))
    rep = run_sweep(true, canonical_market, adversarial_schedule(true, 8))
    failed = failed_checks(check_convergence(rep))
    for name in ("(i) mean", "(ii) integrability", "(iv) distance"):
        assert name in failed
    assert "check (i) mean: FAIL" in rep.to_text()


def test_irregular_true_model_rejected():
    with pytest.raises(IrregularModelError):
        run_sweep(model_with(Gig(-10.0, 1.0, 2.0)), MARKET, [])


def test_csv_layout_and_worker_determinism(canonical_model, canonical_market):
    sched = PerturbationSchedule(4, 0.5, seed=11)
    models = make_schedule(canonical_model, sched)
    one = run_sweep(canonical_model, canonical_market, models, workers=1)
    four = run_sweep(canonical_model, canonical_market, models, workers=4)
    text = one.to_csv()
    assert text == four.to_csv()
    header, *rows = text.strip().split("\n")
    s_hat = -2.0
    assert header.split(",") == [
        "n", "EZ_n", "s_hat_n", f"L_n({s_hat / 2!r})", "L_n(0.5)", "L_n(1.0)",
        "d_tv", "d_kol", "fm_lo", "fm_hi", "q_min_n", "x_err",
    ]
    assert [r.split(",")[0] for r in rows] == ["1", "2", "3", "4"]


# -- Thorin-side diagnostic --------------------------------------------------


def test_partial_mean_examples():
    # Gamma(2, scale 0.5) has a single Thorin atom of weight 2 at t = 2
    laws, true = partial_mean_diagnostic([gamma(2.0, 0.5)], gamma(2.0, 0.5), 3.0)
    assert laws == [1.0] and true == 1.0
    assert partial_mean_diagnostic([], gamma(2.0, 0.5), 1.0)[1] == 0.0
    # Gamma(1, scale n): atom at 1/n with weight 1, so g_n = n for delta >= 1/n
    laws, true = partial_mean_diagnostic([gamma(1.0, float(n)) for n in range(1, 6)], gamma(1.0, 1.0), 1.0)
    assert laws == [1.0, 2.0, 3.0, 4.0, 5.0] and true == 1.0


def test_partial_mean_rejects_gig():
    with pytest.raises(UnsupportedLawError):
        partial_mean_diagnostic([gamma(1.0, 1.0)], Gig(1.0, 1.0, 1.0), 1.0)
    with pytest.raises(ValueError):
        partial_mean_diagnostic([], gamma(1.0, 1.0), 0.0)
