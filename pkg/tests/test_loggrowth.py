import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from osnbehavior.errors import DomainError, InsufficientDataError
from osnbehavior.loggrowth import (
    LogGrowthFit,
    LsConfig,
    fit_log_growth,
    initial_params,
    log_growth_value,
    five_param_value,
    residuals_and_jacobian,
    to_paper_params,
)
from osnbehavior.records import RetweetObservation
from osnbehavior.synth import SynthSpec, generate_synthetic_growth

TRUTH = LogGrowthFit(2.0, 1.0, 3.0)
AGES = [float(h) for h in range(49)]


def curve(a, c, d, t):
    return a * math.log(t + c) + d


def fd_jacobian(fit, series, rel_step=1e-6):
    """Central differences of the residual vector wrt (a, c, d)."""
    p = np.array([fit.a, fit.c, fit.d])
    cols = []
    for j in range(3):
        h = rel_step * max(1.0, abs(p[j]))
        up, dn = p.copy(), p.copy()
        up[j] += h
        dn[j] -= h
        r_up = np.array([o.count - curve(*up, o.age_hours) for o in series])
        r_dn = np.array([o.count - curve(*dn, o.age_hours) for o in series])
        cols.append((r_up - r_dn) / (2 * h))
    return np.column_stack(cols)


@pytest.mark.parametrize("t, value", [(0.0, 3.0), (math.e - 1, 5.0), (math.e ** 2 - 1, 7.0)])
def test_value_examples(t, value):
    assert log_growth_value(TRUTH, t) == pytest.approx(value, abs=1e-12)


def test_value_rejects_negative_age():
    with pytest.raises(DomainError):
        log_growth_value(TRUTH, -0.5)


def test_fit_requires_positive_shift():
    with pytest.raises(DomainError):
        LogGrowthFit(1.0, 0.0, 0.0)


def test_residuals_zero_on_perfect_series():
    series = [RetweetObservation("m", t, curve(2, 1, 3, t)) for t in AGES]
    r, _ = residuals_and_jacobian(TRUTH, series)
    assert np.all(np.abs(r) <= 1e-12)


def test_single_point_residual_and_jacobian():
    r, jac = residuals_and_jacobian(TRUTH, [RetweetObservation("m", 0.0, 3)])
    assert r[0] == pytest.approx(0.0, abs=1e-15)
    assert jac[0] == pytest.approx([0.0, -2.0, -1.0], abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.floats(-5, 5), st.floats(0.1, 20), st.floats(-10, 10),
       st.lists(st.floats(0, 100), min_size=1, max_size=10))
def test_jacobian_matches_finite_differences(a, c, d, ages):
    fit = LogGrowthFit(a, c, d)
    series = [RetweetObservation("m", t, 1) for t in ages]
    _, jac = residuals_and_jacobian(fit, series)
    fd = fd_jacobian(fit, series)
    assert np.all(np.abs(jac - fd) <= 1e-6 * np.maximum(1.0, np.abs(jac)))


def test_paper_params_embedding():
    assert to_paper_params(TRUTH) == (math.e, 1.0, 2.0, 1.0, 3.0)
    flat = LogGrowthFit(0.0, 1.0, 5.0)
    assert five_param_value(to_paper_params(flat), np.arange(11.0)) == pytest.approx([5.0] * 11)


@given(st.floats(-5, 5), st.floats(1e-3, 50), st.floats(-10, 10))
def test_five_param_form_reproduces_curve(a, c, d):
    fit = LogGrowthFit(a, c, d)
    t = np.arange(11.0)
    assert np.all(np.abs(five_param_value(to_paper_params(fit), t) - log_growth_value(fit, t)) <= 1e-12)


def _noiseless():
    spec = SynthSpec(gmm_truth=_dummy_truth(), growth_truth=(2.0, 1.0, 3.0))
    return generate_synthetic_growth(spec, AGES, rounded=False)


def _dummy_truth():
    from osnbehavior.gmm import GmmFit

    return GmmFit(0.5, 10, 2, 0.5, 19, 1.5)


def test_noiseless_recovery():
    fit = fit_log_growth(_noiseless())
    assert fit.converged
    for got, want in [(fit.a, 2.0), (fit.c, 1.0), (fit.d, 3.0)]:
        assert abs(got - want) <= 1e-4 * abs(want)
    assert fit.sse < 1e-12


def test_noisy_recovery_seed_11():
    spec = SynthSpec(gmm_truth=_dummy_truth(), growth_truth=(2.0, 1.0, 3.0), noise_sd=1.0, seed=11)
    fit = fit_log_growth(generate_synthetic_growth(spec, AGES))
    assert abs(fit.a - 2) <= 0.3
    assert abs(fit.d - 3) <= 1.0


def test_constant_series():
    series = [RetweetObservation("m", t, 42) for t in AGES[:10]]
    fit = fit_log_growth(series)
    assert fit.converged
    assert abs(fit.a) < 1e-6
    assert fit.d == pytest.approx(42, abs=1e-6)


def test_sse_history_non_increasing():
    spec = SynthSpec(gmm_truth=_dummy_truth(), growth_truth=(3.0, 0.5, 1.0), noise_sd=2.0, seed=4)
    fit = fit_log_growth(generate_synthetic_growth(spec, AGES))
    hist = np.array(fit.history)
    assert np.all(np.diff(hist) <= 0)
    assert hist[-1] == fit.sse


@settings(max_examples=25, deadline=None)
@given(st.randoms(use_true_random=False), st.integers(0, 2**32 - 1))
def test_permutation_invariance(rnd, seed):
    spec = SynthSpec(gmm_truth=_dummy_truth(), growth_truth=(2.0, 1.0, 3.0), noise_sd=1.0, seed=seed)
    series = generate_synthetic_growth(spec, AGES)
    shuffled = list(series)
    rnd.shuffle(shuffled)
    a, b = fit_log_growth(series), fit_log_growth(shuffled)
    assert abs(a.a - b.a) <= 1e-8 and abs(a.c - b.c) <= 1e-8 and abs(a.d - b.d) <= 1e-8


def test_shift_clamped_to_minimum():
    config = LsConfig(c_min=0.25)
    series = [RetweetObservation("m", t, v) for t, v in
              [(0, 0), (1, 10), (2, 11), (3, 12), (5, 13), (8, 14)]]
    assert fit_log_growth(series, config).c >= 0.25


def test_initial_params_rule():
    t = np.array([0.0, 1.0, 3.0, 7.0])
    y = 2 * np.log(t + 1) + 3
    a0, c0, d0 = initial_params(t, y)
    assert (a0, c0, d0) == (pytest.approx(2.0), 1.0, 3.0)
    assert initial_params(t, -y)[0] == 1e-3


@pytest.mark.parametrize("series", [
    [RetweetObservation("m", t, 1) for t in (0, 1, 2)],
    [RetweetObservation("m", t, 1) for t in (0, 0, 1, 1)],
])
def test_insufficient_data(series):
    with pytest.raises(InsufficientDataError):
        fit_log_growth(series)


def test_negative_slope_reported():
    series = [RetweetObservation("m", t, 0) for t in AGES[:6]]
    series = [replace(o, count=float(20 - 3 * math.log(o.age_hours + 2))) for o in series]
    fit = fit_log_growth(series)
    assert fit.a < 0
