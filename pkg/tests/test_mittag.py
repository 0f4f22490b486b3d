import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import erfc
from scipy.special import gamma as Gamma

from fradiff import (
    TimeMesh,
    barrier,
    fit_barrier_constant,
    mittag_leffler,
    solve_scalar_fode,
)
from fradiff.mittag import Z_SWITCH


def test_ml_at_zero_is_one():
    for alpha in (0.1, 0.5, 0.9):
        assert mittag_leffler(alpha, 0.0) == 1.0


def test_ml_alpha_one_is_exp():
    z = np.array([-0.1, -1.0, -4.0, -20.0])
    assert np.allclose(mittag_leffler(1.0, z), np.exp(z), rtol=1e-12)


def test_ml_half_closed_form():
    # E_{1/2}(-x) = exp(x^2) erfc(x)
    for x in (0.3, 1.0, 2.0, 7.0):
        exact = math.exp(x * x) * erfc(x)
        assert np.isclose(mittag_leffler(0.5, -x), exact, rtol=1e-11)


def test_ml_branch_continuity():
    # series and integral representation agree across |z| = Z_SWITCH
    for alpha in (0.2, 0.5, 0.85):
        lo = mittag_leffler(alpha, -(Z_SWITCH - 1e-9))
        hi = mittag_leffler(alpha, -(Z_SWITCH + 1e-9))
        assert abs(lo - hi) < 1e-8 * abs(lo)


def test_ml_deep_asymptotic():
    # E_alpha(-x) ~ 1/(x Gamma(1-alpha)) as x -> infinity
    alpha, x = 0.5, 1.0e8
    val = mittag_leffler(alpha, -x)
    lead = 1.0 / (x * Gamma(1.0 - alpha))
    assert np.isclose(val, lead, rtol=1e-3)


def test_ml_rejects_positive_argument():
    with pytest.raises(ValueError):
        mittag_leffler(0.5, 1.0)
    with pytest.raises(ValueError):
        mittag_leffler(1.5, -1.0)


@given(alpha=st.floats(min_value=0.05, max_value=0.95),
       x=st.floats(min_value=0.0, max_value=1e4))
@settings(max_examples=60, deadline=None)
def test_ml_positive_and_bounded(alpha, x):
    v = mittag_leffler(alpha, -x)
    assert 0.0 < v <= 1.0


def test_ml_monotone_on_negative_axis():
    x = np.linspace(0.0, 30.0, 400)
    v = mittag_leffler(0.35, -x)
    assert np.all(np.diff(v) < 0.0)


# -- scalar FODE and barrier ----------------------------------------------

def test_fode_linear_matches_ml():
    alpha, C = 0.5, 1.0
    mesh = TimeMesh(alpha=alpha, t_end=20.0, nsteps=600, grading=2.0 / alpha)
    sol = solve_scalar_fode(alpha, 1.0, C, 1.0, mesh)
    exact = mittag_leffler(alpha, -mesh.nodes**alpha / C)
    assert np.max(np.abs(sol.values - exact) / exact) < 5e-3


def test_fode_monotone_nonnegative():
    mesh = TimeMesh(alpha=0.3, t_end=100.0, nsteps=400, grading=2.0 / 0.3)
    sol = solve_scalar_fode(0.3, 3.0, 2.0, 1.0, mesh)
    assert np.all(np.diff(sol.values) <= 1e-13)
    assert np.all(sol.values >= 0.0)


def test_fode_dominated_by_fitted_barrier():
    mesh = TimeMesh(alpha=0.5, t_end=50.0, nsteps=300, grading=4.0)
    sol = solve_scalar_fode(0.5, 2.0, 1.0, 1.0, mesh)
    assert np.all(sol.values <= sol.barrier_values() * (1.0 + 1e-12))


def test_barrier_shape_and_knee():
    alpha, gam, cbar, w0 = 0.5, 2.0, 1.5, 2.0
    t0 = cbar * w0 ** ((1.0 - gam) / alpha)
    t = np.linspace(0.0, 10.0, 101)
    w = barrier(alpha, gam, cbar, w0, t)
    assert np.all(w[t <= t0] == w0)
    late = t > t0
    assert np.allclose(w[late], w0 * (t0 / t[late]) ** (alpha / gam), rtol=1e-13)


def test_barrier_zero_initial_datum():
    t = np.linspace(0.0, 5.0, 11)
    assert np.all(barrier(0.5, 2.0, 1.0, 0.0, t) == 0.0)


def test_fit_barrier_constant_is_minimal():
    # shrinking the fitted knee constant by 1% must break domination
    mesh = TimeMesh(alpha=0.5, t_end=50.0, nsteps=200, grading=4.0)
    sol = solve_scalar_fode(0.5, 2.0, 1.0, 1.0, mesh)
    cbar = fit_barrier_constant(0.5, 2.0, sol.times, sol.values)
    w_tight = barrier(0.5, 2.0, 0.99 * cbar, 1.0, sol.times)
    assert np.any(sol.values > w_tight * (1.0 + 1e-12))


def test_fode_input_validation():
    mesh = TimeMesh(alpha=0.5, t_end=1.0, nsteps=10)
    with pytest.raises(ValueError):
        solve_scalar_fode(0.5, -1.0, 1.0, 1.0, mesh)
    with pytest.raises(ValueError):
        solve_scalar_fode(0.5, 1.0, 0.0, 1.0, mesh)
    with pytest.raises(ValueError):
        solve_scalar_fode(0.5, 1.0, 1.0, -1.0, mesh)
    with pytest.raises(ValueError):
        solve_scalar_fode(0.4, 1.0, 1.0, 1.0, mesh)  # alpha mismatch
