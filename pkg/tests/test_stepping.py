import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma as Gamma

from fradiff import (
    Field,
    FracLaplacian,
    Grid,
    HistoryBuffer,
    Laplacian,
    PorousMedium,
    TimeMesh,
    caputo_weights,
    discrete_caputo,
    evolve,
    l1_coefficients,
    lp_norm,
    mittag_leffler,
    smallest_eigenpair,
    step,
)
from fradiff.stepping import linear_operator_matrix


def test_time_mesh_nodes():
    m = TimeMesh(alpha=0.5, t_end=2.0, nsteps=4)
    assert np.allclose(m.nodes, [0.0, 0.5, 1.0, 1.5, 2.0])
    r = 4.0
    mg = TimeMesh(alpha=0.5, t_end=2.0, nsteps=4, grading=r)
    assert np.allclose(mg.nodes, 2.0 * (np.arange(5) / 4.0) ** r)


def test_time_mesh_validation():
    with pytest.raises(ValueError):
        TimeMesh(alpha=1.5, t_end=1.0, nsteps=10)
    with pytest.raises(ValueError):
        TimeMesh(alpha=0.5, t_end=-1.0, nsteps=10)
    with pytest.raises(ValueError):
        TimeMesh(alpha=0.5, t_end=1.0, nsteps=0)
    with pytest.raises(ValueError):
        TimeMesh(alpha=0.5, t_end=1.0, nsteps=10, grading=0.5)


@given(alpha=st.floats(min_value=0.05, max_value=0.95),
       k=st.integers(min_value=1, max_value=200))
@settings(max_examples=50, deadline=None)
def test_caputo_weights_positive_decreasing(alpha, k):
    b = caputo_weights(alpha, k)
    assert b.shape == (k,)
    assert b[0] == 1.0
    assert np.all(b > 0.0)
    assert np.all(np.diff(b) <= 0.0)


def test_l1_coefficients_uniform_match_weights():
    # on a uniform mesh c_{j,k} = b_{k-1-j} * dt^{-alpha} / Gamma(2-alpha)
    alpha, k = 0.4, 7
    m = TimeMesh(alpha=alpha, t_end=1.0, nsteps=10)
    dt = 0.1
    c = l1_coefficients(m, k)
    b = caputo_weights(alpha, k)
    expect = b[::-1] * dt ** (-alpha) / Gamma(2.0 - alpha)
    assert np.allclose(c, expect, rtol=1e-12)


def test_l1_coefficients_increasing_on_graded_mesh():
    m = TimeMesh(alpha=0.5, t_end=10.0, nsteps=20, grading=4.0)
    for k in (1, 5, 20):
        c = l1_coefficients(m, k)
        assert c.shape == (k,)
        assert np.all(c > 0.0)
        assert np.all(np.diff(c) >= 0.0)


def test_discrete_caputo_exact_on_piecewise_linear():
    # the L1 rule interpolates linearly, so v = t is differentiated exactly
    alpha = 0.3
    m = TimeMesh(alpha=alpha, t_end=1.0, nsteps=16, grading=2.0)
    t = m.nodes
    v = 2.0 * t
    exact = 2.0 * t ** (1.0 - alpha) / Gamma(2.0 - alpha)
    for k in (1, 7, 16):
        assert np.isclose(discrete_caputo(v, alpha, m, k), exact[k], rtol=1e-12)


def test_discrete_caputo_annihilates_constants():
    m = TimeMesh(alpha=0.7, t_end=3.0, nsteps=12)
    v = np.full(13, 4.2)
    for k in (1, 6, 12):
        assert abs(discrete_caputo(v, 0.7, m, k)) < 1e-12


def test_smallest_eigenpair_matches_discrete_formula():
    # 3-point Dirichlet Laplacian on (0,1): lambda_1 = 4 sin^2(pi h / 2) / h^2
    g = Grid(bounds=((0.0, 1.0),), npoints=(41,))
    h = g.spacing[0]
    lam, phi = smallest_eigenpair(Laplacian(), g)
    exact = 4.0 * math.sin(math.pi * h / 2.0) ** 2 / h**2
    assert np.isclose(lam, exact, rtol=1e-12)
    x = g.axes()[0]
    prof = np.sin(np.pi * x)
    assert np.allclose(phi / np.max(phi), prof / np.max(prof), atol=1e-10)


def test_linear_operator_matrix_symmetric():
    g = Grid(bounds=((0.0, 1.0),), npoints=(33,))
    A = linear_operator_matrix(FracLaplacian(sigma=0.5), g)
    assert np.allclose(A, A.T, atol=1e-12)
    evals = np.linalg.eigvalsh(A)
    assert evals.min() > 0.0


def test_linear_step_matches_dense_solve():
    g = Grid(bounds=((0.0, 1.0),), npoints=(33,))
    m = TimeMesh(alpha=0.5, t_end=1.0, nsteps=4)
    x = g.axes()[0]
    u0 = np.sin(np.pi * x)
    u0[0] = u0[-1] = 0.0
    hist = HistoryBuffer(g, m)
    hist.append(u0)
    u1 = step(Laplacian(), hist, m, 1)
    c = l1_coefficients(m, 1)[-1]
    A = linear_operator_matrix(Laplacian(), g)
    interior = g.interior_mask()
    ref = np.linalg.solve(c * np.eye(A.shape[0]) + A, c * u0[interior])
    assert np.allclose(u1.values[interior], ref, rtol=1e-11)


def test_evolve_linear_matches_ml_oracle():
    alpha = 0.5
    g = Grid(bounds=((0.0, 1.0),), npoints=(51,))
    lam, phi = smallest_eigenpair(Laplacian(), g)
    m = TimeMesh(alpha=alpha, t_end=5.0, nsteps=200, grading=2.0 / alpha)
    u0 = Field(g, phi / np.max(phi))
    hist = evolve(Laplacian(), u0, m)
    v = np.array([lp_norm(hist.field(k), 2.0) for k in range(len(hist))])
    exact = mittag_leffler(alpha, -lam * hist.times**alpha)
    assert np.max(np.abs(v / v[0] - exact) / exact) < 5e-3


def test_evolve_norm_non_increasing_nonlinear():
    g = Grid(bounds=((0.0, 1.0),), npoints=(41,))
    x = g.axes()[0]
    u0 = Field(g, np.clip(x * (1.0 - x) * 4.0, 0.0, None))
    m = TimeMesh(alpha=0.4, t_end=10.0, nsteps=30, grading=2.0 / 0.4)
    hist = evolve(PorousMedium(m=2.0), u0, m)
    v = np.array([lp_norm(hist.field(k), 2.0) for k in range(len(hist))])
    assert np.all(np.diff(v) <= 1e-10 * v[0])
    assert v[-1] < 0.5 * v[0]


def test_history_buffer_bookkeeping():
    g = Grid(bounds=((0.0, 1.0),), npoints=(5,))
    m = TimeMesh(alpha=0.5, t_end=1.0, nsteps=3)
    h = HistoryBuffer(g, m)
    h.append(np.zeros(5))
    h.append(np.zeros(5))
    assert len(h) == 2
    assert h.data.shape == (2, 5)
    assert np.allclose(h.times, m.nodes[:2])
    assert h.field(1).time == m.nodes[1]
