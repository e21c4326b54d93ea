import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynpr.exceptions import ConfigError, ConvergenceError, DomainError
from dynpr.graph import build_transition, from_edges
from dynpr.solvers import (
    SolveConfig,
    complex_pagerank,
    eval_steady,
    oscillatory_steady_state,
    richardson,
    static_pagerank,
)

from .conftest import FOUR_S_MAGNITUDE


def dense_solve(P, gamma, b):
    D = P.to_dense()
    return np.linalg.solve(np.eye(P.n) - gamma * D, b)


def test_self_loop():
    P = build_transition(from_edges([0], [0], n=1))
    for a in (0.0, 0.5, 0.99):
        np.testing.assert_allclose(static_pagerank(P, SolveConfig(alpha=a)), [1.0])


def test_alpha_zero_returns_v(four_P):
    v = np.array([0.1, 0.2, 0.3, 0.4])
    np.testing.assert_array_equal(static_pagerank(four_P, SolveConfig(alpha=0.0), v), v)


def test_four_node_average_pagerank_against_dense(four_P):
    cfg = SolveConfig(alpha=0.85)
    v = np.full(4, 0.25)
    x = static_pagerank(four_P, cfg, v)
    oracle = dense_solve(four_P, 0.85, 0.15 * v)
    np.testing.assert_allclose(x, oracle, atol=1e-10)
    res = np.abs((x - 0.85 * four_P.to_dense() @ x) - 0.15 * v).sum()
    assert res <= cfg.tol
    assert abs(x.sum() - 1) <= 1e-10 and x.min() >= 0


def test_config_validation():
    for kw in ({"alpha": 1.0}, {"alpha": -0.1}, {"tol": 0.0}, {"max_iter": 0}):
        with pytest.raises(ConfigError):
            SolveConfig(**kw)


def test_bad_teleportation(four_P):
    with pytest.raises(ConfigError):
        static_pagerank(four_P, v=np.full(3, 1 / 3))
    with pytest.raises(ConfigError):
        static_pagerank(four_P, v=np.full(4, 0.3))


def test_convergence_error_reports_residual(four_P):
    with pytest.raises(ConvergenceError) as exc:
        static_pagerank(four_P, SolveConfig(alpha=0.99, tol=1e-14, max_iter=5))
    assert exc.value.residual > 1e-14
    assert exc.value.iterations == 5


def test_residuals_contract_by_alpha(four_P):
    _, res = richardson(four_P, 0.85, 0.15 * np.full(4, 0.25), tol=1e-13)
    res = np.array(res)
    assert np.all(np.diff(res) <= 0)
    assert np.all(res[1:] <= 0.85 * res[:-1] + 8 * np.finfo(float).eps)


def test_complex_gamma_zero(four_P):
    b = np.array([1 + 1j, 2, 0, -1j])
    sol = complex_pagerank(four_P, 0.0, b)
    np.testing.assert_array_equal(sol.s, b)


def test_complex_real_case_matches_static(four_P):
    v = np.array([0.4, 0.1, 0.2, 0.3])
    sol = complex_pagerank(four_P, 0.85, 0.15 * v)
    np.testing.assert_allclose(sol.s.real, static_pagerank(four_P, v=v), atol=1e-10)
    np.testing.assert_allclose(sol.s.imag, 0.0, atol=0)


def test_complex_rejects_large_gamma(four_P):
    with pytest.raises(DomainError):
        complex_pagerank(four_P, 0.8 + 0.8j, np.ones(4))


def test_four_node_phasor_magnitudes(four_P):
    x, sol = oscillatory_steady_state(four_P, 0.85, np.eye(4))
    np.testing.assert_array_equal(np.round(sol.magnitude, 4), FOUR_S_MAGNITUDE)
    assert sol.residual <= 1e-10
    gamma = 0.85 / (1 + 1j)
    b = 0.15 / (4 * (1 + 1j)) * np.exp(1j * 2 * np.pi * np.arange(4) / 4)
    np.testing.assert_allclose(sol.s, dense_solve(four_P, gamma, b), atol=1e-10)
    np.testing.assert_allclose(x, dense_solve(four_P, 0.85, 0.15 * np.full(4, 0.25)), atol=1e-10)


def test_complex_residual_contraction(four_P):
    gamma = 0.85 / (1 + 1j)
    b = 0.15 / (4 * (1 + 1j)) * np.exp(1j * np.pi / 2 * np.arange(4))
    _, res = richardson(four_P, gamma, b, tol=1e-13)
    res = np.array(res)
    assert np.all(res[1:] <= abs(gamma) * res[:-1] + 8 * np.finfo(float).eps)


def test_identical_columns_give_zero_phasor(four_P):
    v = np.array([0.1, 0.2, 0.3, 0.4])
    _, sol = oscillatory_steady_state(four_P, 0.85, np.tile(v[:, None], (1, 3)))
    assert np.abs(sol.s).max() <= 1e-15


def test_needs_two_columns(four_P):
    with pytest.raises(DomainError):
        oscillatory_steady_state(four_P, 0.85, np.full((4, 1), 0.25))


def test_eval_steady_properties(four_P):
    x, sol = oscillatory_steady_state(four_P, 0.85, np.eye(4))
    np.testing.assert_array_equal(eval_steady(x, np.zeros(4), 1.3), x)
    np.testing.assert_allclose(eval_steady(x, sol, 0.7), eval_steady(x, sol, 0.7 + 2 * np.pi), atol=1e-15)
    t = np.linspace(0, 2 * np.pi, 20001)
    X = eval_steady(x, sol, t)
    assert np.abs(X.sum(axis=1) - 1).max() <= 1e-10
    np.testing.assert_allclose(np.abs(X - x).max(axis=0), sol.magnitude, rtol=1e-6)
    np.testing.assert_allclose(X[7], eval_steady(x, sol, t[7]))


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 0.999))
def test_oscillatory_gamma_always_admissible(alpha):
    assert abs(alpha / (1 + 1j)) == pytest.approx(alpha / np.sqrt(2))
    assert abs(alpha / (1 + 1j)) < 1


@st.composite
def problems(draw):
    n = draw(st.integers(1, 15))
    seed = draw(st.integers(0, 2**31 - 1))
    rng = np.random.default_rng(seed)
    m = draw(st.integers(0, 3 * n))
    P = build_transition(from_edges(rng.integers(0, n, m), rng.integers(0, n, m), n=n))
    alpha = draw(st.floats(0.0, 0.95))
    v = rng.random(n) + 1e-3
    return P, alpha, v / v.sum(), rng


@settings(max_examples=60, deadline=None)
@given(problems())
def test_static_output_is_distribution(prob):
    P, alpha, v, _ = prob
    x = static_pagerank(P, SolveConfig(alpha=alpha), v)
    assert x.min() >= 0
    assert abs(x.sum() - 1) <= 1e-10
    np.testing.assert_allclose(x, dense_solve(P, alpha, (1 - alpha) * v), atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(problems())
def test_complex_conjugate_symmetry(prob):
    P, alpha, v, rng = prob
    gamma = alpha * np.exp(1j * rng.uniform(0, 2 * np.pi))
    b = rng.normal(size=P.n) + 1j * rng.normal(size=P.n)
    s = complex_pagerank(P, gamma, b).s
    sc = complex_pagerank(P, np.conj(gamma), np.conj(b)).s
    np.testing.assert_allclose(sc, np.conj(s), atol=1e-12)
