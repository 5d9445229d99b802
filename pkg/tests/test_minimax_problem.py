"""Tests for oracle metering, the inexact Phi oracle and numeric helpers."""

import math

import numpy as np
import pytest

from helpers import convex_problem, nonconvex_problem

from hard_instances import build_unscaled
from minimax_problem import (
    EvaluationError,
    MinimaxProblem,
    SmoothnessSpec,
    as_oracle,
    as_vector,
    check_thresholds,
    finite_diff_grad,
    phi_oracle,
    phi_target,
    precision_floor,
)


@pytest.mark.parametrize(
    "ell,mu,l2",
    [(1.0, 2.0, 1.0), (0.0, 0.0, 1.0), (1.0, 1.0, -1.0), (math.inf, 1.0, 1.0)],
)
def test_smoothness_spec_rejects_invalid(ell, mu, l2):
    with pytest.raises(ValueError):
        SmoothnessSpec(ell=ell, mu=mu, l2=l2)


def test_smoothness_spec_derived_constants():
    spec = SmoothnessSpec(ell=2.0, mu=0.5, l2=3.0)
    assert spec.kappa_y == 4.0
    assert spec.l1 == pytest.approx(10.0)


def test_metered_views_count_independently():
    problem = convex_problem()
    first = problem.metered()
    second = problem.metered()
    x, y = np.zeros(2), np.zeros(2)
    first.f(x, y)
    first.grad_x(x, y)
    first.grad_y(x, y)
    first.grad_y(x, y)
    assert first.counter.snapshot() == {"f_calls": 1, "grad_x_calls": 1, "grad_y_calls": 2}
    assert first.counter.gradient_calls == 3
    assert second.counter.total == 0


def test_as_oracle_keeps_existing_view():
    problem = convex_problem()
    view = problem.metered()
    assert as_oracle(view) is view
    assert as_oracle(problem) is not view
    with pytest.raises(TypeError):
        as_oracle("not a problem")


def _broken_problem(value):
    spec = SmoothnessSpec(ell=1.0, mu=1.0, l2=1.0)
    return MinimaxProblem(
        1,
        1,
        spec,
        lambda x, y: value,
        lambda x, y: np.array([value]),
        lambda x, y: np.zeros(2),
    )


def test_non_finite_oracle_output_raises():
    oracle = _broken_problem(float("nan")).metered()
    with pytest.raises(EvaluationError):
        oracle.f(np.zeros(1), np.zeros(1))
    with pytest.raises(EvaluationError):
        oracle.grad_x(np.zeros(1), np.zeros(1))


def test_wrong_gradient_shape_raises():
    oracle = _broken_problem(1.0).metered()
    with pytest.raises(EvaluationError):
        oracle.grad_y(np.zeros(1), np.zeros(1))


def test_as_vector_checks_dimension_and_finiteness():
    assert as_vector([1, 2], 2).dtype == np.float64
    with pytest.raises(EvaluationError):
        as_vector([1, 2, 3], 2)
    with pytest.raises(EvaluationError):
        as_vector([1.0, float("inf")])


@pytest.mark.parametrize("x", [[0.6, -0.3], [1.5, 2.0], [-0.2, 0.05]])
def test_phi_oracle_meets_both_accuracy_contracts(x):
    problem = convex_problem()
    delta_y, big_delta_y = 1e-9, 1e-6
    ev = phi_oracle(problem, x, delta_y, big_delta_y)
    ref = problem.reference
    assert abs(ev.phi - ref.phi(np.array(x))) <= delta_y
    assert np.linalg.norm(ev.g - ref.grad_phi(np.array(x))) <= big_delta_y
    assert ev.inner_iters > 0


def test_phi_oracle_counts_every_call_on_the_shared_view():
    problem = nonconvex_problem()
    oracle = problem.metered()
    ev = phi_oracle(oracle, [0.3], 1e-10, 1e-6)
    assert ev.inner_iters == oracle.counter.total
    assert oracle.counter.f_calls == 1
    assert oracle.counter.grad_x_calls == 1


def test_phi_oracle_warm_start_at_maximizer_needs_one_gradient():
    problem = convex_problem()
    x = np.array([0.4, 0.1])
    oracle = problem.metered()
    ev = phi_oracle(oracle, x, 1e-10, 1e-6, y0=problem.reference.y_star(x))
    assert oracle.counter.grad_y_calls == 1
    assert np.allclose(ev.y, problem.reference.y_star(x))


@pytest.mark.parametrize("delta_y,big_delta_y", [(0.0, 1e-3), (1e-3, -1.0)])
def test_phi_oracle_rejects_non_positive_tolerances(delta_y, big_delta_y):
    with pytest.raises(ValueError):
        phi_oracle(convex_problem(), [0.0, 0.0], delta_y, big_delta_y)


def test_phi_target_takes_the_tighter_contract():
    spec = SmoothnessSpec(ell=2.0, mu=1.0, l2=1.0)
    assert phi_target(spec, 1.0, 1e-3) == pytest.approx(1e-6 / 8.0)
    assert phi_target(spec, 1e-12, 1e-3) == 1e-12


def test_finite_diff_grad_matches_closed_form():
    x = np.array([0.3, -1.2, 2.0])
    grad = finite_diff_grad(lambda z: float(np.sum(np.sin(z)) + z @ z), x)
    np.testing.assert_allclose(grad, np.cos(x) + 2 * x, rtol=1e-8, atol=1e-9)


def test_precision_floor_scales_with_magnitude():
    assert precision_floor(1e6) == pytest.approx(1e6 * precision_floor(1.0))
    assert precision_floor(0.01) == precision_floor(1.0)
    assert check_thresholds({"tight": 1e-20, "loose": 1e-3}) == ["tight"]


def test_phi_oracle_is_bit_identical_across_calls():
    problem = build_unscaled(2, 0.5, 10)
    x = np.random.default_rng(5).uniform(-1.0, 1.0, problem.dim_x)
    first = phi_oracle(problem.metered(), x, 1e-8, 1e-4)
    second = phi_oracle(problem.metered(), x, 1e-8, 1e-4)
    assert first.phi == second.phi
    np.testing.assert_array_equal(first.g, second.g)
    np.testing.assert_array_equal(first.y, second.y)
    assert first.inner_iters == second.inner_iters
