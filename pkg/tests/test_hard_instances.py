"""Tests for the zero-chain hard instance, its scaling and the coupled-quadratic family."""

import json
import math

import numpy as np
import pytest

from hard_instances import (
    A1_BRACKET,
    A2_BRACKET,
    HardInstanceSpec,
    build_unscaled,
    chain_constants,
    chain_order,
    check_eps_ceilings,
    coordinate_label,
    coupled_quadratic,
    descent_ascent_path,
    estimate_abs_constants,
    h_max,
    lower_bound_estimate,
    path_laplacian,
    phi_closed_form,
    estimate_hessian_lipschitz,
    estimate_lipschitz,
    joint_gradient,
    random_points,
    scale_instance,
    track_support,
    upsilon,
    upsilon_by_quadrature,
    upsilon_prime,
)
from minimax_problem import finite_diff_grad


@pytest.mark.parametrize("n", [10, 20, 80])
def test_chain_constants_in_bracket(n):
    a1, a2, big_c, c = chain_constants(n)
    assert A1_BRACKET[0] <= a1 <= A1_BRACKET[1]
    assert A2_BRACKET[0] <= a2 <= A2_BRACKET[1]
    assert big_c * a2 == pytest.approx(1.0)
    assert c == pytest.approx(big_c * (a2 - a1) / 2.0)


@pytest.mark.parametrize("x,z", [(1.0, 0.0), (0.3, -0.7), (-2.0, 1.5)])
def test_h_max_matches_block_quadratic_form(x, z):
    n = 20
    a1, a2, big_c, _ = chain_constants(n)
    value, _, _ = h_max(x, z, n, big_c)
    assert value == pytest.approx(big_c * (a1 * x * x / 2 - a2 * x * z + a1 * z * z / 2), rel=1e-10)


def test_h_max_rejects_small_blocks():
    with pytest.raises(ValueError):
        h_max(1.0, 1.0, 5, 1.0)


def test_path_laplacian_spectral_norm():
    lap = path_laplacian(30)
    assert np.linalg.norm(lap, 2) <= 4.0
    np.testing.assert_allclose(lap.sum(axis=1), 0.0)


@pytest.mark.parametrize("x", [-2.0, 0.0, 0.5, 1.0, 3.0])
def test_upsilon_closed_form_matches_quadrature(x):
    assert float(upsilon(x)) == pytest.approx(upsilon_by_quadrature(x), rel=1e-9, abs=1e-9)


def test_upsilon_derivative_vanishes_at_zero_and_one():
    assert float(upsilon_prime(0.0)) == 0.0
    assert float(upsilon_prime(1.0)) == 0.0
    assert float(upsilon(1.0)) == 0.0


def test_upsilon_derivative_at_two_matches_a_central_difference():
    # 120 * 4 * (2 - 1) / (1 + 4)
    h = 1e-5
    central = (float(upsilon(2.0 + h)) - float(upsilon(2.0 - h))) / (2.0 * h)
    assert float(upsilon_prime(2.0)) == pytest.approx(96.0)
    assert central == pytest.approx(96.0, rel=1e-7)


def test_absolute_constants_are_positive():
    ellbar1, ellbar2 = estimate_abs_constants()
    assert ellbar1 > 0 and ellbar2 > 0


@pytest.mark.parametrize("t_blocks,n", [(2, 10), (3, 10), (2, 20), (3, 20)])
def test_maximizing_out_y_gives_the_chain_function(t_blocks, n):
    problem = build_unscaled(t_blocks, 0.5, n)
    spec = problem.meta
    rng = np.random.default_rng(t_blocks * 100 + n)
    oracle = problem.metered()
    for _ in range(100):
        x = rng.uniform(-1.5, 1.5, problem.dim_x)
        y = problem.reference.y_star(x)
        value, grad = phi_closed_form(x, spec)
        assert oracle.f(x, y) == pytest.approx(value, rel=1e-9, abs=1e-9)
        np.testing.assert_allclose(oracle.grad_y(x, y), 0.0, atol=1e-9)
        np.testing.assert_allclose(oracle.grad_x(x, y), grad, rtol=1e-8, atol=1e-9)


def test_oracle_gradients_match_finite_differences():
    problem = build_unscaled(2, 0.5, 10)
    rng = np.random.default_rng(7)
    x = rng.uniform(-1.0, 1.0, problem.dim_x)
    y = rng.uniform(-1.0, 1.0, problem.dim_y)
    oracle = problem.metered()
    fd_x = finite_diff_grad(lambda u: oracle.f(u, y), x)
    fd_y = finite_diff_grad(lambda v: oracle.f(x, v), y)
    np.testing.assert_allclose(oracle.grad_x(x, y), fd_x, rtol=1e-5, atol=1e-6)
    np.testing.assert_allclose(oracle.grad_y(x, y), fd_y, rtol=1e-5, atol=1e-6)


@pytest.mark.parametrize("nu", [1.0, 0.1])
def test_gradient_is_large_before_the_chain_end_is_reached(nu):
    problem = build_unscaled(3, nu, 10)
    spec = problem.meta
    rng = np.random.default_rng(11)
    points = [np.zeros(problem.dim_x)] + [rng.uniform(-2.0, 2.0, problem.dim_x) for _ in range(20)]
    for x in points:
        x[-2:] = 0.0
        _, grad = phi_closed_form(x, spec)
        assert np.linalg.norm(grad) > nu ** 0.75 / 4.0


def test_descent_ascent_reveals_one_coordinate_per_query():
    problem = build_unscaled(2, 1.0, 10)
    tracker = track_support(descent_ascent_path(problem, 14, 0.01, 0.01), 2, 10)
    report = tracker.report()
    assert report.ok
    assert report.first_violation is None
    assert len(report.visited) == 14
    assert tracker.steps == [1] * 14
    assert report.visited[:3] == ["x1", "x2", "y(1)1"]
    assert report.visited[12:] == ["x3", "x4"]


def test_support_report_flags_out_of_order_visits():
    tracker = track_support([(np.array([0.0, 1.0, 0.0, 0.0, 0.0]), np.zeros(20))], 2, 10)
    report = tracker.report()
    assert not report.ok
    assert report.first_violation == 0
    assert report.visited == ["x2"]


def test_chain_order_and_labels():
    order = chain_order(1, 10)
    assert order[:2] == [0, 1]
    assert order[2:12] == list(range(3, 13))
    assert order[-1] == 2
    assert coordinate_label(0, 1, 10) == "x1"
    assert coordinate_label(12, 1, 10) == "y(1)10"


def test_scale_instance_constants():
    ellbar1, ellbar2 = estimate_abs_constants()
    spec, problem = scale_instance(ellbar1, ellbar1 / 100.0, ellbar2, delta=5.0, eps=0.1)
    assert spec.t_blocks == 2
    assert spec.n == 10
    assert 0 < spec.nu <= 1.0
    assert spec.mu_realized <= spec.mu
    assert problem.dim_x == 5 and problem.dim_y == 20
    assert lower_bound_estimate(spec) == 10
    # Scaling keeps the nu^(3/4)/4 gradient floor at exactly eps.
    assert spec.lam * spec.nu ** 0.75 / 4.0 == pytest.approx(0.1)
    rng = np.random.default_rng(3)
    for _ in range(10):
        x = rng.uniform(-1.0, 1.0, problem.dim_x)
        x[-2:] = 0.0
        assert np.linalg.norm(problem.reference.grad_phi(x)) > 0.1 * (1 - 1e-9)


SCALED_CASES = [
    pytest.param(1.0, 5.0, 0.1, id="T2"),
    pytest.param(128.0, 0.3, 0.01, id="desk"),
]


@pytest.mark.parametrize("l2_divisor,delta,eps", SCALED_CASES)
def test_scaled_instance_smoothness_estimates_stay_below_the_constants(l2_divisor, delta, eps):
    ellbar1, ellbar2 = estimate_abs_constants()
    spec, problem = scale_instance(ellbar1, ellbar1 / 100.0, ellbar2 / l2_divisor, delta, eps)
    assert spec.ell_realized <= spec.ell
    assert spec.kappa_realized < spec.ell / spec.mu_realized
    assert problem.spec.ell == spec.ell_realized

    rng = np.random.default_rng(17)
    radius = 2.0 * spec.lam
    dim = spec.dim_x + spec.dim_y
    joint_points = [rng.uniform(-radius, radius, dim) for _ in range(100)]
    ell_est = estimate_lipschitz(
        joint_gradient(problem), joint_points, seed=1, step=1e-3 * spec.lam
    )
    assert ell_est <= 1.1 * spec.ell_realized

    points = random_points(problem, 100, seed=2, radius=radius)
    l2_est = estimate_hessian_lipschitz(
        problem.reference.grad_phi, points, seed=3, step=1e-2 * spec.lam
    )
    assert 0 < l2_est <= 1.1 * spec.l2


def test_scale_instance_rejects_bad_input():
    ellbar1, ellbar2 = estimate_abs_constants()
    with pytest.raises(ValueError):
        scale_instance(ellbar1, 2 * ellbar1, ellbar2, delta=5.0, eps=0.1)
    with pytest.raises(ValueError):
        scale_instance(ellbar1, ellbar1 / 100.0, ellbar2, delta=-1.0, eps=0.1)
    with pytest.raises(ValueError):
        scale_instance(ellbar1, ellbar1 / 100.0, ellbar2, delta=1.0, eps=0.1)


def test_eps_ceilings():
    ellbar1, ellbar2 = estimate_abs_constants()
    check_eps_ceilings(ellbar1, ellbar2, 5.0, 0.1)
    with pytest.raises(ValueError, match="eps must be"):
        check_eps_ceilings(ellbar1, ellbar2, 5.0, 0.3)
    with pytest.raises(ValueError, match="Delta"):
        check_eps_ceilings(ellbar1, ellbar2, 1e-4, 0.1)


def test_spec_json_round_trip():
    spec = build_unscaled(2, 0.5, 10).meta
    restored = HardInstanceSpec.from_json(spec.to_json())
    assert restored == spec
    assert json.loads(spec.to_json())["schema_version"] == 1


def test_spec_rejects_other_schema_versions_and_fields():
    data = build_unscaled(2, 0.5, 10).meta.to_dict()
    with pytest.raises(ValueError):
        HardInstanceSpec.from_dict(dict(data, schema_version=2))
    with pytest.raises(ValueError):
        HardInstanceSpec.from_dict(dict(data, extra=1))
    with pytest.raises(ValueError):
        HardInstanceSpec.from_json("{not json")


@pytest.mark.parametrize("kwargs", [{"t_blocks": 0}, {"n": 5}, {"nu": 1.5}, {"lam": 0.0}])
def test_spec_validation(kwargs):
    data = build_unscaled(2, 0.5, 10).meta.to_dict()
    data.update(kwargs)
    with pytest.raises(ValueError):
        HardInstanceSpec.from_dict(data)


def test_coupled_quadratic_reference_matches_finite_differences():
    coupling = np.array([[1.0, 0.5, 0.0], [0.2, -0.3, 0.8]])
    problem = coupled_quadratic(dim=2, mu=0.5, coupling=coupling, a=-0.2, b=0.4)
    for x in random_points(problem, 100, seed=1):
        fd = finite_diff_grad(problem.reference.phi, x)
        np.testing.assert_allclose(problem.reference.grad_phi(x), fd, rtol=1e-6, atol=1e-8)
        y = problem.reference.y_star(x)
        assert problem.metered().f(x, y) == pytest.approx(problem.reference.phi(x))


def test_coupled_quadratic_constants_bound_the_estimates():
    problem = coupled_quadratic(dim=3, mu=1.0, coupling=0.7, a=0.5, b=0.3)
    points = random_points(problem, 20, seed=2, radius=2.0)
    assert estimate_lipschitz(problem.reference.grad_phi, points) <= problem.spec.ell
    assert problem.spec.l2 == 0.3
    assert math.isclose(problem.spec.ell, max(0.8, 1.0) + 0.7)


def test_coupled_quadratic_validation():
    with pytest.raises(ValueError):
        coupled_quadratic(dim=0, mu=1.0)
    with pytest.raises(ValueError):
        coupled_quadratic(dim=2, mu=0.0)
    with pytest.raises(ValueError):
        coupled_quadratic(dim=2, mu=1.0, coupling=np.ones((3, 2)))
