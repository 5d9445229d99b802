"""Tests for the IAPUN parameter schedule and its inequality checks."""

import logging
import math

import pytest

from iapun import (
    IapunParams,
    IterationCaps,
    complexity_estimate,
    derive_params,
    epoch_count_bound,
    epoch_length_bound,
    params_from_tolerances,
)
from minimax_problem import LOGGER_NAME, ParameterError, SmoothnessSpec


def test_theorem_schedule_direct_substitution():
    params = derive_params(SmoothnessSpec(ell=1.0, mu=1.0, l2=1.0), 0.01)
    root = math.sqrt(10.0)
    assert params.alpha == pytest.approx(0.1)
    assert params.gamma == 1.0
    assert params.kappa_x == pytest.approx(10.0)
    assert params.omega == pytest.approx((2 * root - 1) / (2 * root + 1))
    assert params.d == pytest.approx(0.1)
    assert params.delta_y == params.delta_x / 2


def test_theorem_schedule_satisfies_all_ten_inequalities():
    spec = SmoothnessSpec(ell=1.0, mu=0.1, l2=1.0)
    eps = 0.01
    params = derive_params(spec, eps)
    kappa_x = 10.0
    expected_dx = min(eps ** 4 / (1e10 * 100.0), eps ** 2 / (1e6 * kappa_x ** 1.5))
    assert params.delta_x == pytest.approx(expected_dx)
    rows = params.inequalities()
    assert len(rows) == 10
    for name, lhs, rhs in rows:
        assert lhs <= rhs * (1 + 1e-12), name
    assert params.violated() == []


def test_chi_formula():
    spec = SmoothnessSpec(ell=2.0, mu=0.5, l2=1.0)
    params = derive_params(spec, 0.04)
    radius = math.sqrt(2 * params.delta_x / (params.gamma + 2 * params.alpha))
    expected = 6 * math.sqrt(params.kappa_x) * (
        11 * params.kappa_x * params.delta_x + (2 * 2.0 + spec.l1 + params.alpha) * radius * params.d
    )
    assert params.chi == pytest.approx(expected)


def test_eps_above_ceiling_is_rejected():
    spec = SmoothnessSpec(ell=1.0, mu=1.0, l2=1.0)
    with pytest.raises(ValueError):
        derive_params(spec, 2.0)
    with pytest.raises(ValueError):
        derive_params(spec, -0.1)


def test_check_names_the_violated_inequality():
    spec = SmoothnessSpec(ell=1.0, mu=1.0, l2=1.0)
    params = IapunParams.build(spec, 0.01, 0.1, 1.0, delta_x=1e-3, big_delta_y=1e-6)
    assert "chi+dx+dy <= eps^2/(3200 gamma)" in params.violated()
    with pytest.raises(ParameterError, match="chi"):
        params.check()


def test_build_rejects_non_positive_fields():
    spec = SmoothnessSpec(ell=1.0, mu=1.0, l2=1.0)
    with pytest.raises(ParameterError):
        IapunParams.build(spec, 0.01, 0.1, 1.0, delta_x=0.0, big_delta_y=1e-6)


def test_loose_tolerances_warn_unless_strict(caplog):
    spec = SmoothnessSpec(ell=1.0, mu=1.0, l2=1.0)
    with caplog.at_level(logging.WARNING, logger=LOGGER_NAME):
        params = params_from_tolerances(spec, 0.01, 1e-6, 1e-4)
    assert params.delta_y == 5e-7
    assert any("does not satisfy" in r.getMessage() for r in caplog.records)
    with pytest.raises(ParameterError):
        params_from_tolerances(spec, 0.01, 1e-6, 1e-4, strict=True)


def test_big_delta_y_above_quarter_eps_always_rejected():
    spec = SmoothnessSpec(ell=1.0, mu=1.0, l2=1.0)
    with pytest.raises(ParameterError):
        params_from_tolerances(spec, 0.01, 1e-10, 0.003)


def test_complexity_estimate_scales_as_eps_to_minus_seven_quarters():
    spec = SmoothnessSpec(ell=4.0, mu=1.0, l2=16.0)
    base = complexity_estimate(spec, 1e-3, 2.0)
    assert base == pytest.approx(math.sqrt(4.0) * 2.0 * 2.0 * 2.0 / 1e-3 ** 1.75)
    assert complexity_estimate(spec, 5e-4, 2.0) / base == pytest.approx(2 ** 1.75)


def test_epoch_bounds():
    params = derive_params(SmoothnessSpec(ell=1.0, mu=1.0, l2=1.0), 0.01)
    assert epoch_length_bound(params, 0.0) == 1.0
    gap = 1.0
    expected = 1 + 6 * math.sqrt(params.kappa_x) * math.log(
        3200 * params.gamma * (gap + 2 * params.delta_y) / params.eps ** 2
    )
    assert epoch_length_bound(params, gap) == pytest.approx(expected)
    assert epoch_count_bound(params, gap) == pytest.approx(1 + 72 * gap / 0.01 ** 1.5)


def test_derived_thresholds():
    params = derive_params(SmoothnessSpec(ell=1.0, mu=1.0, l2=2.0), 0.02)
    assert params.ball_radius == pytest.approx(params.alpha / 8.0)
    assert params.eta == pytest.approx(params.alpha / 2.0)
    assert params.descent_bound == min(params.eps ** 2 / (50 * params.alpha), params.exploit_drop)


@pytest.mark.parametrize("kwargs", [{"epochs": 0}, {"epoch_iters": 0}, {"epochs": 2.5}])
def test_iteration_caps_validation(kwargs):
    with pytest.raises(ValueError):
        IterationCaps(**kwargs)
