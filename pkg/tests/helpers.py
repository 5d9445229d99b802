"""Small problem factories, direct-solve references and synthetic records used in tests."""

import json

import numpy as np

from hard_instances import coupled_quadratic
from run_record import STATUS_SUCCESS, EpochRow, RunRecord


def convex_problem():
    """2-D, Phi = 0.625||x||^2 + 0.1 sum cos(x): ell = 1.6, L2 = 0.1, Phi* = 0.2 at 0."""
    return coupled_quadratic(dim=2, mu=1.0, coupling=0.5, a=1.0, b=0.1)


def nonconvex_problem():
    """1-D, Phi = 0.225 x^2 + cos x: ell = 1.7, L2 = 1, local max at 0, minima near +-2.01."""
    return coupled_quadratic(dim=1, mu=1.0, coupling=0.5, a=0.2, b=1.0)


def quadratic_problem(curvature: float, dim: int = 1):
    """Phi = (curvature / 2)||x||^2 exactly (b = 0, nominal L2 = 1)."""
    return coupled_quadratic(dim=dim, mu=1.0, coupling=0.5, a=curvature - 0.25, b=0.0)


def quadratic_prox(hess, alpha, gamma, p, anchor):
    """argmin 0.5 x^T H x + alpha||x - p||^2 + gamma||x - anchor||^2 by a linear solve."""
    hess = np.atleast_2d(np.asarray(hess, dtype=float))
    dim = hess.shape[0]
    lhs = hess + 2.0 * (alpha + gamma) * np.eye(dim)
    rhs = 2.0 * alpha * np.asarray(p, dtype=float) + 2.0 * gamma * np.asarray(anchor, dtype=float)
    return np.linalg.solve(lhs, rhs)


def prox_objective(hess, alpha, gamma, p, anchor):
    hess = np.atleast_2d(np.asarray(hess, dtype=float))

    def objective(x):
        x = np.asarray(x, dtype=float)
        return float(
            0.5 * x @ hess @ x
            + alpha * np.sum((x - p) ** 2)
            + gamma * np.sum((x - anchor) ** 2)
        )

    return objective


def synthetic_record(solver, eps, gradient_calls, instance="synthetic", status=STATUS_SUCCESS):
    """Success record whose gradient calls split evenly between x and y."""
    half = int(gradient_calls) // 2
    rest = int(gradient_calls) - half
    return RunRecord(
        solver=solver,
        instance=instance,
        eps=eps,
        status=status,
        epochs=1,
        f_calls=3,
        grad_x_calls=half,
        grad_y_calls=rest,
        grad_norm=eps / 2.0,
        wall_time=0.5,
        rows=[
            EpochRow(
                epoch=1,
                t_k=4,
                flag="F5",
                branch="prox",
                descent=-0.125,
                f_calls=3,
                grad_x_calls=half,
                grad_y_calls=rest,
            )
        ],
    )


def write_config(tmp_path, name="experiment.json", **overrides):
    """Experiment config over the 2-D convex instance, one IAPUN cell by default."""
    cfg = {
        "schema_version": 1,
        "name": "convex-smoke",
        "instance": {"family": "coupled_quadratic", "dim": 2, "mu": 1.0, "coupling": 0.5,
                     "a": 1.0, "b": 0.1},
        "solvers": ["iapun"],
        "eps_grid": [0.05],
        "p0": [0.6, -0.3],
        "output": {"path": str(tmp_path / "records.csv"), "format": "csv"},
    }
    cfg.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)
