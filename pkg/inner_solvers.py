#!/usr/bin/env python3
"""Accelerated inner solvers with certified accuracy.

Two public solvers, both built on one constant-momentum Nesterov loop
(`_accelerated_descent`):

* ``agd_max``: maximize the mu-strongly concave ``f(x, .)`` for fixed x.
* ``saddle_prox_solve``: minimize
  ``Phi(x) + alpha ||x - p||^2 + gamma ||x - x_tilde||^2`` through the exchanged
  problem ``max_y min_x psi(x, y)``. When the `SubproblemSpec` carries
  ``ball_center`` and ``ball_l2`` the x-side runs the projected variant of the
  loop over that ball.

Every solver stops on a gradient (or gradient-mapping) test that proves its
accuracy by strong convexity. Each returns a `CertifiedSolution` carrying that
proof, never an estimate.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from minimax_problem import (
    CERTIFICATE_SAFETY,
    LOGGER_NAME,
    OracleLike,
    SolverStallError,
    as_oracle,
    as_vector,
)

DEFAULT_CAP_FACTOR = 10.0

logger = logging.getLogger(LOGGER_NAME)


@dataclass
class CertifiedSolution:
    """Approximate minimizer (or maximizer) with a proven accuracy.

    ``suboptimality_bound`` bounds the objective gap. ``distance_bound`` bounds
    the distance to the exact solution. ``dual`` is the y-point of a saddle solve,
    kept for warm starts.
    """

    x: np.ndarray
    suboptimality_bound: float
    distance_bound: float
    oracle_cost: int
    iterations: int
    dual: Optional[np.ndarray] = None


@dataclass(frozen=True)
class SubproblemSpec:
    """Proximal subproblem ``Phi(x) + alpha||x - p||^2 + gamma||x - x_tilde||^2``.

    With ``ball_center`` set, x is restricted to the ball of radius
    ``alpha / (4 * ball_l2)`` around it.
    """

    center_p: np.ndarray
    center_tilde: np.ndarray
    alpha: float
    gamma: float
    ball_center: Optional[np.ndarray] = None
    ball_l2: Optional[float] = None

    def __post_init__(self):
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be non-negative, got: {self.alpha}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got: {self.gamma}")
        if (self.ball_center is None) != (self.ball_l2 is None):
            raise ValueError("ball_center and ball_l2 must be given together")
        if self.ball_l2 is not None:
            if not self.ball_l2 > 0:
                raise ValueError(f"ball_l2 must be positive, got: {self.ball_l2}")
            if not self.alpha > 0:
                raise ValueError("a ball constraint needs alpha > 0")

    @property
    def has_ball(self) -> bool:
        return self.ball_center is not None

    @property
    def ball_radius(self) -> Optional[float]:
        if self.ball_l2 is None:
            return None
        return self.alpha / (4.0 * self.ball_l2)

    def strong_convexity(self, ell: float) -> float:
        """Modulus of the x-subobjective: Phi is ell-weakly convex."""
        return 2.0 * self.alpha + 2.0 * self.gamma - ell

    def validate(self, ell: float, dim_x: int) -> None:
        if self.gamma < ell:
            raise ValueError(f"gamma must be >= ell ({ell}), got: {self.gamma}")
        as_vector(self.center_p, dim_x, "center_p")
        as_vector(self.center_tilde, dim_x, "center_tilde")
        if self.ball_center is not None:
            as_vector(self.ball_center, dim_x, "ball_center")


def project_ball(x: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean projection onto the closed ball B(center, radius)."""
    offset = x - center
    dist = float(np.linalg.norm(offset))
    if dist <= radius:
        return x
    return center + offset * (radius / dist)


def iteration_cap(kappa: float, ratio: float, factor: float = DEFAULT_CAP_FACTOR) -> int:
    """``factor`` times the accelerated bound sqrt(kappa) log(2 kappa ratio).

    ``ratio`` is (initial certificate / threshold) squared.
    """
    rate = math.sqrt(max(kappa, 1.0))
    log_term = math.log(max(2.0 * kappa * ratio, math.e))
    return int(factor * math.ceil(rate * log_term)) + 10


@dataclass
class _DescentResult:
    point: np.ndarray
    anchor: np.ndarray
    norm: float
    iterations: int


def _accelerated_descent(
    grad: Callable[[np.ndarray], np.ndarray],
    start: np.ndarray,
    lipschitz: float,
    sigma: float,
    threshold: Callable[[], float],
    project: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    cap_factor: float = DEFAULT_CAP_FACTOR,
    label: str = "descent",
) -> _DescentResult:
    """Constant-momentum Nesterov descent on a sigma-strongly convex, L-smooth function.

    Each step forms the (projected) gradient step ``x+ = P(v - grad(v)/L)`` and the
    gradient mapping ``G = L (v - x+)``. It stops at the first anchor v with
    ``||G|| <= threshold()``. Then ``F(x+) - min F <= ||G||^2 / (2 sigma)`` and
    ``||x+ - x*|| <= ||G|| / sigma``. ``threshold`` is re-read every step because
    the saddle solver tightens it as the dual iterate converges.
    """
    if project is not None:
        start = project(start)
    root = math.sqrt(lipschitz / sigma)
    beta = (root - 1.0) / (root + 1.0)

    x_prev = start
    anchor = start
    cap = None
    iteration = 0
    while True:
        g = grad(anchor)
        point = anchor - g / lipschitz
        if project is None:
            norm = float(np.linalg.norm(g))
        else:
            point = project(point)
            norm = float(np.linalg.norm(lipschitz * (anchor - point)))
        limit = threshold()
        if norm <= limit:
            return _DescentResult(point=point, anchor=anchor, norm=norm, iterations=iteration)
        if cap is None:
            cap = iteration_cap(lipschitz / sigma, (norm / limit) ** 2, cap_factor)
        if iteration >= cap:
            raise SolverStallError(
                f"{label}: no certificate after {iteration} iterations "
                f"(mapping norm {norm:.3e} > {limit:.3e})",
                residual=norm,
            )
        anchor = point + beta * (point - x_prev)
        x_prev = point
        iteration += 1


def agd_max(
    problem: OracleLike,
    x_fixed,
    y0,
    target: float,
    cap_factor: float = DEFAULT_CAP_FACTOR,
) -> CertifiedSolution:
    """Maximize ``f(x_fixed, .)`` to a certified gap ``target``."""
    if not target > 0:
        raise ValueError(f"target must be positive, got: {target}")
    oracle = as_oracle(problem)
    spec = oracle.spec
    x = as_vector(x_fixed, oracle.dim_x, "x_fixed")
    y_start = as_vector(y0, oracle.dim_y, "y0")
    calls_before = oracle.counter.total

    limit = math.sqrt(2.0 * spec.mu * target * CERTIFICATE_SAFETY)
    result = _accelerated_descent(
        lambda y: -oracle.grad_y(x, y),
        y_start,
        spec.ell,
        spec.mu,
        lambda: limit,
        cap_factor=cap_factor,
        label="agd_max",
    )
    return CertifiedSolution(
        x=result.point,
        suboptimality_bound=result.norm ** 2 / (2.0 * spec.mu),
        distance_bound=result.norm / spec.mu,
        oracle_cost=oracle.counter.total - calls_before,
        iterations=result.iterations,
    )


class _PrimalSolver:
    """Warm-started x-minimization of psi(., y) for the dual ascent of `saddle_prox_solve`."""

    __slots__ = (
        "oracle",
        "sub",
        "sigma",
        "lipschitz",
        "project",
        "cap_factor",
        "x",
        "mapping_norm",
        "grad_y",
    )

    def __init__(self, oracle, sub: SubproblemSpec, sigma: float, cap_factor: float):
        self.oracle = oracle
        self.sub = sub
        self.sigma = sigma
        self.lipschitz = 2.0 * sub.alpha + 2.0 * sub.gamma + oracle.spec.ell
        self.cap_factor = cap_factor
        self.project = None
        if sub.has_ball:
            center = np.asarray(sub.ball_center, dtype=np.float64)
            radius = sub.ball_radius
            self.project = lambda z: project_ball(z, center, radius)
        start = np.asarray(sub.center_tilde, dtype=np.float64)
        self.x = self.project(start) if self.project else start
        self.mapping_norm = math.inf
        self.grad_y = None

    def solve(self, y: np.ndarray, limit: float) -> np.ndarray:
        sub = self.sub
        p = np.asarray(sub.center_p, dtype=np.float64)
        tilde = np.asarray(sub.center_tilde, dtype=np.float64)

        def grad(z):
            return (
                self.oracle.grad_x(z, y)
                + 2.0 * sub.alpha * (z - p)
                + 2.0 * sub.gamma * (z - tilde)
            )

        result = _accelerated_descent(
            grad,
            self.x,
            self.lipschitz,
            self.sigma,
            lambda: limit,
            project=self.project,
            cap_factor=self.cap_factor,
            label="saddle_prox_solve(primal)",
        )
        self.x = result.point
        self.mapping_norm = result.norm
        self.grad_y = self.oracle.grad_y(self.x, y)
        return self.grad_y


def saddle_prox_solve(
    problem: OracleLike,
    spec: SubproblemSpec,
    y_warm,
    delta_x: float,
    cap_factor: float = DEFAULT_CAP_FACTOR,
) -> CertifiedSolution:
    """Solve the proximal subproblem to a certified gap ``delta_x``.

    With ``psi(x, y) = f(x, y) + alpha||x - p||^2 + gamma||x - x_tilde||^2`` the
    primal objective is ``P(x) = max_y psi(x, y)`` and the dual
    ``Psi(y) = min_x psi(x, y)`` is mu-strongly concave and
    ``(ell + ell^2 / sigma_x)``-smooth. Dual ascent runs on Psi; each dual
    gradient comes from an inner x-solve, warm-started and projected onto the
    ball when present. For any pair (x+, v):

        P(x+) - min P <= ||grad_y f(x+, v)||^2 / (2 mu) + ||G_x||^2 / (2 sigma_x)

    where G_x is the inner gradient mapping. Both terms are driven below
    ``s * delta_x / 2``, so the reported bound is at most ``delta_x``.
    """
    if not delta_x > 0:
        raise ValueError(f"delta_x must be positive, got: {delta_x}")
    oracle = as_oracle(problem)
    smooth = oracle.spec
    spec.validate(smooth.ell, oracle.dim_x)
    y_start = as_vector(y_warm, oracle.dim_y, "y_warm")
    calls_before = oracle.counter.total

    sigma_x = spec.strong_convexity(smooth.ell)
    dual_lipschitz = smooth.ell + smooth.ell ** 2 / sigma_x
    kappa_dual = dual_lipschitz / smooth.mu
    dual_limit = math.sqrt(2.0 * smooth.mu * (delta_x / 2.0) * CERTIFICATE_SAFETY)
    primal_limit = math.sqrt(2.0 * sigma_x * (delta_x / 2.0) * CERTIFICATE_SAFETY)

    primal = _PrimalSolver(oracle, spec, sigma_x, cap_factor)
    state = {"last_dual_norm": math.inf, "steps": 0}

    def inner_limit() -> float:
        # Inexact dual gradients must shrink with the dual residual.
        scale = max(dual_limit, min(state["last_dual_norm"], 1e300))
        return min(primal_limit, sigma_x * scale / (4.0 * math.sqrt(kappa_dual) * smooth.ell))

    def dual_grad(v: np.ndarray) -> np.ndarray:
        gy = primal.solve(v, inner_limit())
        state["last_dual_norm"] = float(np.linalg.norm(gy))
        state["steps"] += 1
        return -gy

    result = _accelerated_descent(
        dual_grad,
        y_start,
        dual_lipschitz,
        smooth.mu,
        lambda: dual_limit,
        cap_factor=cap_factor,
        label="saddle_prox_solve(dual)",
    )
    # The stop test was evaluated at result.anchor with the primal point it produced.
    dual_norm = state["last_dual_norm"]
    bound = dual_norm ** 2 / (2.0 * smooth.mu) + primal.mapping_norm ** 2 / (2.0 * sigma_x)
    logger.debug(
        f"saddle_prox_solve: {state['steps']} dual steps, bound {bound:.3e} "
        f"(target {delta_x:.3e}), {oracle.counter.total - calls_before} oracle calls"
    )
    return CertifiedSolution(
        x=primal.x,
        suboptimality_bound=bound,
        distance_bound=math.sqrt(2.0 * bound / sigma_x),
        oracle_cost=oracle.counter.total - calls_before,
        iterations=result.iterations,
        dual=result.anchor,
    )
