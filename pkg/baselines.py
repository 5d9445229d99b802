#!/usr/bin/env python3
"""Reference solvers the benchmark compares IAPUN against.

* Two-timescale gradient descent ascent (GDA).
* Inexact proximal point with gamma = ell and no nonconvexity certification:
  every outer step is one proximal subproblem solved by ``saddle_prox_solve``.

Both meter oracles through the same `MeteredOracle` counters as IAPUN and
return a `SolverResult`, so the bench treats all solvers alike.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np

from iapun import BRANCH_PROX, EpochTrace, SolverResult
from inner_solvers import DEFAULT_CAP_FACTOR, SubproblemSpec, saddle_prox_solve
from minimax_problem import (
    LOGGER_NAME,
    InvariantViolation,
    MinimaxProblem,
    SmoothnessSpec,
    SolverStallError,
    as_vector,
    phi_oracle,
    precision_floor,
)

METHOD_GDA = "gda"
METHOD_APPA = "inexact_appa"
METHODS = (METHOD_GDA, METHOD_APPA)

BRANCH_GDA = "gda"

DEFAULT_GDA_ITERS = 200000
DEFAULT_APPA_STEPS = 100000
DEFAULT_CHECKPOINT_EVERY = 1000

logger = logging.getLogger(LOGGER_NAME)


@dataclass(frozen=True)
class BaselineConfig:
    """Step sizes, tolerances and caps of one baseline run.

    For GDA ``max_iters`` counts descent-ascent iterations; for inexact APPA it
    counts proximal steps.
    """

    method: str
    eps: float
    gamma: float
    eta_x: float
    eta_y: float
    delta_x: float
    max_iters: int
    checkpoint_every: int = DEFAULT_CHECKPOINT_EVERY
    cap_factor: float = DEFAULT_CAP_FACTOR

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {list(METHODS)}, got: {self.method}")
        for name in ("eps", "gamma", "eta_x", "eta_y", "delta_x", "cap_factor"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be a positive finite number, got: {value}")
        if not isinstance(self.max_iters, int) or self.max_iters < 0:
            raise ValueError(f"max_iters must be a non-negative integer, got: {self.max_iters}")
        if not isinstance(self.checkpoint_every, int) or self.checkpoint_every < 1:
            raise ValueError(
                f"checkpoint_every must be a positive integer, got: {self.checkpoint_every}"
            )

    @classmethod
    def for_problem(cls, spec: SmoothnessSpec, eps: float, method: str, **overrides):
        """Defaults: eta_x = 1/(2 L1), eta_y = 1/(2 ell), gamma = ell and the
        subproblem accuracy that keeps the final gradient bound within eps."""
        gamma = spec.ell
        radius = eps / (4.0 * (spec.l1 + 2.0 * gamma))
        values = dict(
            method=method,
            eps=eps,
            gamma=gamma,
            eta_x=1.0 / (2.0 * spec.l1),
            eta_y=1.0 / (2.0 * spec.ell),
            delta_x=0.5 * gamma * radius ** 2,
            max_iters=DEFAULT_GDA_ITERS if method == METHOD_GDA else DEFAULT_APPA_STEPS,
        )
        values.update(overrides)
        return cls(**values)

    def with_caps(self, max_iters: Optional[int] = None) -> "BaselineConfig":
        return self if max_iters is None else replace(self, max_iters=max_iters)

    def validate(self, spec: SmoothnessSpec) -> None:
        if self.method == METHOD_GDA:
            if self.eta_x > 1.0 / spec.l1:
                raise ValueError(f"eta_x must be <= 1/L1 = {1.0 / spec.l1:.6g}, got: {self.eta_x}")
            if self.eta_y > 1.0 / spec.ell:
                raise ValueError(f"eta_y must be <= 1/ell = {1.0 / spec.ell:.6g}, got: {self.eta_y}")
        elif not math.isclose(self.gamma, spec.ell, rel_tol=1e-12):
            raise ValueError(f"gamma must equal ell = {spec.ell} for inexact_appa, got: {self.gamma}")


def run_gda(problem: MinimaxProblem, x0, y0, config: BaselineConfig) -> SolverResult:
    """Alternating two-timescale GDA: ascent in y, then descent in x at the new y.

    Stops once ``||grad_x f|| + kappa_y ||grad_y f|| <= eps``, which bounds
    ``||grad Phi(x)||`` (y*(x) is ell/mu-close to y by strong concavity).
    ``max_iters = 0`` returns ``x0`` untouched.
    """
    spec = problem.spec
    config.validate(spec)
    oracle = problem.metered()
    x = as_vector(x0, problem.dim_x, "x0")
    y = as_vector(y0, problem.dim_y, "y0")
    traces: List[EpochTrace] = []
    if config.max_iters == 0:
        return SolverResult(METHOD_GDA, x, traces, oracle.counter.snapshot(), math.nan)

    last_x = x
    since = 0
    bound = math.inf
    for iteration in range(config.max_iters + 1):
        gx = oracle.grad_x(x, y)
        gy = oracle.grad_y(x, y)
        bound = float(np.linalg.norm(gx)) + spec.kappa_y * float(np.linalg.norm(gy))
        done = bound <= config.eps
        if done or (since and since % config.checkpoint_every == 0):
            traces.append(
                EpochTrace(
                    k=len(traces) + 1,
                    t_k=since,
                    p_prev=last_x,
                    p=x,
                    branch=BRANCH_GDA,
                    descent_est=math.nan,
                    g_norm=bound,
                    oracle_calls=oracle.counter.snapshot(),
                )
            )
            last_x = x
            since = 0
        if done:
            logger.info(f"GDA certified |grad Phi| <= {bound:.3e} after {iteration} iterations")
            return SolverResult(METHOD_GDA, x, traces, oracle.counter.snapshot(), bound)
        if iteration == config.max_iters:
            break
        y = y + config.eta_y * gy
        x = x - config.eta_x * oracle.grad_x(x, y)
        since += 1

    raise SolverStallError(
        f"GDA: {config.max_iters} iterations without certifying eps={config.eps}",
        residual=bound,
        traces=traces,
    )


def run_inexact_appa(problem: MinimaxProblem, x0, config: BaselineConfig) -> SolverResult:
    """Proximal point iterations ``x+ ~ argmin Phi(x) + gamma ||x - x_k||^2`` with gamma = ell.

    Every step measures ``(Phi(w), grad Phi(w))`` with `phi_oracle` to accuracy
    ``(delta_x, eps/8)`` and stops once the measured ``||g|| <= 3 eps / 4``, so the
    returned w has ``||grad Phi(w)|| <= 7 eps / 8``. The recorded descent is the
    measured change of Phi. Because x is feasible for its own subproblem,

        Phi(w) <= Phi(x) + delta_x - gamma ||w - x||^2

    and a measured increase beyond that (plus twice the evaluation accuracy)
    raises `InvariantViolation`.
    """
    spec = problem.spec
    config.validate(spec)
    oracle = problem.metered()
    x = as_vector(x0, problem.dim_x, "x0")
    traces: List[EpochTrace] = []
    eps = config.eps
    accuracy = eps / 8.0

    current = phi_oracle(oracle, x, config.delta_x, accuracy, cap_factor=config.cap_factor)
    if current.g_norm <= 0.75 * eps:
        logger.info(f"Inexact APPA: initial point already stationary (|g|={current.g_norm:.3e})")
        return SolverResult(
            METHOD_APPA, x, traces, oracle.counter.snapshot(), current.g_norm + accuracy
        )

    y_warm = current.y
    for k in range(1, config.max_iters + 1):
        sub = SubproblemSpec(center_p=x, center_tilde=x, alpha=0.0, gamma=config.gamma)
        solution = saddle_prox_solve(
            oracle, sub, y_warm, config.delta_x, cap_factor=config.cap_factor
        )
        w = solution.x
        step = float(np.linalg.norm(w - x))
        measured = phi_oracle(
            oracle, w, config.delta_x, accuracy, y0=solution.dual, cap_factor=config.cap_factor
        )
        change = measured.phi - current.phi
        allowed = 3.0 * config.delta_x - config.gamma * step ** 2 + precision_floor(current.phi)
        if change > allowed:
            raise InvariantViolation(
                f"inexact APPA step {k}: measured Phi rose by {change:.3e}, "
                f"more than the proximal bound {allowed:.3e}"
            )
        traces.append(
            EpochTrace(
                k=k,
                t_k=1,
                p_prev=x,
                p=w,
                branch=BRANCH_PROX,
                descent_est=change,
                g_norm=measured.g_norm,
                oracle_calls=oracle.counter.snapshot(),
                iterates=[x, w],
                phi_start=current.phi,
            )
        )
        logger.debug(f"Inexact APPA step {k}: |w - x|={step:.3e} |g|={measured.g_norm:.3e}")
        if measured.g_norm <= 0.75 * eps:
            logger.info(f"Inexact APPA certified stationarity after {k} proximal steps")
            return SolverResult(
                METHOD_APPA, w, traces, oracle.counter.snapshot(), measured.g_norm + accuracy
            )
        x, current, y_warm = w, measured, measured.y

    raise SolverStallError(
        f"inexact APPA: {config.max_iters} proximal steps without certifying eps={eps}",
        residual=current.g_norm,
        traces=traces,
    )
