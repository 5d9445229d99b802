#!/usr/bin/env python3
"""Minimax problem oracles and the inexact evaluation of the primal envelope.

A `MinimaxProblem` wraps the three first-order oracles of ``f(x, y)`` (value,
gradient in x, gradient in y) together with the smoothness constants the
solvers are tuned by. Problems are immutable; every run asks for a
`MeteredOracle` view which owns its own call counter, so concurrent runs over
one problem never share mutable state.

``phi_oracle`` evaluates Phi(x) = max_y f(x, y) and its gradient by Danskin's
theorem: maximize ``f(x, .)`` to a certified accuracy with the accelerated
solver in ``inner_solvers`` and read off ``f`` and ``grad_x f`` at the
approximate maximizer.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Union

import numpy as np

LOGGER_NAME = "IapunBench"

# Double precision throughout; tolerance schedules scale like eps^4.
FLOAT_EPS = float(np.finfo(np.float64).eps)

# Stopping thresholds below PRECISION_FACTOR * eps_mach * scale are not certifiable.
PRECISION_FACTOR = 1e3

# Safety factor s in the strong-concavity stopping rule ||grad||^2 <= 2 sigma target s.
CERTIFICATE_SAFETY = 0.25


class EvaluationError(ValueError):
    """An oracle produced a non-finite value or a vector of the wrong shape."""


class ParameterError(ValueError):
    """A derived solver parameter violates one of its required inequalities."""


class InvariantViolation(RuntimeError):
    """A property guaranteed by the method's analysis failed to hold at runtime."""


class SolverStallError(RuntimeError):
    """An iteration cap was exceeded before the stopping rule certified the result.

    ``residual`` is the last certificate quantity (a gradient or mapping norm) and
    ``traces`` holds whatever per-epoch records the caller had collected.
    """

    def __init__(self, message: str, residual: float = math.nan, traces: Optional[list] = None):
        super().__init__(message)
        self.residual = residual
        self.traces: list = list(traces) if traces else []


@dataclass(frozen=True)
class SmoothnessSpec:
    """Smoothness constants of an NC-SC problem.

    ell bounds the gradient Lipschitz constant of f, mu is the strong-concavity
    modulus of f(x, .) and l2 the Hessian Lipschitz constant of Phi.
    """

    ell: float
    mu: float
    l2: float

    def __post_init__(self):
        for name in ("ell", "mu", "l2"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be a positive finite number, got: {value}")
        if self.ell < self.mu:
            raise ValueError(f"ell must be >= mu, got: ell={self.ell}, mu={self.mu}")

    @property
    def kappa_y(self) -> float:
        return self.ell / self.mu

    @property
    def l1(self) -> float:
        """Gradient Lipschitz constant of Phi, (1 + kappa_y) * ell."""
        return (1.0 + self.kappa_y) * self.ell

    def to_dict(self) -> Dict[str, float]:
        return {"ell": self.ell, "mu": self.mu, "l2": self.l2}


@dataclass(frozen=True)
class ReferenceSurface:
    """Closed-form Phi, its gradient and (optionally) the inner maximizer y*(x)."""

    phi: Callable[[np.ndarray], float]
    grad_phi: Callable[[np.ndarray], np.ndarray]
    y_star: Optional[Callable[[np.ndarray], np.ndarray]] = None


def as_vector(value, dim: Optional[int] = None, name: str = "vector") -> np.ndarray:
    """Copy ``value`` into a finite float64 vector, checking its dimension."""
    vec = np.array(value, dtype=np.float64, copy=True).reshape(-1)
    if dim is not None and vec.shape[0] != dim:
        raise EvaluationError(f"{name} must have dimension {dim}, got: {vec.shape[0]}")
    if not np.all(np.isfinite(vec)):
        raise EvaluationError(f"{name} contains non-finite entries")
    return vec


class OracleCounter:
    """Per-run tally of f / grad_x f / grad_y f calls."""

    __slots__ = ("f_calls", "grad_x_calls", "grad_y_calls")

    def __init__(self):
        self.f_calls = 0
        self.grad_x_calls = 0
        self.grad_y_calls = 0

    @property
    def total(self) -> int:
        return self.f_calls + self.grad_x_calls + self.grad_y_calls

    @property
    def gradient_calls(self) -> int:
        return self.grad_x_calls + self.grad_y_calls

    def snapshot(self) -> Dict[str, int]:
        return {
            "f_calls": self.f_calls,
            "grad_x_calls": self.grad_x_calls,
            "grad_y_calls": self.grad_y_calls,
        }

    def __repr__(self) -> str:
        return (
            f"OracleCounter(f={self.f_calls}, grad_x={self.grad_x_calls}, "
            f"grad_y={self.grad_y_calls})"
        )


class MinimaxProblem:
    """First-order oracle for min_x max_y f(x, y) plus its smoothness metadata.

    The callables must be deterministic. They are never called directly by the
    solvers: use `metered()` to get a counting view for one run.
    """

    __slots__ = (
        "dim_x",
        "dim_y",
        "spec",
        "name",
        "reference",
        "meta",
        "_f",
        "_grad_x",
        "_grad_y",
    )

    def __init__(
        self,
        dim_x: int,
        dim_y: int,
        spec: SmoothnessSpec,
        f: Callable[[np.ndarray, np.ndarray], float],
        grad_x: Callable[[np.ndarray, np.ndarray], np.ndarray],
        grad_y: Callable[[np.ndarray, np.ndarray], np.ndarray],
        reference: Optional[ReferenceSurface] = None,
        name: str = "problem",
        meta: Optional[object] = None,
    ):
        if not isinstance(dim_x, int) or dim_x < 1:
            raise ValueError(f"dim_x must be a positive integer, got: {dim_x}")
        if not isinstance(dim_y, int) or dim_y < 1:
            raise ValueError(f"dim_y must be a positive integer, got: {dim_y}")
        self.dim_x = dim_x
        self.dim_y = dim_y
        self.spec = spec
        self.name = name
        self.reference = reference
        self.meta = meta
        self._f = f
        self._grad_x = grad_x
        self._grad_y = grad_y

    def metered(self) -> "MeteredOracle":
        """Return a fresh counting view over this problem's oracles."""
        return MeteredOracle(self)

    def __repr__(self) -> str:
        return f"MinimaxProblem({self.name!r}, dim_x={self.dim_x}, dim_y={self.dim_y})"


class MeteredOracle:
    """Counting, validating view over a `MinimaxProblem` owned by a single run."""

    __slots__ = ("problem", "counter")

    def __init__(self, problem: MinimaxProblem):
        self.problem = problem
        self.counter = OracleCounter()

    @property
    def spec(self) -> SmoothnessSpec:
        return self.problem.spec

    @property
    def dim_x(self) -> int:
        return self.problem.dim_x

    @property
    def dim_y(self) -> int:
        return self.problem.dim_y

    @property
    def reference(self) -> Optional[ReferenceSurface]:
        return self.problem.reference

    def f(self, x: np.ndarray, y: np.ndarray) -> float:
        self.counter.f_calls += 1
        value = float(self.problem._f(x, y))
        if not math.isfinite(value):
            raise EvaluationError(f"f returned a non-finite value: {value}")
        return value

    def grad_x(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        self.counter.grad_x_calls += 1
        return self._checked(self.problem._grad_x(x, y), self.problem.dim_x, "grad_x f")

    def grad_y(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        self.counter.grad_y_calls += 1
        return self._checked(self.problem._grad_y(x, y), self.problem.dim_y, "grad_y f")

    @staticmethod
    def _checked(value, dim: int, label: str) -> np.ndarray:
        vec = np.asarray(value, dtype=np.float64).reshape(-1)
        if vec.shape[0] != dim:
            raise EvaluationError(f"{label} must have dimension {dim}, got: {vec.shape[0]}")
        if not np.all(np.isfinite(vec)):
            raise EvaluationError(f"{label} returned non-finite entries")
        return vec


OracleLike = Union[MinimaxProblem, MeteredOracle]


def as_oracle(problem: OracleLike) -> MeteredOracle:
    """Accept either a problem (metered afresh) or an existing run-owned view."""
    if isinstance(problem, MeteredOracle):
        return problem
    if isinstance(problem, MinimaxProblem):
        return problem.metered()
    raise TypeError(f"expected MinimaxProblem or MeteredOracle, got: {type(problem).__name__}")


@dataclass
class InexactEval:
    """Approximate (Phi(x), grad Phi(x)) with the accuracy it was certified to."""

    phi: float
    g: np.ndarray
    delta_y: float
    big_delta_y: float
    inner_iters: int
    y: np.ndarray = field(repr=False)

    @property
    def g_norm(self) -> float:
        return float(np.linalg.norm(self.g))


def phi_target(spec: SmoothnessSpec, delta_y: float, big_delta_y: float) -> float:
    """Function-value accuracy of the inner maximization that meets both contracts."""
    return min(delta_y, spec.mu * big_delta_y ** 2 / (2.0 * spec.ell ** 2))


def phi_oracle(
    problem: OracleLike,
    x,
    delta_y: float,
    big_delta_y: float,
    y0=None,
    cap_factor: float = 10.0,
) -> InexactEval:
    """Evaluate Phi and grad Phi at ``x`` to accuracies ``delta_y`` and ``big_delta_y``.

    The inner problem max_y f(x, y) is solved by accelerated gradient ascent until
    the strong-concavity certificate proves a function gap below
    ``min(delta_y, mu * big_delta_y**2 / (2 ell**2))``. Then
    ``|f(x, y') - Phi(x)| <= delta_y`` and, since grad_x f is ell-Lipschitz in y,
    ``||grad_x f(x, y') - grad Phi(x)|| <= big_delta_y``.

    ``inner_iters`` counts every oracle call made by this evaluation.
    ``y0`` is only a warm start.
    """
    if not delta_y > 0:
        raise ValueError(f"delta_y must be positive, got: {delta_y}")
    if not big_delta_y > 0:
        raise ValueError(f"big_delta_y must be positive, got: {big_delta_y}")
    # inner_solvers imports this module; bind lazily.
    from inner_solvers import agd_max

    oracle = as_oracle(problem)
    x = as_vector(x, oracle.dim_x, "x")
    y_start = np.zeros(oracle.dim_y) if y0 is None else as_vector(y0, oracle.dim_y, "y0")
    calls_before = oracle.counter.total

    target = phi_target(oracle.spec, delta_y, big_delta_y)
    solution = agd_max(oracle, x, y_start, target, cap_factor=cap_factor)
    y = solution.x
    phi = oracle.f(x, y)
    g = oracle.grad_x(x, y)
    return InexactEval(
        phi=phi,
        g=g,
        delta_y=delta_y,
        big_delta_y=big_delta_y,
        inner_iters=oracle.counter.total - calls_before,
        y=y,
    )


def finite_diff_grad(func: Callable[[np.ndarray], float], x, h: Optional[float] = None) -> np.ndarray:
    """Central-difference gradient of a scalar field.

    The default step is eps_mach**(1/3) * max(1, ||x||_inf).
    """
    x = as_vector(x, name="x")
    if h is None:
        h = FLOAT_EPS ** (1.0 / 3.0) * max(1.0, float(np.max(np.abs(x))))
    if not h > 0:
        raise ValueError(f"h must be positive, got: {h}")

    grad = np.empty_like(x)
    for i in range(x.shape[0]):
        step = np.zeros_like(x)
        step[i] = h
        f_plus = float(func(x + step))
        f_minus = float(func(x - step))
        if not (math.isfinite(f_plus) and math.isfinite(f_minus)):
            raise EvaluationError(f"function is not finite near x along coordinate {i}")
        grad[i] = (f_plus - f_minus) / (2.0 * h)
    return grad


def precision_floor(scale: float = 1.0) -> float:
    """Smallest stopping threshold treated as certifiable at magnitude ``scale``."""
    return PRECISION_FACTOR * FLOAT_EPS * max(1.0, abs(scale))


def check_thresholds(thresholds: Dict[str, float], scale: float = 1.0) -> List[str]:
    """Names of thresholds that sit below the precision floor at ``scale``."""
    floor = precision_floor(scale)
    return [name for name, value in thresholds.items() if value < floor]
