#!/usr/bin/env python3
"""IAPUN: inexact accelerated proximal point, convex until proven guilty.

Each epoch k minimizes the majorized envelope
``Phi_k(x) = Phi(x) + alpha ||x - p_{k-1}||^2`` with extrapolated proximal steps
of weight gamma (the APPA loop). After every step `certify` checks the
trajectory against what alpha-strong convexity would guarantee:

* progress as expected, stationary prox displacement -> F5, take the prox point;
* value went up but a constrained recompute descends -> F3, take it;
* value went up with earlier sufficient descent (F1), or near the start (F2),
  or the linear rate broke (F4) -> pick the best visited point if it descends
  enough, otherwise `exploit_ncvx` extracts a negative-curvature pair and steps
  along it.

The run stops once ``||g_{p_k}|| <= 3 eps / 4``. Gradient estimates are accurate
to ``big_delta_y <= eps / 4``, so the returned point has ``||grad Phi|| <= eps``.
"""

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from inner_solvers import DEFAULT_CAP_FACTOR, SubproblemSpec, saddle_prox_solve
from minimax_problem import (
    CERTIFICATE_SAFETY,
    LOGGER_NAME,
    InexactEval,
    InvariantViolation,
    MeteredOracle,
    MinimaxProblem,
    OracleLike,
    ParameterError,
    SmoothnessSpec,
    SolverStallError,
    as_oracle,
    as_vector,
    check_thresholds,
    phi_oracle,
    phi_target,
    precision_floor,
)

DEFAULT_CAP_EPOCHS = 5000
DEFAULT_BOUND_FACTOR = 4.0

# Tolerance schedule constants.
DELTA_X_CURVATURE = 1e10
DELTA_X_PROXIMAL = 1e6
BIG_DELTA_Y_CURVATURE = 4e5
BIG_DELTA_Y_PROXIMAL = 3e3

INEQUALITY_RTOL = 1e-12

BRANCH_PROX = "prox"
BRANCH_CANDIDATE = "candidate"
BRANCH_EXPLOIT = "exploit"

logger = logging.getLogger(LOGGER_NAME)


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class IapunParams:
    """Full parameter set of one IAPUN run.

    `check` covers only the scale-free inequalities between the tolerances.
    Whether the resulting stopping thresholds are representable in double
    precision depends on the magnitudes met along the run, so
    `IapunSolver.run` checks them against `precision_floor` before the first
    epoch and raises `ParameterError` there.
    """

    eps: float
    alpha: float
    gamma: float
    kappa_x: float
    omega: float
    d: float
    chi: float
    delta_x: float
    delta_y: float
    big_delta_y: float
    ell: float
    mu: float
    l1: float
    l2: float

    @classmethod
    def build(
        cls,
        spec: SmoothnessSpec,
        eps: float,
        alpha: float,
        gamma: float,
        delta_x: float,
        big_delta_y: float,
    ) -> "IapunParams":
        kappa_x = gamma / alpha
        root = math.sqrt(kappa_x)
        d = alpha / spec.l2
        prox_radius = math.sqrt(2.0 * delta_x / (gamma + 2.0 * alpha))
        chi = 6.0 * root * (
            11.0 * kappa_x * delta_x + (2.0 * spec.ell + spec.l1 + alpha) * prox_radius * d
        )
        params = cls(
            eps=eps,
            alpha=alpha,
            gamma=gamma,
            kappa_x=kappa_x,
            omega=(2.0 * root - 1.0) / (2.0 * root + 1.0),
            d=d,
            chi=chi,
            delta_x=delta_x,
            delta_y=delta_x / 2.0,
            big_delta_y=big_delta_y,
            ell=spec.ell,
            mu=spec.mu,
            l1=spec.l1,
            l2=spec.l2,
        )
        for name, value in params.to_dict().items():
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be positive and finite, got: {value}")
        return params

    @property
    def ball_radius(self) -> float:
        return self.alpha / (4.0 * self.l2)

    @property
    def eta(self) -> float:
        return self.alpha / self.l2

    @property
    def candidate_drop(self) -> float:
        return self.alpha ** 3 / (32.0 * self.l2 ** 2)

    @property
    def exploit_drop(self) -> float:
        return self.alpha ** 3 / (72.0 * self.l2 ** 2)

    @property
    def descent_bound(self) -> float:
        """Guaranteed Phi decrease of every non-terminal epoch."""
        return min(self.eps ** 2 / (50.0 * self.alpha), self.exploit_drop)

    @property
    def prox_radius(self) -> float:
        return math.sqrt(2.0 * self.delta_x / (self.gamma + 2.0 * self.alpha))

    @property
    def contraction(self) -> float:
        return 1.0 - 1.0 / (6.0 * math.sqrt(self.kappa_x))

    def inequalities(self) -> List[Tuple[str, float, float]]:
        """(name, lhs, rhs) for the ten inequalities the analysis needs."""
        chi, dx, dy, big = self.chi, self.delta_x, self.delta_y, self.big_delta_y
        a, g, eps, l2 = self.alpha, self.gamma, self.eps, self.l2
        radius = self.prox_radius
        return [
            ("chi+dx+dy <= eps^2/(3200 gamma)", chi + dx + dy, eps ** 2 / (3200.0 * g)),
            ("chi+dx+4dy <= alpha^3/(32 L2^2)", chi + dx + 4 * dy, a ** 3 / (32.0 * l2 ** 2)),
            ("chi+dx+4dy <= eps^2/(50 alpha)", chi + dx + 4 * dy, eps ** 2 / (50.0 * a)),
            ("chi+dx+8dy <= alpha^3/(72 L2^2)", chi + dx + 8 * dy, a ** 3 / (72.0 * l2 ** 2)),
            ("chi+4dy <= alpha^3/(72 L2^2)", chi + 4 * dy, a ** 3 / (72.0 * l2 ** 2)),
            ("2dy <= dx", 2 * dy, dx),
            ("Dy <= eps/4", big, eps / 4.0),
            ("2Dy/ell <= sqrt(2dx/(gamma+2alpha))", 2 * big / self.ell, radius),
            (
                "sqrt(2dx/(gamma+2alpha)) <= eps/(20(L1+2gamma))",
                radius,
                eps / (20.0 * (self.l1 + 2.0 * g)),
            ),
            ("sqrt(2dx/(gamma+2alpha)) <= alpha/(24 L2)", radius, a / (24.0 * l2)),
        ]

    def violated(self) -> List[str]:
        return [
            name
            for name, lhs, rhs in self.inequalities()
            if lhs > rhs * (1.0 + INEQUALITY_RTOL)
        ]

    def check(self) -> None:
        failed = self.violated()
        if failed:
            raise ParameterError(f"parameter inequality violated: {failed[0]}")

    def to_dict(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in self.__dataclass_fields__}


def _check_eps(spec: SmoothnessSpec, eps: float) -> None:
    if not isinstance(eps, (int, float)) or not eps > 0:
        raise ValueError(f"eps must be a positive number, got: {eps}")
    ceiling = spec.ell ** 2 / spec.l2
    if eps > ceiling:
        raise ValueError(f"eps must be <= ell^2/L2 = {ceiling:.6g}, got: {eps}")


def derive_params(spec: SmoothnessSpec, eps: float) -> IapunParams:
    """Parameters of the accuracy-eps guarantee: alpha = sqrt(L2 eps), gamma = ell."""
    _check_eps(spec, eps)
    alpha = math.sqrt(spec.l2 * eps)
    gamma = spec.ell
    kappa_x = gamma / alpha
    kappa_y = spec.kappa_y
    delta_x = min(
        spec.l2 ** 2 * eps ** 4 / (DELTA_X_CURVATURE * kappa_y ** 2 * spec.ell ** 2),
        eps ** 2 / (DELTA_X_PROXIMAL * kappa_x ** 1.5 * spec.ell),
    )
    big_delta_y = min(
        spec.l2 * eps ** 2 / (BIG_DELTA_Y_CURVATURE * kappa_y * math.sqrt(spec.ell)),
        eps / (BIG_DELTA_Y_PROXIMAL * kappa_x ** 0.75),
    )
    params = IapunParams.build(spec, eps, alpha, gamma, delta_x, big_delta_y)
    params.check()
    return params


def params_from_tolerances(
    spec: SmoothnessSpec,
    eps: float,
    delta_x: float,
    big_delta_y: float,
    strict: bool = False,
    log: Optional[logging.Logger] = None,
) -> IapunParams:
    """Parameters with user-chosen tolerances (delta_y = delta_x / 2).

    ``strict`` enforces all ten inequalities. Otherwise failures are logged and
    only ``big_delta_y <= eps/4``, which termination soundness rests on, is enforced.
    """
    _check_eps(spec, eps)
    for key, value in (("delta_x", delta_x), ("big_delta_y", big_delta_y)):
        if not isinstance(value, (int, float)) or not value > 0:
            raise ValueError(f"{key} must be a positive number, got: {value}")
    params = IapunParams.build(
        spec, eps, math.sqrt(spec.l2 * eps), spec.ell, float(delta_x), float(big_delta_y)
    )
    if big_delta_y > eps / 4.0:
        raise ParameterError(f"big_delta_y must be <= eps/4 = {eps / 4.0}, got: {big_delta_y}")
    if strict:
        params.check()
    else:
        for name in params.violated():
            (log or logger).warning(f"Tolerance schedule does not satisfy: {name}")
    return params


def complexity_estimate(spec: SmoothnessSpec, eps: float, gap: float) -> float:
    """Constant-free oracle-count scale sqrt(kappa_y) gap ell^1/2 L2^1/4 eps^-7/4."""
    return math.sqrt(spec.kappa_y) * gap * math.sqrt(spec.ell) * spec.l2 ** 0.25 / eps ** 1.75


def epoch_length_bound(params: IapunParams, gap: float) -> float:
    """Bound on T_k given Phi(x_{k,0}) - Phi* <= gap."""
    arg = 3200.0 * params.gamma * (max(gap, 0.0) + 2.0 * params.delta_y) / params.eps ** 2
    return 1.0 + 6.0 * math.sqrt(params.kappa_x) * max(0.0, math.log(arg))


def epoch_count_bound(params: IapunParams, gap: float) -> float:
    """Bound on the number of epochs given Phi(p0) - Phi* <= gap."""
    return 1.0 + 72.0 * math.sqrt(params.l2) * gap / params.eps ** 1.5


# ---------------------------------------------------------------------------
# Flags and traces
# ---------------------------------------------------------------------------
class Flag(str, enum.Enum):
    NULL = "null"
    F1 = "F1"
    F2 = "F2"
    F3 = "F3"
    F4 = "F4"
    F5 = "F5"


@dataclass(frozen=True)
class FlagOutcome:
    """Verdict of one certification; ``w`` is absent exactly for NULL and F1."""

    flag: Flag
    w: Optional[np.ndarray] = None

    def __post_init__(self):
        absent = self.flag in (Flag.NULL, Flag.F1)
        if absent != (self.w is None):
            raise ValueError(f"flag {self.flag.value} {'forbids' if absent else 'needs'} w")


@dataclass(frozen=True)
class NcPair:
    """Two points whose majorized values contradict alpha-strong convexity."""

    u: np.ndarray
    v: np.ndarray
    zeta: float

    @property
    def distance(self) -> float:
        return float(np.linalg.norm(self.u - self.v))


@dataclass
class EpochTrace:
    """Record of one outer epoch (or of one outer step of a baseline)."""

    k: int
    t_k: int
    p_prev: np.ndarray
    p: np.ndarray
    branch: str
    descent_est: float
    g_norm: float
    oracle_calls: Dict[str, int]
    iterates: List[np.ndarray] = field(default_factory=list)
    flags: List[FlagOutcome] = field(default_factory=list)
    w: Optional[np.ndarray] = None
    nc_pair: Optional[NcPair] = None
    phi_start: float = math.nan

    @property
    def flag(self) -> str:
        return self.flags[-1].flag.value if self.flags else "-"


@dataclass(frozen=True)
class IterationCaps:
    """Run limits.

    ``epoch_iters`` is an absolute cap on T_k. The adaptive cap of
    ``bound_factor`` times the epoch-length bound (running best phi in place of
    Phi*) always applies.
    """

    epochs: int = DEFAULT_CAP_EPOCHS
    epoch_iters: Optional[int] = None
    bound_factor: float = DEFAULT_BOUND_FACTOR
    agd_factor: float = DEFAULT_CAP_FACTOR

    def __post_init__(self):
        if not isinstance(self.epochs, int) or self.epochs < 1:
            raise ValueError(f"epochs must be a positive integer, got: {self.epochs}")
        if self.epoch_iters is not None and (
            not isinstance(self.epoch_iters, int) or self.epoch_iters < 1
        ):
            raise ValueError(f"epoch_iters must be a positive integer, got: {self.epoch_iters}")


@dataclass
class SolverResult:
    """Final point, per-epoch traces and oracle accounting of one run."""

    solver: str
    p: np.ndarray
    traces: List[EpochTrace]
    oracle_calls: Dict[str, int]
    certified_bound: float

    @property
    def epochs(self) -> int:
        return len(self.traces)


# ---------------------------------------------------------------------------
# Epoch state
# ---------------------------------------------------------------------------
class EpochState:
    """Mutable context of one epoch: iterates, extrapolation points, cached evaluations."""

    __slots__ = (
        "oracle",
        "params",
        "k",
        "center",
        "iterates",
        "tildes",
        "y_warm",
        "last_w",
        "nc_pair",
        "best_phi",
        "cap_factor",
        "_cache",
    )

    def __init__(
        self,
        oracle: OracleLike,
        params: IapunParams,
        center,
        k: int = 1,
        y_warm=None,
        cap_factor: float = DEFAULT_CAP_FACTOR,
    ):
        self.oracle: MeteredOracle = as_oracle(oracle)
        self.params = params
        self.k = k
        self.center = as_vector(center, self.oracle.dim_x, "center")
        self.iterates: List[np.ndarray] = [self.center.copy()]
        self.tildes: List[np.ndarray] = [self.center.copy()]
        self.y_warm = np.zeros(self.oracle.dim_y) if y_warm is None else np.array(y_warm)
        self.last_w: Optional[np.ndarray] = None
        self.nc_pair: Optional[NcPair] = None
        self.best_phi = math.inf
        self.cap_factor = cap_factor
        self._cache: Dict[bytes, InexactEval] = {}

    @property
    def t(self) -> int:
        return len(self.iterates) - 1

    @property
    def x0(self) -> np.ndarray:
        return self.iterates[0]

    def evaluate(self, x: np.ndarray) -> InexactEval:
        key = np.asarray(x, dtype=np.float64).tobytes()
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        p = self.params
        ev = phi_oracle(
            self.oracle, x, p.delta_y, p.big_delta_y, y0=self.y_warm, cap_factor=self.cap_factor
        )
        self.y_warm = ev.y
        self.best_phi = min(self.best_phi, ev.phi)
        self._cache[key] = ev
        return ev

    def phi(self, x: np.ndarray) -> float:
        return self.evaluate(x).phi

    def phi_hat(self, x: np.ndarray) -> float:
        offset = x - self.center
        return self.evaluate(x).phi + self.params.alpha * float(offset @ offset)

    def g_hat(self, x: np.ndarray) -> np.ndarray:
        return self.evaluate(x).g + 2.0 * self.params.alpha * (x - self.center)

    def prox(self, anchor: np.ndarray, ball: bool = False) -> np.ndarray:
        """Certified x ~ argmin Phi_k(x) + gamma ||x - anchor||^2, over the start ball if asked."""
        p = self.params
        sub = SubproblemSpec(
            center_p=self.center,
            center_tilde=anchor,
            alpha=p.alpha,
            gamma=p.gamma,
            ball_center=self.x0 if ball else None,
            ball_l2=p.l2 if ball else None,
        )
        solution = saddle_prox_solve(
            self.oracle, sub, self.y_warm, p.delta_x, cap_factor=self.cap_factor
        )
        self.y_warm = solution.dual
        return solution.x

    def push(self, x: np.ndarray, tilde: Optional[np.ndarray] = None) -> None:
        x = as_vector(x, self.oracle.dim_x, "x")
        if tilde is None:
            tilde = x + self.params.omega * (x - self.iterates[-1])
        self.iterates.append(x)
        self.tildes.append(np.asarray(tilde, dtype=np.float64))

    def advance(self) -> np.ndarray:
        """One extrapolated proximal step."""
        x = self.prox(self.tildes[-1])
        self.push(x)
        return x

    def zeta(self, x: np.ndarray, x_ref: np.ndarray) -> float:
        diff = x - x_ref
        return (
            self.phi_hat(x)
            - self.phi_hat(x_ref)
            - float(self.g_hat(x_ref) @ diff)
            - 0.5 * self.params.alpha * float(diff @ diff)
        )


# ---------------------------------------------------------------------------
# Certify / Exploit-Ncvx
# ---------------------------------------------------------------------------
def certify(state: EpochState, params: IapunParams) -> FlagOutcome:
    """Progress check after iteration t of the APPA loop."""
    t = state.t
    if t < 1:
        raise ValueError("certify needs at least one APPA iterate")
    x0 = state.x0
    xt = state.iterates[t]
    ceiling = state.phi_hat(x0) + params.chi + 2.0 * params.delta_y

    if state.phi_hat(xt) > ceiling:
        earlier = [state.phi(state.iterates[s]) for s in range(1, t)]
        if earlier and min(earlier) <= state.phi(x0) - params.candidate_drop:
            return FlagOutcome(Flag.F1)
        if np.linalg.norm(x0 - xt) <= params.ball_radius:
            return FlagOutcome(Flag.F2, x0)
        recomputed = state.prox(state.tildes[t - 1], ball=True)
        state.iterates[t] = recomputed
        if state.phi_hat(recomputed) > ceiling:
            return FlagOutcome(Flag.F2, x0)
        return FlagOutcome(Flag.F3, recomputed)

    w = state.prox(xt)
    offset = w - x0
    e_k = state.phi_hat(x0) - state.phi_hat(w) + 0.25 * params.alpha * float(offset @ offset)
    step = float(np.linalg.norm(w - xt))
    slack = params.chi + params.delta_x + 2.0 * params.delta_y
    if params.gamma * step ** 2 > params.contraction ** t * e_k + slack:
        return FlagOutcome(Flag.F4, w)
    if params.gamma * step <= params.eps / 40.0:
        return FlagOutcome(Flag.F5, w)
    state.last_w = w
    return FlagOutcome(Flag.NULL)


def find_nc_pair(state: EpochState, params: IapunParams, w: Optional[np.ndarray]) -> NcPair:
    """First pair (x_{t-1}, x_t), then (w, x_t), whose zeta certifies negative curvature."""
    for t in range(1, state.t + 1):
        v = state.iterates[t]
        candidates = [state.iterates[t - 1]] + ([w] if w is not None else [])
        for u in candidates:
            zeta = state.zeta(u, v)
            if zeta < -2.0 * params.delta_y - params.big_delta_y * float(np.linalg.norm(u - v)):
                return NcPair(u=u, v=v, zeta=zeta)
    raise InvariantViolation(
        f"epoch {state.k}: no negative-curvature pair among {state.t + 1} iterates"
    )


def exploit_ncvx(state: EpochState, params: IapunParams, w: Optional[np.ndarray] = None) -> np.ndarray:
    """Step of length alpha/L2 from u along +-(u - v), whichever has the lower phi."""
    pair = find_nc_pair(state, params, w)
    state.nc_pair = pair
    direction = (pair.u - pair.v) / pair.distance
    forward = pair.u + params.eta * direction
    backward = pair.u - params.eta * direction
    if state.phi(forward) <= state.phi(backward):
        return forward
    return backward


# ---------------------------------------------------------------------------
# Main loop
# ---------------------------------------------------------------------------
class IapunSolver:
    """IAPUN over one problem with fixed parameters; each `run` meters its own oracle."""

    def __init__(
        self,
        problem: MinimaxProblem,
        params: IapunParams,
        caps: Optional[IterationCaps] = None,
        log: Optional[logging.Logger] = None,
    ):
        self.problem = problem
        self.params = params
        self.caps = caps or IterationCaps()
        self.logger = log or logger

    def _thresholds(self) -> Dict[str, float]:
        p = self.params
        spec = self.problem.spec
        sigma_x = 2.0 * p.alpha + 2.0 * p.gamma - spec.ell
        half = p.delta_x / 2.0
        return {
            "inner maximization gradient": math.sqrt(
                2.0 * spec.mu * phi_target(spec, p.delta_y, p.big_delta_y) * CERTIFICATE_SAFETY
            ),
            "subproblem dual gradient": math.sqrt(2.0 * spec.mu * half * CERTIFICATE_SAFETY),
            "subproblem primal mapping": math.sqrt(2.0 * sigma_x * half * CERTIFICATE_SAFETY),
        }

    def _check_precision(self, grad_scale: float, phi_scale: float) -> None:
        low = check_thresholds(self._thresholds(), grad_scale)
        if low:
            raise ParameterError(
                f"tolerances below double-precision floor for: {', '.join(low)}"
            )
        margin = self.params.chi + 2.0 * self.params.delta_y
        if margin < precision_floor(phi_scale):
            raise ParameterError(
                f"function margin chi + 2 delta_y = {margin:.3e} is below the precision floor "
                f"{precision_floor(phi_scale):.3e}"
            )

    def _epoch_cap(self, phi_start: float, best: float) -> float:
        bound = epoch_length_bound(self.params, phi_start - best)
        cap = self.caps.bound_factor * bound
        if self.caps.epoch_iters is not None:
            cap = min(cap, self.caps.epoch_iters)
        return cap

    def run(self, p0) -> SolverResult:
        p = self.params
        oracle = self.problem.metered()
        point = as_vector(p0, self.problem.dim_x, "p0")
        traces: List[EpochTrace] = []

        self._check_precision(1.0, 1.0)
        start = phi_oracle(
            oracle, point, p.delta_y, p.big_delta_y, cap_factor=self.caps.agd_factor
        )
        self._check_precision(max(1.0, start.g_norm), start.phi)
        if start.g_norm <= 0.75 * p.eps:
            self.logger.info(f"Initial point already stationary (|g|={start.g_norm:.3e})")
            return self._result(point, traces, oracle, start.g_norm)

        y_warm = start.y
        best = start.phi
        for k in range(1, self.caps.epochs + 1):
            state = EpochState(
                oracle, p, point, k=k, y_warm=y_warm, cap_factor=self.caps.agd_factor
            )
            try:
                trace, g_norm = self._epoch(state, best)
            except SolverStallError as e:
                e.traces = traces + e.traces
                raise
            best = min(best, state.best_phi)
            y_warm = state.y_warm
            traces.append(trace)
            point = trace.p
            self.logger.info(
                f"epoch {k}: T_k={trace.t_k} flag={trace.flag} branch={trace.branch} "
                f"descent={trace.descent_est:.3e} |g|={g_norm:.3e}"
            )
            if g_norm <= 0.75 * p.eps:
                return self._result(point, traces, oracle, g_norm)

        raise SolverStallError(
            f"epoch cap {self.caps.epochs} reached without stationarity", traces=traces
        )

    def _epoch(self, state: EpochState, best: float) -> Tuple[EpochTrace, float]:
        p = self.params
        phi_start = state.phi(state.x0)
        flags: List[FlagOutcome] = []
        while True:
            cap = self._epoch_cap(phi_start, min(best, state.best_phi))
            if state.t + 1 > cap:
                raise SolverStallError(
                    f"epoch {state.k}: {state.t} iterations exceed the cap {cap:.1f}",
                    residual=float(np.linalg.norm(state.iterates[-1] - state.x0)),
                )
            state.advance()
            outcome = certify(state, p)
            flags.append(outcome)
            self.logger.debug(f"epoch {state.k} t={state.t}: {outcome.flag.value}")
            if outcome.flag is not Flag.NULL:
                break

        if outcome.flag in (Flag.F3, Flag.F5):
            new_point, branch = outcome.w, BRANCH_PROX
        else:
            candidates = list(state.iterates)
            if outcome.w is not None:
                candidates.append(outcome.w)
            values = [state.phi(c) for c in candidates]
            best_index = int(np.argmin(values))
            if values[best_index] < phi_start - p.candidate_drop:
                new_point, branch = candidates[best_index], BRANCH_CANDIDATE
            else:
                new_point, branch = exploit_ncvx(state, p, outcome.w), BRANCH_EXPLOIT

        final = state.evaluate(new_point)
        trace = EpochTrace(
            k=state.k,
            t_k=state.t,
            p_prev=state.center,
            p=new_point,
            branch=branch,
            descent_est=final.phi - phi_start,
            g_norm=final.g_norm,
            oracle_calls=state.oracle.counter.snapshot(),
            iterates=list(state.iterates),
            flags=flags,
            w=outcome.w,
            nc_pair=state.nc_pair,
            phi_start=phi_start,
        )
        return trace, final.g_norm

    def _result(self, point, traces, oracle, g_norm) -> SolverResult:
        return SolverResult(
            solver="iapun",
            p=point,
            traces=traces,
            oracle_calls=oracle.counter.snapshot(),
            certified_bound=g_norm + self.params.big_delta_y,
        )


def run(
    problem: MinimaxProblem,
    p0,
    params: IapunParams,
    caps: Optional[IterationCaps] = None,
) -> Tuple[np.ndarray, List[EpochTrace]]:
    """Run IAPUN from ``p0``; returns the final point and the epoch traces."""
    result = IapunSolver(problem, params, caps).run(p0)
    return result.p, result.traces
