#!/usr/bin/env python3
"""Zero-chain hard instances for NC-SC minimax problems, plus synthetic families.

The unscaled instance over x in R^(2T+1) and T blocks y_i in R^n is (0-based)::

    fbar(x; Y) = sqrt(nu)/2 (x[0] - 1)^2
               + 1/2 sum_{i=1..T} (x[2i-2] - x[2i-1])^2
               + sum_{i=1..T} h(x[2i-1], x[2i]; Y_i)
               + c sum_{j=1..2T} x[j]^2
               + nu sum_{j=0..2T-1} Upsilon(x[j])

    h(x, z; y) = -1/2 y^T M y + sqrt(C/n) (x y[0] - z y[n-1]),  M = I/n^2 + A

with A the path-graph Laplacian. Maximizing out every block gives
``h^m(x, z) = C (a1 x^2 / 2 - a2 x z + a1 z^2 / 2)``. With ``C = 1/a2`` and
``c = C (a2 - a1) / 2`` the h-blocks and the c-terms add up to the missing chain
couplings 1/2 (x[2i-1] - x[2i])^2, so the primal envelope is the chain function::

    fnc(x) = sqrt(nu)/2 (x[0] - 1)^2 + 1/2 sum_{j=0..2T-1} (x[j] - x[j+1])^2
           + nu sum_{j=0..2T-1} Upsilon(x[j])

The scaled instance is ``f(x, y) = s * fbar(x / lam, y / lam)`` with
``s = ell lam^2 / ellbar1``.

Tridiagonal solves go through ``scipy.linalg.solveh_banded``. The quadrature
check of Upsilon uses ``scipy.integrate.quad``.
"""

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.linalg import solveh_banded

from minimax_problem import (
    LOGGER_NAME,
    MinimaxProblem,
    ReferenceSurface,
    SmoothnessSpec,
    as_vector,
)

SCHEMA_VERSION = 1

UPSILON_WEIGHT = 120.0
MIN_BLOCK_DIM = 10

# Absolute-constant estimation: sup over a dense grid, times a safety factor.
ABS_SAFETY = 2.0
ABS_GRID = (-10.0, 10.0, 20001)
ABS_N_GRID = (10, 20, 40, 80, 160, 320)
# Grid sup of Upsilon'' between nodes 0.001 apart.
UPSILON_SUP_SAFETY = 1.01

# Sanity brackets for the block constants; n -> inf limits are coth(1) and 1/sinh(1).
A1_BRACKET = (1.1, 1.5)
A2_BRACKET = (0.7, 1.0)

# Each of the T chain links contributes at most this much to fnc(0) - inf fnc, per nu.
LINK_GAP = 20.0

logger = logging.getLogger(LOGGER_NAME)


# ---------------------------------------------------------------------------
# Upsilon and its derivatives
# ---------------------------------------------------------------------------
def _upsilon_antiderivative(t):
    # d/dt = t^2 (t - 1) / (1 + t^2)
    return 0.5 * t * t - t + np.arctan(t) - 0.5 * np.log1p(t * t)


_UPSILON_ONE = float(_upsilon_antiderivative(1.0))


def upsilon(x):
    """Upsilon(x) = 120 * integral_1^x t^2 (t - 1) / (1 + t^2) dt, in closed form."""
    x = np.asarray(x, dtype=np.float64)
    return UPSILON_WEIGHT * (_upsilon_antiderivative(x) - _UPSILON_ONE)


def upsilon_prime(x):
    x = np.asarray(x, dtype=np.float64)
    return UPSILON_WEIGHT * x * x * (x - 1.0) / (1.0 + x * x)


def upsilon_second(x):
    x = np.asarray(x, dtype=np.float64)
    return UPSILON_WEIGHT * (x ** 4 + 3.0 * x * x - 2.0 * x) / (1.0 + x * x) ** 2


def upsilon_third(x):
    x = np.asarray(x, dtype=np.float64)
    return (
        UPSILON_WEIGHT
        * (-2.0 * x ** 3 + 6.0 * x * x + 6.0 * x - 2.0)
        / (1.0 + x * x) ** 3
    )


def upsilon_by_quadrature(x: float) -> float:
    """Upsilon(x) by adaptive quadrature of its defining integrand."""
    value, _ = quad(
        lambda t: t * t * (t - 1.0) / (1.0 + t * t), 1.0, float(x), epsabs=1e-14, epsrel=1e-13
    )
    return UPSILON_WEIGHT * value


# ---------------------------------------------------------------------------
# Inner blocks
# ---------------------------------------------------------------------------
def _block_banded(n: int) -> np.ndarray:
    """Upper banded storage of M = I/n^2 + A for solveh_banded."""
    ab = np.zeros((2, n))
    ab[0, 1:] = -1.0
    ab[1, :] = 2.0 + 1.0 / n ** 2
    ab[1, 0] = ab[1, -1] = 1.0 + 1.0 / n ** 2
    return ab


def path_laplacian(n: int) -> np.ndarray:
    """Dense A: the Laplacian of the path graph on n nodes."""
    lap = 2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    lap[0, 0] = lap[-1, -1] = 1.0
    return lap


def h_max(x: float, z: float, n: int, big_c: float) -> Tuple[float, float, float]:
    """max_y h(x, z; y) by a direct tridiagonal solve, with the block constants.

    Returns ``(value, a1, a2)`` where ``value = (C / 2n) b^T M^{-1} b`` for
    ``b = (x, 0, ..., 0, -z)``, ``a1 = (M^{-1})_{11} / n`` and
    ``a2 = (M^{-1})_{1n} / n``.
    """
    if n < MIN_BLOCK_DIM:
        raise ValueError(f"n must be >= {MIN_BLOCK_DIM}, got: {n}")
    ab = _block_banded(n)
    rhs = np.zeros((n, 3))
    rhs[0, 0], rhs[-1, 0] = x, -z
    rhs[0, 1] = 1.0
    rhs[-1, 2] = 1.0
    sol = solveh_banded(ab, rhs)
    b = rhs[:, 0]
    value = 0.5 * (big_c / n) * float(b @ sol[:, 0])
    a1 = sol[0, 1] / n
    a2 = sol[-1, 1] / n
    return value, float(a1), float(a2)


@lru_cache(maxsize=None)
def chain_constants(n: int) -> Tuple[float, float, float, float]:
    """(a1, a2, C, c) for block dimension n, with C = 1/a2 and c = C(a2 - a1)/2."""
    _, a1, a2 = h_max(0.0, 0.0, n, 1.0)
    if not (A1_BRACKET[0] <= a1 <= A1_BRACKET[1] and A2_BRACKET[0] <= a2 <= A2_BRACKET[1]):
        raise ArithmeticError(f"block constants out of bracket for n={n}: a1={a1}, a2={a2}")
    big_c = 1.0 / a2
    return a1, a2, big_c, big_c * (a2 - a1) / 2.0


def quadratic_hessian(t_blocks: int, n: int, nu: float) -> np.ndarray:
    """Hessian of fbar without the Upsilon terms, over z = (x, Y_1, ..., Y_T).

    Every term but the Upsilon sum is quadratic, so this matrix is constant.
    """
    _, _, big_c, c = chain_constants(n)
    dx = 2 * t_blocks + 1
    dim = dx + t_blocks * n
    hess = np.zeros((dim, dim))
    hess[0, 0] += math.sqrt(nu)
    for i in range(1, t_blocks + 1):
        a, b = 2 * i - 2, 2 * i - 1
        hess[a, a] += 1.0
        hess[b, b] += 1.0
        hess[a, b] -= 1.0
        hess[b, a] -= 1.0
    for j in range(1, dx):
        hess[j, j] += 2.0 * c
    block = -(np.eye(n) / n ** 2 + path_laplacian(n))
    cross = math.sqrt(big_c / n)
    for i in range(1, t_blocks + 1):
        start = dx + (i - 1) * n
        hess[start:start + n, start:start + n] = block
        hess[2 * i - 1, start] = hess[start, 2 * i - 1] = cross
        hess[2 * i, start + n - 1] = hess[start + n - 1, 2 * i] = -cross
    return hess


@lru_cache(maxsize=1)
def upsilon_sups() -> Tuple[float, float]:
    """(sup|Upsilon''|, sup|Upsilon'''|) on the ABS_GRID grid."""
    grid = np.linspace(*ABS_GRID)
    sup2 = float(np.max(np.abs(upsilon_second(grid))))
    sup3 = float(np.max(np.abs(upsilon_third(grid))))
    return sup2, sup3


@lru_cache(maxsize=1)
def estimate_abs_constants() -> Tuple[float, float]:
    """Absolute smoothness constants (ellbar1, ellbar2) of the unscaled family.

    ellbar1 doubles sup|Upsilon''| on a dense grid plus the largest Gershgorin
    bound of the quadratic part over an n-grid (nu = 1, T = 2 covers every row
    type; the bound decreases in n). ellbar2 doubles sup|Upsilon'''|.
    """
    sup2, sup3 = upsilon_sups()
    gershgorin = max(
        float(np.max(np.sum(np.abs(quadratic_hessian(2, n, 1.0)), axis=1))) for n in ABS_N_GRID
    )
    ellbar1 = ABS_SAFETY * (sup2 + gershgorin)
    ellbar2 = ABS_SAFETY * sup3
    logger.debug(
        f"absolute constants: sup|U''|={sup2:.4f}, gershgorin={gershgorin:.4f}, "
        f"sup|U'''|={sup3:.4f} -> ellbar1={ellbar1:.4f}, ellbar2={ellbar2:.4f}"
    )
    return ellbar1, ellbar2


def realized_ell_hat(nu: float, n: int, big_c: float, c: float) -> float:
    """Gradient-Lipschitz bound of fbar at one (nu, n), valid for every T.

    The Hessian splits into the x-block (pair links, sqrt(nu), 2c and
    nu Upsilon'' on the diagonal), the y-block -M and the cross entries
    sqrt(C/n), at most one per row and column. Hence::

        ||H|| <= max(2 + sqrt(nu) + 2|c|, 4 + 1/n^2) + sqrt(C/n) + nu sup|Upsilon''|

    Unlike ellbar1 this shrinks with nu. It fixes kappa_y = ell_hat n^2.
    """
    sup2, _ = upsilon_sups()
    structural = max(2.0 + math.sqrt(nu) + 2.0 * abs(c), 4.0 + 1.0 / n ** 2)
    return structural + math.sqrt(big_c / n) + nu * sup2 * UPSILON_SUP_SAFETY


def abs_constants_provenance() -> Dict[str, object]:
    return {
        "safety": ABS_SAFETY,
        "upsilon_grid": list(ABS_GRID),
        "n_grid": list(ABS_N_GRID),
        "method": "sup|U''|+gershgorin(quadratic part), sup|U'''| on grid",
    }


# ---------------------------------------------------------------------------
# Instance specification
# ---------------------------------------------------------------------------
@dataclass
class HardInstanceSpec:
    """All constants of one (scaled) hard instance. Serializes to JSON."""

    t_blocks: int
    n: int
    nu: float
    lam: float
    c: float
    big_c: float
    a1: float
    a2: float
    ellbar1: float
    ellbar2: float
    ell: float
    mu: float
    l2: float
    delta: Optional[float] = None
    eps: Optional[float] = None
    schema_version: int = SCHEMA_VERSION
    provenance: Dict[str, object] = field(default_factory=abs_constants_provenance)

    def __post_init__(self):
        if not isinstance(self.t_blocks, int) or self.t_blocks < 1:
            raise ValueError(f"t_blocks must be a positive integer, got: {self.t_blocks}")
        if not isinstance(self.n, int) or self.n < MIN_BLOCK_DIM:
            raise ValueError(f"n must be an integer >= {MIN_BLOCK_DIM}, got: {self.n}")
        if not 0 < self.nu <= 1.0 + 1e-12:
            raise ValueError(f"nu must be in (0, 1], got: {self.nu}")
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got: {self.lam}")

    @property
    def dim_x(self) -> int:
        return 2 * self.t_blocks + 1

    @property
    def dim_y(self) -> int:
        return self.t_blocks * self.n

    @property
    def scale(self) -> float:
        return self.ell * self.lam ** 2 / self.ellbar1

    @property
    def mu_realized(self) -> float:
        """Strong-concavity modulus actually present: s / lam^2 / n^2."""
        return self.scale / self.lam ** 2 / self.n ** 2

    @property
    def ell_realized(self) -> float:
        """Gradient-Lipschitz bound at this nu and n, never above the requested ell."""
        ell_hat = realized_ell_hat(self.nu, self.n, self.big_c, self.c)
        return min(self.ell, self.scale / self.lam ** 2 * ell_hat)

    @property
    def kappa_realized(self) -> float:
        return self.ell_realized / self.mu_realized

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> "HardInstanceSpec":
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ValueError(f"schema_version must be {SCHEMA_VERSION}, got: {version}")
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"Unknown HardInstanceSpec fields: {unknown}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "HardInstanceSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValueError(f"Invalid JSON in instance spec: {e}") from e
        return cls.from_dict(data)


def lower_bound_estimate(spec: HardInstanceSpec) -> int:
    """Queries n (T - 1) below which no iterate leaves the zero chain's last link."""
    return spec.n * (spec.t_blocks - 1)


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------
class _HardOracle:
    """Value and gradients of the scaled instance for one HardInstanceSpec."""

    __slots__ = ("spec", "ab", "cross", "sqrt_nu")

    def __init__(self, spec: HardInstanceSpec):
        self.spec = spec
        self.ab = _block_banded(spec.n)
        self.cross = math.sqrt(spec.big_c / spec.n)
        self.sqrt_nu = math.sqrt(spec.nu)

    def _unscale(self, x, y):
        spec = self.spec
        u = np.asarray(x, dtype=np.float64) / spec.lam
        blocks = np.asarray(y, dtype=np.float64).reshape(spec.t_blocks, spec.n) / spec.lam
        return u, blocks

    def _apply_m(self, blocks: np.ndarray) -> np.ndarray:
        n = self.spec.n
        out = blocks / n ** 2
        diff = blocks[:, 1:] - blocks[:, :-1]
        out[:, :-1] -= diff
        out[:, 1:] += diff
        return out

    def value(self, x, y) -> float:
        spec = self.spec
        u, blocks = self._unscale(x, y)
        odd = u[0:-1:2] - u[1::2]
        val = 0.5 * self.sqrt_nu * (u[0] - 1.0) ** 2
        val += 0.5 * float(odd @ odd)
        val += -0.5 * float(np.sum(blocks * self._apply_m(blocks)))
        val += self.cross * float(u[1::2] @ blocks[:, 0] - u[2::2] @ blocks[:, -1])
        val += spec.c * float(u[1:] @ u[1:])
        val += spec.nu * float(np.sum(upsilon(u[:-1])))
        return spec.scale * val

    def grad_x(self, x, y) -> np.ndarray:
        spec = self.spec
        u, blocks = self._unscale(x, y)
        g = np.zeros_like(u)
        g[0] += self.sqrt_nu * (u[0] - 1.0)
        odd = u[0:-1:2] - u[1::2]
        g[0:-1:2] += odd
        g[1::2] -= odd
        g[1::2] += self.cross * blocks[:, 0]
        g[2::2] -= self.cross * blocks[:, -1]
        g[1:] += 2.0 * spec.c * u[1:]
        g[:-1] += spec.nu * upsilon_prime(u[:-1])
        return (spec.scale / spec.lam) * g

    def grad_y(self, x, y) -> np.ndarray:
        spec = self.spec
        u, blocks = self._unscale(x, y)
        g = -self._apply_m(blocks)
        g[:, 0] += self.cross * u[1::2]
        g[:, -1] -= self.cross * u[2::2]
        return (spec.scale / spec.lam) * g.reshape(-1)

    def y_star(self, x) -> np.ndarray:
        """Blockwise maximizer of f(x, .)."""
        spec = self.spec
        u = np.asarray(x, dtype=np.float64) / spec.lam
        rhs = np.zeros((spec.n, spec.t_blocks))
        rhs[0, :] = self.cross * u[1::2]
        rhs[-1, :] = -self.cross * u[2::2]
        blocks = solveh_banded(self.ab, rhs)
        return spec.lam * blocks.T.reshape(-1)


def chain_value(u: np.ndarray, nu: float) -> Tuple[float, np.ndarray]:
    """Unscaled chain function fnc(u) and its gradient."""
    links = u[:-1] - u[1:]
    sqrt_nu = math.sqrt(nu)
    value = 0.5 * sqrt_nu * (u[0] - 1.0) ** 2 + 0.5 * float(links @ links)
    value += nu * float(np.sum(upsilon(u[:-1])))
    grad = np.zeros_like(u)
    grad[0] += sqrt_nu * (u[0] - 1.0)
    grad[:-1] += links
    grad[1:] -= links
    grad[:-1] += nu * upsilon_prime(u[:-1])
    return value, grad


def phi_closed_form(x, spec: HardInstanceSpec) -> Tuple[float, np.ndarray]:
    """Primal envelope max_y f(x, y) of the scaled instance and its exact gradient."""
    x = as_vector(x, spec.dim_x, "x")
    value, grad = chain_value(x / spec.lam, spec.nu)
    return spec.scale * value, (spec.scale / spec.lam) * grad


def instance_problem(spec: HardInstanceSpec, name: Optional[str] = None) -> MinimaxProblem:
    """Wrap a HardInstanceSpec as a MinimaxProblem with its closed-form reference."""
    oracle = _HardOracle(spec)
    reference = ReferenceSurface(
        phi=lambda x: phi_closed_form(x, spec)[0],
        grad_phi=lambda x: phi_closed_form(x, spec)[1],
        y_star=oracle.y_star,
    )
    smooth = SmoothnessSpec(ell=spec.ell_realized, mu=spec.mu_realized, l2=spec.l2)
    return MinimaxProblem(
        spec.dim_x,
        spec.dim_y,
        smooth,
        oracle.value,
        oracle.grad_x,
        oracle.grad_y,
        reference=reference,
        name=name or f"hard(T={spec.t_blocks},n={spec.n})",
        meta=spec,
    )


def build_unscaled(t_blocks: int, nu: float, n: int) -> MinimaxProblem:
    """The unscaled instance fbar with ell = ellbar1, mu = 1/n^2 and L2 = nu * ellbar2."""
    if not isinstance(t_blocks, int) or t_blocks < 1:
        raise ValueError(f"t_blocks must be a positive integer, got: {t_blocks}")
    if not isinstance(n, int) or n < MIN_BLOCK_DIM:
        raise ValueError(f"n must be an integer >= {MIN_BLOCK_DIM}, got: {n}")
    if not 0 < nu <= 1:
        raise ValueError(f"nu must be in (0, 1], got: {nu}")
    ellbar1, ellbar2 = estimate_abs_constants()
    a1, a2, big_c, c = chain_constants(n)
    spec = HardInstanceSpec(
        t_blocks=t_blocks,
        n=n,
        nu=float(nu),
        lam=1.0,
        c=c,
        big_c=big_c,
        a1=a1,
        a2=a2,
        ellbar1=ellbar1,
        ellbar2=ellbar2,
        ell=ellbar1,
        mu=1.0 / n ** 2,
        l2=nu * ellbar2,
    )
    return instance_problem(spec)


def check_eps_ceilings(ell: float, l2: float, delta: float, eps: float) -> None:
    """Raise ValueError when eps exceeds either ceiling of the lower-bound construction."""
    ellbar1, ellbar2 = estimate_abs_constants()
    r1, r2 = ell / ellbar1, l2 / ellbar2
    ceiling_nu = 0.25 * r1 ** 2 / r2
    ceiling_gap = 0.25 * delta ** 0.7 * r1 ** -0.1 * r2 ** 0.4
    if eps > ceiling_nu:
        raise ValueError(
            f"eps must be <= (ell/ellbar1)^2 (L2/ellbar2)^-1 / 4 = {ceiling_nu:.6g}, got: {eps}"
        )
    if eps > ceiling_gap:
        raise ValueError(
            "eps must be <= Delta^0.7 (ell/ellbar1)^-0.1 (L2/ellbar2)^0.4 / 4 = "
            f"{ceiling_gap:.6g}, got: {eps}"
        )


def scale_instance(
    ell: float, mu: float, l2: float, delta: float, eps: float
) -> Tuple[HardInstanceSpec, MinimaxProblem]:
    """Scale the chain instance to smoothness (ell, mu, L2), initial gap delta and accuracy eps."""
    for key, value in (("ell", ell), ("mu", mu), ("l2", l2), ("delta", delta), ("eps", eps)):
        if not isinstance(value, (int, float)) or not value > 0:
            raise ValueError(f"{key} must be a positive number, got: {value}")
    if ell < mu:
        raise ValueError(f"kappa_y = ell/mu must be >= 1, got: {ell / mu}")
    check_eps_ceilings(ell, l2, delta, eps)

    ellbar1, ellbar2 = estimate_abs_constants()
    r1, r2 = ell / ellbar1, l2 / ellbar2
    lam = (4.0 * eps / (r1 ** 0.25 * r2 ** 0.75)) ** (4.0 / 7.0)
    nu = l2 * ellbar1 * lam / (ellbar2 * ell)
    if nu > 1.0 + 1e-12:
        raise ArithmeticError(f"nu = {nu} exceeds 1 despite the eps ceiling")
    nu = min(nu, 1.0)
    n = max(MIN_BLOCK_DIM, int(math.ceil(math.sqrt((ell / mu) / ellbar1))))
    unit = ell * lam ** 2 / (2.0 * ellbar1)
    t_blocks = int(math.floor((delta - math.sqrt(nu) * unit) / (LINK_GAP * nu * unit)))
    if t_blocks < 1:
        raise ValueError(
            f"instance too small: delta={delta} yields T={t_blocks} chain links at eps={eps}"
        )

    a1, a2, big_c, c = chain_constants(n)
    spec = HardInstanceSpec(
        t_blocks=t_blocks,
        n=n,
        nu=nu,
        lam=lam,
        c=c,
        big_c=big_c,
        a1=a1,
        a2=a2,
        ellbar1=ellbar1,
        ellbar2=ellbar2,
        ell=float(ell),
        mu=float(mu),
        l2=float(l2),
        delta=float(delta),
        eps=float(eps),
    )
    logger.info(
        f"scaled instance: T={t_blocks}, n={n}, nu={nu:.4g}, lam={lam:.4g}, "
        f"ell_realized={spec.ell_realized:.4g}, mu_realized={spec.mu_realized:.4g}, "
        f"kappa_y={spec.kappa_realized:.4g}"
    )
    return spec, instance_problem(spec)


# ---------------------------------------------------------------------------
# Zero-chain support tracking
# ---------------------------------------------------------------------------
def chain_order(t_blocks: int, n: int) -> List[int]:
    """Flat indices of z = (x, Y) in the order the zero chain reaches them."""
    dx = 2 * t_blocks + 1
    order = [0, 1]
    for i in range(1, t_blocks + 1):
        start = dx + (i - 1) * n
        order.extend(range(start, start + n))
        order.append(2 * i)
        if i < t_blocks:
            order.append(2 * i + 1)
    return order


def coordinate_label(index: int, t_blocks: int, n: int) -> str:
    dx = 2 * t_blocks + 1
    if index < dx:
        return f"x{index + 1}"
    block, pos = divmod(index - dx, n)
    return f"y({block + 1}){pos + 1}"


@dataclass
class SupportReport:
    ok: bool
    visited: List[str]
    first_violation: Optional[int] = None


class SupportTracker:
    """Records the order in which coordinates of (x, y) first become nonzero."""

    __slots__ = ("t_blocks", "n", "visited", "steps", "_seen")

    def __init__(self, t_blocks: int, n: int):
        self.t_blocks = t_blocks
        self.n = n
        self.visited: List[int] = []
        self.steps: List[int] = []
        self._seen = set()

    def observe(self, x, y) -> List[int]:
        """Add the coordinates that are nonzero for the first time; returns them."""
        z = np.concatenate([np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)])
        fresh = [int(i) for i in np.flatnonzero(z) if int(i) not in self._seen]
        self._seen.update(fresh)
        self.visited.extend(fresh)
        self.steps.append(len(fresh))
        return fresh

    def report(self) -> SupportReport:
        """Compare the visit order with the chain order; a mismatch is a verdict, not an error."""
        expected = chain_order(self.t_blocks, self.n)
        labels = [coordinate_label(i, self.t_blocks, self.n) for i in self.visited]
        for pos, index in enumerate(self.visited):
            if pos >= len(expected) or expected[pos] != index:
                return SupportReport(ok=False, visited=labels, first_violation=pos)
        return SupportReport(ok=True, visited=labels)


def track_support(
    iterates: Iterable[Tuple[np.ndarray, np.ndarray]], t_blocks: int, n: int
) -> SupportTracker:
    """Feed every queried (x, y) of a first-order run from the origin into a tracker."""
    tracker = SupportTracker(t_blocks, n)
    for x, y in iterates:
        tracker.observe(x, y)
    return tracker


def descent_ascent_path(
    problem: MinimaxProblem, steps: int, step_x: float, step_y: float
) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """Simultaneous exact-gradient descent-ascent from the origin; yields each new iterate."""
    oracle = problem.metered()
    x = np.zeros(problem.dim_x)
    y = np.zeros(problem.dim_y)
    for _ in range(steps):
        gx = oracle.grad_x(x, y)
        gy = oracle.grad_y(x, y)
        x, y = x - step_x * gx, y + step_y * gy
        yield x.copy(), y.copy()


# ---------------------------------------------------------------------------
# Coupled-quadratic family
# ---------------------------------------------------------------------------
def coupled_quadratic(
    dim: int,
    mu: float,
    coupling=1.0,
    a: float = 1.0,
    b: float = 0.0,
    l2: Optional[float] = None,
    name: Optional[str] = None,
) -> MinimaxProblem:
    """f(x, y) = q(x) + x^T B y - (mu/2)||y||^2 with q(x) = (a/2)||x||^2 + b sum cos(x_i).

    Closed forms: y*(x) = B^T x / mu, Phi = q + ||B^T x||^2 / (2 mu) and
    grad Phi = a x - b sin(x) + B B^T x / mu. Phi is convex when a > |b|, with its
    minimum at the origin. The Hessian of Phi is |b|-Lipschitz. For b = 0 the
    nominal ``l2`` (default 1.0) is reported.
    """
    if not isinstance(dim, int) or dim < 1:
        raise ValueError(f"dim must be a positive integer, got: {dim}")
    if not mu > 0:
        raise ValueError(f"mu must be positive, got: {mu}")
    if np.isscalar(coupling):
        mat = float(coupling) * np.eye(dim)
    else:
        mat = np.array(coupling, dtype=np.float64)
        if mat.ndim != 2 or mat.shape[0] != dim:
            raise ValueError(f"coupling must be a scalar or a {dim} x m matrix")
    dim_y = mat.shape[1]
    gram = mat @ mat.T / mu

    ell = max(abs(a) + abs(b), mu) + float(np.linalg.norm(mat, 2))
    if l2 is None:
        l2 = abs(b) if b != 0 else 1.0
    spec = SmoothnessSpec(ell=ell, mu=float(mu), l2=float(l2))

    def f(x, y):
        return 0.5 * a * (x @ x) + b * np.sum(np.cos(x)) + x @ mat @ y - 0.5 * mu * (y @ y)

    def grad_x(x, y):
        return a * x - b * np.sin(x) + mat @ y

    def grad_y(x, y):
        return mat.T @ x - mu * y

    def phi(x):
        x = np.asarray(x, dtype=np.float64)
        return float(0.5 * a * (x @ x) + b * np.sum(np.cos(x)) + 0.5 * x @ gram @ x)

    def grad_phi(x):
        x = np.asarray(x, dtype=np.float64)
        return a * x - b * np.sin(x) + gram @ x

    reference = ReferenceSurface(phi=phi, grad_phi=grad_phi, y_star=lambda x: mat.T @ x / mu)
    label = name or f"coupled_quadratic(dim={dim},a={a},b={b},mu={mu})"
    return MinimaxProblem(dim, dim_y, spec, f, grad_x, grad_y, reference=reference, name=label)


def random_points(problem: MinimaxProblem, count: int, seed: int = 0, radius: float = 1.0):
    """``count`` points uniform in [-radius, radius]^dim_x for Lipschitz estimates."""
    rng = np.random.default_rng(seed)
    return [rng.uniform(-radius, radius, problem.dim_x) for _ in range(count)]


def joint_gradient(problem: MinimaxProblem):
    """z = (x, y) -> (grad_x f, grad_y f), the map whose Lipschitz constant is ell."""
    dim_x = problem.dim_x
    oracle = problem.metered()

    def grad(z):
        x, y = z[:dim_x], z[dim_x:]
        return np.concatenate([oracle.grad_x(x, y), oracle.grad_y(x, y)])

    return grad


def estimate_lipschitz(
    func, points: Sequence[np.ndarray], seed: int = 0, step: float = 1e-3
) -> float:
    """Largest observed ||func(z + d) - func(z)|| / ||d|| over random short displacements."""
    rng = np.random.default_rng(seed)
    best = 0.0
    for z in points:
        d = rng.standard_normal(z.shape[0])
        d *= step / np.linalg.norm(d)
        ratio = np.linalg.norm(np.asarray(func(z + d)) - np.asarray(func(z))) / step
        best = max(best, float(ratio))
    return best


def estimate_hessian_lipschitz(
    grad, points: Sequence[np.ndarray], seed: int = 0, step: float = 1e-2
) -> float:
    """Largest observed ``||grad(z + d) - 2 grad(z) + grad(z - d)|| / ||d||^2``.

    The central second difference approximates the third derivative along d, so
    this is a lower estimate of the Hessian-Lipschitz constant of the potential of ``grad``.
    """
    rng = np.random.default_rng(seed)
    best = 0.0
    for z in points:
        d = rng.standard_normal(z.shape[0])
        d *= step / np.linalg.norm(d)
        second = np.asarray(grad(z + d)) - 2.0 * np.asarray(grad(z)) + np.asarray(grad(z - d))
        best = max(best, float(np.linalg.norm(second)) / step ** 2)
    return best
