#!/usr/bin/env python3
"""Print the hard-instance constants and check the smoothness of a scaled instance.

Shows the absolute constants (ellbar1, ellbar2) with their provenance, the block
constants (a1, a2, C, c) for a list of n, and then compares the realized ell
(joint gradient of f) and the declared L2 (Hessian of Phi) of a scaled instance
against finite-difference estimates at random points:

    python tools/check_constants.py --n 10 20 40 --eps 0.1 --delta 5

An estimate above 1.1 times its constant means a bound is wrong.
"""

import argparse
import logging
import sys

import numpy as np

sys.path.insert(0, ".")

from hard_instances import (  # noqa: E402
    abs_constants_provenance,
    chain_constants,
    estimate_abs_constants,
    estimate_hessian_lipschitz,
    estimate_lipschitz,
    joint_gradient,
    random_points,
    scale_instance,
)
from minimax_problem import finite_diff_grad  # noqa: E402

TOLERANCE = 1.1


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, nargs="+", default=[10, 20, 40, 80], help="block dimensions")
    ap.add_argument("--eps", type=float, default=0.1, help="accuracy of the scaled instance")
    ap.add_argument("--delta", type=float, default=5.0, help="initial gap of the scaled instance")
    ap.add_argument("--kappa", type=float, default=100.0, help="requested ell / mu")
    ap.add_argument("--l2-divisor", type=float, default=1.0, help="L2 = ellbar2 / divisor")
    ap.add_argument("--points", type=int, default=20, help="random points per estimate")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
    log = logging.getLogger("check_constants")

    ellbar1, ellbar2 = estimate_abs_constants()
    log.info(f"ellbar1={ellbar1:.6f} ellbar2={ellbar2:.6f}")
    log.info(f"provenance: {abs_constants_provenance()}")
    for n in args.n:
        a1, a2, big_c, c = chain_constants(n)
        log.info(f"n={n:<5} a1={a1:.8f} a2={a2:.8f} C={big_c:.8f} c={c:.8f}")

    try:
        spec, problem = scale_instance(
            ellbar1, ellbar1 / args.kappa, ellbar2 / args.l2_divisor, args.delta, args.eps
        )
    except (ValueError, ArithmeticError) as e:
        log.error(f"cannot scale instance: {e}")
        return 1

    rng = np.random.default_rng(args.seed)
    radius = 2.0 * spec.lam
    dim = spec.dim_x + spec.dim_y
    joint_points = [rng.uniform(-radius, radius, dim) for _ in range(args.points)]
    ell_est = estimate_lipschitz(
        joint_gradient(problem), joint_points, seed=args.seed, step=1e-3 * spec.lam
    )
    points = random_points(problem, args.points, seed=args.seed, radius=radius)
    grad_phi = problem.reference.grad_phi
    l2_est = estimate_hessian_lipschitz(grad_phi, points, seed=args.seed, step=1e-2 * spec.lam)

    fd = finite_diff_grad(problem.reference.phi, points[0])
    fd_err = float(np.linalg.norm(fd - grad_phi(points[0])))

    log.info(f"T={spec.t_blocks} n={spec.n} nu={spec.nu:.4g} lam={spec.lam:.4g}")
    log.info(f"kappa_y: requested={args.kappa:.6g} realized={spec.kappa_realized:.6g}")
    log.info(
        f"ell: requested={spec.ell:.6g} realized={spec.ell_realized:.6g} estimate={ell_est:.6g}"
    )
    log.info(f"L2:  declared={spec.l2:.6g} estimate={l2_est:.6g}")
    log.info(f"finite-difference error of grad Phi at the first point: {fd_err:.3e}")
    if ell_est > TOLERANCE * spec.ell_realized or l2_est > TOLERANCE * spec.l2:
        log.warning("an estimate exceeds its constant")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
