"""Newton continuation experiment over the graph-defect system.

For a ladder of start radii, draw random tilt matrices, solve the four
defect equations by Newton iteration, and tabulate how far solutions move,
how large they end up, and both residual families at the solution.  The
interesting outputs are the residual columns (machine-precision when the
solver converges) and the fraction of solutions that stay inside the
radius-0.3 ball where the graph-scale equivalence is certified.

    python3 scripts/graph_newton_experiment.py --per-radius 100
"""

import argparse
import sys

import numpy as np

from cayleykit.graphs import (
    GraphCoefficients,
    graph_frame,
    random_graph_coefficients,
    residual_quadratics,
    solve_tau_system,
)
from cayleykit.errors import ConvergenceError
from cayleykit.spin7 import phi0, tau_eval, tau_norm


def distance(a, b):
    da = np.array([[float(x) for x in row] for row in a.entries])
    db = np.array([[float(x) for x in row] for row in b.entries])
    return float(np.sqrt(np.sum((da - db) ** 2)))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--per-radius", type=int, default=50)
    ap.add_argument("--radii", default="0.05,0.1,0.15,0.2,0.25",
                    help="comma-separated start radii")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    radii = [float(r) for r in args.radii.split(",")]
    Phi = phi0(backend="float")
    rng = np.random.default_rng(args.seed)

    print("%8s %6s %6s %10s %10s %12s %12s %8s" % (
        "radius", "n", "fail", "max|sol|", "max move",
        "worst quad", "worst defect", "in-ball"))
    for radius in radii:
        failures = 0
        worst_norm = worst_move = worst_quad = worst_defect = 0.0
        in_ball = 0
        for _ in range(args.per_radius):
            start = random_graph_coefficients(rng, radius=radius)
            try:
                sol = solve_tau_system(start)
            except ConvergenceError:
                failures += 1
                continue
            worst_norm = max(worst_norm, sol.norm())
            worst_move = max(worst_move, distance(start, sol))
            worst_quad = max(worst_quad, max(
                abs(float(q)) for q in residual_quadratics(sol)))
            worst_defect = max(worst_defect, tau_norm(
                tau_eval(Phi, *graph_frame(sol))))
            if sol.norm() <= 0.3:
                in_ball += 1
        solved = args.per_radius - failures
        print("%8.3f %6d %6d %10.4f %10.4f %12.3e %12.3e %7.0f%%" % (
            radius, args.per_radius, failures, worst_norm, worst_move,
            worst_quad, worst_defect,
            100.0 * in_ball / solved if solved else 0.0))

    # the zero tilt is a solution and the solver should fix it exactly
    zero = GraphCoefficients([[0.0] * 4 for _ in range(4)], backend="float")
    sol = solve_tau_system(zero)
    print("\nzero start stays put:", sol.norm() == 0.0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
