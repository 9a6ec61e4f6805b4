"""Gradient descent from random small starts: where does the flow end up?

With kg > 0 every run should settle on the reducible torus (phi -> 0, d*F = 0);
with kg < 0 the flow leaves the reducible point for an irreducible minimum.
"""

import argparse
import time

import numpy as np

from swlattice import FlowParams, Lattice, classify_critical_point, descend
from swlattice.checks import random_configuration
from swlattice.fields import curvature
from swlattice.hessian import spinor_norm_sq
from swlattice.hodge import jacobian_coordinates
from swlattice.lattice import d_star, norm


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--h", type=float, default=1.0)
    ap.add_argument("--kg", type=float, default=1.0)
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--amplitude", type=float, default=0.2)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--regauge-every", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    lat = Lattice(args.n, args.h)
    params = FlowParams(regauge_every=args.regauge_every)
    print(f"{'run':>3} {'status':>10} {'iters':>6} {'energy':>12} {'|phi|':>9} {'|d*F|':>9}  kind / Jacobian point")
    for i in range(args.runs):
        t0 = time.perf_counter()
        tr = descend(random_configuration(lat, rng, args.amplitude, kg=args.kg), params)
        T = tr.terminal
        phi = np.sqrt(spinor_norm_sq(T))
        dsf = norm(lat, d_star(lat, curvature(T)))
        kind = classify_critical_point(T, phi_tol=1e-6) if tr.status == "converged" else tr.status
        where = ""
        if str(kind) == "reducible_morse_bott":
            where = " ".join(f"{x:.3f}" for x in jacobian_coordinates(T.with_fields(phi=0 * T.phi), 1e-8).coords)
        print(f"{i:>3} {tr.status:>10} {tr.iterations:>6} {tr.energy[-1]:>12.4e} {phi:>9.1e} {dsf:>9.1e}  "
              f"{kind} {where} ({time.perf_counter() - t0:.1f} s)")


if __name__ == "__main__":
    main()
