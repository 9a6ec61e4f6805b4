"""Morse index of the flat reducible point as the scalar curvature varies.

For constant kg the negative eigenvalues of L_A are the Fourier modes with
lambda_k + kg/4 < 0, each of real multiplicity 4; the scan prints the computed
index next to that count.
"""

import argparse

import numpy as np

from swlattice import Configuration, Lattice
from swlattice.lattice import laplacian_eigenvalues
from swlattice.spectral import AmbiguousIndexError, morse_index


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--h", type=float, default=1.0)
    ap.add_argument("--kg", type=float, nargs="+", default=[-20, -12, -6, -1, 1])
    args = ap.parse_args()

    print(f"{'N':>3} {'kg':>8} {'index':>6} {'closed form':>12} {'solver':>8}")
    for n in args.n:
        lat = Lattice(n, args.h)
        for kg in args.kg:
            expected = 4 * int(np.sum(laplacian_eigenvalues(lat) + kg / 4 < -1e-9))
            try:
                rep = morse_index(Configuration.zero(lat, kg))
                got = rep.morse_index
                solver = rep.solver
            except AmbiguousIndexError as e:
                got, solver = "?", str(e)[:40]
            print(f"{n:>3} {kg:>8.2f} {got:>6} {expected:>12} {solver:>8}")


if __name__ == "__main__":
    main()
