"""Least-squares residual of a standard r-matrix for the q-algebra versus q.

Prints a table of residual, residual/q and the gap between the two values of
r_23 forced by single coefficients, over a q grid and several λ-μ.
"""

import argparse

import numpy as np

from qgaudin.algebra import Realization
from qgaudin.spin import SpinSystem
from qgaudin.rmatrix import no_go_probe


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--qmax", type=float, default=1.0)
    parser.add_argument("--points", type=int, default=9)
    args = parser.parse_args()

    system = SpinSystem((0.5, 0.5, 0.5), (0.0, 1.1, -0.6))
    mu = -0.35 + 0.2j
    print(f"{'lam-mu':>10} {'q':>8} {'residual':>12} {'res/q':>8} {'r23 gap':>10} {'rank':>5}")
    for diff in (0.5, 1.0, 2.0 + 0.5j):
        for q in np.linspace(0.0, args.qmax, args.points):
            real = Realization.rational(system) if q == 0 else Realization.coth(system, float(q))
            res = no_go_probe(real, mu + diff, mu)
            ratio = res.residual / q if q else float("nan")
            print(f"{diff!s:>10} {q:8.3f} {res.residual:12.3e} {ratio:8.3f} {abs(res.r23_gap):10.3e} {res.rank:5d}")


if __name__ == "__main__":
    main()
