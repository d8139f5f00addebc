"""Follow the n=1 Bethe roots of the coth realization as q goes to zero.

Each root is continued from its value at the previous q; the last column is
the distance to the nearest rational root, which should shrink linearly.
"""

import argparse

import numpy as np

from qgaudin.algebra import Realization
from qgaudin.bethe import newton, solve_bethe
from qgaudin.spin import SpinSystem


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--u", type=float, nargs="+", default=[0.0, 1.0, 2.5])
    parser.add_argument("--n", type=int, default=1)
    args = parser.parse_args()

    system = SpinSystem((0.5,) * len(args.u), tuple(args.u))
    rational = [np.sort_complex(np.array(s.roots)) for s in solve_bethe(Realization.rational(system), args.n)]
    qs = [1.0, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.001]
    current = [s.roots for s in solve_bethe(Realization.coth(system, qs[0]), args.n)]
    for q in qs:
        real = Realization.coth(system, q)
        nxt = []
        for roots in current:
            xi, res, _ = newton(real, roots)
            if res < 1e-10:
                nxt.append(tuple(xi))
                gap = min(np.max(np.abs(np.sort_complex(xi) - r)) for r in rational) if rational else float("nan")
                shown = ", ".join(f"{z.real:+.6f}{z.imag:+.1e}j" for z in xi)
                print(f"q={q:<7g} roots [{shown}]  residual {res:.1e}  distance to rational {gap:.2e}")
        current = nxt


if __name__ == "__main__":
    main()
