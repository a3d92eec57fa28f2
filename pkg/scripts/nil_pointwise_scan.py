"""How often are the pointwise Cauchy gaps of a nilsystem average strictly decreasing?

Samples starting points, computes |A_2N - A_N| along a doubling grid for the
progression (T, T^2) on the Heisenberg nilmanifold and reports the fraction
of points whose gap sequence is strictly decreasing, plus the gap sizes.
"""

import argparse

import numpy as np

from ergolab import suite
from ergolab.averaging import pointwise_report
from ergolab.dynamics import Space, cosine, reduce
from ergolab.dynamics.system import weyl_start


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--points", type=int, default=40)
    p.add_argument("--levels", type=int, default=6, help="doubling steps from N=3125")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--observable", choices=["theta", "horizontal"], default="theta")
    args = p.parse_args()
    spec = suite.heisenberg_progression()
    F = suite.heisenberg_observable() if args.observable == "theta" else cosine((1, 0, 0), 3)
    grid = [3125 * 2**j for j in range(args.levels + 1)]
    rng = np.random.default_rng(args.seed)
    xs = [weyl_start(3), np.zeros(3)] + list(rng.uniform(0, 1, size=(args.points, 3)))
    mono, finals = 0, []
    for i, x in enumerate(xs):
        rep = pointwise_report(spec, [F, F], reduce(x, Space.heisenberg()), grid)
        ok = all(b < a for a, b in zip(rep.gaps, rep.gaps[1:]))
        mono += ok
        finals.append(rep.gaps[-1])
        if i < 2:
            print(f"x = {np.round(x, 3)}: gaps {[f'{g:.2e}' for g in rep.gaps]} strictly decreasing: {ok}")
    print(f"strictly decreasing at {mono}/{len(xs)} points; largest final gap {max(finals):.2e}")


if __name__ == "__main__":
    main()
