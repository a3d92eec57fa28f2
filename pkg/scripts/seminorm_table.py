"""Seminorm estimates of the suite battery for each rotation, with their depth traces."""

import argparse

from ergolab import suite
from ergolab.dynamics import Grid, Rotation
from ergolab.seminorms import seminorm


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--depth", type=int, default=5000)
    p.add_argument("--grid", type=int, default=1024)
    args = p.parse_args()
    sched = [args.depth] * (args.k - 1)
    print("f,alpha,value,trace")
    for name, f in suite.battery().items():
        for label, a in (("alpha", suite.ALPHA), ("beta", suite.BETA)):
            e = seminorm(f, args.k, Rotation(a), sampler=Grid(args.grid), schedule=sched)
            trace = " ".join(f"{m}:{v:.6f}" for m, v in e.trace)
            print(f"{name},{label},{e.value:.6f},{trace}")


if __name__ == "__main__":
    main()
