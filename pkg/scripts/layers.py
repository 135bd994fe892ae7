"""Randomized build report: congested-set size per level against n/2^l, and phi.

    python scripts/layers.py --n 80 --seeds 10
"""
import argparse

import numpy as np

from dynapsp.engine import default_params
from dynapsp.preprocess import build_layered
from bench import random_graph


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=80)
    ap.add_argument("--p", type=float, default=0.08)
    ap.add_argument("--seeds", type=int, default=10)
    args = ap.parse_args()
    h = default_params(args.n, "rand").h
    sizes, phis, cs = {}, [], []
    for seed in range(args.seeds):
        g = random_graph(args.n, args.p, np.random.default_rng(seed))
        lb = build_layered(g, h, rng_seed=seed)
        for lev, out in enumerate(lb.outputs):
            sizes.setdefault(lev + 1, []).append(int(out.congested.sum()))
        phis.append(sum(o.table.phi for o in lb.outputs))
        cs.append(lb.c)
    print(f"n={args.n} p={args.p} h={h:.2f} seeds={args.seeds}")
    print(f"phi: min {min(phis)}, mean {np.mean(phis):.0f}, max {max(phis)}; final c: {sorted(set(cs))}")
    print("| level | mean C_l size | max C_l size | n/2^l |")
    print("|---|---|---|---|")
    for lev, v in sorted(sizes.items()):
        print(f"| {lev} | {np.mean(v):.2f} | {max(v)} | {args.n / 2**lev:.1f} |")


if __name__ == "__main__":
    main()
