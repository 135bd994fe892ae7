"""Per-update time of each mode against static recomputation.

    python scripts/bench.py --n 400 --p 0.02 --ops 60 --modes det fast
"""
import argparse
import json
import time

import numpy as np

from dynapsp import oracle
from dynapsp.engine import DynamicAPSP, EngineConfig, MODES
from dynapsp.graph import Graph


def random_graph(n, p, rng, unit=False):
    g = Graph(n)
    for u in range(n):
        for v in np.flatnonzero(rng.random(n) < p):
            if v != u:
                g.add_edge(u, int(v), 1.0 if unit else float(rng.integers(1, 11)))
    return g


def random_ops(g, count, rng, p, unit=False, p_del=0.5):
    g = g.copy()
    ops = []
    for _ in range(count):
        alive = g.alive_ids()
        if len(alive) > 2 and rng.random() < p_del:
            op = ("del", int(rng.choice(alive)))
            g.delete_vertex(op[1])
        else:
            wt = lambda: 1.0 if unit else float(rng.integers(1, 11))
            op = ("ins", {int(u): wt() for u in alive if rng.random() < p},
                  {int(u): wt() for u in alive if rng.random() < p})
            g.insert_vertex(op[1], op[2])
        ops.append(op)
    return ops


def bench_mode(g, ops, mode, seed, verify):
    t0 = time.perf_counter()
    eng = DynamicAPSP(g, EngineConfig(mode=mode, seed=seed))
    build = time.perf_counter() - t0
    ref = g.copy()
    times, static = [], []
    for op in ops:
        t0 = time.perf_counter()
        D = eng.update(op)
        times.append(time.perf_counter() - t0)
        if op[0] == "del":
            ref.delete_vertex(op[1])
        else:
            ref.insert_vertex(op[1], op[2])
        t0 = time.perf_counter()
        want = oracle.apsp(ref)
        static.append(time.perf_counter() - t0)
        if verify and not np.array_equal(D, want):
            raise SystemExit(f"{mode}: mismatch")
    return {"mode": mode, "build_s": build, "update_ms": 1e3 * np.mean(times),
            "max_update_ms": 1e3 * np.max(times), "static_ms": 1e3 * np.mean(static),
            "c_size": eng.c_size, "phi": eng.phi}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--p", type=float, default=0.02)
    ap.add_argument("--ops", type=int, default=60)
    ap.add_argument("--modes", nargs="+", choices=MODES, default=["det"])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--unweighted", action="store_true")
    ap.add_argument("--no-verify", action="store_true")
    ap.add_argument("--json", help="also write the rows here")
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    g = random_graph(args.n, args.p, rng, args.unweighted)
    ops = random_ops(g, args.ops, rng, args.p, args.unweighted)
    rows = [bench_mode(g, ops, m, args.seed, not args.no_verify) for m in args.modes]
    print(f"n={args.n} p={args.p} ops={args.ops} seed={args.seed}")
    print("| mode | build (s) | mean update (ms) | max update (ms) | static (ms) | C size |")
    print("|---|---|---|---|---|---|")
    for r in rows:
        print(f"| {r['mode']} | {r['build_s']:.2f} | {r['update_ms']:.1f} | {r['max_update_ms']:.1f} "
              f"| {r['static_ms']:.1f} | {r['c_size']} |")
    if args.json:
        with open(args.json, "w") as f:
            json.dump(rows, f, indent=1, default=float)


if __name__ == "__main__":
    main()
