"""Command-line driver: replay an update script, verify against the oracle or
record per-update statistics."""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import oracle
from .engine import MODES, DynamicAPSP, EngineConfig
from .graph import GraphError, GraphFormatError, load_graph


class OpsFormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class Op:
    kind: str
    line: int
    v: int = -1
    t: int = -1
    out_nbrs: tuple = ()
    in_nbrs: tuple = ()


def _ints(tok, line, count):
    if len(tok) != count:
        raise OpsFormatError(line, f"expected {count} fields")
    try:
        return [int(x) for x in tok]
    except ValueError:
        raise OpsFormatError(line, "expected integers") from None


def parse_ops(text: str) -> list[Op]:
    """Parse ``del``/``ins``/``query``/``dump`` lines (``#`` starts a comment line)."""
    rows = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    rows = [(i, t) for i, t in rows if t and not t[0].startswith("#")]
    ops = []
    k = 0
    while k < len(rows):
        line, tok = rows[k]
        k += 1
        cmd, args = tok[0], tok[1:]
        if cmd == "del":
            (v,) = _ints(args, line, 1)
            ops.append(Op("del", line, v=v))
        elif cmd == "query":
            s, t = _ints(args, line, 2)
            ops.append(Op("query", line, v=s, t=t))
        elif cmd == "dump":
            if args:
                raise OpsFormatError(line, "dump takes no arguments")
            ops.append(Op("dump", line))
        elif cmd == "ins":
            v, nout, nin = _ints(args, line, 3)
            if nout < 0 or nin < 0:
                raise OpsFormatError(line, "negative neighbour count")
            nbrs = []
            for _ in range(nout + nin):
                if k >= len(rows):
                    raise OpsFormatError(line, "missing neighbour lines")
                eline, etok = rows[k]
                k += 1
                if len(etok) != 2:
                    raise OpsFormatError(eline, "expected '<u> <w>'")
                try:
                    u, w = int(etok[0]), float(etok[1])
                except ValueError:
                    raise OpsFormatError(eline, "malformed neighbour") from None
                if not (w >= 0 and math.isfinite(w)):
                    raise OpsFormatError(eline, "weight must be finite and non-negative")
                nbrs.append((u, w))
            ops.append(Op("ins", line, v=v, out_nbrs=tuple(nbrs[:nout]), in_nbrs=tuple(nbrs[nout:])))
        else:
            raise OpsFormatError(line, f"unknown command {cmd!r}")
    return ops


def fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def dump_lines(D: np.ndarray) -> list[str]:
    return [" ".join(fmt(x) for x in row) for row in D]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dynapsp", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (("verify", "replay ops and check every answer against the oracle"),
                        ("bench", "replay ops and record per-update timings")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--graph", required=True)
        p.add_argument("--ops", required=True)
        p.add_argument("--mode", choices=MODES, default="det")
        p.add_argument("--h", type=float)
        p.add_argument("--tau", type=int)
        p.add_argument("--delta", type=int)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--sliced", action="store_true", help="rebuild in the background")
        p.add_argument("--unweighted", action="store_true", help="force BFS searches")
        p.add_argument("--stats", help="write one JSON line per update here")
        p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
        if name == "bench":
            p.add_argument("--baseline", action="store_true",
                           help="also time a static recomputation per update")
    return ap


def _fail(msg: str, code: int) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        g = load_graph(args.graph)
    except GraphFormatError as e:
        return _fail(f"{args.graph}: {e}", 2)
    except OSError as e:
        return _fail(str(e), 2)
    try:
        with open(args.ops) as f:
            ops = parse_ops(f.read())
    except OpsFormatError as e:
        return _fail(f"{args.ops}: {e}", 2)
    except OSError as e:
        return _fail(str(e), 2)
    try:
        cfg = EngineConfig(mode=args.mode, h=args.h, tau=args.tau, delta=args.delta,
                           seed=args.seed, sliced=args.sliced,
                           unweighted=True if args.unweighted else None)
    except ValueError as e:
        return _fail(str(e), 2)
    engine = DynamicAPSP(g, cfg)
    engine.corrupt = args.inject_fault
    ref = g.copy() if args.command == "verify" else None
    stats = open(args.stats, "w") if args.stats else None
    out = sys.stdout
    index = 0
    times, static = [], []
    try:
        for op in ops:
            if op.kind in ("del", "ins"):
                t0 = time.perf_counter()
                try:
                    if op.kind == "del":
                        engine.delete(op.v)
                    else:
                        if op.v != engine.graph.n_slots:
                            raise GraphError(f"inserted vertex must be {engine.graph.n_slots}")
                        engine.insert(list(op.out_nbrs), list(op.in_nbrs))
                except GraphError as e:
                    return _fail(f"{args.ops}: line {op.line}: {e}", 2)
                D = engine.distances()
                ms = (time.perf_counter() - t0) * 1000
                times.append(ms)
                row = {"update_index": index, "op": op.kind, "time_ms": round(ms, 3),
                       "phi": engine.phi, "c_size": engine.c_size, "mode": args.mode,
                       "seed": args.seed}
                if ref is not None:
                    if op.kind == "del":
                        ref.delete_vertex(op.v)
                    else:
                        ref.insert_vertex(list(op.out_nbrs), list(op.in_nbrs))
                    O = oracle.apsp(ref)
                    if not np.array_equal(D, O):
                        bad = np.argwhere(D != O)[0]
                        return _fail(f"mismatch after update {index} (line {op.line}) at "
                                     f"{tuple(bad.tolist())}: engine {fmt(D[tuple(bad)])}, "
                                     f"oracle {fmt(O[tuple(bad)])}", 1)
                elif getattr(args, "baseline", False):
                    t1 = time.perf_counter()
                    oracle.apsp(engine.graph)
                    row["static_ms"] = round((time.perf_counter() - t1) * 1000, 3)
                    static.append(row["static_ms"])
                if stats:
                    stats.write(json.dumps(row) + "\n")
                index += 1
            elif op.kind == "query":
                n = engine.graph.n_slots
                if not (0 <= op.v < n and 0 <= op.t < n):
                    return _fail(f"{args.ops}: line {op.line}: vertex out of range", 2)
                out.write(fmt(engine.distances()[op.v, op.t]) + "\n")
            else:
                out.write("\n".join(dump_lines(engine.distances())) + "\n")
    finally:
        if stats:
            stats.close()
    if args.command == "verify":
        print(f"ok: {index} updates verified ({args.mode})", file=sys.stderr)
    else:
        mean = sum(times) / len(times) if times else 0.0
        msg = f"{index} updates, mean {mean:.3f} ms/update ({args.mode})"
        if static:
            msg += f", static recomputation {sum(static) / len(static):.3f} ms/update"
        print(msg, file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
