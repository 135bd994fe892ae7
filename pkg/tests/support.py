"""Graph and update-script generators shared by the test modules."""
from __future__ import annotations

from contextlib import contextmanager

import numpy as np

from dynapsp.graph import Graph

RESULTS: list[str] = []
LEDGER = {"det": 0, "space": 0, "rand": 0, "storage_rows": 0}


def random_graph(n: int, p: float, rng, unit: bool = False, hi: int = 10) -> Graph:
    g = Graph(n)
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < p:
                g.add_edge(u, v, 1.0 if unit else float(rng.integers(1, hi + 1)))
    return g


def random_ops(g: Graph, count: int, rng, p: float, unit: bool = False, p_del: float = 0.6):
    """Mixed ``("del", v)`` / ``("ins", out, in)`` script valid on ``g``."""
    g = g.copy()
    ops = []
    for _ in range(count):
        alive = g.alive_ids()
        if len(alive) > 2 and rng.random() < p_del:
            v = int(rng.choice(alive))
            ops.append(("del", v))
            g.delete_vertex(v)
        else:
            wt = lambda: 1.0 if unit else float(rng.integers(1, 11))
            out = {int(u): wt() for u in alive if rng.random() < p}
            inn = {int(u): wt() for u in alive if rng.random() < p}
            ops.append(("ins", out, inn))
            g.insert_vertex(out, inn)
    return ops


def apply_op(g: Graph, op) -> None:
    if op[0] == "del":
        g.delete_vertex(op[1])
    else:
        g.insert_vertex(op[1], op[2])


def cycle(n: int, w: float = 1.0) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n, w) for i in range(n)])


def path_graph(n: int, w: float = 1.0) -> Graph:
    return Graph.from_edges(n, [(i, i + 1, w) for i in range(n - 1)])


def walk_weight(W: np.ndarray, seq) -> float:
    """Re-sum a walk over a dense weight matrix (``inf`` if an edge is missing)."""
    return float(sum(W[u, v] for u, v in zip(seq, seq[1:])))


def dense(g) -> np.ndarray:
    n = g.n_slots
    W = np.full((n, n), np.inf)
    for u, v, w in g.edges():
        W[u, v] = w
    return W


def ops_text(g, ops) -> str:
    lines = []
    n = g.n_slots
    for op in ops:
        if op[0] == "del":
            lines.append(f"del {op[1]}")
        else:
            out, inn = op[1], op[2]
            lines.append(f"ins {n} {len(out)} {len(inn)}")
            lines += [f"{u} {w:g}" for u, w in out.items()]
            lines += [f"{u} {w:g}" for u, w in inn.items()]
            n += 1
    return "\n".join(lines) + "\n"


def check_space_storage(out) -> int:
    """Per source and level: explicit edges + links <= sum_j (B_j + 1) |Separator^j|."""
    budgets = out.sched.budgets()
    rows = out.stats.get("storage", [])
    for i, s, storage, sep, _ in rows:
        bound = int(sum((budgets[j] + 1) * sep[j] for j in range(i + 1)))
        assert storage <= bound, (i, s, storage, bound)
    return len(rows)


@contextmanager
def criterion(num: int, title: str):
    """Record one PASS/FAIL line for an acceptance criterion; ``info["detail"]`` is appended."""
    info = {}
    try:
        yield info
    except BaseException as e:
        msg = f"{type(e).__name__}: {e}".splitlines()[0][:160]
        _record(num, title, False, msg)
        raise
    _record(num, title, True, info.get("detail", ""))


def _record(num, title, ok, detail):
    line = f"criterion {num} [{'PASS' if ok else 'FAIL'}] {title}" + (f" -- {detail}" if detail else "")
    RESULTS.append(line)
    print(line)
