"""Mutable directed weighted graph with vertex slots, plus read-only compact views.

Vertex ids are slot indices that are never reused.  Parallel edges collapse to
the minimum weight.  Algorithms work on a :class:`GraphView`, which freezes the
alive vertices into a dense index space ``0..N-1`` and carries an ``active``
mask so that removing further vertices is a cheap mask operation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np


def _pairs(nbrs):
    return nbrs.items() if isinstance(nbrs, dict) else nbrs


class GraphError(ValueError):
    """Invalid mutation or malformed graph input."""


class GraphFormatError(GraphError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _check_weight(w) -> float:
    w = float(w)
    if math.isnan(w) or w < 0 or math.isinf(w):
        raise GraphError(f"invalid weight {w!r}: must be finite and non-negative")
    return w


class VertexSet:
    """Set of vertex slots stored as a boolean mask."""

    __slots__ = ("mask",)

    def __init__(self, n_slots: int, members: Iterable[int] = ()):
        self.mask = np.zeros(n_slots, dtype=bool)
        for v in members:
            if not 0 <= v < n_slots:
                raise GraphError(f"vertex {v} outside 0..{n_slots - 1}")
            self.mask[v] = True

    @classmethod
    def from_mask(cls, mask) -> VertexSet:
        out = cls.__new__(cls)
        out.mask = np.asarray(mask, dtype=bool).copy()
        return out

    @property
    def n_slots(self) -> int:
        return len(self.mask)

    def __len__(self) -> int:
        return int(self.mask.sum())

    def __contains__(self, v) -> bool:
        return 0 <= v < len(self.mask) and bool(self.mask[v])

    def __iter__(self) -> Iterator[int]:
        return iter(np.flatnonzero(self.mask).tolist())

    def __or__(self, other: VertexSet) -> VertexSet:
        n = max(self.n_slots, other.n_slots)
        m = np.zeros(n, dtype=bool)
        m[: self.n_slots] |= self.mask
        m[: other.n_slots] |= other.mask
        return VertexSet.from_mask(m)

    def __eq__(self, other) -> bool:
        return isinstance(other, VertexSet) and set(self) == set(other)

    def __repr__(self) -> str:
        return f"VertexSet({sorted(self)})"


class Graph:
    """Directed graph with non-negative weights over never-recycled vertex slots."""

    def __init__(self, n: int = 0):
        self.alive: list[bool] = [True] * n
        self.out_edges: list[dict[int, float]] = [{} for _ in range(n)]
        self.in_edges: list[dict[int, float]] = [{} for _ in range(n)]
        self._m = 0

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, float]]) -> Graph:
        g = cls(n)
        for u, v, w in edges:
            g.add_edge(u, v, w)
        return g

    @property
    def n_slots(self) -> int:
        return len(self.alive)

    @property
    def n(self) -> int:
        return sum(self.alive)

    @property
    def m(self) -> int:
        return self._m

    def is_alive(self, v: int) -> bool:
        return 0 <= v < len(self.alive) and self.alive[v]

    def alive_ids(self) -> list[int]:
        return [v for v, a in enumerate(self.alive) if a]

    def add_edge(self, u: int, v: int, w: float) -> None:
        """Insert edge u->v, keeping the smaller weight if it already exists."""
        for x in (u, v):
            if not self.is_alive(x):
                raise GraphError(f"vertex {x} is not alive")
        w = _check_weight(w)
        if u == v:
            return
        old = self.out_edges[u].get(v)
        if old is None:
            self._m += 1
        elif old <= w:
            return
        self.out_edges[u][v] = w
        self.in_edges[v][u] = w

    def insert_vertex(self, out_nbrs=(), in_nbrs=()) -> int:
        """Add a vertex with edges to ``out_nbrs`` and from ``in_nbrs``.

        Neighbours are ``{u: w}`` mappings or ``(u, w)`` pairs; returns the new slot.
        """
        out_nbrs = [(int(u), _check_weight(w)) for u, w in _pairs(out_nbrs)]
        in_nbrs = [(int(u), _check_weight(w)) for u, w in _pairs(in_nbrs)]
        for u, _ in out_nbrs + in_nbrs:
            if not self.is_alive(u):
                raise GraphError(f"neighbour {u} is not alive")
        v = len(self.alive)
        self.alive.append(True)
        self.out_edges.append({})
        self.in_edges.append({})
        for u, w in out_nbrs:
            self.add_edge(v, u, w)
        for u, w in in_nbrs:
            self.add_edge(u, v, w)
        return v

    def delete_vertex(self, v: int) -> None:
        if not self.is_alive(v):
            raise GraphError(f"vertex {v} is not alive")
        for u in self.out_edges[v]:
            del self.in_edges[u][v]
        for u in self.in_edges[v]:
            del self.out_edges[u][v]
        self._m -= len(self.out_edges[v]) + len(self.in_edges[v])
        self.out_edges[v] = {}
        self.in_edges[v] = {}
        self.alive[v] = False

    def edges(self) -> Iterator[tuple[int, int, float]]:
        for u, nbrs in enumerate(self.out_edges):
            for v, w in nbrs.items():
                yield u, v, w

    def weight(self, u: int, v: int) -> float:
        return self.out_edges[u].get(v, math.inf)

    def copy(self) -> Graph:
        g = Graph.__new__(Graph)
        g.alive = list(self.alive)
        g.out_edges = [dict(d) for d in self.out_edges]
        g.in_edges = [dict(d) for d in self.in_edges]
        g._m = self._m
        return g

    def check_consistency(self) -> None:
        """Full rescan of the transpose and liveness invariants."""
        count = 0
        for u, nbrs in enumerate(self.out_edges):
            for v, w in nbrs.items():
                count += 1
                assert self.alive[u] and self.alive[v], (u, v)
                assert w >= 0
                assert self.in_edges[v].get(u) == w, (u, v)
        assert count == sum(len(d) for d in self.in_edges) == self._m

    def view(self) -> GraphView:
        return GraphView.from_graph(self)


def _csr(n: int, src: np.ndarray, dst: np.ndarray, w: np.ndarray):
    order = np.lexsort((dst, src))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, dst[order].astype(np.int64), w[order].astype(np.float64)


@dataclass(frozen=True, eq=False)
class GraphView:
    """Frozen compact view: vertex ``k`` is slot ``ids[k]``.

    ``out_*`` and ``in_*`` are CSR adjacency over the compact index space of the
    base snapshot; ``active`` hides removed vertices without rebuilding them.
    """

    ids: np.ndarray
    out_ptr: np.ndarray
    out_nbr: np.ndarray
    out_w: np.ndarray
    in_ptr: np.ndarray
    in_nbr: np.ndarray
    in_w: np.ndarray
    active: np.ndarray

    @classmethod
    def from_arrays(cls, ids, src, dst, w, active=None) -> GraphView:
        ids = np.asarray(ids, dtype=np.int64)
        n = len(ids)
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        w = np.asarray(w, dtype=np.float64)
        op, on, ow = _csr(n, src, dst, w)
        ip, inb, iw = _csr(n, dst, src, w)
        if active is None:
            active = np.ones(n, dtype=bool)
        return cls(ids, op, on, ow, ip, inb, iw, np.asarray(active, dtype=bool))

    @classmethod
    def from_graph(cls, g: Graph) -> GraphView:
        ids = np.array(g.alive_ids(), dtype=np.int64)
        pos = np.full(g.n_slots, -1, dtype=np.int64)
        pos[ids] = np.arange(len(ids))
        src, dst, w = [], [], []
        for u, v, wt in g.edges():
            src.append(pos[u])
            dst.append(pos[v])
            w.append(wt)
        return cls.from_arrays(ids, src, dst, w)

    @property
    def size(self) -> int:
        """Number of compact indices, active or not."""
        return len(self.ids)

    @property
    def n(self) -> int:
        return int(self.active.sum())

    def _edge_arrays(self):
        src = np.repeat(np.arange(self.size), np.diff(self.out_ptr))
        keep = self.active[src] & self.active[self.out_nbr]
        return src[keep], self.out_nbr[keep], self.out_w[keep]

    @property
    def m(self) -> int:
        return len(self._edge_arrays()[0])

    def edges(self) -> list[tuple[int, int, float]]:
        """Active edges as slot-id triples, sorted."""
        s, d, w = self._edge_arrays()
        return sorted(zip(self.ids[s].tolist(), self.ids[d].tolist(), w.tolist()))

    def without_mask(self, removed: np.ndarray) -> GraphView:
        return GraphView(self.ids, self.out_ptr, self.out_nbr, self.out_w,
                         self.in_ptr, self.in_nbr, self.in_w,
                         self.active & ~np.asarray(removed, dtype=bool))

    def slot_mask(self, vs: VertexSet) -> np.ndarray:
        """Translate a slot-indexed set into a compact mask."""
        mask = np.zeros(self.size, dtype=bool)
        inside = self.ids < vs.n_slots
        mask[inside] = vs.mask[self.ids[inside]]
        return mask

    def reversed(self) -> GraphView:
        return GraphView(self.ids, self.in_ptr, self.in_nbr, self.in_w,
                         self.out_ptr, self.out_nbr, self.out_w, self.active)

    def dense(self) -> np.ndarray:
        """Compact weight matrix, ``inf`` where no active edge."""
        out = np.full((self.size, self.size), np.inf)
        s, d, w = self._edge_arrays()
        out[s, d] = w
        return out

    def is_unit_weight(self) -> bool:
        _, _, w = self._edge_arrays()
        return bool(np.all(w == 1.0))


def induced_without(g, removed: VertexSet) -> GraphView:
    """View of ``g`` with ``removed`` and their incident edges hidden."""
    view = g.view() if isinstance(g, Graph) else g
    if isinstance(g, Graph):
        bad = [v for v in removed if not g.is_alive(v)]
        if bad:
            raise GraphError(f"removed vertices not alive: {bad}")
    return view.without_mask(view.slot_mask(removed))


def reversed_view(g) -> GraphView:
    view = g.view() if isinstance(g, Graph) else g
    return view.reversed()


def parse_graph(text: str) -> Graph:
    """Parse the ``n m`` + ``u v w`` text format."""
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, t) for i, t in lines if t and not t[0].startswith("#")]
    if not lines:
        raise GraphFormatError(1, "empty graph file")
    lineno, head = lines[0]
    if len(head) != 2:
        raise GraphFormatError(lineno, "expected header 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise GraphFormatError(lineno, "header values must be integers") from None
    if n < 0 or m < 0:
        raise GraphFormatError(lineno, "negative n or m")
    body = lines[1:]
    if len(body) != m:
        at = body[m][0] if len(body) > m else (body[-1][0] + 1 if body else lineno + 1)
        raise GraphFormatError(at, f"expected {m} edge lines, found {len(body)}")
    g = Graph(n)
    for lineno, tok in body:
        if len(tok) != 3:
            raise GraphFormatError(lineno, "expected 'u v w'")
        try:
            u, v = int(tok[0]), int(tok[1])
            w = float(tok[2])
        except ValueError:
            raise GraphFormatError(lineno, "malformed edge") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(lineno, f"vertex id out of range 0..{n - 1}")
        try:
            g.add_edge(u, v, w)
        except GraphError as e:
            raise GraphFormatError(lineno, str(e)) from None
    return g


def load_graph(path) -> Graph:
    with open(path) as f:
        return parse_graph(f.read())


def format_graph(g: Graph) -> str:
    edges = list(g.edges())
    rows = [f"{g.n_slots} {len(edges)}"]
    rows += [f"{u} {v} {w:g}" for u, v, w in edges]
    return "\n".join(rows) + "\n"
