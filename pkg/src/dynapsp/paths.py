"""Stored paths per hop level: the hop ladder, path representations, congestion
accounting, the vertex -> paths index and the hierarchical (linked) store."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import _kernels as K

BIG = int(K.BIG)


def ladder_index(x: float) -> int:
    """Smallest i >= 0 with (3/2)^i >= x, computed exactly."""
    x = Fraction(x)
    i = 0
    while Fraction(3**i, 2**i) < x:
        i += 1
    return i


@dataclass(frozen=True)
class HopSchedule:
    """Geometric hop ladder h_i = (3/2)^i for a target ``h`` on ``n`` vertices."""

    h: float
    n: int

    @cached_property
    def i_h(self) -> int:
        return ladder_index(max(self.h, 1.0))

    @cached_property
    def i_max(self) -> int:
        return ladder_index(max(self.n, 1))

    @property
    def levels(self) -> range:
        return range(self.i_h + 1)

    @staticmethod
    def h_at(i: int) -> float:
        return 3**i / 2**i

    @staticmethod
    def budget(i: int) -> int:
        return -(-(3**i) // 2**i)

    def charge(self, i: int) -> int:
        """ceil(n / h_i) with the real h_i."""
        return -(-(self.n * 2**i) // 3**i)

    @staticmethod
    def interval(i: int) -> tuple[float, float]:
        h = 3**i / 2**i
        return h / 3, 2 * h / 3

    @staticmethod
    def radius_range(i: int) -> tuple[int, int]:
        """Integers strictly inside (h_i/3, 2h_i/3), as an inclusive range."""
        if i == 0:
            return 1, 0
        lo = 3 ** (i - 1) // 2**i + 1
        hi = -(-(3 ** (i - 1)) // 2 ** (i - 1)) - 1
        return lo, hi

    @staticmethod
    def is_small(i: int) -> bool:
        """h_i <= 3: the separator degenerates to every vertex."""
        return 3**i <= 3 * 2**i

    def budgets(self, upto: int | None = None) -> np.ndarray:
        top = self.i_h if upto is None else upto
        return np.array([self.budget(j) for j in range(top + 1)], dtype=np.int64)


# ---------------------------------------------------------------- stored paths


class PathKind(enum.Enum):
    EMPTY = "empty"
    EDGE = "edge"
    EXPLICIT = "explicit"
    CONCAT = "concat"
    HIER = "hier"


@dataclass(frozen=True)
class StoredPath:
    kind: PathKind
    weight: float = math.inf
    hop: float = math.inf
    payload: tuple = ()

    @classmethod
    def empty(cls) -> StoredPath:
        return cls(PathKind.EMPTY)

    @classmethod
    def edge(cls, u: int, v: int, w: float) -> StoredPath:
        return cls(PathKind.EDGE, w, 1, (u, v))

    @classmethod
    def explicit(cls, seq, weight: float) -> StoredPath:
        seq = tuple(int(v) for v in seq)
        return cls(PathKind.EXPLICIT, weight, len(seq) - 1, seq)

    @classmethod
    def concat(cls, left: StoredPath, right: StoredPath) -> StoredPath:
        if left.kind is PathKind.EMPTY or right.kind is PathKind.EMPTY:
            return cls.empty()
        return cls(PathKind.CONCAT, left.weight + right.weight, left.hop + right.hop,
                   (left, right))

    @classmethod
    def hier(cls, pool: HierPool, node: int) -> StoredPath:
        return cls(PathKind.HIER, float(pool.w[node]), int(pool.h[node]), (pool, int(node)))

    def extract_counted(self) -> tuple[list[int], int]:
        """Vertex sequence and number of links followed to produce it."""
        if self.kind is PathKind.EMPTY:
            raise ValueError("cannot extract the empty path")
        if self.kind is PathKind.EDGE:
            return list(self.payload), 0
        if self.kind is PathKind.EXPLICIT:
            return list(self.payload), 0
        if self.kind is PathKind.HIER:
            pool, node = self.payload
            return pool.walk(node)
        left, right = self.payload
        a, ka = left.extract_counted()
        b, kb = right.extract_counted()
        if a[-1] != b[0]:
            raise ValueError("concatenated paths do not meet")
        return a + b[1:], ka + kb + 2

    def extract(self) -> list[int]:
        return self.extract_counted()[0]


def path_weight(seq, weight) -> float:
    """Re-sum ``weight(u, v)`` along ``seq``; inf if an edge is missing."""
    return float(sum(weight(u, v) for u, v in zip(seq, seq[1:])))


# ---------------------------------------------------------------- congestion


class CongestionTable:
    """Per-vertex congestion with the congested set C = {v : 2 Congestion(v) > tau}.

    ``n`` is the number of slots; ``n_active`` (default ``n``) is the vertex
    count the threshold is measured against.
    """

    def __init__(self, n: int, tau: int, n_active: int | None = None):
        m = n if n_active is None else n_active
        if tau < 2 * m * m:
            raise ValueError(f"tau={tau} below 2n^2={2 * m * m}")
        self.tau = int(tau)
        self.cong = np.zeros(n, dtype=np.int64)
        self.congested = np.zeros(n, dtype=bool)
        self.charged = 0

    @property
    def phi(self) -> int:
        return int(self.cong.sum())

    @property
    def size(self) -> int:
        return int(self.congested.sum())

    def charge_counts(self, counts: np.ndarray, amount: int) -> np.ndarray:
        """Add ``counts[v] * amount`` to every vertex; return the newly congested."""
        add = counts.astype(np.int64) * int(amount)
        self.cong += add
        self.charged += int(add.sum())
        newly = (2 * self.cong > self.tau) & ~self.congested
        self.congested |= newly
        return np.flatnonzero(newly)

    def check(self) -> None:
        assert int(self.cong.max(initial=0)) <= self.tau
        assert self.phi == self.charged
        assert bool(np.all(self.congested == (2 * self.cong > self.tau)))


def charge(path: StoredPath, level: int, table: CongestionTable, sched: HopSchedule) -> list[int]:
    """Charge every distinct vertex on ``path`` with ceil(n / h_level)."""
    seq = path.extract()
    counts = np.zeros(len(table.cong), dtype=np.int64)
    counts[np.unique(seq)] = 1
    return table.charge_counts(counts, sched.charge(level)).tolist()


# ---------------------------------------------------------------- index


class InvertedIndex:
    """vertex -> ids of the explicit paths containing it (CSR)."""

    def __init__(self, n: int, path_ids: np.ndarray, vertices: np.ndarray):
        order = np.argsort(vertices, kind="stable")
        self.ptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self.ptr, vertices + 1, 1)
        np.cumsum(self.ptr, out=self.ptr)
        self.ids = path_ids[order]

    @classmethod
    def from_padded(cls, P: np.ndarray) -> InvertedIndex:
        """Index rows of a padded ``(pairs, width)`` vertex array (``-1`` = pad)."""
        n_pairs, width = P.shape
        keep = P >= 0
        pair_ids = np.broadcast_to(np.arange(n_pairs)[:, None], P.shape)[keep]
        return cls(int(P.max(initial=-1)) + 1 if P.size else 0, pair_ids, P[keep])

    def paths_through(self, banned: np.ndarray) -> np.ndarray:
        """Sorted unique path ids meeting any vertex of ``banned`` (vertex ids)."""
        banned = np.asarray(banned, dtype=np.int64)
        banned = banned[banned < len(self.ptr) - 1]
        if len(banned) == 0:
            return np.zeros(0, dtype=np.int64)
        parts = [self.ids[self.ptr[v] : self.ptr[v + 1]] for v in banned]
        return np.unique(np.concatenate(parts))


# ---------------------------------------------------------------- hierarchical pool


class HierPool:
    """Linked path nodes: a node's walk is its link's walk (or its source) plus a tail."""

    def __init__(self):
        self._parts = []
        self.size = 0
        self._frozen = False

    def add(self, src: int, link, tail_ptr, tail, w, h, stage) -> int:
        """Append one search's nodes; returns the offset of its local ids."""
        off = self.size
        k = len(link)
        if k and bool(((link >= np.arange(k)) | (link < -1)).any()):
            raise ValueError("leading link must point to an earlier stored node")
        glink = np.where(link >= 0, link + off, -1)
        self._parts.append((np.full(k, src, dtype=np.int64), glink, tail_ptr, tail, w, h, stage))
        self.size += k
        self._frozen = False
        return off

    def freeze(self) -> None:
        if self._frozen:
            return
        if self._parts:
            src, link, tptr, tail, w, h, stage = zip(*self._parts)
            self.src = np.concatenate(src)
            self.link = np.concatenate(link)
            lens = np.concatenate([np.diff(p) for p in tptr])
            self.tail_ptr = np.zeros(len(lens) + 1, dtype=np.int64)
            np.cumsum(lens, out=self.tail_ptr[1:])
            self.tail = np.concatenate(tail).astype(np.int64)
            self.w = np.concatenate(w)
            self.h = np.concatenate(h)
            self.stage = np.concatenate(stage)
            self._parts = [(self.src, self.link, self.tail_ptr, self.tail, self.w, self.h, self.stage)]
        else:
            z = np.zeros(0, dtype=np.int64)
            self.src = self.link = self.tail = self.h = self.stage = z
            self.tail_ptr = np.zeros(1, dtype=np.int64)
            self.w = np.zeros(0)
        self._frozen = True
        self.__dict__.pop("index", None)

    def walk(self, node: int) -> tuple[list[int], int]:
        self.freeze()
        buf = np.empty(int(self.h[node]) + 2, dtype=np.int64)
        m, depth = K.node_walk(node, self.src, self.link, self.tail_ptr, self.tail, buf)
        return buf[:m].tolist(), int(depth)

    def explicit_edges(self, node: int) -> int:
        """Explicit edges held by one node (its tail length)."""
        self.freeze()
        return int(self.tail_ptr[node + 1] - self.tail_ptr[node])

    def prefixes(self, refs: np.ndarray, srcs: np.ndarray, width: int, reverse=False) -> np.ndarray:
        self.freeze()
        return K.node_prefixes(refs.astype(np.int64), srcs.astype(np.int64), self.src, self.link,
                               self.tail_ptr, self.tail, self.h, width, reverse)

    def vertex_lists(self, refs: np.ndarray, srcs: np.ndarray):
        self.freeze()
        return K.node_vertex_lists(refs.astype(np.int64), srcs.astype(np.int64), self.src,
                                   self.link, self.tail_ptr, self.tail, self.h)

    @cached_property
    def index(self):
        """(vertex -> nodes owning it, node -> child nodes) as CSR pairs."""
        self.freeze()
        n_nodes = self.size
        own_nodes = np.repeat(np.arange(n_nodes), np.diff(self.tail_ptr))
        own_vs = self.tail
        roots = np.flatnonzero(self.link < 0)
        own_nodes = np.concatenate([own_nodes, roots])
        own_vs = np.concatenate([own_vs, self.src[roots]])
        nv = int(own_vs.max(initial=-1)) + 1
        by_v = InvertedIndex(nv, own_nodes, own_vs)
        child = np.flatnonzero(self.link >= 0)
        by_parent = InvertedIndex(n_nodes, child, self.link[child])
        return by_v, by_parent

    def touched_mask(self, banned: np.ndarray) -> np.ndarray:
        """Nodes whose walk contains a banned vertex, via the bidirectional links."""
        self.freeze()
        hit = np.zeros(self.size, dtype=bool)
        if self.size == 0 or len(banned) == 0:
            return hit
        by_v, by_parent = self.index
        frontier = by_v.paths_through(banned)
        while len(frontier):
            frontier = frontier[~hit[frontier]]
            hit[frontier] = True
            frontier = by_parent.paths_through(frontier)
        return hit


# ---------------------------------------------------------------- level collections


def _trivial_diag(W: np.ndarray, H: np.ndarray) -> None:
    idx = np.arange(len(W))
    W[idx, idx] = 0.0
    H[idx, idx] = 0


class LevelPaths:
    """Per-pair stored paths of one hop level on a snapshot of ``N`` vertices.

    Subclasses provide ``W`` (weights), ``H`` (hops, ``BIG`` when absent),
    ``touched(banned)``, ``prefixes(width)`` and ``stored(s, t)``.
    """

    W: np.ndarray
    H: np.ndarray

    @property
    def n(self) -> int:
        return len(self.W)

    def touched(self, banned: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def prefixes(self, width: int) -> np.ndarray:
        raise NotImplementedError

    def stored(self, s: int, t: int) -> StoredPath:
        raise NotImplementedError

    def extract(self, s: int, t: int) -> list[int]:
        return self.stored(s, t).extract()


class ExplicitLevel(LevelPaths):
    """Every pair's path kept as an explicit padded vertex row."""

    def __init__(self, W, H, P):
        self.W, self.H, self.P = W, H, P
        _trivial_diag(self.W, self.H)
        n = len(W)
        idx = np.arange(n)
        self.P[idx, idx, :] = -1
        self.P[idx, idx, 0] = idx

    @cached_property
    def index(self) -> InvertedIndex:
        n = self.n
        return InvertedIndex.from_padded(self.P.reshape(n * n, -1))

    def touched(self, banned: np.ndarray) -> np.ndarray:
        out = np.zeros(self.n * self.n, dtype=bool)
        out[self.index.paths_through(np.flatnonzero(banned))] = True
        return out.reshape(self.n, self.n)

    def prefixes(self, width: int) -> np.ndarray:
        n, _, b = self.P.shape
        out = np.full((n, n, width), -1, dtype=np.int64)
        k = min(width, b)
        out[:, :, :k] = self.P[:, :, :k]
        return out

    def stored(self, s: int, t: int) -> StoredPath:
        if not np.isfinite(self.W[s, t]):
            return StoredPath.empty()
        seq = self.P[s, t, : self.H[s, t] + 1]
        if len(seq) == 2:
            return StoredPath.edge(int(seq[0]), int(seq[1]), float(self.W[s, t]))
        return StoredPath.explicit(seq, float(self.W[s, t]))


class HierLevel(LevelPaths):
    """Pairs referencing nodes of a :class:`HierPool` (``-1`` absent, ``-2`` trivial)."""

    def __init__(self, pool: HierPool, ref: np.ndarray):
        pool.freeze()
        self.pool, self.ref = pool, ref
        n = len(ref)
        self.W = np.full((n, n), np.inf)
        self.H = np.full((n, n), BIG, dtype=np.int64)
        has = ref >= 0
        self.W[has] = pool.w[ref[has]]
        self.H[has] = pool.h[ref[has]]
        _trivial_diag(self.W, self.H)
        idx = np.arange(n)
        self.ref[idx, idx] = -2

    def touched(self, banned: np.ndarray) -> np.ndarray:
        node_hit = self.pool.touched_mask(np.flatnonzero(banned))
        out = np.zeros(self.ref.shape, dtype=bool)
        has = self.ref >= 0
        out[has] = node_hit[self.ref[has]]
        idx = np.arange(self.n)
        out[idx, idx] |= banned
        return out

    def prefixes(self, width: int) -> np.ndarray:
        n = self.n
        srcs = np.repeat(np.arange(n), n)
        return self.pool.prefixes(self.ref.ravel(), srcs, width).reshape(n, n, width)

    def stored(self, s: int, t: int) -> StoredPath:
        r = self.ref[s, t]
        if r == -2:
            return StoredPath.explicit([s], 0.0)
        if r < 0:
            return StoredPath.empty()
        return StoredPath.hier(self.pool, int(r))


@dataclass
class CenterInstances:
    """Searches from and to centers, kept as nodes in two pools.

    ``fwd[k, t]`` is the node of center ``centers[k]``'s walk to ``t``;
    ``rev[k, s]`` the node of its walk from ``s`` stored on the reversed graph.
    """

    n: int
    fwd_pool: HierPool = field(default_factory=HierPool)
    rev_pool: HierPool = field(default_factory=HierPool)
    centers: list = field(default_factory=list)
    fwd_rows: list = field(default_factory=list)
    rev_rows: list = field(default_factory=list)

    def add(self, c: int, fwd_ref: np.ndarray, rev_ref: np.ndarray) -> int:
        self.centers.append(c)
        self.fwd_rows.append(fwd_ref)
        self.rev_rows.append(rev_ref)
        return len(self.centers) - 1

    @cached_property
    def arrays(self):
        self.fwd_pool.freeze()
        self.rev_pool.freeze()
        z = np.zeros((0, self.n), dtype=np.int64)
        fwd = np.array(self.fwd_rows, dtype=np.int64) if self.fwd_rows else z
        rev = np.array(self.rev_rows, dtype=np.int64) if self.rev_rows else z
        return np.array(self.centers, dtype=np.int64), fwd, rev

    def keys(self, ref: np.ndarray, pool: HierPool):
        w = np.full(ref.shape, np.inf)
        h = np.full(ref.shape, BIG, dtype=np.int64)
        has = ref >= 0
        w[has] = pool.w[ref[has]]
        h[has] = pool.h[ref[has]]
        w[ref == -2] = 0.0
        h[ref == -2] = 0
        return w, h

    def touched(self, banned: np.ndarray):
        """Per instance: (walk into center touched per s, walk out touched per t)."""
        key = banned.tobytes()
        if getattr(self, "_touched_key", None) != key:
            self._touched_val = self._touched(banned)
            self._touched_key = key
        return self._touched_val

    def _touched(self, banned: np.ndarray):
        centers, fwd, rev = self.arrays
        bf = self.fwd_pool.touched_mask(np.flatnonzero(banned))
        br = self.rev_pool.touched_mask(np.flatnonzero(banned))
        tf = np.zeros(fwd.shape, dtype=bool)
        tr = np.zeros(rev.shape, dtype=bool)
        tf[fwd >= 0] = bf[fwd[fwd >= 0]]
        tr[rev >= 0] = br[rev[rev >= 0]]
        cb = banned[centers][:, None] if len(centers) else np.zeros((0, 1), bool)
        tf |= (fwd == -2) & cb
        tr |= (rev == -2) & cb
        return tr, tf

    def prefixes(self, width: int):
        centers, fwd, rev = self.arrays
        k = len(centers)
        cs = np.repeat(centers, self.n)
        FP = self.fwd_pool.prefixes(fwd.ravel(), cs, width).reshape(k, self.n, width)
        RP = self.rev_pool.prefixes(rev.ravel(), cs, width, reverse=True).reshape(k, self.n, width)
        _, rh = self.keys(rev, self.rev_pool)
        return RP, rh, FP

    def walk_into(self, k: int, s: int) -> list[int]:
        r = self.arrays[2][k, s]
        if r == -2:
            return [self.centers[k]]
        return self.rev_pool.walk(int(r))[0][::-1]

    def walk_out(self, k: int, t: int) -> list[int]:
        r = self.arrays[1][k, t]
        if r == -2:
            return [self.centers[k]]
        return self.fwd_pool.walk(int(r))[0]


class ThroughCenterLevel(LevelPaths):
    """Pairs glued at a center: ``inst[s, t]`` indexes a :class:`CenterInstances` row."""

    def __init__(self, W, H, inst, instances: CenterInstances):
        self.W, self.H, self.inst, self.instances = W, H, inst, instances
        _trivial_diag(self.W, self.H)
        idx = np.arange(len(W))
        self.inst[idx, idx] = -1

    def touched(self, banned: np.ndarray) -> np.ndarray:
        tr, tf = self.instances.touched(banned)
        out = np.zeros(self.inst.shape, dtype=bool)
        s_idx, t_idx = np.nonzero(self.inst >= 0)
        k = self.inst[s_idx, t_idx]
        out[s_idx, t_idx] = tr[k, s_idx] | tf[k, t_idx]
        idx = np.arange(self.n)
        out[idx, idx] |= banned
        return out

    def prefixes(self, width: int) -> np.ndarray:
        n = self.n
        out = np.full((n, n, width), -1, dtype=np.int64)
        idx = np.arange(n)
        out[idx, idx, 0] = idx
        if len(self.instances.centers):
            RP, RH, FP = self.instances.prefixes(width)
            K.glue_prefixes(self.inst, RP, RH, FP, out)
        return out

    def stored(self, s: int, t: int) -> StoredPath:
        if s == t:
            return StoredPath.explicit([s], 0.0)
        k = self.inst[s, t]
        if k < 0:
            return StoredPath.empty()
        inst = self.instances
        r = inst.arrays[2][k, s]
        wa = 0.0 if r == -2 else float(inst.rev_pool.w[r])
        a = inst.walk_into(int(k), s)
        b = inst.walk_out(int(k), t)
        wb = float(self.W[s, t] - wa)
        return StoredPath.concat(StoredPath.explicit(a, wa), StoredPath.explicit(b, wb))


class MergedLevel(LevelPaths):
    """Lexicographic minimum, pair by pair, over several collections of one level."""

    def __init__(self, parts: list[LevelPaths]):
        self.parts = parts
        n = parts[0].n
        self.W = parts[0].W.copy()
        self.H = parts[0].H.copy()
        self.choice = np.zeros((n, n), dtype=np.int64)
        for k, p in enumerate(parts[1:], start=1):
            better = (p.W < self.W) | ((p.W == self.W) & (p.H < self.H))
            self.W[better] = p.W[better]
            self.H[better] = p.H[better]
            self.choice[better] = k

    def touched(self, banned: np.ndarray) -> np.ndarray:
        out = np.zeros(self.W.shape, dtype=bool)
        for k, p in enumerate(self.parts):
            sel = self.choice == k
            if sel.any():
                out[sel] = p.touched(banned)[sel]
        return out

    def prefixes(self, width: int) -> np.ndarray:
        out = np.full(self.W.shape + (width,), -1, dtype=np.int64)
        for k, p in enumerate(self.parts):
            sel = self.choice == k
            if sel.any():
                out[sel] = p.prefixes(width)[sel]
        return out

    def stored(self, s: int, t: int) -> StoredPath:
        return self.parts[self.choice[s, t]].stored(s, t)
