"""Preprocessing: bounded Bellman-Ford, congestion-driven path building from
every root, the space-efficient linked variant, and the randomized
center-based build with its layered stack.

Every build is a generator that yields once per unit of work (a root or a
center) and returns its result, so the engine can spread a rebuild over
several updates.  :func:`run` drives one to completion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .graph import Graph, GraphView, VertexSet
from .paths import (BIG, CenterInstances, CongestionTable, ExplicitLevel, HierLevel,
                    HierPool, HopSchedule, LevelPaths, MergedLevel, ThroughCenterLevel)


def run(gen):
    """Drive a build generator to completion and return its result."""
    while True:
        try:
            next(gen)
        except StopIteration as stop:
            return stop.value


def as_view(g) -> GraphView:
    return g.view() if isinstance(g, Graph) else g


# ---------------------------------------------------------------- bounded search


@dataclass
class SearchResult:
    """Bounded search from one source over a compact index space."""

    source: int
    weight: np.ndarray
    hop: np.ndarray
    paths: np.ndarray

    @property
    def parent(self) -> np.ndarray:
        par = np.full(len(self.weight), -1, dtype=np.int64)
        ok = (self.hop > 0) & (self.hop < BIG)
        rows = np.flatnonzero(ok)
        par[rows] = self.paths[rows, self.hop[rows] - 1]
        return par

    def path(self, t: int) -> list[int] | None:
        if not np.isfinite(self.weight[t]):
            return None
        return self.paths[t, : self.hop[t] + 1].tolist()


_NO_SC = np.full(0, np.inf)


def _search(view: GraphView, active: np.ndarray, src: int, budget: int, unweighted: bool):
    n = view.size
    if unweighted:
        dist, P, plen = K.bfs_paths(view.out_ptr, view.out_nbr, view.in_ptr, view.in_nbr,
                                    active, src, budget)
        W = np.where(dist >= 0, dist.astype(np.float64), np.inf)
        H = np.where(dist >= 0, dist, BIG)
        return W, H, P, plen
    sc_w = np.full(n, np.inf)
    sc_h = np.full(n, BIG, dtype=np.int64)
    LW, LH = K.lex_bf(view.out_ptr, view.out_nbr, view.out_w, active, src, budget, sc_w, sc_h)
    P, plen, _ = K.lex_paths(view.in_ptr, view.in_nbr, view.in_w, active, src, LW, LH, sc_w, sc_h)
    return LW[-1].copy(), LH[-1].copy(), P, plen


def bellman_ford_bounded(g, source: int, budget: int, unweighted: bool | None = None) -> SearchResult:
    """Minimum weight over walks of at most ``budget`` edges from ``source``.

    Among the minimum-weight walks the recorded one has the fewest edges;
    remaining ties take the smallest-id predecessor.  Vertices are compact
    indices of the view (equal to slot ids when nothing was ever deleted).
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    view = as_view(g)
    if unweighted is None:
        unweighted = view.is_unit_weight()
    W, H, P, _ = _search(view, view.active, int(source), int(budget), unweighted)
    return SearchResult(int(source), W, H, P)


# ---------------------------------------------------------------- outputs


@dataclass
class PreprocOutput:
    """Congested set, its ledger and the per-level stored paths."""

    view: GraphView
    sched: HopSchedule
    table: CongestionTable
    levels: list[LevelPaths]
    congested: np.ndarray
    stats: dict = field(default_factory=dict)

    def ledger(self) -> dict:
        """Measured congestion figures next to the bounds they must respect."""
        n = self.view.n
        t = self.table
        return {"max_congestion": int(t.cong.max(initial=0)), "tau": t.tau, "phi": t.phi,
                "phi_bound": 3 * n * n * (n + 1) * (self.sched.i_h + 1), "c_size": t.size,
                "c_bound": 2 * t.phi / t.tau}

    def check_ledger(self, phi: bool = True) -> None:
        """Assert congestion <= tau, |C| <= 2 phi / tau and (optionally) the phi bound."""
        led = self.ledger()
        self.table.check()
        assert led["max_congestion"] <= led["tau"], led
        assert led["c_size"] <= led["c_bound"], led
        if phi:
            assert led["phi"] <= led["phi_bound"], led

    @property
    def congested_set(self) -> VertexSet:
        n_slots = int(self.view.ids.max(initial=-1)) + 1
        return VertexSet(n_slots, self.view.ids[self.congested].tolist())


def _space_windows(sched: HopSchedule, top: int):
    budgets = sched.budgets(top)
    lo = np.zeros(top + 1, dtype=np.int64)
    hi = np.full(top + 1, -1, dtype=np.int64)
    small = np.zeros(top + 1, dtype=np.bool_)
    for j in range(1, top + 1):
        rlo, rhi = sched.radius_range(j)
        lo[j] = max(rlo, budgets[j] - budgets[j - 1] + 1)
        hi[j] = min(rhi, budgets[j - 1])
        small[j] = sched.is_small(j)
    return budgets, lo, hi, small


def _distinct_counts(ptr: np.ndarray, vs: np.ndarray, n: int, rows=None) -> np.ndarray:
    """How many of the listed walks contain each vertex (each walk counted once)."""
    lens = np.diff(ptr)
    walk = np.repeat(np.arange(len(lens)), lens)
    if rows is not None:
        keep = rows[walk]
        walk, vs = walk[keep], vs[keep]
    key = np.unique(walk * n + vs)
    return np.bincount(key % n, minlength=n)


@dataclass
class SourceStore:
    """One search's nodes before they join a pool."""

    src: int
    link: np.ndarray
    tail_ptr: np.ndarray
    tail: np.ndarray
    w: np.ndarray
    h: np.ndarray
    stage: np.ndarray
    final: np.ndarray
    sep_size: np.ndarray
    top_long: bool

    def vertex_lists(self):
        srcs = np.full(len(self.final), self.src, dtype=np.int64)
        node_src = np.full(len(self.link), self.src, dtype=np.int64)
        return K.node_vertex_lists(self.final, srcs, node_src, self.link, self.tail_ptr,
                                   self.tail, self.h)

    def storage(self) -> int:
        """Explicit edges plus links held by this search."""
        return int(len(self.tail) + np.count_nonzero(self.link >= 0))

    def add_to(self, pool: HierPool) -> np.ndarray:
        off = pool.add(self.src, self.link, self.tail_ptr, self.tail, self.w, self.h, self.stage)
        return np.where(self.final >= 0, self.final + off, self.final)


def bf_space_efficient(g, source: int, level: int, sched: HopSchedule | None = None,
                       active: np.ndarray | None = None) -> SourceStore:
    """Linked search from ``source`` for hop level ``level``.

    The walk to each target weighs at most the ``B_level``-edge restricted
    distance (and has no more edges than the best such walk of that weight),
    with at most ``sum_j B_j`` edges.
    """
    view = as_view(g)
    if sched is None:
        sched = HopSchedule(HopSchedule.h_at(level), view.n)
    budgets, lo, hi, small = _space_windows(sched, level)
    act = view.active if active is None else active
    res = K.bfse_source(view.out_ptr, view.out_nbr, view.out_w, view.in_ptr, view.in_nbr,
                        view.in_w, act, int(source), budgets, lo, hi, small)
    return SourceStore(int(source), *res)


# ---------------------------------------------------------------- deterministic build


def check_tau(tau: int, n: int) -> None:
    if tau < 2 * n * n:
        raise ValueError(f"tau={tau} must be at least 2n^2={2 * n * n}")


def det_preprocessing_steps(g, tau: int, h: float, unweighted: bool | None = None,
                            space: bool = False):
    """Generator form of :func:`det_preprocessing`; yields after each root."""
    view = as_view(g)
    n = view.n
    N = view.size
    check_tau(tau, n)
    sched = HopSchedule(h, n)
    if unweighted is None:
        unweighted = view.is_unit_weight()
    unweighted = unweighted and not space
    table = CongestionTable(N, tau, n)
    levels_W = [np.full((N, N), np.inf) for _ in sched.levels]
    levels_H = [np.full((N, N), BIG, dtype=np.int64) for _ in sched.levels]
    if space:
        pools = [HierPool() for _ in sched.levels]
        refs = [np.full((N, N), -1, dtype=np.int64) for _ in sched.levels]
        storage = []
        windows = {i: _space_windows(sched, i) for i in sched.levels}
    else:
        levels_P = [np.full((N, N, sched.budget(i) + 1), -1, dtype=np.int64) for i in sched.levels]
    for s in np.flatnonzero(view.active):
        for i in sched.levels:
            act = view.active & ~table.congested
            if space:
                budgets, lo, hi, small = windows[i]
                res = K.bfse_source(view.out_ptr, view.out_nbr, view.out_w, view.in_ptr,
                                    view.in_nbr, view.in_w, act, int(s), budgets, lo, hi, small)
                store = SourceStore(int(s), *res)
                refs[i][s] = store.add_to(pools[i])
                storage.append((i, int(s), store.storage(), store.sep_size.copy(),
                                int(np.count_nonzero(store.final >= 0))))
                ptr, vs = store.vertex_lists()
                rows = np.arange(N) != s
                counts = _distinct_counts(ptr, vs, N, rows)
            else:
                W, H, P, plen = _search(view, act, int(s), sched.budget(i), unweighted)
                levels_W[i][s] = W
                levels_H[i][s] = H
                k = min(P.shape[1], levels_P[i].shape[2])
                levels_P[i][s, :, :k] = P[:, :k]
                walks = P[plen > 0]
                counts = np.bincount(walks[walks >= 0], minlength=N)
            table.charge_counts(counts, sched.charge(i))
        yield
    if space:
        levels = [HierLevel(pools[i], refs[i]) for i in sched.levels]
        stats = {"storage": storage}
    else:
        levels = [ExplicitLevel(levels_W[i], levels_H[i], levels_P[i]) for i in sched.levels]
        stats = {}
    return PreprocOutput(view, sched, table, levels, table.congested.copy(), stats)


def det_preprocessing(g, tau: int, h: float, unweighted: bool | None = None,
                      space: bool = False) -> PreprocOutput:
    """Paths from every root at every hop level, avoiding the congested set.

    Roots are taken in ascending order.  After each level of a root every
    vertex on its walks is charged ceil(n / h_i) and vertices above tau/2 join
    the congested set, which later searches avoid.
    """
    return run(det_preprocessing_steps(g, tau, h, unweighted, space))


# ---------------------------------------------------------------- randomized build


@dataclass
class RandLevelConfig:
    level: int
    centers: np.ndarray
    tau: int
    delta: int
    c: float


def rand_tau(n: int, level: int, c: float) -> int:
    logn = max(1, math.ceil(math.log(n))) if n > 1 else 1
    return max(math.ceil(c * logn**3 * 2**level * n * n), 2 * n * n)


def _center_search(view, act, c, sched, i, windows):
    budgets, lo, hi, small = windows[i]
    rv = view.reversed()
    fwd = SourceStore(int(c), *K.bfse_source(view.out_ptr, view.out_nbr, view.out_w, view.in_ptr,
                                            view.in_nbr, view.in_w, act, int(c), budgets, lo, hi,
                                            small))
    rev = SourceStore(int(c), *K.bfse_source(rv.out_ptr, rv.out_nbr, rv.out_w, rv.in_ptr,
                                            rv.in_nbr, rv.in_w, act, int(c), budgets, lo, hi,
                                            small))
    return fwd, rev


def _same_as_lower(view, act, c, sched, i) -> bool:
    """Whether level ``i`` may reuse level ``i-1``: no best walk needs more edges."""
    if i == 0:
        return False
    lim = sched.budget(i - 1)
    n = view.size
    sc_w = np.full(n, np.inf)
    sc_h = np.full(n, BIG, dtype=np.int64)
    for v in (view, view.reversed()):
        LW, LH = K.lex_bf(v.out_ptr, v.out_nbr, v.out_w, act, int(c), sched.budget(i), sc_w, sc_h)
        hops = LH[-1][np.isfinite(LW[-1])]
        if hops.size and hops.max() > lim:
            return False
    return True


def rand_preprocessing_steps(g, c_in, tau: int, h: float, rng_seed):
    """Generator form of :func:`rand_preprocessing`; yields after each center."""
    view = as_view(g)
    n = view.n
    N = view.size
    check_tau(tau, n)
    sched = HopSchedule(h, n)
    c_mask = c_in if isinstance(c_in, np.ndarray) else view.slot_mask(c_in)
    c_mask = c_mask & view.active
    rng = np.random.default_rng(rng_seed)
    table = CongestionTable(N, tau, n)
    windows = {i: _space_windows(sched, i) for i in sched.levels}
    inst = CenterInstances(N)
    W = [np.full((N, N), np.inf) for _ in sched.levels]
    H = [np.full((N, N), BIG, dtype=np.int64) for _ in sched.levels]
    I = [np.full((N, N), -1, dtype=np.int64) for _ in sched.levels]
    for i in sched.levels:
        idx = np.flatnonzero(view.active)
        W[i][idx, idx] = 0.0
        H[i][idx, idx] = 0
    stamp = np.full(N, -1, dtype=np.int64)
    counter = np.zeros(2, dtype=np.int64)
    X = np.flatnonzero(c_mask).tolist()
    recomputes = 0
    while X:
        j = int(rng.integers(len(X)))
        c = X[j]
        X[j] = X[-1]
        X.pop()
        prev = None
        for i in sched.levels:
            charge = sched.charge(i)
            start = 0
            while True:
                act = view.active & ~table.congested
                if prev is not None and prev[0] == table.size and _same_as_lower(view, act, c, sched, i):
                    size_at, k, lists, keys = prev
                else:
                    size_at = table.size
                    fwd, rev = _center_search(view, act, c, sched, i, windows)
                    k = inst.add(c, fwd.add_to(inst.fwd_pool), rev.add_to(inst.rev_pool))
                    lists = fwd.vertex_lists() + rev.vertex_lists()
                    keys = _keys(fwd) + _keys(rev)
                fw, fh, rw, rh = keys
                fptr, fvs, rptr, rvs = lists
                before = counter[1]
                p = K.rand_improve(W[i], H[i], I[i], k, rw, rh, fw, fh, rptr, rvs, fptr, fvs,
                                   table.cong, charge, table.tau, table.congested, start,
                                   stamp, counter)
                table.charged += int(counter[1] - before)
                # searches stay reusable only while the congested set they avoided is current
                prev = (size_at, k, lists, keys)
                if p < 0:
                    break
                recomputes += 1
                start = p
        yield
    levels = [ThroughCenterLevel(W[i], H[i], I[i], inst) for i in sched.levels]
    out = PreprocOutput(view, sched, table, levels, table.congested.copy(),
                        {"recomputes": recomputes, "instances": len(inst.centers)})
    return out


def _keys(store: SourceStore):
    n = len(store.final)
    w = np.full(n, np.inf)
    h = np.full(n, BIG, dtype=np.int64)
    has = store.final >= 0
    w[has] = store.w[store.final[has]]
    h[has] = store.h[store.final[has]]
    w[store.src] = 0.0
    h[store.src] = 0
    return w, h


def rand_preprocessing(g, c_in, tau: int, h: float, rng_seed) -> PreprocOutput:
    """Paths through random-order centers of ``c_in`` avoiding the growing congested set.

    A pair's path is replaced when the walk glued at the current center is
    lexicographically better.  When charging pushes a vertex above tau/2 the
    center's searches are redone on the shrunk graph before continuing.
    """
    return run(rand_preprocessing_steps(g, c_in, tau, h, rng_seed))


@dataclass
class LayeredBuild:
    configs: list[RandLevelConfig]
    outputs: list[PreprocOutput]
    leftover: np.ndarray
    c: float

    def merged(self) -> list[LevelPaths]:
        """Per hop level, the pairwise lexicographic minimum across layers."""
        return [MergedLevel([o.levels[i] for o in self.outputs])
                for i in range(len(self.outputs[0].levels))]


def level_count(h: float) -> int:
    return max(0, math.ceil(math.log2(h))) + 1 if h > 1 else 1


def rand_delta(n: int, level: int) -> int:
    lg = max(1.0, math.log(n)) if n > 1 else 1.0
    return max(1, math.ceil(n ** (2 / 3) / (2**level * lg)))


def build_layered_steps(g, h: float, c: float = 1.0, rng_seed=0, start_level: int = 0,
                        base: LayeredBuild | None = None, stream: tuple = (), auto_c: bool = True):
    """Generator form of :func:`build_layered`.

    With ``base`` and ``start_level`` > 0 the lower levels are kept and levels
    from ``start_level`` up are rebuilt on ``g`` from ``base``'s center set at
    that level (minus vertices no longer active).  Level ``l`` draws its
    center order from the seed sequence ``(rng_seed, *stream, l)``.
    """
    view = as_view(g)
    n = view.n
    L = level_count(h)
    while True:
        if base is not None and start_level > 0:
            configs = list(base.configs[:start_level])
            outputs = list(base.outputs[:start_level])
            centers = outputs[-1].congested & view.active
        else:
            configs, outputs = [], []
            centers = view.active.copy()
        for lev in range(start_level if base is not None else 0, L):
            tau = rand_tau(n, lev, c)
            out = yield from rand_preprocessing_steps(view, centers, tau, h, (int(rng_seed), *stream, lev))
            configs.append(RandLevelConfig(lev, centers.copy(), tau, rand_delta(n, lev), c))
            outputs.append(out)
            centers = out.congested & view.active
            if lev == 0 and auto_c and (base is None or start_level == 0) and centers.sum() > n / 2:
                break
        else:
            return LayeredBuild(configs, outputs, centers, c)
        c *= 2


def build_layered(g, h: float, c: float = 1.0, rng_seed=0) -> LayeredBuild:
    """Stack of randomized builds: level 0 uses every vertex as a center, each
    next level the previous level's congested output.  ``c`` is doubled until
    the first congested set has at most n/2 vertices."""
    return run(build_layered_steps(g, h, c, rng_seed))
