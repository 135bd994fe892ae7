"""Deletion: repair phases over the hop ladder, Johnson reinsertion of the
congested set, the separator-based extension past hop ``h`` and the
center store used by the fast mode."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .graph import GraphView
from .paths import BIG, HopSchedule, LevelPaths, StoredPath
from .preprocess import _search


# ---------------------------------------------------------------- repair phases


class RepairedLevel(LevelPaths):
    """One hop level after a deletion phase.

    ``piv[s, t]``: ``-1`` keeps the preprocessed path, ``-2`` means no path,
    ``-3`` the graph edge, ``t`` reuses the previous level's pair and any
    other ``x`` concatenates the previous level's ``(s, x)`` and ``(x, t)``.
    """

    def __init__(self, base: LevelPaths, prev: RepairedLevel | None, W, H, piv):
        self.base, self.prev = base, prev
        self.W, self.H, self.piv = W, H, piv
        self._pf = {}

    def prefixes(self, width: int) -> np.ndarray:
        if width not in self._pf:
            PF = self.base.prefixes(width)
            if self.prev is None:
                PF[self.piv == -2] = -1
                s, t = np.nonzero(self.piv == -3)
                PF[s, t] = -1
                PF[s, t, 0] = s
                if width > 1:
                    PF[s, t, 1] = t
            else:
                K.repaired_prefixes(self.prev.prefixes(width), self.prev.H, PF, self.piv)
            self._pf[width] = PF
        return self._pf[width]

    def stored(self, s: int, t: int) -> StoredPath:
        x = int(self.piv[s, t])
        if x == -1:
            return self.base.stored(s, t)
        if x == -2:
            return StoredPath.empty()
        if x == -3:
            return StoredPath.edge(s, t, float(self.W[s, t]))
        if x == t:
            return self.prev.stored(s, t)
        return StoredPath.concat(self.prev.stored(s, x), self.prev.stored(x, t))


@dataclass
class PhaseReport:
    """Separator sizes, candidate counts and pivot evaluations per level and source."""

    sep_size: list = field(default_factory=list)
    sep_cand: list = field(default_factory=list)
    radius: list = field(default_factory=list)
    evals: list = field(default_factory=list)


def phase_delete(levels: list[LevelPaths], dmask: np.ndarray, cmask: np.ndarray,
                 sched: HopSchedule, edges: np.ndarray | None = None
                 ) -> tuple[list[RepairedLevel], PhaseReport]:
    """Repair every level after deleting ``dmask``, bottom-up.

    Pairs whose stored path avoids the deleted vertices keep it.  At level 0
    the others fall back to the direct edge in ``edges`` (dense snapshot
    weights) when one survives, else no path.  Above, they take the best of
    the previous level's pair and every concatenation through a separator: the
    non-excluded vertices at the radius (inside the level's interval) with the
    fewest such vertices.  Empty ``dmask`` skips all work.
    """
    report = PhaseReport()
    n = len(dmask)
    out: list[RepairedLevel] = []
    if not dmask.any():
        for lev in levels:
            piv = np.full((n, n), -1, dtype=np.int64)
            out.append(RepairedLevel(lev, out[-1] if out else None, lev.W, lev.H, piv))
        return out, report
    excluded = dmask | cmask
    for i, lev in enumerate(levels):
        W = lev.W.copy()
        H = lev.H.copy()
        piv = np.full((n, n), -1, dtype=np.int64)
        touched = lev.touched(dmask)
        touched[dmask, :] = True
        touched[:, dmask] = True
        if i == 0:
            W[touched] = np.inf
            H[touched] = BIG
            piv[touched] = -2
            if edges is not None:
                keep = touched & np.isfinite(edges) & ~dmask[:, None] & ~dmask[None, :]
                W[keep] = edges[keep]
                H[keep] = 1
                piv[keep] = -3
            out.append(RepairedLevel(lev, None, W, H, piv))
            continue
        prev = out[-1]
        rlo, rhi = sched.radius_range(i)
        sep_size = np.zeros(n, dtype=np.int64)
        sep_cand = np.zeros(n, dtype=np.int64)
        sep_rad = np.full(n, -1, dtype=np.int64)
        evals = np.zeros(n, dtype=np.int64)
        K.repair_level(prev.W, prev.H, W, H, piv, touched, excluded, dmask, rlo, rhi,
                       sched.is_small(i), sep_size, sep_cand, sep_rad, evals)
        report.sep_size.append(sep_size)
        report.sep_cand.append(sep_cand)
        report.radius.append(sep_rad)
        report.evals.append(evals)
        out.append(RepairedLevel(lev, prev, W, H, piv))
    return out, report


# ---------------------------------------------------------------- Johnson reinsertion


def _check_add(covered: np.ndarray, add) -> np.ndarray:
    add = np.asarray(sorted(int(c) for c in add), dtype=np.int64)
    if len(add) and covered[add].any():
        raise ValueError(f"vertices already covered: {add[covered[add]].tolist()}")
    if len(np.unique(add)) != len(add):
        raise ValueError("duplicate vertices in add")
    return add


def johnson_reinsert(Dm: np.ndarray, Wg: np.ndarray, covered: np.ndarray, add) -> np.ndarray:
    """Extend exact distances among ``covered`` to ``covered + add``, in place.

    Vertices are inserted one at a time in ascending order; ``Wg`` holds the
    target graph's edge weights.
    """
    present = covered.copy()
    for c in _check_add(covered, add):
        K.johnson_insert_plain(Dm, Wg, present, int(c))
    return Dm


def johnson_reinsert_paths(W, H, PF, Wg, covered: np.ndarray, add, track: bool = True):
    """Lexicographic variant on ``(weight, hop)`` keys, keeping path prefixes in ``PF``."""
    present = covered.copy()
    for c in _check_add(covered, add):
        K.johnson_insert(W, H, PF, Wg, present, int(c), track)
    return W, H, PF


# ---------------------------------------------------------------- extension


@dataclass
class ExtensionReport:
    separator: int = 0
    passes: int = 0
    window: int = 0


def extension_window(h: float) -> int:
    return max(1, math.floor(h / 4))


def extend_distances(W, H, PF, h: float, alive: np.ndarray) -> tuple[np.ndarray, ExtensionReport]:
    """Exact distances from keys that are exact whenever the fewest-edge
    shortest path has at most ``floor(h)`` edges.

    One greedy hitting set over the first ``L + 1`` vertices of every stored
    walk with at least ``L = max(1, floor(h/4))`` edges serves as a fixed
    pivot set.  Each pass relaxes every pair through it; the covered hop
    length ``g`` grows to ``2g - L`` per pass until it reaches ``n - 1``.
    """
    Dm = W.copy()
    rep = ExtensionReport()
    n_alive = int(alive.sum())
    g = math.floor(h)
    if g >= n_alive - 1:
        return Dm, rep
    L = extension_window(h)
    rep.window = L
    if g <= L:
        pivots = np.flatnonzero(alive).astype(np.int64)
        grow = lambda g: 2 * g
    else:
        ptr, el = K.window_sets(PF, H, L, len(W))
        pivots = K.greedy_hit(ptr, el, len(W))
        grow = lambda g: 2 * g - L
    rep.separator = len(pivots)
    while g < n_alive - 1:
        rep.passes += 1
        changed = K.pivot_pass(Dm, pivots)
        g = grow(g)
        if not changed:
            break
    return Dm, rep


# ---------------------------------------------------------------- center store


@dataclass
class AckStore:
    """Bounded searches into and out of every center on ``view`` minus ``removed``.

    Rows are indexed by position in ``centers``.  ``fwd_P[k, t]`` is the walk
    ``c -> t``; ``rev_P[k, s]`` the walk ``s -> c`` stored back to front.
    """

    view: GraphView
    centers: np.ndarray
    budget: int
    removed: np.ndarray
    unweighted: bool
    fw: np.ndarray
    fh: np.ndarray
    rw: np.ndarray
    rh: np.ndarray
    fwd_P: list
    rev_P: list
    members: np.ndarray

    @property
    def size(self) -> int:
        return len(self.centers)


def _center_rows(view, act, c, budget, unweighted):
    fw, fh, fP, _ = _search(view, act, int(c), budget, unweighted)
    rw, rh, rP, _ = _search(view.reversed(), act, int(c), budget, unweighted)
    mem = np.zeros(view.size, dtype=bool)
    for P in (fP, rP):
        mem[P[P >= 0]] = True
    return fw, fh, fP, rw, rh, rP, mem


def ack_preprocess(view: GraphView, centers: np.ndarray, h: float,
                   removed: np.ndarray | None = None, unweighted: bool = False) -> AckStore:
    """Searches of ``ceil(h)`` edges from and to each center of the mask ``centers``."""
    N = view.size
    removed = np.zeros(N, dtype=bool) if removed is None else removed.copy()
    budget = max(1, math.ceil(h))
    cs = np.flatnonzero(centers & view.active & ~removed)
    act = view.active & ~removed
    k = len(cs)
    store = AckStore(view, cs, budget, removed, unweighted,
                     np.full((k, N), np.inf), np.full((k, N), BIG, dtype=np.int64),
                     np.full((k, N), np.inf), np.full((k, N), BIG, dtype=np.int64),
                     [None] * k, [None] * k, np.zeros((k, N), dtype=bool))
    for q, c in enumerate(cs):
        _fill(store, q, _center_rows(view, act, c, budget, unweighted))
    return store


def _fill(store: AckStore, q: int, rows) -> None:
    fw, fh, fP, rw, rh, rP, mem = rows
    store.fw[q], store.fh[q], store.fwd_P[q] = fw, fh, fP
    store.rw[q], store.rh[q], store.rev_P[q] = rw, rh, rP
    store.members[q] = mem


@dataclass
class AckResult:
    store: AckStore
    fw: np.ndarray
    fh: np.ndarray
    rw: np.ndarray
    rh: np.ndarray
    fwd_P: list
    rev_P: list
    recomputed: int

    def glue(self, W, H):
        """Lexicographic min of ``W, H`` with every center glue, in place; returns center choice."""
        CI = np.full(W.shape, -1, dtype=np.int64)
        K.glue_centers(W, H, CI, self.store.centers, self.rw, self.rh, self.fw, self.fh)
        return CI

    def prefixes(self, width: int):
        k, N = self.fw.shape
        FP = np.full((k, N, width), -1, dtype=np.int64)
        RP = np.full((k, N, width), -1, dtype=np.int64)
        for q in range(k):
            fP = self.fwd_P[q]
            m = min(width, fP.shape[1])
            FP[q, :, :m] = fP[:, :m]
            rP = self.rev_P[q]
            for s in np.flatnonzero(np.isfinite(self.rw[q])):
                seq = rP[s, : self.rh[q, s] + 1][::-1]
                m = min(width, len(seq))
                RP[q, s, :m] = seq[:m]
        return RP, self.rh, FP


def ack_delete(store: AckStore, dmask: np.ndarray) -> AckResult:
    """Center rows valid on the snapshot minus ``dmask`` (a superset of ``removed``).

    Only centers whose searches met a newly deleted vertex are recomputed;
    deleted centers get empty rows.
    """
    new = dmask & ~store.removed
    fw, fh, rw, rh = store.fw.copy(), store.fh.copy(), store.rw.copy(), store.rh.copy()
    fwd_P, rev_P = list(store.fwd_P), list(store.rev_P)
    act = store.view.active & ~dmask
    redo = 0
    for q, c in enumerate(store.centers):
        if dmask[c]:
            fw[q], rw[q] = np.inf, np.inf
            fh[q], rh[q] = BIG, BIG
            continue
        if not (store.members[q] & new).any():
            continue
        redo += 1
        f, a, fP, r, b, rP, _ = _center_rows(store.view, act, c, store.budget, store.unweighted)
        fw[q], fh[q], fwd_P[q] = f, a, fP
        rw[q], rh[q], rev_P[q] = r, b, rP
    return AckResult(store, fw, fh, rw, rh, fwd_P, rev_P, redo)


# ---------------------------------------------------------------- composition


@dataclass
class EpochStructure:
    """Everything a deletion batch needs from one epoch's preprocessing.

    ``levels`` are the per-hop-level stored paths on the snapshot ``view``,
    ``congested`` the vertices they avoid.  Without ``ack`` the congested
    vertices are reinserted Johnson-style; with it they are reached through
    the center store instead.
    """

    view: GraphView
    sched: HopSchedule
    h: float
    levels: list
    congested: np.ndarray
    ack: AckStore | None = None


@dataclass
class DeleteReport:
    phases: PhaseReport
    extension: ExtensionReport
    ack_recomputed: int = 0


def full_delete(state: EpochStructure, dmask: np.ndarray) -> tuple[np.ndarray, DeleteReport]:
    """Exact distances on the snapshot minus ``dmask`` (compact indices)."""
    view = state.view
    alive = view.active & ~dmask
    Wg = view.dense()
    levels, prep = phase_delete(state.levels, dmask, state.congested, state.sched, Wg)
    fin = levels[-1]
    W, H = fin.W.copy(), fin.H.copy()
    need = math.floor(state.h) < int(alive.sum()) - 1
    width = extension_window(state.h) + 1 if need else 1
    PF = fin.prefixes(width).copy() if need else np.full(W.shape + (1,), -1, dtype=np.int64)
    rep = DeleteReport(prep, ExtensionReport())
    if state.ack is not None:
        res = ack_delete(state.ack, dmask)
        rep.ack_recomputed = res.recomputed
        CI = res.glue(W, H)
        if need:
            RP, RH, FP = res.prefixes(width)
            K.glue_prefixes(CI, RP, RH, FP, PF)
    else:
        add = np.flatnonzero(state.congested & alive)
        if len(add):
            Wg[dmask, :] = np.inf
            Wg[:, dmask] = np.inf
            johnson_reinsert_paths(W, H, PF, Wg, alive & ~state.congested, add, track=need)
    Dm, rep.extension = extend_distances(W, H, PF, state.h, alive)
    Dm[~alive, :] = np.inf
    Dm[:, ~alive] = np.inf
    return Dm, rep
