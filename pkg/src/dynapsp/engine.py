"""The fully dynamic facade: epochs, buffered insertions, parameter schedules
and the rebuild scheduler."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .delete import EpochStructure, ack_preprocess, full_delete
from .graph import Graph, GraphView
from .paths import HopSchedule
from .preprocess import (LayeredBuild, build_layered_steps, det_preprocessing_steps, level_count,
                         rand_delta, run)

MODES = ("det", "fast", "space", "rand")


def _log(x: float) -> float:
    return max(1.0, math.log(x)) if x > 1 else 1.0


@dataclass(frozen=True)
class EngineConfig:
    """Engine settings; ``None`` fields are derived from n at every rebuild."""

    mode: str = "det"
    h: float | None = None
    tau: int | None = None
    delta: int | None = None
    delta_ack: int | None = None
    c: float = 1.0
    seed: int = 0
    sliced: bool = False
    unweighted: bool | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.delta is not None and self.delta < 1:
            raise ValueError("delta must be at least 1")
        if self.h is not None and self.h < 1:
            raise ValueError("h must be at least 1")


@dataclass(frozen=True)
class Params:
    h: float
    tau: int
    delta: int
    delta_ack: int


def default_params(n: int, mode: str) -> Params:
    """Mode defaults for ``n`` vertices, clamped (h in [1, n], tau >= 2n^2, cadences >= 1)."""
    n = max(1, int(n))
    ln = _log(n)
    floor_tau = 2 * n * n
    if mode in ("det", "space"):
        h = n**0.25 * math.sqrt(ln)
        tau = math.ceil(n**2.25 * math.sqrt(ln))
        delta = math.ceil(math.sqrt(n))
        delta_ack = delta
    elif mode == "fast":
        h = min(max(1.0, n ** (2 / 7) * ln ** (6 / 7)), n)
        lh = _log(h)
        delta = math.sqrt(n) * h**0.25 / (ln * lh) ** 0.25
        tau = n ** (7 / 3) * h ** (2 / 3) * (ln * lh) ** (1 / 3) / delta ** (2 / 3)
        delta_ack = math.sqrt(n**3 * lh / (max(tau, floor_tau) * ln))
        delta = max(1, math.ceil(delta))
        tau = math.ceil(tau)
        delta_ack = min(delta, max(1, math.ceil(delta_ack)))
    else:
        h = n ** (1 / 3) * ln**2
        tau = floor_tau
        delta = rand_delta(n, 0)
        delta_ack = delta
    h = min(max(1.0, h), float(n))
    return Params(h, max(int(tau), floor_tau), max(1, int(delta)), max(1, int(delta_ack)))


def configure(n: int, mode: str = "det", **overrides) -> EngineConfig:
    """Config for ``n`` vertices with every parameter filled in."""
    if n < 1:
        raise ValueError("n must be at least 1")
    p = default_params(n, mode)
    base = dict(mode=mode, h=p.h, tau=p.tau, delta=p.delta, delta_ack=p.delta_ack)
    base.update(overrides)
    return EngineConfig(**base)


def resolve(cfg: EngineConfig, n: int) -> Params:
    p = default_params(n, cfg.mode)
    h = p.h if cfg.h is None else float(cfg.h)
    tau = p.tau if cfg.tau is None else max(int(cfg.tau), 2 * max(1, n) ** 2)
    delta = p.delta if cfg.delta is None else int(cfg.delta)
    delta_ack = p.delta_ack if cfg.delta_ack is None else int(cfg.delta_ack)
    return Params(h, tau, delta, min(delta, max(1, delta_ack)))


# ---------------------------------------------------------------- epoch structures


@dataclass
class Structure:
    """One epoch's preprocessing on a frozen snapshot."""

    mode: str
    view: GraphView
    params: Params
    epoch: int
    state: EpochStructure
    phi: int
    c_size: int
    layered: LayeredBuild | None = None
    preproc: object = None
    updates: int = 0
    version: int = 0
    stats: dict = field(default_factory=dict)


def build_steps(view: GraphView, cfg: EngineConfig, params: Params, epoch: int):
    """Generator building one epoch's structure; yields once per root or center."""
    h = params.h
    n = view.n
    if cfg.mode == "rand":
        lb = yield from build_layered_steps(view, h, cfg.c, cfg.seed, stream=(epoch,))
        sched = HopSchedule(h, n)
        state = EpochStructure(view, sched, h, lb.merged(), lb.leftover.copy())
        phi = sum(o.table.phi for o in lb.outputs)
        return Structure("rand", view, params, epoch, state, phi, int(lb.leftover.sum()),
                         layered=lb)
    out = yield from det_preprocessing_steps(view, params.tau, h, cfg.unweighted,
                                             space=cfg.mode == "space")
    ack = None
    if cfg.mode == "fast":
        ack = ack_preprocess(view, out.congested, h, unweighted=_unweighted(view, cfg))
    state = EpochStructure(view, out.sched, h, out.levels, out.congested.copy(), ack)
    return Structure(cfg.mode, view, params, epoch, state, out.table.phi, out.table.size,
                     preproc=out)


def _unweighted(view: GraphView, cfg: EngineConfig) -> bool:
    return view.is_unit_weight() if cfg.unweighted is None else bool(cfg.unweighted)


def work_units(view: GraphView, cfg: EngineConfig, params: Params) -> int:
    """Estimated generator steps of :func:`build_steps` (exact for det, fast and space)."""
    n = view.n
    if cfg.mode == "rand":
        return max(1, 2 * n)
    return max(1, n)


class Job:
    """A rebuild advanced a few units per update against its own snapshot."""

    def __init__(self, gen, total: int, per_update: int):
        self.gen = gen
        self.total = total
        self.per_update = per_update
        self.done = 0
        self.result = None

    def advance(self, units: int | None = None) -> bool:
        units = self.per_update if units is None else units
        for _ in range(units):
            if self.result is not None:
                break
            try:
                next(self.gen)
                self.done += 1
            except StopIteration as stop:
                self.result = stop.value
        return self.result is not None

    def finish(self):
        while self.result is None:
            self.advance(1 << 30)
        return self.result


# ---------------------------------------------------------------- facade


class DynamicAPSP:
    """Exact APSP on a vertex-dynamic digraph with non-negative weights.

    ``distances()`` returns a slot-indexed matrix (``inf`` rows and columns
    for dead slots).  Deleted snapshot vertices form the batch D handed to
    :func:`full_delete`; vertices inserted since the snapshot are replayed
    with Johnson steps on top of its answer.
    """

    def __init__(self, graph: Graph, config: EngineConfig | None = None, **kw):
        self.graph = graph.copy()
        self.config = config if config is not None else EngineConfig(**kw)
        self.epoch = 0
        self.update_count = 0
        self.epoch_updates = 0
        self.pending: Job | None = None
        self.corrupt = False
        self._cache = None
        self._base_cache = None
        self.active = run(self._start())

    # -- building

    def _start(self):
        view = self.graph.view()
        params = resolve(self.config, view.n)
        return build_steps(view, self.config, params, self.epoch)

    def _epoch_end(self) -> None:
        self.epoch += 1
        self.epoch_updates = 0
        if not self.config.sliced:
            self.active = run(self._start())
            return
        if self.pending is not None:
            self.active = self.pending.finish()
            self.active.updates = 0
        view = self.graph.view()
        params = resolve(self.config, view.n)
        total = work_units(view, self.config, params)
        per = -(-total // params.delta)
        self.pending = Job(build_steps(view, self.config, params, self.epoch), total, per)
        self._base_cache = None

    def _inner_rebuilds(self) -> None:
        st = self.active
        k = st.updates
        if st.mode == "fast" and k % st.params.delta_ack == 0:
            dmask = self._dmask()
            st.state.ack = ack_preprocess(st.view, st.state.congested, st.params.h, removed=dmask,
                                          unweighted=_unweighted(st.view, self.config))
            st.version += 1
        if st.mode == "rand":
            n = st.view.n
            levels = level_count(st.params.h)
            lev = next((l for l in range(1, levels) if k % rand_delta(n, l) == 0), None)
            if lev is not None:
                view = st.view.without_mask(self._dmask())
                lb = run(build_layered_steps(view, st.params.h, st.layered.c, self.config.seed,
                                             start_level=lev, base=st.layered,
                                             stream=(st.epoch, k), auto_c=False))
                st.layered = lb
                st.state.levels = lb.merged()
                st.state.congested = lb.leftover.copy()
                st.phi = sum(o.table.phi for o in lb.outputs)
                st.c_size = int(lb.leftover.sum())
                st.version += 1

    def _after_update(self) -> None:
        self.update_count += 1
        self._cache = None
        if self.pending is not None:
            self.pending.advance()
        self.active.updates += 1
        self.epoch_updates += 1
        if self.epoch_updates >= self.active.params.delta:
            self._epoch_end()
            self._base_cache = None
        else:
            self._inner_rebuilds()

    # -- updates

    def delete(self, v: int) -> None:
        self.graph.delete_vertex(v)
        self._after_update()

    def insert(self, out_nbrs=None, in_nbrs=None) -> int:
        v = self.graph.insert_vertex(out_nbrs or {}, in_nbrs or {})
        self._after_update()
        return v

    def update(self, op) -> np.ndarray:
        """Apply ``("del", v)`` or ``("ins", out_nbrs, in_nbrs)`` and return distances."""
        kind = op[0]
        if kind == "del":
            self.delete(op[1])
        elif kind == "ins":
            self.insert(op[1], op[2])
        else:
            raise ValueError(f"unknown update {kind!r}")
        return self.distances()

    # -- queries

    def _dmask(self) -> np.ndarray:
        ids = self.active.view.ids
        alive = np.array(self.graph.alive, dtype=bool)
        return ~alive[ids]

    @property
    def d_size(self) -> int:
        return int(self._dmask().sum())

    @property
    def buffer(self) -> list[int]:
        snap = np.zeros(self.graph.n_slots, dtype=bool)
        snap[self.active.view.ids] = True
        return [v for v in self.graph.alive_ids() if not snap[v]]

    def _base(self) -> np.ndarray:
        dmask = self._dmask()
        key = (id(self.active), self.active.version, dmask.tobytes())
        if self._base_cache is None or self._base_cache[0] != key:
            Dm, rep = full_delete(self.active.state, dmask)
            self._base_cache = (key, Dm, rep)
        return self._base_cache[1]

    def distances(self) -> np.ndarray:
        if self._cache is None:
            self._cache = self._compute()
        out = self._cache.copy()
        if self.corrupt:
            fin = np.argwhere(np.isfinite(out) & ~np.eye(len(out), dtype=bool))
            if len(fin):
                out[tuple(fin[0])] += 1.0
            else:
                alive = np.flatnonzero(self.graph.alive)
                if len(alive):
                    out[alive[0], alive[0]] = 1.0
        return out

    def _compute(self) -> np.ndarray:
        view = self.active.view
        base = self._base()
        N = view.size
        buf = self.buffer
        n_slots = self.graph.n_slots
        alive_snap = ~self._dmask()
        idx = np.full(n_slots, -1, dtype=np.int64)
        idx[view.ids[alive_snap]] = np.flatnonzero(alive_snap)
        idx[buf] = N + np.arange(len(buf))
        if buf:
            M = N + len(buf)
            Dm = np.full((M, M), np.inf)
            Dm[:N, :N] = base
            Wg = np.full((M, M), np.inf)
            for v in buf:
                for u, w in self.graph.out_edges[v].items():
                    Wg[idx[v], idx[u]] = w
                for u, w in self.graph.in_edges[v].items():
                    Wg[idx[u], idx[v]] = w
            present = np.zeros(M, dtype=bool)
            present[:N] = alive_snap
            for j in range(len(buf)):
                K.johnson_insert_plain(Dm, Wg, present, N + j)
        else:
            Dm = base
        out = np.full((n_slots, n_slots), np.inf)
        slots = np.flatnonzero(idx >= 0)
        out[np.ix_(slots, slots)] = Dm[np.ix_(idx[slots], idx[slots])]
        return out

    def query(self, s: int, t: int) -> float:
        return float(self.distances()[s, t])

    # -- diagnostics

    @property
    def phi(self) -> int:
        return int(self.active.phi)

    @property
    def c_size(self) -> int:
        return int(self.active.c_size)

    def stats(self) -> dict:
        st = self.active
        return {"mode": st.mode, "epoch": self.epoch, "updates": self.update_count,
                "phi": self.phi, "c_size": self.c_size, "d_size": self.d_size,
                "buffer": len(self.buffer), "h": st.params.h, "tau": st.params.tau,
                "delta": st.params.delta}


__all__ = ["DynamicAPSP", "EngineConfig", "MODES", "Params", "configure", "default_params",
           "resolve"]
