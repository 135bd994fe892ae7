"""Greedy hitting sets and smallest-layer radius selection."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .graph import VertexSet


@dataclass(frozen=True)
class SetSystem:
    """Sets over the universe ``0..universe-1``, each with at least ``min_size`` elements."""

    universe: int
    sets: tuple
    min_size: int

    def __init__(self, universe: int, sets, min_size: int | None = None):
        sets = tuple(tuple(sorted(set(int(x) for x in s))) for s in sets)
        if min_size is None:
            min_size = min((len(s) for s in sets), default=1)
        for s in sets:
            if not s:
                raise ValueError("empty set in system")
            if len(s) < min_size:
                raise ValueError(f"set {s} smaller than min_size={min_size}")
            if s[0] < 0 or s[-1] >= universe:
                raise ValueError(f"set {s} leaves universe 0..{universe - 1}")
        object.__setattr__(self, "universe", int(universe))
        object.__setattr__(self, "sets", sets)
        object.__setattr__(self, "min_size", int(min_size))

    def size_bound(self) -> int:
        """ceil((u / s) ln(k + 1)) + 1 for k sets."""
        k = len(self.sets)
        return math.ceil(self.universe / self.min_size * math.log(k + 1)) + 1

    def csr(self):
        ptr = np.zeros(len(self.sets) + 1, dtype=np.int64)
        np.cumsum([len(s) for s in self.sets], out=ptr[1:])
        el = np.fromiter((x for s in self.sets for x in s), dtype=np.int64, count=int(ptr[-1]))
        return ptr, el


def greedy_hitting_set(sys: SetSystem) -> VertexSet:
    """Pick the element hitting most unhit sets until every set is hit.

    Ties go to the smallest element.  Each round scans the universe, so the
    cost is O(|A| * u + sum |N_i|) rather than the bucketed linear bound.
    """
    ptr, el = sys.csr()
    chosen = K.greedy_hit(ptr, el, sys.universe)
    return VertexSet(sys.universe, chosen.tolist())


@dataclass(frozen=True)
class SeparatorChoice:
    radius: int
    members: VertexSet
    candidates: int
    choices: int


def integer_range(lo: float, hi: float) -> tuple[int, int]:
    """Inclusive range of integers strictly inside (lo, hi)."""
    a = math.floor(lo) + 1
    b = math.ceil(hi) - 1
    return a, b


def choose_radius(hops, interval, excluded: VertexSet | None = None, n_slots: int | None = None) -> SeparatorChoice:
    """Radius in the open ``interval`` whose layer of non-excluded vertices is smallest.

    ``hops`` is a list of ``(vertex, hop)``.  Ties go to the smaller radius.
    """
    rlo, rhi = integer_range(*interval)
    if rlo > rhi:
        raise ValueError(f"no integer strictly inside {interval}")
    hops = [(int(v), int(h)) for v, h in hops]
    if n_slots is None:
        n_slots = max([v for v, _ in hops] + [len(excluded.mask) - 1 if excluded else -1]) + 1
    skip = excluded.mask if excluded is not None else np.zeros(n_slots, dtype=bool)
    counts = {r: 0 for r in range(rlo, rhi + 1)}
    for v, h in hops:
        if rlo <= h <= rhi and not (v < len(skip) and skip[v]):
            counts[h] += 1
    radius = min(counts, key=lambda r: (counts[r], r))
    members = [v for v, h in hops if h == radius and not (v < len(skip) and skip[v])]
    return SeparatorChoice(radius, VertexSet(n_slots, members), sum(counts.values()), rhi - rlo + 1)
