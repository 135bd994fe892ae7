"""Brute-force ground truth for tests.

Deliberately self-contained: it reads graphs only through ``edges()`` /
``n_slots`` / ``alive`` (or takes a dense weight matrix directly) and shares no
code with the engine.
"""
from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra


def to_matrix(g) -> tuple[np.ndarray, np.ndarray]:
    """Dense slot-indexed weights (``inf`` = no edge) and the alive mask."""
    if isinstance(g, np.ndarray):
        return g.astype(float), np.ones(len(g), dtype=bool)
    n = g.n_slots
    W = np.full((n, n), np.inf)
    for u, v, w in g.edges():
        W[u, v] = min(W[u, v], w)
    alive = np.array(g.alive, dtype=bool) if hasattr(g, "alive") else np.ones(n, bool)
    return W, alive


def _mask_dead(D: np.ndarray, alive: np.ndarray) -> np.ndarray:
    D[~alive, :] = np.inf
    D[:, ~alive] = np.inf
    return D


def apsp(g) -> np.ndarray:
    """Exact distances via per-source Dijkstra; dead slots get ``inf`` rows."""
    W, alive = to_matrix(g)
    n = len(W)
    if n == 0:
        return np.zeros((0, 0))
    r, c = np.nonzero(np.isfinite(W))
    # explicit zeros survive construction and count as zero-weight edges
    mat = csr_matrix((W[r, c], (r, c)), shape=(n, n))
    D = dijkstra(mat, directed=True)
    return _mask_dead(D, alive)


def floyd_warshall(g) -> np.ndarray:
    """Independent n^3 relaxation used to cross-check :func:`apsp`."""
    W, alive = to_matrix(g)
    n = len(W)
    D = W.copy()
    np.fill_diagonal(D, 0.0)
    for k in range(n):
        D = np.minimum(D, D[:, k : k + 1] + D[k : k + 1, :])
    return _mask_dead(D, alive)


def hop_restricted(g, B: int, with_paths: bool = False):
    """Minimum weight over paths with at most ``B`` edges, for every pair.

    Returns ``(dist, hop)`` where ``hop`` is the fewest edges among the
    minimum-weight paths (``-1`` when unreachable).  With ``with_paths`` also
    returns a dict ``(s, t) -> vertex list`` realising ``(dist, hop)``.
    """
    W, alive = to_matrix(g)
    n = len(W)
    W = W.copy()
    W[~alive, :] = np.inf
    W[:, ~alive] = np.inf
    layers = [np.full((n, n), np.inf)]
    idx = np.flatnonzero(alive)
    layers[0][idx, idx] = 0.0
    for _ in range(int(B)):
        prev = layers[-1]
        via = np.min(prev[:, :, None] + W[None, :, :], axis=1)
        layers.append(np.minimum(prev, via))
    dist = layers[-1]
    hop = np.full((n, n), -1, dtype=np.int64)
    for k in range(len(layers) - 1, -1, -1):
        hit = np.isfinite(dist) & (layers[k] == dist)
        hop[hit] = k
    if not with_paths:
        return dist, hop
    paths = {}
    for s in range(n):
        for t in range(n):
            if hop[s, t] < 0:
                continue
            seq = [t]
            cur, k = t, hop[s, t]
            while k > 0:
                target = layers[k][s, cur]
                for u in range(n):
                    if layers[k - 1][s, u] + W[u, cur] == target:
                        k_u = k - 1
                        while k_u > 0 and layers[k_u - 1][s, u] == layers[k - 1][s, u]:
                            k_u -= 1
                        cur, k = u, k_u
                        seq.append(u)
                        break
                else:  # pragma: no cover
                    raise AssertionError("broken layer table")
            paths[s, t] = seq[::-1]
    return dist, hop, paths


def through_restricted(g, centers, B: int) -> np.ndarray:
    """min over c in centers of dist^B(s, c) + dist^B(c, t)."""
    dist, _ = hop_restricted(g, B)
    n = len(dist)
    out = np.full((n, n), np.inf)
    for c in centers:
        out = np.minimum(out, dist[:, c : c + 1] + dist[c : c + 1, :])
    return out


def simple_paths(g, s: int, t: int, max_weight: float = np.inf):
    """All simple s->t paths with weight <= max_weight, as (weight, vertices)."""
    W, alive = to_matrix(g)
    n = len(W)
    if not (alive[s] and alive[t]):
        return []
    nbrs = [np.flatnonzero(np.isfinite(W[u]) & alive).tolist() for u in range(n)]
    out = []
    on = [False] * n

    def dfs(u, acc, seq):
        if acc > max_weight:
            return
        if u == t:
            out.append((acc, list(seq)))
            return
        for v in nbrs[u]:
            if not on[v]:
                on[v] = True
                seq.append(v)
                dfs(v, acc + W[u, v], seq)
                seq.pop()
                on[v] = False

    on[s] = True
    dfs(s, 0.0, [s])
    return out


def shortest_paths(g, s: int, t: int, dist: float | None = None):
    """Every simple minimum-weight s->t path (exhaustive; small graphs only)."""
    if dist is None:
        dist = apsp(g)[s, t]
    if not np.isfinite(dist):
        return []
    return [seq for w, seq in simple_paths(g, s, t, dist) if w == dist]


def through_exhaustive(g, centers, B: int) -> np.ndarray:
    """Enumeration-based counterpart of :func:`through_restricted` (n <= 8)."""
    W, alive = to_matrix(g)
    n = len(W)
    best = np.full((n, n), np.inf)
    for c in centers:
        to_c = np.full(n, np.inf)
        from_c = np.full(n, np.inf)
        for s in range(n):
            for w, seq in simple_paths(g, s, c):
                if len(seq) - 1 <= B:
                    to_c[s] = min(to_c[s], w)
            for w, seq in simple_paths(g, c, s):
                if len(seq) - 1 <= B:
                    from_c[s] = min(from_c[s], w)
        best = np.minimum(best, to_c[:, None] + from_c[None, :])
    return best
