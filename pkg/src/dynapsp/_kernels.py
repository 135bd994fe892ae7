"""Numba kernels for the hot loops.

Conventions shared by every kernel:

* a path key is ``(weight, hop)`` compared lexicographically;
* an absent path is ``(inf, BIG)``;
* vertices are compact indices and ``active`` masks hidden ones;
* adjacency is CSR with neighbours sorted ascending, so the first matching
  neighbour is also the smallest id.
"""
from __future__ import annotations

import numpy as np
from numba import njit

BIG = np.int64(1) << np.int64(40)


@njit(cache=True, inline="always")
def _less(w1, h1, w2, h2):
    return w1 < w2 or (w1 == w2 and h1 < h2)


# ---------------------------------------------------------------- Bellman-Ford


@njit(cache=True)
def lex_bf(out_ptr, out_nbr, out_w, active, src, budget, sc_w, sc_h):
    """Layered Jacobi Bellman-Ford on lexicographic keys.

    Layer ``k`` holds the best key over walks with at most ``k`` edges, where an
    edge is either a graph edge (hop 1) or a shortcut ``src -> x`` carrying key
    ``(sc_w[x], sc_h[x])``.  Stops early once a layer is unchanged; the last
    returned layer is the final answer.
    """
    n = active.shape[0]
    LW = np.full((budget + 1, n), np.inf)
    LH = np.full((budget + 1, n), BIG, dtype=np.int64)
    if not active[src]:
        return LW[:1], LH[:1]
    LW[0, src] = 0.0
    LH[0, src] = 0
    changed = np.zeros(n, dtype=np.bool_)
    changed[src] = True
    last = 0
    for k in range(1, budget + 1):
        LW[k] = LW[k - 1]
        LH[k] = LH[k - 1]
        nxt = np.zeros(n, dtype=np.bool_)
        moved = False
        if k == 1:
            for x in range(n):
                if active[x] and x != src and sc_w[x] < np.inf:
                    if _less(sc_w[x], sc_h[x], LW[1, x], LH[1, x]):
                        LW[1, x] = sc_w[x]
                        LH[1, x] = sc_h[x]
                        nxt[x] = True
                        moved = True
        for u in range(n):
            if not changed[u]:
                continue
            wu = LW[k - 1, u]
            hu = LH[k - 1, u]
            for e in range(out_ptr[u], out_ptr[u + 1]):
                v = out_nbr[e]
                if not active[v]:
                    continue
                cw = wu + out_w[e]
                ch = hu + 1
                if _less(cw, ch, LW[k, v], LH[k, v]):
                    LW[k, v] = cw
                    LH[k, v] = ch
                    nxt[v] = True
                    moved = True
        last = k
        changed = nxt
        if not moved:
            break
    return LW[: last + 1], LH[: last + 1]


@njit(cache=True)
def lex_paths(in_ptr, in_nbr, in_w, active, src, LW, LH, sc_w, sc_h):
    """Reconstruct, for every reachable target, the walk realising its final key.

    Walks back from the first layer at which a vertex attains its key, taking
    the smallest-id predecessor that reproduces it (graph edges before the
    shortcut).  Returns ``(P, plen, via_sc)``: ``P[t, :plen[t] + 1]`` is the
    sequence of layer vertices, ``via_sc[t]`` tells whether the first step is a
    shortcut.
    """
    K = LW.shape[0] - 1
    n = active.shape[0]
    P = np.full((n, K + 1), -1, dtype=np.int64)
    plen = np.full(n, -1, dtype=np.int64)
    via_sc = np.zeros(n, dtype=np.bool_)
    buf = np.empty(K + 1, dtype=np.int64)
    for t in range(n):
        if not LW[K, t] < np.inf:
            continue
        m = 0
        cur = t
        k = K
        first_sc = False
        while cur != src:
            w = LW[k, cur]
            h = LH[k, cur]
            while k > 0 and LW[k - 1, cur] == w and LH[k - 1, cur] == h:
                k -= 1
            buf[m] = cur
            m += 1
            found = -1
            for e in range(in_ptr[cur], in_ptr[cur + 1]):
                u = in_nbr[e]
                if active[u] and LW[k - 1, u] + in_w[e] == w and LH[k - 1, u] + 1 == h:
                    found = u
                    break
            if found < 0:
                # only a shortcut from src can explain the key
                found = src
                first_sc = True
            cur = found
            k -= 1
        buf[m] = src
        m += 1
        for q in range(m):
            P[t, q] = buf[m - 1 - q]
        plen[t] = m - 1
        via_sc[t] = first_sc
    return P, plen, via_sc


@njit(cache=True)
def bfs_paths(out_ptr, out_nbr, in_ptr, in_nbr, active, src, budget):
    """Truncated BFS with the same output and tie rule as ``lex_paths``."""
    n = active.shape[0]
    dist = np.full(n, -1, dtype=np.int64)
    if not active[src]:
        return dist, np.full((n, 1), -1, dtype=np.int64), np.full(n, -1, dtype=np.int64)
    dist[src] = 0
    frontier = np.empty(n, dtype=np.int64)
    frontier[0] = src
    fsize = 1
    depth = 0
    nxt = np.empty(n, dtype=np.int64)
    while fsize > 0 and depth < budget:
        nsize = 0
        for q in range(fsize):
            u = frontier[q]
            for e in range(out_ptr[u], out_ptr[u + 1]):
                v = out_nbr[e]
                if active[v] and dist[v] < 0:
                    dist[v] = depth + 1
                    nxt[nsize] = v
                    nsize += 1
        depth += 1
        frontier, nxt = nxt, frontier
        fsize = nsize
    K = 0
    for v in range(n):
        if dist[v] > K:
            K = dist[v]
    P = np.full((n, K + 1), -1, dtype=np.int64)
    for t in range(n):
        d = dist[t]
        if d < 0:
            continue
        cur = t
        P[t, d] = t
        for k in range(d, 0, -1):
            for e in range(in_ptr[cur], in_ptr[cur + 1]):
                u = in_nbr[e]
                if active[u] and dist[u] == k - 1:
                    cur = u
                    break
            P[t, k - 1] = cur
    return dist, P, dist.copy()


# ---------------------------------------------------------------- hitting sets


@njit(cache=True)
def greedy_hit(set_ptr, set_el, universe):
    """Greedy hitting set: repeatedly take the element in most unhit sets.

    Ties go to the smallest element.  Sets are CSR rows of ``set_el``;
    duplicates inside a row are tolerated.
    """
    k = set_ptr.shape[0] - 1
    count = np.zeros(universe, dtype=np.int64)
    # element -> sets incidence
    stamp = np.full(universe, -1, dtype=np.int64)
    deg = np.zeros(universe + 1, dtype=np.int64)
    for i in range(k):
        for q in range(set_ptr[i], set_ptr[i + 1]):
            x = set_el[q]
            if stamp[x] != i:
                stamp[x] = i
                deg[x + 1] += 1
    for x in range(universe):
        deg[x + 1] += deg[x]
    inc = np.empty(deg[universe], dtype=np.int64)
    fill = deg[:universe].copy()
    stamp[:] = -1
    for i in range(k):
        for q in range(set_ptr[i], set_ptr[i + 1]):
            x = set_el[q]
            if stamp[x] != i:
                stamp[x] = i
                inc[fill[x]] = i
                fill[x] += 1
                count[x] += 1
    hit = np.zeros(k, dtype=np.bool_)
    chosen = np.empty(universe, dtype=np.int64)
    nch = 0
    remaining = k
    while remaining > 0:
        best = -1
        bc = 0
        for x in range(universe):
            if count[x] > bc:
                bc = count[x]
                best = x
        if best < 0:
            break
        chosen[nch] = best
        nch += 1
        for q in range(deg[best], deg[best + 1]):
            i = inc[q]
            if hit[i]:
                continue
            hit[i] = True
            remaining -= 1
            for r in range(set_ptr[i], set_ptr[i + 1]):
                y = set_el[r]
                if stamp[y] != -2 - i:
                    stamp[y] = -2 - i
                    count[y] -= 1
    out = chosen[:nch].copy()
    out.sort()
    return out


@njit(cache=True)
def radius_choice(hops, excluded, rlo, rhi):
    """Smallest-layer radius in ``[rlo, rhi]`` over non-excluded vertices.

    Returns ``(radius, layer_size, candidates)`` where ``candidates`` counts the
    non-excluded vertices whose hop lies anywhere in ``[rlo, rhi]``.
    """
    width = rhi - rlo + 1
    cnt = np.zeros(width, dtype=np.int64)
    for x in range(hops.shape[0]):
        if excluded[x]:
            continue
        hx = hops[x]
        if rlo <= hx <= rhi:
            cnt[hx - rlo] += 1
    best = 0
    for r in range(1, width):
        if cnt[r] < cnt[best]:
            best = r
    return rlo + best, cnt[best], cnt.sum()


# ---------------------------------------------------------------- space-efficient store


@njit(cache=True)
def _window_hits(P, plen, long_mask, lo, hi, n):
    k = 0
    for t in range(n):
        if long_mask[t]:
            k += 1
    ptr = np.zeros(k + 1, dtype=np.int64)
    el = np.empty(k * (hi - lo + 1), dtype=np.int64)
    q = 0
    i = 0
    for t in range(n):
        if long_mask[t]:
            for pos in range(lo, hi + 1):
                el[q] = P[t, pos]
                q += 1
            i += 1
            ptr[i] = q
    return greedy_hit(ptr, el, n)


@njit(cache=True)
def bfse_source(out_ptr, out_nbr, out_w, in_ptr, in_nbr, in_w, active, src,
                budgets, win_lo, win_hi, small):
    """Space-efficient bounded search from ``src`` for ladder level ``len(budgets)-1``.

    Stage ``j`` runs a ``budgets[j]``-edge search on the graph plus shortcuts
    from ``src``; it then picks separator vertices (a hitting set over the
    ``[win_lo[j], win_hi[j]]`` positions of every target whose walk is longer
    than ``budgets[j-1]`` edges, or every reachable vertex when ``small[j]``),
    stores the walk to each as a node (leading link to an earlier node plus an
    explicit tail) and installs shortcut keys.  Stage 0 yields the final walk
    for every target.

    Returns node arrays ``(link, tail_ptr, tail, w, h, stage)``, the final node
    per target (``-1`` unreachable, ``-2`` for ``src`` itself), separator sizes
    per stage and whether the top stage had targets beyond ``budgets[-2]``.
    """
    n = active.shape[0]
    top = budgets.shape[0] - 1
    cap = 8 * n + 8
    link = np.empty(cap, dtype=np.int64)
    tail_ptr = np.zeros(cap + 1, dtype=np.int64)
    tcap = 8 * n * (budgets[top] + 1) + 8
    tail = np.empty(tcap, dtype=np.int64)
    nw = np.empty(cap, dtype=np.float64)
    nh = np.empty(cap, dtype=np.int64)
    nstage = np.empty(cap, dtype=np.int64)
    nn = 0
    sc_w = np.full(n, np.inf)
    sc_h = np.full(n, BIG, dtype=np.int64)
    sc_node = np.full(n, -1, dtype=np.int64)
    new_node = np.full(n, -1, dtype=np.int64)
    final = np.full(n, -1, dtype=np.int64)
    sep_size = np.zeros(top + 1, dtype=np.int64)
    top_long = False
    if not active[src]:
        return (link[:0], tail_ptr[:1], tail[:0], nw[:0], nh[:0], nstage[:0],
                final, sep_size, top_long)
    final[src] = -2
    for j in range(top, -1, -1):
        LW, LH = lex_bf(out_ptr, out_nbr, out_w, active, src, budgets[j], sc_w, sc_h)
        P, plen, via = lex_paths(in_ptr, in_nbr, in_w, active, src, LW, LH, sc_w, sc_h)
        K = LW.shape[0] - 1
        if j == 0:
            sel = np.zeros(n, dtype=np.bool_)
            for t in range(n):
                if plen[t] > 0:
                    sel[t] = True
        elif small[j]:
            sel = np.zeros(n, dtype=np.bool_)
            for t in range(n):
                if plen[t] > 0:
                    sel[t] = True
            if j == top:
                for t in range(n):
                    if plen[t] > budgets[j - 1]:
                        top_long = True
        else:
            long_mask = np.zeros(n, dtype=np.bool_)
            any_long = False
            for t in range(n):
                if plen[t] > budgets[j - 1]:
                    long_mask[t] = True
                    any_long = True
            if j == top:
                top_long = any_long
            sel = np.zeros(n, dtype=np.bool_)
            if any_long:
                if win_lo[j] > win_hi[j]:
                    for t in range(n):
                        if plen[t] > 0:
                            sel[t] = True
                else:
                    hits = _window_hits(P, plen, long_mask, win_lo[j], win_hi[j], n)
                    for x in hits:
                        sel[x] = True
        cnt = 0
        for x in range(n):
            if not sel[x]:
                continue
            cnt += 1
            L = plen[x]
            if via[x] and L == 1:
                node = sc_node[x]
            else:
                if nn + 1 >= cap or tail_ptr[nn] + K + 1 >= tcap:
                    cap2 = 2 * cap
                    link = _grow_i(link, cap2)
                    nw = _grow_f(nw, cap2)
                    nh = _grow_i(nh, cap2)
                    nstage = _grow_i(nstage, cap2)
                    tail_ptr = _grow_i(tail_ptr, cap2 + 1)
                    cap = cap2
                    if tail_ptr[nn] + K + 1 >= tcap:
                        tcap = 2 * tcap + K + 1
                        tail = _grow_i(tail, tcap)
                node = nn
                nn += 1
                q = tail_ptr[node]
                if via[x]:
                    link[node] = sc_node[P[x, 1]]
                    start = 2
                else:
                    link[node] = -1
                    start = 1
                for pos in range(start, L + 1):
                    tail[q] = P[x, pos]
                    q += 1
                tail_ptr[node + 1] = q
                nw[node] = LW[K, x]
                nh[node] = LH[K, x]
                nstage[node] = j
            if j == 0:
                final[x] = node
            else:
                new_node[x] = node
        if j > 0:
            # install after the stage so every node links into the previous stage
            for x in range(n):
                if sel[x]:
                    sc_w[x] = LW[K, x]
                    sc_h[x] = LH[K, x]
                    sc_node[x] = new_node[x]
        sep_size[j] = cnt
    return (link[:nn].copy(), tail_ptr[: nn + 1].copy(), tail[: tail_ptr[nn]].copy(),
            nw[:nn].copy(), nh[:nn].copy(), nstage[:nn].copy(), final, sep_size, top_long)


@njit(cache=True)
def _grow_i(a, size):
    b = np.empty(size, dtype=a.dtype)
    b[: a.shape[0]] = a
    return b


@njit(cache=True)
def _grow_f(a, size):
    b = np.empty(size, dtype=a.dtype)
    b[: a.shape[0]] = a
    return b


@njit(cache=True)
def node_walk(node, node_src, link, tail_ptr, tail, out):
    """Write the vertex sequence of ``node`` into ``out``; return (length, links followed)."""
    depth = 0
    cur = node
    while link[cur] >= 0:
        cur = link[cur]
        depth += 1
    chain = np.empty(depth + 1, dtype=np.int64)
    cur = node
    for d in range(depth, -1, -1):
        chain[d] = cur
        cur = link[cur]
    out[0] = node_src[node]
    m = 1
    for d in range(depth + 1):
        c = chain[d]
        for q in range(tail_ptr[c], tail_ptr[c + 1]):
            out[m] = tail[q]
            m += 1
    return m, depth


@njit(cache=True)
def node_prefixes(refs, srcs, node_src, link, tail_ptr, tail, node_h, width, reverse):
    """First ``width`` vertices of each referenced walk (``-1`` padded).

    ``refs[k] == -2`` means the trivial walk ``[srcs[k]]``.  With ``reverse``
    the stored walk is read back to front (walks built on the reversed graph).
    """
    k = refs.shape[0]
    out = np.full((k, width), -1, dtype=np.int64)
    maxh = 1
    for q in range(k):
        r = refs[q]
        if r >= 0 and node_h[r] + 1 > maxh:
            maxh = node_h[r] + 1
    buf = np.empty(maxh + 1, dtype=np.int64)
    for q in range(k):
        r = refs[q]
        if r == -2:
            out[q, 0] = srcs[q]
            continue
        if r < 0:
            continue
        m, _ = node_walk(r, node_src, link, tail_ptr, tail, buf)
        lim = min(m, width)
        if reverse:
            for p in range(lim):
                out[q, p] = buf[m - 1 - p]
        else:
            for p in range(lim):
                out[q, p] = buf[p]
    return out


@njit(cache=True)
def node_vertex_lists(refs, srcs, node_src, link, tail_ptr, tail, node_h):
    """Full vertex sequence of each referenced walk as CSR."""
    k = refs.shape[0]
    ptr = np.zeros(k + 1, dtype=np.int64)
    for q in range(k):
        r = refs[q]
        if r >= 0:
            ptr[q + 1] = ptr[q] + node_h[r] + 1
        elif r == -2:
            ptr[q + 1] = ptr[q] + 1
        else:
            ptr[q + 1] = ptr[q]
    out = np.empty(ptr[k], dtype=np.int64)
    maxh = 1
    for q in range(k):
        r = refs[q]
        if r >= 0 and node_h[r] + 1 > maxh:
            maxh = node_h[r] + 1
    buf = np.empty(maxh + 1, dtype=np.int64)
    for q in range(k):
        r = refs[q]
        if r == -2:
            out[ptr[q]] = srcs[q]
        elif r >= 0:
            m, _ = node_walk(r, node_src, link, tail_ptr, tail, buf)
            for p in range(m):
                out[ptr[q] + p] = buf[p]
    return ptr, out


@njit(cache=True)
def touched_nodes(dmask, node_src, link, tail_ptr, tail):
    """Nodes whose walk meets ``dmask`` (nodes are ordered so links point backwards)."""
    nn = link.shape[0]
    hit = np.zeros(nn, dtype=np.bool_)
    for v in range(nn):
        l = link[v]
        if l >= 0:
            if hit[l]:
                hit[v] = True
                continue
        elif dmask[node_src[v]]:
            hit[v] = True
            continue
        for q in range(tail_ptr[v], tail_ptr[v + 1]):
            if dmask[tail[q]]:
                hit[v] = True
                break
    return hit


# ---------------------------------------------------------------- deletion phases


@njit(cache=True)
def repair_level(Wp, Hp, W, H, piv, touched, excluded, dmask, rlo, rhi, sep_all,
                 sep_size, sep_cand, sep_rad, evals):
    """One deletion phase, in place on the level arrays ``W, H, piv``.

    ``piv[s, t]`` becomes ``x`` when the pair is rebuilt as
    ``(s -> x) + (x -> t)`` from the previous level (``x == t`` reuses the
    previous level's pair), ``-2`` when no candidate exists.
    """
    n = W.shape[0]
    sep = np.empty(n, dtype=np.int64)
    for s in range(n):
        if dmask[s]:
            for t in range(n):
                W[s, t] = np.inf
                H[s, t] = BIG
                piv[s, t] = -2
            continue
        ns = 0
        if sep_all:
            for x in range(n):
                if not dmask[x]:
                    sep[ns] = x
                    ns += 1
        else:
            r, size, cand = radius_choice(Hp[s], excluded, rlo, rhi)
            sep_rad[s] = r
            sep_cand[s] = cand
            for x in range(n):
                if not excluded[x] and Hp[s, x] == r:
                    sep[ns] = x
                    ns += 1
        sep_size[s] = ns
        for t in range(n):
            if dmask[t]:
                W[s, t] = np.inf
                H[s, t] = BIG
                piv[s, t] = -2
                continue
            if not touched[s, t]:
                continue
            bw = Wp[s, t]
            bh = Hp[s, t]
            bx = t
            e = 1
            for q in range(ns):
                x = sep[q]
                if x == t:
                    continue
                e += 1
                cw = Wp[s, x] + Wp[x, t]
                if cw == np.inf:
                    continue
                ch = Hp[s, x] + Hp[x, t]
                if _less(cw, ch, bw, bh) or (cw == bw and ch == bh and x < bx):
                    bw = cw
                    bh = ch
                    bx = x
            evals[s] += e
            if bw < np.inf:
                W[s, t] = bw
                H[s, t] = bh
                piv[s, t] = bx
            else:
                W[s, t] = np.inf
                H[s, t] = BIG
                piv[s, t] = -2


@njit(cache=True)
def concat_prefix(A, hA, B, out):
    L1 = out.shape[0]
    for p in range(L1):
        out[p] = -1
    a = min(hA, L1 - 1)
    for p in range(a + 1):
        out[p] = A[p]
    if hA < L1 - 1:
        for p in range(1, L1 - hA):
            out[hA + p] = B[p]


@njit(cache=True)
def repaired_prefixes(PFp, Hp, PF, piv):
    n = piv.shape[0]
    for s in range(n):
        for t in range(n):
            x = piv[s, t]
            if x == -1:
                continue
            if x == -2:
                PF[s, t, :] = -1
            elif x == t:
                PF[s, t, :] = PFp[s, t, :]
            else:
                concat_prefix(PFp[s, x], Hp[s, x], PFp[x, t], PF[s, t])


@njit(cache=True)
def johnson_insert(W, H, PF, Wg, present, c, track):
    """Insert ``c`` into the vertex set ``present`` (Johnson step, lexicographic).

    ``Wg`` is the dense edge-weight matrix of the target graph.  Existing
    entries are kept unless strictly improved.  ``PF`` prefixes are maintained
    when ``track`` is set.
    """
    n = W.shape[0]
    L1 = PF.shape[2]
    tmp = np.empty(L1, dtype=PF.dtype)
    W[c, c] = 0.0
    H[c, c] = 0
    if track:
        PF[c, c, :] = -1
        PF[c, c, 0] = c
    # into c
    for s in range(n):
        if not present[s] or s == c:
            continue
        bw = W[s, c]
        bh = H[s, c]
        bu = -1
        for u in range(n):
            if not present[u] or u == c or Wg[u, c] == np.inf or W[s, u] == np.inf:
                continue
            cw = W[s, u] + Wg[u, c]
            ch = H[s, u] + 1
            if _less(cw, ch, bw, bh):
                bw = cw
                bh = ch
                bu = u
        if bu >= 0:
            W[s, c] = bw
            H[s, c] = bh
            if track:
                hu = H[s, bu]
                for p in range(L1):
                    tmp[p] = PF[s, bu, p]
                if hu + 1 < L1:
                    tmp[hu + 1] = c
                PF[s, c, :] = tmp
    # out of c
    for t in range(n):
        if not present[t] or t == c:
            continue
        bw = W[c, t]
        bh = H[c, t]
        bu = -1
        for u in range(n):
            if not present[u] or u == c or Wg[c, u] == np.inf or W[u, t] == np.inf:
                continue
            cw = Wg[c, u] + W[u, t]
            ch = H[u, t] + 1
            if _less(cw, ch, bw, bh):
                bw = cw
                bh = ch
                bu = u
        if bu >= 0:
            W[c, t] = bw
            H[c, t] = bh
            if track:
                tmp[0] = c
                for p in range(1, L1):
                    tmp[p] = PF[bu, t, p - 1]
                PF[c, t, :] = tmp
    # through c
    for s in range(n):
        if not present[s] or s == c or W[s, c] == np.inf:
            continue
        ws = W[s, c]
        hs = H[s, c]
        for t in range(n):
            if not present[t] or t == c or t == s or W[c, t] == np.inf:
                continue
            cw = ws + W[c, t]
            ch = hs + H[c, t]
            if _less(cw, ch, W[s, t], H[s, t]):
                W[s, t] = cw
                H[s, t] = ch
                if track:
                    concat_prefix(PF[s, c], hs, PF[c, t], tmp)
                    PF[s, t, :] = tmp
    present[c] = True


@njit(cache=True)
def johnson_insert_plain(Dm, Wg, present, c):
    """Johnson step on a plain distance matrix."""
    n = Dm.shape[0]
    Dm[c, c] = 0.0
    for s in range(n):
        if not present[s] or s == c:
            continue
        b = Dm[s, c]
        for u in range(n):
            if present[u] and u != c:
                v = Dm[s, u] + Wg[u, c]
                if v < b:
                    b = v
        Dm[s, c] = b
    for t in range(n):
        if not present[t] or t == c:
            continue
        b = Dm[c, t]
        for u in range(n):
            if present[u] and u != c:
                v = Wg[c, u] + Dm[u, t]
                if v < b:
                    b = v
        Dm[c, t] = b
    for s in range(n):
        if not present[s] or s == c:
            continue
        ws = Dm[s, c]
        if ws == np.inf:
            continue
        for t in range(n):
            if present[t]:
                v = ws + Dm[c, t]
                if v < Dm[s, t]:
                    Dm[s, t] = v
    present[c] = True


@njit(cache=True)
def pivot_pass(Dm, pivots):
    """In-place relaxation through every pivot; returns whether anything changed."""
    n = Dm.shape[0]
    changed = False
    for q in range(pivots.shape[0]):
        x = pivots[q]
        for s in range(n):
            dsx = Dm[s, x]
            if dsx == np.inf:
                continue
            for t in range(n):
                v = dsx + Dm[x, t]
                if v < Dm[s, t]:
                    Dm[s, t] = v
                    changed = True
    return changed


@njit(cache=True)
def window_sets(PF, H, L, n):
    """CSR of the prefix windows of every pair whose walk has at least ``L`` edges."""
    k = 0
    for s in range(n):
        for t in range(n):
            if H[s, t] >= L and H[s, t] < BIG:
                k += 1
    ptr = np.zeros(k + 1, dtype=np.int64)
    el = np.empty(k * (L + 1), dtype=np.int64)
    i = 0
    q = 0
    for s in range(n):
        for t in range(n):
            if H[s, t] >= L and H[s, t] < BIG:
                for p in range(L + 1):
                    el[q] = PF[s, t, p]
                    q += 1
                i += 1
                ptr[i] = q
    return ptr, el


# ---------------------------------------------------------------- centers


@njit(cache=True)
def glue_centers(W, H, CI, centers, rw, rh, fw, fh):
    """Lexicographic min over centers of (s -> c) + (c -> t), in place.

    ``rw[k], rh[k]`` are keys into center ``centers[k]``; ``fw, fh`` out of it.
    ``CI`` records the winning center index.
    """
    n = W.shape[0]
    for k in range(centers.shape[0]):
        for s in range(n):
            a = rw[k, s]
            if a == np.inf:
                continue
            ah = rh[k, s]
            for t in range(n):
                b = fw[k, t]
                if b == np.inf:
                    continue
                cw = a + b
                ch = ah + fh[k, t]
                if _less(cw, ch, W[s, t], H[s, t]):
                    W[s, t] = cw
                    H[s, t] = ch
                    CI[s, t] = k


@njit(cache=True)
def rand_improve(W, H, inst, inst_id, rw, rh, fw, fh, rev_ptr, rev_vs, fwd_ptr, fwd_vs,
                 cong, charge, tau, congested, start, stamp, counter):
    """Scan pairs from ``start`` in row-major order, improving through one center.

    A pair improves when the glued key is lexicographically smaller.  Every
    distinct vertex of the glued walk gains ``charge``.  Returns the index of
    the next pair to scan after the first pair whose charging pushes some
    vertex above ``tau / 2`` (the caller then recomputes the center's searches
    on the shrunk graph), or ``-1`` when the scan completed.  ``counter[0]``
    tracks the stamp generation, ``counter[1]`` accumulates total charge.
    """
    n = W.shape[0]
    total = n * n
    for p in range(start, total):
        s = p // n
        t = p - s * n
        if s == t:
            continue
        a = rw[s]
        b = fw[t]
        if a == np.inf or b == np.inf:
            continue
        cw = a + b
        ch = rh[s] + fh[t]
        if not _less(cw, ch, W[s, t], H[s, t]):
            continue
        W[s, t] = cw
        H[s, t] = ch
        inst[s, t] = inst_id
        counter[0] += 1
        g = counter[0]
        crossed = False
        for q in range(rev_ptr[s], rev_ptr[s + 1]):
            u = rev_vs[q]
            if stamp[u] != g:
                stamp[u] = g
                cong[u] += charge
                counter[1] += charge
                if 2 * cong[u] > tau and not congested[u]:
                    congested[u] = True
                    crossed = True
        for q in range(fwd_ptr[t], fwd_ptr[t + 1]):
            u = fwd_vs[q]
            if stamp[u] != g:
                stamp[u] = g
                cong[u] += charge
                counter[1] += charge
                if 2 * cong[u] > tau and not congested[u]:
                    congested[u] = True
                    crossed = True
        if crossed:
            return p + 1
    return -1


@njit(cache=True)
def glue_prefixes(CI, RP, RH, FP, out):
    """Prefix of (s -> c) + (c -> t) for the center index ``CI[s, t]``."""
    n = CI.shape[0]
    for s in range(n):
        for t in range(n):
            k = CI[s, t]
            if k >= 0:
                concat_prefix(RP[k, s], RH[k, s], FP[k, t], out[s, t])
