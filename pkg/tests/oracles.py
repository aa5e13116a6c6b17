"""Brute-force reference implementations used only by the tests.

None of these share code with the library beyond the plain graph container;
they enumerate the search space directly.
"""

from __future__ import annotations

import heapq
import itertools
from collections import Counter


def floyd_warshall(g):
    vs = list(g.vertices)
    inf = float("inf")
    d = {u: {v: (0 if u == v else inf) for v in vs} for u in vs}
    for (u, v), w in g.weights.items():
        d[u][v] = min(d[u][v], w)
        d[v][u] = min(d[v][u], w)
    for k in vs:
        for i in vs:
            for j in vs:
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def all_perfect_matchings(nodes):
    nodes = list(nodes)
    if not nodes:
        yield []
        return
    a = nodes[0]
    for i in range(1, len(nodes)):
        rest = nodes[1:i] + nodes[i + 1:]
        for m in all_perfect_matchings(rest):
            yield [(a, nodes[i])] + m


def brute_matching_weight(nodes, w):
    return min(sum(w(a, b) for a, b in m) for m in all_perfect_matchings(nodes))


def _odd(counts):
    deg = Counter()
    for (u, v), k in counts.items():
        deg[u] += k
        deg[v] += k
    return {v for v, d in deg.items() if d % 2}


def _connected(counts, extra=()):
    """Is the multigraph (plus isolated ``extra`` vertices) connected?"""
    verts = {v for e, k in counts.items() if k for v in e} | set(extra)
    if not verts:
        return True
    adj = {v: set() for v in verts}
    for (u, v), k in counts.items():
        if k:
            adj[u].add(v)
            adj[v].add(u)
    start = next(iter(verts))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x] - seen:
            seen.add(y)
            stack.append(y)
    return seen == verts


def brute_t_join_weight(g, t_set):
    """Minimum weight edge subset whose odd-degree vertices are exactly ``t_set``."""
    edges = list(g.edges)
    best = None
    for mask in range(1 << len(edges)):
        chosen = Counter({e: 1 for i, e in enumerate(edges) if mask >> i & 1})
        if _odd(chosen) == set(t_set):
            w = sum(g.weights[e] for e in chosen)
            if best is None or w < best:
                best = w
    return best


def brute_multiset_tour(g, required, s, t, cap=2):
    """Cheapest edge multiset (multiplicity <= cap) admitting an Euler walk from
    ``s`` to ``t`` that covers ``required``. ``None`` if none exists."""
    edges = list(g.edges)
    req = set(required)
    want = set() if s == t else {s, t}
    best = None
    ranges = [range(1, cap + 1) if e in req else range(0, cap + 1) for e in edges]
    for mult in itertools.product(*ranges):
        counts = Counter({e: k for e, k in zip(edges, mult) if k})
        if not counts:
            if s == t:
                best = 0 if best is None else min(best, 0)
            continue
        if _odd(counts) != want:
            continue
        verts = {v for e in counts for v in e}
        if s not in verts or t not in verts or not _connected(counts):
            continue
        w = sum(g.weights[e] * k for e, k in counts.items())
        if best is None or w < best:
            best = w
    return best


def brute_cpp_weight(g):
    return brute_multiset_tour(g, g.edges, g.edges[0][0], g.edges[0][0])


def brute_closed_rpp_weight(g, required):
    """Closed covering walk; the start vertex is free."""
    if not required:
        return 0
    v = min(required)[0]
    return brute_multiset_tour(g, required, v, v)


def brute_hcpp_weight(inst):
    """Exact optimum by Dijkstra over (vertex, traversed-edge set) states.

    An untraversed edge may be crossed only once every predecessor class is
    fully traversed. Works for any partial order; exponential in ``m``.
    """
    g = inst.graph
    edges = list(g.edges)
    idx = {e: i for i, e in enumerate(edges)}
    full = (1 << len(edges)) - 1
    cls_mask = [sum(1 << idx[e] for e in c) for c in inst.classes]
    need = [0] * len(edges)
    for e, i in idx.items():
        b = inst.class_of(e)
        for a in inst.predecessors(b):
            need[i] |= cls_mask[a - 1]
    adj = {v: [] for v in g.vertices}
    for e, i in idx.items():
        w = g.weights[e]
        adj[e[0]].append((e[1], i, w))
        adj[e[1]].append((e[0], i, w))
    starts = {v for e in edges for v in e}
    best = None
    for s in sorted(starts):
        dist = {(s, 0): 0}
        heap = [(0, s, 0)]
        while heap:
            d, v, mask = heapq.heappop(heap)
            if d > dist[(v, mask)]:
                continue
            if best is not None and d >= best:
                break
            if mask == full and v == s:
                best = d
                break
            for u, i, w in adj[v]:
                bit = 1 << i
                if not mask & bit and (mask & need[i]) != need[i]:
                    continue
                nm = mask | bit
                nd = d + w
                if nd < dist.get((u, nm), float("inf")):
                    dist[(u, nm)] = nd
                    heapq.heappush(heap, (nd, u, nm))
    return best


def permutation_strpp_weight(g, required, s, t):
    """Optimal s-t-RPP weight by enumerating every order and orientation of the
    required edges, joined by shortest paths."""
    d = floyd_warshall(g)
    req = list(required)
    if not req:
        return d[s][t]
    best = float("inf")
    for perm in itertools.permutations(req):
        for flips in itertools.product((False, True), repeat=len(req)):
            cur, total = s, 0
            for (a, b), f in zip(perm, flips):
                if f:
                    a, b = b, a
                total += d[cur][a] + g.weights[(min(a, b), max(a, b))]
                cur = b
            total += d[cur][t]
            best = min(best, total)
    return best
