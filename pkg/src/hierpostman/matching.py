"""Exact minimum-weight perfect matching on complete graphs.

The baseline is a subset dynamic program that always matches the lowest
unmatched vertex first. It is exact and handles up to ``MAX_DP_NODES``
vertices. Larger inputs go to the blossom implementation in networkx, which is
exact for integer weights.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Hashable, Sequence

from .errors import PreconditionError

MAX_DP_NODES = 22


def _weight_matrix(nodes: Sequence, weight: Callable[[Hashable, Hashable], int]) -> list[list[int]]:
    n = len(nodes)
    w = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            c = weight(nodes[i], nodes[j])
            if c is None:
                raise PreconditionError(f"weight between {nodes[i]!r} and {nodes[j]!r} is not finite")
            w[i][j] = w[j][i] = c
    return w


def _dp_matching(w: list[list[int]]) -> list[tuple[int, int]]:
    n = len(w)

    @lru_cache(maxsize=None)
    def best(mask: int) -> int:
        if not mask:
            return 0
        low = mask & -mask
        i = low.bit_length() - 1
        rest = mask ^ low
        out = None
        r = rest
        while r:
            jb = r & -r
            r ^= jb
            c = w[i][jb.bit_length() - 1] + best(rest ^ jb)
            if out is None or c < out:
                out = c
        return out

    pairs = []
    mask = (1 << n) - 1
    while mask:
        low = mask & -mask
        i = low.bit_length() - 1
        rest = mask ^ low
        target = best(mask)
        r = rest
        while r:
            jb = r & -r
            r ^= jb
            j = jb.bit_length() - 1
            if w[i][j] + best(rest ^ jb) == target:
                pairs.append((i, j))
                mask = rest ^ jb
                break
    return pairs


def _blossom_matching(w: list[list[int]]) -> list[tuple[int, int]]:
    import networkx as nx

    n = len(w)
    top = max((w[i][j] for i in range(n) for j in range(i + 1, n)), default=0) + 1
    g = nx.Graph()
    for i in range(n):
        for j in range(i + 1, n):
            g.add_edge(i, j, weight=top - w[i][j])
    mate = nx.max_weight_matching(g, maxcardinality=True)
    return sorted(tuple(sorted(p)) for p in mate)


def min_weight_perfect_matching(nodes: Sequence, weight: Callable[[Hashable, Hashable], int]) -> list[tuple]:
    """Perfect matching of minimum total weight on the complete graph over ``nodes``.

    ``weight(u, v)`` gives the (finite, integer) pair cost. Returns pairs in
    the order of ``nodes``; ties resolve towards partners earlier in
    ``nodes``.
    """
    nodes = list(nodes)
    if len(nodes) % 2:
        raise PreconditionError(f"perfect matching needs an even vertex count, got {len(nodes)}")
    if not nodes:
        return []
    w = _weight_matrix(nodes, weight)
    idx = _dp_matching(w) if len(nodes) <= MAX_DP_NODES else _blossom_matching(w)
    return [(nodes[i], nodes[j]) for i, j in idx]


def matching_weight(pairs, weight: Callable[[Hashable, Hashable], int]) -> int:
    return sum(weight(a, b) for a, b in pairs)


def subset_matching_costs(w: list[list[int]]) -> list[int | None]:
    """Minimum perfect-matching cost of every vertex subset, indexed by bitmask.

    Odd subsets map to ``None``. ``O(2^n n)`` time, used where many
    matchings over subsets of one small universe are needed.
    """
    n = len(w)
    table: list[int | None] = [None] * (1 << n)
    table[0] = 0
    for mask in range(1, 1 << n):
        if bin(mask).count("1") % 2:
            continue
        low = mask & -mask
        i = low.bit_length() - 1
        rest = mask ^ low
        out = None
        r = rest
        while r:
            jb = r & -r
            r ^= jb
            c = w[i][jb.bit_length() - 1] + table[rest ^ jb]
            if out is None or c < out:
                out = c
        table[mask] = out
    return table
