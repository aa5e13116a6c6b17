"""Seeded random instances for tests, benchmarks and the CLI.

All generators take a :class:`random.Random` and consume it in a fixed order,
so a seed pins the output exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import InputError
from .gadget import CnfFormula
from .graph import DisjointSet, WeightedGraph, edge_key
from .hcpp import HcppInstance, class_component_stats
from .postman import StRppInstance


def vertex_names(n: int) -> list[str]:
    width = len(str(max(n - 1, 0)))
    return [f"v{i:0{width}d}" for i in range(n)]


def random_connected_graph(rng: random.Random, n: int, m: int, max_weight: int = 9,
                           min_weight: int = 1) -> WeightedGraph:
    """Random spanning tree plus ``m - n + 1`` extra distinct edges."""
    if n < 1:
        raise InputError("need at least one vertex")
    if m < n - 1:
        raise InputError(f"{m} edges cannot connect {n} vertices")
    if m > n * (n - 1) // 2:
        raise InputError(f"{m} edges exceed the {n * (n - 1) // 2} possible on {n} vertices")
    if not 0 <= min_weight <= max_weight:
        raise InputError("weights must satisfy 0 <= min_weight <= max_weight")
    names = vertex_names(n)
    order = names[:]
    rng.shuffle(order)
    edges = set()
    for i in range(1, n):
        edges.add(edge_key(order[i], order[rng.randrange(i)]))
    rest = sorted({edge_key(a, b) for i, a in enumerate(names) for b in names[i + 1:]} - edges)
    edges |= set(rng.sample(rest, m - len(edges)))
    weights = {e: rng.randint(min_weight, max_weight) for e in sorted(edges)}
    return WeightedGraph(names, weights)


@dataclass
class _Blob:
    cid: int
    vertices: set
    size: int


def _grow_classes(rng: random.Random, g: WeightedGraph, k: int, per_class: int,
                  max_class_size: int | None) -> dict:
    """Assign every edge a class by growing ``per_class`` vertex-disjoint blobs
    per class outward from seed edges."""
    edges = list(g.edges)
    order = edges[:]
    rng.shuffle(order)
    blobs: list[_Blob] = []
    class_of: dict = {}
    # seeds go round-robin so every class gets one before any gets a second
    for _ in range(per_class):
        for cid in range(1, k + 1):
            for e in order:
                if e in class_of or any(b.cid == cid and (e[0] in b.vertices or e[1] in b.vertices)
                                        for b in blobs):
                    continue
                class_of[e] = cid
                blobs.append(_Blob(cid, set(e), 1))
                break
    def touching(e):
        return [b for b in blobs if e[0] in b.vertices or e[1] in b.vertices]

    def clean(near):
        return [b for b in near
                if not any(o is not b and o.cid == b.cid for o in near)
                and (max_class_size is None
                     or sum(x.size for x in blobs if x.cid == b.cid) < max_class_size)]

    while len(class_of) < len(edges):
        options = [(e, touching(e)) for e in edges if e not in class_of]
        options = [(e, near) for e, near in options if near]
        # edges that would merge two blobs of one class wait while others can grow
        safe = [(e, clean(near)) for e, near in options if clean(near)]
        if safe:
            e, choices = rng.choice(safe)
            near = touching(e)
        else:
            e, near = rng.choice(options)
            choices = near
        b = rng.choice(choices)
        class_of[e] = b.cid
        b.vertices |= set(e)
        b.size += 1
        for o in [o for o in near if o is not b and o.cid == b.cid]:
            b.vertices |= o.vertices
            b.size += o.size
            blobs.remove(o)
    return class_of


def _class_components(edges) -> int:
    ds = DisjointSet()
    for u, v in edges:
        ds.add(u)
        ds.add(v)
        ds.union(u, v)
    return len(ds.groups())


def _repair(rng, class_of: dict, k: int, per_class: int, max_class_size: int | None,
            steps: int = 4000) -> dict:
    """Local search moving single edges between classes towards ``per_class``
    components each; non-worsening moves are accepted."""
    members = [set() for _ in range(k)]
    for e, c in class_of.items():
        members[c - 1].add(e)

    def cost(edges):
        if not edges:
            return 10**6
        over = 0 if max_class_size is None else max(0, len(edges) - max_class_size)
        return abs(_class_components(edges) - per_class) + 2 * over

    costs = [cost(m) for m in members]
    edges = sorted(class_of)
    for _ in range(steps):
        if not any(costs) or k == 1:
            break
        e = rng.choice(edges)
        src = class_of[e] - 1
        dst = rng.randrange(k - 1)
        dst += dst >= src
        a, b = members[src] - {e}, members[dst] | {e}
        ca, cb = cost(a), cost(b)
        if ca + cb <= costs[src] + costs[dst]:
            members[src], members[dst] = a, b
            costs[src], costs[dst] = ca, cb
            class_of[e] = dst + 1
    return class_of


def random_hcpp(rng: random.Random, n: int, m: int, k: int, max_weight: int = 9, *,
                components_per_class: int | None = None,
                max_class_size: int | None = None) -> tuple[HcppInstance, list[str]]:
    """Random linearly ordered instance on a connected graph.

    Without ``components_per_class`` each edge lands in a uniformly random
    class (every class nonempty). With it, classes are grown to have that many
    components; when that is impossible the warnings list says so.
    """
    if k < 1 or k > m:
        raise InputError(f"need 1 <= k <= m, got k={k}, m={m}")
    if components_per_class is not None and components_per_class < 1:
        raise InputError("components per class must be positive")
    g = random_connected_graph(rng, n, m, max_weight)
    if components_per_class is None:
        edges = list(g.edges)
        rng.shuffle(edges)
        class_of = {e: i + 1 for i, e in enumerate(edges[:k])}
        for e in edges[k:]:
            class_of[e] = rng.randint(1, k)
        inst = HcppInstance.from_class_map(g, class_of)
    else:
        class_of = _grow_classes(rng, g, k, components_per_class, max_class_size)
        class_of = _repair(rng, class_of, k, components_per_class, max_class_size)
        inst = HcppInstance.from_class_map(g, class_of)
    warnings = []
    if components_per_class is not None:
        for cid, cnt in enumerate(class_component_stats(inst).per_class, start=1):
            if cnt != components_per_class:
                warnings.append(f"class {cid} has {cnt} components instead of {components_per_class}")
    if max_class_size is not None:
        for cid, cls in enumerate(inst.classes, start=1):
            if len(cls) > max_class_size:
                warnings.append(f"class {cid} has {len(cls)} edges, above {max_class_size}")
    return inst, warnings


def random_strpp(rng: random.Random, n: int, m: int, r: int, max_weight: int = 9, *,
                 connected_required: bool = False, min_weight: int = 1) -> StRppInstance:
    """Random feasible ``s``-``t`` instance with ``r`` required edges."""
    g = random_connected_graph(rng, n, m, max_weight, min_weight)
    if not 0 <= r <= m:
        raise InputError(f"cannot require {r} of {m} edges")
    if connected_required and r:
        req = {rng.choice(g.edges)}
        while len(req) < r:
            touch = {v for e in req for v in e}
            cand = sorted(e for e in g.edges if e not in req and (e[0] in touch or e[1] in touch))
            req.add(rng.choice(cand))
    else:
        req = set(rng.sample(list(g.edges), r))
    s = rng.choice(g.vertices)
    t = rng.choice(g.vertices)
    return StRppInstance(g, frozenset(req), s, t)


def random_cnf(rng: random.Random, n: int, m: int, max_len: int = 3) -> CnfFormula:
    """``m`` clauses over distinct variables with random signs."""
    clauses = []
    for _ in range(m):
        size = rng.randint(1, min(max_len, n))
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), size)))
    return CnfFormula(n, tuple(clauses))
