"""Postman solvers on a single graph.

* :func:`solve_cpp_exact` -- optimal closed walk covering every edge.
* :func:`solve_strpp_approx` -- 5/3-approximate ``s``-``t`` rural postman walk
  (spanning connector, parity fix by matching, Euler walk) run on the metric
  closure of the required vertices and expanded back.
* :func:`solve_strpp_oracle` / :func:`solve_rpp_oracle` -- exact exponential
  search over the order and orientation of required-edge traversals.
* :func:`solve_strpp_connected_exact` -- exact for connected required edges.
* :func:`reduce_strpp_to_rpp` -- path-to-tour reduction through a heavy
  required edge.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import InfeasibleError, InputError, PreconditionError, SizeLimitError
from .graph import (
    DisjointSet,
    Edge,
    PathIndex,
    Vertex,
    Walk,
    WeightedGraph,
    connected_components,
    edge_key,
    euler_walk,
    min_t_join,
    multiset_components,
    multiset_vertices,
    odd_vertices,
)
from .matching import min_weight_perfect_matching, subset_matching_costs

APPROX_RATIO = Fraction(5, 3)
DEFAULT_ORACLE_LIMIT = 7


class _DummySource:
    """Stand-in source used when ``s == t``; joined to ``t`` by a zero-weight edge."""

    def __repr__(self) -> str:
        return "s'"


DUMMY_SOURCE = _DummySource()


@dataclass(frozen=True)
class StRppInstance:
    graph: WeightedGraph
    required: frozenset
    source: Vertex
    target: Vertex

    def __post_init__(self):
        req = frozenset(edge_key(*e) for e in self.required)
        object.__setattr__(self, "required", req)
        for e in req:
            if e not in self.graph.weights:
                raise InputError(f"required edge {e!r} is not in the graph")
        for v in (self.source, self.target):
            if v not in self.graph:
                raise InputError(f"endpoint {v!r} is not a vertex of the graph")

    @property
    def terminals(self) -> list:
        return sorted(multiset_vertices(dict.fromkeys(self.required, 1)) | {self.source, self.target})

    @property
    def required_weight(self) -> int:
        return sum(self.graph.weights[e] for e in self.required)

    def is_feasible(self, index: PathIndex | None = None) -> bool:
        index = index or PathIndex(self.graph)
        tree = index.tree(self.source)
        return all(tree.reachable(v) for v in self.terminals)


@dataclass(frozen=True)
class RppInstance:
    graph: WeightedGraph
    required: frozenset

    def __post_init__(self):
        req = frozenset(edge_key(*e) for e in self.required)
        object.__setattr__(self, "required", req)
        for e in req:
            if e not in self.graph.weights:
                raise InputError(f"required edge {e!r} is not in the graph")

    @property
    def required_weight(self) -> int:
        return sum(self.graph.weights[e] for e in self.required)


@dataclass(frozen=True)
class ApproxTrace:
    """Intermediate objects of one approximation run.

    ``connector`` and ``matching`` are pairs of terminals standing for
    shortest paths of the host graph; ``DUMMY_SOURCE`` appears when the
    instance had ``s == t``.
    """

    connector: tuple
    parity_set: tuple
    matching: tuple
    walk: Walk
    required_weight: int
    connector_weight: int
    matching_weight: int
    dummy_source: bool = False
    required_pairs: tuple = field(default=(), repr=False)

    @property
    def weight(self) -> int:
        return self.required_weight + self.connector_weight + self.matching_weight

    def multigraph(self) -> Counter:
        """The multigraph R ⊎ T ⊎ M over terminal labels."""
        m: Counter = Counter()
        for a, b in self.required_pairs + self.connector + self.matching:
            m[_label_key(a, b)] += 1
        return m


def _label_key(a, b):
    if a is DUMMY_SOURCE:
        return (b, a)
    if b is DUMMY_SOURCE:
        return (a, b)
    return edge_key(a, b)


def _require_feasible(inst: StRppInstance, index: PathIndex) -> None:
    tree = index.tree(inst.source)
    for v in inst.terminals:
        if not tree.reachable(v):
            raise InfeasibleError(f"vertex {v!r} is unreachable from source {inst.source!r}")


# --- Chinese postman ---------------------------------------------------------


def solve_cpp_exact(g: WeightedGraph) -> Walk:
    """Optimal closed walk traversing every edge of ``g`` at least once."""
    if not g.edges:
        if not g.vertices:
            raise InputError("empty graph")
        return Walk((g.vertices[0],))
    if len(connected_components(g)) > 1:
        raise InfeasibleError("graph edges do not form a connected graph")
    base = Counter(dict.fromkeys(g.edges, 1))
    join = min_t_join(g, odd_vertices(base))
    start = g.edges[0][0]
    return euler_walk(base + join, start, start)


# --- 5/3-approximation -------------------------------------------------------


def solve_strpp_approx(inst: StRppInstance, *, index: PathIndex | None = None) -> tuple[Walk, ApproxTrace]:
    """Walk from ``s`` to ``t`` covering the required edges, at most 5/3 times optimal."""
    index = index or PathIndex(inst.graph)
    _require_feasible(inst, index)
    g = inst.graph
    s, t = inst.source, inst.target

    labels: list = inst.terminals
    real = list(labels)
    dummy = s == t
    if dummy:
        labels.append(DUMMY_SOURCE)
        real.append(t)
    pos = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)
    s_i = pos[DUMMY_SOURCE] if dummy else pos[s]
    t_i = pos[t]

    dist = [[0] * n for _ in range(n)]
    for i in range(n):
        tree = index.tree(real[i])
        for j in range(n):
            dist[i][j] = tree.distance(real[j])

    req_pairs = sorted((pos[u], pos[v]) for u, v in inst.required)

    # connector on the closure, required components pre-merged
    ds = DisjointSet(range(n))
    for a, b in req_pairs:
        ds.union(a, b)
    cands = sorted((dist[i][j], i, j) for i in range(n) for j in range(i + 1, n))
    connector = []
    for d, i, j in cands:
        if ds.union(i, j):
            connector.append((i, j))

    deg = Counter()
    for a, b in req_pairs + connector:
        deg[a] += 1
        deg[b] += 1
    parity = [v for v in range(n)
              if (v in (s_i, t_i)) == (deg[v] % 2 == 0)]
    matching = min_weight_perfect_matching(parity, lambda a, b: dist[a][b])

    multi: Counter = Counter()
    expansions: dict = {}
    for a, b in req_pairs:
        multi[(a, b)] += 1
        expansions.setdefault((a, b), deque()).append(None)
    for a, b in connector + [tuple(sorted(p)) for p in matching]:
        multi[(a, b)] += 1
        expansions.setdefault((a, b), deque()).append("path")

    tour = euler_walk(multi, s_i, t_i)
    seq = [real[tour.vertices[0]]]
    for a, b in zip(tour.vertices, tour.vertices[1:]):
        how = expansions[(min(a, b), max(a, b))].popleft()
        if how is None:
            seq.append(real[b])
        elif real[a] != real[b]:
            seq.extend(index.path(real[a], real[b])[1:])
    walk = Walk(seq)

    lab = labels.__getitem__
    trace = ApproxTrace(
        connector=tuple((lab(a), lab(b)) for a, b in connector),
        parity_set=tuple(lab(v) for v in parity),
        matching=tuple((lab(a), lab(b)) for a, b in matching),
        walk=walk,
        required_weight=inst.required_weight,
        connector_weight=sum(dist[a][b] for a, b in connector),
        matching_weight=sum(dist[a][b] for a, b in matching),
        dummy_source=dummy,
        required_pairs=tuple((lab(a), lab(b)) for a, b in req_pairs),
    )
    return walk, trace


# --- exact search over traversal sequences -----------------------------------


class SequenceSearch:
    """Exact rural postman search from one start vertex.

    An optimal walk is determined by the order and direction in which it first
    traverses each required edge, joined by shortest paths. A subset dynamic
    program over (covered set, last oriented edge) finds the best sequence for
    every possible end vertex at once.
    """

    def __init__(self, graph: WeightedGraph, required: Iterable[Edge], source: Vertex,
                 *, index: PathIndex | None = None, limit: int | None = DEFAULT_ORACLE_LIMIT,
                 fixed_first: bool = False):
        self.graph = graph
        self.required = sorted(edge_key(*e) for e in required)
        if limit is not None and len(self.required) > limit:
            raise SizeLimitError(f"{len(self.required)} required edges exceed the oracle limit of {limit}")
        self.source = source
        self.index = index or PathIndex(graph)
        self._fixed_first = fixed_first
        self._run()

    def _oriented(self, state: int) -> tuple:
        u, v = self.required[state >> 1]
        return (u, v) if state & 1 == 0 else (v, u)

    def _run(self) -> None:
        r = len(self.required)
        w = self.graph.weights
        idx = self.index
        size = 1 << r
        cost: list[dict] = [dict() for _ in range(size)]
        parent: list[dict] = [dict() for _ in range(size)]

        if self._fixed_first and r:
            a, b = self.required[0]
            if a != self.source:
                raise PreconditionError("fixed first edge must start at the source")
            cost[1][0] = w[(a, b)]
            parent[1][0] = None
        else:
            src = idx.tree(self.source)
            for j in range(r):
                for o in (0, 1):
                    st = 2 * j + o
                    entry, _ = self._oriented(st)
                    d = src.distance(entry)
                    if d is None:
                        continue
                    cost[1 << j][st] = d + w[self.required[j]]
                    parent[1 << j][st] = None

        for mask in range(1, size):
            layer = cost[mask]
            for st in sorted(layer):
                base = layer[st]
                here = self._oriented(st)[1]
                tree = idx.tree(here)
                for j in range(r):
                    bit = 1 << j
                    if mask & bit:
                        continue
                    for o in (0, 1):
                        nst = 2 * j + o
                        entry, _ = self._oriented(nst)
                        d = tree.distance(entry)
                        if d is None:
                            continue
                        c = base + d + w[self.required[j]]
                        nxt = cost[mask | bit]
                        if nst not in nxt or c < nxt[nst]:
                            nxt[nst] = c
                            parent[mask | bit][nst] = st
        self._cost = cost
        self._parent = parent

    def best_to(self, target: Vertex) -> tuple[int, list] | None:
        """``(weight, oriented edge sequence)`` of an optimal walk ending at ``target``."""
        r = len(self.required)
        if r == 0:
            d = self.index.distance(self.source, target)
            return None if d is None else (d, [])
        full = (1 << r) - 1
        best = None
        for st in sorted(self._cost[full]):
            here = self._oriented(st)[1]
            d = self.index.distance(here, target)
            if d is None:
                continue
            c = self._cost[full][st] + d
            if best is None or c < best[0]:
                best = (c, st)
        if best is None:
            return None
        seq = []
        mask, st = full, best[1]
        while st is not None:
            seq.append(self._oriented(st))
            prev = self._parent[mask][st]
            mask ^= 1 << (st >> 1)
            st = prev
        seq.reverse()
        return best[0], seq

    def walk_to(self, target: Vertex) -> Walk | None:
        found = self.best_to(target)
        if found is None:
            return None
        _, seq = found
        verts = [self.source]
        for a, b in seq:
            verts.extend(self.index.path(verts[-1], a)[1:])
            verts.append(b)
        verts.extend(self.index.path(verts[-1], target)[1:])
        return Walk(verts)


def solve_strpp_oracle(inst: StRppInstance, limit: int | None = DEFAULT_ORACLE_LIMIT,
                       *, index: PathIndex | None = None) -> Walk:
    """Optimal ``s``-``t`` walk covering the required edges (exponential in ``|R|``)."""
    if limit is not None and len(inst.required) > limit:
        raise SizeLimitError(f"{len(inst.required)} required edges exceed the oracle limit of {limit}")
    index = index or PathIndex(inst.graph)
    _require_feasible(inst, index)
    search = SequenceSearch(inst.graph, inst.required, inst.source, index=index, limit=limit)
    return search.walk_to(inst.target)


def solve_rpp_oracle(inst: RppInstance, limit: int | None = DEFAULT_ORACLE_LIMIT) -> Walk:
    """Optimal closed walk covering the required edges.

    The walk starts at the smaller endpoint of the smallest required edge and
    traverses that edge first, which removes rotational and mirror symmetry.
    With no required edges the result is the empty walk at the smallest vertex.
    """
    if limit is not None and len(inst.required) > limit:
        raise SizeLimitError(f"{len(inst.required)} required edges exceed the oracle limit of {limit}")
    if not inst.required:
        if not inst.graph.vertices:
            raise InputError("empty graph")
        return Walk((inst.graph.vertices[0],))
    first = min(inst.required)
    home = next(c for c in connected_components(inst.graph) if first[0] in c)
    for e in inst.required:
        if e[0] not in home:
            raise InfeasibleError(f"required edge {e!r} is not connected to {first!r}")
    search = SequenceSearch(inst.graph, inst.required, first[0], limit=limit, fixed_first=True)
    return search.walk_to(first[0])


# --- connected required edges ------------------------------------------------


def solve_strpp_connected_exact(inst: StRppInstance, *, index: PathIndex | None = None) -> Walk:
    """Optimal walk when the required edges induce a connected graph.

    Every candidate attaches ``s`` to a required vertex ``x`` and ``t`` to a
    required vertex ``y`` by shortest paths and fixes the remaining parity by a
    minimum T-join. Candidate costs are evaluated from one table of subset
    matching costs, then the cheapest candidate whose multigraph is connected
    with the right imbalance is materialised.
    """
    index = index or PathIndex(inst.graph)
    g = inst.graph
    s, t = inst.source, inst.target
    req = inst.required
    if len(connected_components(g, req)) > 1:
        raise PreconditionError("required edges do not induce a connected graph")
    _require_feasible(inst, index)
    if not req:
        return Walk(index.path(s, t))

    req_count = Counter(dict.fromkeys(req, 1))
    rverts = sorted(multiset_vertices(req_count))
    universe = sorted(set(rverts) | {s, t})
    pos = {v: i for i, v in enumerate(universe)}
    w = [[index.distance(a, b) for b in universe] for a in universe]
    table = subset_matching_costs(w)
    odd_mask = 0
    for v in odd_vertices(req_count):
        odd_mask ^= 1 << pos[v]

    base = inst.required_weight
    cands = []
    for x in sorted(set(rverts) | {s}):
        for y in sorted(set(rverts) | {t}):
            # attachment paths flip parity at s, x and y, t; s and t cancel
            # against the required imbalance, so the join fixes odd(R) ^ {x, y}
            j = table[odd_mask ^ (1 << pos[x]) ^ (1 << pos[y])]
            if j is None:
                continue
            cands.append((base + w[pos[s]][pos[x]] + w[pos[y]][pos[t]] + j, x, y))
    cands.sort(key=lambda c: (c[0], c[1], c[2]))

    want = set() if s == t else {s, t}
    for c, x, y in cands:
        multi = Counter(req_count)
        for a, b in ((s, x), (y, t)):
            p = index.path(a, b)
            for u, v in zip(p, p[1:]):
                multi[edge_key(u, v)] += 1
        residual = odd_vertices(multi) ^ want
        multi += min_t_join(g, residual, index=index)
        if len(multiset_components(multi)) != 1 or not {s, t} <= multiset_vertices(multi):
            continue
        if odd_vertices(multi) != want:
            continue
        return euler_walk(multi, s, t)
    raise InfeasibleError("no connected candidate walk exists")


# --- s-t-RPP to RPP ----------------------------------------------------------


def _fresh_vertex(g: WeightedGraph, base: Vertex) -> Vertex:
    if isinstance(base, str):
        cand = base + "'"
        while cand in g:
            cand += "'"
        return cand
    if isinstance(base, int):
        return max(v for v in g.vertices) + 1
    raise InputError(f"cannot invent a vertex id next to {base!r}")


@dataclass(frozen=True)
class RppBackMap:
    """Translates closed walks of the reduced instance back to ``s``-``t`` walks."""

    source: Vertex
    target: Vertex
    added_edge: Edge
    added_weight: int
    inserted: tuple

    def to_strpp_walk(self, walk: Walk) -> Walk:
        """Drop the single traversal of the added edge and strip inserted sources."""
        verts = list(walk.vertices)
        steps = [i for i, e in enumerate(walk.edges()) if e == self.added_edge]
        if len(steps) != 1:
            raise PreconditionError(f"walk traverses the added edge {len(steps)} times, expected once")
        i = steps[0]
        # rotate the closed walk so that the added edge is its last step
        body = verts[:-1]
        rot = body[i + 1:] + body[:i + 1]
        if rot[0] != self.source:
            rot.reverse()
        out = []
        for v in rot:
            if v in self.inserted:
                continue
            if out and out[-1] == v:
                continue
            out.append(v)
        return Walk(out)


def reduce_strpp_to_rpp(inst: StRppInstance) -> tuple[RppInstance, RppBackMap]:
    """RPP instance whose optimum exceeds the ``s``-``t`` optimum by exactly ``2ω(E)``.

    While ``s == t`` or ``s`` is adjacent to ``t``, a new source joined to the
    old one by a required zero-weight edge is inserted. Then the edge ``{s, t}``
    with weight twice the total edge weight is added and made required.
    """
    g = inst.graph
    s, t = inst.source, inst.target
    weights = dict(g.weights)
    verts = list(g.vertices)
    required = set(inst.required)
    inserted = []
    cur = g
    while s == t or cur.has_edge(s, t):
        s2 = _fresh_vertex(cur, s)
        verts.append(s2)
        weights[edge_key(s2, s)] = 0
        required.add(edge_key(s2, s))
        inserted.append(s2)
        s = s2
        cur = WeightedGraph(verts, weights)
    heavy = 2 * cur.total_weight
    added = edge_key(s, t)
    weights[added] = heavy
    required.add(added)
    g2 = WeightedGraph(verts, weights)
    back = RppBackMap(source=s, target=t, added_edge=added, added_weight=heavy, inserted=tuple(inserted))
    return RppInstance(g2, frozenset(required)), back
