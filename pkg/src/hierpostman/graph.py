"""Undirected weighted graphs, walks, and the exact primitives the postman
solvers are assembled from.

Vertices are arbitrary hashable ids that are mutually comparable (strings or
integers in practice); every tie is broken by the natural order of vertex ids
and of edge keys, so all results are reproducible. Edges are identified by
their canonical key ``(u, v)`` with ``u < v``. Edge multisets are plain
:class:`collections.Counter` objects keyed by edge keys: ``+`` adds
multiplicities and ``-`` subtracts them clamping at zero.

Weights are non-negative Python integers, so sums never overflow.
"""

from __future__ import annotations

import heapq
from collections import Counter, defaultdict
from dataclasses import dataclass
from types import MappingProxyType
from typing import Hashable, Iterable, Mapping

from .errors import InfeasibleError, InputError, PreconditionError
from .matching import min_weight_perfect_matching

Vertex = Hashable
Edge = tuple


def edge_key(u: Vertex, v: Vertex) -> Edge:
    """Canonical key of the undirected edge ``{u, v}``."""
    if u == v:
        raise InputError(f"self-loop at vertex {u!r}")
    return (u, v) if u < v else (v, u)


class WeightedGraph:
    """Simple undirected graph with non-negative integer edge weights.

    Instances are immutable. Use :meth:`from_edges` for the common case.
    """

    __slots__ = ("_vertices", "_vertex_set", "_weights", "_adj", "_edges")

    def __init__(self, vertices: Iterable[Vertex], weights: Mapping[Edge, int]):
        vset = set(vertices)
        table: dict[Edge, int] = {}
        for (u, v), w in weights.items():
            key = edge_key(u, v)
            if key in table:
                raise InputError(f"duplicate edge {key!r}")
            if u not in vset or v not in vset:
                raise InputError(f"edge {key!r} has an undeclared endpoint")
            if isinstance(w, bool) or not isinstance(w, int):
                raise InputError(f"weight of edge {key!r} must be an integer, got {w!r}")
            if w < 0:
                raise InputError(f"weight of edge {key!r} is negative")
            table[key] = w
        try:
            self._vertices = tuple(sorted(vset))
        except TypeError as exc:
            raise InputError("vertex ids must be mutually comparable") from exc
        self._vertex_set = frozenset(vset)
        self._edges = tuple(sorted(table))
        self._weights = MappingProxyType({e: table[e] for e in self._edges})
        adj: dict[Vertex, list[tuple[Vertex, int]]] = {v: [] for v in self._vertices}
        for (u, v), w in self._weights.items():
            adj[u].append((v, w))
            adj[v].append((u, w))
        self._adj = {v: tuple(sorted(nbrs)) for v, nbrs in adj.items()}

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[Vertex, Vertex, int]],
        vertices: Iterable[Vertex] | None = None,
    ) -> WeightedGraph:
        """Build a graph from ``(u, v, w)`` triples.

        When ``vertices`` is omitted the vertex set is the set of endpoints.
        """
        table: dict[Edge, int] = {}
        seen: set[Vertex] = set()
        for u, v, w in edges:
            key = edge_key(u, v)
            if key in table:
                raise InputError(f"duplicate edge {key!r}")
            table[key] = w
            seen.update(key)
        if vertices is None:
            vertices = seen
        return cls(vertices, table)

    @property
    def vertices(self) -> tuple:
        return self._vertices

    @property
    def edges(self) -> tuple:
        return self._edges

    @property
    def weights(self) -> Mapping[Edge, int]:
        return self._weights

    def __contains__(self, v: Vertex) -> bool:
        return v in self._vertex_set

    def __repr__(self) -> str:
        return f"WeightedGraph(n={len(self._vertices)}, m={len(self._edges)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return self._vertices == other._vertices and dict(self._weights) == dict(other._weights)

    def __hash__(self) -> int:
        return hash((self._vertices, tuple(self._weights.items())))

    def has_edge(self, u: Vertex, v: Vertex) -> bool:
        return u != v and edge_key(u, v) in self._weights

    def weight(self, u: Vertex, v: Vertex) -> int:
        try:
            return self._weights[edge_key(u, v)]
        except KeyError:
            raise InputError(f"no edge between {u!r} and {v!r}") from None

    def neighbors(self, v: Vertex) -> tuple:
        """``(neighbor, weight)`` pairs sorted by neighbor id."""
        try:
            return self._adj[v]
        except KeyError:
            raise InputError(f"unknown vertex {v!r}") from None

    def degree(self, v: Vertex) -> int:
        return len(self.neighbors(v))

    @property
    def total_weight(self) -> int:
        return sum(self._weights.values())

    @property
    def max_weight(self) -> int:
        return max(self._weights.values(), default=0)

    def edge_subgraph(self, edges: Iterable[Edge]) -> WeightedGraph:
        """The graph induced by ``edges``: vertex set V(edges), no isolated vertices."""
        table = {}
        for e in edges:
            key = edge_key(*e)
            if key not in self._weights:
                raise InputError(f"edge {key!r} is not in the graph")
            table[key] = self._weights[key]
        verts = {v for e in table for v in e}
        return WeightedGraph(verts, table)


# --- edge multisets -------------------------------------------------------


def multiset_weight(g: WeightedGraph, m: Mapping[Edge, int]) -> int:
    return sum(g.weights[e] * k for e, k in m.items() if k > 0)


def multiset_vertices(m: Mapping[Edge, int]) -> set:
    return {v for e, k in m.items() if k > 0 for v in e}


def odd_vertices(m: Mapping[Edge, int]) -> set:
    """Imbalanced vertices of the multigraph induced by ``m``."""
    deg: Counter = Counter()
    for (u, v), k in m.items():
        if k > 0:
            deg[u] += k
            deg[v] += k
    return {v for v, d in deg.items() if d % 2}


# --- walks -------------------------------------------------------------------


@dataclass(frozen=True)
class Walk:
    """Vertex sequence of a walk in a simple graph.

    Consecutive vertices determine the traversed edges, so the alternating
    vertex/edge form is recovered by :meth:`edges`. A walk without edges is a
    single vertex.
    """

    vertices: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        if not self.vertices:
            raise InputError("a walk needs at least one vertex")

    @property
    def start(self) -> Vertex:
        return self.vertices[0]

    @property
    def end(self) -> Vertex:
        return self.vertices[-1]

    @property
    def closed(self) -> bool:
        return self.vertices[0] == self.vertices[-1]

    def __len__(self) -> int:
        return len(self.vertices) - 1

    def edges(self) -> list:
        return [edge_key(a, b) for a, b in zip(self.vertices, self.vertices[1:])]

    def edge_counts(self) -> Counter:
        return Counter(self.edges())

    def weight(self, g: WeightedGraph) -> int:
        """Total weight; raises :class:`InputError` on a step that is not an edge of ``g``."""
        total = 0
        for a, b in zip(self.vertices, self.vertices[1:]):
            total += g.weight(a, b)
        return total

    def is_walk_in(self, g: WeightedGraph) -> bool:
        if self.vertices[0] not in g:
            return False
        return all(g.has_edge(a, b) for a, b in zip(self.vertices, self.vertices[1:]))

    def then(self, other: Walk) -> Walk:
        """Concatenation; ``other`` must start where this walk ends."""
        if other.start != self.end:
            raise PreconditionError(f"cannot join a walk ending at {self.end!r} "
                                    f"to one starting at {other.start!r}")
        return Walk(self.vertices + other.vertices[1:])

    def reversed(self) -> Walk:
        return Walk(self.vertices[::-1])


# --- components ------------------------------------------------------------


class DisjointSet:
    """Union-find keyed by arbitrary hashable items."""

    def __init__(self, items: Iterable = ()):
        self._parent: dict = {}
        for x in items:
            self._parent[x] = x

    def add(self, x) -> None:
        self._parent.setdefault(x, x)

    def find(self, x):
        self.add(x)
        root = x
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[x] != root:
            self._parent[x], x = root, self._parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self._parent[rb] = ra
        return True

    def groups(self) -> list[frozenset]:
        out: dict = defaultdict(set)
        for x in self._parent:
            out[self.find(x)].add(x)
        return sorted((frozenset(s) for s in out.values()), key=min)


def connected_components(g: WeightedGraph, restrict: Iterable[Edge] | None = None) -> list[frozenset]:
    """Components of the subgraph induced by ``restrict`` (default: all edges).

    Only non-isolated vertices are reported. Components are ordered by their
    smallest vertex.
    """
    edges = g.edges if restrict is None else [edge_key(*e) for e in restrict]
    ds = DisjointSet()
    for u, v in edges:
        if (u, v) not in g.weights:
            raise InputError(f"edge {(u, v)!r} is not in the graph")
        ds.union(u, v)
    return ds.groups()


def multiset_components(m: Mapping[Edge, int]) -> list[frozenset]:
    ds = DisjointSet()
    for (u, v), k in m.items():
        if k > 0:
            ds.union(u, v)
    return ds.groups()


# --- shortest paths --------------------------------------------------------


@dataclass(frozen=True)
class ShortestPaths:
    """Single-source shortest-path tree.

    ``dist`` holds only reachable vertices; :meth:`distance` returns ``None``
    for the rest.
    """

    source: Vertex
    dist: Mapping
    pred: Mapping

    def distance(self, v: Vertex) -> int | None:
        return self.dist.get(v)

    def reachable(self, v: Vertex) -> bool:
        return v in self.dist

    def path(self, v: Vertex) -> tuple:
        if v not in self.dist:
            raise InfeasibleError(f"{v!r} is unreachable from {self.source!r}")
        out = [v]
        while out[-1] != self.source:
            out.append(self.pred[out[-1]])
        return tuple(reversed(out))


def shortest_paths(g: WeightedGraph, source: Vertex, allowed: Iterable[Edge] | None = None) -> ShortestPaths:
    """Dijkstra from ``source`` using only ``allowed`` edges (default: all).

    Among equally short routes the predecessor with the smallest id that is
    settled first wins, so the tree is deterministic.
    """
    if source not in g:
        raise InputError(f"unknown source vertex {source!r}")
    allowed_set = None if allowed is None else {edge_key(*e) for e in allowed}
    dist = {source: 0}
    pred: dict = {}
    done: set = set()
    heap = [(0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v, w in g.neighbors(u):
            if v in done:
                continue
            if allowed_set is not None and edge_key(u, v) not in allowed_set:
                continue
            nd = d + w
            old = dist.get(v)
            if old is None or nd < old or (nd == old and u < pred[v]):
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, v))
    return ShortestPaths(source, MappingProxyType(dist), MappingProxyType(pred))


class PathIndex:
    """Lazily cached shortest-path trees of one graph.

    Trees are pure functions of the graph, so concurrent callers at worst
    compute the same tree twice.
    """

    def __init__(self, g: WeightedGraph, allowed: Iterable[Edge] | None = None):
        self.graph = g
        self._allowed = None if allowed is None else frozenset(edge_key(*e) for e in allowed)
        self._trees: dict = {}

    def tree(self, source: Vertex) -> ShortestPaths:
        t = self._trees.get(source)
        if t is None:
            t = shortest_paths(self.graph, source, self._allowed)
            self._trees[source] = t
        return t

    def distance(self, u: Vertex, v: Vertex) -> int | None:
        return self.tree(u).distance(v)

    def path(self, u: Vertex, v: Vertex) -> tuple:
        return self.tree(u).path(v)


@dataclass(frozen=True)
class MetricClosure:
    """Complete graph on the terminals weighted by shortest-path distance."""

    graph: WeightedGraph
    paths: Mapping

    def expand(self, u: Vertex, v: Vertex) -> tuple:
        """Vertex sequence of a shortest ``u``-``v`` path in the host graph."""
        if u == v:
            return (u,)
        p = self.paths[edge_key(u, v)]
        return p if p[0] == u else p[::-1]


def metric_closure(g: WeightedGraph, terminals: Iterable[Vertex],
                   allowed: Iterable[Edge] | None = None,
                   index: PathIndex | None = None) -> MetricClosure:
    terms = sorted(set(terminals))
    if index is None:
        index = PathIndex(g, allowed)
    table = {}
    paths = {}
    for i, u in enumerate(terms):
        tree = index.tree(u)
        for v in terms[i + 1:]:
            d = tree.distance(v)
            if d is None:
                raise InfeasibleError(f"terminals {u!r} and {v!r} are not connected")
            table[(u, v)] = d
            paths[(u, v)] = tree.path(v)
    return MetricClosure(WeightedGraph(terms, table), MappingProxyType(paths))


# --- Euler walks -------------------------------------------------------------


def euler_walk(m: Mapping[Edge, int], start: Vertex, end: Vertex) -> Walk:
    """Walk traversing every edge of the multigraph ``m`` exactly as often as
    its multiplicity, from ``start`` to ``end``.

    Hierholzer's algorithm; at each vertex the smallest remaining incident
    edge is taken first.
    """
    remaining = Counter({edge_key(*e): k for e, k in m.items() if k > 0})
    if not remaining:
        if start != end:
            raise PreconditionError(f"no edges to walk from {start!r} to {end!r}")
        return Walk((start,))
    verts = multiset_vertices(remaining)
    for v in (start, end):
        if v not in verts:
            raise PreconditionError(f"endpoint {v!r} is not incident to any edge")
    comps = multiset_components(remaining)
    if len(comps) > 1:
        stray = next(c for c in comps if start not in c)
        raise PreconditionError(f"multigraph is disconnected; component {sorted(stray)!r} "
                                f"is unreachable from {start!r}")
    odd = odd_vertices(remaining)
    expected = set() if start == end else {start, end}
    if odd != expected:
        bad = sorted(odd ^ expected)
        raise PreconditionError(f"parity violated at vertex {bad[0]!r}: imbalanced set is "
                                f"{sorted(odd)!r}, expected {sorted(expected)!r}")

    nbrs: dict = defaultdict(list)
    for u, v in sorted(remaining):
        nbrs[u].append(v)
        nbrs[v].append(u)
    for lst in nbrs.values():
        lst.sort()
    ptr: Counter = Counter()

    stack = [start]
    out = []
    while stack:
        v = stack[-1]
        lst = nbrs[v]
        i = ptr[v]
        while i < len(lst) and remaining[edge_key(v, lst[i])] == 0:
            i += 1
        ptr[v] = i
        if i == len(lst):
            out.append(stack.pop())
        else:
            u = lst[i]
            remaining[edge_key(v, u)] -= 1
            stack.append(u)
    out.reverse()
    return Walk(out)


# --- connectors and joins ----------------------------------------------------


def spanning_connector(g: WeightedGraph, required: Iterable[Edge]) -> frozenset:
    """Minimum-weight edge set ``T`` such that ``required ∪ T`` connects every
    vertex of ``g``.

    Kruskal's algorithm with the components of the required edges merged up
    front. Ties go to the smallest edge key.
    """
    ds = DisjointSet(g.vertices)
    req = {edge_key(*e) for e in required}
    for u, v in req:
        if (u, v) not in g.weights:
            raise InputError(f"required edge {(u, v)!r} is not in the graph")
        ds.union(u, v)
    chosen = []
    for e in sorted((e for e in g.edges if e not in req), key=lambda e: (g.weights[e], e)):
        if ds.union(*e):
            chosen.append(e)
    if len(ds.groups()) > 1:
        raise InfeasibleError("graph is disconnected; no spanning connector exists")
    return frozenset(chosen)


def min_t_join(g: WeightedGraph, t_set: Iterable[Vertex], *, index: PathIndex | None = None) -> Counter:
    """Minimum-weight edge multiset whose odd-degree vertices are exactly ``t_set``.

    Pairs up ``t_set`` by an exact minimum-weight perfect matching on
    shortest-path distances and overlays the matched paths. Multiplicities are
    then reduced mod 2, and any resulting component free of ``t_set`` vertices
    (only possible along zero-weight cycles) is dropped.
    """
    terms = sorted(set(t_set))
    if len(terms) % 2:
        raise PreconditionError(f"T-join needs an even vertex set, got {len(terms)} vertices")
    if not terms:
        return Counter()
    for v in terms:
        if v not in g:
            raise InputError(f"unknown vertex {v!r}")
    if index is None:
        index = PathIndex(g)

    def dist(a, b):
        d = index.distance(a, b)
        if d is None:
            raise InfeasibleError(f"{a!r} and {b!r} are not connected")
        return d

    pairs = min_weight_perfect_matching(terms, dist)
    join: Counter = Counter()
    for a, b in pairs:
        p = index.path(a, b)
        for x, y in zip(p, p[1:]):
            join[edge_key(x, y)] += 1
    join = Counter({e: 1 for e, k in join.items() if k % 2})
    tset = set(terms)
    keep = set()
    for comp in multiset_components(join):
        if comp & tset:
            keep |= comp
    return Counter({e: 1 for e in join if e[0] in keep})

