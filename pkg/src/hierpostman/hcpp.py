"""Hierarchical Chinese Postman instances and solvers.

An instance partitions the edges into classes ``1..k`` ordered by a strict
partial order; a feasible tour traverses an edge of class ``B`` for the first
time only after every edge of every class ``A ≺ B`` has been traversed.

For linear orders the problem decomposes into ``s``-``t`` rural postman
sub-instances ``R[u, v, i]``: walk from ``u`` to ``v`` inside the graph of
classes ``1..i`` covering class ``i``. Their optimal (or approximate) weights
label the arcs of a layered DAG, and a cheapest layer path from a copy of
some vertex back to the copy of the same vertex spells out the tour.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import InfeasibleError, InputError, PreconditionError, SizeLimitError
from .graph import (
    Edge,
    PathIndex,
    Vertex,
    Walk,
    WeightedGraph,
    connected_components,
    edge_key,
)
from .postman import (
    APPROX_RATIO,
    DEFAULT_ORACLE_LIMIT,
    SequenceSearch,
    StRppInstance,
    solve_strpp_approx,
    solve_strpp_connected_exact,
)

MODES = ("approx", "exact_connected", "exact_oracle")
_SUBSOLVERS = {
    "approx": "approx",
    "oracle": "oracle",
    "exact_oracle": "oracle",
    "connected": "connected",
    "exact_connected": "connected",
}


@dataclass(frozen=True)
class HcppInstance:
    """Graph, edge classes and precedence order.

    ``classes[i - 1]`` is class ``i``. ``relations`` is ``None`` for the
    linear order ``1 ≺ 2 ≺ … ≺ k``; otherwise it is a set of ``(a, b)`` pairs
    meaning ``a ≺ b`` whose transitive closure is the order.
    """

    graph: WeightedGraph
    classes: tuple
    relations: frozenset | None = None
    _class_of: Mapping = field(init=False, repr=False, compare=False)
    _preds: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        classes = tuple(frozenset(edge_key(*e) for e in c) for c in self.classes)
        object.__setattr__(self, "classes", classes)
        class_of = {}
        for cid, cls in enumerate(classes, start=1):
            if not cls:
                raise InputError(f"class {cid} is empty")
            for e in cls:
                if e not in self.graph.weights:
                    raise InputError(f"class {cid} edge {e!r} is not in the graph")
                if e in class_of:
                    raise InputError(f"edge {e!r} is in classes {class_of[e]} and {cid}")
                class_of[e] = cid
        missing = set(self.graph.edges) - set(class_of)
        if missing:
            raise InputError(f"edge {min(missing)!r} belongs to no class")
        object.__setattr__(self, "_class_of", class_of)

        k = len(classes)
        if self.relations is None:
            preds = tuple(frozenset(range(1, b)) for b in range(1, k + 1))
        else:
            rel = frozenset((int(a), int(b)) for a, b in self.relations)
            object.__setattr__(self, "relations", rel)
            direct: dict[int, set] = {b: set() for b in range(1, k + 1)}
            for a, b in rel:
                if not (1 <= a <= k and 1 <= b <= k):
                    raise InputError(f"relation {(a, b)!r} names an unknown class")
                if a == b:
                    raise InputError(f"relation {(a, b)!r} is reflexive")
                direct[b].add(a)
            preds = tuple(frozenset(_ancestors(direct, b)) for b in range(1, k + 1))
            for b in range(1, k + 1):
                if b in preds[b - 1]:
                    raise InputError(f"precedence relations contain a cycle through class {b}")
        object.__setattr__(self, "_preds", preds)

    @classmethod
    def from_class_map(cls, graph: WeightedGraph, class_of: Mapping[Edge, int],
                       relations: Iterable | None = None) -> HcppInstance:
        k = max(class_of.values(), default=0)
        buckets: list[set] = [set() for _ in range(k)]
        for e, c in class_of.items():
            if c < 1:
                raise InputError(f"class ids start at 1, got {c}")
            buckets[c - 1].add(edge_key(*e))
        rel = None if relations is None else frozenset(tuple(r) for r in relations)
        return cls(graph, tuple(buckets), rel)

    @property
    def k(self) -> int:
        return len(self.classes)

    @property
    def is_linear(self) -> bool:
        if self.relations is None:
            return True
        # a partial order may still be total
        return all(self._preds[b - 1] == frozenset(range(1, b)) for b in range(1, self.k + 1))

    def class_of(self, e: Edge) -> int:
        return self._class_of[edge_key(*e)]

    def predecessors(self, b: int) -> frozenset:
        """All classes ``a`` with ``a ≺ b``."""
        return self._preds[b - 1]

    def class_vertices(self, cid: int) -> set:
        return {v for e in self.classes[cid - 1] for v in e}


def _ancestors(direct: Mapping[int, set], b: int) -> set:
    seen: set = set()
    stack = list(direct[b])
    while stack:
        a = stack.pop()
        if a in seen:
            continue
        seen.add(a)
        stack.extend(direct[a])
    return seen


# --- validation --------------------------------------------------------------


@dataclass(frozen=True)
class WalkVerdict:
    accepted: bool
    reason: str = ""
    step: int | None = None
    classes: tuple | None = None

    def __bool__(self) -> bool:
        return self.accepted


def validate_walk(inst: HcppInstance, walk: Walk) -> WalkVerdict:
    """Check coverage and precedence of a closed walk.

    Rejections carry the first violation: a missing edge, or the earliest step
    at which an edge is traversed for the first time before some predecessor
    class is complete.
    """
    g = inst.graph
    if walk.start not in g:
        raise InputError(f"walk starts at unknown vertex {walk.start!r}")
    edges = walk.edges()
    for i, e in enumerate(edges):
        if e not in g.weights:
            raise InputError(f"walk step {i} uses {e!r}, which is not an edge of the graph")
    if not walk.closed:
        return WalkVerdict(False, f"walk is not closed: starts at {walk.start!r}, ends at {walk.end!r}")
    first: dict = {}
    for i, e in enumerate(edges):
        first.setdefault(e, i)
    missing = [e for e in g.edges if e not in first]
    if missing:
        return WalkVerdict(False, f"edge {missing[0]!r} of class {inst.class_of(missing[0])} is never traversed")
    done = [max(first[e] for e in cls) for cls in inst.classes]
    for i, e in enumerate(edges):
        if first[e] != i:
            continue
        b = inst.class_of(e)
        for a in sorted(inst.predecessors(b)):
            if done[a - 1] > i:
                return WalkVerdict(
                    False,
                    f"step {i} enters class {b} via {e!r} before class {a} is complete",
                    step=i, classes=(a, b))
    return WalkVerdict(True)


# --- statistics ----------------------------------------------------------------


@dataclass(frozen=True)
class ComponentStats:
    per_class: tuple
    c: int
    max_weight: int


def class_component_stats(inst: HcppInstance) -> ComponentStats:
    per = tuple(len(connected_components(inst.graph, cls)) for cls in inst.classes)
    return ComponentStats(per, max(per, default=0), inst.graph.max_weight)


# --- layered DAG ---------------------------------------------------------------


def _require_linear(inst: HcppInstance) -> None:
    if not inst.is_linear:
        raise PreconditionError(
            "the precedence order is not linear; HCPP with general partial orders is "
            "NP-hard even with connected classes, and these solvers require a linear order")


def layer_vertex_sets(inst: HcppInstance) -> tuple:
    """Vertex layers ``V_1 … V_{k+1}`` as sorted tuples of original vertex ids."""
    _require_linear(inst)
    seen: set = set()
    layers = []
    for cid in range(1, inst.k + 1):
        cv = inst.class_vertices(cid)
        layers.append(tuple(sorted(cv if cid == 1 else cv & seen)))
        seen |= cv
    layers.append(layers[0])
    return tuple(layers)


@dataclass(frozen=True)
class Arc:
    weight: int
    walk: Walk
    parity_size: int | None = None


@dataclass(frozen=True)
class LayeredDag:
    """Layers ``V_1 … V_{k+1}`` and arcs ``(i, u, v)`` from ``u`` in layer
    ``i`` to ``v`` in layer ``i + 1`` labelled by a realising walk."""

    layers: tuple
    arcs: Mapping
    subsolver: str

    @property
    def k(self) -> int:
        return len(self.layers) - 1

    def arc_weights(self) -> dict:
        return {key: arc.weight for key, arc in self.arcs.items()}


@dataclass(frozen=True)
class LayerPath:
    vertices: tuple
    weight: int


def _solve_source(task):
    kind, g_i, index, required, u, targets, limit, layer = task
    out = {}
    if kind == "oracle":
        try:
            search = SequenceSearch(g_i, required, u, index=index, limit=limit)
        except SizeLimitError as exc:
            raise SizeLimitError(f"sub-instance R[{u!r}, *, {layer}]: {exc}") from None
        for v in targets:
            found = search.best_to(v)
            if found is None:
                continue
            w = search.walk_to(v)
            out[v] = Arc(found[0], w)
        return out
    for v in targets:
        sub = StRppInstance(g_i, required, u, v)
        if not sub.is_feasible(index):
            continue
        if kind == "approx":
            w, trace = solve_strpp_approx(sub, index=index)
            out[v] = Arc(w.weight(g_i), w, len(trace.parity_set))
        else:
            w = solve_strpp_connected_exact(sub, index=index)
            out[v] = Arc(w.weight(g_i), w)
    return out


def build_layered_dag(inst: HcppInstance, subsolver: str = "exact_connected", *,
                      oracle_limit: int | None = DEFAULT_ORACLE_LIMIT, threads: int = 1) -> LayeredDag:
    """Layered digraph whose arc ``(i, u, v)`` weighs the sub-solver's walk for
    ``R[u, v, i]``; infeasible sub-instances get no arc.

    ``subsolver`` is ``approx``, ``oracle``/``exact_oracle`` or
    ``connected``/``exact_connected``. Sub-solves run on ``threads`` worker
    threads; results do not depend on the thread count.
    """
    kind = _SUBSOLVERS.get(subsolver)
    if kind is None:
        raise InputError(f"unknown subsolver {subsolver!r}")
    layers = layer_vertex_sets(inst)
    tasks = []
    prefix: list = []
    for i in range(1, inst.k + 1):
        prefix.extend(inst.classes[i - 1])
        g_i = inst.graph.edge_subgraph(prefix)
        index = PathIndex(g_i)
        required = inst.classes[i - 1]
        if kind == "connected" and len(connected_components(g_i, required)) > 1:
            raise PreconditionError(f"class {i} is not connected; exact_connected needs connected classes")
        for u in layers[i - 1]:
            tasks.append((i, u, (kind, g_i, index, required, u, layers[i], oracle_limit, i)))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_solve_source, [t[2] for t in tasks]))
    else:
        results = [_solve_source(t[2]) for t in tasks]
    arcs = {}
    for (i, u, _), res in zip(tasks, results):
        for v in sorted(res):
            arcs[(i, u, v)] = res[v]
    return LayeredDag(layers, arcs, kind)


def best_layer_path(dag: LayeredDag) -> LayerPath | None:
    """Cheapest path from some ``v`` in the first layer to the copy of ``v`` in
    the last layer; ties go to the lexicographically smallest vertex sequence.

    One backward shortest-path pass over the DAG per first-layer vertex.
    """
    k = dag.k
    out_arcs: dict = {}
    for (i, u, v), arc in dag.arcs.items():
        out_arcs.setdefault((i, u), []).append((v, arc.weight))
    for lst in out_arcs.values():
        lst.sort()
    best = None
    for v in dag.layers[0]:
        if v not in dag.layers[k]:
            continue
        dist = [dict() for _ in range(k + 2)]
        dist[k + 1] = {v: 0}
        for i in range(k, 0, -1):
            nxt = dist[i + 1]
            for y in dag.layers[i - 1]:
                cands = [w + nxt[z] for z, w in out_arcs.get((i, y), ()) if z in nxt]
                if cands:
                    dist[i][y] = min(cands)
        if v not in dist[1]:
            continue
        seq = [v]
        left = dist[1][v]
        for i in range(1, k + 1):
            for z, w in out_arcs[(i, seq[-1])]:
                if z in dist[i + 1] and w + dist[i + 1][z] == left:
                    seq.append(z)
                    left -= w
                    break
        cand = (dist[1][v], tuple(seq))
        if best is None or cand < best:
            best = cand
    if best is None:
        return None
    return LayerPath(best[1], best[0])


def assemble_walk(dag: LayeredDag, path: LayerPath) -> Walk:
    """Concatenate the realising walks along a layer path into a closed tour."""
    seq = path.vertices
    walk = None
    for i in range(1, dag.k + 1):
        try:
            piece = dag.arcs[(i, seq[i - 1], seq[i])].walk
        except KeyError:
            raise PreconditionError(f"no arc from {seq[i - 1]!r} in layer {i} to {seq[i]!r}") from None
        walk = piece if walk is None else walk.then(piece)
    return walk


def check_feasibility(inst: HcppInstance) -> bool:
    """Whether a feasible tour exists (linear orders only).

    Arc ``(i, u, v)`` exists exactly when ``u``, ``v`` and all of class ``i``
    share a component of the graph of classes ``1..i``; the instance is
    feasible when such arcs admit a layer path.
    """
    layers = layer_vertex_sets(inst)
    if any(not layer for layer in layers):
        return False
    prefix: list = []
    step_arcs = []
    for i in range(1, inst.k + 1):
        prefix.extend(inst.classes[i - 1])
        comps = connected_components(inst.graph, prefix)
        comp_of = {v: c for c in comps for v in c}
        home = {comp_of[v] for v in inst.class_vertices(i)}
        if len(home) != 1:
            return False
        (home_comp,) = home
        step_arcs.append({(u, v) for u in layers[i - 1] for v in layers[i]
                          if comp_of.get(u) == home_comp and comp_of.get(v) == home_comp})
    for v in layers[0]:
        frontier = {v}
        for i in range(inst.k):
            frontier = {b for a, b in step_arcs[i] if a in frontier}
        if v in frontier:
            return True
    return False


# --- solver ----------------------------------------------------------------------


@dataclass(frozen=True)
class SolveStats:
    k: int
    n: int
    m: int
    c: int
    max_weight: int
    arc_count: int
    subsolver: str
    alpha: Fraction
    failure_probability: Fraction = Fraction(0)
    parity_sizes: tuple = ()


@dataclass(frozen=True)
class HcppSolution:
    walk: Walk
    weight: int
    mode: str
    layer_path: LayerPath
    dag: LayeredDag = field(repr=False)
    stats: SolveStats


def solve_hcppl(inst: HcppInstance, mode: str = "approx", *,
                oracle_limit: int | None = DEFAULT_ORACLE_LIMIT, threads: int = 1) -> HcppSolution:
    """Tour for an instance with linearly ordered classes.

    ``approx`` is within 5/3 of optimal; ``exact_connected`` (every class
    connected) and ``exact_oracle`` (every class within ``oracle_limit``
    edges) are optimal. Raises :class:`InfeasibleError` when no feasible tour
    exists.
    """
    if mode not in MODES:
        raise InputError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    _require_linear(inst)
    stats = class_component_stats(inst)
    if mode == "exact_connected":
        for cid, count in enumerate(stats.per_class, start=1):
            if count != 1:
                raise PreconditionError(f"class {cid} has {count} components; exact_connected needs connected classes")
    if mode == "exact_oracle" and oracle_limit is not None:
        for cid, cls in enumerate(inst.classes, start=1):
            if len(cls) > oracle_limit:
                raise SizeLimitError(f"class {cid} has {len(cls)} edges, above the oracle limit of {oracle_limit}")
    layers = layer_vertex_sets(inst)
    for i, layer in enumerate(layers, start=1):
        if not layer:
            raise InfeasibleError(f"layer {i} is empty: class {i} shares no vertex with earlier classes")
    dag = build_layered_dag(inst, mode, oracle_limit=oracle_limit, threads=threads)
    path = best_layer_path(dag)
    if path is None:
        raise InfeasibleError("no layer path: the classes cannot be traversed in order")
    walk = assemble_walk(dag, path)
    parity = tuple(a.parity_size for a in dag.arcs.values() if a.parity_size is not None)
    solve_stats = SolveStats(
        k=inst.k, n=len(inst.graph.vertices), m=len(inst.graph.edges), c=stats.c,
        max_weight=stats.max_weight, arc_count=len(dag.arcs), subsolver=dag.subsolver,
        alpha=APPROX_RATIO if mode == "approx" else Fraction(1), parity_sizes=parity)
    return HcppSolution(walk, path.weight, mode, path, dag, solve_stats)
