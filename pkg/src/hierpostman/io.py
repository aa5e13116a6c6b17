"""JSON instance and solution files.

Instance files look like::

    {"vertices": ["a", "b"],
     "edges": [{"u": "a", "v": "b", "w": 1, "class": 1}],
     "order": {"type": "linear"}}

``order`` may instead be ``{"type": "partial", "relations": [[1, 2], ...]}``.
Serialization is canonical (sorted vertices, edges and relations, two-space
indent, trailing newline) so files diff cleanly and round-trip byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .errors import InputError
from .graph import Walk, WeightedGraph, edge_key
from .hcpp import HcppInstance, HcppSolution, validate_walk


def _loads(text: str, what: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _int_field(obj: dict, key: str, where: str, minimum: int | None = None) -> int:
    if key not in obj:
        raise InputError(f"{where}: missing field {key!r}")
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise InputError(f"{where}.{key}: expected an integer, got {val!r}")
    if minimum is not None and val < minimum:
        raise InputError(f"{where}.{key}: must be at least {minimum}, got {val}")
    return val


# --- instances -------------------------------------------------------------------


def instance_from_dict(doc: Any) -> HcppInstance:
    if not isinstance(doc, dict):
        raise InputError("instance: top level must be an object")
    for key in ("vertices", "edges"):
        if not isinstance(doc.get(key), list):
            raise InputError(f"instance: field {key!r} must be a list")
    vertices = doc["vertices"]
    for i, v in enumerate(vertices):
        if not isinstance(v, str):
            raise InputError(f"vertices[{i}]: vertex ids must be strings, got {v!r}")
    if len(set(vertices)) != len(vertices):
        raise InputError("vertices: duplicate vertex id")
    declared = set(vertices)

    weights: dict = {}
    class_of: dict = {}
    for i, e in enumerate(doc["edges"]):
        where = f"edges[{i}]"
        if not isinstance(e, dict):
            raise InputError(f"{where}: expected an object")
        for end in ("u", "v"):
            if end not in e:
                raise InputError(f"{where}: missing field {end!r}")
            if e[end] not in declared:
                raise InputError(f"{where}.{end}: undeclared vertex {e[end]!r}")
        if e["u"] == e["v"]:
            raise InputError(f"{where}: self-loop at {e['u']!r}")
        key = edge_key(e["u"], e["v"])
        if key in weights:
            raise InputError(f"{where}: duplicate edge {key!r}")
        weights[key] = _int_field(e, "w", where, minimum=0)
        class_of[key] = _int_field(e, "class", where, minimum=1)

    used = set(class_of.values())
    k = max(used, default=0)
    gaps = sorted(set(range(1, k + 1)) - used)
    if gaps:
        raise InputError(f"edges: class ids must be contiguous from 1; class {gaps[0]} is unused")

    order = doc.get("order", {"type": "linear"})
    if not isinstance(order, dict) or order.get("type") not in ("linear", "partial"):
        raise InputError("order.type: expected 'linear' or 'partial'")
    relations = None
    if order["type"] == "partial":
        rels = order.get("relations")
        if not isinstance(rels, list):
            raise InputError("order.relations: expected a list of [before, after] pairs")
        relations = []
        for i, r in enumerate(rels):
            if (not isinstance(r, list) or len(r) != 2
                    or any(isinstance(x, bool) or not isinstance(x, int) for x in r)):
                raise InputError(f"order.relations[{i}]: expected [before, after] class ids")
            relations.append(tuple(r))

    graph = WeightedGraph(vertices, weights)
    return HcppInstance.from_class_map(graph, class_of, relations)


def instance_to_dict(inst: HcppInstance) -> dict:
    g = inst.graph
    edges = [{"u": u, "v": v, "w": g.weights[(u, v)], "class": inst.class_of((u, v))} for u, v in g.edges]
    if inst.relations is None:
        order: dict = {"type": "linear"}
    else:
        order = {"type": "partial", "relations": [list(r) for r in sorted(inst.relations)]}
    return {"vertices": sorted(g.vertices), "edges": edges, "order": order}


def parse_instance(text: str) -> HcppInstance:
    return instance_from_dict(_loads(text, "instance"))


def serialize_instance(inst: HcppInstance) -> str:
    return _dumps(instance_to_dict(inst))


def read_instance(path) -> HcppInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


# --- solutions -------------------------------------------------------------------


@dataclass
class SolutionFile:
    walk: list
    weight: int | None
    mode: str
    feasible: bool
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"walk": list(self.walk), "weight": self.weight, "mode": self.mode,
                "feasible": self.feasible, "stats": dict(self.stats)}

    def dumps(self) -> str:
        return _dumps(self.to_dict())

    @classmethod
    def from_solution(cls, sol: HcppSolution, runtime_ms: float | None = None) -> SolutionFile:
        s = sol.stats
        stats = {"k": s.k, "n": s.n, "m": s.m, "c": s.c, "max_weight": s.max_weight,
                 "arc_count": s.arc_count, "subsolver": s.subsolver,
                 "runtime_ms": None if runtime_ms is None else round(runtime_ms, 3)}
        return cls(list(sol.walk.vertices), sol.weight, sol.mode, True, stats)

    @classmethod
    def loads(cls, text: str) -> SolutionFile:
        doc = _loads(text, "solution")
        if not isinstance(doc, dict):
            raise InputError("solution: top level must be an object")
        walk = doc.get("walk")
        if not isinstance(walk, list):
            raise InputError("solution.walk: expected a list of vertex ids")
        weight = doc.get("weight")
        if weight is not None and (isinstance(weight, bool) or not isinstance(weight, int)):
            raise InputError(f"solution.weight: expected an integer, got {weight!r}")
        feasible = doc.get("feasible")
        if not isinstance(feasible, bool):
            raise InputError("solution.feasible: expected true or false")
        stats = doc.get("stats", {})
        if not isinstance(stats, dict):
            raise InputError("solution.stats: expected an object")
        return cls(walk, weight, str(doc.get("mode", "")), feasible, stats)


@dataclass(frozen=True)
class SolutionCheck:
    accepted: bool
    reason: str = ""


def check_solution(inst: HcppInstance, sol: SolutionFile) -> SolutionCheck:
    """Recompute the walk's weight and feasibility and compare with the file."""
    if not sol.feasible:
        return SolutionCheck(False, "solution is marked infeasible")
    if not sol.walk:
        return SolutionCheck(False, "walk is empty")
    walk = Walk(sol.walk)
    g = inst.graph
    for u, v in walk.edges():
        if not g.has_edge(u, v):
            return SolutionCheck(False, f"walk step {u!r} -> {v!r} is not an edge")
    actual = walk.weight(g)
    if actual != sol.weight:
        return SolutionCheck(False, f"weight field {sol.weight} differs from walk weight {actual}")
    verdict = validate_walk(inst, walk)
    if not verdict.accepted:
        return SolutionCheck(False, verdict.reason)
    return SolutionCheck(True)
