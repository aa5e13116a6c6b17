"""3-SAT to HCPP gadget with one incomparable class.

Every variable ``x_i`` occurring in ``ρ(i)`` clauses gets ``6ρ(i)`` paths
``t_i^ℓ - z_i^ℓ - f_i^ℓ`` (one class each, chained lexicographically) wrapped
in a cycle ``X_i``. Consecutive variable cycles are linked by 4-cycles
``Y_{i,i'}``, and each literal occurrence attaches a 6-cycle through the
clause vertices ``c_j^1, c_j^2``. All those cycles form class ``E_0``, which
precedes the chain. The star of paths ``c_j^1 - c* - c_j^2`` is a class
incomparable to everything. All weights are one.

A satisfying assignment yields a *tight* tour of weight ``|E| + b/2`` where
``b`` is the number of odd-degree vertices; :func:`build_tight_tour` builds
it. Deciding tightness in general is as hard as SAT and is not attempted.

Vertex ids: ``t{i}_{l}``, ``z{i}_{l}``, ``f{i}_{l}``, ``c{j}_1``,
``c{j}_2``, ``a{i}_{j}``, ``b{i}_{j}`` and ``c*``.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import InputError, PreconditionError
from .graph import Walk, WeightedGraph, connected_components, edge_key, euler_walk, odd_vertices
from .hcpp import HcppInstance

STAR = "c*"
# |V|, |E| and the class count are each at most this multiple of n + m
SIZE_CONSTANT = 92


def t_(i, l):
    return f"t{i}_{l}"


def z_(i, l):
    return f"z{i}_{l}"


def f_(i, l):
    return f"f{i}_{l}"


def c1_(j):
    return f"c{j}_1"


def c2_(j):
    return f"c{j}_2"


# --- formulas ------------------------------------------------------------------


@dataclass(frozen=True)
class CnfFormula:
    """CNF over variables ``1..n_vars``; literals are signed variable indices."""

    n_vars: int
    clauses: tuple

    def __post_init__(self):
        clauses = tuple(tuple(int(x) for x in c) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        for j, c in enumerate(clauses, start=1):
            if not c:
                raise InputError(f"clause {j} is empty")
            if len(c) > 3:
                raise InputError(f"clause {j} has {len(c)} literals; at most 3 are allowed")
            for lit in c:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise InputError(f"clause {j} has literal {lit} outside variables 1..{self.n_vars}")

    @property
    def m(self) -> int:
        return len(self.clauses)

    def preprocess(self) -> CnfFormula:
        """Drop clauses containing both ``x`` and ``¬x`` and repeated literals."""
        out = []
        for c in self.clauses:
            if any(-lit in c for lit in c):
                continue
            out.append(tuple(dict.fromkeys(c)))
        return CnfFormula(self.n_vars, tuple(out))

    def occurrences(self) -> list[int]:
        """``ρ(i)``: number of clauses mentioning variable ``i`` (index ``i - 1``)."""
        rho = [0] * self.n_vars
        for c in self.clauses:
            for v in {abs(lit) for lit in c}:
                rho[v - 1] += 1
        return rho

    def compact(self) -> tuple[CnfFormula, dict]:
        """Renumber away unused variables; returns the formula and old-to-new map."""
        used = sorted({abs(lit) for c in self.clauses for lit in c})
        ren = {v: i for i, v in enumerate(used, start=1)}
        clauses = tuple(tuple((1 if lit > 0 else -1) * ren[abs(lit)] for lit in c) for c in self.clauses)
        return CnfFormula(len(used), clauses), ren

    def satisfied_by(self, assignment) -> bool:
        vals = _as_values(assignment, self.n_vars)
        return all(any(vals[abs(lit) - 1] == (lit > 0) for lit in c) for c in self.clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n_vars} {self.m}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def _as_values(assignment, n: int) -> tuple:
    if isinstance(assignment, Mapping):
        try:
            return tuple(bool(assignment[i]) for i in range(1, n + 1))
        except KeyError as exc:
            raise InputError(f"assignment lacks variable {exc.args[0]}") from None
    vals = tuple(bool(x) for x in assignment)
    if len(vals) != n:
        raise InputError(f"assignment has {len(vals)} values for {n} variables")
    return vals


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF: ``p cnf n m`` header, zero-terminated clauses, ``c`` comments."""
    n_vars = n_clauses = None
    clauses: list = []
    cur: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InputError(f"line {lineno}: malformed problem line {line!r}")
            try:
                n_vars, n_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise InputError(f"line {lineno}: malformed problem line {line!r}") from None
            continue
        if n_vars is None:
            raise InputError(f"line {lineno}: clause before the 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise InputError(f"line {lineno}: {tok!r} is not an integer literal") from None
            if lit == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(lit)
    if n_vars is None:
        raise InputError("missing 'p cnf' header")
    if cur:
        clauses.append(tuple(cur))
    if n_clauses is not None and n_clauses != len(clauses):
        raise InputError(f"header announces {n_clauses} clauses, found {len(clauses)}")
    return CnfFormula(n_vars, tuple(clauses))


def brute_force_sat(formula: CnfFormula) -> tuple | None:
    """First satisfying assignment in lexicographic order (False before True)."""
    for vals in itertools.product((False, True), repeat=formula.n_vars):
        if formula.satisfied_by(vals):
            return vals
    return None


# --- construction --------------------------------------------------------------


@dataclass(frozen=True)
class GadgetLayout:
    formula: CnfFormula
    rho: tuple
    occurrences: tuple          # per clause: ((variable, positive, rank), ...)
    e0_class: int
    star_class: int
    path_class: Mapping         # (i, l) -> class id
    e0: frozenset
    star: frozenset
    edges: frozenset
    v_ft: frozenset
    v_c: frozenset
    n_vertices: int
    names: Mapping              # symbolic name -> vertex id

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def b(self) -> int:
        return len(self.v_ft) + len(self.v_c)

    @property
    def k(self) -> int:
        return self.star_class

    @property
    def size(self) -> int:
        return self.n_vertices + self.n_edges + self.k


def build_gadget(formula: CnfFormula) -> tuple[HcppInstance, GadgetLayout]:
    phi = formula.preprocess()
    if not phi.clauses:
        raise InputError("no clauses remain after removing tautologies")
    rho = phi.occurrences()
    for i, r in enumerate(rho, start=1):
        if r == 0:
            raise InputError(f"variable {i} occurs in no clause; drop it (CnfFormula.compact) first")
    n, m = phi.n_vars, phi.m

    edge_class: dict = {}
    names: dict = {STAR: STAR}

    def add(u, v, cid):
        key = edge_key(u, v)
        if key in edge_class:
            raise AssertionError(f"gadget edge {key!r} created twice")
        edge_class[key] = cid

    def cycle(vs, cid):
        for a, b in zip(vs, vs[1:] + vs[:1]):
            add(a, b, cid)

    e0 = 1
    path_class = {}
    cid = 1
    for i in range(1, n + 1):
        for l in range(1, 6 * rho[i - 1] + 1):
            cid += 1
            path_class[(i, l)] = cid
            add(t_(i, l), z_(i, l), cid)
            add(z_(i, l), f_(i, l), cid)
            for sym, fn in (("t", t_), ("z", z_), ("f", f_)):
                names[f"{sym}_{i}^{l}"] = fn(i, l)
    star = cid + 1

    for j in range(1, m + 1):
        add(c1_(j), STAR, star)
        add(STAR, c2_(j), star)
        names[f"c_{j}^1"] = c1_(j)
        names[f"c_{j}^2"] = c2_(j)

    for i in range(1, n + 1):
        L = 6 * rho[i - 1]
        cycle([t_(i, l) for l in range(1, L + 1)] + [f_(i, l) for l in range(L, 0, -1)], e0)
    for i in range(1, n + 1):
        i2 = i % n + 1
        L = 6 * rho[i - 1]
        cycle([t_(i, L), f_(i2, 1), f_(i, L), t_(i2, 1)], e0)

    occurrences = []
    seen_rank = [0] * n
    for j, clause in enumerate(phi.clauses, start=1):
        occ = []
        for lit in clause:
            i = abs(lit)
            seen_rank[i - 1] += 1
            l = seen_rank[i - 1]
            side = t_ if lit > 0 else f_
            a, b = f"a{i}_{j}", f"b{i}_{j}"
            names[f"a_{i}{j}"] = a
            names[f"b_{i}{j}"] = b
            cycle([side(i, 6 * l - 3), c1_(j), a, c2_(j), side(i, 6 * l - 2), b], e0)
            occ.append((i, lit > 0, l))
        occurrences.append(tuple(occ))

    graph = WeightedGraph.from_edges((u, v, 1) for u, v in edge_class)
    k = star
    buckets = [set() for _ in range(k)]
    for e, c in edge_class.items():
        buckets[c - 1].add(e)
    chain = [path_class[key] for key in sorted(path_class)]
    relations = [(e0, chain[0])] + list(zip(chain, chain[1:]))
    inst = HcppInstance(graph, tuple(buckets), frozenset(relations))

    v_ft = frozenset(fn(i, l) for i in range(1, n + 1) for l in range(1, 6 * rho[i - 1] + 1) for fn in (t_, f_))
    v_c = frozenset(x for j in range(1, m + 1) for x in (c1_(j), c2_(j)))
    layout = GadgetLayout(
        formula=phi,
        rho=tuple(rho),
        occurrences=tuple(occurrences),
        e0_class=e0,
        star_class=star,
        path_class=path_class,
        e0=frozenset(buckets[e0 - 1]),
        star=frozenset(buckets[star - 1]),
        edges=frozenset(edge_class),
        v_ft=v_ft,
        v_c=v_c,
        n_vertices=len(graph.vertices),
        names=names,
    )
    return inst, layout


# --- structural checks -----------------------------------------------------------


@dataclass(frozen=True)
class GadgetReport:
    e0_eulerian: bool
    imbalanced_match: bool
    size_linear: bool
    b: int
    messages: tuple

    @property
    def ok(self) -> bool:
        return self.e0_eulerian and self.imbalanced_match and self.size_linear


def check_gadget_structure(inst: HcppInstance, layout: GadgetLayout) -> GadgetReport:
    """Verify that ``E_0`` is Eulerian, that the odd-degree vertices are exactly
    the ``t``/``f``/clause vertices, and that the size is linear in ``n + m``."""
    msgs = []
    g = inst.graph
    e0 = inst.classes[layout.e0_class - 1]
    e0_count = Counter(dict.fromkeys(e0, 1))
    comps = connected_components(g, e0)
    odd0 = sorted(odd_vertices(e0_count))
    eulerian = len(comps) == 1 and not odd0
    if len(comps) != 1:
        msgs.append(f"E0 has {len(comps)} components; {sorted(comps[1])[0]!r} is cut off")
    if odd0:
        msgs.append(f"E0 has odd degree at {odd0[0]!r}")

    odd = odd_vertices(Counter(dict.fromkeys(g.edges, 1)))
    expected = layout.v_ft | layout.v_c
    match = odd == expected
    if not match:
        diff = sorted(odd ^ expected)
        msgs.append(f"imbalanced vertex set differs at {diff[0]!r}")

    nm = layout.formula.n_vars + layout.formula.m
    counts = {"vertices": len(g.vertices), "edges": len(g.edges), "classes": inst.k}
    size_ok = True
    for what, cnt in counts.items():
        if cnt > SIZE_CONSTANT * nm:
            size_ok = False
            msgs.append(f"{cnt} {what} exceed {SIZE_CONSTANT}(n+m) = {SIZE_CONSTANT * nm}")
    return GadgetReport(eulerian, match, size_ok, len(odd), tuple(msgs))


def tight_bound(layout: GadgetLayout) -> int:
    """``|E| + b/2``."""
    if layout.b % 2:
        raise PreconditionError(f"odd number of imbalanced vertices: {layout.b}")
    return layout.n_edges + layout.b // 2


# --- tight tours -----------------------------------------------------------------


def build_tight_tour(layout: GadgetLayout, assignment) -> Walk:
    """Closed walk of weight ``|E| + b/2`` for a satisfying assignment.

    The tour runs an Euler tour of ``E_0`` first, then zig-zags through each
    variable's paths on the side opposite to its truth value, detouring
    through ``c*`` the first time a clause's literal is true, and hops to the
    next variable over the linking 4-cycle.
    """
    phi = layout.formula
    vals = _as_values(assignment, phi.n_vars)
    if not phi.satisfied_by(vals):
        raise PreconditionError("assignment does not satisfy the formula")
    adj = layout.edges
    clause_at = {}
    for j, occ in enumerate(layout.occurrences, start=1):
        for i, positive, rank in occ:
            clause_at[(i, rank)] = (j, positive)

    def side(name, i, l):
        return t_(i, l) if name == "t" else f_(i, l)

    start = side("f" if vals[0] else "t", 1, 1)
    seq = list(euler_walk(Counter(dict.fromkeys(layout.e0, 1)), start, start).vertices)

    def go(v):
        if edge_key(seq[-1], v) not in adj:
            raise AssertionError(f"tour step {seq[-1]!r} -> {v!r} is not an edge")
        seq.append(v)

    done: set = set()
    for i in range(1, phi.n_vars + 1):
        near, far = ("f", "t") if vals[i - 1] else ("t", "f")
        L = 6 * layout.rho[i - 1]
        if i > 1:
            go(side(near, i, 1))
        for l in range(1, L + 1):
            here = far if l % 2 else near
            go(z_(i, l))
            go(side(here, i, l))
            if l == L:
                break
            if l % 6 == 3:
                j, positive = clause_at[(i, (l + 3) // 6)]
                if positive == vals[i - 1] and j not in done:
                    go(c1_(j))
                    go(STAR)
                    go(c2_(j))
                    done.add(j)
            go(side(here, i, l + 1))
    go(start)
    return Walk(seq)


@dataclass(frozen=True)
class SecondVisitProfile:
    extra: Counter
    is_matching: bool
    covers_imbalanced: bool
    within_e0: bool
    touches_vft: bool


def second_visit_profile(layout: GadgetLayout, walk: Walk) -> SecondVisitProfile:
    """Edges traversed beyond once, and whether they form a perfect matching
    on the imbalanced vertices inside ``E_0``."""
    extra = walk.edge_counts() - Counter(dict.fromkeys(layout.edges, 1))
    ends = Counter()
    for (u, v), k in extra.items():
        ends[u] += k
        ends[v] += k
    is_matching = all(k == 1 for k in extra.values()) and all(c == 1 for c in ends.values())
    return SecondVisitProfile(
        extra=extra,
        is_matching=is_matching,
        covers_imbalanced=set(ends) == set(layout.v_ft | layout.v_c),
        within_e0=all(e in layout.e0 for e in extra),
        touches_vft=all(u in layout.v_ft or v in layout.v_ft for u, v in extra),
    )
