"""Build the hardness gadget for a small CNF formula and walk its tight tour.

Run:  python demos/04_gadget.py [file.cnf]
"""

import sys
from pathlib import Path

from hierpostman import (
    brute_force_sat,
    build_gadget,
    build_tight_tour,
    check_gadget_structure,
    parse_dimacs,
    second_visit_profile,
    tight_bound,
    validate_walk,
)

path = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent / "data" / "two_clause.cnf"
phi = parse_dimacs(path.read_text())
print(f"formula: {phi.clauses} over {phi.n_vars} variables")

inst, lay = build_gadget(phi)
print(f"gadget: {lay.n_vertices} vertices, {lay.n_edges} unit edges, {inst.k} classes")
report = check_gadget_structure(inst, lay)
print(f"structure check: {'ok' if report.ok else report.messages}")
print(f"imbalanced vertices b = {lay.b}, so a satisfying tour costs at most {tight_bound(lay)}")

vals = brute_force_sat(phi)
if vals is None:
    print("unsatisfiable: no tight tour to show")
    sys.exit(0)
print(f"satisfying assignment: {vals}")
walk = build_tight_tour(lay, vals)
print(f"tour from {walk.start}: {len(walk.vertices) - 1} steps, weight {walk.weight(inst.graph)}")
print(f"validator: {validate_walk(inst, walk)}")
prof = second_visit_profile(lay, walk)
print(f"repeated edges: {sum(prof.extra.values())}, perfect matching on imbalanced vertices: "
      f"{prof.is_matching and prof.covers_imbalanced}")
