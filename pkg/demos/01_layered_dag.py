"""Walk through the layered-DAG solver on a five-vertex, three-class instance.

Run:  python demos/01_layered_dag.py
"""

from pathlib import Path

from hierpostman import best_layer_path, build_layered_dag, layer_vertex_sets, solve_hcppl, validate_walk
from hierpostman.io import read_instance

inst = read_instance(Path(__file__).parent / "data" / "toy.json")
print(f"{len(inst.graph.vertices)} vertices, {len(inst.graph.edges)} edges, {inst.k} classes")
for cid, cls in enumerate(inst.classes, start=1):
    print(f"  class {cid}: " + ", ".join(f"{u}-{v} ({inst.graph.weight(u, v)})" for u, v in sorted(cls)))

# Each layer holds the vertices where a walk may stand between two classes.
print("\nlayers:")
for i, layer in enumerate(layer_vertex_sets(inst), start=1):
    print(f"  V{i} = {{{', '.join(sorted(layer))}}}")

# Every arc is an s-t rural postman sub-problem for one class.
dag = build_layered_dag(inst, "exact_connected")
print("\narcs (class, from, to) -> weight:")
for key, w in sorted(dag.arc_weights().items()):
    print(f"  {key} -> {w}")

path = best_layer_path(dag)
print(f"\ncheapest layer path: {' -> '.join(path.vertices)}  (weight {path.weight})")

sol = solve_hcppl(inst, "exact_connected")
print(f"tour: {' '.join(sol.walk.vertices)}  weight {sol.weight}")
print(f"validator: {validate_walk(inst, sol.walk)}")
