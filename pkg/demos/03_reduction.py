"""Turn an open-path rural postman instance into a closed-tour one and back.

Run:  python demos/03_reduction.py
"""

from hierpostman import StRppInstance, WeightedGraph, reduce_strpp_to_rpp, solve_rpp_oracle, solve_strpp_oracle

g = WeightedGraph("abcde", {("a", "b"): 2, ("b", "c"): 1, ("c", "d"): 3, ("d", "e"): 1,
                            ("a", "e"): 4, ("b", "d"): 2})
inst = StRppInstance(g, frozenset({("a", "b"), ("c", "d")}), "a", "e")
best = solve_strpp_oracle(inst)
print(f"a -> e covering a-b and c-d: {' '.join(best.vertices)}  weight {best.weight(g)}")

rpp, back = reduce_strpp_to_rpp(inst)
tour = solve_rpp_oracle(rpp)
print(f"\nadded edge {back.added_edge} of weight {back.added_weight}")
print(f"closed tour: {' '.join(map(str, tour.vertices))}  weight {tour.weight(rpp.graph)}")
print(f"difference: {tour.weight(rpp.graph) - best.weight(g)} (twice the total graph weight {g.total_weight})")

open_walk = back.to_strpp_walk(tour)
print(f"mapped back: {' '.join(open_walk.vertices)}  weight {open_walk.weight(g)}")
