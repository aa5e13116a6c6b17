"""Compare the approximate and exact solvers on seeded random instances.

Run:  python demos/02_approximation.py [count]
"""

import random
import sys
from fractions import Fraction

from hierpostman import APPROX_RATIO, check_feasibility, solve_hcppl
from hierpostman.generate import random_hcpp

count = int(sys.argv[1]) if len(sys.argv) > 1 else 150
rng = random.Random(11)
ratios = []
while len(ratios) < count:
    k = rng.randint(1, 3)
    n = rng.randint(3, min(8, 5 * k + 1))
    m = rng.randint(max(n - 1, k), min(12, 5 * k, n * (n - 1) // 2))
    inst, _ = random_hcpp(rng, n, m, k, components_per_class=rng.choice([None, 1]), max_class_size=5)
    if max(map(len, inst.classes)) > 5 or not check_feasibility(inst):
        continue
    approx = solve_hcppl(inst, "approx")
    opt = solve_hcppl(inst, "exact_oracle")
    ratios.append(Fraction(approx.weight, opt.weight) if opt.weight else Fraction(1))

exact_hits = sum(r == 1 for r in ratios)
print(f"{count} instances: approximation optimal on {exact_hits}")
print(f"worst ratio {float(max(ratios)):.4f}, mean {float(sum(ratios) / len(ratios)):.4f}")
print(f"guaranteed bound {float(APPROX_RATIO):.4f}")
