"""``hierpostman`` command line.

Exit codes: 0 success, 1 error, 2 infeasible instance, 3 rejected solution.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
import time
from pathlib import Path

from . import io as fileio
from .errors import InfeasibleError, PostmanError, SizeLimitError
from .gadget import build_gadget, parse_dimacs, tight_bound
from .generate import random_hcpp
from .hcpp import class_component_stats, solve_hcppl
from .postman import DEFAULT_ORACLE_LIMIT

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE, EXIT_REJECT = 0, 1, 2, 3
COMPARE_HEADER = ["instance", "n", "m", "k", "c", "approx_weight", "opt_weight", "ratio", "approx_ms", "oracle_ms"]


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


def _default_seed() -> int:
    raw = os.environ.get("POSTMAN_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"error: POSTMAN_SEED must be an integer, got {raw!r}")


def cmd_solve(args) -> int:
    inst = fileio.read_instance(args.instance)
    mode = args.mode.replace("-", "_")
    t0 = time.perf_counter()
    try:
        sol = solve_hcppl(inst, mode, oracle_limit=args.oracle_limit, threads=args.threads)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        _emit(fileio.SolutionFile([], None, mode, False, {"reason": str(exc)}).dumps(), args.out)
        return EXIT_INFEASIBLE
    ms = (time.perf_counter() - t0) * 1000 if args.timing else None
    _emit(fileio.SolutionFile.from_solution(sol, ms).dumps(), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    inst = fileio.read_instance(args.instance)
    sol = fileio.SolutionFile.loads(Path(args.solution).read_text(encoding="utf-8"))
    check = fileio.check_solution(inst, sol)
    if check.accepted:
        print("ACCEPT")
        return EXIT_OK
    print(f"REJECT: {check.reason}")
    return EXIT_REJECT


def cmd_gen_random(args) -> int:
    rng = random.Random(args.seed)
    inst, warnings = random_hcpp(rng, args.n, args.m, args.k, args.max_weight,
                                 components_per_class=args.components_per_class,
                                 max_class_size=args.max_class_size)
    for w in warnings:
        _warn(w)
    _emit(fileio.serialize_instance(inst), args.out)
    return EXIT_OK


def cmd_gen_gadget(args) -> int:
    formula = parse_dimacs(Path(args.cnf).read_text(encoding="utf-8"))
    inst, layout = build_gadget(formula)
    _emit(fileio.serialize_instance(inst), args.out)
    sidecar = args.sidecar or (f"{args.out}.layout.json" if args.out else None)
    if sidecar:
        doc = {
            "names": dict(sorted(layout.names.items())),
            "e0_class": layout.e0_class,
            "star_class": layout.star_class,
            "n_vertices": layout.n_vertices,
            "n_edges": layout.n_edges,
            "b": layout.b,
            "tight_bound": tight_bound(layout),
        }
        Path(sidecar).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return EXIT_OK


def _compare_row(path: str, args) -> list:
    inst = fileio.read_instance(path)
    st = class_component_stats(inst)
    row = [Path(path).name, len(inst.graph.vertices), len(inst.graph.edges), inst.k, st.c]
    t0 = time.perf_counter()
    approx = solve_hcppl(inst, "approx", threads=args.threads)
    t1 = time.perf_counter()
    try:
        opt = solve_hcppl(inst, "exact_oracle", oracle_limit=args.oracle_limit, threads=args.threads)
    except SizeLimitError as exc:
        _warn(f"{path}: {exc}")
        opt = None
    t2 = time.perf_counter()

    def ms(dt):
        return f"{dt * 1000:.3f}" if args.timing else ""

    if opt is None:
        return row + [approx.weight, "", "", ms(t1 - t0), ""]
    ratio = "" if opt.weight == 0 else f"{approx.weight / opt.weight:.6f}"
    return row + [approx.weight, opt.weight, ratio, ms(t1 - t0), ms(t2 - t1)]


def cmd_compare(args) -> int:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COMPARE_HEADER)
    status = EXIT_OK
    for path in args.instances:
        try:
            writer.writerow(_compare_row(path, args))
        except InfeasibleError as exc:
            _warn(f"{path}: infeasible: {exc}")
            status = EXIT_INFEASIBLE
    _emit(buf.getvalue(), args.out)
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hierpostman", description="Hierarchical Chinese Postman tools.")
    sub = p.add_subparsers(dest="command", required=True)

    def threads(sp):
        sp.add_argument("--threads", type=int, default=1, help="worker threads for arc computation")

    def oracle_limit(sp):
        sp.add_argument("--oracle-limit", type=int, default=DEFAULT_ORACLE_LIMIT,
                        help="largest class the exact oracle accepts (default %(default)s)")

    sp = sub.add_parser("solve", help="solve an instance file")
    sp.add_argument("instance")
    sp.add_argument("--mode", default="approx", choices=["approx", "exact-connected", "exact-oracle"])
    sp.add_argument("--out")
    sp.add_argument("--timing", action="store_true", help="record runtime_ms (makes output nondeterministic)")
    threads(sp)
    oracle_limit(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("validate", help="check a solution file against an instance")
    sp.add_argument("instance")
    sp.add_argument("solution")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("gen-random", help="write a random linearly ordered instance")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--max-weight", type=int, default=9)
    sp.add_argument("--seed", type=int, default=None, help="defaults to $POSTMAN_SEED or 0")
    sp.add_argument("--components-per-class", type=int)
    sp.add_argument("--max-class-size", type=int)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gen_random)

    sp = sub.add_parser("gen-gadget", help="build the hardness gadget of a DIMACS CNF formula")
    sp.add_argument("cnf")
    sp.add_argument("--out")
    sp.add_argument("--sidecar", help="layout JSON path (default: <out>.layout.json)")
    sp.set_defaults(func=cmd_gen_gadget)

    sp = sub.add_parser("compare", help="CSV of approximate versus optimal weights")
    sp.add_argument("instances", nargs="+")
    sp.add_argument("--out")
    sp.add_argument("--timing", action="store_true", help="fill the *_ms columns")
    threads(sp)
    oracle_limit(sp)
    sp.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", 0) is None:
        args.seed = _default_seed()
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except (PostmanError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
