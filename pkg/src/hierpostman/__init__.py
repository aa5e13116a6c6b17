"""Exact and approximate solvers for the Chinese Postman problem with
precedence-ordered edge classes, plus rural postman building blocks."""

from .errors import InfeasibleError, InputError, PostmanError, PreconditionError, SizeLimitError
from .gadget import (
    CnfFormula,
    GadgetLayout,
    brute_force_sat,
    build_gadget,
    build_tight_tour,
    check_gadget_structure,
    parse_dimacs,
    second_visit_profile,
    tight_bound,
)
from .graph import (
    MetricClosure,
    PathIndex,
    Walk,
    WeightedGraph,
    connected_components,
    edge_key,
    euler_walk,
    metric_closure,
    min_t_join,
    shortest_paths,
    spanning_connector,
)
from .hcpp import (
    HcppInstance,
    HcppSolution,
    LayeredDag,
    LayerPath,
    assemble_walk,
    best_layer_path,
    build_layered_dag,
    check_feasibility,
    class_component_stats,
    layer_vertex_sets,
    solve_hcppl,
    validate_walk,
)
from .matching import min_weight_perfect_matching
from .postman import (
    APPROX_RATIO,
    RppInstance,
    StRppInstance,
    reduce_strpp_to_rpp,
    solve_cpp_exact,
    solve_rpp_oracle,
    solve_strpp_approx,
    solve_strpp_connected_exact,
    solve_strpp_oracle,
)

__version__ = "0.1.0"
