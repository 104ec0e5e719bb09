"""Exact picker routing on block-layout warehouses, with tools to check which
double traversals an optimal tour can do without."""
from .brute import Filter, filtered_optimum, passes_filter, solve_exhaustive
from .configs import SubaisleConfig, candidate_configs, classify_double_edge, \
    config_multiplicities, double_edge_state
from .dp import DPState, Mode, accepting, solve_dp, transition
from .exceptions import (
    BudgetExceeded,
    Case1Inapplicable,
    ContractViolation,
    Infeasible,
    InstanceFormatError,
    PickRouteError,
    RewriteGuardTripped,
    StateGuardExceeded,
    StructuralError,
)
from .layout import Cell, HorizontalUnit, Intersection, PickInstance, VerticalUnit, \
    WarehouseLayout, instance_from_dict, load_instance, make_instance
from .rewrite import eliminate_case1, eliminate_outer_doubles, transform
from .tour import EdgeRun, TourSubgraph, extract_closed_walk, find_edge_runs, is_feasible, \
    tour_length
from .verify import Verdict, check_corollary, check_lemma_states, \
    check_theorem_connecting, check_theorem_outer, run_family

__version__ = "0.1.0"
