"""Polynomial-time backends for enriched instances."""
from .graphs import (
    eq_spanning_tree_backend,
    graph_property_backend,
    solve_hidden_graph_property_v,
    spanning_tree_finder,
    spanning_tree_with_forest,
)
from .matching import BipartiteGraph, maximum_matching
from .promise import kweight_rf_backend, onesat_rf_backend, solve_kweight_rf, solve_union_1sat_rf
from .twosat import (
    TWO_SAT_RELATIONS,
    Cnf2,
    binary_csp_to_2sat,
    parse_dimacs,
    solve_2sat,
    solve_ug2,
    solve_union_binary_hidden,
    to_dimacs,
    twosat_backend,
)
