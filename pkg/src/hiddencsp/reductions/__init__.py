"""Hardness gadgets: each constructor returns a ReductionOutput whose
witness maps can be checked by brute force on small sources."""
from .base import Cnf, EquivalenceReport, Graph, ReductionOutput, check_equivalence
from .graph_gadgets import PROPERTIES, graph_property_gadget
from .monsat import BlockFamily, block_family, is_minimal_empty_family, lineq_unary_type, monsat_encode
from .promise import (
    hamdigraph_to_groupeq,
    select_distinct_subconstraints,
    threesat_to_rf_union_2sat,
    union_2col_rf_transform,
)
from .unions import (
    coloring_to_hyperplane_noncover,
    derangement_union,
    eq_class_hardness,
    is_prime,
    threecol_to_union_ug,
    threesat_to_union_delta,
)

REDUCTIONS = PROPERTIES + (
    "3sat-delta", "3col-ug", "eq-clique", "eq-hamc", "col-hyp",
    "monsat", "rf-2sat", "rf-2col", "groupeq",
)

__all__ = [
    "Cnf", "EquivalenceReport", "Graph", "ReductionOutput", "check_equivalence",
    "PROPERTIES", "REDUCTIONS", "graph_property_gadget",
    "BlockFamily", "block_family", "is_minimal_empty_family", "lineq_unary_type", "monsat_encode",
    "hamdigraph_to_groupeq", "select_distinct_subconstraints", "threesat_to_rf_union_2sat",
    "union_2col_rf_transform",
    "coloring_to_hyperplane_noncover", "derangement_union", "eq_class_hardness", "is_prime",
    "threecol_to_union_ug", "threesat_to_union_delta",
]
