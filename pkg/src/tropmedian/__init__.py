"""Exact asymmetric tropical Fermat-Weber sets and tropical median consensus trees."""

from .consensus import ConsensusResult, check_membership, tropical_median, verify_regularity
from .fw import Polytrope, contains, dimension, fw_point, fw_polytrope, staircase, tropical_vertices
from .rational import format_rational, to_rational
from .transport import TransportPlan, northwest_corner, recover_primal, solve_transportation
from .trees import (
    PhyloTree,
    Ultrametric,
    check_pareto,
    emit_newick,
    is_ultrametric,
    parse_newick,
    pointwise_max_consensus,
    rooted_triplets,
    tree_to_ultrametric,
    ultrametric_to_tree,
)
from .tropical import Covector, covector_of, d_asym, d_sym, evenly_splits, normalize

__all__ = [
    "ConsensusResult", "Covector", "PhyloTree", "Polytrope", "TransportPlan", "Ultrametric",
    "check_membership", "check_pareto", "contains", "covector_of", "d_asym", "d_sym", "dimension",
    "emit_newick", "evenly_splits", "format_rational", "fw_point", "fw_polytrope", "is_ultrametric",
    "normalize", "northwest_corner", "parse_newick", "pointwise_max_consensus", "recover_primal",
    "rooted_triplets", "solve_transportation", "staircase", "to_rational", "tree_to_ultrametric",
    "tropical_median", "tropical_vertices", "ultrametric_to_tree", "verify_regularity",
]
