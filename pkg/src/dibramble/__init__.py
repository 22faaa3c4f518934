"""Constructive extraction of low-congestion brambles from path systems in digraphs."""
from .bowtie import bowtie, congestion_bound
from .bramble import Bramble, BrambleReport, bramble_order, make_bramble, order_bounds, verify_bramble
from .combinatorics import (BranchDecomposition, UGraph, degeneracy, extract_min_degree_core,
                            find_clique_minor, independent_transversal, intersection_graph,
                            largest_clique_minor, maximal_matching, partition_bipartite)
from .digraph import Digraph, Walk, congestion, is_strongly_connected, occurrences, overlap, parse_graph
from .errors import (BrambleError, BudgetExhausted, ConstructionGap, GraphFormatError, InvariantBreach,
                     NoTransversal, PreconditionUnmet)
from .generators import bridge_gadget, gen_cylindrical_grid, gen_grid_path_system
from .linkage import Linkage, PathSystem, find_disjoint_paths, is_well_linked, validate_path_system
from .pipeline import (PairClassification, PipelineParams, case_analysis, classify_pairs, compute_params,
                       params_for_system, run_pipeline, schedule_checks)
from .scenarios import dense_scenario, sparse_scenario, sparse_wrapped
from .threaded import (AnchoredWalkFamily, ThreadedLinkage, build_threaded_linkage, check_threaded_linkage,
                       refine_threaded_linkage)

__version__ = "0.1.0"

__all__ = [
    "AnchoredWalkFamily",
    "Bramble",
    "BrambleError",
    "BrambleReport",
    "BranchDecomposition",
    "BudgetExhausted",
    "ConstructionGap",
    "Digraph",
    "GraphFormatError",
    "InvariantBreach",
    "Linkage",
    "NoTransversal",
    "PairClassification",
    "PathSystem",
    "PipelineParams",
    "PreconditionUnmet",
    "ThreadedLinkage",
    "UGraph",
    "Walk",
    "bowtie",
    "bramble_order",
    "bridge_gadget",
    "build_threaded_linkage",
    "case_analysis",
    "check_threaded_linkage",
    "classify_pairs",
    "compute_params",
    "congestion",
    "congestion_bound",
    "degeneracy",
    "dense_scenario",
    "extract_min_degree_core",
    "find_clique_minor",
    "find_disjoint_paths",
    "gen_cylindrical_grid",
    "gen_grid_path_system",
    "independent_transversal",
    "intersection_graph",
    "is_strongly_connected",
    "is_well_linked",
    "largest_clique_minor",
    "make_bramble",
    "maximal_matching",
    "occurrences",
    "order_bounds",
    "overlap",
    "params_for_system",
    "parse_graph",
    "partition_bipartite",
    "refine_threaded_linkage",
    "run_pipeline",
    "schedule_checks",
    "sparse_scenario",
    "sparse_wrapped",
    "validate_path_system",
    "verify_bramble",
]
