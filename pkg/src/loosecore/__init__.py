"""Loose cores of random r-uniform hypergraphs."""

from .analytic import (
    AnalyticParams,
    F_eval,
    bi_tilde_pmf,
    cycle_bound_coeff,
    derived_params,
    po_tilde_pmf,
    solve_fixed_point,
    supercritical_expansion,
    survival_recursion,
    z_pmf,
)
from .cores import (
    CoreResult,
    PeelState,
    core_construct,
    degrees_after_round,
    loose_core_direct,
    loose_core_from_padded,
    padded_core_from_reduced,
    peel_round,
    reduced_core,
    verify_core_construct,
)
from .factor_graph import FactorGraph, LayeredNeighborhood, bfs_layers, build_factor_graph, is_r_plain
from .hypergraph import (
    Hypergraph,
    ModelParams,
    connection_number,
    degree,
    edge_probability,
    kappa_min,
    loose_cycle,
    loose_path,
    sample_hypergraph,
)

__version__ = "0.1.0"
