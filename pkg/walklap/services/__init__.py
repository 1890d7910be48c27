"""Computational services."""

from walklap.services.diffusion import (
    chain_step,
    diffuse,
    exploration_history,
    markov_chain,
    spectral_gap,
)
from walklap.services.graph_core import (
    all_pairs_distances,
    bfs_distances,
    largest_component,
    load_graph,
    load_graph_file,
    resolve_dataset,
)
from walklap.services.operators import (
    LaplacianOperator,
    build_operator,
    btdw_transformed_apply,
    deformed_laplacian,
    k_path_transformed_build,
    k_walk_apply,
    laplacian_diagonal,
    materialize,
    parse_family,
    standard_apply,
    walk_transformed_apply,
)
from walklap.services.return_probability import (
    exact_return_probability,
    xnystrace_core,
    xnystrace_exp,
)
from walklap.services.spectral import (
    dense_spectrum,
    spectral_radius_adjacency,
    spectral_radius_Z,
)
from walklap.services.walk_calculus import (
    brute_force_walk_weight,
    btdw_counts,
    walk_count_apply,
    z_apply,
    z_operator,
)

__all__ = [
    "LaplacianOperator",
    "all_pairs_distances",
    "bfs_distances",
    "brute_force_walk_weight",
    "btdw_counts",
    "btdw_transformed_apply",
    "build_operator",
    "chain_step",
    "deformed_laplacian",
    "dense_spectrum",
    "diffuse",
    "exact_return_probability",
    "exploration_history",
    "k_path_transformed_build",
    "k_walk_apply",
    "largest_component",
    "laplacian_diagonal",
    "load_graph",
    "load_graph_file",
    "markov_chain",
    "materialize",
    "parse_family",
    "resolve_dataset",
    "spectral_gap",
    "spectral_radius_Z",
    "spectral_radius_adjacency",
    "standard_apply",
    "walk_count_apply",
    "walk_transformed_apply",
    "xnystrace_core",
    "xnystrace_exp",
    "z_apply",
    "z_operator",
]
