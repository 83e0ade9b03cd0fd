"""Simulated massively parallel computation with space/round accounting."""

from .cluster import Cluster, ClusterConfig, Machine, RoundTrace, run_program, word_count
from .compress import bipartition_sets, compress_bipartite, compress_connectivity, mst_compress
from .algorithms import (
    DivisionLayout,
    GraphLayout,
    cluster_for_graph,
    graph_words,
    mpc_bipartition,
    mpc_connected_components,
    mpc_diameter,
    mpc_mst,
    mpc_r_division,
    mpc_spanner_shortcuts,
    mpc_st_path,
)

__all__ = [
    "Cluster",
    "ClusterConfig",
    "Machine",
    "RoundTrace",
    "run_program",
    "word_count",
    "compress_connectivity",
    "compress_bipartite",
    "bipartition_sets",
    "mst_compress",
    "cluster_for_graph",
    "graph_words",
    "mpc_r_division",
    "mpc_connected_components",
    "mpc_bipartition",
    "mpc_mst",
    "mpc_spanner_shortcuts",
    "mpc_st_path",
    "mpc_diameter",
    "DivisionLayout",
    "GraphLayout",
]
