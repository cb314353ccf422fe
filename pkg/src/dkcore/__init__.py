"""Distributed k-core decomposition: protocols, round simulator and oracle."""
from .engine import BoundReport, RunReport, check_bounds, run_one_to_many, run_one_to_one
from .graph import Graph, gen_chain, gen_random, gen_worst_case, parse_edge_list, read_edge_list
from .hosted import assign_hosts
from .oracle import coreness_exact, stats, verify_locality
from .protocol import compute_index

__all__ = [
    "BoundReport",
    "Graph",
    "RunReport",
    "assign_hosts",
    "check_bounds",
    "compute_index",
    "coreness_exact",
    "gen_chain",
    "gen_random",
    "gen_worst_case",
    "parse_edge_list",
    "read_edge_list",
    "run_one_to_many",
    "run_one_to_one",
    "stats",
    "verify_locality",
]

__version__ = "0.1.0"
