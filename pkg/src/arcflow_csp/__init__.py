"""Exact arc-flow solver for the cutting stock problem with binary patterns."""

from .arcflow import (GraphStats, build_graph, compress_final, enumerate_paths, export_dot,
                      graph_stats)
from .colgen import ColgenResult, solve_root
from .graph import Arc, ArcFlowGraph
from .instance import (Instance, InstanceError, Item, Rng, bar_relaxation, generate_class,
                       parse_instance, serialize_instance)
from .knapsack import dp_graph, knapsack_max, knapsack_pattern
from .lp import Column, LinearProgram, LpSolution, add_column, solve_lp
from .milp import MilpSolution, PatternSolution, build_model, decompose_flow, export_lp_file, solve

__version__ = "0.1.0"
