"""0-1 knapsack dynamic programming and the plain DP search graph."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .graph import ArcFlowGraph
from .instance import Instance

TIE_TOL = 1e-12


def knapsack_table(weights: Sequence[int], values: Sequence[float], W: int) -> np.ndarray:
    """Full ``(m+1) x (W+1)`` table; ``dp[i, p]`` is the best profit of items 1..i within ``p``."""
    m = len(weights)
    dp = np.zeros((m + 1, W + 1))
    for i in range(1, m + 1):
        w, v = weights[i - 1], values[i - 1]
        dp[i] = dp[i - 1]
        if w <= W:
            dp[i, w:] = np.maximum(dp[i - 1, w:], dp[i - 1, : W + 1 - w] + v)
    return dp


def knapsack_max(weights: Sequence[int], values: Sequence[float], W: int) -> float:
    if len(weights) != len(values):
        raise ValueError("weights and values differ in length")
    dp = knapsack_table(weights, values, W)
    return float(dp[-1].max())


def knapsack_pattern(weights: Sequence[int], values: Sequence[float], W: int) -> tuple[float, list[int]]:
    """Best profit and a binary pattern attaining it.

    On ties the item is left out, which keeps priced columns sparse.
    """
    if len(weights) != len(values):
        raise ValueError("weights and values differ in length")
    m = len(weights)
    dp = knapsack_table(weights, values, W)
    p = int(np.argmax(dp[m]))
    profit = float(dp[m, p])
    pattern = [0] * m
    for i in range(m, 0, -1):
        if abs(dp[i, p] - dp[i - 1, p]) <= TIE_TOL:
            continue
        pattern[i - 1] = 1
        p -= weights[i - 1]
    return profit, pattern


def dp_graph(inst: Instance) -> ArcFlowGraph:
    """State graph of the knapsack DP over the instance's items.

    Nodes are reachable states ``(p, level)``; from each state one arc skips
    the next item (loss) and one takes it when it fits. Every state of the
    last level collapses into the sink. Items are visited in the same
    decreasing-width order used by the arc-flow builder.
    """
    items = inst.sorted_items()
    m, W = len(items), inst.capacity
    target = (W, m + 1)
    widths = (0, *[it.width for it in items])
    original = (-1, *[it.original_index for it in items])
    source = (0, 0)
    if m == 0:
        return ArcFlowGraph.from_arcs([(source, target, 0)], source, target, W, widths, original)

    def node(p, level):
        return target if level == m else (p, level)

    arcs = []
    frontier = {0}
    for level in range(m):
        w = items[level].width
        nxt = set()
        for p in sorted(frontier):
            arcs.append((node(p, level), node(p, level + 1), 0))
            nxt.add(p)
            if p + w <= W:
                arcs.append((node(p, level), node(p + w, level + 1), level + 1))
                nxt.add(p + w)
        frontier = nxt
    return ArcFlowGraph.from_arcs(arcs, source, target, W, widths, original)
