"""Arc-flow graph container shared by the DP graph and the compressed graphs."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from typing import NamedTuple

Label = tuple[int, int]


class GraphError(RuntimeError):
    pass


class Arc(NamedTuple):
    tail: Label
    head: Label
    item: int  # 0 = loss arc


@dataclass(frozen=True)
class ArcFlowGraph:
    """A DAG whose source-to-target paths are cutting patterns.

    ``item_widths[k]`` is the width of arc item ``k`` (``item_widths[0] == 0``)
    and ``item_original[k]`` maps it back to the 0-based index of the item in
    the instance (``-1`` for loss).
    """

    nodes: tuple[Label, ...]
    arcs: tuple[Arc, ...]
    source: Label
    target: Label
    capacity: int
    item_widths: tuple[int, ...]
    item_original: tuple[int, ...]

    @classmethod
    def from_arcs(cls, arcs, source, target, capacity, item_widths, item_original, extra_nodes=()):
        arcs = tuple(sorted(set(Arc(*a) for a in arcs)))
        nodes = {source, target, *extra_nodes}
        for a in arcs:
            nodes.add(a.tail)
            nodes.add(a.head)
        return cls(tuple(sorted(nodes)), arcs, source, target, capacity,
                   tuple(item_widths), tuple(item_original))

    @property
    def n_items(self) -> int:
        return len(self.item_widths) - 1

    @property
    def n_vertices(self) -> int:
        return len(self.nodes)

    @property
    def n_arcs(self) -> int:
        return len(self.arcs)

    def width(self, arc: Arc) -> int:
        return self.item_widths[arc.item]

    def out_arcs(self) -> dict[Label, list[Arc]]:
        adj = defaultdict(list)
        for a in self.arcs:
            adj[a.tail].append(a)
        return adj

    def in_arcs(self) -> dict[Label, list[Arc]]:
        adj = defaultdict(list)
        for a in self.arcs:
            adj[a.head].append(a)
        return adj

    def topological_order(self) -> list[Label]:
        ts = TopologicalSorter({v: () for v in self.nodes})
        for a in self.arcs:
            ts.add(a.head, a.tail)
        try:
            order = list(ts.static_order())
        except CycleError as exc:
            raise GraphError(f"cycle detected: {exc.args[1]}") from None
        return order

    def pattern_of(self, arcs) -> frozenset[int]:
        """Original item indices used along a path."""
        return frozenset(self.item_original[a.item] for a in arcs if a.item != 0)
