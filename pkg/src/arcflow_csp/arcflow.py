"""Compressed arc-flow graph construction.

:func:`build_graph` builds the main-compression graph directly by a
memoized recursion over states ``(x, i)`` (space used, next item). Each
state returns the label ``(a, b)`` of the node that represents it: every
sub-pattern reaching that node uses at most ``a`` space and its remaining
items all have index ``>= b``. States with equal labels share a node.

:func:`compress_final` relabels every node by the longest path from the
source and the highest item index seen on the way, merging nodes whose
labels coincide.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Arc, ArcFlowGraph, GraphError, Label
from .instance import Instance
from .knapsack import dp_graph


def build_graph(inst: Instance) -> ArcFlowGraph:
    items = inst.sorted_items()
    m, W = len(items), inst.capacity
    w = (0, *[it.width for it in items])
    original = (-1, *[it.original_index for it in items])
    target = (W, m + 1)
    if m == 0:
        source = (0, 0)
        return ArcFlowGraph.from_arcs([(source, target, 0)], source, target, W, w, original)

    memo: dict[tuple[int, int], Label] = {}
    nodes: set[Label] = set()
    arcs: set[tuple[Label, Label, int]] = set()

    def build(x: int, i: int) -> Label:
        if i > m:
            return target
        if (x, i) in memo:
            return memo[(x, i)]
        u = target
        up = None
        if i < m:  # option 1: skip item i
            up = build(x, i + 1)
            u = up
        if x + w[i] <= W:  # option 2: use item i
            v = build(x + w[i], i + 1)
            u = (min(u[0], v[0] - w[i]), i)
            arcs.add((u, v, i))
            nodes.update((u, v))
            if i < m and u != up:
                arcs.add((u, up, 0))
                nodes.add(up)
        memo[(x, i)] = u
        return u

    source = build(0, 1)
    nodes.add(target)
    for u in nodes:
        if u != source and u != target:
            arcs.add((u, target, 0))
    # with a single item the source has no loss arc; keep the empty pattern reachable
    if not any(t == source and it == 0 for t, _, it in arcs):
        arcs.add((source, target, 0))
    return ArcFlowGraph.from_arcs(arcs, source, target, W, w, original, extra_nodes=nodes)


def compress_final(g: ArcFlowGraph) -> ArcFlowGraph:
    """Relabel by (longest path from source, highest item index so far) and merge."""
    order = g.topological_order()
    incoming = g.in_arcs()
    source = (0, 0)
    target = (g.capacity, g.n_items + 1)
    label: dict[Label, Label] = {g.source: source}
    for v in order:
        if v == g.source:
            continue
        preds = [a for a in incoming.get(v, ()) if a.tail in label]
        if not preds:
            continue  # unreachable from the source
        if v == g.target:
            label[v] = target
            continue
        phi = max(label[a.tail][0] + g.item_widths[a.item] for a in preds)
        psi = max(max(label[a.tail][1], a.item) for a in preds)
        if (phi, psi) == target:
            raise GraphError(f"node {v} relabeled onto the target")
        label[v] = (phi, psi)
    if g.target not in label:
        raise GraphError("target not reachable from source")
    arcs = set()
    for a in g.arcs:
        if a.tail not in label:
            continue
        tail, head = label[a.tail], label[a.head]
        if tail != head:
            arcs.add((tail, head, a.item))
    return ArcFlowGraph.from_arcs(arcs, source, target, g.capacity, g.item_widths, g.item_original)


class PathLimitExceeded(RuntimeError):
    pass


def count_paths(g: ArcFlowGraph) -> int:
    out = g.out_arcs()
    paths = {g.target: 1}
    for v in reversed(g.topological_order()):
        if v != g.target:
            paths[v] = sum(paths[a.head] for a in out.get(v, ()))
    return paths[g.source]


def enumerate_paths(g: ArcFlowGraph, limit: int = 1_000_000) -> set[frozenset[int]]:
    """Patterns (sets of original item indices) of all source-target paths."""
    n = count_paths(g)
    if n > limit:
        raise PathLimitExceeded(f"{n} paths exceed the limit of {limit}")
    out = g.out_arcs()
    patterns = set()
    stack = [(g.source, frozenset())]
    while stack:
        v, pat = stack.pop()
        if v == g.target:
            patterns.add(pat)
            continue
        for a in out.get(v, ()):
            stack.append((a.head, pat | {g.item_original[a.item]} if a.item else pat))
    return patterns


@dataclass(frozen=True)
class GraphStats:
    n_vertices: int
    n_arcs: int
    ratio_v: float
    ratio_a: float


def graph_stats(g: ArcFlowGraph, inst: Instance) -> GraphStats:
    ref = dp_graph(inst)
    return GraphStats(g.n_vertices, g.n_arcs,
                      g.n_vertices / ref.n_vertices, g.n_arcs / ref.n_arcs)


def export_dot(g: ArcFlowGraph, name: str = "arcflow") -> str:
    ids = {v: f"n{k}" for k, v in enumerate(g.nodes)}
    lines = [f"digraph {name} {{"]
    for v in g.nodes:
        attrs = f'label="({v[0]},{v[1]})"'
        if v == g.source or v == g.target:
            attrs += ", shape=doublecircle"
        lines.append(f"  {ids[v]} [{attrs}];")
    for a in g.arcs:
        if a.item == 0:
            lines.append(f"  {ids[a.tail]} -> {ids[a.head]} [style=dashed];")
        else:
            lines.append(f'  {ids[a.tail]} -> {ids[a.head]} [label="{a.item}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
