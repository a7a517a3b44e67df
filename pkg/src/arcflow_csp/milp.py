"""Arc-flow integer model, branch-and-bound, and flow decomposition.

Model over a graph ``G = (V, A)``::

    min z
    s.t. out(v) - in(v) - z = 0      v = source
         out(v) - in(v) + z = 0      v = target
         out(v) - in(v)     = 0      otherwise
         sum of flow on arcs of item k >= b_k
         f >= 0 integer
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import colgen
from .graph import Arc, ArcFlowGraph, GraphError
from .instance import Instance
from .lp import EQ, GE, Column, LinearProgram, LpSolution, Status, solve_lp

INT_TOL = 1e-6


class MilpError(RuntimeError):
    pass


@dataclass(frozen=True)
class MilpModel:
    lp: LinearProgram
    graph: ArcFlowGraph
    demands: tuple[int, ...]  # by original item index
    row_of_node: dict
    z_col: int

    def arc_col(self, k: int) -> int:
        return k


@dataclass
class PatternSolution:
    """Patterns as binary vectors over original item indices, with multiplicities."""

    patterns: list[tuple[tuple[int, ...], int]]
    total_bins: int

    def coverage(self) -> list[int]:
        m = len(self.patterns[0][0]) if self.patterns else 0
        cov = [0] * m
        for pat, mult in self.patterns:
            for k, a in enumerate(pat):
                cov[k] += a * mult
        return cov

    def verify(self, widths: Sequence[int], demands: Sequence[int], capacity: int) -> None:
        """Raise :class:`MilpError` unless this is a valid cutting plan."""
        if sum(mult for _, mult in self.patterns) != self.total_bins:
            raise MilpError("pattern multiplicities do not add up to the bin count")
        for pat, mult in self.patterns:
            if mult <= 0 or any(a not in (0, 1) for a in pat):
                raise MilpError(f"invalid pattern entry {pat} x {mult}")
            if sum(a * w for a, w in zip(pat, widths)) > capacity:
                raise MilpError(f"pattern {pat} exceeds the capacity")
        cov = self.coverage() if self.patterns else [0] * len(demands)
        short = [k for k, (c, b) in enumerate(zip(cov, demands)) if c < b]
        if short:
            raise MilpError(f"demand not covered for items {short}")


@dataclass
class MilpSolution:
    status: str  # optimal | infeasible | limit
    objective: int | None
    flows: np.ndarray  # per arc of the model graph, integral
    lp_bound: float
    best_bound: int
    nodes_explored: int
    patterns: PatternSolution | None = None
    elapsed: float = 0.0
    root_time: float = 0.0


def build_model(g: ArcFlowGraph, demands: Sequence[int]) -> MilpModel:
    m = len(demands)
    if any(b <= 0 for b in demands):
        raise MilpError("demands must be positive")
    row_of_node = {v: r for r, v in enumerate(g.nodes)}
    nv = len(g.nodes)
    columns = []
    for a in g.arcs:
        pairs = [(row_of_node[a.tail], 1.0), (row_of_node[a.head], -1.0)]
        if a.item:
            k = g.item_original[a.item]
            if not 0 <= k < m:
                raise MilpError(f"arc item {a.item} has no demand entry")
            pairs.append((nv + k, 1.0))
        columns.append(Column.from_pairs(pairs))
    columns.append(Column.from_pairs([(row_of_node[g.source], -1.0), (row_of_node[g.target], 1.0)]))
    costs = (0.0,) * len(g.arcs) + (1.0,)
    lp = LinearProgram(
        n_rows=nv + m,
        senses=(EQ,) * nv + (GE,) * m,
        rhs=(0.0,) * nv + tuple(float(b) for b in demands),
        columns=tuple(columns),
        costs=costs,
    )
    return MilpModel(lp, g, tuple(int(b) for b in demands), row_of_node, len(g.arcs))


# ---------------------------------------------------------------------------
# decomposition and heuristics


def _paths(g: ArcFlowGraph, flows: np.ndarray, eps: float):
    """Peel weighted source-target paths off a (possibly fractional) flow."""
    out = {}
    for k, a in enumerate(g.arcs):
        out.setdefault(a.tail, []).append(k)
    f = np.array(flows, dtype=float)
    while True:
        path, v = [], g.source
        while v != g.target:
            ks = [k for k in out.get(v, ()) if f[k] > eps]
            if not ks:
                break
            k = max(ks, key=lambda k: f[k])
            path.append(k)
            v = g.arcs[k].head
        if v != g.target or not path:
            return
        amount = min(f[k] for k in path)
        f[path] -= amount
        yield path, amount


def _pattern_vector(g: ArcFlowGraph, path, m: int) -> tuple[int, ...]:
    vec = [0] * m
    for k in path:
        item = g.arcs[k].item
        if item:
            vec[g.item_original[item]] += 1
    return tuple(vec)


def decompose_flow(g: ArcFlowGraph, flows: Sequence[int], z: int, m: int | None = None) -> PatternSolution:
    """Split an integral source-target flow of value ``z`` into patterns."""
    if m is None:
        m = g.n_items
    f = np.rint(np.asarray(flows, dtype=float)).astype(int)
    if np.any(f < 0):
        raise MilpError("negative flow")
    balance = {v: 0 for v in g.nodes}
    for k, a in enumerate(g.arcs):
        balance[a.tail] += f[k]
        balance[a.head] -= f[k]
    for v, bal in balance.items():
        want = z if v == g.source else -z if v == g.target else 0
        if bal != want:
            raise MilpError(f"flow not conserved at node {v} (net {bal}, expected {want})")
    counts: dict[tuple[int, ...], int] = {}
    total = 0
    for path, amount in _paths(g, f, 0.5):
        vec = _pattern_vector(g, path, m)
        if max(vec, default=0) > 1:
            raise GraphError(f"path uses an item twice: {vec}")
        counts[vec] = counts.get(vec, 0) + int(amount)
        total += int(amount)
    if total != z:
        raise MilpError(f"decomposed {total} paths, expected {z}")
    return PatternSolution(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])), z)


def greedy_patterns(widths: Sequence[int], demands: Sequence[int], capacity: int,
                    order: Sequence[int] | None = None) -> list[tuple[int, ...]]:
    """Fill one roll at a time with one unit of every still-demanded item that fits."""
    m = len(widths)
    if order is None:
        order = sorted(range(m), key=lambda k: (-widths[k], k))
    residual = list(demands)
    bins = []
    while any(r > 0 for r in residual):
        free = capacity
        vec = [0] * m
        for k in order:
            if residual[k] > 0 and widths[k] <= free:
                vec[k] = 1
                free -= widths[k]
                residual[k] -= 1
        bins.append(tuple(vec))
    return bins


def pattern_path(g: ArcFlowGraph, pattern: Sequence[int]) -> list[int]:
    """Arc indices of one source-target path whose items are exactly ``pattern``."""
    want = {k for k, a in enumerate(pattern) if a}
    out = {}
    for k, a in enumerate(g.arcs):
        out.setdefault(a.tail, []).append(k)
    dead = set()
    stack = [(g.source, frozenset(), [])]
    while stack:
        v, used, path = stack.pop()
        if v == g.target:
            if used == want:
                return path
            continue
        if (v, used) in dead:
            continue
        dead.add((v, used))
        for k in out.get(v, ()):
            a = g.arcs[k]
            if a.item == 0:
                stack.append((a.head, used, path + [k]))
            else:
                orig = g.item_original[a.item]
                if orig in want and orig not in used:
                    stack.append((a.head, used | {orig}, path + [k]))
    raise MilpError(f"pattern {tuple(pattern)} is not a path of the graph")


def flows_from_patterns(g: ArcFlowGraph, patterns: Sequence[tuple[int, ...]]) -> np.ndarray:
    flows = np.zeros(len(g.arcs), dtype=int)
    cache: dict[tuple[int, ...], list[int]] = {}
    for pat in patterns:
        if pat not in cache:
            cache[pat] = pattern_path(g, pat)
        flows[cache[pat]] += 1
    return flows


def _round_lp(model: MilpModel, sol: LpSolution, widths, capacity) -> list[tuple[int, ...]]:
    """Floor the LP path weights and pack what is left greedily."""
    g, m = model.graph, len(model.demands)
    bins: list[tuple[int, ...]] = []
    residual = list(model.demands)
    for path, amount in _paths(g, sol.primal[: len(g.arcs)], 1e-9):
        n = math.floor(amount + INT_TOL)
        if n <= 0:
            continue
        vec = _pattern_vector(g, path, m)
        bins.extend([vec] * n)
        residual = [r - a * n for r, a in zip(residual, vec)]
    residual = [max(r, 0) for r in residual]
    bins.extend(greedy_patterns(widths, residual, capacity))
    return _trim(bins, model.demands)


def _dive(model: MilpModel, sol: LpSolution, widths, capacity, max_rounds: int = 500) -> list[tuple[int, ...]]:
    """Residual rounding.

    Whole path weights are fixed; when none is whole the heaviest path is
    rounded up. Later rounds re-solve the residual demand with the pattern
    master, which is much smaller than the arc-flow LP.
    """
    g, m = model.graph, len(model.demands)
    residual = list(model.demands)
    bins: list[tuple[int, ...]] = []
    weighted = [(_pattern_vector(g, path, m), amount)
                for path, amount in _paths(g, sol.primal[: len(g.arcs)], 1e-9)]
    pool: list[tuple[int, ...]] = []
    for _ in range(max_rounds):
        if not weighted:
            break
        taken = False
        for vec, amount in weighted:
            n = math.floor(amount + INT_TOL)
            if n > 0:
                bins.extend([vec] * n)
                residual = [max(r - a * n, 0) for r, a in zip(residual, vec)]
                taken = True
        if not taken:
            vec, _ = max(weighted, key=lambda va: (va[1], va[0]))
            bins.append(vec)
            residual = [max(r - a, 0) for r, a in zip(residual, vec)]
        pool.extend(vec for vec, _ in weighted)
        active = [k for k in range(m) if residual[k] > 0]
        if not active:
            break
        sub = Instance.from_pairs(capacity, [(widths[k], residual[k]) for k in active])
        seeds = {tuple(p[k] for k in active) for p in pool}
        seeds = [s for s in seeds if sum(s) > 1]
        res = colgen.solve_root(sub, initial_columns=seeds)
        weighted = []
        for pat, x in zip(res.pool.columns, res.primal):
            if x > 1e-9:
                vec = [0] * m
                for k, a in zip(active, pat):
                    vec[k] = a
                weighted.append((tuple(vec), float(x)))
    bins.extend(greedy_patterns(widths, residual, capacity))
    return _trim(bins, model.demands)


def _trim(bins, demands):
    """Drop rolls that only over-produce."""
    cov = np.sum(np.asarray(bins, dtype=int), axis=0) if bins else np.zeros(len(demands), int)
    kept = []
    for vec in sorted(bins, key=sum):
        v = np.asarray(vec)
        if np.all(cov - v >= np.asarray(demands)):
            cov = cov - v
            continue
        kept.append(vec)
    return kept


# ---------------------------------------------------------------------------
# branch and bound


@dataclass(order=True)
class _Node:
    bound: int
    neg_depth: int
    seq: int
    lower: dict = field(compare=False)
    upper: dict = field(compare=False)


def _model_widths(model: MilpModel) -> tuple[list[int], int]:
    g = model.graph
    m = len(model.demands)
    widths = [0] * m
    for k in range(1, g.n_items + 1):
        widths[g.item_original[k]] = g.item_widths[k]
    return widths, g.capacity


def solve(model: MilpModel, time_limit: float | None = None, node_limit: int | None = None) -> MilpSolution:
    """Branch-and-bound on the LP relaxation with best-bound node selection."""
    start = time.monotonic()
    lp = model.lp
    n = lp.n_cols
    widths, capacity = _model_widths(model)
    g = model.graph

    incumbent = _trim(greedy_patterns(widths, model.demands, capacity), model.demands)
    best_val = len(incumbent)

    root = solve_lp(lp)
    if root.status is Status.INFEASIBLE:
        return MilpSolution("infeasible", None, np.zeros(len(g.arcs), int), math.inf, 0, 1,
                            elapsed=time.monotonic() - start)
    if root.status is not Status.OPTIMAL:
        raise MilpError(f"root LP failed: {root.status.value}")
    lp_bound = root.objective
    root_time = time.monotonic() - start
    dive = _dive(model, root, widths, capacity)
    if len(dive) < best_val:
        best_val, incumbent = len(dive), dive
    global_bound = math.ceil(lp_bound - INT_TOL)

    counter = itertools.count()
    heap = [_Node(global_bound, 0, next(counter), {}, {})]
    root_pending: LpSolution | None = root
    explored = 0
    int_flows = None
    status = "optimal"
    while heap:
        node = heapq.heappop(heap)
        global_bound = node.bound
        if node.bound >= best_val:
            heap.clear()
            break
        if (time_limit is not None and time.monotonic() - start > time_limit) or \
                (node_limit is not None and explored >= node_limit):
            heapq.heappush(heap, node)
            status = "limit"
            break
        if root_pending is not None:
            sol, root_pending = root_pending, None
        else:
            lo = list(lp.lower)
            up = list(lp.upper)
            for j, v in node.lower.items():
                lo[j] = v
            for j, v in node.upper.items():
                up[j] = v
            sol = solve_lp(lp.with_bounds(lo, up))
        explored += 1
        if sol.status is not Status.OPTIMAL:
            continue
        bound = math.ceil(sol.objective - INT_TOL)
        if bound >= best_val:
            continue
        x = sol.primal
        frac = np.abs(x - np.rint(x))
        if np.all(frac <= INT_TOL):
            best_val = int(round(sol.objective))
            int_flows = np.rint(x[: len(g.arcs)]).astype(int)
            incumbent = None
            continue
        heur = _round_lp(model, sol, widths, capacity)
        if len(heur) < best_val:
            best_val, incumbent, int_flows = len(heur), heur, None
            if bound >= best_val:
                continue
        dist = np.minimum(frac, 1.0)
        dist[frac <= INT_TOL] = -1.0
        j = int(np.argmax(dist))  # first index wins ties
        v = x[j]
        depth = -node.neg_depth + 1
        down = _Node(bound, -depth, next(counter), node.lower, {**node.upper, j: math.floor(v)})
        upn = _Node(bound, -depth, next(counter), {**node.lower, j: math.ceil(v)}, node.upper)
        heapq.heappush(heap, upn)
        heapq.heappush(heap, down)

    best_bound = min(best_val, min((nd.bound for nd in heap), default=best_val))
    if status == "optimal":
        best_bound = best_val
    if int_flows is None:
        int_flows = flows_from_patterns(g, incumbent)
    patterns = decompose_flow(g, int_flows, best_val, len(model.demands))
    return MilpSolution(status, best_val, int_flows, lp_bound, max(best_bound, math.ceil(lp_bound - INT_TOL)),
                        explored, patterns, time.monotonic() - start, root_time)


# ---------------------------------------------------------------------------
# LP file export


def _node_name(v) -> str:
    return f"{v[0]}_{v[1]}"


def var_name(a: Arc) -> str:
    return f"f_{_node_name(a.tail)}__{_node_name(a.head)}__{a.item}"


def _terms(coefs_names) -> list[str]:
    parts = []
    for coef, name in coefs_names:
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        txt = name if mag == 1 else f"{mag:g} {name}"
        parts.append(f"{sign} {txt}")
    if parts and parts[0].startswith("+ "):
        parts[0] = parts[0][2:]
    return parts


def _wrap(head: str, parts: list[str], tail: str, per_line: int = 6) -> list[str]:
    lines, cur = [], head
    for k, p in enumerate(parts):
        cur += " " + p
        if (k + 1) % per_line == 0 and k + 1 < len(parts):
            lines.append(cur)
            cur = "   "
    lines.append(cur + " " + tail)
    return lines


def export_lp_file(model: MilpModel) -> str:
    g, lp = model.graph, model.lp
    names = [var_name(a) for a in g.arcs] + ["z"]
    rows: list[list[tuple[float, str]]] = [[] for _ in range(lp.n_rows)]
    for j, col in enumerate(lp.columns):
        for r, c in zip(col.rows, col.coefs):
            rows[r].append((c, names[j]))
    out = ["\\ arc-flow model for the 0-1 cutting stock problem", "Minimize", " obj: z", "Subject To"]
    nv = len(g.nodes)
    for r in range(lp.n_rows):
        if r < nv:
            rname = f"flow_{_node_name(g.nodes[r])}"
            tail = f"= {lp.rhs[r]:g}"
        else:
            rname = f"demand_{r - nv}"
            tail = f">= {lp.rhs[r]:g}"
        terms = _terms(rows[r]) or ["0 z"]
        out.extend(_wrap(f" {rname}:", terms, tail))
    out.append("Bounds")
    out.extend(f" {name} >= 0" for name in names)
    out.append("Generals")
    for k in range(0, len(names), 8):
        out.append(" " + " ".join(names[k:k + 8]))
    out.append("End")
    return "\n".join(out) + "\n"
