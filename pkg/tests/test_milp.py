import math
import random

import numpy as np
import pytest

from arcflow_csp.arcflow import build_graph, compress_final
from arcflow_csp.bench import solve_arcflow
from arcflow_csp.instance import Instance
from arcflow_csp.lp import GE, solve_lp
from arcflow_csp.milp import (MilpError, PatternSolution, build_model, decompose_flow,
                              export_lp_file, flows_from_patterns, greedy_patterns, solve)
from arcflow_csp.oracle import exact_solve_small

from .conftest import random_instance


def model_for(inst):
    g = compress_final(build_graph(inst))
    return g, build_model(g, inst.demands)


def test_model_structure(worked):
    g, model = model_for(worked)
    lp = model.lp
    nv = g.n_vertices
    assert lp.n_rows == nv + 3
    assert lp.rhs[nv:] == (3.0, 2.0, 5.0)
    assert lp.senses[nv:] == (GE,) * 3
    assert lp.costs[-1] == 1.0 and set(lp.costs[:-1]) == {0.0}
    z = lp.columns[model.z_col]
    assert dict(zip(z.rows, z.coefs)) == {model.row_of_node[g.source]: -1.0,
                                          model.row_of_node[g.target]: 1.0}
    for k, a in enumerate(g.arcs):
        col = dict(zip(lp.columns[k].rows, lp.columns[k].coefs))
        demand_rows = {r - nv for r in col if r >= nv}
        assert demand_rows == ({g.item_original[a.item]} if a.item else set())


def test_solve_worked(worked):
    _, model = model_for(worked)
    sol = solve(model)
    assert sol.status == "optimal" and sol.objective == 5
    assert sol.lp_bound == pytest.approx(5.0)
    sol.patterns.verify(worked.widths, worked.demands, worked.capacity)
    assert sol.patterns.total_bins == 5


@pytest.mark.parametrize("pairs, W, expected", [
    ([(5, 1)], 5, 1),
    ([(5, 7)], 5, 7),
    ([(2, 1), (2, 1)], 4, 1),
])
def test_small_examples(pairs, W, expected):
    inst = Instance.from_pairs(W, pairs)
    _, _, sol, _ = solve_arcflow(inst)
    assert sol.objective == expected


def test_matches_oracle_random():
    rng = random.Random(31)
    for _ in range(60):
        inst = random_instance(rng, max_m=8, max_w=20)
        _, model = model_for(inst)
        sol = solve(model)
        assert sol.objective == exact_solve_small(inst)
        assert sol.lp_bound <= sol.objective + 1e-9
        assert sol.objective <= sum(inst.demands)
        assert sol.objective >= inst.lower_bound()


def test_root_bound_is_lp_value():
    inst = Instance.from_pairs(10, [(6, 3), (5, 2), (4, 4), (3, 1)])
    _, model = model_for(inst)
    assert solve(model).lp_bound == pytest.approx(solve_lp(model.lp).objective, abs=1e-9)


def test_flows_conserve_and_meet_demand():
    inst = Instance.from_pairs(20, [(7, 4), (6, 3), (5, 6), (9, 2), (4, 5)])
    g, model = model_for(inst)
    sol = solve(model)
    f = sol.flows
    assert (f >= 0).all()
    net = {v: 0 for v in g.nodes}
    for k, a in enumerate(g.arcs):
        net[a.tail] += f[k]
        net[a.head] -= f[k]
    assert net[g.source] == sol.objective and net[g.target] == -sol.objective
    assert all(n == 0 for v, n in net.items() if v not in (g.source, g.target))
    for i, b in enumerate(inst.demands):
        assert sum(f[k] for k, a in enumerate(g.arcs) if a.item and g.item_original[a.item] == i) >= b


def test_decompose_reaggregates(worked):
    g, model = model_for(worked)
    sol = solve(model)
    ps = decompose_flow(g, sol.flows, sol.objective)
    assert ps.total_bins == 5
    assert sum(m for _, m in ps.patterns) == 5
    cov = ps.coverage()
    assert all(c >= b for c, b in zip(cov, worked.demands))
    item_flow = [sum(sol.flows[k] for k, a in enumerate(g.arcs)
                     if a.item and g.item_original[a.item] == i) for i in range(3)]
    assert cov == item_flow


def test_decompose_trivial(worked):
    g, _ = model_for(worked)
    empty = decompose_flow(g, np.zeros(g.n_arcs, int), 0)
    assert empty.patterns == [] and empty.total_bins == 0
    # one unit along item 3 (width 2) plus loss arcs
    flows = flows_from_patterns(g, [(0, 0, 1)])
    single = decompose_flow(g, flows, 1)
    assert single.patterns == [((0, 0, 1), 1)]


def test_decompose_rejects_bad_flow(worked):
    g, _ = model_for(worked)
    flows = np.zeros(g.n_arcs, int)
    flows[0] = 1
    with pytest.raises(MilpError, match="conserved"):
        decompose_flow(g, flows, 1)


def test_greedy_is_valid():
    rng = random.Random(2)
    for _ in range(50):
        inst = random_instance(rng, max_m=10, max_w=30)
        bins = greedy_patterns(inst.widths, inst.demands, inst.capacity)
        counts = {}
        for b in bins:
            counts[b] = counts.get(b, 0) + 1
        PatternSolution(list(counts.items()), len(bins)).verify(inst.widths, inst.demands, inst.capacity)


def test_pattern_solution_verify_errors():
    with pytest.raises(MilpError, match="capacity"):
        PatternSolution([((1, 1), 1)], 1).verify([3, 3], [1, 1], 5)
    with pytest.raises(MilpError, match="not covered"):
        PatternSolution([((1, 0), 1)], 1).verify([3, 3], [1, 1], 6)
    with pytest.raises(MilpError, match="add up"):
        PatternSolution([((1, 1), 1)], 2).verify([3, 3], [1, 1], 6)


def test_node_limit_reports_bounds():
    inst = Instance.from_pairs(20, [(7, 4), (6, 3), (5, 6), (9, 2), (4, 5), (11, 3), (3, 7)])
    _, model = model_for(inst)
    sol = solve(model, node_limit=0)
    assert sol.status in ("limit", "optimal")
    assert sol.best_bound <= sol.objective
    assert sol.best_bound >= math.ceil(sol.lp_bound - 1e-6)


def test_export_lp_file(worked):
    _, model = model_for(worked)
    text = export_lp_file(model)
    assert text.startswith("\\") or text.startswith("Minimize")
    body = text.split("\n", 1)[1] if text.startswith("\\") else text
    assert body.startswith("Minimize")
    for section in ("Subject To", "Bounds", "Generals", "End"):
        assert section in text
    assert text == export_lp_file(model_for(worked)[1])
    assert "f_0_0__4_1__1" in text and " obj: z" in text
    assert text.count(">= 3") == 1 and text.count(">= 5") == 1
