"""Exit criteria for the solver, one test per criterion.

Each test appends a PASS/FAIL line to ``RESULTS``; the lines are printed in
the pytest terminal summary (see ``conftest.py``).
"""

import math
import random
import time
from functools import lru_cache
from itertools import product

import pytest

from arcflow_csp.arcflow import build_graph, compress_final, enumerate_paths, graph_stats
from arcflow_csp.bench import solve_arcflow
from arcflow_csp.colgen import solve_root
from arcflow_csp.instance import CLASSES, Instance, generate_class
from arcflow_csp.knapsack import knapsack_max
from arcflow_csp.lp import solve_lp
from arcflow_csp.milp import build_model
from arcflow_csp.oracle import enumerate_all_patterns, exact_solve_small

RESULTS: list[str] = []
SOLVES: list[tuple[Instance, int]] = []  # every proven optimum, for criterion 9


def report(n: int, ok: bool, detail: str):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def rand_instance(rng, max_m, max_w, max_b):
    W = rng.randint(1, max_w)
    return Instance.from_pairs(W, [(rng.randint(1, W), rng.randint(1, max_b))
                                   for _ in range(rng.randint(1, max_m))])


@lru_cache(maxsize=None)
def class_run(class_id, m, seed):
    inst = generate_class(class_id, m, seed)
    t0 = time.monotonic()
    cg = solve_root(inst)
    t_cg = time.monotonic() - t0
    t0 = time.monotonic()
    _, _, sol, _ = solve_arcflow(inst, time_limit=120)
    t_ip = time.monotonic() - t0
    if sol.status == "optimal":
        SOLVES.append((inst, sol.objective))
    return inst, cg, sol, t_cg, t_ip


def test_criterion_1_worked_example():
    inst = Instance.from_pairs(8, [(4, 3), (3, 2), (2, 5)])
    t0 = time.monotonic()
    built = build_graph(inst)
    final = compress_final(built)
    _, _, sol, _ = solve_arcflow(inst)
    z_lp = solve_root(inst).z_lp
    elapsed = time.monotonic() - t0
    SOLVES.append((inst, sol.objective))
    brute = enumerate_all_patterns(inst)
    ok = (sol.status == "optimal" and sol.objective == 5 and abs(z_lp - 5.0) <= 1e-6
          and elapsed < 1.0
          and built.n_vertices <= 8 and built.n_arcs <= 17
          and final.n_vertices <= 5 and final.n_arcs <= 9
          and enumerate_paths(built) == brute == enumerate_paths(final))
    report(1, ok, f"z_ip={sol.objective} z_lp={z_lp:.6f} built {built.n_vertices}v/{built.n_arcs}a "
                  f"final {final.n_vertices}v/{final.n_arcs}a in {elapsed:.3f}s")


def test_criterion_2_pattern_set_equivalence():
    rng = random.Random(2002)
    t0 = time.monotonic()
    mismatches = 0
    for _ in range(200):
        inst = rand_instance(rng, 12, 30, 5)
        brute = enumerate_all_patterns(inst)
        built = build_graph(inst)
        final = compress_final(built)
        mismatches += (enumerate_paths(built) != brute) + (enumerate_paths(final) != brute)
    elapsed = time.monotonic() - t0
    report(2, mismatches == 0 and elapsed < 60, f"{mismatches} mismatches over 200 instances in {elapsed:.1f}s")


def test_criterion_3_exactness_vs_oracle():
    rng = random.Random(3003)
    t0 = time.monotonic()
    mismatches, n = 0, 0
    while n < 200:
        inst = rand_instance(rng, 8, 20, 8)
        if sum(inst.demands) > 40:
            continue
        n += 1
        _, _, sol, _ = solve_arcflow(inst)
        SOLVES.append((inst, sol.objective))
        mismatches += sol.status != "optimal" or sol.objective != exact_solve_small(inst)
    elapsed = time.monotonic() - t0
    report(3, mismatches == 0 and elapsed < 300, f"{mismatches} mismatches over {n} instances in {elapsed:.1f}s")


CLASS_SET = (1, 3, 5, 7, 9, 10)


def test_criterion_4_bound_equality():
    rng = random.Random(4004)
    worst = 0.0
    for _ in range(100):
        inst = rand_instance(rng, 15, 50, 30)
        g = compress_final(build_graph(inst))
        af = solve_lp(build_model(g, inst.demands).lp).objective
        worst = max(worst, abs(af - solve_root(inst).z_lp))
    for c, seed in product(CLASS_SET, range(1, 11)):
        _, cg, sol, _, _ = class_run(c, 20, seed)
        worst = max(worst, abs(sol.lp_bound - cg.z_lp))
    report(4, worst <= 1e-5, f"max |z_lp(arc-flow) - z_lp(colgen)| = {worst:.2e} over 160 instances")


def test_criterion_5_gap_behaviour():
    gaps, violations = [], 0
    for c, seed in product(CLASS_SET, range(1, 11)):
        _, cg, sol, _, _ = class_run(c, 20, seed)
        violations += sol.status != "optimal" or sol.objective < math.ceil(cg.z_lp - 1e-6)
        gaps.append(sol.objective - cg.z_lp)
    below_one = sum(g < 1 for g in gaps)
    detail = (f"z_ip >= ceil(z_lp) violated {violations}x; gap min {min(gaps):.3f} "
              f"mean {sum(gaps) / len(gaps):.3f} max {max(gaps):.3f}; gap < 1 in {below_one}/{len(gaps)}")
    report(5, violations == 0, detail)


def brute_knapsack(weights, values, W):
    best = 0.0
    for a in product((0, 1), repeat=len(weights)):
        if sum(x * w for x, w in zip(a, weights)) <= W:
            best = max(best, sum(x * v for x, v in zip(a, values)))
    return best


def test_criterion_6_knapsack():
    rng = random.Random(6006)
    bad = 0
    for k in range(500):
        m = rng.randint(0, 15)
        W = rng.randint(1, 60)
        weights = [rng.randint(1, 40) for _ in range(m)]
        if k % 2:
            values = [rng.randint(0, 50) for _ in range(m)]
            bad += knapsack_max(weights, values, W) != brute_knapsack(weights, values, W)
        else:
            values = [rng.random() for _ in range(m)]
            bad += abs(knapsack_max(weights, values, W) - brute_knapsack(weights, values, W)) > 1e-9
    report(6, bad == 0, f"{bad} mismatches over 500 cases")


def test_criterion_7_compression_ratios():
    worst_v = worst_a = 0.0
    grew = 0
    n = 0
    for c, m, seed in product(range(1, 11), (10, 20, 30, 40), range(1, 11)):
        inst = generate_class(c, m, seed)
        built = build_graph(inst)
        final = compress_final(built)
        grew += final.n_vertices > built.n_vertices or final.n_arcs > built.n_arcs
        for g in (built, final):
            st = graph_stats(g, inst)
            worst_v, worst_a = max(worst_v, st.ratio_v), max(worst_a, st.ratio_a)
        n += 1
    ok = worst_v <= 1 and worst_a <= 1 and grew == 0
    report(7, ok, f"{n} instances: max ratio_v {worst_v:.3f}, max ratio_a {worst_a:.3f}, size increases {grew}")


@pytest.mark.slow
def test_criterion_8_desk_scale_performance():
    classes = [c for c, (W, _, _) in CLASSES.items() if W <= 100]
    worst_ip = worst_cg = 0.0
    failures = []
    for c, m, seed in product(classes, (20, 40), (1, 2)):
        _, _, sol, t_cg, t_ip = class_run(c, m, seed)
        worst_ip, worst_cg = max(worst_ip, t_ip), max(worst_cg, t_cg)
        if sol.status != "optimal" or t_ip > 60 or t_cg > 5:
            failures.append((c, m, seed, sol.status, round(t_ip, 1), round(t_cg, 1)))
    report(8, not failures, f"classes {classes} x m in (20, 40) x seeds 1-2: slowest exact solve "
                            f"{worst_ip:.1f}s, slowest colgen {worst_cg:.2f}s, failures {failures}")


def test_criterion_9_analytic_bounds():
    if len(SOLVES) < 10:
        # run standalone: make sure there is something to check
        for c, seed in product(CLASS_SET, (1, 2)):
            class_run.__wrapped__(c, 20, seed)
    bad = [(inst.pairs(), z) for inst, z in SOLVES
           if z < max(inst.demands) or z < -(-sum(w * b for w, b in inst.pairs()) // inst.capacity)]
    report(9, not bad, f"{len(SOLVES)} solves checked, {len(bad)} below max b_i or the area bound")
