"""End-to-end solves and the benchmark table rows."""

from __future__ import annotations

import csv
import os
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields
from typing import Iterable

from .arcflow import build_graph, compress_final, graph_stats
from .colgen import solve_root
from .instance import Instance, generate_class
from .milp import MilpSolution, build_model, solve

CSV_HEADER = "class,m,W,seed,z_lp,z_ip,cols,nv,na,ratio_v,ratio_a,t_cg,t_af_lp,t_af_ip".split(",")


def solve_arcflow(inst: Instance, time_limit: float | None = None, node_limit: int | None = None):
    """Build, compress and solve; returns ``(graph, model, solution, build_seconds)``.

    The solution's patterns are verified against the instance before returning.
    """
    t0 = time.monotonic()
    g = compress_final(build_graph(inst))
    build_time = time.monotonic() - t0
    model = build_model(g, inst.demands)
    sol = solve(model, time_limit=time_limit, node_limit=node_limit)
    if sol.patterns is not None:
        sol.patterns.verify(inst.widths, inst.demands, inst.capacity)
    return g, model, sol, build_time


@dataclass
class BenchRecord:
    class_id: int
    m: int
    W: int
    seed: int
    z_lp: float
    z_ip: int | None
    n_cols: int
    n_v: int
    n_a: int
    ratio_v: float
    ratio_a: float
    t_cg: float
    t_af_lp: float
    t_af_ip: float
    status: str = "optimal"

    def csv_row(self) -> list[str]:
        return [
            str(self.class_id), str(self.m), str(self.W), str(self.seed),
            f"{self.z_lp:.6f}", "" if self.z_ip is None else str(self.z_ip),
            str(self.n_cols), str(self.n_v), str(self.n_a),
            f"{self.ratio_v:.4f}", f"{self.ratio_a:.4f}",
            f"{self.t_cg:.3f}", f"{self.t_af_lp:.3f}", f"{self.t_af_ip:.3f}",
        ]


def run_instance(class_id: int, m: int, seed: int, time_limit: float | None = None) -> BenchRecord:
    inst = generate_class(class_id, m, seed)
    t0 = time.monotonic()
    cg = solve_root(inst)
    t_cg = time.monotonic() - t0
    g, _, sol, t_build = solve_arcflow(inst, time_limit=time_limit)
    st = graph_stats(g, inst)
    z_ip = sol.objective if sol.status == "optimal" else None
    return BenchRecord(class_id, m, inst.capacity, seed, cg.z_lp, z_ip, cg.n_columns,
                       st.n_vertices, st.n_arcs, st.ratio_v, st.ratio_a,
                       t_cg, t_build + sol.root_time, t_build + sol.elapsed, sol.status)


def _run(args):
    return run_instance(*args)


def run_bench(classes: Iterable[int], sizes: Iterable[int], seeds: Iterable[int],
              time_limit: float | None = None, jobs: int = 1) -> list[BenchRecord]:
    """Records in (class, size, seed) order regardless of completion order."""
    tasks = [(c, m, s, time_limit) for c in classes for m in sizes for s in seeds]
    if jobs <= 1:
        return [_run(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run, tasks))


def write_csv(records: Iterable[BenchRecord], path, append: bool = False) -> None:

    new = not append or not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a" if append else "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if new:
            w.writerow(CSV_HEADER)
        for r in records:
            w.writerow(r.csv_row())


def gap(record: BenchRecord) -> float:
    return math.nan if record.z_ip is None else record.z_ip - record.z_lp
