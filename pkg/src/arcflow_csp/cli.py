"""Command-line interface: ``arcflow-csp <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from .arcflow import build_graph, compress_final, export_dot, graph_stats
from .bench import gap, run_bench, solve_arcflow, write_csv
from .colgen import solve_root
from .instance import generate_class, read_instance, write_instance
from .milp import build_model, export_lp_file


def parse_int_list(text: str) -> list[int]:
    """``"1,3,5"`` or ``"1..4"`` (also ``"1-4"``), or mixtures of both."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        for sep in ("..", "-"):
            if sep in part:
                lo, hi = part.split(sep, 1)
                out.extend(range(int(lo), int(hi) + 1))
                break
        else:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty list {text!r}")
    return out


def _graph(inst, stage):
    g = build_graph(inst)
    return compress_final(g) if stage == "final" else g


def cmd_gen(args):
    inst = generate_class(args.class_id, args.m, args.seed)
    write_instance(inst, args.out)
    print(f"wrote {args.out}: class {args.class_id}, m={inst.m}, W={inst.capacity}")


def cmd_solve(args):
    inst = read_instance(args.instance)
    if args.method == "colgen-lp":
        t0 = time.monotonic()
        res = solve_root(inst)
        result = {"method": "colgen-lp", "z_lp": res.z_lp, "cols": res.n_columns,
                  "seconds": round(time.monotonic() - t0, 3)}
        if args.json:
            print(json.dumps(result, indent=2))
        else:
            print(f"z_lp = {res.z_lp:.6f}")
            print(f"cols = {res.n_columns}")
        return 0

    g, _, sol, t_build = solve_arcflow(inst, time_limit=args.time_limit)
    sp = sol.patterns
    widths = inst.widths
    result = {
        "method": "arcflow",
        "status": sol.status,
        "z_ip": sol.objective,
        "z_lp": sol.lp_bound,
        "best_bound": sol.best_bound,
        "nodes": sol.nodes_explored,
        "graph": {"vertices": g.n_vertices, "arcs": g.n_arcs},
        "seconds": round(t_build + sol.elapsed, 3),
        "patterns": [
            {"count": mult,
             "items": [k for k, a in enumerate(pat) if a],
             "widths": [widths[k] for k, a in enumerate(pat) if a]}
            for pat, mult in sp.patterns
        ],
    }
    if args.json:
        print(json.dumps(result, indent=2))
        return 0
    print(f"status = {sol.status}")
    print(f"z_ip = {sol.objective}")
    print(f"z_lp = {sol.lp_bound:.6f}")
    if sol.status != "optimal":
        print(f"best_bound = {sol.best_bound}")
    print(f"patterns = {len(sp.patterns)}")
    for p in result["patterns"]:
        used = sum(p["widths"])
        print(f"  {p['count']:>6} x {p['widths']}  (items {p['items']}, used {used}/{inst.capacity})")
    return 0


def cmd_bound(args):
    res = solve_root(read_instance(args.instance), tol=args.tol)
    print(f"z_lp = {res.z_lp:.6f}")
    print(f"cols = {res.n_columns}")
    print(f"iterations = {res.iterations}")
    if res.degenerate:
        print("warning: stopped on a repeated column (degenerate master)", file=sys.stderr)
    return 0


def cmd_stats(args):
    inst = read_instance(args.instance)
    st = graph_stats(_graph(inst, args.stage), inst)
    print(f"stage = {args.stage}")
    print(f"vertices = {st.n_vertices}")
    print(f"arcs = {st.n_arcs}")
    print(f"ratio_v = {st.ratio_v:.4f}")
    print(f"ratio_a = {st.ratio_a:.4f}")
    return 0


def cmd_dot(args):
    inst = read_instance(args.instance)
    with open(args.out, "w", newline="\n") as fh:
        fh.write(export_dot(_graph(inst, args.stage)))
    return 0


def cmd_export_lp(args):
    inst = read_instance(args.instance)
    model = build_model(_graph(inst, "final"), inst.demands)
    with open(args.out, "w", newline="\n") as fh:
        fh.write(export_lp_file(model))
    return 0


def cmd_bench(args):
    records = run_bench(args.classes, args.sizes, args.seeds, args.time_limit, args.jobs)
    write_csv(records, args.csv, append=True)
    for r in records:
        if r.status != "optimal":
            print(f"class {r.class_id} m={r.m} seed={r.seed}: {r.status}, z_ip not proven", file=sys.stderr)
    gaps = [gap(r) for r in records if r.z_ip is not None]
    if gaps:
        print(f"{len(records)} instances, max gap {max(gaps):.3f}, mean gap {sum(gaps) / len(gaps):.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arcflow-csp",
                                description="Arc-flow solver for the 0-1 cutting stock problem.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen", help="generate a benchmark-class instance")
    s.add_argument("--class", dest="class_id", type=int, required=True, choices=range(1, 11))
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve an instance")
    s.add_argument("instance")
    s.add_argument("--method", choices=("arcflow", "colgen-lp"), default="arcflow")
    s.add_argument("--time-limit", type=float, default=None)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("bound", help="column-generation LP bound")
    s.add_argument("instance")
    s.add_argument("--tol", type=float, default=1e-7)
    s.set_defaults(func=cmd_bound)

    for name, func, help_ in (("stats", cmd_stats, "graph sizes and ratios"),
                              ("dot", cmd_dot, "write the graph as DOT")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("instance")
        s.add_argument("--stage", choices=("built", "final"), default="final")
        if name == "dot":
            s.add_argument("--out", required=True)
        s.set_defaults(func=func)

    s = sub.add_parser("export-lp", help="write the arc-flow model in LP format")
    s.add_argument("instance")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_export_lp)

    s = sub.add_parser("bench", help="run benchmark classes and append CSV rows")
    s.add_argument("--classes", type=parse_int_list, required=True)
    s.add_argument("--sizes", type=parse_int_list, required=True)
    s.add_argument("--seeds", type=parse_int_list, required=True)
    s.add_argument("--csv", required=True)
    s.add_argument("--time-limit", type=float, default=None)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
