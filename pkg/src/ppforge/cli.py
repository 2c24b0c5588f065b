"""Command-line front end.

Exit codes: 0 success, 1 unreadable or malformed input, 2 graph validation
failure or a PP file that does not belong to the graph, 3 fixed-point
iteration budget exceeded, 4 oracle limit exceeded, 5 verification mismatch.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from pathlib import Path

from .benchgen import FAMILIES, BenchSpec, gen_family, gen_random_cfg
from .cfg import Cfg, CfgParseError, parse_cfg, validate_cfg
from .compose import PpReport, erase_synthetic, generate_report
from .metrics import metrics_report
from .oracle import OracleLimitExceeded, OracleLimits, oracle_pps
from .scc import build_ccfg, entry_exit_vertices, tarjan_scc
from .tp import generate_test_paths, tp_payload
from .vertexgen import BudgetExceeded, Schedule, SCHEDULE_MODES

SCHEMA_VERSION = 1
EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_BUDGET, EXIT_ORACLE, EXIT_MISMATCH = range(6)


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def graph_digest(g: Cfg) -> str:
    canon = json.dumps([list(g.names), [list(a) for a in g.arcs], g.start, g.end])
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def load_graph(path: str, fmt: str = "auto", validate: bool = True) -> Cfg:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"cannot read {path}: {exc.strerror}")
    try:
        g = parse_cfg(text, fmt)
    except CfgParseError as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}")
    if validate:
        diags = validate_cfg(g)
        if diags:
            raise CliError(EXIT_INVALID, f"{path}: invalid CFG: " + "; ".join(diags))
    return g


def emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def dump_json(doc) -> str:
    return json.dumps(doc, indent=1) + "\n"


def schedule_from(args) -> Schedule:
    return Schedule(args.schedule, args.seed, args.workers)


def build_report(g: Cfg, args, mode: str | None = None) -> tuple[PpReport, float]:
    t0 = time.perf_counter()
    rep = generate_report(g, mode or args.mode, schedule_from(args))
    if getattr(args, "erase_synthetic", False) and len(rep.graph) > len(g):
        rep = erase_synthetic(rep, g)
    return rep, time.perf_counter() - t0


def run_section(g: Cfg, args, rep: PpReport, wall: float, **extra) -> dict:
    run = {
        "input_digest": graph_digest(g),
        "mode": args.mode,
        "schedule": schedule_from(args).describe(),
        "counts": rep.counts(),
        "wall_time_s": round(wall, 6),
        "peak_store_bytes": rep.store_bytes,
        "rounds": rep.rounds,
    }
    run.update(extra)
    return run


def pp_document(g: Cfg, rep: PpReport, args, wall: float) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "graph_digest": graph_digest(rep.graph)}
    doc.update(rep.payload())
    doc["run"] = run_section(g, args, rep, wall)
    return doc


def load_pp_file(path: str, g: Cfg) -> set[tuple[int, ...]]:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_PARSE, f"cannot read PP file {path}: {exc}")
    digest = doc.get("graph_digest")
    if digest is not None and digest != graph_digest(g):
        raise CliError(EXIT_INVALID, f"{path} was produced for a different graph")
    named = list(doc.get("complete", [])) + list(doc.get("exit", [])) + list(doc.get("entry", []))
    for ps in doc.get("internal", {}).values():
        named.extend(ps)
    out = set()
    for p in named:
        try:
            ids = g.ids(p)
        except KeyError as exc:
            raise CliError(EXIT_INVALID, f"{path} names unknown vertex {exc.args[0]!r}")
        if not g.has_path(ids):
            raise CliError(EXIT_INVALID, f"{path} lists {p}, which is not a path of the graph")
        out.add(ids)
    return out


# ---------------------------------------------------------------- commands

def cmd_pps(args) -> int:
    g = load_graph(args.input, args.format)
    rep, wall = build_report(g, args)
    emit(dump_json(pp_document(g, rep, args, wall)), args.output)
    return EXIT_OK


def cmd_tps(args) -> int:
    g = load_graph(args.input, args.format)
    t0 = time.perf_counter()
    if args.pps:
        pps = load_pp_file(args.pps, g)
        graph = g
    else:
        rep, _ = build_report(g, args)
        pps, graph = rep.all_pps(), rep.graph
    tps = generate_test_paths(graph, pps)
    doc = {"schema_version": SCHEMA_VERSION, "graph_digest": graph_digest(graph)}
    doc.update(tp_payload(graph, tps, pps))
    doc["run"] = {"input_digest": graph_digest(g), "pp_count": len(pps), "tp_count": len(tps),
                  "wall_time_s": round(time.perf_counter() - t0, 6)}
    emit(dump_json(doc), args.output)
    return EXIT_OK if doc["coverage"] == 1.0 else EXIT_MISMATCH


def _first_diff(a: set, b: set, g: Cfg) -> str:
    only_a, only_b = sorted(a - b), sorted(b - a)
    if only_a and (not only_b or only_a[0] <= only_b[0]):
        return f"only in first: {g.label(only_a[0])}"
    return f"only in second: {g.label(only_b[0])}"


def cmd_verify(args) -> int:
    g = load_graph(args.input, args.format)
    if len(g) > args.max_vertices:
        raise CliError(EXIT_ORACLE, f"graph has {len(g)} vertices, oracle limit is {args.max_vertices}")
    sched = schedule_from(args)
    direct = generate_report(g, "direct", sched)
    comp = generate_report(g, "compositional", sched)
    if len(direct.graph) > len(g):
        direct, comp = erase_synthetic(direct, g), erase_synthetic(comp, g)
    oracle = oracle_pps(g, OracleLimits(max_vertices=args.max_vertices))
    sets = [("direct", direct.all_pps()), ("compositional", comp.all_pps()), ("oracle", oracle)]
    if args.pps:
        sets.append(("file", load_pp_file(args.pps, g)))
    failures = []
    for name, ps in sets:
        if name != "oracle" and ps != oracle:
            failures.append(f"{name} != oracle: {_first_diff(ps, oracle, g)}")
    if direct.by_class() != comp.by_class():
        failures.append("direct and compositional classify differently")
    for seed in range(args.sweep):
        s = Schedule("seeded-random", seed)
        for mode in ("direct", "compositional"):
            rep = generate_report(g, mode, s)
            got = erase_synthetic(rep, g).all_pps() if len(rep.graph) > len(g) else rep.all_pps()
            if got != oracle:
                failures.append(f"{mode} seed {seed}: {_first_diff(got, oracle, g)}")
    counts = "==".join(str(len(ps)) for _, ps in sets)
    if failures:
        print(f"FAIL {counts}")
        for f in failures:
            print("  " + f)
        return EXIT_MISMATCH
    sweep = f" ({args.sweep} schedule seeds)" if args.sweep else ""
    print(f"PASS {counts}{sweep}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    rows = []
    for path in args.inputs:
        g = load_graph(path, args.format)
        total = generate_report(g, "compositional").total if not args.no_pps else None
        row = {"graph": Path(path).name}
        row.update(metrics_report(g, total).as_row())
        rows.append(row)
    if args.csv:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
        emit(buf.getvalue(), args.output)
    else:
        emit(dump_json(rows if len(rows) > 1 else rows[0]), args.output)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.random is not None:
        g = gen_random_cfg(args.random, args.loop_bias, args.seed)
    elif args.family:
        try:
            g = gen_family(BenchSpec(args.family, args.K, args.N, args.seed))
        except ValueError as exc:
            raise CliError(EXIT_INVALID, str(exc))
    else:
        raise CliError(EXIT_INVALID, "give --family or --random")
    emit(g.dumps(), args.output)
    return EXIT_OK


def parse_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",")]


def cmd_bench(args) -> int:
    fields = ["family", "K", "N", "nodes", "edges", "sccs", "mode", "schedule", "pps", "wall_s",
              "peak_store_bytes"]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields)
    w.writeheader()
    for k in parse_range(args.K):
        g = gen_family(BenchSpec(args.family, k, args.N, args.seed))
        nsccs = len(tarjan_scc(g).nontrivial)
        for mode in args.modes.split(","):
            t0 = time.perf_counter()
            rep = generate_report(g, mode, schedule_from(args))
            w.writerow({"family": args.family, "K": k, "N": args.N, "nodes": len(g),
                        "edges": len(g.arcs), "sccs": nsccs, "mode": mode,
                        "schedule": schedule_from(args).describe(), "pps": rep.total,
                        "wall_s": f"{time.perf_counter() - t0:.4f}",
                        "peak_store_bytes": rep.store_bytes})
    emit(buf.getvalue(), args.output)
    return EXIT_OK


def cmd_scc(args) -> int:
    g = load_graph(args.input, args.format)
    d = tarjan_scc(g)
    sccs = []
    for c in d.nontrivial:
        en, ex = entry_exit_vertices(g, d, c)
        sccs.append({"name": d.name(c), "members": g.label(d.members[c]),
                     "entries": g.label(sorted(en)), "exits": g.label(sorted(ex))})
    cc = build_ccfg(g, d).graph
    doc = {"schema_version": SCHEMA_VERSION, "sccs": sccs,
           "ccfg": {"vertices": list(cc.names),
                    "arcs": [[cc.names[a], cc.names[b]] for a, b in cc.arcs]}}
    emit(dump_json(doc), args.output)
    return EXIT_OK


# ------------------------------------------------------------------ parser

def _add_graph(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="graph file (edge-list JSON or DOT subset)")
    p.add_argument("--format", default="auto", choices=["auto", "edge-list-json", "dot-subset"])


def _add_sched(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", default="compositional", choices=["compositional", "direct"])
    p.add_argument("--schedule", default="round-robin", choices=SCHEDULE_MODES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ppforge", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pps", help="generate and classify prime paths")
    _add_graph(p)
    _add_sched(p)
    p.add_argument("--erase-synthetic", action="store_true",
                   help="report paths without the vertices added by normalization")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_pps)

    p = sub.add_parser("tps", help="generate test paths covering every prime path")
    _add_graph(p)
    _add_sched(p)
    p.add_argument("--pps", help="use prime paths from this file instead of generating them")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_tps)

    p = sub.add_parser("verify", help="cross-check both pipelines against the brute-force oracle")
    _add_graph(p)
    _add_sched(p)
    p.add_argument("--pps", help="also check the prime paths in this file")
    p.add_argument("--sweep", type=int, default=0, metavar="N",
                   help="repeat with N seeded-random schedules")
    p.add_argument("--max-vertices", type=int, default=OracleLimits().max_vertices)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("metrics", help="size, cyclomatic complexity, Npath and PP count")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--format", default="auto", choices=["auto", "edge-list-json", "dot-subset"])
    p.add_argument("--csv", action="store_true")
    p.add_argument("--no-pps", action="store_true", help="skip prime path generation")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("gen", help="write a synthetic CFG")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("-K", type=int, default=1)
    p.add_argument("-N", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random", type=int, metavar="V", help="random CFG with V vertices")
    p.add_argument("--loop-bias", type=float, default=0.3)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time both modes over a family sweep (CSV)")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--K", default="1..4", help="range like 1..6 or list like 1,3,5")
    p.add_argument("-N", type=int, default=2)
    p.add_argument("--modes", default="direct,compositional")
    p.add_argument("--schedule", default="round-robin", choices=SCHEDULE_MODES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("scc", help="dump components, entry/exit vertices and the component graph")
    _add_graph(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_scc)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"ppforge: {exc}", file=sys.stderr)
        return exc.code
    except BudgetExceeded as exc:
        print(f"ppforge: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OracleLimitExceeded as exc:
        print(f"ppforge: {exc}", file=sys.stderr)
        return EXIT_ORACLE


if __name__ == "__main__":
    sys.exit(main())
