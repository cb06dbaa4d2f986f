"""Command-line front end.

    fairdel analyze GRAPH
    fairdel solve-vertex GRAPH FORMULA [--bound L | --minimize] [--mode M] [--engine nd|brute]
    fairdel solve-edge GRAPH FORMULA [--bound L | --minimize] [--mode M] [--engine vc|brute]
    fairdel reduce SOURCE --variant vertex|edge|eqcp [--parts R] --out DIR
    fairdel bench SUITE_DIR

Reports are JSON on stdout. Exit codes: 0 yes (or success), 1 no,
2 budget exceeded, 3 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .graph import GraphFormatError, min_vertex_cover, nd_partition, parse_graph
from .logic.ast import Dialect
from .logic.parser import FormulaSortError, FormulaSyntaxError, parse_formula
from .logic.transform import TranslationError, formula_r, quantifier_counts
from .mc import BudgetExceeded
from .reductions import VARIANTS, reduce, size_audit, write_instance
from .solvers import (
    brute_force_fair_edge,
    brute_force_fair_vertex,
    solve_fair_edge_vc,
    solve_fair_vertex_nd,
)

EXIT_YES, EXIT_NO, EXIT_BUDGET, EXIT_INPUT = 0, 1, 2, 3

log = logging.getLogger("fairdel")


class InputError(Exception):
    pass


def _read(path: str) -> tuple[str, str]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return data.decode("utf-8"), hashlib.sha256(data).hexdigest()


def _load_graph(path: str):
    text, digest = _read(path)
    try:
        return parse_graph(text), digest
    except GraphFormatError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_formula(path: str):
    text, digest = _read(path)
    try:
        return parse_formula(text), digest
    except (FormulaSyntaxError, FormulaSortError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _emit(report: dict) -> None:
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _status_code(sol) -> int:
    if sol.status == "budget_exceeded":
        return EXIT_BUDGET
    return EXIT_YES if sol.answer else EXIT_NO


def _mode(args, f) -> str:
    if args.mode != "auto":
        return args.mode
    return "generalized" if f.free else "plain"


def cmd_analyze(args) -> int:
    g, digest = _load_graph(args.graph)
    nd = nd_partition(g)
    cover = min_vertex_cover(g).cover
    _emit({
        "command": "analyze",
        "inputs": {args.graph: digest},
        "status": "solved",
        "n": g.n,
        "m": g.m,
        "nd": nd.k,
        "classes": [
            {"kind": "clique" if cl else "independent", "size": len(c), "vertices": list(c)}
            for c, cl in zip(nd.classes, nd.clique)
        ],
        "vc": len(cover),
        "cover": list(cover),
    })
    return EXIT_YES


def _solve(args, edge: bool) -> int:
    g, gd = _load_graph(args.graph)
    f, fd = _load_formula(args.formula)
    if not edge and f.dialect is Dialect.MSO2:
        raise InputError("the vertex solver takes FO or MSO1 formulas; this one is MSO2")
    mode = _mode(args, f)
    bound = None if args.minimize else args.bound
    try:
        if edge and args.engine == "vc":
            sol = solve_fair_edge_vc(g, f, bound=bound, mode=mode, budget=args.budget,
                                     exact_budget=args.exact_budget, force_greedy=args.greedy, jobs=args.jobs)
        elif edge:
            sol = brute_force_fair_edge(g, f, bound=bound, mode=mode, budget=args.budget)
        elif args.engine == "nd":
            sol = solve_fair_vertex_nd(g, f, bound=bound, mode=mode, budget=args.budget, jobs=args.jobs)
        else:
            sol = brute_force_fair_vertex(g, f, bound=bound, mode=mode, budget=args.budget)
    except (ValueError, TranslationError) as exc:
        raise InputError(str(exc)) from None
    except BudgetExceeded:
        # brute force refuses instances that are too large outright
        sol = None
    q_e, q_s = quantifier_counts(f)
    report = {
        "command": "solve-edge" if edge else "solve-vertex",
        "inputs": {args.graph: gd, args.formula: fd},
        "engine": args.engine,
        "mode": mode,
        "bound": bound,
        "dialect": f.dialect.value,
        "q_E": q_e,
        "q_S": q_s,
        "r": formula_r(f),
    }
    if sol is None:
        report.update({"status": "budget_exceeded", "solution": None})
        _emit(report)
        return EXIT_BUDGET
    report["status"] = sol.status
    report["solution"] = sol.to_dict()
    _emit(report)
    return _status_code(sol)


def cmd_solve_vertex(args) -> int:
    return _solve(args, edge=False)


def cmd_solve_edge(args) -> int:
    return _solve(args, edge=True)


def cmd_reduce(args) -> int:
    g, digest = _load_graph(args.source)
    inst = reduce(g, args.variant, args.parts)
    paths = write_instance(inst, args.out, args.stem)
    _emit({
        "command": "reduce",
        "inputs": {args.source: digest},
        "status": "solved",
        "audit": size_audit(inst),
        "files": {k: str(v) for k, v in paths.items()},
    })
    return EXIT_YES


def _load_suite(suite: Path) -> list[dict]:
    manifest = suite / "suite.json"
    try:
        entries = json.loads(manifest.read_text())
    except OSError:
        raise InputError(f"no suite manifest at {manifest}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{manifest}: {exc}") from None
    return entries["instances"]


def bench_rows(suite: Path, budget: Optional[int] = None) -> list[dict]:
    rows = []
    for entry in _load_suite(suite):
        g, _ = _load_graph(str(suite / entry["graph"]))
        f, _ = _load_formula(str(suite / entry["formula"]))
        edge = entry["kind"] == "edge"
        engines = ("vc", "brute") if edge else ("nd", "brute")
        for engine in engines:
            if edge:
                fn = solve_fair_edge_vc if engine == "vc" else brute_force_fair_edge
            else:
                fn = solve_fair_vertex_nd if engine == "nd" else brute_force_fair_vertex
            start = time.perf_counter()
            sol = fn(g, f, mode=entry["mode"], budget=budget)
            rows.append({
                "instance": entry["name"],
                "engine": engine,
                "status": sol.status,
                "cost": sol.fair_cost,
                "time_s": round(time.perf_counter() - start, 4),
                "checked": sol.stats.get("checked"),
                "representatives": sol.stats.get("representatives", sol.stats.get("candidates")),
            })
    return rows


def cmd_bench(args) -> int:
    rows = bench_rows(Path(args.suite), args.budget)
    if args.json:
        _emit({"command": "bench", "status": "solved", "rows": rows})
        return EXIT_YES
    cols = ("instance", "engine", "status", "cost", "time_s", "checked", "representatives")
    widths = [max(len(c), *(len(str(r[c])) for r in rows)) for c in cols] if rows else [len(c) for c in cols]
    print("  ".join(c.ljust(w) for c, w in zip(cols, widths)))
    for r in rows:
        print("  ".join(str(r[c]).ljust(w) for c, w in zip(cols, widths)))
    return EXIT_YES


def _env_budget() -> Optional[int]:
    raw = os.environ.get("FAIRDEL_EVAL_BUDGET")
    return int(raw) if raw else None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairdel", description="Fair vertex and edge deletion solvers.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="n, m, twin classes and a minimum vertex cover")
    p.add_argument("graph")
    p.set_defaults(func=cmd_analyze)

    for name, engines, default, func in (
        ("solve-vertex", ("nd", "brute"), "nd", cmd_solve_vertex),
        ("solve-edge", ("vc", "brute"), "vc", cmd_solve_edge),
    ):
        p = sub.add_parser(name, help=f"fair {name.split('-')[1]} deletion")
        p.add_argument("graph")
        p.add_argument("formula")
        goal = p.add_mutually_exclusive_group()
        goal.add_argument("--bound", type=int, default=None, help="decide: fair cost at most L")
        goal.add_argument("--minimize", action="store_true", help="find the least fair cost (default)")
        p.add_argument("--mode", choices=("auto", "plain", "generalized"), default="auto",
                       help="plain: formula holds after deletion; generalized: formula on the deleted set")
        p.add_argument("--engine", choices=engines, default=default)
        p.add_argument("--jobs", type=int, default=1, help="worker processes for model checking")
        p.add_argument("--budget", type=int, default=_env_budget(),
                       help="max evaluator steps per check (env FAIRDEL_EVAL_BUDGET)")
        if name == "solve-edge":
            p.add_argument("--exact-budget", type=int, default=200_000,
                           help="enumerate all signature shapes when there are at most this many")
            p.add_argument("--greedy", action="store_true", help="always use greedy representatives")
        p.set_defaults(func=func)

    p = sub.add_parser("reduce", help="build a hardness-reduction instance")
    p.add_argument("source")
    p.add_argument("--variant", choices=VARIANTS, default="vertex")
    p.add_argument("--parts", type=int, default=3, help="number of parts for eqcp")
    p.add_argument("--out", default=".")
    p.add_argument("--stem", default="reduced")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("bench", help="run every engine over a corpus")
    p.add_argument("suite", help="directory containing suite.json")
    p.add_argument("--json", action="store_true")
    p.add_argument("--budget", type=int, default=_env_budget())
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_YES
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        _emit({"command": args.command, "status": "error", "error": str(exc)})
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
