"""Command line entry point.

Subcommands mirror the plan task kinds; `run` executes a whole plan file.
Exit codes: 0 success, 1 task failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import PlanError
from .plans import ExperimentPlan, parse_plan, run_plan


def _json_arg(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise argparse.ArgumentTypeError(f"not valid JSON: {e}") from e


def _pair_arg(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected 'u,v'")
    return [_token(parts[0]), _token(parts[1])]


def _token(s):
    s = s.strip()
    return int(s) if s.lstrip("-").isdigit() else s


def _list_arg(text):
    return [_token(t) for t in text.split(",") if t.strip() != ""]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="treetop",
                                 description="exact cocycle topography on trees")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a plan file")
    run.add_argument("plan", help="path to a plan JSON document")

    def common(p, point=True):
        p.add_argument("--system", type=_json_arg, required=True,
                       help='system descriptor, e.g. \'{"type":"shift","k":2}\'')
        if point:
            p.add_argument("--point", type=_json_arg, required=True,
                           help='point descriptor, e.g. \'{"prefix":"","period":"10"}\'')
        p.add_argument("--out", default=None, help="output path stem")

    p = sub.add_parser("explore", help="ball exploration with exact weights")
    common(p)
    p.add_argument("--radius", type=int, default=3)
    p.add_argument("--budget", type=int, default=2_000_000)

    p = sub.add_parser("classify", help="summary row of end statuses")
    common(p)
    p.add_argument("--depth", type=int, default=10)

    p = sub.add_parser("core", help="truncated core report")
    common(p)
    p.add_argument("--radius", type=int, default=3)
    p.add_argument("--threshold", default=None, help="rational like 100/1")
    p.add_argument("--budget", type=int, default=2_000_000)

    p = sub.add_parser("mtp", help="mass-transport estimators")
    p.add_argument("--system", type=_json_arg, required=True)
    p.add_argument("--kernel", default="forward-indicator",
                   help="zero|forward-indicator|forward-band|inverse-mass|"
                        "preimage-unit|inverse-mass-sum|balance")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--horizon", type=int, default=1)
    p.add_argument("--threads", type=int, default=None,
                   help="defaults to TREETOP_THREADS")
    p.add_argument("--out", default=None)

    p = sub.add_parser("tree", help="finite-tree combinatorics on a text file")
    p.add_argument("op", choices=["half-space", "leq", "coherent", "transversal",
                                  "helly", "hull", "lex", "prune"])
    p.add_argument("input", help="tree text file")
    p.add_argument("--edge", type=_pair_arg, default=None, help="u,v")
    p.add_argument("--edge2", type=_pair_arg, default=None, help="u,v")
    p.add_argument("--source", type=_token, default=None)
    p.add_argument("--targets", type=_list_arg, default=None, help="a,b,c")
    p.add_argument("--set", dest="vertex_set", type=_list_arg, default=None)
    p.add_argument("--subtree", action="append", type=_list_arg, default=None,
                   help="repeatable: a,b,c")
    p.add_argument("--bound", default="1/1")
    p.add_argument("--out", default=None)

    p = sub.add_parser("walk", help="boundary sampling by random walk")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", type=_json_arg, default=None,
                   help='letter weights as JSON, e.g. {"a":"1/4",...}; omit for uniform')
    p.add_argument("--walks", type=int, required=True)
    p.add_argument("--window", type=int, default=24,
                   help="stability window; see the pilot calibration in the README")
    p.add_argument("--prefix-len", type=int, default=2)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument("--out", default=None)

    p = sub.add_parser("expand", help="tagged expansion of a base system")
    p.add_argument("--base", type=_json_arg, required=True)
    p.add_argument("--n-max", type=int, default=40)
    p.add_argument("--point", type=_json_arg, required=True)
    p.add_argument("--levels", type=int, default=10)
    p.add_argument("--out", default=None)

    return ap


def _task_from_args(args) -> dict:
    cmd = args.command
    if cmd == "explore":
        task = {"kind": "explore", "system": args.system, "point": args.point,
                "radius": args.radius, "budget": args.budget}
    elif cmd == "classify":
        task = {"kind": "classify", "system": args.system, "point": args.point,
                "depth": args.depth}
    elif cmd == "core":
        task = {"kind": "core", "system": args.system, "point": args.point,
                "radius": args.radius, "budget": args.budget}
        if args.threshold is not None:
            task["threshold"] = args.threshold
    elif cmd == "mtp":
        task = {"kind": "mtp", "system": args.system, "kernel": args.kernel,
                "samples": args.samples, "seed": args.seed,
                "horizon": args.horizon}
        if args.threads is not None:
            task["threads"] = args.threads
    elif cmd == "tree":
        task = {"kind": "tree", "input": args.input, "op": args.op}
        if args.edge:
            task["edge"] = args.edge
        if args.edge2:
            task["edge2"] = args.edge2
        if args.source is not None:
            task["source"] = args.source
        if args.targets:
            task["targets"] = args.targets
        if args.vertex_set is not None:
            task["set"] = args.vertex_set
        if args.subtree:
            task["subtrees"] = args.subtree
        if args.op == "prune":
            task["bound"] = args.bound
    elif cmd == "walk":
        task = {"kind": "walk", "d": args.d, "m": args.m or "uniform",
                "walks": args.walks, "window": args.window,
                "prefix_len": args.prefix_len, "seed": args.seed,
                "budget": args.budget}
    elif cmd == "expand":
        task = {"kind": "expand", "base": args.base, "n_max": args.n_max,
                "point": args.point, "levels": args.levels}
    else:
        raise AssertionError(cmd)
    if args.out:
        task["out"] = args.out
    return task


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)

    try:
        if args.command == "run":
            with open(args.plan, "r", encoding="utf-8") as fh:
                plan = parse_plan(fh.read())
        else:
            plan = parse_plan({"tasks": [_task_from_args(args)]})
    except PlanError as e:
        print(f"plan error at {e.path or '<root>'}: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"cannot read plan: {e}", file=sys.stderr)
        return 2

    report = run_plan(plan)
    print(json.dumps(report.to_json(), sort_keys=True, indent=2))
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
