"""Experiment plans: a JSON document listing tasks, validated strictly and
executed in order.

A plan is `{"tasks": [...]}`; every task carries a `kind` plus the fields
that kind allows, nothing else.  Unknown fields, unknown system types and
malformed rationals are rejected with the path of the offending field.
Stochastic tasks must carry a seed.  Outputs are written as <out>.json and
<out>.csv; rationals are serialized as "num/den" strings so nothing passes
through floats.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .errors import PlanError, TreetopError, UnknownSystemError
from .classify import classification_series, classify_point
from .finite_trees import (
    DirectedEdge,
    coherent_transversal,
    convex_hull,
    edge_leq,
    half_space,
    helly_common_vertex,
    is_coherent,
    lex_least_path,
    parse_tree_text,
    prune_rho_finite,
)
from .measures import random_walk_boundary_sample, cylinder_mass, HittingMeasure
from .points import point_from_json
from .systems import system_from_json
from .tilde import TaggedPoint, TildeSystem
from .topography import explore_ball, rn_core_truncated
from .transport import (
    TransportKernel,
    backward_balance_check,
    estimate_mtp,
    verify_inverse_mass_sum,
    verify_preimage_unit,
)
from .weights import Weight

TASK_FIELDS = {
    "explore": {"kind", "system", "point", "radius", "budget", "out"},
    "classify": {"kind", "system", "point", "depth", "out"},
    "core": {"kind", "system", "point", "radius", "threshold", "budget", "out"},
    "mtp": {"kind", "system", "kernel", "samples", "seed", "horizon", "threads", "out"},
    "tree": {"kind", "input", "op", "edge", "edge2", "source", "targets", "set",
             "subtrees", "bound", "out"},
    "walk": {"kind", "d", "m", "walks", "window", "prefix_len", "seed", "budget", "out"},
    "expand": {"kind", "base", "n_max", "point", "levels", "out"},
}

REQUIRED_FIELDS = {
    "explore": {"system", "point", "radius"},
    "classify": {"system", "point"},
    "core": {"system", "point", "radius"},
    "mtp": {"system", "kernel", "samples", "seed"},
    "tree": {"input", "op"},
    "walk": {"d", "walks", "seed"},
    "expand": {"base", "n_max", "point", "levels"},
}

MTP_KERNELS = ("zero", "forward-indicator", "forward-band", "inverse-mass",
               "preimage-unit", "inverse-mass-sum", "balance")

TREE_OPS = ("half-space", "leq", "coherent", "transversal", "helly", "hull",
            "lex", "prune")


@dataclass(frozen=True)
class ExperimentPlan:
    tasks: tuple

    def to_json(self):
        return {"tasks": [dict(t) for t in self.tasks]}


def _fail(msg, path):
    raise PlanError(msg, path=path)


def _require_int(task, field, path, minimum=0):
    v = task[field]
    if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
        _fail(f"field {field!r} must be an integer >= {minimum}, got {v!r}",
              f"{path}.{field}")
    return v


def _check_rational(value, path):
    try:
        Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError):
        _fail(f"malformed rational {value!r}", path)


def parse_plan(doc) -> ExperimentPlan:
    """Validate a plan document into an ExperimentPlan; round-trips exactly."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as e:
            raise PlanError(f"not well-formed JSON: {e}", path="") from e
    if not isinstance(doc, dict):
        _fail("plan must be a JSON object", "")
    unknown_top = set(doc) - {"tasks"}
    if unknown_top:
        _fail(f"unknown top-level fields {sorted(unknown_top)}", sorted(unknown_top)[0])
    tasks = doc.get("tasks")
    if not isinstance(tasks, list):
        _fail("plan needs a 'tasks' list", "tasks")
    validated = []
    for i, task in enumerate(tasks):
        path = f"tasks[{i}]"
        if not isinstance(task, dict):
            _fail("task must be an object", path)
        kind = task.get("kind")
        if kind not in TASK_FIELDS:
            _fail(f"unknown task kind {kind!r} (known: {sorted(TASK_FIELDS)})",
                  f"{path}.kind")
        unknown = set(task) - TASK_FIELDS[kind]
        if unknown:
            _fail(f"unknown field {sorted(unknown)[0]!r} for kind {kind!r}",
                  f"{path}.{sorted(unknown)[0]}")
        missing = REQUIRED_FIELDS[kind] - set(task)
        if missing:
            _fail(f"missing required field {sorted(missing)[0]!r}",
                  f"{path}.{sorted(missing)[0]}")
        _validate_task(task, kind, path)
        validated.append(dict(task))
    return ExperimentPlan(tuple(validated))


def _validate_task(task, kind, path):
    if "system" in task:
        try:
            system_from_json(task["system"])
        except UnknownSystemError as e:
            _fail(str(e), f"{path}.system.type")
        except (TreetopError, ValueError, ZeroDivisionError) as e:
            _fail(f"bad system descriptor: {e}", f"{path}.system")
    if "base" in task:
        base_doc = task["base"]
        try:
            base = system_from_json(base_doc)
            TildeSystem(base, max(int(task.get("n_max", 1)), 1))
        except (TreetopError, ValueError) as e:
            _fail(f"bad expansion base: {e}", f"{path}.base")
    if kind == "mtp" and task["kernel"] not in MTP_KERNELS:
        _fail(f"unknown kernel {task['kernel']!r} (known: {MTP_KERNELS})",
              f"{path}.kernel")
    if kind == "tree" and task["op"] not in TREE_OPS:
        _fail(f"unknown tree op {task['op']!r} (known: {TREE_OPS})", f"{path}.op")
    for field in ("samples", "radius", "depth", "horizon", "walks", "window",
                  "prefix_len", "budget", "n_max", "levels", "threads", "d"):
        if field in task:
            _require_int(task, field, path, minimum=0)
    if "threshold" in task:
        _check_rational(task["threshold"], f"{path}.threshold")
    if "bound" in task:
        _check_rational(task["bound"], f"{path}.bound")
    if "m" in task and task["m"] != "uniform":
        if not isinstance(task["m"], dict):
            _fail("field 'm' must be \"uniform\" or a letter->rational object",
                  f"{path}.m")
        for letter, v in task["m"].items():
            _check_rational(v, f"{path}.m.{letter}")


def serialize_plan(plan: ExperimentPlan) -> str:
    return json.dumps(plan.to_json(), sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------


@dataclass
class TaskResult:
    kind: str
    status: str  # "ok" | "error"
    error: str | None
    outputs: list
    seconds: float

    def to_json(self):
        return {"kind": self.kind, "status": self.status, "error": self.error,
                "outputs": self.outputs, "seconds": round(self.seconds, 6)}


@dataclass
class RunReport:
    results: list
    version: str

    @property
    def ok(self):
        return all(r.status == "ok" for r in self.results)

    def to_json(self):
        return {"version": self.version, "ok": self.ok,
                "tasks": [r.to_json() for r in self.results]}


def _load_system_point(task):
    system = system_from_json(task["system"])
    x = point_from_json(system.alphabet, task["point"])
    system.validate(x)
    return system, x


def _csv_text(rows) -> str:
    # (series, index, Weight) triples: exact rational next to a float rendering
    lines = ["series,depth,value,value_float"]
    for series, depth, value in rows:
        lines.append(f"{series},{depth},{value},{float(value)!r}")
    return "\n".join(lines) + "\n"


def _run_explore(task):
    system, x = _load_system_point(task)
    ball = explore_ball(system, x, task["radius"],
                        task.get("budget", 2_000_000))
    rows = [("sphere_mass", d, ball.layer_mass(d)) for d in range(len(ball.layers))]
    return ball.to_json(), _csv_text(rows)


def _run_classify(task):
    system, x = _load_system_point(task)
    depth = task.get("depth", 10)
    result = classify_point(system, x, depth)
    rows = [(name, idx, w) for name, idx, w in classification_series(system, x, depth)]
    return result.to_json(), _csv_text(rows)


def _run_core(task):
    system, x = _load_system_point(task)
    threshold = Weight(task["threshold"]) if "threshold" in task else None
    report = rn_core_truncated(system, x, task["radius"], threshold,
                               task.get("budget", 2_000_000))
    rows = []
    for v in report.vertices:
        mass = v.exclusion.total if v.exclusion else Weight(0)
        rows.append((v.status, v.index, mass))
    return report.to_json(), _csv_text(rows)


def _run_mtp(task):
    system = system_from_json(task["system"])
    kernel_name = task["kernel"]
    samples = task["samples"]
    seed = task["seed"]
    horizon = task.get("horizon", 1)
    threads = task.get("threads") or _default_threads()
    if kernel_name == "preimage-unit":
        est = verify_preimage_unit(system, None, samples, seed, threads)
    elif kernel_name == "inverse-mass-sum":
        est = verify_inverse_mass_sum(system, None, samples, horizon, seed, threads)
    elif kernel_name == "balance":
        summary = backward_balance_check(system, None, samples, seed)
        line = (f"{summary.system},balance,{summary.samples},{summary.seed},"
                f"{summary.mean_exact.replace(',', ';')},{summary.mean},{summary.se},"
                f"{summary.frac_above_one},{summary.frac_below_one},"
                f"{summary.frac_equal_one}")
        return summary.to_json(), line + "\n"
    else:
        est = estimate_mtp(system, None, TransportKernel(kernel_name, horizon),
                           samples, seed, threads)
    return est.to_json(), est.csv_line() + "\n"


def _run_tree(task):
    with open(task["input"], "r", encoding="utf-8") as fh:
        tree, coloring, weights, dedges = parse_tree_text(fh.read())
    op = task["op"]

    def dedge_of(field):
        if field not in task:
            _fail(f"tree op {op!r} needs field {field!r}", field)
        u, v = task[field]
        return DirectedEdge(u, v)

    if op == "half-space":
        side = half_space(tree, dedge_of("edge"))
        doc = {"op": op, "half_space": sorted(side)}
        rows = [("half_space_size", 0, Weight(len(side)))]
    elif op == "leq":
        doc = {"op": op, "leq": edge_leq(tree, dedge_of("edge"), dedge_of("edge2"))}
        rows = [("leq", 0, Weight(1 if doc["leq"] else 0))]
    elif op == "coherent":
        doc = {"op": op, "coherent": is_coherent(tree, dedges)}
        rows = [("coherent", 0, Weight(1 if doc["coherent"] else 0))]
    elif op == "transversal":
        result = coherent_transversal(tree, dedges)
        doc = {"op": op, **result.to_json()}
        rows = [("classes", 0, Weight(len(result.classes)))]
    elif op == "helly":
        family = [set(s) for s in task.get("subtrees", [])]
        vertex = helly_common_vertex(tree, family)
        doc = {"op": op, "vertex": vertex}
        rows = [("vertex", 0, Weight(int(vertex)))]
    elif op == "hull":
        hull = convex_hull(tree, set(task.get("set", [])))
        doc = {"op": op, "hull": sorted(hull)}
        rows = [("hull_size", 0, Weight(len(hull)))]
    elif op == "lex":
        path = lex_least_path(tree, coloring or {}, task["source"],
                              set(task.get("targets", [])))
        doc = {"op": op, "path": list(path)}
        rows = [("path_length", 0, Weight(len(path) - 1))]
    elif op == "prune":
        bound = Weight(task.get("bound", "1/1"))
        records = prune_rho_finite(tree, weights or {}, set(task.get("set", [])), bound)
        doc = {"op": op, "pruned": [r.to_json() for r in records]}
        rows = [(str(r.edge), i, r.mass) for i, r in enumerate(records)]
    else:
        raise AssertionError(op)
    return doc, _csv_text(rows)


def _run_walk(task):
    d = task["d"]
    m = task.get("m", "uniform")
    m_dict = None if m == "uniform" else {s: Fraction(v) for s, v in m.items()}
    walks = task["walks"]
    window = task.get("window", 24)
    prefix_len = task.get("prefix_len", 2)
    seed = task["seed"]
    budget = task.get("budget", 100_000)
    counts: dict[str, int] = {}
    total_steps = 0
    for i in range(walks):
        sample = random_walk_boundary_sample(d, m_dict, f"{seed}/{i}", window,
                                             prefix_len, budget)
        counts[sample.prefix] = counts.get(sample.prefix, 0) + 1
        total_steps += sample.steps
    measure = HittingMeasure.make(d, m_dict)
    doc = {"d": d, "walks": walks, "window": window, "prefix_len": prefix_len,
           "seed": seed, "mean_steps": total_steps / walks,
           "frequencies": {}, "expected": {}}
    rows = []
    for word in sorted(counts):
        freq = Fraction(counts[word], walks)
        doc["frequencies"][word] = f"{freq.numerator}/{freq.denominator}"
        doc["expected"][word] = str(cylinder_mass(measure, word))
        rows.append((word, counts[word], Weight(freq)))
    return doc, _csv_text(rows)


def _run_expand(task):
    base = system_from_json(task["base"])
    tsys = TildeSystem(base, task["n_max"])
    x = point_from_json(base.alphabet, task["point"])
    base.validate(x)
    levels = task["levels"]
    doc = {"base": base.to_json(), "n_max": task["n_max"], "point": x.to_json(),
           "visits": []}
    rows = []
    for n in range(levels + 1):
        value = tsys.visit_weight(x, n)
        bound = Weight(1, 2) ** n
        doc["visits"].append({"level": n, "value": str(value),
                              "bound": str(bound), "within": value <= bound})
        rows.append(("visit_weight", n, value))
    # a short orbit trace through the tagged copies
    tp = TaggedPoint(x, None)
    trace = []
    for _ in range(min(3 * levels + 6, 64)):
        trace.append(str(tp))
        nxt = tsys.forward(tp)
        if not isinstance(nxt, TaggedPoint):
            trace.append(f"truncated@{nxt.needed_level}")
            break
        tp = nxt
    doc["orbit_head"] = trace
    return doc, _csv_text(rows)


RUNNERS = {
    "explore": _run_explore,
    "classify": _run_classify,
    "core": _run_core,
    "mtp": _run_mtp,
    "tree": _run_tree,
    "walk": _run_walk,
    "expand": _run_expand,
}


def _default_threads():
    try:
        return max(1, int(os.environ.get("TREETOP_THREADS", "1")))
    except ValueError:
        return 1


def run_plan(plan: ExperimentPlan, base_dir: str = ".") -> RunReport:
    """Execute the tasks in order, collecting per-task errors instead of
    crashing; budget overruns are task failures."""
    results = []
    for task in plan.tasks:
        start = time.monotonic()
        outputs = []
        try:
            doc, csv_text = RUNNERS[task["kind"]](task)
            out = task.get("out")
            if out:
                stem = out if os.path.isabs(out) else os.path.join(base_dir, out)
                json_path, csv_path = stem + ".json", stem + ".csv"
                with open(json_path, "w", encoding="utf-8") as fh:
                    fh.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
                with open(csv_path, "w", encoding="utf-8") as fh:
                    fh.write(csv_text)
                outputs = [json_path, csv_path]
            results.append(TaskResult(task["kind"], "ok", None, outputs,
                                      time.monotonic() - start))
        except (TreetopError, OSError) as e:
            results.append(TaskResult(task["kind"], "error",
                                      f"{type(e).__name__}: {e}", outputs,
                                      time.monotonic() - start))
    return RunReport(results, __version__)
