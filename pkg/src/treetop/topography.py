"""Truncated exploration of the orbit trees and the quantities that govern
end classification: ball exploration with exact vertex weights, back-sphere
and back-orbit masses, the backward geodesic weight, forward traces,
truncated tail sups, half-space masses, and the truncated core report.

Truncated quantities never claim limits.  Reports carry monotone exact lower
bounds plus optional certificates supplied by the system's analytic oracles;
only certificates assert infinitude or exact totals.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BudgetError, InvalidEdgeError, PartialBallError
from .points import SymbolicPoint
from .systems import System
from .weights import INFINITY, Weight

DEFAULT_BUDGET = 2_000_000


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Analytic statement about a mass that truncation alone cannot reach."""

    kind: str  # "infinite" | "total"
    value: Weight | None
    reason: str

    def to_json(self):
        return {"kind": self.kind,
                "value": None if self.value is None else str(self.value),
                "reason": self.reason}


@dataclass(frozen=True)
class MassReport:
    """Depth-indexed nondecreasing exact lower bounds, plus an optional
    certificate.  `exhausted` means the underlying set was fully enumerated,
    so the last bound is the exact total."""

    bounds: tuple  # ((depth, Weight), ...)
    certificate: Certificate | None = None
    exhausted: bool = False
    truncated: bool = False

    @property
    def last_bound(self) -> Weight:
        return self.bounds[-1][1] if self.bounds else Weight(0)

    @property
    def certified_total(self) -> Weight | None:
        if self.certificate is None:
            return None
        if self.certificate.kind == "infinite":
            return INFINITY
        return self.certificate.value

    def to_json(self):
        return {"bounds": [[d, str(w)] for d, w in self.bounds],
                "certificate": self.certificate.to_json() if self.certificate else None,
                "exhausted": self.exhausted,
                "truncated": self.truncated}


# ---------------------------------------------------------------------------
# Ball exploration
# ---------------------------------------------------------------------------


@dataclass
class BallVertex:
    index: int
    point: object
    parent: int | None
    direction: str  # "root" | "fwd" | "back"
    depth: int
    weight: Weight      # rho^{base}(v), exact
    path_mass: Weight   # rho^{base}([base, v]), exact


@dataclass
class Ball:
    """Radius-r snapshot of the orbit tree around a basepoint.

    Vertices are nodes of the tree unfolding: each carries its point value,
    a parent link, the generating direction, and the exact weight relative
    to the basepoint.
    """

    base: object
    radius: int
    vertices: list[BallVertex]
    layers: list[list[int]]
    truncated: bool = False

    @property
    def size(self):
        return len(self.vertices)

    def sphere_sizes(self):
        return [len(layer) for layer in self.layers]

    def layer_mass(self, depth: int) -> Weight:
        total = Weight(0)
        for i in self.layers[depth]:
            total = total + self.vertices[i].weight
        return total

    def ancestors(self, i: int):
        v = self.vertices[i]
        while v.parent is not None:
            yield v.parent
            v = self.vertices[v.parent]

    def is_descendant_or_self(self, i: int, root_idx: int) -> bool:
        if i == root_idx:
            return True
        return any(a == root_idx for a in self.ancestors(i))

    def to_json(self):
        return {"radius": self.radius,
                "truncated": self.truncated,
                "sphere_sizes": self.sphere_sizes(),
                "vertices": [{
                    "index": v.index,
                    "parent": v.parent,
                    "direction": v.direction,
                    "depth": v.depth,
                    "weight": str(v.weight),
                    "point": str(v.point) if isinstance(v.point, SymbolicPoint) else None,
                } for v in self.vertices]}


def _explore(system: System, base, radius: int, budget: int,
             skip_root_forward: bool = False, skip_root_preimage=None,
             on_budget: str = "raise") -> Ball:
    """Breadth-first unfolding of the orbit tree around `base`.

    Children of a forward-reached vertex are its forward image plus its back
    siblings (preimages of the image other than the vertex itself); children
    of a backward-reached vertex are all its preimages; the root expands in
    every direction unless a branch is explicitly skipped.
    """
    one = Weight(1)
    root = BallVertex(0, base, None, "root", 0, one, one)
    ball = Ball(base, radius, [root], [[0]])
    frontier = [0]

    def add(parent: BallVertex, point, direction: str, weight: Weight):
        idx = len(ball.vertices)
        v = BallVertex(idx, point, parent.index, direction, parent.depth + 1,
                       weight, parent.path_mass + weight)
        ball.vertices.append(v)
        return idx

    for depth in range(1, radius + 1):
        layer: list[int] = []
        for vi in frontier:
            v = ball.vertices[vi]
            if len(ball.vertices) > budget:
                ball.truncated = True
                ball.layers.append(layer)
                if on_budget == "raise":
                    raise PartialBallError(
                        f"vertex budget {budget} exceeded at depth {depth}",
                        partial=ball, frontier=frontier)
                return ball
            if v.direction == "back":
                backs = system.preimages(v.point)
            else:
                is_root = v.direction == "root"
                if not (is_root and skip_root_forward):
                    fw = system.forward(v.point)
                    layer.append(add(v, fw, "fwd", v.weight * system.step_weight(v.point)))
                if is_root:
                    backs = system.preimages(v.point)
                    if skip_root_preimage is not None:
                        backs = [y for y in backs if y != skip_root_preimage]
                else:
                    backs = system.back_siblings(ball.vertices[v.parent].point)
            for y in backs:
                layer.append(add(v, y, "back", v.weight / system.step_weight(y)))
        ball.layers.append(layer)
        frontier = layer
        if not frontier:
            break
    return ball


def explore_ball(system: System, x, r: int, vertex_budget: int = DEFAULT_BUDGET) -> Ball:
    """All vertices of the orbit tree within distance r of x, with exact
    weights.  Raises PartialBallError (carrying the frontier) on budget."""
    return _explore(system, x, r, vertex_budget)


def back_tree(system: System, x, depth: int, budget: int = DEFAULT_BUDGET,
              on_budget: str = "raise") -> Ball:
    """The part of the ball behind x: iterated preimages only."""
    return _explore(system, x, depth, budget, skip_root_forward=True,
                    on_budget=on_budget)


# ---------------------------------------------------------------------------
# Backward masses
# ---------------------------------------------------------------------------


def back_sphere_mass(system: System, x, n: int, budget: int = DEFAULT_BUDGET) -> Weight:
    """Exact mass rho^x(f^{-n}(x)) of the n-th preimage level."""
    tree = back_tree(system, x, n, budget)
    if len(tree.layers) <= n:
        return Weight(0)
    return tree.layer_mass(n)


def back_orbit_mass(system: System, x, depth: int,
                    budget: int = DEFAULT_BUDGET) -> MassReport:
    """Partial sums of the full back-orbit mass P(x) through `depth` levels,
    level 0 (the point itself) included."""
    tree = back_tree(system, x, depth, budget, on_budget="truncate")
    bounds = []
    running = Weight(0)
    for d, layer in enumerate(tree.layers):
        for i in layer:
            running = running + tree.vertices[i].weight
        bounds.append((d, running))
    exhausted = not tree.truncated and len(tree.layers[-1]) == 0
    cert = None
    if exhausted:
        cert = Certificate("total", running, "back orbit fully enumerated")
        oracle = system.back_orbit_certificate(x)
        if oracle is not None and oracle[0] == "total" and oracle[1] != running:
            raise AssertionError(
                f"analytic back-orbit total {oracle[1]} disagrees with enumeration {running}")
    else:
        oracle = system.back_orbit_certificate(x)
        if oracle is not None:
            if oracle[0] == "infinite":
                cert = Certificate("infinite", None, oracle[1])
            else:
                cert = Certificate("total", oracle[1], oracle[2])
    return MassReport(tuple(bounds), cert, exhausted, tree.truncated)


def sigma_backward(system: System, x, depth: int,
                   budget: int = DEFAULT_BUDGET) -> MassReport:
    """Running maximum, over back-orbit vertices v within `depth`, of the
    exact geodesic mass rho^x([x, v])."""
    tree = back_tree(system, x, depth, budget, on_budget="truncate")
    bounds = []
    best = Weight(0)
    for d, layer in enumerate(tree.layers):
        for i in layer:
            pm = tree.vertices[i].path_mass
            if pm > best:
                best = pm
        bounds.append((d, best))
    exhausted = not tree.truncated and len(tree.layers[-1]) == 0
    cert = None
    if exhausted:
        cert = Certificate("total", best, "back orbit fully enumerated")
    return MassReport(tuple(bounds), cert, exhausted, tree.truncated)


@dataclass(frozen=True)
class TailSup:
    """Truncated sup of weights over back-orbit levels n..depth.

    `empty` marks the distinguished case of an exhausted finite back orbit
    with no vertices at the requested levels; it is not the value 0.
    `certified_exact` is set when the system certifies level-wise weights
    that make the truncated max the true sup.
    """

    value: Weight | None
    empty: bool
    certified_exact: bool
    level_from: int
    level_to: int

    def to_json(self):
        return {"value": None if self.value is None else str(self.value),
                "empty": self.empty, "certified_exact": self.certified_exact,
                "levels": [self.level_from, self.level_to]}


def back_tail_sup(system: System, x, n: int, depth: int | None = None,
                  budget: int = DEFAULT_BUDGET) -> TailSup:
    """Exact max of rho^x(y) over back-orbit vertices at levels n..depth."""
    if depth is None:
        depth = n
    if depth < n:
        raise ValueError("depth must be at least n")
    tree = back_tree(system, x, depth, budget)
    best = None
    for d in range(n, min(depth, len(tree.layers) - 1) + 1):
        for i in tree.layers[d]:
            w = tree.vertices[i].weight
            if best is None or w > best:
                best = w
    if best is None:
        return TailSup(None, True, True, n, depth)
    certified = False
    exact_n = system.back_level_weight_exact(n)
    if exact_n is not None and best == exact_n:
        # constant per-level weights that decay with the level: the nearest
        # retained level dominates everything deeper
        exact_next = system.back_level_weight_exact(n + 1)
        certified = exact_next is not None and exact_next <= exact_n
    return TailSup(best, False, certified, n, depth)


# ---------------------------------------------------------------------------
# Forward trace
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ForwardTrace:
    """rho^x(f^j(x)) for j = 0..n with partial sums and running extremes."""

    weights: tuple
    partial_sums: tuple
    running_min: tuple
    running_max: tuple

    def to_json(self):
        return {"weights": [str(w) for w in self.weights],
                "partial_sums": [str(w) for w in self.partial_sums],
                "running_min": [str(w) for w in self.running_min],
                "running_max": [str(w) for w in self.running_max]}


def forward_trace(system: System, x, n: int) -> ForwardTrace:
    weights = [Weight(1)]
    z = x
    for _ in range(n):
        weights.append(weights[-1] * system.step_weight(z))
        z = system.forward(z)
    sums, mins, maxs = [], [], []
    acc = Weight(0)
    for w in weights:
        acc = acc + w
        sums.append(acc)
        mins.append(w if not mins else min(mins[-1], w))
        maxs.append(w if not maxs else max(maxs[-1], w))
    return ForwardTrace(tuple(weights), tuple(sums), tuple(mins), tuple(maxs))


# ---------------------------------------------------------------------------
# Half-space masses
# ---------------------------------------------------------------------------


def half_space_mass(system: System, origin: SymbolicPoint, terminus: SymbolicPoint,
                    depth: int, budget: int = DEFAULT_BUDGET) -> MassReport:
    """Mass of the origin side of the directed tree edge (origin, terminus),
    normalized at the origin, explored to `depth`.

    The two vertices must be adjacent: terminus = f(origin) puts the whole
    back orbit of the origin on the origin side; origin = f(terminus) puts
    everything except the terminus branch there.
    """
    if not (isinstance(origin, SymbolicPoint) and isinstance(terminus, SymbolicPoint)):
        raise TypeError("half-space masses are computed on exact points")
    if system.forward(origin) == terminus:
        report = back_orbit_mass(system, origin, depth, budget)
        return report
    if system.forward(terminus) != origin:
        raise InvalidEdgeError("the two points are not tree-adjacent")
    tree = _explore(system, origin, depth, budget,
                    skip_root_preimage=terminus, on_budget="truncate")
    bounds = []
    running = Weight(0)
    for d, layer in enumerate(tree.layers):
        for i in layer:
            running = running + tree.vertices[i].weight
        bounds.append((d, running))
    exhausted = not tree.truncated and len(tree.layers[-1]) == 0
    cert = None
    if exhausted:
        cert = Certificate("total", running, "side fully enumerated")
    else:
        infinite, reason = system.forward_side_infinite()
        if infinite:
            cert = Certificate("infinite", None, reason)
    return MassReport(tuple(bounds), cert, exhausted, tree.truncated)


# ---------------------------------------------------------------------------
# Truncated core report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Exclusion:
    """Why a vertex is outside the core: a half-space containing it whose
    total mass is certified finite."""

    edge_origin: object   # point on the finite side
    edge_terminus: object
    total: Weight
    reason: str

    def to_json(self):
        def render(p):
            return str(p) if isinstance(p, SymbolicPoint) else repr(p)
        return {"edge": [render(self.edge_origin), render(self.edge_terminus)],
                "total": str(self.total), "reason": self.reason}


@dataclass(frozen=True)
class CoreVertex:
    index: int
    point: object
    status: str  # "in-core" | "excluded"
    exclusion: Exclusion | None

    def to_json(self):
        return {"index": self.index,
                "point": str(self.point) if isinstance(self.point, SymbolicPoint) else None,
                "status": self.status,
                "exclusion": self.exclusion.to_json() if self.exclusion else None}


@dataclass(frozen=True)
class CoreReport:
    radius: int
    threshold: Weight
    vertices: tuple
    checked_infinite: int  # half-space certificates that came back infinite

    @property
    def all_in_core(self):
        return all(v.status == "in-core" for v in self.vertices)

    @property
    def all_excluded(self):
        return all(v.status == "excluded" for v in self.vertices)

    def to_json(self):
        return {"radius": self.radius, "threshold": str(self.threshold),
                "checked_infinite": self.checked_infinite,
                "vertices": [v.to_json() for v in self.vertices]}


def back_side_certificate(system: System, point, depth_cap: int = 64,
                          budget: int = 100_000) -> Certificate | None:
    """Certificate for the total mass of the back orbit of `point`.

    Prefers full enumeration (exact, assumption free); falls back to the
    system's analytic oracle.  Returns None when neither settles it.
    """
    oracle = system.back_orbit_certificate(point)
    if oracle is not None and oracle[0] == "infinite":
        return Certificate("infinite", None, oracle[1])
    report = back_orbit_mass(system, point, depth_cap, budget)
    if report.exhausted:
        return report.certificate
    if oracle is not None:
        return Certificate("total", oracle[1], oracle[2])
    return None


def rn_core_truncated(system: System, x, r: int, threshold: Weight | None = None,
                      budget: int = DEFAULT_BUDGET) -> CoreReport:
    """Classify every vertex of the radius-r ball: excluded when some
    half-space containing it carries a certified finite total, in-core (at
    this depth) otherwise.  Exclusion certificates are attached and
    re-verifiable."""
    if threshold is None:
        threshold = INFINITY
    ball = explore_ball(system, x, r, budget)
    fwd_infinite, _ = system.forward_side_infinite()
    out = []
    checked_infinite = 0
    for v in ball.vertices:
        # the half-space behind this vertex's forward edge is its back orbit,
        # which contains the vertex itself
        cert = back_side_certificate(system, v.point)
        if cert is not None and cert.kind == "total":
            out.append(CoreVertex(v.index, v.point, "excluded",
                                  Exclusion(v.point, system.forward(v.point),
                                            cert.value, cert.reason)))
            continue
        if cert is not None and cert.kind == "infinite":
            checked_infinite += 1
        if fwd_infinite:
            checked_infinite += 1
        out.append(CoreVertex(v.index, v.point, "in-core", None))
    return CoreReport(r, threshold, tuple(out), checked_infinite)


# ---------------------------------------------------------------------------
# End probes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EndProbe:
    """A single walk toward an end with the cocycle data seen on the way."""

    direction: str
    selector: str
    weights: tuple
    partial_sums: tuple
    level_sups: tuple | None  # backward probes: per-depth sup over the level

    def to_json(self):
        return {"direction": self.direction, "selector": self.selector,
                "weights": [str(w) for w in self.weights],
                "partial_sums": [str(w) for w in self.partial_sums],
                "level_sups": None if self.level_sups is None
                else [str(w) for w in self.level_sups]}


def probe_end(system: System, x, depth: int, direction: str = "forward",
              selector="greatest-weight", level_budget: int = 100_000) -> EndProbe:
    """Walk `depth` steps toward an end.

    Forward probes follow f.  Backward probes choose one preimage per step:
    by greatest step mass (least-point tiebreak), by least point, or by an
    explicit index list into the point-sorted preimages.
    """
    if direction == "forward":
        trace = forward_trace(system, x, depth)
        return EndProbe("forward", "f", trace.weights, trace.partial_sums, None)

    weights = [Weight(1)]
    sums = [Weight(1)]
    z = x
    label = selector if isinstance(selector, str) else "explicit"
    for step in range(depth):
        pres = system.preimages(z)
        if not pres:
            break
        if selector == "greatest-weight":
            # largest rho means smallest step weight; break ties by point order
            least = min(system.step_weight(y) for y in pres)
            z = min(y for y in pres if system.step_weight(y) == least)
        elif selector == "least-point":
            z = min(pres)
        else:
            z = sorted(pres)[selector[step] % len(pres)]
        weights.append(weights[-1] / system.step_weight(z))
        sums.append(sums[-1] + weights[-1])
    sups = None
    try:
        tree = back_tree(system, x, min(depth, 12), level_budget, on_budget="truncate")
        sups = tuple(max((tree.vertices[i].weight for i in layer), default=Weight(0))
                     for layer in tree.layers)
    except BudgetError:
        pass
    return EndProbe("backward", label, tuple(weights), tuple(sums), sups)
