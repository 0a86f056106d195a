"""Exact algorithms on explicit finite acyclic graphs.

Half-spaces, the containment order on directed edges, coherent edge sets and
their transversals, the common-vertex search for pairwise intersecting
subtrees, convex hulls, lexicographically least paths, and weighted pruning
of half-spaces behind a convex set.  Vertices are opaque totally ordered
tokens; every "any vertex" answer uses least-identifier tie-breaking so the
outputs are reproducible.

Trees here stay small (<= 10^4 vertices), so half-spaces are recomputed by
component search instead of being cached.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import (
    ColoringError,
    ConvexityError,
    CoherenceError,
    DisjointPairError,
    EmptyFamilyError,
    InvalidEdgeError,
    InvalidSubtreeError,
    NoPathError,
    TreetopError,
)
from .weights import Weight


def edge_key(u, v):
    """Normalized undirected edge identifier."""
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True, order=True)
class DirectedEdge:
    origin: object
    terminus: object

    @property
    def undirected(self):
        return edge_key(self.origin, self.terminus)

    def reverse(self) -> "DirectedEdge":
        return DirectedEdge(self.terminus, self.origin)

    def __str__(self):
        return f"{self.origin}->{self.terminus}"


class FiniteTree:
    """A finite acyclic graph (forest) on explicitly listed vertices."""

    def __init__(self, vertices, edges):
        self.vertices = tuple(sorted(set(vertices)))
        vertex_set = set(self.vertices)
        normalized = set()
        for u, v in edges:
            if u == v:
                raise TreetopError(f"self-loop at {u!r}")
            if u not in vertex_set or v not in vertex_set:
                raise TreetopError(f"edge ({u!r}, {v!r}) uses an unlisted vertex")
            normalized.add(edge_key(u, v))
        self.edges = frozenset(normalized)
        adj = {v: [] for v in self.vertices}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        self._adj = {v: tuple(sorted(ns)) for v, ns in adj.items()}
        self._components = self._split_components()
        for comp in self._components:
            inner = sum(1 for u, v in self.edges if u in comp)
            if inner != len(comp) - 1:
                raise TreetopError(
                    f"component {sorted(comp)} has {inner} edges, expected {len(comp) - 1}: "
                    "not acyclic")

    def _split_components(self):
        seen = set()
        comps = []
        for start in self.vertices:
            if start in seen:
                continue
            comp = {start}
            queue = deque([start])
            while queue:
                v = queue.popleft()
                for w in self._adj[v]:
                    if w not in comp:
                        comp.add(w)
                        queue.append(w)
            seen |= comp
            comps.append(frozenset(comp))
        return comps

    def neighbors(self, v):
        try:
            return self._adj[v]
        except KeyError:
            raise TreetopError(f"unknown vertex {v!r}") from None

    def has_edge(self, u, v) -> bool:
        return edge_key(u, v) in self.edges

    def components(self):
        return list(self._components)

    def component_of(self, v) -> frozenset:
        for comp in self._components:
            if v in comp:
                return comp
        raise TreetopError(f"unknown vertex {v!r}")

    def directed_edges(self):
        for u, v in sorted(self.edges):
            yield DirectedEdge(u, v)
            yield DirectedEdge(v, u)

    def check_edge(self, e: DirectedEdge):
        if not self.has_edge(e.origin, e.terminus):
            raise InvalidEdgeError(f"{e} is not an edge of this tree")


# ---------------------------------------------------------------------------
# Half-spaces and the containment order
# ---------------------------------------------------------------------------


def half_space(tree: FiniteTree, e: DirectedEdge) -> frozenset:
    """Vertices of the component of origin(e) after removing the edge."""
    tree.check_edge(e)
    blocked = e.undirected
    seen = {e.origin}
    queue = deque([e.origin])
    while queue:
        v = queue.popleft()
        for w in tree.neighbors(v):
            if edge_key(v, w) == blocked or w in seen:
                continue
            seen.add(w)
            queue.append(w)
    return frozenset(seen)


def edge_leq(tree: FiniteTree, e0: DirectedEdge, e1: DirectedEdge) -> bool:
    """Containment order: the origin side of e0 inside the origin side of e1."""
    return half_space(tree, e0) <= half_space(tree, e1)


# ---------------------------------------------------------------------------
# Coherent sets of directed edges
# ---------------------------------------------------------------------------


def coherence_witness(tree: FiniteTree, H) -> tuple | None:
    """A pair of edges of H in one component whose terminus sides are
    disjoint, or None when H is coherent."""
    H = sorted(set(H))
    for e in H:
        tree.check_edge(e)
    terminus_sides = {e: half_space(tree, e.reverse()) for e in H}
    for i, e0 in enumerate(H):
        comp = tree.component_of(e0.origin)
        for e1 in H[i + 1:]:
            if e1.origin not in comp:
                continue
            if not (terminus_sides[e0] & terminus_sides[e1]):
                return (e0, e1)
    return None


def is_coherent(tree: FiniteTree, H) -> bool:
    return coherence_witness(tree, H) is None


@dataclass(frozen=True)
class Transversal:
    """Maximal edges of a coherent set, the classes they carve out of the
    union of origin sides, and the origins of the maximal edges (one per
    class)."""

    maximal_edges: tuple
    classes: tuple  # frozensets, aligned with maximal_edges
    representatives: tuple

    def to_json(self):
        return {"maximal_edges": [str(e) for e in self.maximal_edges],
                "classes": [sorted(map(str, c)) for c in self.classes],
                "representatives": [str(r) for r in self.representatives]}


def coherent_transversal(tree: FiniteTree, H) -> Transversal:
    """Maximal members of a coherent edge set and the partition they induce.

    The origin sides of a coherent set are pairwise disjoint or nested, so
    the classes of the induced relation on the union of origin sides are
    exactly the origin sides of the maximal edges, and their origins form a
    transversal.
    """
    witness = coherence_witness(tree, H)
    if witness is not None:
        raise CoherenceError(
            f"edges {witness[0]} and {witness[1]} have disjoint terminus sides",
            witness=witness)
    H = sorted(set(H))
    sides = {e: half_space(tree, e) for e in H}
    # distinct directed edges always carve distinct half-spaces, so strict
    # containment is the whole order
    maximal = [e for e in H if not any(sides[e] < sides[f] for f in H if f != e)]
    classes = tuple(sides[e] for e in maximal)
    reps = tuple(e.origin for e in maximal)
    return Transversal(tuple(maximal), classes, reps)


# ---------------------------------------------------------------------------
# Common vertex of pairwise intersecting subtrees
# ---------------------------------------------------------------------------


def _check_subtree(tree: FiniteTree, member, index: int) -> frozenset:
    member = frozenset(member)
    if not member:
        raise InvalidSubtreeError(f"family member {index} is empty")
    start = min(member)
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in tree.neighbors(v):
            if w in member and w not in seen:
                seen.add(w)
                queue.append(w)
    if seen != member:
        raise InvalidSubtreeError(
            f"family member {index} does not induce a connected subgraph")
    return member


def helly_common_vertex(tree: FiniteTree, family):
    """A vertex lying in every member of a family of pairwise intersecting
    subtrees of one tree.

    Found through the directed edges whose origin side misses some member:
    that edge set is coherent, and the terminus of any of its maximal
    elements belongs to every member.  Among the qualifying vertices the
    least identifier is returned.
    """
    members = [(i, _check_subtree(tree, m, i)) for i, m in enumerate(family)]
    if not members:
        raise EmptyFamilyError("family of subtrees is empty")
    for i, (ia, a) in enumerate(members):
        for ib, b in members[i + 1:]:
            if not (a & b):
                raise DisjointPairError(
                    f"members {ia} and {ib} are disjoint", witness=(ia, ib))
    comp = tree.component_of(min(members[0][1]))
    H = []
    sides = {}
    for e in tree.directed_edges():
        if e.origin not in comp:
            continue
        side = half_space(tree, e)
        if any(not (side & m) for _, m in members):
            H.append(e)
            sides[e] = side
    if not H:
        # every half-space meets every member, which forces each member to
        # be the whole component
        return min(comp)
    candidates = set()
    for e in H:
        if not any(f != e and sides[e] < sides[f] for f in H):
            candidates.add(e.terminus)
    good = [v for v in candidates if all(v in m for _, m in members)]
    if not good:
        raise AssertionError("maximal-edge terminus missed a member; tree invariant broken")
    return min(good)


# ---------------------------------------------------------------------------
# Convex hulls
# ---------------------------------------------------------------------------


def convex_hull(tree: FiniteTree, S) -> frozenset:
    """Union of the geodesics between members of S: computed per component by
    pruning leaves that are not in S until none remain."""
    S = frozenset(S)
    for v in S:
        tree.component_of(v)
    hull = set()
    for comp in tree.components():
        part = S & comp
        if not part:
            continue
        keep = set(comp)
        degree = {v: sum(1 for w in tree.neighbors(v) if w in keep) for v in keep}
        leaves = deque(v for v in keep if degree[v] <= 1 and v not in part)
        while leaves:
            v = leaves.popleft()
            if v not in keep:
                continue
            keep.discard(v)
            for w in tree.neighbors(v):
                if w in keep:
                    degree[w] -= 1
                    if degree[w] <= 1 and w not in part:
                        leaves.append(w)
        hull |= keep
    return frozenset(hull)


def is_convex(tree: FiniteTree, S) -> bool:
    return convex_hull(tree, S) == frozenset(S)


# ---------------------------------------------------------------------------
# Lexicographically least paths
# ---------------------------------------------------------------------------


def check_proper_coloring(tree: FiniteTree, coloring: dict) -> None:
    for u, v in tree.edges:
        if edge_key(u, v) not in coloring:
            raise ColoringError(f"edge {edge_key(u, v)} has no color")
    for v in tree.vertices:
        seen = {}
        for w in tree.neighbors(v):
            c = coloring[edge_key(v, w)]
            if c in seen:
                raise ColoringError(
                    f"edges {edge_key(v, seen[c])} and {edge_key(v, w)} at {v!r} "
                    f"share color {c}")
            seen[c] = w


def greedy_proper_coloring(tree: FiniteTree) -> dict:
    """Deterministic proper edge coloring: scan edges in sorted order and use
    the least color free at both endpoints."""
    coloring = {}
    used = {v: set() for v in tree.vertices}
    for u, v in sorted(tree.edges):
        c = 0
        while c in used[u] or c in used[v]:
            c += 1
        coloring[edge_key(u, v)] = c
        used[u].add(c)
        used[v].add(c)
    return coloring


def lex_least_path(tree: FiniteTree, coloring: dict, x, A) -> tuple:
    """Shortest path from x to the set A; among shortest paths, the one whose
    color word is lexicographically least.  In a forest the path to each
    target is unique, so the choice is between equally near targets."""
    check_proper_coloring(tree, coloring)
    A = frozenset(A)
    if not A:
        raise NoPathError("target set is empty")
    comp = tree.component_of(x)
    parent = {x: None}
    dist = {x: 0}
    queue = deque([x])
    while queue:
        v = queue.popleft()
        for w in tree.neighbors(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                parent[w] = v
                queue.append(w)
    targets = [a for a in A if a in comp]
    if not targets:
        raise NoPathError(f"no member of the target set is reachable from {x!r}")
    best = None
    d_min = min(dist[a] for a in targets)
    for a in targets:
        if dist[a] != d_min:
            continue
        path = []
        v = a
        while v is not None:
            path.append(v)
            v = parent[v]
        path.reverse()
        colors = tuple(coloring[edge_key(u, v)] for u, v in zip(path, path[1:]))
        if best is None or colors < best[0]:
            best = (colors, tuple(path))
    return best[1]


# ---------------------------------------------------------------------------
# Pruning: half-spaces behind a convex set
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrunedHalfSpace:
    edge: DirectedEdge
    mass: Weight
    exceeds_bound: bool

    def to_json(self):
        return {"edge": str(self.edge), "mass": str(self.mass),
                "exceeds_bound": self.exceeds_bound}


def prune_rho_finite(tree: FiniteTree, weights: dict, Y, bound: Weight) -> list:
    """Every directed edge of the components meeting Y whose origin side
    misses Y, with the exact weight mass of that origin side and a flag for
    masses exceeding the bound."""
    Y = frozenset(Y)
    if convex_hull(tree, Y) != Y:
        raise ConvexityError("the reference set is not convex in the tree")
    saturation = set()
    for comp in tree.components():
        if comp & Y:
            saturation |= comp
    for v in saturation:
        w = weights.get(v)
        if w is None or not isinstance(w, Weight) or w.is_infinite or w <= Weight(0):
            raise TreetopError(f"vertex {v!r} needs a finite positive weight")
    out = []
    for e in sorted(tree.directed_edges()):
        if e.origin not in saturation:
            continue
        side = half_space(tree, e)
        if side & Y:
            continue
        mass = Weight(0)
        for v in side:
            mass = mass + weights[v]
        out.append(PrunedHalfSpace(e, mass, mass > bound))
    return out


# ---------------------------------------------------------------------------
# Line-oriented text format
# ---------------------------------------------------------------------------


def parse_tree_text(text: str):
    """Parse the line format:

        tree <n>
        edge u v [color]
        weight v num/den
        dedge u v

    Vertices are the integers 0..n-1.  Returns (tree, coloring or None,
    weights or None, directed edge list).
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("tree "):
        raise TreetopError("expected a 'tree <n>' header line")
    try:
        n = int(lines[0].split()[1])
    except (IndexError, ValueError):
        raise TreetopError("malformed tree header") from None
    edges = []
    coloring = {}
    weights = {}
    dedges = []
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "edge":
            u, v = int(parts[1]), int(parts[2])
            edges.append((u, v))
            if len(parts) > 3:
                coloring[edge_key(u, v)] = int(parts[3])
        elif parts[0] == "weight":
            weights[int(parts[1])] = Weight(parts[2])
        elif parts[0] == "dedge":
            dedges.append(DirectedEdge(int(parts[1]), int(parts[2])))
        else:
            raise TreetopError(f"unknown directive {parts[0]!r}")
    tree = FiniteTree(range(n), edges)
    return tree, (coloring or None), (weights or None), dedges


def format_tree_text(tree: FiniteTree, coloring=None, weights=None, dedges=()) -> str:
    lines = [f"tree {len(tree.vertices)}"]
    for u, v in sorted(tree.edges):
        if coloring and edge_key(u, v) in coloring:
            lines.append(f"edge {u} {v} {coloring[edge_key(u, v)]}")
        else:
            lines.append(f"edge {u} {v}")
    if weights:
        for v in sorted(weights):
            lines.append(f"weight {v} {weights[v]}")
    for e in dedges:
        lines.append(f"dedge {e.origin} {e.terminus}")
    return "\n".join(lines) + "\n"
