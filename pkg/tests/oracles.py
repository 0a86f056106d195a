"""Independent brute-force routes used to check the library's answers.

Everything here is deliberately naive: union-find component splits, explicit
path enumeration, exhaustive set arithmetic.  None of it shares code with
the implementations under test.
"""

from __future__ import annotations

import random
from collections import deque
from fractions import Fraction

from treetop.finite_trees import FiniteTree, edge_key
from treetop.weights import Weight


# ---------------------------------------------------------------------------
# Random instances
# ---------------------------------------------------------------------------


def random_tree(rng: random.Random, n: int) -> FiniteTree:
    """Uniform random attachment tree on vertices 0..n-1."""
    edges = [(i, rng.randrange(i)) for i in range(1, n)]
    return FiniteTree(range(n), edges)


def random_forest(rng: random.Random, n: int) -> FiniteTree:
    """Two random attachment trees on a split of 0..n-1."""
    cut = max(1, n // 2)
    edges = [(i, rng.randrange(i)) for i in range(1, cut)]
    edges += [(i, rng.randrange(cut, i)) for i in range(cut + 1, n)]
    return FiniteTree(range(n), edges)


def random_proper_coloring(rng: random.Random, tree: FiniteTree) -> dict:
    """Greedy proper coloring over a shuffled edge order."""
    edges = sorted(tree.edges)
    rng.shuffle(edges)
    used = {v: set() for v in tree.vertices}
    coloring = {}
    for u, v in edges:
        c = 0
        while c in used[u] or c in used[v]:
            c += 1
        coloring[edge_key(u, v)] = c
        used[u].add(c)
        used[v].add(c)
    return coloring


def random_weights(rng: random.Random, tree: FiniteTree) -> dict:
    return {v: Weight(Fraction(rng.randrange(1, 12), rng.randrange(1, 7)))
            for v in tree.vertices}


# ---------------------------------------------------------------------------
# Brute-force graph routines (union-find based, unlike the library's BFS)
# ---------------------------------------------------------------------------


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def oracle_half_space(tree: FiniteTree, origin, terminus) -> frozenset:
    """Component of the origin after deleting the edge, via union-find."""
    uf = _UnionFind(tree.vertices)
    removed = edge_key(origin, terminus)
    for u, v in tree.edges:
        if (u, v) != removed:
            uf.union(u, v)
    root = uf.find(origin)
    return frozenset(v for v in tree.vertices if uf.find(v) == root)


def oracle_path(tree: FiniteTree, a, b):
    """Unique simple path from a to b by DFS with explicit stack."""
    stack = [(a, None)]
    parent = {}
    while stack:
        v, p = stack.pop()
        if v in parent:
            continue
        parent[v] = p
        if v == b:
            path = []
            while v is not None:
                path.append(v)
                v = parent[v]
            return tuple(reversed(path))
        for w in tree.neighbors(v):
            if w != p:
                stack.append((w, v))
    return None


def oracle_convex_hull(tree: FiniteTree, S) -> frozenset:
    hull = set()
    S = list(S)
    for i, a in enumerate(S):
        for b in S[i:]:
            path = oracle_path(tree, a, b)
            if path is not None:
                hull.update(path)
    return frozenset(hull)


def oracle_f_h_classes(tree: FiniteTree, H):
    """Classes of the relation generated by sharing an origin side."""
    sides = [frozenset(oracle_half_space(tree, e.origin, e.terminus)) for e in H]
    union = set().union(*sides) if sides else set()
    uf = _UnionFind(union)
    for side in sides:
        side = sorted(side)
        for v in side[1:]:
            uf.union(side[0], v)
    classes = {}
    for v in union:
        classes.setdefault(uf.find(v), set()).add(v)
    return [frozenset(c) for c in classes.values()]


def oracle_lex_least(tree: FiniteTree, coloring, x, A):
    """Least path by exhaustive comparison of the per-target unique paths."""
    best = None
    for a in A:
        path = oracle_path(tree, x, a)
        if path is None:
            continue
        colors = tuple(coloring[edge_key(u, v)] for u, v in zip(path, path[1:]))
        key = (len(path), colors)
        if best is None or key < best[0]:
            best = (key, path)
    return None if best is None else best[1]
