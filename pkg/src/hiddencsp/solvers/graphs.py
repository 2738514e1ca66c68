"""Graph-property backends: forced-forest spanning trees and the
variable-reveal graph reconstruction loop."""
from __future__ import annotations

from typing import Callable

from ..core import NO, InputError, Instance, Relation
from ..families import edges_to_word, undirected_slots


class _DisjointSets:
    def __init__(self, n: int):
        self.parent = list(range(n + 1))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def _norm(e):
    u, v = e
    return (min(u, v), max(u, v))


def spanning_tree_with_forest(n: int, forest, graph):
    """A spanning tree T of ``graph`` with forest <= T, or NO if ``graph`` is disconnected.

    Forest edges are taken first, then the remaining graph edges in sorted
    order (Kruskal with unit weights).
    """
    forest = sorted({_norm(e) for e in forest})
    graph = {_norm(e) for e in graph}
    if not set(forest) <= graph:
        raise InputError("forest edges must be graph edges")
    ds = _DisjointSets(n)
    tree = []
    for u, v in forest:
        if not ds.union(u, v):
            raise InputError(f"forest edges contain a cycle through {(u, v)}")
        tree.append((u, v))
    for u, v in sorted(graph - set(forest)):
        if ds.union(u, v):
            tree.append((u, v))
    if len(tree) != n - 1:
        return NO
    return sorted(tree)


def spanning_tree_finder(n: int) -> Callable[[set], tuple | None]:
    """Finder for connectedness: a spanning tree avoiding the forbidden slots."""
    slots = undirected_slots(n)

    def find(forbidden: set):
        allowed = [e for i, e in enumerate(slots, 1) if i not in forbidden]
        tree = spanning_tree_with_forest(n, [], allowed)
        if tree is NO:
            return None
        return edges_to_word("undirected", n, tree)

    return find


def family_finder(W) -> Callable[[set], tuple | None]:
    """Generic finder: the first word of W avoiding every forbidden slot."""

    def find(forbidden: set):
        for a in W:
            if not any(a[i - 1] for i in forbidden):
                return a
        return None

    return find


def _forbidden_slots(inst: Instance):
    forbidden = set()
    for c in inst.constraints:
        rel = inst.relations[c.rel - 1]
        if not isinstance(rel, Relation) or rel.arity != 1:
            raise InputError("graph-property instances have unary constraints")
        if not rel.tuples:
            return None
        if (1,) not in rel.tuples:
            forbidden.add(c.vars[0])
    return forbidden


def graph_property_backend(finder: Callable[[set], tuple | None]):
    """Backend for instances whose constraints are 'slot e is absent' (Neg)."""

    def backend(inst: Instance):
        forbidden = _forbidden_slots(inst)
        if forbidden is None:
            return NO
        found = finder(forbidden)
        return NO if found is None else tuple(found)

    return backend


def solve_hidden_graph_property_v(oracle, finder: Callable[[set], tuple | None] | None = None, **kw):
    """Hidden graph property under variable reveal: each violation names one
    slot the hidden graph lacks; the finder proposes a minimal witness
    avoiding all slots learned so far."""
    from ..transfer import solve_hidden_v

    if finder is None:
        finder = family_finder(oracle.W)
    return solve_hidden_v(oracle, graph_property_backend(finder), **kw)


def eq_spanning_tree_backend(n: int):
    """Backend for the union closure of {Id, Neg} over spanning trees:
    slots under Id must be in the tree, slots under Neg must not."""
    slots = undirected_slots(n)

    def backend(inst: Instance):
        required, forbidden = set(), set()
        for c in inst.constraints:
            rel = inst.relations[c.rel - 1]
            if not rel.tuples:
                return NO
            (e,) = c.vars
            if rel.tuples == frozenset({(1,)}):
                required.add(e)
            elif rel.tuples == frozenset({(0,)}):
                forbidden.add(e)
        if required & forbidden:
            return NO
        forest = [slots[e - 1] for e in sorted(required)]
        graph = [s for i, s in enumerate(slots, 1) if i not in forbidden]
        try:
            tree = spanning_tree_with_forest(n, forest, graph)
        except InputError:
            return NO  # required edges contain a cycle
        return NO if tree is NO else edges_to_word("undirected", n, tree)

    return backend
