"""Reductions into repetition-free union problems and group-table equality."""
from __future__ import annotations

import itertools

from ..closures import ExtendedRelation
from ..core import CspParams, InputError, Instance, Relation
from ..families import cyclic_table, family_set
from ..solvers.matching import maximum_matching
from ..solvers.twosat import TWO_SAT_RELATIONS
from .base import Cnf, Graph, ReductionOutput
from .unions import is_prime

_CLAUSE2 = {r.name: r for r in TWO_SAT_RELATIONS}


def _two_clause(lit_positive: bool, y_positive: bool) -> Relation:
    return _CLAUSE2[("a" if lit_positive else "~a") + "|" + ("b" if y_positive else "~b")]


def threesat_to_rf_union_2sat(phi: Cnf) -> ReductionOutput:
    """Clause t = l1 v l2 v l3 with fresh y_t becomes the two constraints
    C'_t = U_i (l_i v not y_t) and C''_t = U_i (l_i v y_t).

    Together they force the clause, and a satisfying assignment picks a
    true literal l_i whose two 2-clauses are distinct across all t.
    """
    n, m = phi.n, len(phi.clauses)
    for c in phi.clauses:
        if not c or len({abs(l) for l in c}) != len(c):
            raise InputError(f"clause {c} must be nonempty over distinct variables")
    ell = max(n + m, 1)
    rels, cons = [], []
    for t, c in enumerate(phi.clauses, 1):
        y = n + t
        for tag, ypos in (("'", False), ("''", True)):
            terms = frozenset((_two_clause(l > 0, ypos), (abs(l), y)) for l in c)
            rels.append(ExtendedRelation(f"C{tag}{t}", ell, terms))
            cons.append((len(rels), ()))
    target = Instance(CspParams(2, ell, min(2, ell)), tuple(rels), tuple(cons), promise="RF")
    return ReductionOutput(
        "rf-2sat", phi, target,
        forward=lambda x: tuple(x) + (0,) * (ell - n),
        backward=lambda a: tuple(a[:n]),
        source_solve=phi.brute_force,
        source_verify=lambda x: len(x) == n and phi.satisfied_by(x),
        metadata={"hardness": "3-SAT (classical)", "fresh_variables": list(range(n + 1, n + m + 1))},
    )


def select_distinct_subconstraints(inst: Instance, a) -> list | None:
    """Pick one term satisfied by ``a`` from every union constraint, with the
    picked (relation, variables) pairs pairwise distinct; None if impossible.

    This is the included repetition-free system witnessing the promise.
    """
    adj = {}
    for j, c in enumerate(inst.constraints):
        rel = inst.relations[c.rel - 1]
        terms = rel.sorted_terms() if isinstance(rel, ExtendedRelation) else [(rel, c.vars)]
        adj[j] = [(r.name, t) for r, t in terms if r.satisfied_by(a, t)]
    match = maximum_matching(adj)
    if len(match) < inst.m:
        return None
    return [match[j] for j in range(inst.m)]


NEQ = Relation.of("!=", [(0, 1), (1, 0)])


def _union_colourable(n: int, edge_sets, colours) -> bool:
    return all(any(colours[u - 1] != colours[v - 1] for u, v in es) for es in edge_sets)


def union_2col_rf_transform(n: int, edge_sets) -> ReductionOutput:
    """Make the edge sets pairwise disjoint with two new vertices per
    occurrence of an edge {u, v} in E_j: uvj1 copies the complement of u,
    uvj2 that of v, and E'_j joins the copies."""
    src = Graph(n, [], edge_sets=[list(es) for es in edge_sets])
    sets = src.edge_sets
    fresh = {}
    nxt = n
    for j, es in enumerate(sets, 1):
        for u, v in es:
            fresh[(u, v, j)] = (nxt + 1, nxt + 2)
            nxt += 2
    new_sets = []
    for (u, v, j), (c1, c2) in fresh.items():
        new_sets.append([(u, c1)])
        new_sets.append([(v, c2)])
    for j, es in enumerate(sets, 1):
        new_sets.append([fresh[(u, v, j)] for u, v in es])
    total = max(nxt, 1)
    seen = set()
    for es in new_sets:
        for e in es:
            assert e not in seen, "edge sets are not pairwise disjoint"
            seen.add(e)
    rels = tuple(ExtendedRelation(f"E{i}", total, frozenset((NEQ, e) for e in es))
                 for i, es in enumerate(new_sets, 1))
    target = Instance(CspParams(2, total, min(2, total)), rels,
                      tuple((i, ()) for i in range(1, len(rels) + 1)), promise="RF")

    def forward(c):
        out = list(c) + [0] * (total - n)
        for (u, v, _), (c1, c2) in fresh.items():
            out[c1 - 1] = 1 - c[u - 1]
            out[c2 - 1] = 1 - c[v - 1]
        return tuple(out)

    def solve():
        for c in itertools.product((0, 1), repeat=n):
            if _union_colourable(n, sets, c):
                return c
        return None

    return ReductionOutput(
        "rf-2col", src, target,
        forward=forward,
        backward=lambda a: tuple(a[:n]),
        source_solve=solve,
        source_verify=lambda c: len(c) == n and _union_colourable(n, sets, c),
        metadata={"hardness": "union 2-colouring (via NAE-type gadgets)",
                  "vertices": total, "edge_sets": [sorted(es) for es in new_sets]},
    )


def _ham_cycle(g: Graph):
    """A directed Hamiltonian cycle as a vertex list starting at 1."""
    for rest in itertools.permutations(range(2, g.n + 1)):
        cyc = (1,) + rest
        if all(g.has(cyc[i], cyc[(i + 1) % g.n]) for i in range(g.n)):
            return list(cyc)
    return None


def _is_ham_cycle(g: Graph, cyc) -> bool:
    cyc = list(cyc)
    return (sorted(cyc) == list(range(1, g.n + 1))
            and all(g.has(cyc[i], cyc[(i + 1) % g.n]) for i in range(g.n)))


def hamdigraph_to_groupeq(g: Graph, p: int, z: int = 2) -> ReductionOutput:
    """Cell (u, z) of the hidden table must be an out-neighbour of u, all
    other cells are free; a cyclic table of order p meets this exactly when
    u -> u*z traces a Hamiltonian cycle.

    Letters are vertex - 1 and cell (u, v) is variable (u-1)p + v.
    """
    if not is_prime(p):
        raise InputError(f"{p} is not prime")
    if not g.directed or g.n != p:
        raise InputError("need a digraph on exactly p vertices")
    if any(u == v for u, v in g.edges):
        raise InputError("digraph must be loop-free")
    if not 1 <= z <= p:
        raise InputError("z must be a vertex")
    W = family_set("cyclic-group-tables", p=p)
    full = Relation.of("S*", [(x,) for x in range(p)], arity=1)
    rels = [full]
    cons = []
    for u in range(1, p + 1):
        for v in range(1, p + 1):
            var = (u - 1) * p + v
            if v == z:
                outs = sorted(b for a, b in g.edges if a == u)
                rels.append(Relation.of(f"S({u},{z})", [(b - 1,) for b in outs], arity=1))
                cons.append((len(rels), (var,)))
            else:
                cons.append((1, (var,)))
    target = Instance(CspParams(p, p * p, 1), tuple(rels), tuple(cons), W)

    def forward(cyc):
        cyc = list(cyc)
        # rotate so that z sits at position 1, i.e. phi(z) = 1
        i = cyc.index(z)
        cyc = cyc[i - 1:] + cyc[:i - 1]
        phi = {v - 1: i for i, v in enumerate(cyc)}
        return cyclic_table(phi, p)

    def backward(table):
        cyc = [1]
        for _ in range(p - 1):
            u = cyc[-1]
            cyc.append(table[(u - 1) * p + z - 1] + 1)
        return cyc

    return ReductionOutput(
        "groupeq", g, target,
        forward=forward,
        backward=backward,
        source_solve=lambda: _ham_cycle(g),
        source_verify=lambda cyc: _is_ham_cycle(g, cyc),
        metadata={"hardness": "directed Hamiltonian cycle (classical)", "p": p, "z": z},
    )
