"""Reductions into union-closed CSPs: Delta, unique games, EQ over graph
classes and hyperplane non-cover."""
from __future__ import annotations

import itertools

from ..core import CspParams, InputError, Instance, Relation
from ..families import edges_to_word, family_set, is_clique, is_hamiltonian_cycle, word_to_edges
from .base import Cnf, Graph, ReductionOutput


def _delta(row) -> Relation:
    return Relation.of("R_" + "".join(map(str, row)), [row], arity=len(row))


def threesat_to_union_delta(phi: Cnf) -> ReductionOutput:
    """Clause j becomes the union of the singleton relations R_abc over its
    seven satisfying rows, applied to the clause variables in order."""
    if phi.n < 3:
        raise InputError("3-CNF needs at least 3 variables")
    rels: dict = {}
    cons = []
    members = []
    for clause in phi.clauses:
        vars_ = [abs(l) for l in clause]
        if len(clause) != 3 or len(set(vars_)) != 3:
            raise InputError(f"clause {clause} must use three distinct variables")
        rows = [row for row in itertools.product((0, 1), repeat=3)
                if any((b == 1) == (l > 0) for b, l in zip(row, clause))]
        names = [_delta(r).name for r in rows]
        rel = Relation.of("|".join(names), rows, arity=3)
        k = rels.setdefault(rel, len(rels) + 1)
        cons.append((k, tuple(vars_)))
        members.append(names)
    target = Instance(CspParams(2, phi.n, 3), tuple(rels), tuple(cons))
    return ReductionOutput(
        "3sat-delta", phi, target,
        forward=tuple,
        backward=tuple,
        source_solve=phi.brute_force,
        source_verify=lambda a: len(a) == phi.n and phi.satisfied_by(a),
        metadata={"hardness": "3-SAT (classical)", "union_members": members},
    )


def derangement_union(k: int) -> Relation:
    """R°: the union of the graphs of all fixed-point-free permutations of [k]."""
    pairs = set()
    for perm in itertools.permutations(range(k)):
        if all(perm[i] != i for i in range(k)):
            pairs.update((i, perm[i]) for i in range(k))
    return Relation.of("R_derange", pairs, arity=2)


def _proper(g: Graph, colours) -> bool:
    return all(colours[u - 1] != colours[v - 1] for u, v in g.edges)


def _colour_brute(g: Graph, k: int):
    for c in itertools.product(range(k), repeat=g.n):
        if _proper(g, c):
            return c
    return None


def threecol_to_union_ug(g: Graph, k: int = 3) -> ReductionOutput:
    """Every edge carries R°, which for k >= 3 is exactly the relation x != y."""
    if g.directed:
        raise InputError("colouring needs an undirected graph")
    if k < 3:
        raise InputError("k must be at least 3")
    r = derangement_union(k)
    assert r.tuples == {(a, b) for a in range(k) for b in range(k) if a != b}
    q = 2 if g.n >= 2 else 1
    rels = (r,) if g.edges else ()
    target = Instance(CspParams(k, g.n, q), rels, tuple((1, e) for e in g.edges))
    return ReductionOutput(
        "3col-ug", g, target,
        forward=tuple,
        backward=tuple,
        source_solve=lambda: _colour_brute(g, k),
        source_verify=lambda c: len(c) == g.n and all(0 <= x < k for x in c) and _proper(g, c),
        metadata={"hardness": f"{k}-colourability (classical)", "k": k},
    )


ID = Relation.of("Id", [(1,)])
NEG = Relation.of("Neg", [(0,)])
TOP = Relation.of("T", [(0,), (1,)])


def eq_class_hardness(kind: str, e2: Graph, e1=(), k: int | None = None) -> ReductionOutput:
    """Does some member G of the class satisfy E1 <= G <= E2?

    Slots of E1 carry Id, slots of E2 minus E1 carry T, the rest carry Neg.
    ``kind`` is "clique" (with ``k``) or "hamiltonian-cycle".
    """
    if e2.directed:
        raise InputError("EQ classes are undirected")
    n = e2.n
    if n < 2:
        raise InputError("need at least two vertices")
    e1 = {e2._check(e) for e in e1}
    if not e1 <= e2.edge_set():
        raise InputError("E1 must be a subset of E2")
    if kind == "clique":
        if k is None:
            raise InputError("clique class needs k")
        W = family_set("k-cliques", n=n, k=k)
        member = lambda edges: is_clique(n, edges, k)
    elif kind == "hamiltonian-cycle":
        W = family_set("hamiltonian-cycles", n=n)
        member = lambda edges: is_hamiltonian_cycle(n, edges)
    else:
        raise InputError(f"unknown EQ class {kind!r}")
    # relation tuples must lie in W_1, which can miss a letter for tiny n
    w1 = W.projection(1)
    rels = tuple(Relation.of(r.name, r.tuples & w1, arity=1) for r in (ID, TOP, NEG))
    cons = []
    for i, e in enumerate(itertools.combinations(range(1, n + 1), 2), 1):
        cons.append((1 if e in e1 else 2 if e in e2.edge_set() else 3, (i,)))
    target = Instance(CspParams(2, W.ell, 1), rels, tuple(cons), W)

    def verify(edges):
        edges = {e2._check(e) for e in edges}
        return member(sorted(edges)) and e1 <= edges <= e2.edge_set()

    def solve():
        for a in W:
            edges = word_to_edges("undirected", n, a)
            if verify(edges):
                return edges
        return None

    name = "eq-clique" if kind == "clique" else "eq-hamc"
    hardness = "k-clique (classical)" if kind == "clique" else "Hamiltonian cycle (classical)"
    return ReductionOutput(
        name, e2, target,
        forward=lambda edges: edges_to_word("undirected", n, edges),
        backward=lambda a: word_to_edges("undirected", n, a),
        source_solve=solve,
        source_verify=verify,
        metadata={"hardness": hardness, "class": kind, "k": k, "E1": sorted(e1)},
    )


def is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p ** 0.5) + 1))


def encode_vector(c, p: int) -> int:
    """The letter sum c_i p^(i-1) for a vector c over Z_p."""
    return sum(x * p ** i for i, x in enumerate(c))


def decode_vector(x: int, p: int, n: int) -> tuple:
    out = []
    for _ in range(n):
        x, r = divmod(x, p)
        out.append(r)
    return tuple(out)


def coloring_to_hyperplane_noncover(g: Graph, p: int) -> ReductionOutput:
    """One variable ranging over Z_p^n (encoded as a single letter); edge
    {u, v} forbids the hyperplane x_u - x_v = 0."""
    if not is_prime(p):
        raise InputError(f"{p} is not prime")
    if g.directed:
        raise InputError("colouring needs an undirected graph")
    n = g.n
    w = p ** n
    rels = []
    for u, v in g.edges:
        pts = [(x,) for x in range(w) if decode_vector(x, p, n)[u - 1] != decode_vector(x, p, n)[v - 1]]
        rels.append(Relation.of(f"x{u}-x{v}!=0", pts, arity=1))
    target = Instance(CspParams(w, 1, 1), tuple(rels), tuple((j, (1,)) for j in range(1, len(rels) + 1)))
    return ReductionOutput(
        "col-hyp", g, target,
        forward=lambda c: (encode_vector(c, p),),
        backward=lambda a: decode_vector(a[0], p, n),
        source_solve=lambda: _colour_brute(g, p),
        source_verify=lambda c: len(c) == n and all(0 <= x < p for x in c) and _proper(g, c),
        metadata={"hardness": f"{p}-colourability (classical)", "p": p,
                  "hyperplanes": [f"e{u}-e{v}" for u, v in g.edges]},
    )
