"""Seeded random sources for every reduction, small enough to brute-force
both sides (graphs on at most 7 vertices, formulas on at most 4 variables)."""
from __future__ import annotations

import itertools
import random

from ..core import InputError, Relation
from .base import Cnf, Graph, ReductionOutput
from .graph_gadgets import graph_property_gadget
from .monsat import lineq_unary_type, monsat_encode
from .promise import hamdigraph_to_groupeq, threesat_to_rf_union_2sat, union_2col_rf_transform
from .unions import (
    coloring_to_hyperplane_noncover,
    eq_class_hardness,
    threecol_to_union_ug,
    threesat_to_union_delta,
)

ONE_SAT = [Relation.of("Id", [(1,)]), Relation.of("Neg", [(0,)])]
NE_LT = [Relation.of("ne", [(0, 1), (1, 0)]), Relation.of("lt", [(0, 1)])]

# (relations, w, max variables) per monsat base type
MONSAT_BASES = (
    (ONE_SAT, 2, 4),
    (NE_LT, 2, 4),
    (lineq_unary_type(3), 3, 3),
)


def random_graph(rng: random.Random, n: int, density: float | None = None,
                 directed: bool = False, loops: bool = False) -> list:
    if density is None:
        density = rng.uniform(0.2, 0.9)
    if directed:
        slots = [(u, v) for u in range(1, n + 1) for v in range(1, n + 1) if loops or u != v]
    else:
        slots = list(itertools.combinations(range(1, n + 1), 2))
    return [e for e in slots if rng.random() < density]


def random_cnf(rng: random.Random, n: int, m: int, width=(3, 3), monotone=False) -> Cnf:
    clauses = []
    for _ in range(m):
        k = rng.randint(*width)
        vars_ = rng.sample(range(1, n + 1), min(k, n))
        if monotone:
            sign = rng.choice((1, -1))
            clauses.append(tuple(sign * v for v in vars_))
        else:
            clauses.append(tuple(rng.choice((1, -1)) * v for v in vars_))
    return Cnf(n, clauses)


def _degree_capped_digraph(rng: random.Random, n: int) -> list:
    arcs = [(u, v) for u in range(1, n + 1) for v in range(1, n + 1) if u != v]
    rng.shuffle(arcs)
    indeg = dict.fromkeys(range(1, n + 1), 0)
    outdeg = dict.fromkeys(range(1, n + 1), 0)
    out = []
    for u, v in arcs:
        if outdeg[u] < 2 and indeg[v] < 2 and rng.random() < 0.7:
            out.append((u, v))
            outdeg[u] += 1
            indeg[v] += 1
    return sorted(out)


def _path_graph(rng: random.Random, directed: bool) -> Graph:
    n = rng.randint(2, 7)
    edges = random_graph(rng, n, directed=directed)
    pairs = list(itertools.combinations(edges, 2))
    crossings = rng.sample(pairs, min(len(pairs), rng.randint(0, 4)))
    return Graph(n, edges, directed=directed, s=1, t=n, crossings=crossings)


def random_source(name: str, rng: random.Random) -> ReductionOutput:
    """Draw a random source for reduction ``name`` and build the reduction."""
    if name == "st":
        n = rng.randint(2, 7)
        return graph_property_gadget(name, Graph(n, random_graph(rng, n)))
    if name == "dst":
        n = rng.randint(2, 7)
        return graph_property_gadget(name, Graph(n, _degree_capped_digraph(rng, n), directed=True))
    if name == "ucc":
        n = rng.randint(3, 7)
        return graph_property_gadget(name, Graph(n, random_graph(rng, n, rng.uniform(0.5, 1.0))))
    if name in ("dcc", "bpm"):
        n = rng.randint(1, 6)
        edges = random_graph(rng, n, rng.uniform(0.3, 0.9), directed=True, loops=True)
        return graph_property_gadget(name, Graph(n, edges, directed=True))
    if name in ("dpath", "upath"):
        return graph_property_gadget(name, _path_graph(rng, name == "dpath"))
    if name == "3sat-delta":
        n = rng.choice((3, 3, 4))
        return threesat_to_union_delta(random_cnf(rng, n, rng.randint(0, 20)))
    if name == "3col-ug":
        n = rng.randint(1, 7)
        return threecol_to_union_ug(Graph(n, random_graph(rng, n)), rng.choice((3, 3, 4)))
    if name == "eq-clique":
        n = rng.randint(2, 7)
        g = Graph(n, random_graph(rng, n))
        e1 = [e for e in g.edges if rng.random() < 0.2]
        return eq_class_hardness("clique", g, e1, k=rng.randint(2, min(n, 4)))
    if name == "eq-hamc":
        n = rng.randint(3, 7)
        g = Graph(n, random_graph(rng, n, rng.uniform(0.5, 1.0)))
        e1 = [e for e in g.edges if rng.random() < 0.15]
        return eq_class_hardness("hamiltonian-cycle", g, e1)
    if name == "col-hyp":
        p = rng.choice((2, 3))
        n = rng.randint(1, 7 if p == 2 else 4)
        return coloring_to_hyperplane_noncover(Graph(n, random_graph(rng, n)), p)
    if name == "monsat":
        rels, w, max_n = rng.choice(MONSAT_BASES)
        n = rng.randint(1, max_n)
        phi = random_cnf(rng, n, rng.randint(0, 5), width=(1, min(3, n)), monotone=True)
        return monsat_encode(rels, w, phi)
    if name == "rf-2sat":
        n = rng.randint(1, 4)
        phi = random_cnf(rng, n, rng.randint(0, 3), width=(1, min(3, n)))
        return threesat_to_rf_union_2sat(phi)
    if name == "rf-2col":
        n = rng.randint(2, 4)
        pairs = list(itertools.combinations(range(1, n + 1), 2))
        sets = []
        budget = 5
        for _ in range(rng.randint(0, 4)):
            size = min(1 if rng.random() < 0.7 else 2, budget, len(pairs))
            if not size:
                break
            sets.append(rng.sample(pairs, size))
            budget -= size
        return union_2col_rf_transform(n, sets)
    if name == "groupeq":
        p = rng.choice((3, 5))
        edges = random_graph(rng, p, rng.uniform(0.3, 0.9), directed=True)
        return hamdigraph_to_groupeq(Graph(p, edges, directed=True), p, rng.randint(1, p))
    raise InputError(f"unknown reduction {name!r}")
