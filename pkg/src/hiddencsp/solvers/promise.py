"""Repetition-free union solvers built on bipartite matching.

Both follow solution-under-promise semantics: they return a satisfying
assignment when a satisfiable repetition-free instance is included, and
EXCEPTION when none is.
"""
from __future__ import annotations

from ..closures import ExtendedRelation
from ..core import EXCEPTION, InputError, Instance, Relation
from .matching import maximum_matching

# 1-SAT literals are signed variable indices: +i is x_i, -i is not x_i


def solve_union_1sat_rf(clauses, n: int):
    """Clauses are literal sets. Picks pairwise distinct variables x_{i_j}
    with a literal of x_{i_j} in clause j and sets each to satisfy its clause;
    EXCEPTION if no such selection exists."""
    clauses = [set(c) for c in clauses]
    for c in clauses:
        for lit in c:
            if lit == 0 or abs(lit) > n:
                raise InputError(f"literal {lit} out of range for {n} variables")
    adj = {j: sorted({abs(l) for l in c}) for j, c in enumerate(clauses)}
    match = maximum_matching(adj)
    if len(match) < len(clauses):
        return EXCEPTION
    a = [0] * n
    for j, var in match.items():
        a[var - 1] = 1 if var in clauses[j] else 0
    return tuple(a)


def solve_kweight_rf(subsets, ell: int, k: int):
    """Zero m pairwise distinct positions i_j in S_j and place the k ones on the
    lowest remaining positions; EXCEPTION if m > ell - k or no selection exists."""
    subsets = [set(s) for s in subsets]
    if not 0 <= k <= ell:
        raise InputError("k must lie in 0..ell")
    for s in subsets:
        if any(not 1 <= i <= ell for i in s):
            raise InputError("subset positions must lie in 1..ell")
    m = len(subsets)
    if m > ell - k:
        return EXCEPTION
    match = maximum_matching({j: sorted(s) for j, s in enumerate(subsets)})
    if len(match) < m:
        return EXCEPTION
    zeros = set(match.values())
    a = [0] * ell
    free = [i for i in range(1, ell + 1) if i not in zeros]
    for i in free[:k]:
        a[i - 1] = 1
    return tuple(a)


def _unary_terms(inst: Instance, j: int):
    c = inst.constraints[j - 1]
    rel = inst.relations[c.rel - 1]
    if isinstance(rel, ExtendedRelation):
        return [(r, t[0]) for r, t in rel.terms]
    if not isinstance(rel, Relation) or rel.arity != 1:
        raise InputError("expected unary constraints")
    return [(rel, c.vars[0])]


def instance_to_literal_sets(inst: Instance) -> list[set]:
    if inst.w != 2:
        raise InputError("1-SAT instances are Boolean")
    out = []
    for j in range(1, inst.m + 1):
        lits = set()
        for rel, i in _unary_terms(inst, j):
            if (1,) in rel.tuples:
                lits.add(i)
            if (0,) in rel.tuples:
                lits.add(-i)
        out.append(lits)
    return out


def onesat_rf_backend(inst: Instance):
    return solve_union_1sat_rf(instance_to_literal_sets(inst), inst.ell)


def instance_to_zero_sets(inst: Instance) -> list[set]:
    out = []
    for j in range(1, inst.m + 1):
        s = set()
        for rel, i in _unary_terms(inst, j):
            if (1,) in rel.tuples:
                raise InputError("k-WEIGHT constraints only force zeros")
            if (0,) in rel.tuples:
                s.add(i)
        out.append(s)
    return out


def kweight_rf_backend(inst: Instance):
    W = inst.admissible
    if W.kind != "weight":
        raise InputError("k-WEIGHT backend needs a fixed-weight admissible set")
    return solve_kweight_rf(instance_to_zero_sets(inst), inst.ell, W.k)
