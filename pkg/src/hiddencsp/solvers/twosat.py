"""2-SAT by implication-graph strongly connected components, and the
translation of binary (and unary) Boolean CSP instances into 2-CNF."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from ..core import NO, InputError, Instance, Relation

# literals are DIMACS-style signed integers: +i is x_i, -i is not x_i


@dataclass
class Cnf2:
    n: int
    clauses: list = field(default_factory=list)

    def __post_init__(self):
        self.clauses = [tuple(c) for c in self.clauses]
        for c in self.clauses:
            if len(c) > 2:
                raise InputError(f"clause {c} is wider than 2")
            for lit in c:
                if lit == 0 or abs(lit) > self.n:
                    raise InputError(f"literal {lit} out of range for {self.n} variables")

    def satisfied_by(self, a) -> bool:
        return all(any((a[abs(l) - 1] == 1) == (l > 0) for l in c) for c in self.clauses)


def solve_2sat(f: Cnf2):
    """A satisfying 0/1 assignment of ``f`` or NO (linear time)."""
    n = f.n
    # node 2(i-1) is x_i, node 2(i-1)+1 is not x_i
    node = lambda lit: 2 * (abs(lit) - 1) + (lit < 0)
    adj = [[] for _ in range(2 * n)]
    for c in f.clauses:
        if not c:
            return NO
        a, b = (c[0], c[0]) if len(c) == 1 else c
        adj[node(-a)].append(node(b))
        adj[node(-b)].append(node(a))
    comp = _tarjan(adj, order=[v ^ 1 for v in range(2 * n)])
    out = []
    for i in range(n):
        pos, neg = comp[2 * i], comp[2 * i + 1]
        if pos == neg:
            return NO
        # components are numbered in reverse topological order
        out.append(1 if pos < neg else 0)
    return tuple(out)


def _tarjan(adj, order=None) -> list[int]:
    """Iterative Tarjan SCC; returns a component id per node."""
    n = len(adj)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in order if order is not None else range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            while i < len(adj[v]):
                u = adj[v][i]
                i += 1
                if index[u] == -1:
                    work.append((v, i))
                    work.append((u, 0))
                    recurse = True
                    break
                if on_stack[u]:
                    low[v] = min(low[v], index[u])
            if recurse:
                continue
            if low[v] == index[v]:
                while True:
                    u = stack.pop()
                    on_stack[u] = False
                    comp[u] = ncomp
                    if u == v:
                        break
                ncomp += 1
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return comp


@lru_cache(maxsize=None)
def prime_clauses(tuples: frozenset, q: int) -> tuple:
    """Prime implicates (clauses over positions 1..q, signed) of a Boolean relation.

    Their conjunction equals the relation exactly, since for arity <= 2
    every excluded point is cut off by an implied clause of width <= 2.
    """
    if q > 2:
        raise InputError("only unary and binary relations translate to 2-CNF")
    implied = []
    for width in range(q + 1):
        for pos in itertools.combinations(range(1, q + 1), width):
            for signs in itertools.product((1, -1), repeat=width):
                clause = tuple(s * p for s, p in zip(signs, pos))
                if all(any((pt[abs(l) - 1] == 1) == (l > 0) for l in clause) for pt in tuples):
                    if not any(set(c) <= set(clause) for c in implied):
                        implied.append(clause)
    return tuple(implied)


def binary_csp_to_2sat(inst: Instance) -> Cnf2:
    """Equisatisfiable 2-CNF over the same variables (the witness map is the identity)."""
    if inst.w != 2:
        raise InputError("2-SAT translation needs a Boolean alphabet")
    if inst.admissible.kind != "all":
        raise InputError("2-SAT translation needs W to be the full cube")
    clauses = []
    for c in inst.constraints:
        rel = inst.relations[c.rel - 1]
        if not isinstance(rel, Relation):
            raise InputError("2-SAT translation needs explicit relations")
        for clause in prime_clauses(rel.tuples, rel.arity):
            clauses.append(tuple((1 if l > 0 else -1) * c.vars[abs(l) - 1] for l in clause))
    return Cnf2(inst.ell, clauses)


def solve_ug2(inst: Instance):
    """UG[2] (permutation constraints on a Boolean alphabet) through 2-SAT."""
    return solve_2sat(binary_csp_to_2sat(inst))


def twosat_backend(inst: Instance):
    """Backend for Boolean instances of arity at most 2 over the full cube."""
    return solve_2sat(binary_csp_to_2sat(inst))


def solve_union_binary_hidden(oracle, **kw):
    """Hidden Boolean binary CSP under variable reveal, via the 2-SAT backend."""
    from ..transfer import solve_hidden_v

    return solve_hidden_v(oracle, twosat_backend, **kw)


# the ten binary relations of 2-SAT, in the order T, F, a, b, not a, not b,
# a or b, a or not b, not a or b, not a or not b
def _rel(name, pred):
    return Relation.of(name, [p for p in itertools.product((0, 1), repeat=2) if pred(*p)], arity=2)


TWO_SAT_RELATIONS = (
    _rel("T", lambda a, b: True),
    _rel("F", lambda a, b: False),
    _rel("a", lambda a, b: a),
    _rel("b", lambda a, b: b),
    _rel("~a", lambda a, b: not a),
    _rel("~b", lambda a, b: not b),
    _rel("a|b", lambda a, b: a or b),
    _rel("a|~b", lambda a, b: a or not b),
    _rel("~a|b", lambda a, b: not a or b),
    _rel("~a|~b", lambda a, b: not a or not b),
)


# ---------------------------------------------------------------------------
# DIMACS


def to_dimacs(f: Cnf2) -> str:
    lines = [f"p cnf {f.n} {len(f.clauses)}"]
    lines += [" ".join(map(str, c + (0,))) for c in f.clauses]
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> Cnf2:
    n = None
    clauses, cur = [], []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InputError(f"bad problem line {line!r}")
            n = int(parts[2])
            continue
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise InputError(f"bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(lit)
    if cur:
        clauses.append(tuple(cur))
    if n is None:
        raise InputError("missing 'p cnf' line")
    return Cnf2(n, clauses)
