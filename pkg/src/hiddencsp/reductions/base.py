"""Source-problem containers and the uniform reduction wrapper."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable

from ..core import NO, InputError, Instance, brute_force_solve, violations


@dataclass
class Graph:
    """A graph on vertices 1..n with optional annotations used by gadgets.

    ``crossings`` lists pairs of edges that cross in a drawing, ``forced``
    lists edges that must be present, ``edge_sets`` lists numbered edge
    sets; ``params`` carries small integers such as k, p or z.
    """

    n: int
    edges: list = field(default_factory=list)
    directed: bool = False
    s: int | None = None
    t: int | None = None
    crossings: list = field(default_factory=list)
    forced: list = field(default_factory=list)
    edge_sets: list = field(default_factory=list)
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise InputError("graph needs at least one vertex")
        self.edges = [self._check(e) for e in self.edges]
        self.forced = [self._check(e) for e in self.forced]
        self.edge_sets = [[self._check(e) for e in es] for es in self.edge_sets]
        self.crossings = [(self._check(a), self._check(b)) for a, b in self.crossings]
        if len(set(self.edges)) != len(self.edges):
            raise InputError("repeated edge")

    def _check(self, e):
        u, v = (int(x) for x in e)
        if not (1 <= u <= self.n and 1 <= v <= self.n):
            raise InputError(f"edge {(u, v)} outside 1..{self.n}")
        if not self.directed:
            if u == v:
                raise InputError(f"loop {(u, v)} in an undirected graph")
            u, v = min(u, v), max(u, v)
        return (u, v)

    def edge_set(self) -> set:
        return set(self.edges)

    def has(self, u: int, v: int) -> bool:
        if self.directed:
            return (u, v) in self.edge_set()
        return (min(u, v), max(u, v)) in self.edge_set()


@dataclass
class Cnf:
    """A CNF over variables 1..n; literals are signed variable indices."""

    n: int
    clauses: list = field(default_factory=list)

    def __post_init__(self):
        self.clauses = [tuple(int(l) for l in c) for c in self.clauses]
        for c in self.clauses:
            for lit in c:
                if lit == 0 or abs(lit) > self.n:
                    raise InputError(f"literal {lit} out of range for {self.n} variables")

    def satisfied_by(self, a) -> bool:
        return all(any((a[abs(l) - 1] == 1) == (l > 0) for l in c) for c in self.clauses)

    def brute_force(self):
        for a in itertools.product((0, 1), repeat=self.n):
            if self.satisfied_by(a):
                return a
        return None


@dataclass
class ReductionOutput:
    """A target instance plus witness maps in both directions.

    ``source_solve`` returns a source witness or None; ``source_verify``
    checks a source witness. ``metadata`` records which external hardness
    result the gadget leans on and construction details.
    """

    name: str
    source: Any
    target: Instance
    forward: Callable[[Any], tuple]
    backward: Callable[[tuple], Any]
    source_solve: Callable[[], Any]
    source_verify: Callable[[Any], bool]
    metadata: dict = field(default_factory=dict)


@dataclass
class EquivalenceReport:
    source_satisfiable: bool
    target_satisfiable: bool
    forward_ok: bool | None
    backward_ok: bool | None

    @property
    def ok(self) -> bool:
        return (self.source_satisfiable == self.target_satisfiable
                and self.forward_ok is not False and self.backward_ok is not False)


def check_equivalence(out: ReductionOutput, target_solver=brute_force_solve) -> EquivalenceReport:
    """Brute-force both sides and push each found witness through its map."""
    src = out.source_solve()
    tgt = target_solver(out.target)
    fwd = bwd = None
    if src is not None:
        if not out.source_verify(src):
            raise AssertionError(f"{out.name}: source solver returned an invalid witness")
        a = tuple(out.forward(src))
        fwd = a in out.target.admissible and not violations(out.target, a)
    if tgt is not NO:
        bwd = bool(out.source_verify(out.backward(tgt)))
    return EquivalenceReport(src is not None, tgt is not NO, fwd, bwd)
