"""Type enrichment: union closure, arity extensions and the dimension measure."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import (
    AdmissibleSet,
    InputError,
    Relation,
    ResourceError,
    distinct_tuples,
    project,
)

MAX_UNION_BASE = 20
DEFAULT_MATERIALIZE_CAP = 1 << 16


@dataclass(frozen=True)
class UnionRelation:
    """The union of the base relations whose 1-based indices are listed."""

    members: frozenset

    def materialize(self, relations: Sequence[Relation], name: str | None = None) -> Relation:
        if not relations:
            raise InputError("cannot materialise a union over an empty type")
        tuples = frozenset().union(*(relations[k - 1].tuples for k in self.members))
        label = name or "U{" + ",".join(relations[k - 1].name for k in sorted(self.members)) + "}"
        return Relation(label, relations[0].arity, tuples)

    def holds(self, relations: Sequence[Relation], point) -> bool:
        point = tuple(point)
        return any(point in relations[k - 1].tuples for k in self.members)


@dataclass(frozen=True)
class ExtendedRelation:
    """An ell-ary relation given symbolically as a union of lifted terms.

    A term ``(R, t)`` stands for ``R^(t) = {a : (a_t1, ..., a_tq) in R}``;
    the relation is the union over all terms (so no terms means empty).
    """

    name: str
    ell: int
    terms: frozenset  # of (Relation, index tuple)

    def __post_init__(self):
        for rel, t in self.terms:
            if len(t) != rel.arity:
                raise InputError(f"{self.name}: tuple {t} does not match arity {rel.arity}")
            if len(set(t)) != len(t):
                raise InputError(f"{self.name}: repeated index in {t}")
            if any(not 1 <= v <= self.ell for v in t):
                raise InputError(f"{self.name}: index out of range in {t}")

    def satisfied_by(self, a: Sequence[int], vars: Sequence[int] = ()) -> bool:
        return any(project(a, t) in rel.tuples for rel, t in self.terms)

    def sorted_terms(self) -> list:
        return sorted(self.terms, key=lambda rt: (rt[0].name, sorted(rt[0].tuples), rt[1]))

    def base_relations(self) -> set:
        return {rel for rel, _ in self.terms}

    def __repr__(self) -> str:
        inner = ", ".join(f"{r.name}{t}" for r, t in self.sorted_terms())
        return f"ExtendedRelation({self.name!r}, [{inner}])"


def extend(rel: Relation, t: Sequence[int], ell: int, W: AdmissibleSet | None = None,
           name: str | None = None) -> ExtendedRelation:
    """R^(t): the single-term lift of ``rel`` to arity ``ell``."""
    t = tuple(t)
    if len(set(t)) != len(t):
        raise InputError(f"index tuple {t} has repeated entries")
    return ExtendedRelation(name or f"{rel.name}^{t}", ell, frozenset({(rel, t)}))


def extend_over_set(rel: Relation, index_set: Iterable[Sequence[int]], ell: int,
                    W: AdmissibleSet | None = None, name: str | None = None) -> ExtendedRelation:
    """R^I: the union of the lifts of ``rel`` over every tuple in ``index_set``."""
    terms = set()
    for t in index_set:
        t = tuple(t)
        if len(set(t)) != len(t):
            raise InputError(f"index tuple {t} has repeated entries")
        terms.add((rel, t))
    return ExtendedRelation(name or f"{rel.name}^I", ell, frozenset(terms))


def union_of_terms(terms: Iterable, ell: int, name: str = "UX") -> ExtendedRelation:
    return ExtendedRelation(name, ell, frozenset((r, tuple(t)) for r, t in terms))


def eval_extended(ext: ExtendedRelation, a: Sequence[int]) -> bool:
    if len(a) != ext.ell:
        raise InputError(f"assignment length {len(a)} does not match arity {ext.ell}")
    return ext.satisfied_by(a)


def materialize_extended(ext: ExtendedRelation, W: AdmissibleSet,
                         cap: int = DEFAULT_MATERIALIZE_CAP) -> frozenset:
    """The explicit subset of W that ``ext`` denotes (small W only)."""
    if W.size() > cap:
        raise ResourceError(f"|W| = {W.size()} exceeds the materialisation cap {cap}")
    return frozenset(a for a in W if ext.satisfied_by(a))


def x_family(relations: Sequence[Relation], ell: int) -> list[tuple[Relation, tuple]]:
    """X(R) as a list of (relation, index tuple) terms, in a fixed order."""
    out = []
    for rel in relations:
        for t in distinct_tuples(ell, rel.arity):
            out.append((rel, t))
    return out


# ---------------------------------------------------------------------------
# union closure and dimension


def union_closure(relations: Sequence[Relation]) -> set[frozenset]:
    """All distinct unions of subsets of ``relations`` (the empty union included)."""
    if len(relations) > MAX_UNION_BASE:
        raise ResourceError(f"union closure over {len(relations)} relations is too large")
    out = {frozenset()}
    for rel in relations:
        out |= {s | rel.tuples for s in out}
    return out


def union_members(target: frozenset, relations: Sequence[Relation]) -> frozenset:
    """Indices (1-based) of the base relations contained in ``target``."""
    return frozenset(k for k, rel in enumerate(relations, 1) if rel.tuples <= target)


def is_union_of(target: frozenset, relations: Sequence[Relation]) -> bool:
    members = union_members(target, relations)
    return frozenset().union(*(relations[k - 1].tuples for k in members)) == target


def union_chain_bounds(member_sets: Sequence[frozenset], node_budget: int | None = None) -> tuple[int, int]:
    """Steps in the longest strict chain inside the union closure of the sets.

    Grows the chain from the empty union one member at a time. Only
    join-irreducible members matter (a member that is a union of others can
    be split into two steps), and from a given union only members adding an
    inclusion-minimal set of new points need to be tried, because the
    longest chain above a union shrinks as the union grows.

    Returns ``(lower, upper)``; the two agree unless the search ran out of
    ``node_budget`` nodes, in which case ``upper`` is a proven upper bound.
    """
    points = sorted(set().union(*member_sets)) if member_sets else []
    pos = {p: i for i, p in enumerate(points)}
    masks = sorted({sum(1 << pos[p] for p in s) for s in member_sets if s})
    irreducible = []
    for m in masks:
        below = 0
        for o in masks:
            if o != m and o & m == o:
                below |= o
        if below != m:
            irreducible.append(m)
    if not irreducible:
        return 0, 0
    top = 0
    for m in irreducible:
        top |= m

    # depth-first search with a dominance table (the best depth at which a
    # union was reached) and an upper bound: every further step covers at
    # least one more irreducible member and adds at least one more point
    best = 0
    reached: dict[int, int] = {}

    # points lying in exactly the same irreducible members always join the
    # union together, so the classes of such points bound the remaining steps
    nbits = top.bit_length()
    trace_of = []
    for i in range(nbits):
        if top >> i & 1:
            trace_of.append((1 << i, sum(1 << k for k, m in enumerate(irreducible) if m >> i & 1)))

    def bound(u: int) -> int:
        return len({tr for bit, tr in trace_of if not u & bit})

    nodes = 0

    class _OutOfBudget(Exception):
        pass

    def search(u: int, depth: int) -> None:
        nonlocal best, nodes
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            raise _OutOfBudget
        if depth > best:
            best = depth
        if reached.get(u, -1) >= depth or depth + bound(u) <= best:
            return
        reached[u] = depth
        gains = {m & ~u for m in irreducible if m & ~u}
        minimal = [g for g in gains if not any(h != g and h & g == h for h in gains)]
        minimal.sort(key=lambda g: bin(g).count("1"))
        for g in minimal:
            search(u | g, depth + 1)

    try:
        search(0, 0)
    except _OutOfBudget:
        return best, bound(0)
    return best, best


def longest_union_chain(member_sets: Sequence[frozenset], node_budget: int | None = None) -> int:
    """Exact dimension; ``ResourceError`` if ``node_budget`` is exhausted."""
    lower, upper = union_chain_bounds(member_sets, node_budget)
    if lower != upper:
        raise ResourceError("dimension search exceeded its node budget")
    return lower


def dim_union(relations: Sequence[Relation]) -> int:
    """dim of the union closure, counted in strict-inclusion steps."""
    if len(relations) > MAX_UNION_BASE:
        raise ResourceError("union closure too large for an exact dimension")
    return longest_union_chain([r.tuples for r in relations])


def dim_family(sets: Iterable[frozenset]) -> int:
    """Longest strict chain (in steps) inside an explicit finite family of sets."""
    family = sorted(set(sets), key=len)
    best = {}
    for s in family:
        best[s] = max([best[t] + 1 for t in best if t < s], default=0)
    return max(best.values(), default=0)


def _unionx_members(relations: Sequence[Relation], W: AdmissibleSet, cap: int) -> list:
    if W.size() > cap:
        raise ResourceError("admissible set too large for an exact dimension")
    words = list(W)
    return [frozenset(i for i, a in enumerate(words) if project(a, t) in rel.tuples)
            for rel, t in x_family(relations, W.ell)]


def dim_unionx(relations: Sequence[Relation], W: AdmissibleSet,
               cap: int = DEFAULT_MATERIALIZE_CAP, node_budget: int | None = None) -> int:
    """dim of the union closure of X(R), with each lift read as a subset of W."""
    return longest_union_chain(_unionx_members(relations, W, cap), node_budget)


def unionx_dim_bounds(relations: Sequence[Relation], W: AdmissibleSet,
                      cap: int = DEFAULT_MATERIALIZE_CAP,
                      node_budget: int | None = 20_000) -> tuple[int, int]:
    """(lower, upper) bounds on dim of the union closure of X(R) over W."""
    lower, upper = union_chain_bounds(_unionx_members(relations, W, cap), node_budget)
    return lower, min(upper, unionx_dim_bound(relations, W.ell))


def unionx_dim_bound(relations: Sequence[Relation], ell: int) -> int:
    """Cheap upper bound s * |[ell]^(q)| on dim of the union closure of X(R)."""
    return sum(len(distinct_tuples(ell, r.arity)) for r in relations if r.tuples)
