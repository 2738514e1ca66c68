"""Engines that solve hidden instances through an ordinary-CSP backend,
and the reverse simulations that solve enriched instances through a
hidden-instance algorithm.

A backend is any callable ``Instance -> assignment | NO`` (promise backends
may also answer ``EXCEPTION``). Every engine assumes a consistent oracle and
raises ``ProtocolError`` when the replies contradict each other.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .closures import (
    ExtendedRelation,
    dim_union,
    is_union_of,
    union_members,
    unionx_dim_bound,
    unionx_dim_bounds,
)
from .core import (
    EXCEPTION,
    NO,
    AdmissibleSet,
    BackendContractError,
    CspParams,
    Instance,
    InputError,
    ProtocolError,
    Relation,
    ResourceError,
    brute_force_backend,
    brute_force_solve,
    distinct_tuples,
    is_assignment,
    project,
)
from .oracles import YES, LazyOracle, Oracle, RevealLevel, Violation

Backend = Callable[[Instance], object]


def _check_backend_answer(ans, W: AdmissibleSet, inst: Instance, allow_exception=False):
    if ans is NO or (allow_exception and ans is EXCEPTION):
        return ans
    if ans is EXCEPTION:
        raise BackendContractError("backend answered EXCEPTION outside promise mode")
    if not is_assignment(ans):
        raise BackendContractError(f"backend returned {ans!r}")
    if ans not in W:
        raise BackendContractError(f"backend returned the inadmissible assignment {ans}")
    for j in range(1, inst.m + 1):
        if not inst.constraint_holds(j, ans):
            raise BackendContractError(f"backend assignment violates synthesized constraint {j}")
    return ans


def _expect_violation(resp, oracle: Oracle) -> Violation:
    if not isinstance(resp, Violation):
        raise ProtocolError(f"unexpected oracle response {resp!r}")
    if not 1 <= resp.j <= oracle.m:
        raise ProtocolError(f"oracle reported constraint {resp.j} outside 1..{oracle.m}")
    if oracle.level.reveal_relation and resp.k is None:
        raise ProtocolError("oracle withheld the relation index")
    if oracle.level.reveal_vars and resp.t is None:
        raise ProtocolError("oracle withheld the variable tuple")
    return resp


def _first_trial(oracle: Oracle, initial):
    a = oracle.W.first() if initial is None else tuple(initial)
    return a, oracle.submit(a)


class _Synth:
    """Incrementally maintained synthesized instance (one slot per constraint)."""

    def __init__(self, oracle: Oracle, q: int):
        self.oracle = oracle
        self.q = q
        self.slots: dict[int, tuple] = {}  # j -> (relation object, vars)

    def instance(self) -> Instance:
        rels: dict = {}
        cons = []
        for j in sorted(self.slots):
            rel, vars = self.slots[j]
            idx = rels.setdefault(rel, len(rels) + 1)
            cons.append((idx, vars))
        p = self.oracle.params
        return Instance(CspParams(p.w, p.ell, self.q, p.n), tuple(rels), tuple(cons),
                        self.oracle.W, _check=False)


def _union_name(members) -> str:
    return "U{" + ",".join(str(k) for k in sorted(members)) + "}"


# ---------------------------------------------------------------------------
# hidden -> enriched engines


def solve_hidden_rv(oracle: Oracle, backend: Backend = brute_force_backend, *, initial=None):
    """Full reveal: learn one constraint per violation, solve the known part."""
    if oracle.level is not RevealLevel.RV:
        raise InputError("solve_hidden_rv needs an {R,V}-revealing oracle")
    synth = _Synth(oracle, oracle.q)
    a, resp = _first_trial(oracle, initial)
    while resp is not YES:
        v = _expect_violation(resp, oracle)
        if v.j in synth.slots:
            raise ProtocolError(f"constraint {v.j} reported twice under full reveal")
        rel = oracle.relations[v.k - 1]
        if rel.satisfied_by(a, v.t):
            raise ProtocolError(f"reported constraint {v.j} is satisfied by the trial")
        synth.slots[v.j] = (rel, v.t)
        inst = synth.instance()
        ans = _check_backend_answer(backend(inst), oracle.W, inst)
        if ans is NO:
            return NO
        a = ans
        resp = oracle.submit(a)
    return a


@dataclass
class _VState:
    vars: tuple
    excluded: set = field(default_factory=set)  # A_j
    relation: Relation | None = None


def _v_relation(relations: Sequence[Relation], excluded: set, q: int, cache: dict) -> Relation:
    members = frozenset(k for k, r in enumerate(relations, 1) if r.tuples.isdisjoint(excluded))
    rel = cache.get(members)
    if rel is None:
        tuples = frozenset().union(*(relations[k - 1].tuples for k in members))
        rel = Relation(_union_name(members), q, tuples)
        cache[members] = rel
    return rel


def solve_hidden_v(oracle: Oracle, backend: Backend = brute_force_backend, *, initial=None,
                   promise: bool = False, history: list | None = None):
    """Variable-tuple reveal engine over the union closure of the type.

    For each revealed constraint j the engine keeps the set A_j of projected
    trial points it has been shown to reject and asks the backend for an
    assignment satisfying, at every revealed tuple, the union of the base
    relations disjoint from A_j. Constraints not yet reported are left out.
    With ``promise=True`` a backend EXCEPTION is read as NO.
    """
    if not oracle.level.reveal_vars:
        raise InputError("solve_hidden_v needs a variable-revealing oracle")
    relations = [r for r in oracle.relations if isinstance(r, Relation)]
    if len(relations) != len(oracle.relations):
        raise InputError("the type must consist of explicit relations")
    q = oracle.q
    cache: dict = {}
    state: dict[int, _VState] = {}
    synth = _Synth(oracle, q)
    a, resp = _first_trial(oracle, initial)
    while resp is not YES:
        v = _expect_violation(resp, oracle)
        st = state.get(v.j)
        if st is None:
            st = state[v.j] = _VState(tuple(v.t))
        elif st.vars != tuple(v.t):
            raise ProtocolError(f"constraint {v.j} revealed with two different tuples")
        point = project(a, st.vars)
        if st.relation is not None and point not in st.relation.tuples:
            raise ProtocolError(f"constraint {v.j} reported violated by a point it was solved at")
        st.excluded.add(point)
        st.relation = _v_relation(relations, st.excluded, q, cache)
        if history is not None:
            history.append((v.j, st.relation.tuples))
        if not st.relation.tuples:
            return NO
        synth.slots[v.j] = (st.relation, st.vars)
        inst = synth.instance()
        ans = _check_backend_answer(backend(inst), oracle.W, inst, allow_exception=promise)
        if ans is NO or ans is EXCEPTION:
            return NO
        a = ans
        resp = oracle.submit(a)
    return a


def solve_hidden_r(oracle: Oracle, backend: Backend = brute_force_backend, *, initial=None,
                   history: list | None = None):
    """Relation-index reveal engine over arity extensions R^I.

    A_j holds the full trial assignments that violated constraint j and
    I_j the index tuples t with no such assignment projecting into R at t.
    """
    if not oracle.level.reveal_relation:
        raise InputError("solve_hidden_r needs a relation-revealing oracle")
    ell = oracle.ell
    all_tuples = {}
    state: dict[int, tuple[int, list, list]] = {}  # j -> (k, A_j, I_j)
    synth = _Synth(oracle, oracle.q)
    a, resp = _first_trial(oracle, initial)
    while resp is not YES:
        v = _expect_violation(resp, oracle)
        rel = oracle.relations[v.k - 1]
        if v.j in state:
            k, excluded, alive = state[v.j]
            if k != v.k:
                raise ProtocolError(f"constraint {v.j} revealed with two relations")
        else:
            if rel.arity not in all_tuples:
                all_tuples[rel.arity] = distinct_tuples(ell, rel.arity)
            k, excluded, alive = v.k, [], list(all_tuples[rel.arity])
        excluded.append(a)
        alive = [t for t in alive if project(a, t) not in rel.tuples]
        state[v.j] = (k, excluded, alive)
        if history is not None:
            history.append((v.j, tuple(alive)))
        if not rel.tuples:
            return NO
        if not alive:
            raise ProtocolError(f"constraint {v.j}: no index tuple is consistent with the replies")
        ext = ExtendedRelation(f"{rel.name}^I{v.j}", ell, frozenset((rel, t) for t in alive))
        synth.slots[v.j] = (ext, ())
        inst = synth.instance()
        ans = _check_backend_answer(backend(inst), oracle.W, inst)
        if ans is NO:
            return NO
        a = ans
        resp = oracle.submit(a)
    return a


def solve_hidden_empty(oracle: Oracle, backend: Backend = brute_force_backend, *,
                       initial=None, promise: bool = False, history: list | None = None):
    """Index-only reveal engine: the variable-reveal engine run on X(R).

    Every constraint is synthesized as the union of the lifts (R, t) that no
    recorded violating trial of that constraint satisfies; constraints not
    yet reported carry the full union of X(R), which contains any of them.
    """
    ell = oracle.ell
    terms = [(rel, t) for rel in oracle.relations if rel.tuples
             for t in distinct_tuples(ell, rel.arity)]
    full = ExtendedRelation("UX", ell, frozenset(terms))
    alive: dict[int, list] = {}
    synth = _Synth(oracle, oracle.q)
    for j in range(1, oracle.m + 1):
        synth.slots[j] = (full, ())
    a, resp = _first_trial(oracle, initial)
    while resp is not YES:
        v = _expect_violation(resp, oracle)
        cur = alive.get(v.j, terms)
        if v.j in alive and not any(project(a, t) in r.tuples for r, t in cur):
            raise ProtocolError(f"constraint {v.j} reported violated by a point it was solved at")
        cur = [(r, t) for r, t in cur if project(a, t) not in r.tuples]
        alive[v.j] = cur
        if history is not None:
            history.append((v.j, frozenset(cur)))
        if not cur:
            return NO
        synth.slots[v.j] = (ExtendedRelation(f"UX{v.j}.{oracle.trials}", ell, frozenset(cur)), ())
        inst = synth.instance()
        ans = _check_backend_answer(backend(inst), oracle.W, inst, allow_exception=promise)
        if ans is NO or ans is EXCEPTION:
            return NO
        a = ans
        resp = oracle.submit(a)
    return a


def solve_hidden_v_promise(oracle: Oracle, backend: Backend, *, initial=None,
                           promise_check: Callable[[Instance], bool] | None = None):
    """Promise variant: backend answers follow solution-under-promise.

    Works with a variable-revealing oracle (union closure route) or an
    index-only oracle (X(R) route). EXCEPTION from the backend means no
    satisfiable promise instance is included, hence NO for the hidden one.
    ``promise_check(inst)``, if given, is consulted whenever the backend
    says EXCEPTION; it must return True when ``inst`` includes a satisfiable
    promise instance, in which case the backend broke its contract.
    """
    def checked(inst):
        ans = backend(inst)
        if ans is EXCEPTION and promise_check is not None and promise_check(inst):
            raise BackendContractError("backend answered EXCEPTION on an instance "
                                       "including a satisfiable promise instance")
        return ans

    if oracle.level.reveal_vars:
        return solve_hidden_v(oracle, checked, initial=initial, promise=True)
    return solve_hidden_empty(oracle, checked, initial=initial, promise=True)


# ---------------------------------------------------------------------------
# trial bounds


def bound_rv(m: int) -> int:
    return m + 1


def bound_v(relations: Sequence[Relation], W: AdmissibleSet, m: int) -> int:
    q = relations[0].arity if relations else 1
    return m * min(dim_union(relations), len(W.projection(q))) + 1


def bound_r(ell: int, q: int, m: int) -> int:
    return m * len(distinct_tuples(ell, q)) + 1


def bound_empty(relations: Sequence[Relation], W: AdmissibleSet, m: int) -> int:
    """m * dim + 1 for the union closure of X(R); when the exact dimension
    search exceeds its budget the proven upper bound on dim is used."""
    try:
        _, upper = unionx_dim_bounds(relations, W)
    except ResourceError:
        upper = unionx_dim_bound(relations, W.ell)
    return m * upper + 1


ENGINES = {
    RevealLevel.RV: solve_hidden_rv,
    RevealLevel.V: solve_hidden_v,
    RevealLevel.R: solve_hidden_r,
    RevealLevel.NONE: solve_hidden_empty,
}


def trial_bound(level: RevealLevel, relations, W: AdmissibleSet, m: int) -> int:
    q = relations[0].arity if relations else 1
    if level is RevealLevel.RV:
        return bound_rv(m)
    if level is RevealLevel.V:
        return bound_v(relations, W, m)
    if level is RevealLevel.R:
        return bound_r(W.ell, q, m)
    return bound_empty(relations, W, m)


def solve_hidden(oracle: Oracle, backend: Backend = brute_force_backend, **kw):
    return ENGINES[oracle.level](oracle, backend, **kw)


# ---------------------------------------------------------------------------
# enriched -> hidden simulations


HiddenAlgo = Callable[[Oracle], object]


def _run_simulation(target: Instance, base: Sequence, candidates: list, level: RevealLevel,
                    hidden_algo: HiddenAlgo, q: int):
    if any(not c for c in candidates):
        return NO
    p = target.params
    oracle = LazyOracle(CspParams(p.w, p.ell, q, p.n), base, target.admissible, candidates,
                        level, strategy="union")
    ans = hidden_algo(oracle)
    if ans is NO:
        return NO
    if not is_assignment(ans):
        raise ProtocolError(f"hidden algorithm returned {ans!r}")
    ans = tuple(ans)
    if oracle.transcript.trials == 0 or oracle.transcript.entries[-1] != (ans, YES):
        raise ProtocolError("hidden algorithm returned an assignment the oracle did not accept")
    for j in range(1, target.m + 1):
        if not target.constraint_holds(j, ans):
            raise ProtocolError(f"accepted assignment violates constraint {j}")
    return ans


def _base_index(base: Sequence[Relation], rel: Relation) -> int:
    for k, r in enumerate(base, 1):
        if r == rel or (r.arity == rel.arity and r.tuples == rel.tuples):
            return k
    raise InputError(f"relation {rel.name!r} is not in the base type")


def reverse_union_via_hidden(union_inst: Instance, base: Sequence[Relation],
                             hidden_algo: HiddenAlgo = solve_hidden_v):
    """Solve an instance over the union closure of ``base`` with a
    variable-reveal hidden algorithm, by simulating its oracle."""
    candidates = []
    for j, c in enumerate(union_inst.constraints, 1):
        rel = union_inst.relations[c.rel - 1]
        if not isinstance(rel, Relation):
            raise InputError(f"constraint {j} is not a union relation")
        if not is_union_of(rel.tuples, base):
            raise InputError(f"constraint {j}: {rel.name!r} is not a union of base relations")
        candidates.append({(k, c.vars) for k in union_members(rel.tuples, base) if base[k - 1].tuples})
    return _run_simulation(union_inst, base, candidates, RevealLevel.V, hidden_algo, union_inst.q)


def reverse_extension_via_hidden(ext_inst: Instance, base: Sequence[Relation],
                                 hidden_algo: HiddenAlgo = solve_hidden_r):
    """Solve an E(S) instance (each constraint some R^I) with a
    relation-reveal hidden algorithm."""
    candidates = []
    q = base[0].arity
    for j, c in enumerate(ext_inst.constraints, 1):
        rel = ext_inst.relations[c.rel - 1]
        if not isinstance(rel, ExtendedRelation):
            raise InputError(f"constraint {j} is not an extended relation")
        ks = {_base_index(base, r) for r, _ in rel.terms}
        if len(ks) > 1:
            raise InputError(f"constraint {j} mixes base relations; not an arity extension")
        candidates.append({(k, t) for k in ks for _, t in rel.terms if base[k - 1].tuples})
    return _run_simulation(ext_inst, base, candidates, RevealLevel.R, hidden_algo, q)


def reverse_unionx_via_hidden(unionx_inst: Instance, base: Sequence[Relation],
                              hidden_algo: HiddenAlgo = solve_hidden_empty):
    """Solve an instance over the union closure of X(S) with an index-only
    hidden algorithm."""
    candidates = []
    q = base[0].arity
    for j, c in enumerate(unionx_inst.constraints, 1):
        rel = unionx_inst.relations[c.rel - 1]
        if not isinstance(rel, ExtendedRelation):
            raise InputError(f"constraint {j} is not an extended relation")
        candidates.append({(_base_index(base, r), t) for r, t in rel.terms if r.tuples})
    return _run_simulation(unionx_inst, base, candidates, RevealLevel.NONE, hidden_algo, q)


# ---------------------------------------------------------------------------
# promise bookkeeping


def includes_satisfiable_rf(inst: Instance, base: Sequence[Relation], limit: int = 200_000) -> bool:
    """Whether the union-type ``inst`` includes a satisfiable repetition-free
    instance over ``base`` (exhaustive; small instances only)."""
    options = []
    for c in inst.constraints:
        rel = inst.relations[c.rel - 1]
        if isinstance(rel, ExtendedRelation):
            opts = sorted({(_base_index(base, r), t) for r, t in rel.terms})
        else:
            opts = [(k, c.vars) for k in sorted(union_members(rel.tuples, base))]
        options.append(opts)
    count = 0
    p = inst.params
    for choice in itertools.product(*options):
        if len(set(choice)) != len(choice):
            continue
        count += 1
        if count > limit:
            raise InputError("too many included instances to enumerate")
        sub = Instance(CspParams(p.w, p.ell, base[0].arity if base else 1), tuple(base),
                       tuple(choice), inst.admissible, _check=False)
        if brute_force_solve(sub) is not NO:
            return True
    return False
