import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hiddencsp import (
    NO,
    AdmissibleSet,
    CspParams,
    InputError,
    Relation,
    ResourceError,
    brute_force_solve,
    eval_relation,
    make_instance,
    project_admissible,
    violations,
)
from hiddencsp.core import count_solutions, distinct_tuples, iter_solutions, satisfies

from conftest import ID, NEG, cube, one_sat


def test_eval_relation_identity_and_negation():
    assert eval_relation(ID, (1,))
    assert not eval_relation(NEG, (1,))
    assert not eval_relation(Relation.of("E", [], arity=2), (0, 1))


def test_eval_relation_arity_mismatch():
    with pytest.raises(InputError):
        eval_relation(ID, (0, 1))


def test_violations_examples():
    inst = one_sat(2, [1, -2])
    assert violations(inst, (1, 0)) == []
    assert violations(inst, (0, 0)) == [1]
    assert violations(inst, (0, 1)) == [1, 2]


def test_violations_rejects_inadmissible():
    inst = one_sat(2, [1])
    with pytest.raises(InputError):
        violations(inst, (2, 0))
    with pytest.raises(InputError):
        violations(inst, (1,))


def test_brute_force_examples():
    assert brute_force_solve(one_sat(1, [1])) == (1,)
    assert brute_force_solve(one_sat(1, [1, -1])) is NO
    ident = Relation.of("id", [(0, 0), (1, 1)])
    tri = make_instance(2, 3, 2, [ident], [(1, (1, 2)), (1, (2, 3)), (1, (1, 3))])
    assert brute_force_solve(tri) == (0, 0, 0)


def test_brute_force_budget_is_a_resource_error():
    inst = make_instance(3, 20, 1, [ID], [(1, (1,))])
    with pytest.raises(ResourceError):
        brute_force_solve(inst, budget=1000)


def test_brute_force_numpy_path_matches_bitset_path():
    # 2^19 words forces the chunked path
    inst = make_instance(2, 19, 2, [Relation.of("ne", [(0, 1), (1, 0)])],
                         [(1, (i, i + 1)) for i in range(1, 19)])
    assert brute_force_solve(inst) == tuple(i % 2 for i in range(19))


def test_projection_examples():
    assert project_admissible(AdmissibleSet(2, 3), 2) == set(cube(2, 2))
    perms = AdmissibleSet(3, 3, "permutations")
    assert project_admissible(perms, 2) == {(a, b) for a in range(3) for b in range(3) if a != b}
    single = AdmissibleSet(2, 3, "list", words=[(0, 0, 0)])
    assert project_admissible(single, 1) == {(0,)}


@pytest.mark.parametrize("W", [
    AdmissibleSet(3, 3),
    AdmissibleSet(4, 3, "permutations"),
    AdmissibleSet(2, 5, "weight", k=2),
])
def test_projection_matches_definition(W):
    for q in range(1, W.ell + 1):
        expected = {a[:q] for a in W}
        assert W.projection(q) == expected


@pytest.mark.parametrize("W", [
    AdmissibleSet(3, 3),
    AdmissibleSet(4, 3, "permutations"),
    AdmissibleSet(2, 5, "weight", k=2),
    AdmissibleSet(2, 3, "list", words=[(0, 0, 1), (0, 1, 0), (1, 0, 0)]),
])
def test_shipped_kinds_are_symmetric(W):
    rng = random.Random(0)
    assert W.symmetric
    words = list(W)
    for _ in range(50):
        a = rng.choice(words)
        perm = list(range(W.ell))
        rng.shuffle(perm)
        assert tuple(a[i] for i in perm) in W


def test_admissible_sizes_and_order():
    W = AdmissibleSet(2, 4, "weight", k=2)
    assert W.size() == 6 == len(list(W))
    assert list(W) == sorted(W)
    assert W.first() == (0, 0, 1, 1)
    P = AdmissibleSet(3, 2, "permutations")
    assert P.size() == 6 and P.first() == (0, 1)


def test_admissible_serialisation_round_trip():
    for W in (AdmissibleSet(2, 3), AdmissibleSet(2, 4, "weight", k=1),
              AdmissibleSet(2, 2, "list", words=[(0, 1), (1, 0)])):
        assert AdmissibleSet.from_dict(W.w, W.ell, W.to_dict()) == W


def test_params_validation():
    with pytest.raises(InputError):
        CspParams(2, 1, 2)
    with pytest.raises(InputError):
        CspParams(0, 1, 1)


def test_constraint_needs_distinct_variables():
    with pytest.raises(InputError):
        make_instance(2, 3, 2, [Relation.of("r", [(0, 1)])], [(1, (2, 2))])


def test_instance_validation():
    with pytest.raises(InputError):
        make_instance(2, 2, 1, [Relation.of("r", [(2,)])], [])
    with pytest.raises(InputError):
        make_instance(2, 2, 1, [ID], [(2, (1,))])
    with pytest.raises(InputError):
        make_instance(2, 2, 1, [ID], [(1, (3,))])
    with pytest.raises(InputError):
        make_instance(2, 2, 1, [ID], [(1, (1,)), (1, (1,))], promise="RF")
    # relations must lie in W_q
    W = AdmissibleSet(3, 2, "permutations")
    with pytest.raises(InputError):
        make_instance(3, 2, 2, [Relation.of("eq", [(0, 0)])], [], W)


def test_instance_equality_and_hash():
    a, b = one_sat(2, [1, -2]), one_sat(2, [1, -2])
    assert a == b and hash(a) == hash(b)
    assert a != one_sat(2, [1])


def test_permutation_instance():
    W = AdmissibleSet(3, 3, "permutations")
    lt = Relation.of("lt", [(a, b) for a in range(3) for b in range(3) if a < b])
    inst = make_instance(3, 3, 2, [lt], [(1, (3, 2)), (1, (2, 1))], W)
    assert brute_force_solve(inst) == (2, 1, 0)


# ---------------------------------------------------------------------------
# properties


@st.composite
def small_instances(draw):
    w = draw(st.integers(1, 3))
    ell = draw(st.integers(1, 4))
    q = draw(st.integers(1, min(2, ell)))
    pts = list(itertools.product(range(w), repeat=q))
    s = draw(st.integers(1, 3))
    rels = [Relation.of(f"R{i}", draw(st.sets(st.sampled_from(pts))), arity=q) for i in range(s)]
    tuples = distinct_tuples(ell, q)
    m = draw(st.integers(0, 5))
    cons = [(draw(st.integers(1, s)), draw(st.sampled_from(tuples))) for _ in range(m)]
    return make_instance(w, ell, q, rels, cons)


@settings(max_examples=150, deadline=None)
@given(small_instances())
def test_violations_match_direct_evaluation(inst):
    for a in inst.admissible:
        direct = [j for j, c in enumerate(inst.constraints, 1)
                  if tuple(a[v - 1] for v in c.vars) not in inst.relations[c.rel - 1].tuples]
        assert violations(inst, a) == direct


@settings(max_examples=150, deadline=None)
@given(small_instances())
def test_brute_force_no_iff_every_word_violates(inst):
    ans = brute_force_solve(inst)
    sols = [a for a in inst.admissible if not violations(inst, a)]
    if ans is NO:
        assert not sols
    else:
        assert ans == sols[0]
        assert count_solutions(inst) == len(sols)
        assert list(iter_solutions(inst)) == sols
        assert satisfies(inst, ans)
