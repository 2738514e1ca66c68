import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hiddencsp import EXCEPTION, NO, InputError, Relation, make_fixed_oracle, make_instance
from hiddencsp.core import brute_force_solve, satisfies
from hiddencsp.families import family_set, is_spanning_tree, undirected_slots, word_to_edges
from hiddencsp.solvers import (
    TWO_SAT_RELATIONS,
    BipartiteGraph,
    Cnf2,
    binary_csp_to_2sat,
    eq_spanning_tree_backend,
    maximum_matching,
    parse_dimacs,
    solve_2sat,
    solve_hidden_graph_property_v,
    solve_kweight_rf,
    solve_ug2,
    solve_union_1sat_rf,
    solve_union_binary_hidden,
    spanning_tree_finder,
    spanning_tree_with_forest,
    to_dimacs,
)
from hiddencsp.solvers.matching import has_system_of_distinct_representatives

from conftest import ID, NEG, one_sat


def _brute_cnf(f: Cnf2):
    for a in itertools.product((0, 1), repeat=f.n):
        if f.satisfied_by(a):
            return a
    return NO


# ---------------------------------------------------------------------------
# 2-SAT


def test_solve_2sat_examples():
    ans = solve_2sat(Cnf2(2, [(1, 2), (-1, 2)]))
    assert ans[1] == 1
    assert solve_2sat(Cnf2(1, [(1,), (-1,)])) is NO
    assert solve_2sat(Cnf2(3, [])) == (0, 0, 0)
    assert solve_2sat(Cnf2(2, [()])) is NO


def test_cnf2_validation():
    with pytest.raises(InputError):
        Cnf2(3, [(1, 2, 3)])
    with pytest.raises(InputError):
        Cnf2(2, [(3,)])


def test_xor_translation():
    xor = Relation.of("xor", [(0, 1), (1, 0)])
    f = binary_csp_to_2sat(make_instance(2, 2, 2, [xor], [(1, (1, 2))]))
    assert sorted(f.clauses) == [(-1, -2), (1, 2)]


def test_trivial_relations_translate():
    top, bottom = TWO_SAT_RELATIONS[0], TWO_SAT_RELATIONS[1]
    assert binary_csp_to_2sat(make_instance(2, 2, 2, [top], [(1, (1, 2))])).clauses == []
    f = binary_csp_to_2sat(make_instance(2, 2, 2, [bottom], [(1, (1, 2))]))
    assert f.clauses == [()]
    assert solve_2sat(f) is NO


def test_translation_needs_boolean_full_cube():
    with pytest.raises(InputError):
        binary_csp_to_2sat(make_instance(3, 2, 1, [Relation.of("r", [(2,)])], []))


SAME = Relation.of("same", [(0, 0), (1, 1)])
SWAP = Relation.of("swap", [(0, 1), (1, 0)])


def test_ug2_examples():
    tri = [(1, 2), (2, 3), (1, 3)]
    same = make_instance(2, 3, 2, [SAME], [(1, e) for e in tri])
    assert solve_ug2(same) in {(0, 0, 0), (1, 1, 1)}
    edge = make_instance(2, 2, 2, [SWAP], [(1, (1, 2))])
    a = solve_ug2(edge)
    assert a[0] != a[1]
    odd = make_instance(2, 3, 2, [SWAP], [(1, e) for e in tri])
    assert solve_ug2(odd) is NO


def test_dimacs_round_trip():
    f = Cnf2(3, [(1, -2), (3,), (-1, -3)])
    g = parse_dimacs(to_dimacs(f))
    assert g == f
    assert parse_dimacs("c hi\np cnf 2 1\n1 -2\n0\n").clauses == [(1, -2)]
    with pytest.raises(InputError):
        parse_dimacs("1 2 0\n")
    with pytest.raises(InputError):
        parse_dimacs("p cnf 2 1\n1 x 0\n")


def test_hidden_binary_examples():
    for lits, expected in (([1, -2, 3], (1, 0, 1)), ([1, -1], NO), ([-2], (0, 0, 0))):
        inst = one_sat(3, lits)
        assert solve_union_binary_hidden(make_fixed_oracle(inst, "v")) == expected


@st.composite
def cnf2s(draw):
    n = draw(st.integers(1, 12))
    lit = st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v]))
    clauses = draw(st.lists(st.lists(lit, min_size=1, max_size=2).map(tuple), max_size=20))
    return Cnf2(n, clauses)


@settings(max_examples=400, deadline=None)
@given(cnf2s())
def test_2sat_agrees_with_brute_force(f):
    ans = solve_2sat(f)
    if _brute_cnf(f) is NO:
        assert ans is NO
    else:
        assert ans is not NO and f.satisfied_by(ans)


@st.composite
def binary_instances(draw):
    ell = draw(st.integers(2, 6))
    pairs = list(itertools.permutations(range(1, ell + 1), 2))
    m = draw(st.integers(0, 6))
    cons = [(draw(st.integers(1, 10)), draw(st.sampled_from(pairs))) for _ in range(m)]
    return make_instance(2, ell, 2, TWO_SAT_RELATIONS, cons)


@settings(max_examples=200, deadline=None)
@given(binary_instances())
def test_translation_preserves_solution_set(inst):
    f = binary_csp_to_2sat(inst)
    for a in itertools.product((0, 1), repeat=inst.ell):
        assert f.satisfied_by(a) == satisfies(inst, a)


# ---------------------------------------------------------------------------
# matching and repetition-free solvers


def test_maximum_matching_basics():
    g = BipartiteGraph(["a", "b", "c"], [1, 2], [("a", 1), ("b", 1), ("b", 2), ("c", 2)])
    match = maximum_matching(g.adjacency())
    assert len(match) == 2 and len(set(match.values())) == 2
    assert maximum_matching({}) == {}
    assert has_system_of_distinct_representatives([{1}, {1}]) is None


def _brute_sdr(sets):
    return any(len(set(c)) == len(c) for c in itertools.product(*[sorted(s) for s in sets]))


@settings(max_examples=300, deadline=None)
@given(st.lists(st.sets(st.integers(1, 6), max_size=4), max_size=6))
def test_matching_is_maximum(sets):
    match = maximum_matching({j: sorted(s) for j, s in enumerate(sets)})
    assert all(v in sets[u] for u, v in match.items())
    assert len(set(match.values())) == len(match)
    assert (len(match) == len(sets)) == _brute_sdr(sets)


def test_union_1sat_rf_examples():
    assert solve_union_1sat_rf([{1, 2}, {1}], 2) == (1, 1)
    assert solve_union_1sat_rf([{1}, {-1}], 1) is EXCEPTION
    assert solve_union_1sat_rf([], 3) == (0, 0, 0)
    with pytest.raises(InputError):
        solve_union_1sat_rf([{3}], 2)


def test_kweight_rf_examples():
    assert solve_kweight_rf([{1, 2}, {2}], 4, 2) == (0, 0, 1, 1)
    assert solve_kweight_rf([{1}, {2}, {3}], 4, 2) is EXCEPTION
    # the k ones go on the lowest free positions; with k = ell that is all-ones
    assert solve_kweight_rf([], 4, 2) == (1, 1, 0, 0)
    assert solve_kweight_rf([], 3, 3) == (1, 1, 1)
    assert solve_kweight_rf([{1}, {1}], 4, 1) is EXCEPTION
    with pytest.raises(InputError):
        solve_kweight_rf([{5}], 4, 1)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.sets(st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v])),
                                 min_size=1, max_size=3), max_size=6))))
def test_union_1sat_rf_answers(data):
    n, clauses = data
    ans = solve_union_1sat_rf(clauses, n)
    if ans is EXCEPTION:
        assert not _brute_sdr([{abs(l) for l in c} for c in clauses])
    else:
        assert all(any((ans[abs(l) - 1] == 1) == (l > 0) for l in c) for c in clauses)


# ---------------------------------------------------------------------------
# graph backends


def test_spanning_tree_with_forest_examples():
    k4 = list(itertools.combinations(range(1, 5), 2))
    tree = spanning_tree_with_forest(4, [], k4)
    assert is_spanning_tree(4, tree)
    path = [(1, 2), (2, 3), (3, 4)]
    assert spanning_tree_with_forest(4, path, path) == path
    assert spanning_tree_with_forest(4, [], [(1, 2), (3, 4)]) is NO
    with pytest.raises(InputError):
        spanning_tree_with_forest(3, [(1, 2), (2, 3), (1, 3)], [(1, 2), (2, 3), (1, 3)])
    with pytest.raises(InputError):
        spanning_tree_with_forest(3, [(1, 2)], [(2, 3)])


def _hidden_st(n, edges):
    slots = undirected_slots(n)
    W = family_set("spanning-trees", n=n)
    cons = [(1, (i,)) for i, e in enumerate(slots, 1) if e not in edges]
    return make_instance(2, len(slots), 1, [NEG], cons, W)


def test_hidden_spanning_tree_on_path():
    path = {(1, 2), (2, 3), (3, 4)}
    inst = _hidden_st(4, path)
    oracle = make_fixed_oracle(inst, "v")
    ans = solve_hidden_graph_property_v(oracle, spanning_tree_finder(4))
    assert set(word_to_edges("undirected", 4, ans)) == path
    assert oracle.trials <= 6 - 3 + 1


def test_hidden_spanning_tree_complete_and_disconnected():
    k4 = set(itertools.combinations(range(1, 5), 2))
    oracle = make_fixed_oracle(_hidden_st(4, k4), "v")
    assert solve_hidden_graph_property_v(oracle, spanning_tree_finder(4)) is not NO
    assert oracle.trials == 1
    oracle = make_fixed_oracle(_hidden_st(4, {(1, 2), (3, 4)}), "v")
    assert solve_hidden_graph_property_v(oracle) is NO


def test_eq_spanning_tree_backend():
    W = family_set("spanning-trees", n=3)
    backend = eq_spanning_tree_backend(3)
    inst = make_instance(2, 3, 1, [ID, NEG], [(1, (1,)), (2, (2,))], W)
    assert backend(inst) == (1, 0, 1)
    inst = make_instance(2, 3, 1, [ID], [(1, (1,)), (1, (2,)), (1, (3,))], W)
    assert backend(inst) is NO


def test_hidden_graph_property_random_graphs():
    rng = random.Random(4)
    slots = undirected_slots(5)
    for _ in range(30):
        edges = {e for e in slots if rng.random() < 0.5}
        inst = _hidden_st(5, edges)
        oracle = make_fixed_oracle(inst, "v", "random:1")
        ans = solve_hidden_graph_property_v(oracle, spanning_tree_finder(5))
        expected = brute_force_solve(inst)
        assert (ans is NO) == (expected is NO)
        assert oracle.trials <= len(slots) + 1
