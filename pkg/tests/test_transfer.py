import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hiddencsp import (
    EXCEPTION,
    NO,
    AdmissibleSet,
    BackendContractError,
    InputError,
    Relation,
    RevealLevel,
    brute_force_solve,
    extend_over_set,
    make_fixed_oracle,
    make_instance,
    reverse_extension_via_hidden,
    reverse_union_via_hidden,
    reverse_unionx_via_hidden,
    solve_hidden_empty,
    solve_hidden_r,
    solve_hidden_rv,
    solve_hidden_v,
    solve_hidden_v_promise,
)
from hiddencsp.closures import union_of_terms
from hiddencsp.core import satisfies
from hiddencsp.solvers import onesat_rf_backend
from hiddencsp.transfer import (
    ENGINES,
    bound_empty,
    bound_r,
    bound_rv,
    bound_v,
    includes_satisfiable_rf,
    trial_bound,
)

from conftest import ID, NEG, one_sat
from test_core import small_instances


def _run(inst, level, policy="first", **kw):
    oracle = make_fixed_oracle(inst, level, policy)
    return ENGINES[RevealLevel.parse(level)](oracle, **kw), oracle.trials


# ---------------------------------------------------------------------------
# full reveal


def test_rv_single_literal():
    ans, trials = _run(one_sat(1, [1]), "rv")
    assert ans == (1,) and trials <= 2


def test_rv_contradiction():
    ans, trials = _run(one_sat(1, [1, -1]), "rv")
    assert ans is NO and trials == 2


def test_rv_first_trial_satisfies():
    ans, trials = _run(one_sat(2, [-1, -2]), "rv")
    assert ans == (0, 0) and trials == 1


def test_rv_rejects_wrong_level():
    with pytest.raises(InputError):
        solve_hidden_rv(make_fixed_oracle(one_sat(1, [1]), "v"))


# ---------------------------------------------------------------------------
# variable reveal


def test_v_three_literals_within_bound():
    inst = one_sat(3, [1, -2, 3])
    ans, trials = _run(inst, "v")
    assert ans == (1, 0, 1)
    assert trials <= 7 == bound_v([ID, NEG], inst.admissible, 3)


def test_v_contradiction():
    assert _run(one_sat(1, [1, -1]), "v")[0] is NO


def test_v_first_trial_satisfies():
    assert _run(one_sat(3, [-2]), "v") == ((0, 0, 0), 1)


def test_v_synthesized_constraints_shrink():
    history = []
    inst = one_sat(3, [1, 2, 3, -1])
    ans = solve_hidden_v(make_fixed_oracle(inst, "v", "greedy"), history=history)
    assert ans is NO
    last = {}
    for j, tuples in history:
        if j in last:
            assert tuples <= last[j]
        last[j] = tuples


# ---------------------------------------------------------------------------
# relation reveal


def test_r_single_literal_within_three_trials():
    ans, trials = _run(one_sat(2, [-1]), "r")
    assert ans == (0, 0) and trials == 1
    ans, trials = _run(one_sat(2, [2]), "r")
    assert ans == (0, 1) and trials <= 3 == bound_r(2, 1, 1)


def test_r_contradiction_on_one_variable():
    assert _run(one_sat(1, [1, -1]), "r")[0] is NO


def test_r_index_sets_shrink():
    history = []
    solve_hidden_r(make_fixed_oracle(one_sat(3, [3, 2]), "r"), history=history)
    last = {}
    for j, alive in history:
        if j in last:
            assert set(alive) <= set(last[j])
        last[j] = alive


# ---------------------------------------------------------------------------
# index-only reveal


def test_empty_single_literal_within_bound():
    inst = one_sat(2, [2])
    ans, trials = _run(inst, "none")
    assert ans == (0, 1)
    assert trials <= bound_empty([ID, NEG], inst.admissible, 1)


def test_empty_no_constraints():
    assert _run(one_sat(2, []), "none") == ((0, 0), 1)


def test_empty_contradiction():
    assert _run(one_sat(1, [1, -1]), "none")[0] is NO


def test_bounds():
    W = AdmissibleSet(2, 2)
    assert bound_rv(4) == 5
    assert bound_v([ID, NEG], W, 3) == 7
    assert bound_r(3, 2, 2) == 13
    # four lifts of Id/Neg over two variables have a chain of length 3
    assert bound_empty([ID, NEG], W, 1) == 4
    assert trial_bound(RevealLevel.RV, [ID], W, 2) == 3


# ---------------------------------------------------------------------------
# reverse simulations


UNIV = Relation.of("Id|Neg", [(0,), (1,)])
EMPTY = Relation.of("none", [], arity=1)


def test_reverse_union_examples():
    base = [ID, NEG]
    always = make_instance(2, 2, 1, [UNIV], [(1, (1,))])
    assert reverse_union_via_hidden(always, base) == (0, 0)
    never = make_instance(2, 2, 1, [EMPTY], [(1, (1,))])
    assert reverse_union_via_hidden(never, base) is NO
    mixed = make_instance(2, 2, 1, [UNIV, ID], [(1, (1,)), (2, (2,))])
    ans = reverse_union_via_hidden(mixed, base)
    assert ans[1] == 1


def test_reverse_union_rejects_non_union():
    base = [Relation.of("a", [(0, 0)])]
    inst = make_instance(2, 2, 2, [Relation.of("b", [(1, 1)])], [(1, (1, 2))])
    with pytest.raises(InputError):
        reverse_union_via_hidden(inst, base)


def _ext_instance(ell, ext_rels):
    rels = list(ext_rels)
    return make_instance(2, ell, 1, rels, [(k, ()) for k in range(1, len(rels) + 1)])


def test_reverse_extension_examples():
    base = [ID, NEG]
    always = _ext_instance(2, [extend_over_set(ID, [(1,), (2,)], 2)])
    assert satisfies(always, reverse_extension_via_hidden(always, base))
    never = _ext_instance(2, [extend_over_set(ID, [], 2)])
    assert reverse_extension_via_hidden(never, base) is NO
    inst = _ext_instance(2, [extend_over_set(ID, [(2,)], 2), extend_over_set(NEG, [(1,), (2,)], 2)])
    assert reverse_extension_via_hidden(inst, base) == (0, 1)


def test_reverse_unionx_examples():
    base = [ID, NEG]
    always = _ext_instance(1, [union_of_terms([(ID, (1,)), (NEG, (1,))], 1)])
    assert reverse_unionx_via_hidden(always, base) == (0,)
    never = _ext_instance(1, [union_of_terms([], 1)])
    assert reverse_unionx_via_hidden(never, base) is NO
    inst = _ext_instance(2, [union_of_terms([(ID, (1,)), (NEG, (1,))], 2),
                             union_of_terms([(ID, (2,))], 2)])
    assert reverse_unionx_via_hidden(inst, base) == (0, 1)


# ---------------------------------------------------------------------------
# promise engine


def rf_one_sat(ell, literals):
    cons = [(1 if lit > 0 else 2, (abs(lit),)) for lit in literals]
    return make_instance(2, ell, 1, [ID, NEG], cons, promise="RF")


def test_promise_solves_rf_onesat():
    inst = rf_one_sat(2, [1, -2])
    ans = solve_hidden_v_promise(make_fixed_oracle(inst, "v"), onesat_rf_backend)
    assert satisfies(inst, ans)


def test_promise_contradiction_is_no():
    inst = one_sat(1, [1, -1])
    assert solve_hidden_v_promise(make_fixed_oracle(inst, "v"), onesat_rf_backend) is NO


def test_promise_empty_instance():
    oracle = make_fixed_oracle(rf_one_sat(2, []), "none")
    assert solve_hidden_v_promise(oracle, onesat_rf_backend) == (0, 0)
    assert oracle.trials == 1


def test_promise_contract_violation_is_detected():
    inst = rf_one_sat(2, [1, 2])
    check = lambda i: includes_satisfiable_rf(i, [ID, NEG])
    with pytest.raises(BackendContractError):
        solve_hidden_v_promise(make_fixed_oracle(inst, "v"), lambda i: EXCEPTION,
                               promise_check=check)


# ---------------------------------------------------------------------------
# properties


@settings(max_examples=80, deadline=None)
@given(small_instances(), st.sampled_from(list(RevealLevel)),
       st.sampled_from(["first", "random:5", "greedy"]))
def test_engines_agree_with_brute_force_within_bounds(inst, level, policy):
    ans, trials = _run(inst, level.value, policy)
    expected = brute_force_solve(inst)
    if expected is NO:
        assert ans is NO
    else:
        assert ans is not NO and satisfies(inst, ans)
    assert trials <= trial_bound(level, inst.relations, inst.admissible, inst.m)


@st.composite
def union_instances(draw):
    ell = draw(st.integers(1, 4))
    base = [ID, NEG]
    unions = [Relation.of("U0", [], arity=1), ID, NEG, UNIV]
    m = draw(st.integers(0, 4))
    cons = [(draw(st.integers(1, 4)), (draw(st.integers(1, ell)),)) for _ in range(m)]
    return base, make_instance(2, ell, 1, unions, cons)


@settings(max_examples=100, deadline=None)
@given(union_instances())
def test_reverse_union_round_trip(data):
    base, inst = data
    ans = reverse_union_via_hidden(inst, base)
    if brute_force_solve(inst) is NO:
        assert ans is NO
    else:
        assert satisfies(inst, ans)


def test_monotone_engines_on_random_family():
    rng = random.Random(1)
    for _ in range(40):
        ell = rng.randint(1, 4)
        lits = [rng.choice([1, -1]) * rng.randint(1, ell) for _ in range(rng.randint(0, 5))]
        history = []
        solve_hidden_empty(make_fixed_oracle(one_sat(ell, lits), "none"), history=history)
        last = {}
        for j, terms in history:
            if j in last:
                assert terms <= last[j]
            last[j] = terms
