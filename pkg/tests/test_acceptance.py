"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line."""
import contextlib
import io
import itertools
import random
import time

import pytest

from hiddencsp import EXCEPTION, NO, Relation, make_fixed_oracle, make_instance
from hiddencsp.bench import case_rng, random_2sat_instance, random_small_instance, run_bench
from hiddencsp.cli import main
from hiddencsp.closures import (
    ExtendedRelation,
    dim_union,
    union_closure,
    union_of_terms,
    unionx_dim_bounds,
)
from hiddencsp.core import brute_force_solve, distinct_tuples, satisfies
from hiddencsp.families import is_group_table
from hiddencsp.reductions import REDUCTIONS, Graph, check_equivalence, hamdigraph_to_groupeq
from hiddencsp.reductions.monsat import is_minimal_empty_family
from hiddencsp.reductions.samples import random_source
from hiddencsp.solvers import (
    TWO_SAT_RELATIONS,
    binary_csp_to_2sat,
    solve_2sat,
    solve_kweight_rf,
    solve_union_1sat_rf,
    solve_union_binary_hidden,
)
from hiddencsp.transfer import (
    reverse_extension_via_hidden,
    reverse_union_via_hidden,
    reverse_unionx_via_hidden,
)

from conftest import ID, NEG, record_criterion

pytestmark = pytest.mark.acceptance

SEED = 2024


@pytest.fixture(scope="module")
def small_bench():
    start = time.perf_counter()
    rows = run_bench("rand-small", 1000, SEED)
    return rows, time.perf_counter() - start


# ---------------------------------------------------------------------------
# 1. transfer round trip


def test_criterion_1_transfer_round_trip(small_bench):
    rows, seconds = small_bench
    cases = len({r.case for r in rows})
    combos = {(r.level, r.policy) for r in rows}
    bad = sum(not r.agrees for r in rows)
    ok = cases == 1000 and len(combos) == 12 and bad == 0 and seconds < 120
    record_criterion(1, ok, f"{cases} instances x {len(combos)} engine/policy runs, "
                            f"{bad} disagreements, {seconds:.1f}s (limit 120s)")
    assert ok


# ---------------------------------------------------------------------------
# 2. trial bounds


def test_criterion_2_trial_bounds(small_bench):
    rows, _ = small_bench
    violations = sum(not r.within for r in rows)
    # the index-only bound uses dim of the union closure of X(R); check the
    # stricter m * lower + 1 where the exact search gave only bounds
    strict_bad = 0
    dims = {}
    for r in rows:
        if r.level != "none":
            continue
        if r.case not in dims:
            inst = random_small_instance(case_rng(SEED, "rand-small", r.case))
            dims[r.case] = unionx_dim_bounds(inst.relations, inst.admissible)
        lower, _ = dims[r.case]
        strict_bad += r.trials > r.m * lower + 1
    exact = sum(lo == up for lo, up in dims.values())
    ok = violations == 0 and strict_bad == 0
    record_criterion(2, ok, f"{len(rows)} runs, {violations} bound violations; index-only runs "
                            f"vs m*dim+1: {strict_bad} violations (dim exact on {exact}/{len(dims)} cases)")
    assert ok


# ---------------------------------------------------------------------------
# 3. reverse simulations


def _random_base(rng):
    w = rng.randint(1, 3)
    q = rng.randint(1, 2)
    pts = list(itertools.product(range(w), repeat=q))
    rels = [Relation.of(f"B{i + 1}", [p for p in pts if rng.random() < 0.5], arity=q)
            for i in range(rng.randint(1, 3))]
    return w, q, rels


def random_union_instance(rng):
    w, q, base = _random_base(rng)
    ell = rng.randint(q, 5)
    unions, cons = {}, []
    for _ in range(rng.randint(0, 5)):
        members = [r for r in base if rng.random() < 0.5]
        tuples = frozenset().union(*(r.tuples for r in members))
        unions.setdefault(tuples, Relation(f"U{len(unions) + 1}", q, tuples))
        cons.append((list(unions).index(tuples) + 1, tuple(rng.sample(range(1, ell + 1), q))))
    return base, make_instance(w, ell, q, list(unions.values()), cons)


def random_extension_instance(rng):
    w, q, base = _random_base(rng)
    ell = rng.randint(q, 4)
    tuples = distinct_tuples(ell, q)
    rels = []
    for j in range(rng.randint(0, 5)):
        r = rng.choice(base)
        idx = [t for t in tuples if rng.random() < 0.4]
        rels.append(ExtendedRelation(f"E{j + 1}", ell, frozenset((r, t) for t in idx)))
    return base, make_instance(w, ell, q, rels, [(j, ()) for j in range(1, len(rels) + 1)])


def random_unionx_instance(rng):
    w, q, base = _random_base(rng)
    ell = rng.randint(q, 4)
    lifts = [(r, t) for r in base for t in distinct_tuples(ell, q)]
    rels = []
    for j in range(rng.randint(0, 5)):
        terms = [x for x in lifts if rng.random() < 0.3]
        rels.append(union_of_terms(terms, ell, f"X{j + 1}"))
    return base, make_instance(w, ell, q, rels, [(j, ()) for j in range(1, len(rels) + 1)])


REVERSE = {
    "union": (random_union_instance, reverse_union_via_hidden),
    "extension": (random_extension_instance, reverse_extension_via_hidden),
    "unionx": (random_unionx_instance, reverse_unionx_via_hidden),
}


def test_criterion_3_reverse_simulations():
    report = []
    ok = True
    for name, (gen, engine) in REVERSE.items():
        bad = 0
        for i in range(500):
            base, inst = gen(random.Random(f"{SEED}:reverse:{name}:{i}"))
            truth = brute_force_solve(inst)
            ans = engine(inst, base)
            if (ans is NO) != (truth is NO) or (ans is not NO and not satisfies(inst, ans)):
                bad += 1
        report.append(f"{name} {bad}/500")
        ok &= bad == 0
    record_criterion(3, ok, "disagreements: " + ", ".join(report))
    assert ok


# ---------------------------------------------------------------------------
# 4. closure fact


def test_criterion_4_closure_fact():
    closure = union_closure([ID, NEG])
    expected = {frozenset(), frozenset({(0,)}), frozenset({(1,)}), frozenset({(0,), (1,)})}
    fact = closure == expected and dim_union([ID, NEG]) == 2
    rng = random.Random(f"{SEED}:closure")
    bad = 0
    for _ in range(200):
        w, q = rng.randint(1, 3), rng.randint(1, 2)
        pts = list(itertools.product(range(w), repeat=q))
        rels = [Relation.of(f"R{i}", [p for p in pts if rng.random() < 0.5], arity=q)
                for i in range(rng.randint(1, 6))]
        bad += dim_union(rels) > len(rels)
    ok = fact and bad == 0
    record_criterion(4, ok, f"closure of {{Id, Neg}} has {len(closure)} members, dim "
                            f"{dim_union([ID, NEG])}; dim > |R| on {bad}/200 random sets")
    assert ok


# ---------------------------------------------------------------------------
# 5. hidden 2-SAT


def _large_binary_instance(rng, planted: bool, n=100, m=300):
    rels = TWO_SAT_RELATIONS[2:]
    hidden = [rng.randint(0, 1) for _ in range(n)]
    cons = []
    while len(cons) < m:
        k = rng.randint(1, len(rels))
        t = tuple(rng.sample(range(1, n + 1), 2))
        if planted and not rels[k - 1].satisfied_by(hidden, t):
            continue
        cons.append((k, t))
    return make_instance(2, n, 2, rels, cons)


def test_criterion_5_hidden_2sat():
    slowest, bad = 0.0, 0
    for i in range(20):
        rng = random.Random(f"{SEED}:2sat:{i}")
        inst = _large_binary_instance(rng, planted=i % 2 == 0)
        start = time.perf_counter()
        ans = solve_union_binary_hidden(make_fixed_oracle(inst, "v", "greedy"))
        slowest = max(slowest, time.perf_counter() - start)
        direct = solve_2sat(binary_csp_to_2sat(inst))
        if (ans is NO) != (direct is NO) or (ans is not NO and not satisfies(inst, ans)):
            bad += 1
    small_bad = 0
    for i in range(300):
        inst = random_2sat_instance(random.Random(f"{SEED}:2sat-small:{i}"))
        ans = solve_union_binary_hidden(make_fixed_oracle(inst, "v"))
        truth = brute_force_solve(inst)
        if (ans is NO) != (truth is NO) or (ans is not NO and not satisfies(inst, ans)):
            small_bad += 1
    ok = bad == 0 and small_bad == 0 and slowest < 5
    record_criterion(5, ok, f"n=100 m=300: {bad}/20 wrong, slowest {slowest:.2f}s (limit 5s); "
                            f"n=12 vs brute force: {small_bad}/300 wrong")
    assert ok


# ---------------------------------------------------------------------------
# 6. repetition-free matching solvers


def _has_distinct_system(sets):
    return any(len(set(c)) == len(c) for c in itertools.product(*[sorted(s) for s in sets]))


def _check_1sat(clauses, n):
    ans = solve_union_1sat_rf(clauses, n)
    system = _has_distinct_system([{abs(l) for l in c} for c in clauses])
    if ans is EXCEPTION:
        return not system
    return system and all(any((ans[abs(l) - 1] == 1) == (l > 0) for l in c) for c in clauses)


def _check_kweight(subsets, ell, k):
    ans = solve_kweight_rf(subsets, ell, k)
    system = len(subsets) <= ell - k and _has_distinct_system(subsets)
    if ans is EXCEPTION:
        return not system
    return system and sum(ans) == k and all(any(ans[i - 1] == 0 for i in s) for s in subsets)


def _literal_sets(n):
    lits = [v for i in range(1, n + 1) for v in (i, -i)]
    return [set(c) for r in range(1, len(lits) + 1) for c in itertools.combinations(lits, r)]


def test_criterion_6_rf_matching_solvers():
    checked = bad = 0
    # exhaustive sweep: every clause list over <= 2 variables with m <= 3,
    # every subset list over <= 3 positions with m <= 3
    for n in (1, 2):
        sets = _literal_sets(n)
        for m in range(4):
            for clauses in itertools.product(sets, repeat=m):
                checked += 1
                bad += not _check_1sat(list(clauses), n)
    for ell in (1, 2, 3):
        subs = [set(c) for r in range(1, ell + 1) for c in itertools.combinations(range(1, ell + 1), r)]
        for m in range(4):
            for subsets in itertools.product(subs, repeat=m):
                for k in range(ell + 1):
                    checked += 1
                    bad += not _check_kweight(list(subsets), ell, k)
    rng = random.Random(f"{SEED}:rf")
    for _ in range(1000):
        ell, m = rng.randint(1, 8), rng.randint(0, 8)
        clauses = [{rng.choice((1, -1)) * rng.randint(1, ell) for _ in range(rng.randint(1, 3))}
                   for _ in range(m)]
        bad += not _check_1sat(clauses, ell)
        subsets = [set(rng.sample(range(1, ell + 1), rng.randint(1, min(3, ell)))) for _ in range(m)]
        bad += not _check_kweight(subsets, ell, rng.randint(0, ell))
        checked += 2
    ok = bad == 0
    record_criterion(6, ok, f"{checked} instances checked against exhaustive system search, {bad} mismatches")
    assert ok


# ---------------------------------------------------------------------------
# 7. reduction equivalence


def test_criterion_7_reduction_equivalence():
    failures = []
    structural = 0
    for name in REDUCTIONS:
        for i in range(200):
            out = random_source(name, random.Random(f"{SEED}:reduce:{name}:{i}"))
            rep = check_equivalence(out)
            if not rep.ok:
                failures.append(f"{name}#{i}")
            if name == "monsat":
                fam = out.metadata["block_family"]
                if not (fam.h >= 1 and fam.a0 and fam.a1 and not fam.a0 & fam.a1
                        and is_minimal_empty_family(fam, out.target.w)):
                    structural += 1
    ok = not failures and structural == 0
    record_criterion(7, ok, f"{len(REDUCTIONS)} reductions x 200 sources, {len(failures)} failures, "
                            f"{structural} monsat structural failures")
    assert ok, failures[:10]


# ---------------------------------------------------------------------------
# 8. group-table equality


def _has_ham_cycle(n, arcs):
    return any(all((c[i], c[(i + 1) % n]) in arcs for i in range(n))
               for c in ((1,) + p for p in itertools.permutations(range(2, n + 1))))


def _groupeq_ok(g: Graph, z: int) -> bool:
    out = hamdigraph_to_groupeq(g, g.n, z)
    table = brute_force_solve(out.target)
    expected = _has_ham_cycle(g.n, g.edge_set())
    if (table is not NO) != expected:
        return False
    if table is NO:
        return True
    return is_group_table(table, g.n) and out.source_verify(out.backward(table))


def test_criterion_8_groupeq():
    arcs3 = [(u, v) for u in range(1, 4) for v in range(1, 4) if u != v]
    checked = bad = 0
    for mask in range(1 << len(arcs3)):
        g = Graph(3, [a for i, a in enumerate(arcs3) if mask >> i & 1], directed=True)
        for z in (1, 2, 3):
            checked += 1
            bad += not _groupeq_ok(g, z)
    rng = random.Random(f"{SEED}:groupeq")
    arcs5 = [(u, v) for u in range(1, 6) for v in range(1, 6) if u != v]
    for _ in range(50):
        density = rng.uniform(0.2, 0.9)
        g = Graph(5, [a for a in arcs5 if rng.random() < density], directed=True)
        checked += 1
        bad += not _groupeq_ok(g, rng.randint(1, 5))
    ok = bad == 0
    record_criterion(8, ok, f"{checked} digraphs (all 64 on [3] for each z, 50 random on [5]), {bad} mismatches")
    assert ok


# ---------------------------------------------------------------------------
# 9. determinism


def test_criterion_9_bench_determinism(tmp_path):
    outputs = []
    for i in range(2):
        dump = tmp_path / f"run{i}.json"
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            code = main(["bench", "--family", "rand-small", "--cases", "100", "--seed", "9",
                         "--json", str(dump)])
        outputs.append((code, buf.getvalue().encode(), dump.read_bytes()))
    ok = outputs[0] == outputs[1] and outputs[0][0] == 0
    record_criterion(9, ok, f"two bench runs, {len(outputs[0][1])} bytes of table, identical: "
                            f"{outputs[0] == outputs[1]}")
    assert ok
