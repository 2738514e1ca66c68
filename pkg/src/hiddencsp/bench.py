"""Seeded trial-count benchmarks: hidden engines against direct brute force."""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import asdict, dataclass

from .core import NO, Instance, Relation, brute_force_solve, make_instance, satisfies
from .oracles import RevealLevel, make_fixed_oracle
from .solvers.twosat import TWO_SAT_RELATIONS, twosat_backend
from .transfer import brute_force_backend, solve_hidden, trial_bound

FAMILIES = ("rand-small", "1sat", "2sat", "ug")
POLICY_NAMES = ("first", "random", "greedy")


@dataclass
class BenchRow:
    case: int
    level: str
    policy: str
    m: int
    trials: int
    bound: int
    answer: str
    agrees: bool
    within: bool


def case_rng(seed: int, family: str, case: int) -> random.Random:
    return random.Random(f"{seed}:{family}:{case}")


def random_small_instance(rng: random.Random, w_max=3, ell_max=5, q_max=2, m_max=5, s_max=3) -> Instance:
    """w <= 3, ell <= 5, q <= 2, m <= 5, at most 3 relations, W the full cube."""
    w = rng.randint(1, w_max)
    ell = rng.randint(1, ell_max)
    q = rng.randint(1, min(q_max, ell))
    s = rng.randint(1, s_max)
    pts = list(itertools.product(range(w), repeat=q))
    rels = [Relation.of(f"R{i + 1}", [p for p in pts if rng.random() < 0.5], arity=q) for i in range(s)]
    m = rng.randint(0, m_max)
    cons = [(rng.randint(1, s), tuple(rng.sample(range(1, ell + 1), q))) for _ in range(m)]
    return make_instance(w, ell, q, rels, cons)


ONE_SAT = (Relation.of("x", [(1,)]), Relation.of("~x", [(0,)]))


def random_1sat_instance(rng: random.Random, ell_max=8, m_max=8) -> Instance:
    ell = rng.randint(1, ell_max)
    m = rng.randint(0, m_max)
    cons = [(rng.randint(1, 2), (rng.randint(1, ell),)) for _ in range(m)]
    return make_instance(2, ell, 1, ONE_SAT, cons)


def random_2sat_instance(rng: random.Random, n=12, m_max=30) -> Instance:
    m = rng.randint(0, m_max)
    cons = [(rng.randint(1, len(TWO_SAT_RELATIONS)), tuple(rng.sample(range(1, n + 1), 2)))
            for _ in range(m)]
    return make_instance(2, n, 2, TWO_SAT_RELATIONS, cons)


def ug_relations(k: int) -> tuple:
    """UG[k]: the graphs of all permutations of [k]."""
    return tuple(Relation.of("pi" + "".join(map(str, p)), [(i, p[i]) for i in range(k)], arity=2)
                 for p in itertools.permutations(range(k)))


def random_ug_instance(rng: random.Random, k=3, ell_max=5, m_max=5) -> Instance:
    ell = rng.randint(2, ell_max)
    rels = ug_relations(k)
    m = rng.randint(0, m_max)
    cons = [(rng.randint(1, len(rels)), tuple(rng.sample(range(1, ell + 1), 2))) for _ in range(m)]
    return make_instance(k, ell, 2, rels, cons)


_GENERATORS = {
    "rand-small": random_small_instance,
    "1sat": random_1sat_instance,
    "2sat": random_2sat_instance,
    "ug": random_ug_instance,
}


def _levels(family: str):
    return (RevealLevel.V,) if family == "2sat" else tuple(RevealLevel)


def run_case(family: str, case: int, seed: int) -> list[BenchRow]:
    rng = case_rng(seed, family, case)
    inst = _GENERATORS[family](rng)
    truth = brute_force_solve(inst)
    backend = twosat_backend if family == "2sat" else brute_force_backend
    rows = []
    for level in _levels(family):
        bound = trial_bound(level, inst.relations, inst.admissible, inst.m)
        for pol in POLICY_NAMES:
            policy = f"random:{rng.randrange(1 << 30)}" if pol == "random" else pol
            oracle = make_fixed_oracle(inst, level, policy)
            ans = solve_hidden(oracle, backend)
            agrees = (ans is NO) == (truth is NO) and (ans is NO or satisfies(inst, ans))
            rows.append(BenchRow(case, level.value, pol, inst.m, oracle.trials, bound,
                                 "NO" if ans is NO else "".join(map(str, ans)),
                                 agrees, oracle.trials <= bound))
    return rows


def run_bench(family: str, cases: int, seed: int) -> list[BenchRow]:
    if family not in _GENERATORS:
        raise ValueError(f"unknown bench family {family!r}")
    rows = []
    for case in range(cases):
        rows.extend(run_case(family, case, seed))
    return rows


HEADER = ("case", "level", "policy", "m", "trials", "bound", "answer", "agrees", "within")


def format_table(rows: list[BenchRow]) -> str:
    body = [tuple(str(v).lower() if isinstance(v, bool) else str(v) for v in asdict(r).values())
            for r in rows]
    widths = [max([len(h)] + [len(b[i]) for b in body]) for i, h in enumerate(HEADER)]
    lines = ["  ".join(h.ljust(wd) for h, wd in zip(HEADER, widths)).rstrip()]
    lines += ["  ".join(c.ljust(wd) for c, wd in zip(b, widths)).rstrip() for b in body]
    return "\n".join(lines) + "\n"


def summary(rows: list[BenchRow]) -> dict:
    return {
        "rows": len(rows),
        "cases": len({r.case for r in rows}),
        "disagreements": sum(not r.agrees for r in rows),
        "bound_violations": sum(not r.within for r in rows),
        "max_trials": max((r.trials for r in rows), default=0),
    }


def dump_json(rows: list[BenchRow]) -> str:
    return json.dumps({"summary": summary(rows), "rows": [asdict(r) for r in rows]},
                      indent=1, sort_keys=True) + "\n"
