"""Monotone SAT into the arity-extension closure E(S) of a base CSP.

Each Boolean variable x_k owns a block of q' = (w-1)q + 1 coordinates.
By pigeonhole some letter fills q positions of any block word, so the
lifts of the letter-excluding relations have empty common intersection
over [w]^q'. A minimal such sub-family R^0..R^h splits block words into
A^0 (inside R^0 and R^2..R^h) and A^1 (inside R^1 and R^2..R^h), which
play the roles of false and true.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..closures import ExtendedRelation
from ..core import CspParams, InputError, Instance, PreconditionError, Relation, distinct_tuples, project
from .base import Cnf, ReductionOutput


@dataclass(frozen=True)
class BlockFamily:
    """The minimal empty-intersection family and the two value classes."""

    q_block: int
    members: tuple  # (Relation, index tuple within the block), R^0 first
    a0: frozenset
    a1: frozenset

    @property
    def h(self) -> int:
        return len(self.members) - 1


def _lift_points(rel: Relation, t, points) -> frozenset:
    return frozenset(x for x in points if project(x, t) in rel.tuples)


def _meet(sets, universe) -> frozenset:
    out = frozenset(universe)
    for s in sets:
        out &= s
    return out


def check_excluding_letters(relations, w: int) -> None:
    """Every letter needs a nonempty relation missing its constant tuple."""
    for alpha in range(w):
        if not any(r.tuples and (alpha,) * r.arity not in r.tuples for r in relations):
            raise PreconditionError(f"no nonempty relation excludes the constant tuple of letter {alpha}")


def block_family(relations, w: int) -> BlockFamily:
    relations = list(relations)
    if not relations:
        raise PreconditionError("base type has no relations")
    q = relations[0].arity
    if any(r.arity != q for r in relations):
        raise InputError("base relations must share one arity")
    check_excluding_letters(relations, w)
    qb = (w - 1) * q + 1
    points = list(itertools.product(range(w), repeat=qb))
    cands = [(r, t) for r in sorted(relations, key=lambda r: (r.name, r.sorted_tuples()))
             if r.tuples for t in distinct_tuples(qb, q)]
    sets = {c: _lift_points(c[0], c[1], points) for c in cands}
    if _meet(sets.values(), points):
        raise PreconditionError("lifted relations have a common point; the pigeonhole argument fails")
    # greedy shrink: drop members while the intersection stays empty
    keep = list(cands)
    for c in cands:
        trial = [d for d in keep if d != c]
        if not _meet((sets[d] for d in trial), points):
            keep = trial
    assert all(_meet((sets[d] for d in keep if d != c), points) for c in keep), "family is not minimal"
    assert len(keep) >= 2
    a0 = _meet((sets[d] for i, d in enumerate(keep) if i != 1), points)
    a1 = _meet((sets[d] for i, d in enumerate(keep) if i != 0), points)
    assert a0 and a1 and not (a0 & a1)
    return BlockFamily(qb, tuple(keep), a0, a1)


def is_minimal_empty_family(fam: BlockFamily, w: int) -> bool:
    """Empty intersection, and every proper sub-family meets (checked exhaustively)."""
    points = list(itertools.product(range(w), repeat=fam.q_block))
    sets = [_lift_points(r, t, points) for r, t in fam.members]
    if _meet(sets, points):
        return False
    for size in range(len(sets)):
        for sub in itertools.combinations(sets, size):
            if not _meet(sub, points):
                return False
    return True


def monsat_encode(relations, w: int, phi: Cnf) -> ReductionOutput:
    """Encode a monotone CNF as an E(S) instance over blocks of length q'."""
    for c in phi.clauses:
        if not c:
            raise InputError("empty clause")
        if not (all(l > 0 for l in c) or all(l < 0 for l in c)):
            raise InputError(f"clause {c} mixes signs; the formula is not monotone")
    fam = block_family(relations, w)
    qb = fam.q_block
    ell = max(phi.n, 1) * qb

    def shift(t, k):
        return tuple((k - 1) * qb + i for i in t)

    rels: dict = {}
    cons = []

    def add(ext):
        k = rels.setdefault(ext, len(rels) + 1)
        cons.append((k, ()))

    r0, r1 = fam.members[0], fam.members[1]
    for j, c in enumerate(phi.clauses, 1):
        r, t = r1 if c[0] > 0 else r0
        add(ExtendedRelation(f"C{j}", ell, frozenset((r, shift(t, abs(l))) for l in c)))
    for k in range(1, phi.n + 1):
        for i, (r, t) in enumerate(fam.members[2:], 2):
            add(ExtendedRelation(f"B{k}.{i}", ell, frozenset({(r, shift(t, k))})))
    target = Instance(CspParams(w, ell, 1), tuple(rels), tuple(cons))

    a0_min, a1_min = min(fam.a0), min(fam.a1)

    def forward(bits):
        out = []
        for b in bits:
            out.extend(a1_min if b else a0_min)
        out.extend([0] * (ell - len(out)))
        return tuple(out)

    def backward(a):
        return tuple(1 if tuple(a[k * qb:(k + 1) * qb]) in fam.a1 else 0 for k in range(phi.n))

    return ReductionOutput(
        "monsat", phi, target,
        forward=forward,
        backward=backward,
        source_solve=phi.brute_force,
        source_verify=lambda bits: len(bits) == phi.n and phi.satisfied_by(bits),
        metadata={
            "hardness": "monotone SAT (Schaefer)",
            "q_block": qb,
            "h": fam.h,
            "family": [f"{r.name}{t}" for r, t in fam.members],
            "block_family": fam,
        },
    )


def lineq_unary_type(p: int) -> list[Relation]:
    """The unary equations x = 0 and x = 1 over Z_p, a base type meeting
    the letter-exclusion precondition."""
    if p < 2:
        raise InputError("need at least two letters")
    return [Relation.of("x=0", [(0,)]), Relation.of("x=1", [(1,)])]
