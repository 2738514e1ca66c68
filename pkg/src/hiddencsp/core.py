"""Constraint satisfaction model: relations, admissible assignment sets,
instances, evaluation and the brute-force reference solver.

Indices of variables, constraints and relations are 1-based throughout;
alphabet letters are ``0 .. w-1``.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

Word = tuple  # tuple[int, ...]

DEFAULT_BUDGET = 10**7
_BITSET_LIMIT = 1 << 18
_CHUNK = 1 << 16


class CspError(Exception):
    """Base class for all errors raised by this package."""


class InputError(CspError, ValueError):
    pass


class PreconditionError(InputError):
    pass


class ResourceError(CspError):
    """A configured enumeration budget would be exceeded."""


class ProtocolError(CspError):
    """An oracle or hidden algorithm broke the interaction protocol."""


class BackendContractError(CspError):
    pass


class Verdict(enum.Enum):
    NO = "NO"
    EXCEPTION = "EXCEPTION"

    def __repr__(self) -> str:
        return self.value


NO = Verdict.NO
EXCEPTION = Verdict.EXCEPTION


def is_assignment(result) -> bool:
    return isinstance(result, tuple)


def distinct_tuples(ell: int, q: int) -> list[tuple[int, ...]]:
    """All q-tuples of pairwise distinct indices from 1..ell, in lex order."""
    return list(itertools.permutations(range(1, ell + 1), q))


def project(a: Sequence[int], vars: Sequence[int]) -> tuple[int, ...]:
    return tuple(a[v - 1] for v in vars)


# ---------------------------------------------------------------------------
# relations


@dataclass(frozen=True)
class Relation:
    """An explicit q-ary relation (a finite set of q-tuples)."""

    name: str
    arity: int
    tuples: frozenset

    def __post_init__(self):
        for t in self.tuples:
            if len(t) != self.arity:
                raise InputError(f"relation {self.name!r}: tuple {t} has wrong arity")
            if any(x < 0 for x in t):
                raise InputError(f"relation {self.name!r}: negative letter in {t}")

    @classmethod
    def of(cls, name: str, tuples: Iterable[Sequence[int]], arity: int | None = None) -> "Relation":
        tuples = frozenset(tuple(int(x) for x in t) for t in tuples)
        if arity is None:
            if not tuples:
                raise InputError("arity required for an empty relation")
            arity = len(next(iter(tuples)))
        return cls(name, arity, tuples)

    def __contains__(self, point) -> bool:
        return tuple(point) in self.tuples

    def __len__(self) -> int:
        return len(self.tuples)

    def sorted_tuples(self) -> list[tuple[int, ...]]:
        return sorted(self.tuples)

    def satisfied_by(self, a: Sequence[int], vars: Sequence[int]) -> bool:
        return project(a, vars) in self.tuples

    def __repr__(self) -> str:
        return f"Relation({self.name!r}, {sorted(self.tuples)})"


def eval_relation(rel: Relation, point: Sequence[int]) -> bool:
    if len(point) != rel.arity:
        raise InputError(f"point {tuple(point)} does not have arity {rel.arity}")
    return tuple(point) in rel.tuples


@lru_cache(maxsize=4096)
def _lookup_table(rel: Relation, w: int) -> np.ndarray:
    # packed index sum(a_i * w**i)
    table = np.zeros(w ** rel.arity, dtype=bool)
    for t in rel.tuples:
        if all(x < w for x in t):
            table[sum(x * w**i for i, x in enumerate(t))] = True
    return table


def relation_mask(rel: Relation, words: np.ndarray, vars: Sequence[int], w: int) -> np.ndarray:
    """Vectorised evaluation of ``rel`` at ``vars`` over a block of words."""
    if rel.arity == 0:
        return np.full(len(words), bool(rel.tuples))
    codes = np.zeros(len(words), dtype=np.int64)
    for i, v in enumerate(vars):
        codes += words[:, v - 1].astype(np.int64) * (w**i)
    return _lookup_table(rel, w)[codes]


# ---------------------------------------------------------------------------
# admissible assignment sets

_FAMILIES: dict[str, Callable[..., list[tuple[int, ...]]]] = {}


def register_family(name: str):
    """Register an enumerator ``f(**params) -> list of words`` for a named family."""

    def deco(fn):
        _FAMILIES[name] = fn
        return fn

    return deco


class AdmissibleSet:
    """The set W of admissible assignments.

    Kinds: ``all`` (every word), ``permutations`` (words with pairwise
    distinct letters), ``weight`` (0-1 words of Hamming weight ``k``),
    ``list`` (explicit words), ``family`` (a registered named enumerator,
    e.g. spanning trees as edge-indicator vectors) and ``predicate``
    (an in-memory membership test plus enumerator; not serialisable).
    """

    KINDS = ("all", "permutations", "weight", "list", "family", "predicate")

    def __init__(
        self,
        w: int,
        ell: int,
        kind: str = "all",
        *,
        words: Iterable[Sequence[int]] | None = None,
        k: int | None = None,
        family: str | None = None,
        params: dict | None = None,
        predicate: Callable[[tuple], bool] | None = None,
        enumerator: Callable[[], Iterable[Sequence[int]]] | None = None,
    ):
        if w < 1 or ell < 1:
            raise InputError("alphabet size and assignment length must be positive")
        if kind not in self.KINDS:
            raise InputError(f"unknown admissible-set kind {kind!r}")
        self.w, self.ell, self.kind = w, ell, kind
        self.k = k
        self.family = family
        self.params = dict(params or {})
        self._predicate = predicate
        self._enumerator = enumerator
        self._words: tuple | None = None
        self._wordset: frozenset | None = None
        self._proj: dict[int, frozenset] = {}
        if kind == "permutations" and ell > w:
            raise InputError("permutation words need ell <= w")
        if kind == "weight":
            if w != 2 or k is None or not 0 <= k <= ell:
                raise InputError("weight kind needs w=2 and 0 <= k <= ell")
        if kind == "list":
            ws = sorted({tuple(int(x) for x in a) for a in (words or ())})
            for a in ws:
                self._check_word_shape(a)
            self._words = tuple(ws)
        if kind == "family":
            if family not in _FAMILIES:
                raise InputError(f"unknown assignment family {family!r}")
            ws = sorted({tuple(a) for a in _FAMILIES[family](**self.params)})
            for a in ws:
                self._check_word_shape(a)
            self._words = tuple(ws)
        if kind == "predicate" and (predicate is None or enumerator is None):
            raise InputError("predicate kind needs both predicate and enumerator")

    # identity -----------------------------------------------------------
    def key(self):
        if self.kind == "list":
            return (self.w, self.ell, "list", self._words)
        if self.kind == "family":
            return (self.w, self.ell, "family", self.family, tuple(sorted(self.params.items())))
        if self.kind == "predicate":
            return (self.w, self.ell, "predicate", id(self))
        return (self.w, self.ell, self.kind, self.k)

    def __eq__(self, other):
        return isinstance(other, AdmissibleSet) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        extra = ""
        if self.kind == "weight":
            extra = f", k={self.k}"
        elif self.kind == "family":
            extra = f", family={self.family!r}, params={self.params}"
        return f"AdmissibleSet(w={self.w}, ell={self.ell}, kind={self.kind!r}{extra})"

    @property
    def symmetric(self) -> bool:
        """True for kinds closed under coordinate permutation by construction."""
        if self.kind in ("all", "permutations", "weight"):
            return True
        if self.kind == "list":
            ws = set(self._words)
            return all(
                tuple(a[i] for i in p) in ws
                for a in ws
                for p in itertools.permutations(range(self.ell))
            ) if self.ell <= 6 else False
        return False

    def _check_word_shape(self, a):
        if len(a) != self.ell or any(not 0 <= x < self.w for x in a):
            raise InputError(f"word {a} is not in [{self.w}]^{self.ell}")

    # membership / enumeration --------------------------------------------
    def __contains__(self, a) -> bool:
        a = tuple(a)
        if len(a) != self.ell or any(not (isinstance(x, (int, np.integer)) and 0 <= x < self.w) for x in a):
            return False
        if self.kind == "all":
            return True
        if self.kind == "permutations":
            return len(set(a)) == len(a)
        if self.kind == "weight":
            return sum(a) == self.k
        if self.kind == "predicate":
            return bool(self._predicate(a))
        if self._wordset is None:
            self._wordset = frozenset(self._words)
        return a in self._wordset

    def size(self) -> int:
        if self.kind == "all":
            return self.w**self.ell
        if self.kind == "permutations":
            return math.perm(self.w, self.ell)
        if self.kind == "weight":
            return math.comb(self.ell, self.k)
        return len(self.words())

    def words(self) -> tuple:
        """All words in lexicographic order (materialised; callers mind the budget)."""
        if self._words is None:
            if self.kind == "predicate":
                self._words = tuple(sorted({tuple(a) for a in self._enumerator() if self._predicate(tuple(a))}))
            else:
                self._words = tuple(self._iter_lex())
        return self._words

    def _iter_lex(self) -> Iterator[tuple]:
        if self.kind == "all":
            yield from itertools.product(range(self.w), repeat=self.ell)
        elif self.kind == "permutations":
            yield from itertools.permutations(range(self.w), self.ell)
        elif self.kind == "weight":
            for a in itertools.product((0, 1), repeat=self.ell):
                if sum(a) == self.k:
                    yield a
        else:
            yield from self.words()

    def __iter__(self) -> Iterator[tuple]:
        if self._words is not None:
            return iter(self._words)
        return self._iter_lex()

    def first(self) -> tuple:
        if self.kind == "all":
            return (0,) * self.ell
        if self.kind == "permutations":
            return tuple(range(self.ell))
        if self.kind == "weight":
            return (0,) * (self.ell - self.k) + (1,) * self.k
        ws = self.words()
        if not ws:
            raise InputError("admissible set is empty")
        return ws[0]

    def chunks(self, size: int = _CHUNK) -> Iterator[np.ndarray]:
        """Lexicographically ordered blocks of words as integer arrays."""
        if self.kind == "all":
            total = self.w**self.ell
            powers = self.w ** np.arange(self.ell - 1, -1, -1, dtype=np.int64)
            for start in range(0, total, size):
                idx = np.arange(start, min(total, start + size), dtype=np.int64)
                yield ((idx[:, None] // powers[None, :]) % self.w).astype(np.int16)
            return
        it = iter(self)
        while True:
            block = list(itertools.islice(it, size))
            if not block:
                return
            yield np.asarray(block, dtype=np.int16).reshape(len(block), self.ell)

    def projection(self, q: int) -> frozenset:
        if q in self._proj:
            return self._proj[q]
        if not 0 <= q <= self.ell:
            raise InputError("projection arity out of range")
        if self.kind == "all":
            proj = frozenset(itertools.product(range(self.w), repeat=q))
        elif self.kind == "permutations":
            proj = frozenset(itertools.permutations(range(self.w), q))
        elif self.kind == "weight":
            proj = frozenset(
                u for u in itertools.product((0, 1), repeat=q)
                if sum(u) <= self.k and q - sum(u) <= self.ell - self.k
            )
        else:
            # union over every coordinate tuple so non-symmetric families are covered
            proj = frozenset(
                project(a, t) for a in self.words() for t in distinct_tuples(self.ell, q)
            )
        self._proj[q] = proj
        return proj

    # serialisation ---------------------------------------------------------
    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.kind == "weight":
            d["k"] = self.k
        elif self.kind == "list":
            d["words"] = [list(a) for a in self._words]
        elif self.kind == "family":
            d["family"] = self.family
            d["params"] = dict(sorted(self.params.items()))
        elif self.kind == "predicate":
            raise InputError("predicate admissible sets cannot be serialised")
        return d

    @classmethod
    def from_dict(cls, w: int, ell: int, d: dict) -> "AdmissibleSet":
        kind = d.get("kind", "all")
        if kind == "predicate":
            raise InputError("predicate admissible sets cannot be deserialised")
        return cls(
            w, ell, kind,
            words=d.get("words"),
            k=d.get("k"),
            family=d.get("family"),
            params=d.get("params"),
        )


def project_admissible(W: AdmissibleSet, q: int, budget: int = DEFAULT_BUDGET) -> frozenset:
    """W_q, the projection of W onto q coordinates."""
    if W.kind == "predicate" and len(W.words()) > budget:
        raise ResourceError("admissible set too large to project")
    return W.projection(q)


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class CspParams:
    w: int
    ell: int
    q: int
    n: int = 0  # size parameter, bookkeeping only

    def __post_init__(self):
        if self.w < 1 or self.ell < 1 or self.q < 1:
            raise InputError("w, ell and q must be positive")
        if self.q > self.ell:
            raise InputError("arity q must not exceed assignment length ell")


@dataclass(frozen=True)
class Constraint:
    rel: int
    vars: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(int(v) for v in self.vars))
        if len(set(self.vars)) != len(self.vars):
            raise InputError(f"constraint variables {self.vars} are not pairwise distinct")


@dataclass(frozen=True, eq=False)
class Instance:
    """A CSP instance: parameters, a relation list, constraints and W.

    Relations are either explicit ``Relation`` objects applied at a
    variable tuple, or ``ExtendedRelation`` objects (arity ``ell``) whose
    constraints carry an empty variable tuple.
    """

    params: CspParams
    relations: tuple
    constraints: tuple
    admissible: AdmissibleSet | None = None
    promise: str | None = None
    _check: bool = field(default=True, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(self.relations))
        object.__setattr__(self, "constraints", tuple(
            c if isinstance(c, Constraint) else Constraint(*c) for c in self.constraints))
        p = self.params
        if self.admissible is None:
            object.__setattr__(self, "admissible", AdmissibleSet(p.w, p.ell))
        W = self.admissible
        if (W.w, W.ell) != (p.w, p.ell):
            raise InputError("admissible set does not match (w, ell)")
        if self._check:
            self.validate()

    @property
    def w(self) -> int:
        return self.params.w

    @property
    def ell(self) -> int:
        return self.params.ell

    @property
    def q(self) -> int:
        return self.params.q

    @property
    def m(self) -> int:
        return len(self.constraints)

    @property
    def s(self) -> int:
        return len(self.relations)

    def validate(self) -> None:
        p = self.params
        Wq = None
        for rel in self.relations:
            if isinstance(rel, Relation):
                if rel.arity != p.q:
                    raise InputError(f"relation {rel.name!r} has arity {rel.arity}, expected {p.q}")
                for t in rel.tuples:
                    if any(x >= p.w for x in t):
                        raise InputError(f"relation {rel.name!r}: letter outside alphabet in {t}")
                if self.admissible.kind != "all" and rel.tuples:
                    if Wq is None:
                        Wq = self.admissible.projection(p.q)
                    if not rel.tuples <= Wq:
                        raise InputError(f"relation {rel.name!r} is not contained in W_q")
            else:
                if rel.ell != p.ell:
                    raise InputError(f"extended relation {rel.name!r} has arity {rel.ell}, expected {p.ell}")
                for base, t in rel.terms:
                    if any(not 1 <= v <= p.ell for v in t):
                        raise InputError(f"extended relation {rel.name!r}: index out of range in {t}")
        for j, c in enumerate(self.constraints, 1):
            if not 1 <= c.rel <= len(self.relations):
                raise InputError(f"constraint {j}: relation index {c.rel} out of range")
            rel = self.relations[c.rel - 1]
            if isinstance(rel, Relation):
                if len(c.vars) != rel.arity:
                    raise InputError(f"constraint {j}: expected {rel.arity} variables")
                if any(not 1 <= v <= p.ell for v in c.vars):
                    raise InputError(f"constraint {j}: variable index out of range")
            elif c.vars:
                raise InputError(f"constraint {j}: extended relations take no variable tuple")
        if self.promise == "RF":
            seen = {(c.rel, c.vars) for c in self.constraints}
            if len(seen) != len(self.constraints):
                raise InputError("instance tagged RF has repeated constraints")

    def relation_of(self, j: int):
        return self.relations[self.constraints[j - 1].rel - 1]

    def constraint_holds(self, j: int, a: Sequence[int]) -> bool:
        c = self.constraints[j - 1]
        return self.relations[c.rel - 1].satisfied_by(a, c.vars)

    def with_constraints(self, constraints, relations=None, promise=None) -> "Instance":
        return Instance(self.params, self.relations if relations is None else relations,
                        constraints, self.admissible, promise)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (self.params == other.params and self.relations == other.relations
                and self.constraints == other.constraints
                and self.admissible == other.admissible and self.promise == other.promise)

    def __hash__(self):
        return hash((self.params, self.relations, self.constraints, self.admissible, self.promise))


def make_instance(w: int, ell: int, q: int, relations, constraints, admissible=None,
                  promise=None) -> Instance:
    return Instance(CspParams(w, ell, q), tuple(relations), tuple(constraints), admissible, promise)


def violations(inst: Instance, a: Sequence[int]) -> list[int]:
    """Ascending indices of the constraints violated by ``a``."""
    a = tuple(a)
    if a not in inst.admissible:
        raise InputError(f"assignment {a} is not admissible")
    return [j for j in range(1, inst.m + 1) if not inst.constraint_holds(j, a)]


def satisfies(inst: Instance, a: Sequence[int]) -> bool:
    return not violations(inst, a)


# ---------------------------------------------------------------------------
# brute force


class _WordTable:
    """Bitset view of a small W: bit i set iff word i passes a constraint."""

    def __init__(self, W: AdmissibleSet):
        self.W = W
        self.words = np.asarray(W.words(), dtype=np.int16).reshape(-1, W.ell)
        self.n = len(self.words)
        self.full = (1 << self.n) - 1
        self.cache: dict = {}

    def _pack(self, arr: np.ndarray) -> int:
        return int.from_bytes(np.packbits(arr, bitorder="little").tobytes(), "little")

    def base_mask(self, rel: Relation, vars) -> int:
        key = (rel, vars)
        m = self.cache.get(key)
        if m is None:
            if len(self.cache) > 200_000:
                self.cache.clear()
            m = self._pack(relation_mask(rel, self.words, vars, self.W.w))
            self.cache[key] = m
        return m

    def mask(self, rel, vars) -> int:
        if isinstance(rel, Relation):
            return self.base_mask(rel, vars)
        m = self.cache.get((rel, ()))
        if m is None:
            m = 0
            for base, t in rel.terms:
                m |= self.base_mask(base, t)
            self.cache[(rel, ())] = m
        return m


@lru_cache(maxsize=64)
def _word_table(W: AdmissibleSet) -> _WordTable:
    return _WordTable(W)


def constraint_mask(rel, words: np.ndarray, vars, w: int) -> np.ndarray:
    if isinstance(rel, Relation):
        return relation_mask(rel, words, vars, w)
    out = np.zeros(len(words), dtype=bool)
    for base, t in rel.terms:
        out |= relation_mask(base, words, t, w)
    return out


def _solution_bits(inst: Instance, W: AdmissibleSet) -> tuple[_WordTable, int]:
    table = _word_table(W)
    bits = table.full
    for c in inst.constraints:
        bits &= table.mask(inst.relations[c.rel - 1], c.vars)
        if not bits:
            break
    return table, bits


def brute_force_solve(inst: Instance, W: AdmissibleSet | None = None,
                      budget: int = DEFAULT_BUDGET):
    """First satisfying assignment of ``inst`` in lexicographic order, else NO."""
    W = inst.admissible if W is None else W
    if W.kind in ("all", "permutations", "weight") and W.size() > budget:
        raise ResourceError(f"|W| = {W.size()} exceeds the brute-force budget {budget}")
    if W.kind not in ("all", "permutations", "weight") and len(W.words()) > budget:
        raise ResourceError("admissible set exceeds the brute-force budget")
    if W.size() <= _BITSET_LIMIT:
        table, bits = _solution_bits(inst, W)
        if not bits:
            return NO
        low = (bits & -bits).bit_length() - 1
        return tuple(int(x) for x in table.words[low])
    for block in W.chunks():
        ok = np.ones(len(block), dtype=bool)
        for c in inst.constraints:
            ok &= constraint_mask(inst.relations[c.rel - 1], block, c.vars, W.w)
            if not ok.any():
                break
        hits = np.flatnonzero(ok)
        if len(hits):
            return tuple(int(x) for x in block[hits[0]])
    return NO


def iter_solutions(inst: Instance, limit: int | None = None,
                   budget: int = DEFAULT_BUDGET) -> Iterator[tuple]:
    """Satisfying assignments in lexicographic order (at most ``limit``)."""
    W = inst.admissible
    if W.size() > budget:
        raise ResourceError("admissible set exceeds the brute-force budget")
    count = 0
    for block in W.chunks():
        ok = np.ones(len(block), dtype=bool)
        for c in inst.constraints:
            ok &= constraint_mask(inst.relations[c.rel - 1], block, c.vars, W.w)
        for i in np.flatnonzero(ok):
            yield tuple(int(x) for x in block[i])
            count += 1
            if limit is not None and count >= limit:
                return


def count_solutions(inst: Instance, budget: int = DEFAULT_BUDGET) -> int:
    W = inst.admissible
    if W.size() <= _BITSET_LIMIT:
        return bin(_solution_bits(inst, W)[1]).count("1")
    return sum(1 for _ in iter_solutions(inst, budget=budget))


def brute_force_backend(inst: Instance):
    """The reference solver backend (sound and complete on any instance)."""
    return brute_force_solve(inst)
