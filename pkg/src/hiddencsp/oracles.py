"""Simulated revealing oracles for hidden instances.

An oracle is a stateful session. Algorithms see only the public data (the
type ``relations``, the admissible set ``W``, the parameters and ``m``) and
learn about the hidden constraints by submitting assignments.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Sequence

from .core import (
    AdmissibleSet,
    CspParams,
    Instance,
    InputError,
    ProtocolError,
    project,
    violations,
)


class RevealLevel(enum.Enum):
    RV = "rv"
    V = "v"
    R = "r"
    NONE = "none"

    @property
    def reveal_relation(self) -> bool:
        return self in (RevealLevel.RV, RevealLevel.R)

    @property
    def reveal_vars(self) -> bool:
        return self in (RevealLevel.RV, RevealLevel.V)

    @classmethod
    def parse(cls, text: str) -> "RevealLevel":
        try:
            return cls(text.lower())
        except ValueError:
            raise InputError(f"unknown reveal level {text!r} (expected rv, v, r or none)") from None


@dataclass(frozen=True)
class Violation:
    """Constraint ``j`` is violated; ``k`` / ``t`` are present per reveal level."""

    j: int
    k: int | None = None
    t: tuple | None = None

    def __str__(self) -> str:
        parts = [f"j={self.j}"]
        if self.k is not None:
            parts.append(f"k={self.k}")
        if self.t is not None:
            parts.append("t=(" + ",".join(map(str, self.t)) + ")")
        return "VIOLATION " + " ".join(parts)


class _Yes:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "YES"

    __str__ = __repr__


YES = _Yes()


@dataclass
class Transcript:
    entries: list = field(default_factory=list)

    @property
    def trials(self) -> int:
        return len(self.entries)

    def append(self, a: tuple, response) -> None:
        self.entries.append((a, response))

    def lines(self) -> list[str]:
        return [f"{i}\t{' '.join(map(str, a))}\t{r}" for i, (a, r) in enumerate(self.entries, 1)]


class Oracle:
    """Common public surface of every oracle."""

    def __init__(self, params: CspParams, relations: Sequence, W: AdmissibleSet, m: int,
                 level: RevealLevel):
        self.params = params
        self.relations = tuple(relations)
        self.W = W
        self.m = m
        self.level = level
        self.transcript = Transcript()

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
    def trials(self) -> int:
        return self.transcript.trials

    def submit(self, a: Sequence[int]):
        a = tuple(int(x) for x in a)
        if a not in self.W:
            raise ProtocolError(f"trial {a} is not an admissible assignment")
        response = self._respond(a)
        self.transcript.append(a, response)
        return response

    def _respond(self, a: tuple):  # pragma: no cover - abstract
        raise NotImplementedError

    def _violation(self, j: int, k: int, t: tuple) -> Violation:
        return Violation(
            j,
            k if self.level.reveal_relation else None,
            t if self.level.reveal_vars else None,
        )


POLICIES = ("first", "random", "max-uncertainty")


class FixedOracle(Oracle):
    """Answers for a fixed hidden instance.

    ``policy`` picks among several violated constraints: ``first`` (lowest
    index), ``random`` (seeded) or ``max-uncertainty`` (the violated
    constraint whose recorded exclusion set would grow least, then the one
    with the smallest exclusion set, then the lowest index).
    """

    def __init__(self, inst: Instance, level: RevealLevel = RevealLevel.V,
                 policy: str = "first", seed: int | None = None):
        if policy not in POLICIES:
            raise InputError(f"unknown oracle policy {policy!r}")
        super().__init__(inst.params, inst.relations, inst.admissible, inst.m, level)
        self._inst = inst
        self.policy = policy
        self._rng = random.Random(seed)
        self._seen: dict[int, set] = {}

    def _respond(self, a: tuple):
        bad = violations(self._inst, a)
        if not bad:
            return YES
        if self.policy == "first":
            j = bad[0]
        elif self.policy == "random":
            j = self._rng.choice(bad)
        else:
            def key(j):
                seen = self._seen.get(j, set())
                return (self._point(j, a) not in seen, len(seen), j)

            j = min(bad, key=key)
        self._seen.setdefault(j, set()).add(self._point(j, a))
        c = self._inst.constraints[j - 1]
        return self._violation(j, c.rel, c.vars)

    def _point(self, j: int, a: tuple) -> tuple:
        c = self._inst.constraints[j - 1]
        return project(a, c.vars) if c.vars else a


def make_fixed_oracle(inst: Instance, level: RevealLevel | str = RevealLevel.V,
                      policy: str = "first", seed: int | None = None) -> FixedOracle:
    if isinstance(level, str):
        level = RevealLevel.parse(level)
    if policy.startswith("random:"):
        try:
            policy, seed = "random", int(policy.split(":", 1)[1])
        except ValueError:
            raise InputError(f"bad random seed in policy {policy!r}") from None
    elif policy == "greedy":
        policy = "max-uncertainty"
    return FixedOracle(inst, level, policy, seed)


class LazyOracle(Oracle):
    """An oracle that keeps, per constraint, a set of candidate (k, t) pairs.

    Candidate ``(k, t)`` means "constraint j is ``relations[k-1]`` at
    variables ``t``" (``t`` is empty for extended relations). Strategies:

    * ``adversarial``: reply with a violation whenever some candidate of some
      constraint is violated, narrowing that constraint's candidates to the
      violated ones (delays information as long as possible);
    * ``union``: reply with constraint j only when every candidate of j is
      violated, so the replies are legitimate for every instance drawn from
      the candidate sets; YES means the trial satisfies the union instance.

    Violations are reported for the lowest eligible index. When the reveal
    level discloses k or t, the candidates are grouped by the disclosed data
    and the largest group (ties: smallest key) is kept.
    """

    def __init__(self, params: CspParams, relations: Sequence, W: AdmissibleSet,
                 possibility_sets: Sequence, level: RevealLevel = RevealLevel.NONE,
                 strategy: str = "adversarial"):
        if strategy not in ("adversarial", "union"):
            raise InputError(f"unknown lazy-oracle strategy {strategy!r}")
        sets = [frozenset((int(k), tuple(t)) for k, t in ps) for ps in possibility_sets]
        for j, ps in enumerate(sets, 1):
            if not ps:
                raise InputError(f"possibility set {j} is empty")
            for k, t in ps:
                if not 1 <= k <= len(relations):
                    raise InputError(f"possibility set {j}: relation index {k} out of range")
        super().__init__(params, relations, W, len(sets), level)
        self.strategy = strategy
        self.candidates = [set(ps) for ps in sets]

    def _holds(self, cand, a) -> bool:
        k, t = cand
        return self.relations[k - 1].satisfied_by(a, t)

    def _reveal_key(self, cand):
        k, t = cand
        return (k if self.level.reveal_relation else None, t if self.level.reveal_vars else None)

    def _respond(self, a: tuple):
        for j, cands in enumerate(self.candidates, 1):
            bad = {c for c in cands if not self._holds(c, a)}
            eligible = bad == cands if self.strategy == "union" else bool(bad)
            if not eligible:
                continue
            groups: dict = {}
            for c in bad:
                groups.setdefault(self._reveal_key(c), set()).add(c)
            key = min(groups, key=lambda g: (-len(groups[g]), repr(g)))
            chosen = groups[key]
            if not chosen:  # pragma: no cover - guarded above
                raise AssertionError("lazy oracle emptied a possibility set")
            self.candidates[j - 1] = chosen
            k, t = next(iter(sorted(chosen)))
            return self._violation(j, k, t)
        return YES

    def consistent_instance(self) -> list:
        """One candidate per constraint; consistent with every reply so far."""
        return [min(c) for c in self.candidates]


def make_lazy_oracle(params: CspParams, relations: Sequence, W: AdmissibleSet,
                     possibility_sets: Sequence, level: RevealLevel | str = RevealLevel.NONE,
                     strategy: str = "adversarial") -> LazyOracle:
    if isinstance(level, str):
        level = RevealLevel.parse(level)
    return LazyOracle(params, relations, W, possibility_sets, level, strategy)


def submit(oracle: Oracle, a: Sequence[int]):
    return oracle.submit(a)
