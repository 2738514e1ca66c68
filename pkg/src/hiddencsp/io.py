"""File formats: JSON instances, a line-based graph format and DIMACS CNF.

Instance files are JSON objects tagged ``"format": "hiddencsp-instance/1"``::

    {"format": "hiddencsp-instance/1",
     "params": {"w": 2, "ell": 3, "q": 1},
     "assignments": {"kind": "all"},
     "relations": [{"name": "x", "arity": 1, "tuples": [[1]]},
                   {"name": "U", "terms": [{"rel": {...}, "vars": [1]}]}],
     "constraints": [{"rel": 1, "vars": [2]}, {"rel": 2, "vars": []}],
     "promise": null}

Relations with ``terms`` are unions of lifted base relations (arity ell)
and their constraints carry no variables.
"""
from __future__ import annotations

import itertools
import json
from pathlib import Path

from .closures import ExtendedRelation
from .core import AdmissibleSet, CspParams, InputError, Instance, Relation
from .reductions.base import Cnf, Graph
from .solvers.twosat import prime_clauses

FORMAT = "hiddencsp-instance/1"


def _relation_to_dict(rel: Relation) -> dict:
    return {"name": rel.name, "arity": rel.arity, "tuples": [list(t) for t in rel.sorted_tuples()]}


def _relation_from_dict(d: dict) -> Relation:
    try:
        return Relation.of(str(d["name"]), [tuple(t) for t in d["tuples"]], arity=int(d["arity"]))
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"bad relation entry {d!r}: {e}") from None


def instance_to_dict(inst: Instance) -> dict:
    rels = []
    for r in inst.relations:
        if isinstance(r, ExtendedRelation):
            rels.append({"name": r.name, "terms": [{"rel": _relation_to_dict(b), "vars": list(t)}
                                                   for b, t in r.sorted_terms()]})
        else:
            rels.append(_relation_to_dict(r))
    return {
        "format": FORMAT,
        "params": {"w": inst.w, "ell": inst.ell, "q": inst.q},
        "assignments": inst.admissible.to_dict(),
        "relations": rels,
        "constraints": [{"rel": c.rel, "vars": list(c.vars)} for c in inst.constraints],
        "promise": inst.promise,
    }


def instance_from_dict(d: dict) -> Instance:
    if not isinstance(d, dict):
        raise InputError("instance must be a JSON object")
    if d.get("format", FORMAT) != FORMAT:
        raise InputError(f"unsupported format {d.get('format')!r}")
    try:
        p = d["params"]
        params = CspParams(int(p["w"]), int(p["ell"]), int(p["q"]))
        W = AdmissibleSet.from_dict(params.w, params.ell, d.get("assignments") or {"kind": "all"})
        rels = []
        for r in d.get("relations", []):
            if "terms" in r:
                terms = frozenset((_relation_from_dict(t["rel"]), tuple(int(v) for v in t["vars"]))
                                  for t in r["terms"])
                rels.append(ExtendedRelation(str(r["name"]), params.ell, terms))
            else:
                rels.append(_relation_from_dict(r))
        cons = [(int(c["rel"]), tuple(int(v) for v in c.get("vars", []))) for c in d.get("constraints", [])]
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        if isinstance(e, InputError):
            raise
        raise InputError(f"malformed instance: {e}") from None
    return Instance(params, tuple(rels), tuple(cons), W, d.get("promise"))


def dumps_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=1, sort_keys=True) + "\n"


def loads_instance(text: str) -> Instance:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"instance is not valid JSON: {e}") from None
    return instance_from_dict(d)


def read_instance(path) -> Instance:
    return loads_instance(Path(path).read_text())


def write_instance(inst: Instance, path) -> None:
    Path(path).write_text(dumps_instance(inst))


def parse_assignment(text: str) -> tuple:
    """A JSON list of letters or whitespace/comma separated integers."""
    text = text.strip()
    try:
        if text.startswith("["):
            vals = json.loads(text)
        else:
            vals = [int(x) for x in text.replace(",", " ").split()]
        return tuple(int(x) for x in vals)
    except (ValueError, TypeError, json.JSONDecodeError):
        raise InputError("assignment must be a list of integers") from None


# ---------------------------------------------------------------------------
# graphs
#
#   n 4            vertex count (required)
#   directed       arcs instead of edges
#   s 1 / t 4      path endpoints
#   k 3 / p 3 / z 2   small integer parameters
#   e 1 2          edge or arc
#   x 1 2 3 4      edges {1,2} and {3,4} cross
#   f 1 2          forced edge (E1 for EQ classes)
#   E 1 2 3        edge {2,3} belongs to edge set 1
#   # comment


def parse_graph(text: str) -> Graph:
    n = None
    directed = False
    s = t = None
    edges, crossings, forced = [], [], []
    sets: dict = {}
    params: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            head, nums = tok[0], [int(x) for x in tok[1:]]
        except ValueError:
            raise InputError(f"line {lineno}: expected integers in {raw!r}") from None
        arity = {"n": 1, "directed": 0, "s": 1, "t": 1, "k": 1, "p": 1, "z": 1,
                 "e": 2, "x": 4, "f": 2, "E": 3}.get(head)
        if arity is None or len(nums) != arity:
            raise InputError(f"line {lineno}: cannot parse {raw!r}")
        if head == "n":
            n = nums[0]
        elif head == "directed":
            directed = True
        elif head == "s":
            s = nums[0]
        elif head == "t":
            t = nums[0]
        elif head in ("k", "p", "z"):
            params[head] = nums[0]
        elif head == "e":
            edges.append(tuple(nums))
        elif head == "x":
            crossings.append((tuple(nums[:2]), tuple(nums[2:])))
        elif head == "f":
            forced.append(tuple(nums))
        else:
            sets.setdefault(nums[0], []).append(tuple(nums[1:]))
    if n is None:
        raise InputError("graph file needs an 'n' line")
    if sets and sorted(sets) != list(range(1, len(sets) + 1)):
        raise InputError("edge sets must be numbered 1..m")
    return Graph(n, edges, directed, s, t, crossings, forced,
                 [sets[j] for j in sorted(sets)], params)


def format_graph(g: Graph) -> str:
    lines = [f"n {g.n}"]
    if g.directed:
        lines.append("directed")
    if g.s is not None:
        lines.append(f"s {g.s}")
    if g.t is not None:
        lines.append(f"t {g.t}")
    lines += [f"{k} {v}" for k, v in sorted(g.params.items())]
    lines += [f"e {u} {v}" for u, v in g.edges]
    lines += [f"x {a[0]} {a[1]} {b[0]} {b[1]}" for a, b in g.crossings]
    lines += [f"f {u} {v}" for u, v in g.forced]
    lines += [f"E {j} {u} {v}" for j, es in enumerate(g.edge_sets, 1) for u, v in es]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# DIMACS


def parse_cnf(text: str) -> tuple[Cnf, dict]:
    """DIMACS CNF of any width. Comment lines ``c key value...`` are
    returned as directives (e.g. ``c base lineq 3``)."""
    n = None
    clauses, cur = [], []
    directives: dict = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) >= 2:
                directives[parts[1]] = parts[2:]
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InputError(f"bad problem line {line!r}")
            try:
                n = int(parts[2])
            except ValueError:
                raise InputError(f"bad problem line {line!r}") from None
            continue
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise InputError(f"bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(lit)
    if cur:
        clauses.append(tuple(cur))
    if n is None:
        raise InputError("missing 'p cnf' line")
    return Cnf(n, clauses), directives


def format_cnf(phi: Cnf, comments=()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {phi.n} {len(phi.clauses)}")
    lines += [" ".join(map(str, c + (0,))) for c in phi.clauses]
    return "\n".join(lines) + "\n"


def _single_clause(rel: Relation):
    """The clause (positions 1..q, signed) if ``rel`` excludes exactly one point."""
    missing = set(itertools.product((0, 1), repeat=rel.arity)) - rel.tuples
    if len(missing) != 1:
        return None
    (pt,) = missing
    return tuple(i if x == 0 else -i for i, x in enumerate(pt, 1))


def instance_to_cnf(inst: Instance) -> Cnf:
    """Boolean instances whose constraints are clauses, unions of clauses,
    or binary relations, flattened to CNF over the same variables."""
    if inst.w != 2 or inst.admissible.kind != "all":
        raise InputError("DIMACS output needs a Boolean instance over the full cube")
    clauses = []
    for c in inst.constraints:
        rel = inst.relations[c.rel - 1]
        if isinstance(rel, ExtendedRelation):
            lits = set()
            for base, t in rel.sorted_terms():
                cl = _single_clause(base)
                if cl is None:
                    raise InputError(f"term {base.name} is not a single clause")
                lits.update((1 if l > 0 else -1) * t[abs(l) - 1] for l in cl)
            if any(-l in lits for l in lits):
                continue  # tautology
            clauses.append(tuple(sorted(lits, key=lambda l: (abs(l), l))))
        elif rel.arity <= 2:
            clauses += [tuple((1 if l > 0 else -1) * c.vars[abs(l) - 1] for l in cl)
                        for cl in prime_clauses(rel.tuples, rel.arity)]
        else:
            cl = _single_clause(rel)
            if cl is None and rel.tuples != frozenset(itertools.product((0, 1), repeat=rel.arity)):
                raise InputError(f"relation {rel.name} is not a clause")
            if cl is not None:
                clauses.append(tuple((1 if l > 0 else -1) * c.vars[abs(l) - 1] for l in cl))
    return Cnf(inst.ell, clauses)
