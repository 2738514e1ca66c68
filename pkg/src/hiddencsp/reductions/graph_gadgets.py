"""Monotone graph-property gadgets for index-only reveal.

Every target lives in the same frame: a word of W is the edge-indicator
vector of a minimal graph with the property, the base constraints forbid
the slots that are not edges of the input graph, and each extra
constraint is an edge set E_i of which the witness must avoid at least one
edge (a union of lifts of Neg).
"""
from __future__ import annotations

import itertools

from ..closures import ExtendedRelation
from ..core import CspParams, InputError, Instance, Relation
from ..families import (
    LAYOUTS,
    _components,
    edges_to_word,
    is_directed_cycle_cover,
    is_undirected_cycle_cover,
    family_set,
    is_path,
    word_to_edges,
)
from .base import Graph, ReductionOutput

NEG = Relation.of("Neg", [(0,)])

PROPERTIES = ("st", "dst", "ucc", "dcc", "bpm", "dpath", "upath")

_PROVENANCE = {
    "st": "Hamiltonian path (classical NP-completeness)",
    "dst": "directed Hamiltonian path ending at vertex 1 on planar digraphs of "
           "in/out-degree at most 2 (classical NP-completeness)",
    "ucc": "undirected cycle cover avoiding 5-cycles (Hell et al.)",
    "dcc": "directed cycle cover without cycles of length 1 or 2 (classical)",
    "bpm": "via the directed cycle cover gadget and the arc / bipartite-edge correspondence",
    "dpath": "crossing-free s-t path in a drawn digraph (Kratochvil et al.)",
    "upath": "crossing-free s-t path in a drawn graph (Kratochvil et al.)",
}


def _frame(layout: str, n: int, family: str, fparams: dict, graph_edges, avoid_sets, name: str):
    """Build the union-of-lifts instance for the given family and edge sets."""
    W = family_set(family, **fparams)
    slots = {e: i for i, e in enumerate(_slots(layout, n), 1)}
    present = {slots[e] for e in graph_edges}
    rels: dict = {}
    cons = []

    def add(slot_set, label):
        ext = ExtendedRelation(label, W.ell, frozenset((NEG, (i,)) for i in sorted(slot_set)))
        k = rels.setdefault(ext, len(rels) + 1)
        cons.append((k, ()))

    for e, i in slots.items():
        if i not in present:
            add({i}, f"absent{e}")
    for idx, es in enumerate(avoid_sets, 1):
        add({slots[e] for e in es}, f"E{idx}")
    target = Instance(CspParams(2, W.ell, 1), tuple(rels), tuple(cons), W)
    return target, slots


def _slots(layout, n):
    return LAYOUTS[layout](n)


def _ham_path(g: Graph, end: int | None = None):
    for perm in itertools.permutations(range(1, g.n + 1)):
        if end is not None and perm[-1] != end:
            continue
        if all(g.has(a, b) for a, b in zip(perm, perm[1:])):
            return list(perm)
    return None


def _is_ham_path(g: Graph, seq, end: int | None = None) -> bool:
    seq = list(seq)
    if sorted(seq) != list(range(1, g.n + 1)):
        return False
    if end is not None and seq[-1] != end:
        return False
    return all(g.has(a, b) for a, b in zip(seq, seq[1:]))


def _path_order(n: int, edges, directed: bool, end: int | None = None):
    """Vertex order of a Hamiltonian path given by its edges."""
    if n == 1:
        return [1]
    if directed:
        nxt = dict(edges)
        start = next(v for v in range(1, n + 1) if v not in {b for _, b in edges})
        seq = [start]
        while seq[-1] in nxt:
            seq.append(nxt[seq[-1]])
        return seq
    adj: dict = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    start = min(v for v in range(1, n + 1) if len(adj.get(v, [])) <= 1)
    seq, prev = [start], None
    while True:
        nbrs = [x for x in adj.get(seq[-1], []) if x != prev]
        if not nbrs:
            return seq
        prev = seq[-1]
        seq.append(nbrs[0])


# ---------------------------------------------------------------------------


def _gadget_st(g: Graph) -> ReductionOutput:
    if g.directed:
        raise InputError("spanning-tree gadget needs an undirected graph")
    n = g.n
    if n < 2:
        raise InputError("spanning-tree gadget needs n >= 2")
    avoid = []
    for v in range(1, n + 1):
        others = [u for u in range(1, n + 1) if u != v]
        for i, j, k in itertools.combinations(others, 3):
            avoid.append([tuple(sorted((v, x))) for x in (i, j, k)])
    target, _ = _frame("undirected", n, "spanning-trees", {"n": n}, g.edges, avoid, "st")
    return ReductionOutput(
        "st", g, target,
        forward=lambda seq: edges_to_word("undirected", n, zip(seq, seq[1:])),
        backward=lambda a: _path_order(n, word_to_edges("undirected", n, a), False),
        source_solve=lambda: _ham_path(g),
        source_verify=lambda seq: _is_ham_path(g, seq),
        metadata={"hardness": _PROVENANCE["st"], "edge_sets": len(avoid)},
    )


def _gadget_dst(g: Graph) -> ReductionOutput:
    if not g.directed:
        raise InputError("directed spanning-tree gadget needs a digraph")
    n = g.n
    if n < 2:
        raise InputError("directed spanning-tree gadget needs n >= 2")
    if any(u == v for u, v in g.edges):
        raise InputError("digraph must be loop-free")
    indeg = {v: [e for e in g.edges if e[1] == v] for v in range(1, n + 1)}
    outdeg = {v: [e for e in g.edges if e[0] == v] for v in range(1, n + 1)}
    if any(len(x) > 2 for x in indeg.values()) or any(len(x) > 2 for x in outdeg.values()):
        raise InputError("digraph must have in- and out-degree at most 2")
    # a two-arc E_v caps the in-degree of v at one; vertices with fewer
    # incoming arcs are capped already, so no set is emitted for them
    avoid = [sorted(es) for v, es in sorted(indeg.items()) if len(es) == 2]
    target, _ = _frame("directed", n, "in-arborescences", {"n": n}, g.edges, avoid, "dst")
    return ReductionOutput(
        "dst", g, target,
        forward=lambda seq: edges_to_word("directed", n, zip(seq, seq[1:])),
        backward=lambda a: _path_order(n, word_to_edges("directed", n, a), True),
        source_solve=lambda: _ham_path(g, end=1),
        source_verify=lambda seq: _is_ham_path(g, seq, end=1),
        metadata={"hardness": _PROVENANCE["dst"], "edge_sets": len(avoid),
                  "note": "planarity of the input is not checked"},
    )


def _cycles_of_cover(succ: dict) -> list[list[int]]:
    seen, out = set(), []
    for v in sorted(succ):
        if v in seen:
            continue
        cyc = [v]
        seen.add(v)
        while succ[cyc[-1]] != v:
            cyc.append(succ[cyc[-1]])
            seen.add(cyc[-1])
        out.append(cyc)
    return out


def _ucc_edges_ok(g: Graph, edges) -> bool:
    edges = [tuple(sorted(e)) for e in edges]
    if not is_undirected_cycle_cover(g.n, edges) or not set(edges) <= g.edge_set():
        return False
    return all(len(c) != 5 for c in _components(g.n, edges))


def _ucc_solve(g: Graph):
    for perm in itertools.permutations(range(1, g.n + 1)):
        succ = dict(zip(range(1, g.n + 1), perm))
        cycles = _cycles_of_cover(succ)
        if any(len(c) < 3 or len(c) == 5 for c in cycles):
            continue
        edges = {tuple(sorted((v, succ[v]))) for v in succ}
        if edges <= g.edge_set():
            return sorted(edges)
    return None


def _five_cycles(g: Graph) -> list[list]:
    out = set()
    for combo in itertools.combinations(range(1, g.n + 1), 5):
        first = combo[0]
        for rest in itertools.permutations(combo[1:]):
            if rest[0] > rest[-1]:
                continue
            cyc = (first,) + rest
            edges = [tuple(sorted((cyc[i], cyc[(i + 1) % 5]))) for i in range(5)]
            if all(e in g.edge_set() for e in edges):
                out.add(tuple(sorted(edges)))
    return [list(c) for c in sorted(out)]


def _gadget_ucc(g: Graph) -> ReductionOutput:
    if g.directed:
        raise InputError("undirected cycle-cover gadget needs an undirected graph")
    n = g.n
    if n < 3:
        raise InputError("undirected cycle covers need n >= 3")
    avoid = _five_cycles(g)
    target, _ = _frame("undirected", n, "undirected-cycle-covers", {"n": n}, g.edges, avoid, "ucc")
    return ReductionOutput(
        "ucc", g, target,
        forward=lambda edges: edges_to_word("undirected", n, edges),
        backward=lambda a: word_to_edges("undirected", n, a),
        source_solve=lambda: _ucc_solve(g),
        source_verify=lambda edges: _ucc_edges_ok(g, edges),
        metadata={"hardness": _PROVENANCE["ucc"], "edge_sets": len(avoid)},
    )


def _short_cycles(g: Graph) -> list[list]:
    arcs = g.edge_set()
    out = [[(v, v)] for v in range(1, g.n + 1) if (v, v) in arcs]
    for u, v in itertools.combinations(range(1, g.n + 1), 2):
        if (u, v) in arcs and (v, u) in arcs:
            out.append([(u, v), (v, u)])
    return out


def _dcc_solve(g: Graph):
    for perm in itertools.permutations(range(1, g.n + 1)):
        succ = dict(zip(range(1, g.n + 1), perm))
        if any(len(c) <= 2 for c in _cycles_of_cover(succ)):
            continue
        arcs = sorted(succ.items())
        if all(g.has(u, v) for u, v in arcs):
            return arcs
    return None


def _dcc_ok(g: Graph, arcs) -> bool:
    arcs = [tuple(e) for e in arcs]
    if not is_directed_cycle_cover(g.n, arcs) or not all(g.has(u, v) for u, v in arcs):
        return False
    return all(len(c) > 2 for c in _cycles_of_cover(dict(arcs)))


def _gadget_dcc(g: Graph, family: str = "directed-cycle-covers", name: str = "dcc") -> ReductionOutput:
    if not g.directed:
        raise InputError("directed cycle-cover gadget needs a digraph (loops allowed)")
    n = g.n
    avoid = _short_cycles(g)
    target, _ = _frame("grid", n, family, {"n": n}, g.edges, avoid, name)
    return ReductionOutput(
        name, g, target,
        forward=lambda arcs: edges_to_word("grid", n, arcs),
        backward=lambda a: word_to_edges("grid", n, a),
        source_solve=lambda: _dcc_solve(g),
        source_verify=lambda arcs: _dcc_ok(g, arcs),
        metadata={"hardness": _PROVENANCE[name], "edge_sets": len(avoid)},
    )


def _gadget_bpm(g: Graph) -> ReductionOutput:
    """Arc (i, j) of the digraph is the bipartite edge {i_A, j_B}; a
    perfect matching of the bipartite graph is a cycle cover of the digraph."""
    out = _gadget_dcc(g, "perfect-matchings", "bpm")
    out.metadata["correspondence"] = "arc (i, j) <-> bipartite edge {i_A, j_B}, slot (i-1)*n + j"
    return out


def _crossing_free_path(g: Graph):
    crossing = {frozenset(p) for p in g.crossings}
    s, t = g.s, g.t
    adj: dict = {}
    for u, v in g.edges:
        adj.setdefault(u, []).append((v, (u, v)))
        if not g.directed:
            adj.setdefault(v, []).append((u, (u, v)))

    def extend(path, used):
        if path[-1] == t:
            return path
        for v, e in sorted(adj.get(path[-1], [])):
            if v in path or any(frozenset((e, f)) in crossing for f in used):
                continue
            found = extend(path + [v], used + [e])
            if found:
                return found
        return None

    return extend([s], [])


def _path_ok(g: Graph, seq) -> bool:
    seq = list(seq)
    if not seq or seq[0] != g.s or seq[-1] != g.t or len(set(seq)) != len(seq):
        return False
    edges = [g._check((a, b)) for a, b in zip(seq, seq[1:])]
    if not all(e in g.edge_set() for e in edges):
        return False
    crossing = {frozenset(p) for p in g.crossings}
    return not any(frozenset(p) in crossing for p in itertools.combinations(edges, 2))


def _path_vertices(g: Graph, a, layout: str):
    edges = word_to_edges(layout, g.n, a)
    if not is_path(g.n, edges, g.s, g.t, g.directed):
        return []
    adj: dict = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        if not g.directed:
            adj.setdefault(v, []).append(u)
    seq, prev = [g.s], None
    while seq[-1] != g.t:
        nxt = [x for x in adj[seq[-1]] if x != prev]
        prev = seq[-1]
        seq.append(nxt[0])
    return seq


def _gadget_path(g: Graph, directed: bool) -> ReductionOutput:
    name = "dpath" if directed else "upath"
    if g.directed != directed:
        raise InputError(f"{name} gadget needs a {'directed' if directed else 'undirected'} graph")
    if g.s is None or g.t is None or g.s == g.t:
        raise InputError(f"{name} gadget needs distinct s and t")
    for a, b in g.crossings:
        if a not in g.edge_set() or b not in g.edge_set():
            raise InputError("crossing pairs must consist of graph edges")
    layout = "directed" if directed else "undirected"
    n = g.n
    if directed and any(u == v for u, v in g.edges):
        raise InputError("paths ignore loops; remove them from the input")
    avoid = [list(p) for p in g.crossings]
    target, _ = _frame(layout, n, "st-paths", {"n": n, "s": g.s, "t": g.t, "directed": directed},
                       g.edges, avoid, name)
    return ReductionOutput(
        name, g, target,
        forward=lambda seq: edges_to_word(layout, n, zip(seq, seq[1:])),
        backward=lambda a: _path_vertices(g, a, layout),
        source_solve=lambda: _crossing_free_path(g),
        source_verify=lambda seq: _path_ok(g, seq),
        metadata={"hardness": _PROVENANCE[name], "edge_sets": len(avoid)},
    )


def graph_property_gadget(prop: str, g: Graph) -> ReductionOutput:
    prop = prop.lower()
    if prop == "st":
        return _gadget_st(g)
    if prop == "dst":
        return _gadget_dst(g)
    if prop == "ucc":
        return _gadget_ucc(g)
    if prop == "dcc":
        return _gadget_dcc(g)
    if prop == "bpm":
        return _gadget_bpm(g)
    if prop in ("dpath", "upath"):
        return _gadget_path(g, prop == "dpath")
    raise InputError(f"unknown graph property {prop!r}; expected one of {', '.join(PROPERTIES)}")
