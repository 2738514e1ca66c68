"""Named admissible-set families: graphs encoded as edge-indicator words.

Edge slots are indexed 1-based. Undirected graphs on ``[n]`` use the pairs
``{i, j}`` with ``i < j`` in lexicographic order (``ell = C(n, 2)``);
directed graphs use ordered pairs ``(i, j)``, ``i != j``, in lexicographic
order (``ell = n(n-1)``); the loop-allowing layout used for cycle covers and
bipartite matchings is the full ``n x n`` grid (``ell = n**2``).
"""
from __future__ import annotations

import itertools
from functools import lru_cache

from .core import AdmissibleSet, InputError, register_family

Edge = tuple  # (u, v), 1-based vertices


def undirected_slots(n: int) -> list[Edge]:
    return list(itertools.combinations(range(1, n + 1), 2))


def directed_slots(n: int) -> list[Edge]:
    return [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]


def grid_slots(n: int) -> list[Edge]:
    return [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]


LAYOUTS = {"undirected": undirected_slots, "directed": directed_slots, "grid": grid_slots}


@lru_cache(maxsize=None)
def slot_index(layout: str, n: int) -> dict:
    """Map edge -> 1-based slot for a layout; undirected edges are normalised."""
    return {e: i for i, e in enumerate(LAYOUTS[layout](n), 1)}


def edge_key(layout: str, e) -> Edge:
    u, v = e
    if layout == "undirected":
        if u == v:
            raise InputError(f"loop {e} in an undirected graph")
        return (min(u, v), max(u, v))
    if layout == "directed" and u == v:
        raise InputError(f"loop {e} not allowed in this layout")
    return (u, v)


def edges_to_word(layout: str, n: int, edges) -> tuple:
    idx = slot_index(layout, n)
    a = [0] * len(idx)
    for e in edges:
        key = edge_key(layout, e)
        if key not in idx:
            raise InputError(f"edge {e} is outside the vertex range 1..{n}")
        a[idx[key] - 1] = 1
    return tuple(a)


def word_to_edges(layout: str, n: int, a) -> list[Edge]:
    slots = LAYOUTS[layout](n)
    if len(a) != len(slots):
        raise InputError("word length does not match the edge layout")
    return [e for e, x in zip(slots, a) if x]


# ---------------------------------------------------------------------------
# graph predicates (used for membership checks and source-side solvers)


def _components(n: int, edges) -> list[set]:
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        parent[find(u)] = find(v)
    groups: dict = {}
    for v in range(1, n + 1):
        groups.setdefault(find(v), set()).add(v)
    return list(groups.values())


def is_spanning_tree(n: int, edges) -> bool:
    edges = list(edges)
    return len(edges) == n - 1 and len(_components(n, edges)) == 1


def is_in_arborescence(n: int, arcs, root: int = 1) -> bool:
    """Every vertex except ``root`` has exactly one out-arc and reaches the root."""
    out = {}
    for u, v in arcs:
        if u == v or u in out:
            return False
        out[u] = v
    if root in out or len(out) != n - 1:
        return False
    for v in range(1, n + 1):
        seen = set()
        while v != root:
            if v in seen:
                return False
            seen.add(v)
            v = out[v]
    return True


def is_undirected_cycle_cover(n: int, edges) -> bool:
    edges = [tuple(sorted(e)) for e in edges]
    if len(set(edges)) != len(edges):
        return False
    deg = [0] * (n + 1)
    for u, v in edges:
        if u == v:
            return False
        deg[u] += 1
        deg[v] += 1
    return all(deg[v] == 2 for v in range(1, n + 1))


def is_directed_cycle_cover(n: int, arcs) -> bool:
    """Arcs (loops allowed) where every vertex has in- and out-degree one."""
    arcs = list(arcs)
    outs = sorted(u for u, _ in arcs)
    ins = sorted(v for _, v in arcs)
    full = list(range(1, n + 1))
    return outs == full and ins == full


def is_path(n: int, edges, s: int, t: int, directed: bool) -> bool:
    """``edges`` is exactly the edge set of a simple s-t path."""
    edges = [tuple(e) for e in edges]
    if s == t:
        return not edges
    adj: dict = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        if not directed:
            adj.setdefault(v, []).append(u)
    if len(set(edges if directed else (tuple(sorted(e)) for e in edges))) != len(edges):
        return False
    prev, cur, seen = None, s, {s}
    for _ in range(len(edges)):
        options = [x for x in adj.get(cur, []) if x != prev or directed]
        if len(options) != 1:
            return False
        prev, cur = cur, options[0]
        if cur in seen:
            return False
        seen.add(cur)
    return cur == t and (directed or len(adj.get(t, [])) == 1)


def is_clique(n: int, edges, k: int) -> bool:
    edges = {tuple(sorted(e)) for e in edges}
    verts = {v for e in edges for v in e}
    if k <= 1:
        return not edges
    return len(verts) == k and edges == set(itertools.combinations(sorted(verts), 2))


def is_hamiltonian_cycle(n: int, edges) -> bool:
    return is_undirected_cycle_cover(n, edges) and len(_components(n, edges)) == 1


# ---------------------------------------------------------------------------
# enumerators


def _prufer_to_edges(seq, n):
    degree = [1] * (n + 1)
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = next(v for v in range(1, n + 1) if degree[v] == 1)
        edges.append((min(leaf, x), max(leaf, x)))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = [v for v in range(1, n + 1) if degree[v] == 1]
    edges.append((u, v))
    return edges


@register_family("spanning-trees")
def spanning_trees(n: int):
    if n < 2:
        raise InputError("spanning trees need n >= 2")
    if n == 2:
        return [edges_to_word("undirected", 2, [(1, 2)])]
    return [edges_to_word("undirected", n, _prufer_to_edges(seq, n))
            for seq in itertools.product(range(1, n + 1), repeat=n - 2)]


@register_family("in-arborescences")
def in_arborescences(n: int, root: int = 1):
    others = [v for v in range(1, n + 1) if v != root]
    words = []
    for parents in itertools.product(range(1, n + 1), repeat=len(others)):
        arcs = list(zip(others, parents))
        if is_in_arborescence(n, arcs, root):
            words.append(edges_to_word("directed", n, arcs))
    return words


@register_family("undirected-cycle-covers")
def undirected_cycle_covers(n: int):
    words = set()
    for perm in itertools.permutations(range(1, n + 1)):
        edges = set()
        ok = True
        for v in range(1, n + 1):
            u = perm[v - 1]
            if u == v or perm[u - 1] == v:  # loops and 2-cycles are not simple cycles
                ok = False
                break
            edges.add((min(u, v), max(u, v)))
        if ok:
            words.add(edges_to_word("undirected", n, edges))
    return sorted(words)


@register_family("directed-cycle-covers")
def directed_cycle_covers(n: int):
    return [edges_to_word("grid", n, [(v, perm[v - 1]) for v in range(1, n + 1)])
            for perm in itertools.permutations(range(1, n + 1))]


@register_family("perfect-matchings")
def perfect_matchings(n: int):
    # slot (i, j) of the n x n grid is the edge {i_A, j_B}
    return directed_cycle_covers(n)


@register_family("st-paths")
def st_paths(n: int, s: int, t: int, directed: bool = False):
    if not (1 <= s <= n and 1 <= t <= n) or s == t:
        raise InputError("s and t must be distinct vertices in 1..n")
    layout = "directed" if directed else "undirected"
    words = []

    def extend(path):
        last = path[-1]
        if last == t:
            words.append(edges_to_word(layout, n, list(zip(path, path[1:]))))
            return
        for v in range(1, n + 1):
            if v not in path:
                extend(path + [v])

    extend([s])
    return words


@register_family("k-cliques")
def k_cliques(n: int, k: int):
    if not 1 <= k <= n:
        raise InputError("clique size must be in 1..n")
    return [edges_to_word("undirected", n, itertools.combinations(c, 2))
            for c in itertools.combinations(range(1, n + 1), k)]


@register_family("hamiltonian-cycles")
def hamiltonian_cycles(n: int):
    if n < 3:
        raise InputError("Hamiltonian cycles need n >= 3")
    words = set()
    for rest in itertools.permutations(range(2, n + 1)):
        cyc = (1,) + rest
        if cyc[1] > cyc[-1]:
            continue
        words.add(edges_to_word("undirected", n, zip(cyc, cyc[1:] + cyc[:1])))
    return sorted(words)


def cyclic_table(phi: dict, p: int) -> tuple:
    """The table a(x, y) = phi^-1(phi(x) + phi(y)) on letters 0..p-1, row-major."""
    inv = {v: k for k, v in phi.items()}
    return tuple(inv[(phi[x] + phi[y]) % p] for x in range(p) for y in range(p))


@register_family("cyclic-group-tables")
def cyclic_group_tables(p: int):
    """All group tables on the letters 0..p-1 isomorphic to Z_p."""
    return sorted({cyclic_table(dict(enumerate(perm)), p)
                   for perm in itertools.permutations(range(p))})


def is_group_table(table, k: int) -> bool:
    """Direct axiom check of a row-major k x k multiplication table."""
    mul = lambda x, y: table[x * k + y]
    if len(table) != k * k or any(not 0 <= x < k for x in table):
        return False
    for x, y, z in itertools.product(range(k), repeat=3):
        if mul(mul(x, y), z) != mul(x, mul(y, z)):
            return False
    ids = [e for e in range(k) if all(mul(e, x) == x == mul(x, e) for x in range(k))]
    if not ids:
        return False
    e = ids[0]
    return all(any(mul(x, y) == e for y in range(k)) for x in range(k))


# ---------------------------------------------------------------------------
# convenience constructors


def family_set(name: str, **params) -> AdmissibleSet:
    ell, w = _family_shape(name, params)
    return AdmissibleSet(w, ell, "family", family=name, params=params)


def _family_shape(name: str, params: dict) -> tuple[int, int]:
    if name == "cyclic-group-tables":
        p = params["p"]
        return p * p, p
    n = params["n"]
    if name in ("spanning-trees", "undirected-cycle-covers", "k-cliques", "hamiltonian-cycles"):
        return n * (n - 1) // 2, 2
    if name == "in-arborescences":
        return n * (n - 1), 2
    if name in ("directed-cycle-covers", "perfect-matchings"):
        return n * n, 2
    if name == "st-paths":
        return (n * (n - 1) if params.get("directed") else n * (n - 1) // 2), 2
    raise InputError(f"unknown assignment family {name!r}")


FAMILY_LAYOUT = {
    "spanning-trees": "undirected",
    "undirected-cycle-covers": "undirected",
    "k-cliques": "undirected",
    "hamiltonian-cycles": "undirected",
    "in-arborescences": "directed",
    "directed-cycle-covers": "grid",
    "perfect-matchings": "grid",
}


def family_layout(name: str, params: dict) -> str:
    if name == "st-paths":
        return "directed" if params.get("directed") else "undirected"
    return FAMILY_LAYOUT[name]
