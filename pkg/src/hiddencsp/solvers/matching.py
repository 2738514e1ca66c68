"""Maximum bipartite matching (Hopcroft-Karp)."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping


@dataclass
class BipartiteGraph:
    """Left nodes (e.g. constraints), right nodes (e.g. variables), edges."""

    left: list = field(default_factory=list)
    right: list = field(default_factory=list)
    edges: list = field(default_factory=list)

    def adjacency(self) -> dict:
        adj = {u: [] for u in self.left}
        for u, v in self.edges:
            if v not in adj[u]:
                adj[u].append(v)
        return adj


def maximum_matching(adj: Mapping[Hashable, Iterable[Hashable]]) -> dict:
    """Maximum matching of a bipartite graph given as left -> right neighbours.

    Returns a dict from matched left nodes to right nodes. Neighbours are
    tried in the given order, so results are deterministic.
    """
    adj = {u: list(vs) for u, vs in adj.items()}
    match_l: dict = {u: None for u in adj}
    match_r: dict = {}
    inf = float("inf")

    def bfs() -> bool:
        dist.clear()
        queue = deque()
        for u in adj:
            if match_l[u] is None:
                dist[u] = 0
                queue.append(u)
        found = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = match_r.get(v)
                if w is None:
                    found = True
                elif dist.get(w, inf) == inf:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(root) -> bool:
        # iterative augmenting-path search along the BFS layers
        stack = [(root, iter(adj[root]))]
        path = []
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                w = match_r.get(v)
                if w is None:
                    path.append((u, v))
                    for a, b in path:
                        match_l[a] = b
                        match_r[b] = a
                    return True
                if dist.get(w, inf) == dist[u] + 1:
                    path.append((u, v))
                    stack.append((w, iter(adj[w])))
                    advanced = True
                    break
            if not advanced:
                dist[u] = inf
                stack.pop()
                if path:
                    path.pop()
        return False

    dist: dict = {}
    while bfs():
        for u in adj:
            if match_l[u] is None:
                dfs(u)
    return {u: v for u, v in match_l.items() if v is not None}


def has_system_of_distinct_representatives(sets: list) -> dict | None:
    """Pick pairwise distinct elements x_j in sets[j]; None if impossible."""
    match = maximum_matching({j: sorted(s) for j, s in enumerate(sets)})
    if len(match) < len(sets):
        return None
    return match
