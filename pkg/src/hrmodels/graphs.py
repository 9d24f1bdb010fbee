"""Undirected graphs on vertices 1..d and the combinatorics built on them.

Chordality, clique trees, clique separators, clique number and treewidth.
Graphs are small (desk scale) so the algorithms favour clarity over
asymptotics.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from .errors import Disconnected, NotChordal, TooLarge

EXACT_TREEWIDTH_CAP = 20


@dataclass(frozen=True)
class UndirectedGraph:
    """Simple graph with vertices 1..d. Edges are stored as pairs (i, j), i < j."""

    d: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.d < 0:
            raise ValueError("vertex count must be nonnegative")
        norm = set()
        for e in self.edges:
            i, j = (int(x) for x in e)
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (1 <= i <= self.d and 1 <= j <= self.d):
                raise ValueError(f"edge ({i},{j}) outside 1..{self.d}")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, d: int, edges) -> "UndirectedGraph":
        return cls(d, frozenset(tuple(e) for e in edges))

    @property
    def vertices(self) -> range:
        return range(1, self.d + 1)

    @cached_property
    def adjacency(self) -> dict[int, frozenset]:
        adj = {v: set() for v in self.vertices}
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return {v: frozenset(s) for v, s in adj.items()}

    def neighbors(self, v: int) -> frozenset:
        return self.adjacency[v]

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def nonedges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in itertools.combinations(self.vertices, 2)
                if (i, j) not in self.edges]

    def is_complete(self) -> bool:
        return len(self.edges) == self.d * (self.d - 1) // 2

    def is_clique(self, vs) -> bool:
        return all(self.has_edge(i, j) for i, j in itertools.combinations(sorted(vs), 2))

    def components(self, removed=()) -> list[frozenset]:
        """Connected components of the graph with ``removed`` deleted, sorted by smallest vertex."""
        removed = set(removed)
        seen = set(removed)
        comps = []
        for v in self.vertices:
            if v in seen:
                continue
            stack, comp = [v], {v}
            seen.add(v)
            while stack:
                u = stack.pop()
                for w in self.adjacency[u]:
                    if w not in seen:
                        seen.add(w)
                        comp.add(w)
                        stack.append(w)
            comps.append(frozenset(comp))
        return comps

    def is_connected(self) -> bool:
        return self.d <= 1 or len(self.components()) == 1

    def induced(self, vs) -> tuple["UndirectedGraph", list[int]]:
        """Induced subgraph relabeled 1..k in increasing order; returns it with the label list."""
        labels = sorted(vs)
        pos = {v: a + 1 for a, v in enumerate(labels)}
        edges = [(pos[i], pos[j]) for i, j in self.edges if i in pos and j in pos]
        return UndirectedGraph.from_edges(len(labels), edges), labels

    def to_json(self) -> dict:
        return {"d": self.d, "edges": [list(e) for e in self.edge_list()]}

    @classmethod
    def from_json(cls, obj: dict) -> "UndirectedGraph":
        return cls.from_edges(int(obj["d"]), [tuple(e) for e in obj["edges"]])


# ---------------------------------------------------------------- families

def complete_graph(d: int) -> UndirectedGraph:
    return UndirectedGraph.from_edges(d, itertools.combinations(range(1, d + 1), 2))


def path_graph(d: int) -> UndirectedGraph:
    return UndirectedGraph.from_edges(d, [(i, i + 1) for i in range(1, d)])


def cycle_graph(n: int) -> UndirectedGraph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return UndirectedGraph.from_edges(n, [(i, i % n + 1) for i in range(1, n + 1)])


def complete_bipartite(m: int, n: int) -> UndirectedGraph:
    """K_{m,n} with parts {1..m} and {m+1..m+n}."""
    return UndirectedGraph.from_edges(
        m + n, [(i, m + j) for i in range(1, m + 1) for j in range(1, n + 1)])


def fish_graph() -> UndirectedGraph:
    return UndirectedGraph.from_edges(6, [(1, 2), (1, 3), (1, 4), (2, 4), (3, 4), (4, 5), (4, 6)])


def glue(g1: UndirectedGraph, g2: UndirectedGraph, shared: int) -> UndirectedGraph:
    """Identify the last ``shared`` vertices of g1 with the first ``shared`` vertices of g2."""
    off = g1.d - shared
    edges = list(g1.edges) + [(i + off, j + off) for i, j in g2.edges]
    return UndirectedGraph.from_edges(g1.d + g2.d - shared, edges)


def suspension(g: UndirectedGraph) -> UndirectedGraph:
    """Add a new vertex d+1 joined to every vertex of g."""
    apex = g.d + 1
    return UndirectedGraph.from_edges(apex, list(g.edges) + [(v, apex) for v in g.vertices])


def pentad_graph() -> UndirectedGraph:
    """Suspension of K_{5,2} plus the edge (6,7); 8 vertices with apex 8."""
    h = complete_bipartite(5, 2)
    h = UndirectedGraph.from_edges(7, list(h.edges) + [(6, 7)])
    return suspension(h)


def random_connected_graph(d: int, p: float, rng) -> UndirectedGraph:
    """Random spanning tree plus independent extra edges with probability p."""
    perm = rng.permutation(d) + 1
    edges = set()
    for a in range(1, d):
        parent = perm[rng.integers(0, a)]
        edges.add((min(perm[a], parent), max(perm[a], parent)))
    for i, j in itertools.combinations(range(1, d + 1), 2):
        if rng.random() < p:
            edges.add((i, j))
    return UndirectedGraph.from_edges(d, edges)


def random_chordal_graph(d: int, rng, max_clique: int = 4) -> UndirectedGraph:
    """Grow a connected chordal graph by attaching each new vertex to a clique."""
    edges = set()
    cliques = [frozenset([1])]
    for v in range(2, d + 1):
        base = cliques[rng.integers(0, len(cliques))]
        k = int(rng.integers(1, min(len(base), max_clique - 1) + 1))
        nbrs = rng.choice(sorted(base), size=k, replace=False)
        for u in nbrs:
            edges.add((int(u), v))
        cliques.append(frozenset(int(u) for u in nbrs) | {v})
    return UndirectedGraph.from_edges(d, edges)


# ---------------------------------------------------------------- chordality

def mcs_order(g: UndirectedGraph) -> list[int]:
    """Maximum cardinality search order; ties go to the smallest label."""
    weight = {v: 0 for v in g.vertices}
    order = []
    while weight:
        v = min(weight, key=lambda u: (-weight[u], u))
        order.append(v)
        del weight[v]
        for w in g.adjacency[v]:
            if w in weight:
                weight[w] += 1
    return order


def is_chordal(g: UndirectedGraph) -> bool:
    """Chordal iff every vertex's earlier MCS neighbours form a clique."""
    seen = set()
    for v in mcs_order(g):
        earlier = g.adjacency[v] & seen
        if not g.is_clique(earlier):
            return False
        seen.add(v)
    return True


@dataclass(frozen=True)
class ChordalDecomposition:
    cliques: tuple[frozenset, ...]
    separators: tuple[tuple[frozenset, int], ...]

    def running_intersection(self) -> bool:
        for j in range(1, len(self.cliques)):
            union = frozenset().union(*self.cliques[:j])
            meet = self.cliques[j] & union
            if not any(meet <= self.cliques[i] for i in range(j)):
                return False
        return True

    def to_json(self) -> dict:
        return {"cliques": [sorted(c) for c in self.cliques],
                "separators": [{"set": sorted(s), "nu": nu} for s, nu in self.separators]}


def chordal_decomposition(g: UndirectedGraph) -> ChordalDecomposition:
    """Perfect sequence of maximal cliques in MCS discovery order, with separator multiplicities."""
    if not g.is_connected():
        raise Disconnected("decomposition requires a connected graph")
    if not is_chordal(g):
        raise NotChordal("graph has a chordless cycle")
    order = mcs_order(g)
    cliques: list[set] = []
    seen: set = set()
    prev = -1
    for v in order:
        earlier = g.adjacency[v] & seen
        if len(earlier) <= prev or not cliques:
            cliques.append(set(earlier) | {v})
        else:
            cliques[-1].add(v)
        prev = len(earlier)
        seen.add(v)
    cliques = [frozenset(c) for c in cliques]
    counts: dict[frozenset, int] = {}
    first_seen: list[frozenset] = []
    for j in range(1, len(cliques)):
        sep = cliques[j] & frozenset().union(*cliques[:j])
        if sep not in counts:
            first_seen.append(sep)
            counts[sep] = 0
        counts[sep] += 1
    return ChordalDecomposition(tuple(cliques), tuple((s, counts[s]) for s in first_seen))


def maximal_cliques(g: UndirectedGraph) -> list[frozenset]:
    """All maximal cliques (Bron-Kerbosch with pivoting), sorted."""
    out = []

    def expand(r, p, x):
        if not p and not x:
            out.append(frozenset(r))
            return
        pivot = max(p | x, key=lambda u: len(g.adjacency[u] & p))
        for v in sorted(p - g.adjacency[pivot]):
            expand(r | {v}, p & g.adjacency[v], x & g.adjacency[v])
            p = p - {v}
            x = x | {v}

    expand(set(), set(g.vertices), set())
    return sorted(out, key=lambda c: (len(c), sorted(c)))


def clique_number(g: UndirectedGraph) -> int:
    """Size of the largest clique by branch and bound."""
    if g.d == 0:
        return 0
    best = 1

    def search(size, cand):
        nonlocal best
        if not cand:
            best = max(best, size)
            return
        for v in sorted(cand):
            if size + len(cand) <= best:
                return
            search(size + 1, cand & g.adjacency[v])
            cand = cand - {v}

    search(0, set(g.vertices))
    return best


# ---------------------------------------------------------------- treewidth

@dataclass(frozen=True)
class TreewidthReport:
    width: int
    mode: str  # "exact" or "min-fill upper bound"
    order: tuple[int, ...] = ()

    def __int__(self):
        return self.width


def min_fill_order(g: UndirectedGraph) -> tuple[int, list[int]]:
    """Greedy min-fill elimination; returns (width, order)."""
    adj = {v: set(g.adjacency[v]) for v in g.vertices}
    width, order = 0, []
    while adj:
        def fill(v):
            nb = sorted(adj[v])
            return sum(1 for a, b in itertools.combinations(nb, 2) if b not in adj[a])
        v = min(adj, key=lambda u: (fill(u), len(adj[u]), u))
        nb = adj.pop(v)
        width = max(width, len(nb))
        for a in nb:
            adj[a].discard(v)
            adj[a] |= nb - {a}
        order.append(v)
    return width, order


def treewidth(g: UndirectedGraph, exact: bool = True) -> TreewidthReport:
    """Treewidth by subset dynamic programming over elimination orders.

    TW(S) = min_{v in S} max(TW(S - v), |Q(S - v, v)|) where Q(S, v) is the set
    of uneliminated vertices reachable from v through S. With exact=False the
    min-fill heuristic width (an upper bound) is returned instead.
    """
    if not exact:
        w, order = min_fill_order(g)
        return TreewidthReport(w, "min-fill upper bound", tuple(order))
    d = g.d
    if d > EXACT_TREEWIDTH_CAP:
        raise TooLarge(f"exact treewidth is capped at d={EXACT_TREEWIDTH_CAP}, got {d}")
    if d == 0:
        return TreewidthReport(0, "exact")
    nbr = [0] * d
    for i, j in g.edges:
        nbr[i - 1] |= 1 << (j - 1)
        nbr[j - 1] |= 1 << (i - 1)
    full = (1 << d) - 1

    def q_size(s, v):
        # vertices outside s and v reachable from v via paths whose interior lies in s
        seen = 1 << v
        frontier = 1 << v
        reach = 0
        while frontier:
            b = frontier & -frontier
            frontier ^= b
            u = b.bit_length() - 1
            new = nbr[u] & ~seen
            seen |= new
            reach |= new & ~s
            frontier |= new & s
        return bin(reach & ~(1 << v)).count("1")

    best = {0: -1}
    for size in range(1, d + 1):
        layer = {}
        for s in (sum(1 << b for b in c) for c in itertools.combinations(range(d), size)):
            val = d
            rest = s
            while rest:
                b = rest & -rest
                rest ^= b
                prev = best[s ^ b]
                if prev >= val:
                    continue
                val = min(val, max(prev, q_size(s ^ b, b.bit_length() - 1)))
            layer[s] = val
        best = layer
    width = best[full]
    return TreewidthReport(max(width, 0), "exact")


# ---------------------------------------------------------------- separators

@dataclass(frozen=True)
class CliqueSplit:
    """A decomposition of the vertex set: left = A u C, right = B u C, separator C."""

    left: frozenset
    right: frozenset
    separator: frozenset


def clique_separators(g: UndirectedGraph):
    """Yield every clique separator split, smallest separators first, lexicographic within a size.

    For each separating clique C the first component of g - C (by smallest label)
    becomes A and the union of the remaining components becomes B.
    """
    if not g.is_connected():
        raise Disconnected("separator search requires a connected graph")
    for size in range(1, g.d - 1):
        for sep in itertools.combinations(g.vertices, size):
            if not g.is_clique(sep):
                continue
            comps = g.components(sep)
            if len(comps) < 2:
                continue
            c = frozenset(sep)
            a = comps[0]
            b = frozenset().union(*comps[1:])
            yield CliqueSplit(a | c, b | c, c)


def separate_decompose(g: UndirectedGraph, choice: int = 0) -> CliqueSplit | None:
    """Split along a clique separator, or None if g is prime.

    ``choice`` selects the k-th split in the deterministic enumeration order, which
    lets callers check that results do not depend on the separator picked.
    """
    for k, split in enumerate(clique_separators(g)):
        if k == choice:
            return split
    return None


# ---------------------------------------------------------------- io

def read_graph(path: str | Path) -> UndirectedGraph:
    """Read JSON ({"d":..., "edges":[[i,j],...]}) or an edge list with one "i j" per line."""
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return UndirectedGraph.from_json(json.loads(text))
    edges = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            i, j = line.split()[:2]
            edges.append((int(i), int(j)))
    d = max((max(e) for e in edges), default=0)
    return UndirectedGraph.from_edges(d, edges)


def write_graph(g: UndirectedGraph, path: str | Path) -> None:
    Path(path).write_text(json.dumps(g.to_json()) + "\n")
