"""
Simple graphs on vertices 0..n-1: cut-rank, pivots, pivot-minors and
linear rank-width, plus the GF(2) arrangement and matroid a graph induces.
"""

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import networkx as nx
import numpy as np
from networkx.algorithms.isomorphism import GraphMatcher

from widthkit import config, connfn
from widthkit.checks import Verdict
from widthkit.errors import BudgetExceeded, NotAnEdge, TheoremViolation, UnknownLabel, WidthKitError
from widthkit.ffla import Subspace, gf2_rank, span
from widthkit.fullset import SubspaceArrangement
from widthkit.linking import StrongLinkingReport, run_strong_linking_checks
from widthkit.matroid import GF2, Configuration

logger = logging.getLogger(__name__)

# -------------------- Graphs --------------------


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Graph:
    """adj[v] is the neighbourhood of v as a bitmask."""

    n: int
    adj: tuple[int, ...]

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise WidthKitError(f"{len(self.adj)} rows for {self.n} vertices")
        for v, row in enumerate(self.adj):
            if row >> self.n:
                raise WidthKitError(f"vertex {v} has a neighbour outside 0..{self.n - 1}")
            if row >> v & 1:
                raise WidthKitError(f"loop at vertex {v}")
            for u in _bits(row):
                if not self.adj[u] >> v & 1:
                    raise WidthKitError(f"edge {v}-{u} is not symmetric")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise UnknownLabel([(u, v)])
            if u == v:
                raise WidthKitError(f"loop at vertex {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, (0,) * n)

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> "Graph":
        nodes = sorted(g.nodes())
        index = {v: i for i, v in enumerate(nodes)}
        return cls.from_edges(len(nodes), ((index[u], index[v]) for u, v in g.edges()))

    @classmethod
    def from_graph6(cls, text: str) -> "Graph":
        return cls.from_networkx(nx.from_graph6_bytes(text.strip().encode()))

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges())
        return g

    def to_graph6(self) -> str:
        return nx.to_graph6_bytes(self.to_networkx(), header=False).decode().strip()

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in _bits(self.adj[u]) if u < v]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def degree(self, v: int) -> int:
        return bin(self.adj[v]).count("1")

    def vertex_mask(self, vertices: Iterable[int]) -> int:
        m = 0
        bad = []
        for v in vertices:
            if not 0 <= v < self.n:
                bad.append(v)
            else:
                m |= 1 << v
        if bad:
            raise UnknownLabel(bad)
        return m

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Vertex v becomes perm[v]."""
        adj = [0] * self.n
        for v in range(self.n):
            for u in _bits(self.adj[v]):
                adj[perm[v]] |= 1 << perm[u]
        return Graph(self.n, tuple(adj))

    def induced(self, vertices: Iterable[int]) -> "Graph":
        """G[X], renumbered 0..|X|-1 in increasing order of X."""
        keep = sorted(set(vertices))
        self.vertex_mask(keep)
        index = {v: i for i, v in enumerate(keep)}
        adj = []
        for v in keep:
            adj.append(sum(1 << index[u] for u in _bits(self.adj[v]) if u in index))
        return Graph(len(keep), tuple(adj))

    def delete(self, vertices: Iterable[int]) -> "Graph":
        drop = set(vertices)
        self.vertex_mask(drop)
        return self.induced(v for v in range(self.n) if v not in drop)


# -------------------- Cut-rank --------------------


def _cut_rank_mask(g: Graph, mask: int) -> int:
    outside = ((1 << g.n) - 1) & ~mask
    return gf2_rank(g.adj[v] & outside for v in _bits(mask))


def cut_rank(g: Graph, x: Iterable[int]) -> int:
    """GF(2) rank of the X by V - X submatrix of the adjacency matrix."""
    return _cut_rank_mask(g, g.vertex_mask(x))


def cut_rank_function(g: Graph) -> connfn.ConnectivityFunction:
    return connfn.ConnectivityFunction(tuple(range(g.n)), lambda m: _cut_rank_mask(g, m), name="cut_rank")


def linear_rank_width(g: Graph, budget: int | None = None) -> tuple[int, connfn.Layout]:
    return connfn.path_width(cut_rank_function(g), budget)


# -------------------- Pivots --------------------


def pivot(g: Graph, u: int, v: int) -> Graph:
    """G ^ uv: toggle pairs across the three neighbourhood classes, then swap u and v."""
    g.vertex_mask([u, v])
    if not g.has_edge(u, v):
        raise NotAnEdge(f"{u}-{v} is not an edge")
    ends = (1 << u) | (1 << v)
    nu, nv = g.adj[u] & ~ends, g.adj[v] & ~ends
    both, only_u, only_v = nu & nv, nu & ~nv, nv & ~nu
    adj = list(g.adj)
    for a, b in ((both, only_u), (both, only_v), (only_u, only_v)):
        for x in _bits(a):
            adj[x] ^= b
        for y in _bits(b):
            adj[y] ^= a
    perm = list(range(g.n))
    perm[u], perm[v] = v, u
    return Graph(g.n, tuple(adj)).relabel(perm)


def apply_pivots(g: Graph, pivots: Iterable[tuple[int, int]]) -> Graph:
    for u, v in pivots:
        g = pivot(g, u, v)
    return g


def check_pivot_triangle(g: Graph, u: int, v: int, w: int) -> bool:
    """G ^ uv ^ vw == G ^ uw on a triangle uvw."""
    if not (g.has_edge(u, v) and g.has_edge(v, w) and g.has_edge(u, w)):
        raise NotAnEdge(f"{u}, {v}, {w} do not form a triangle")
    return pivot(pivot(g, u, v), v, w) == pivot(g, u, w)


def _check_orbit_budget(g: Graph, budget: int | None):
    limit = config.ORBIT_BUDGET if budget is None else budget
    if limit >= 0 and g.n > limit:
        raise BudgetExceeded("pivot orbit", g.n, limit)


@lru_cache(maxsize=4096)
def _orbit(g: Graph) -> tuple[tuple[Graph, tuple[tuple[int, int], ...]], ...]:
    paths = {g: ()}
    queue = deque([g])
    while queue:
        h = queue.popleft()
        for u, v in h.edges():
            nxt = pivot(h, u, v)
            if nxt not in paths:
                paths[nxt] = paths[h] + ((u, v),)
                queue.append(nxt)
    return tuple(paths.items())


def pivot_paths(g: Graph, budget: int | None = None) -> dict[Graph, tuple[tuple[int, int], ...]]:
    """Every graph pivot-equivalent to g (same labels), with a pivot sequence reaching it, in BFS order."""
    _check_orbit_budget(g, budget)
    return dict(_orbit(g))


def pivot_orbit(g: Graph, budget: int | None = None) -> frozenset[Graph]:
    return frozenset(pivot_paths(g, budget))


def _has_induced_copy(host: Graph, h: Graph) -> bool:
    if h.n == 0:
        return True
    if h.n > host.n or len(h.edges()) > len(host.edges()):
        return False
    return GraphMatcher(host.to_networkx(), h.to_networkx()).subgraph_is_isomorphic()


def is_pivot_minor(h: Graph, g: Graph, proper: bool = False, budget: int | None = None) -> bool:
    """Whether h is isomorphic to an induced subgraph of some graph pivot-equivalent to g."""
    if h.n > g.n or (proper and h.n == g.n):
        return False
    seen = set()
    for member in pivot_orbit(g, budget):
        key = canonical_form(member)
        if key in seen:
            continue
        seen.add(key)
        if _has_induced_copy(member, h):
            return True
    return False


# -------------------- Canonical forms --------------------


def _refined_classes(g: Graph) -> list[list[int]]:
    colour = [g.degree(v) for v in range(g.n)]
    while True:
        sig = [(colour[v], tuple(sorted(colour[u] for u in _bits(g.adj[v])))) for v in range(g.n)]
        ranks = {s: i for i, s in enumerate(sorted(set(sig)))}
        nxt = [ranks[s] for s in sig]
        if len(set(nxt)) == len(set(colour)):
            colour = nxt
            break
        colour = nxt
    return [[v for v in range(g.n) if colour[v] == c] for c in sorted(set(colour))]


def canonical_form(g: Graph) -> str:
    """Least upper-triangle bit string over orders that respect refined degree classes."""
    classes = _refined_classes(g)
    pairs = [(i, j) for i in range(g.n) for j in range(i + 1, g.n)]
    best = None
    for parts in itertools.product(*(itertools.permutations(c) for c in classes)):
        order = [v for part in parts for v in part]
        bits = "".join("1" if g.has_edge(order[i], order[j]) else "0" for i, j in pairs)
        if best is None or bits < best:
            best = bits
    value = int(best, 2) if best else 0
    return f"g{g.n}:{value:x}"


def canonical_graph(g: Graph) -> Graph:
    classes = _refined_classes(g)
    pairs = [(i, j) for i in range(g.n) for j in range(i + 1, g.n)]
    best, best_order = None, list(range(g.n))
    for parts in itertools.product(*(itertools.permutations(c) for c in classes)):
        order = [v for part in parts for v in part]
        bits = "".join("1" if g.has_edge(order[i], order[j]) else "0" for i, j in pairs)
        if best is None or bits < best:
            best, best_order = bits, order
    perm = [0] * g.n
    for new, old in enumerate(best_order):
        perm[old] = new
    return g.relabel(perm)


def enumerate_graphs(max_n: int) -> Iterator[Graph]:
    """One graph per isomorphism class on at most max_n vertices, by size.

    Up to 7 vertices the networkx graph atlas is complete; 8 vertices are
    reached by adding a vertex to every 7-vertex graph in every possible way.
    """
    if max_n > 8:
        raise BudgetExceeded("graph enumeration", max_n, 8)
    atlas = [Graph.from_networkx(h) for h in nx.graph_atlas_g()]
    for g in atlas:
        if g.n <= max_n:
            yield g
    if max_n < 8:
        return
    seen: set[str] = set()
    for g in (h for h in atlas if h.n == 7):
        for nbrs in range(1 << 7):
            adj = list(g.adj) + [nbrs]
            for u in _bits(nbrs):
                adj[u] |= 1 << 7
            h = Graph(8, tuple(adj))
            key = canonical_form(h)
            if key not in seen:
                seen.add(key)
                yield canonical_graph(h)
    logger.info(f"{len(seen)} graphs on 8 vertices")


# -------------------- Linear-algebra views --------------------


def _unit(n: int, v: int) -> list[int]:
    return [int(i == v) for i in range(n)]


def _adjacency_row(g: Graph, v: int) -> list[int]:
    return [g.adj[v] >> i & 1 for i in range(g.n)]


def arrangement_of(g: Graph) -> SubspaceArrangement:
    """V_v = <e_v, a_v> in GF(2)^n, with a_v the adjacency row of v; labels are str(v)."""
    spaces = tuple(span(GF2, g.n, [_unit(g.n, v), _adjacency_row(g, v)]) for v in range(g.n))
    return SubspaceArrangement(GF2, g.n, tuple(str(v) for v in range(g.n)), spaces)


def vertex_labels(vertices: Iterable[int]) -> list[str]:
    return [str(v) for v in sorted(vertices)]


def graph_matroid(g: Graph) -> Configuration:
    """Columns of [I | A] over GF(2), labelled i<v> and a<v>."""
    items = [(f"i{v}", _unit(g.n, v)) for v in range(g.n)]
    items += [(f"a{v}", _adjacency_row(g, v)) for v in range(g.n)]
    return Configuration.from_vectors(GF2, g.n, items)


def matroid_side(vertices: Iterable[int]) -> set[str]:
    """I_X u A_X."""
    vertices = list(vertices)
    return {f"i{v}" for v in vertices} | {f"a{v}" for v in vertices}


# -------------------- Linking --------------------


@dataclass(frozen=True)
class PivotLinking:
    """H = G'[S u T] for G' pivot-equivalent to G with rho_H(S) = k.

    H's vertex i is vertices[i] of the original graph.
    """

    k: int
    minor: Graph
    vertices: tuple[int, ...]
    member: Graph
    pivots: tuple[tuple[int, int], ...]


def min_cut_rank(g: Graph, s: Iterable[int], t: Iterable[int]) -> int:
    s_mask, t_mask = g.vertex_mask(s), g.vertex_mask(t)
    if s_mask & t_mask:
        raise WidthKitError("S and T must be disjoint")
    free = ((1 << g.n) - 1) & ~(s_mask | t_mask)
    return min(_cut_rank_mask(g, s_mask | sub) for sub in connfn._submasks(free))


def graph_linking_minor(g: Graph, s: Iterable[int], t: Iterable[int], budget: int | None = None) -> PivotLinking:
    """First orbit member, in BFS order, whose restriction to S u T links S to T."""
    s, t = sorted(set(s)), sorted(set(t))
    k = min_cut_rank(g, s, t)
    keep = sorted(set(s) | set(t))
    index = {v: i for i, v in enumerate(keep)}
    for member, path in pivot_paths(g, budget).items():
        h = member.induced(keep)
        if cut_rank(h, [index[v] for v in s]) == k:
            return PivotLinking(k, h, tuple(keep), member, path)
    raise TheoremViolation(f"no pivot-minor on S u T links S={s} to T={t} at {k}")


def strong_linking_graph_check(g: Graph, s: Iterable[int], t: Iterable[int], z: Iterable[int],
                               z2: Iterable[int], rng: np.random.Generator | None = None) -> StrongLinkingReport:
    """Strong linking on [I | A] with C = I_R and D = A_R, R = V - (S u T).

    Needs rho(G[S u T]; S) = min rho = rho(Z) = rho(Z').
    """
    s, t, z, z2 = (set(x) for x in (s, t, z, z2))
    g.vertex_mask(s | t | z | z2)
    if s & t:
        return StrongLinkingReport(status=Verdict.INAPPLICABLE, reason="S and T intersect")
    k = min_cut_rank(g, s, t)
    keep = sorted(s | t)
    h = g.induced(keep)
    if cut_rank(h, [keep.index(v) for v in s]) != k:
        return StrongLinkingReport(status=Verdict.INAPPLICABLE, reason="G[S u T] does not link S to T")
    for zz in (z, z2):
        if not (s <= zz and not zz & t) or cut_rank(g, zz) != k:
            return StrongLinkingReport(status=Verdict.INAPPLICABLE, reason="Z is not a minimum cut between S and T")
    rest = set(range(g.n)) - s - t
    m = graph_matroid(g)
    return run_strong_linking_checks(m, {f"i{v}" for v in rest}, matroid_side(z), matroid_side(z2), rng)


def boundary_dims_match(g: Graph, x: Iterable[int]) -> bool:
    """dim of the arrangement boundary at X equals 2 rho(X)."""
    x = list(x)
    return arrangement_of(g).boundary(vertex_labels(x)).dim == 2 * cut_rank(g, x)


def standard_subspace(n: int, coords: Iterable[int]) -> Subspace:
    return Subspace.standard(GF2, n, coords)
