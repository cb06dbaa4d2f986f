"""Simple undirected graphs, the text format, and the two structural parameters.

Vertices are always ``0..n-1``. Neighborhood diversity classes and the
minimum vertex cover are the parameters the solvers are built around.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

log = logging.getLogger(__name__)


class GraphFormatError(ValueError):
    """Raised for malformed graph files; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CoverBudgetExceeded(RuntimeError):
    """No vertex cover within the requested size exists."""

    def __init__(self, budget: int):
        self.budget = budget
        super().__init__(f"minimum vertex cover is larger than {budget}")


def _norm(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        normed = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
            normed.add(_norm(u, v))
        object.__setattr__(self, "edges", frozenset(normed))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        return cls(n, frozenset(_norm(u, v) for u, v in edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> range:
        return range(self.n)

    @cached_property
    def edge_list(self) -> tuple[tuple[int, int], ...]:
        """Edges sorted lexicographically; edge indices refer to this order."""
        return tuple(sorted(self.edges))

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: i for i, e in enumerate(self.edge_list)}

    @cached_property
    def neighbors(self) -> tuple[frozenset, ...]:
        nbrs = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    @cached_property
    def adj_masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << w for w in nb) for nb in self.neighbors)

    @cached_property
    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.edges:
            a[u, v] = a[v, u] = True
        a.setflags(write=False)
        return a

    @cached_property
    def incidence(self) -> np.ndarray:
        """``(m, n)`` 0/1 matrix, rows in :attr:`edge_list` order."""
        inc = np.zeros((self.m, self.n), dtype=np.int64)
        for i, (u, v) in enumerate(self.edge_list):
            inc[i, u] = inc[i, v] = 1
        inc.setflags(write=False)
        return inc

    def has_edge(self, u: int, v: int) -> bool:
        return u != v and _norm(u, v) in self.edges

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    def induced(self, keep: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph on ``keep``, renumbered; also returns new->old map."""
        old = sorted(set(keep))
        pos = {v: i for i, v in enumerate(old)}
        edges = [(pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos]
        return Graph.from_edges(len(old), edges), old

    def delete_vertices(self, removed: Iterable[int]) -> "Graph":
        removed = set(removed)
        return self.induced(v for v in range(self.n) if v not in removed)[0]

    def delete_edges(self, removed: Iterable[tuple[int, int]]) -> "Graph":
        removed = {_norm(u, v) for u, v in removed}
        return Graph(self.n, self.edges - removed)


def parse_graph(text: str) -> Graph:
    """Parse the ``n m`` / ``u v`` edge-list format (``#`` comments allowed)."""
    header = None
    edges: list[tuple[int, int]] = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise GraphFormatError(f"expected integers, got {line!r}", lineno) from None
        if len(nums) != 2:
            raise GraphFormatError(f"expected two integers, got {len(nums)}", lineno)
        if header is None:
            n, m = nums
            if n < 0 or m < 0:
                raise GraphFormatError("negative vertex or edge count", lineno)
            header = (n, m)
            continue
        u, v = nums
        n = header[0]
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"vertex index out of range 0..{n - 1}", lineno)
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}", lineno)
        e = _norm(u, v)
        if e in seen:
            log.warning("line %d: duplicate edge %s ignored", lineno, e)
            continue
        seen.add(e)
        edges.append(e)
    if header is None:
        raise GraphFormatError("missing 'n m' header")
    n, m = header
    if len(edges) != m:
        # duplicates are tolerated, so only warn on count drift
        log.warning("header announces %d edges, read %d distinct", m, len(edges))
    return Graph.from_edges(n, edges)


def format_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{u} {v}" for u, v in g.edge_list]
    return "\n".join(lines) + "\n"


def read_graph(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


# --- neighborhood diversity ------------------------------------------------


@dataclass(frozen=True)
class NdPartition:
    """Twin classes of a graph.

    ``classes[i]`` is a sorted tuple of vertices, ``clique[i]`` is True for
    clique classes (singletons included) and ``class_adj[i, j]`` is the
    class adjacency relation, reflexive exactly on clique classes.
    """

    graph: Graph
    classes: tuple[tuple[int, ...], ...]
    clique: tuple[bool, ...]

    @property
    def k(self) -> int:
        return len(self.classes)

    @cached_property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    @cached_property
    def class_of(self) -> tuple[int, ...]:
        out = [0] * self.graph.n
        for i, cls in enumerate(self.classes):
            for v in cls:
                out[v] = i
        return tuple(out)

    @cached_property
    def class_adj(self) -> np.ndarray:
        k = self.k
        a = np.zeros((k, k), dtype=bool)
        for i in range(k):
            a[i, i] = self.clique[i]
        for u, v in self.graph.edges:
            i, j = self.class_of[u], self.class_of[v]
            if i != j:
                a[i, j] = a[j, i] = True
        a.setflags(write=False)
        return a

    def adjacent(self, i: int, j: int) -> bool:
        return bool(self.class_adj[i, j])


def nd_partition(g: Graph) -> NdPartition:
    """Coarsest twin partition (open twins and closed twins merged)."""
    open_fp: dict[frozenset, list[int]] = {}
    closed_fp: dict[frozenset, list[int]] = {}
    for v in range(g.n):
        open_fp.setdefault(g.neighbors[v], []).append(v)
        closed_fp.setdefault(g.neighbors[v] | {v}, []).append(v)

    label = list(range(g.n))
    kind = [True] * g.n  # True = clique
    # a vertex cannot have both a false twin and a true twin
    for group in open_fp.values():
        if len(group) > 1:
            for v in group:
                label[v] = group[0]
                kind[v] = False
    for group in closed_fp.values():
        if len(group) > 1:
            for v in group:
                label[v] = group[0]

    members: dict[int, list[int]] = {}
    for v in range(g.n):
        members.setdefault(label[v], []).append(v)
    ordered = sorted(members.values(), key=lambda c: c[0])
    classes = tuple(tuple(c) for c in ordered)
    clique = tuple(len(c) == 1 or kind[c[0]] for c in classes)
    return NdPartition(g, classes, clique)


def refine_for_cover(nd: NdPartition, cover: Sequence[int]) -> NdPartition:
    """Split every cover vertex off into its own singleton class."""
    cov = set(cover)
    classes = []
    clique = []
    for cls, cl in zip(nd.classes, nd.clique):
        rest = tuple(v for v in cls if v not in cov)
        singles = [(v,) for v in cls if v in cov]
        for s in singles:
            classes.append(s)
            clique.append(True)
        if rest:
            classes.append(rest)
            clique.append(cl or len(rest) == 1)
    order = sorted(range(len(classes)), key=lambda i: classes[i][0])
    return NdPartition(
        nd.graph, tuple(classes[i] for i in order), tuple(clique[i] for i in order)
    )


# --- vertex cover ----------------------------------------------------------


@dataclass(frozen=True)
class VertexCover:
    cover: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.cover)

    def __iter__(self):
        return iter(self.cover)

    def position(self, v: int) -> Optional[int]:
        try:
            return self.cover.index(v)
        except ValueError:
            return None


def _cover_search(adj: list[int], alive: int, k: int) -> Optional[int]:
    """Bounded search tree: a cover (bitmask) of size <= k or None."""
    # pick the live vertex of maximum live degree
    best, best_deg = -1, 0
    a = alive
    while a:
        low = a & -a
        v = low.bit_length() - 1
        a ^= low
        d = (adj[v] & alive).bit_count()
        if d > best_deg:
            best, best_deg = v, d
    if best_deg == 0:
        return 0
    if k == 0:
        return None
    if best_deg > k:
        # the high-degree vertex is forced
        sub = _cover_search(adj, alive & ~(1 << best), k - 1)
        return None if sub is None else sub | (1 << best)
    if k * best_deg < _live_edge_count(adj, alive):
        return None
    # branch: take best, or take all its neighbours
    sub = _cover_search(adj, alive & ~(1 << best), k - 1)
    if sub is not None:
        return sub | (1 << best)
    nb = adj[best] & alive
    cnt = nb.bit_count()
    if cnt > k:
        return None
    sub = _cover_search(adj, alive & ~nb & ~(1 << best), k - cnt)
    return None if sub is None else sub | nb


def _live_edge_count(adj: list[int], alive: int) -> int:
    total = 0
    a = alive
    while a:
        low = a & -a
        v = low.bit_length() - 1
        a ^= low
        total += (adj[v] & alive).bit_count()
    return total // 2


def min_vertex_cover(g: Graph, budget: int | None = None) -> VertexCover:
    """Minimum vertex cover by iterative deepening over a bounded search tree.

    Raises :class:`CoverBudgetExceeded` when the minimum exceeds ``budget``.
    """
    adj = list(g.adj_masks)
    alive = (1 << g.n) - 1
    limit = g.n if budget is None else min(budget, g.n)
    for k in range(limit + 1):
        found = _cover_search(adj, alive, k)
        if found is not None:
            return VertexCover(tuple(v for v in range(g.n) if found >> v & 1))
    raise CoverBudgetExceeded(limit if budget is not None else g.n)


def is_vertex_cover(g: Graph, cover: Iterable[int]) -> bool:
    c = set(cover)
    return all(u in c or v in c for u, v in g.edges)
