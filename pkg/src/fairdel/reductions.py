"""Hardness gadgets: equitable 3-coloring / connected partition to fair deletion.

Vertex version: every original vertex ``v`` gets a subdivided edge (through a
*selector*) to each of the class vertices and ``n`` pendant *dangling*
vertices. Deleting the selector between ``v`` and a class vertex puts ``v``
into that class. The edge version joins originals to class vertices
directly, hangs ``n/3 + 1`` dangling vertices on each original and deletes
edges instead.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional, Sequence

import numpy as np

from .graph import Graph, format_graph
from .logic.ast import Formula
from .logic.library import formula_library
from .logic.printer import format_formula
from .shapes import fair_edge_cost, fair_vertex_cost
from .solvers import is_equitable_coloring, is_equitable_connected_partition
from .tensor_eval import eval_tensor

VARIANTS = ("vertex", "edge", "eqcp")
ROLES = ("original", "class", "selector", "dangling")


@dataclass(frozen=True)
class ReducedInstance:
    variant: str
    graph: Graph
    formula_name: str
    target: int
    labels: tuple[str, ...]
    source: Graph  # the padded source graph; vertices 0..n-1 of ``graph``
    source_n: int  # vertex count before padding
    parts: int
    dangling_per_original: int

    @property
    def n(self) -> int:
        return self.source.n

    @property
    def formula(self) -> Formula:
        if self.variant == "edge":
            return formula_library("eq_3_col_edge")
        if self.variant == "eqcp":
            return formula_library("eq_conn")
        return formula_library("eq_3_col_vertex")

    @property
    def class_vertices(self) -> tuple[int, ...]:
        return tuple(range(self.n, self.n + self.parts))

    def selector(self, v: int, c: int) -> int:
        if self.variant == "edge":
            raise ValueError("the edge version has no selector vertices")
        return self.n + self.parts + v * self.parts + c

    def dangling_of(self, v: int) -> tuple[int, ...]:
        base = self.n + self.parts + (0 if self.variant == "edge" else self.n * self.parts)
        d = self.dangling_per_original
        return tuple(range(base + v * d, base + (v + 1) * d))

    def back_map(self) -> dict[int, Optional[int]]:
        """Reduced original vertex -> source vertex (None for padding)."""
        return {v: (v if v < self.source_n else None) for v in range(self.n)}


def pad_source(g: Graph, parts: int = 3, minimum: int = 6) -> Graph:
    """Add isolated vertices until ``parts`` divides n and n >= minimum."""
    n = max(g.n, minimum)
    while n % parts:
        n += 1
    return Graph(n, g.edges)


def _vertex_gadget(g: Graph, parts: int, variant: str, name: str, minimum: int) -> ReducedInstance:
    src = pad_source(g, parts, minimum)
    n = src.n
    edges = list(src.edges)
    labels = ["original"] * n + ["class"] * parts
    nxt = n + parts
    for v in range(n):
        for c in range(parts):
            s = nxt
            nxt += 1
            labels.append("selector")
            edges.append((v, s))
            edges.append((n + c, s))
    for v in range(n):
        for _ in range(n):
            edges.append((v, nxt))
            labels.append("dangling")
            nxt += 1
    gp = Graph.from_edges(nxt, edges)
    return ReducedInstance(variant, gp, name, n // parts, tuple(labels), src, g.n, parts, n)


def reduce_eq3col_to_fair_vertex(g: Graph) -> ReducedInstance:
    return _vertex_gadget(g, 3, "vertex", "eq_3_col_vertex", 6)


def reduce_eqcp_to_fair_vertex(g: Graph, parts: int) -> ReducedInstance:
    if parts < 2:
        raise ValueError("need at least two parts")
    # a class vertex keeps n - n/parts selectors; below 3 it would read as a
    # dangling vertex or a selector
    minimum = parts
    while minimum - minimum // parts < 3:
        minimum += parts
    return _vertex_gadget(g, parts, "eqcp", "eq_conn", minimum)


def reduce_eq3col_to_fair_edge(g: Graph) -> ReducedInstance:
    src = pad_source(g, 3, 6)
    n = src.n
    d = n // 3 + 1
    edges = list(src.edges)
    labels = ["original"] * n + ["class"] * 3
    for v in range(n):
        for c in range(3):
            edges.append((v, n + c))
    nxt = n + 3
    for v in range(n):
        for _ in range(d):
            edges.append((v, nxt))
            labels.append("dangling")
            nxt += 1
    gp = Graph.from_edges(nxt, edges)
    return ReducedInstance("edge", gp, "eq_3_col_edge", n // 3, tuple(labels), src, g.n, 3, d)


def reduce(g: Graph, variant: str, parts: int = 3) -> ReducedInstance:
    if variant == "vertex":
        return reduce_eq3col_to_fair_vertex(g)
    if variant == "edge":
        return reduce_eq3col_to_fair_edge(g)
    if variant == "eqcp":
        return reduce_eqcp_to_fair_vertex(g, parts)
    raise ValueError(f"variant must be one of {VARIANTS}")


def expected_size(inst: ReducedInstance) -> tuple[int, int]:
    n, m, p = inst.n, inst.source.m, inst.parts
    if inst.variant == "edge":
        d = n // 3 + 1
        return n + 3 + n * d, m + 3 * n + n * d
    return n + p + p * n + n * n, m + 2 * p * n + n * n


def size_audit(inst: ReducedInstance) -> dict:
    ev, ee = expected_size(inst)
    counts = {role: inst.labels.count(role) for role in ROLES}
    return {
        "variant": inst.variant,
        "n": inst.n,
        "padding": inst.n - inst.source_n,
        "vertices": inst.graph.n,
        "expected_vertices": ev,
        "edges": inst.graph.m,
        "expected_edges": ee,
        "roles": counts,
        "target": inst.target,
        "ok": inst.graph.n == ev and inst.graph.m == ee,
    }


def witness_from_coloring(inst: ReducedInstance, coloring: Sequence[int]):
    """Deletion set encoding an equitable coloring (partition) of the source.

    For ``eqcp`` the "coloring" is an equitable partition into connected
    parts rather than a proper coloring.

    Vertex versions: the selector from each original to its color's class
    vertex. Edge version: the edge from each original to its class vertex
    plus all but two of its dangling edges.
    """
    if inst.variant == "eqcp":
        if not is_equitable_connected_partition(inst.source, coloring, inst.parts):
            raise ValueError("not an equitable partition into connected parts of the padded source")
    elif not is_equitable_coloring(inst.source, coloring, inst.parts):
        raise ValueError("coloring is not a proper equitable coloring of the padded source")
    if inst.variant == "edge":
        f = []
        for v, c in enumerate(coloring):
            f.append((v, inst.n + c))
            f.extend((v, w) for w in inst.dangling_of(v)[: inst.dangling_per_original - 2])
        return sorted(f)
    return sorted(inst.selector(v, c) for v, c in enumerate(coloring))


def witness_cost(inst: ReducedInstance, witness) -> int:
    if inst.variant == "edge":
        return fair_edge_cost(inst.graph, witness)
    return fair_vertex_cost(inst.graph, witness)


def write_instance(inst: ReducedInstance, outdir, stem: str = "reduced") -> dict[str, Path]:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "graph": out / f"{stem}.graph",
        "formula": out / f"{stem}.formula",
        "target": out / f"{stem}.target",
        "labels": out / f"{stem}.labels",
    }
    paths["graph"].write_text(format_graph(inst.graph))
    paths["formula"].write_text(f"# {inst.formula_name}\n" + format_formula(inst.formula) + "\n")
    paths["target"].write_text(f"{inst.target}\n")
    paths["labels"].write_text("".join(f"{v} {role}\n" for v, role in enumerate(inst.labels)))
    return paths


# --- reverse spot-check ------------------------------------------------------


@dataclass
class SearchResult:
    witness: Optional[tuple[int, ...]]
    nodes: int = 0
    evaluations: int = 0
    pruned: int = 0
    elapsed_s: float = 0.0
    log: list[str] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.witness is not None


class _Search:
    """Depth-first search over deletion sets of fair cost <= target.

    Decisions come in groups: originals, class vertices, then the selectors
    of one class vertex at a time, then how many dangling vertices of each
    original to delete. Dangling vertices of one original are twins, so only
    prefixes are tried. After every group the formula is evaluated in
    three-valued mode; a definite False prunes the subtree.
    """

    def __init__(self, inst: ReducedInstance, time_limit: float | None):
        if inst.variant != "vertex":
            raise ValueError("reverse search supports the vertex version only")
        self.inst = inst
        self.g = inst.graph
        self.f = inst.formula
        self.target = inst.target
        self.n = self.g.n
        self.status = np.full(self.n, -1, dtype=np.int8)  # -1 undecided, 0 kept, 1 deleted
        self.load = np.zeros(self.n, dtype=np.int64)  # deleted neighbours so far
        self.nbrs = [sorted(self.g.neighbors[v]) for v in range(self.n)]
        self.dangling = [inst.dangling_of(v) for v in range(inst.n)]
        self.result = SearchResult(None)
        self.deadline = None if time_limit is None else time.perf_counter() + time_limit

    def _set(self, v: int, value: int) -> None:
        self.status[v] = value
        if value == 1:
            for u in self.nbrs[v]:
                self.load[u] += 1

    def _unset(self, v: int) -> None:
        if self.status[v] == 1:
            for u in self.nbrs[v]:
                self.load[u] -= 1
        self.status[v] = -1

    def _can_delete(self, v: int) -> bool:
        return all(self.load[u] < self.target for u in self.nbrs[v])

    def presence(self) -> tuple[np.ndarray, np.ndarray]:
        must = self.status == 0
        may = self.status != 1
        und = np.flatnonzero(self.status == -1)
        for v in und:
            if not self._can_delete(int(v)):
                must[v] = True
        for v, dang in enumerate(self.dangling):
            free = [w for w in dang if self.status[w] == -1]
            if not free:
                continue
            budget = int(self.target - self.load[v])
            for w in free[max(budget, 0):]:
                must[w] = True
        return must, may

    def evaluate(self) -> Optional[bool]:
        if self.deadline is not None and time.perf_counter() > self.deadline:
            raise TimeoutError("reverse search exceeded its time limit")
        must, may = self.presence()
        self.result.evaluations += 1
        return eval_tensor(self.g, self.f, must=must, may=may)

    def subsets(self, verts: Sequence[int], i: int = 0) -> Iterator[None]:
        """Assign ``verts[i:]`` in every fair-cost-feasible way (in place)."""
        if i == len(verts):
            yield
            return
        v = verts[i]
        self._set(v, 0)
        yield from self.subsets(verts, i + 1)
        self._unset(v)
        if self._can_delete(v):
            self._set(v, 1)
            yield from self.subsets(verts, i + 1)
            self._unset(v)

    def run(self) -> SearchResult:
        start = time.perf_counter()
        inst = self.inst
        n = inst.n
        for _ in self.subsets(list(range(n))):
            if self._step("originals"):
                for _ in self.subsets(list(inst.class_vertices)):
                    if self._step("classes"):
                        kept = [c for c in range(inst.parts) if self.status[n + c] == 0]
                        cols = kept + [c for c in range(inst.parts) if c not in kept]
                        if self._columns(cols, 0):
                            break
            if self.result.found:
                break
        self.result.elapsed_s = time.perf_counter() - start
        return self.result

    def _step(self, label: str) -> bool:
        self.result.nodes += 1
        val = self.evaluate()
        if val is False:
            self.result.pruned += 1
            return False
        return True

    def _columns(self, cols: list[int], idx: int) -> bool:
        inst = self.inst
        if idx == len(cols):
            return self._dangling(0)
        c = cols[idx]
        column = [inst.selector(v, c) for v in range(inst.n)]
        for _ in self.subsets(column):
            if self._step(f"column {c}") and self._columns(cols, idx + 1):
                return True
        return False

    def _dangling(self, v: int) -> bool:
        inst = self.inst
        if v == inst.n:
            return self._leaf()
        dang = self.dangling[v]
        budget = max(0, int(self.target - self.load[v]))
        for count in range(min(budget, len(dang)) + 1):
            for i, w in enumerate(dang):
                self._set(w, 1 if i < count else 0)
            ok = self._step(f"dangling {v}")
            if ok and self._dangling(v + 1):
                return True
            for w in reversed(dang):
                self._unset(w)
        return False

    def _leaf(self) -> bool:
        deleted = tuple(int(v) for v in np.flatnonzero(self.status == 1))
        if fair_vertex_cost(self.g, deleted) > self.target:
            return False
        keep = self.status != 1
        if eval_tensor(self.g, self.f, must=keep, may=keep):
            self.result.witness = deleted
            return True
        return False


def reverse_search(inst: ReducedInstance, *, time_limit: float | None = None) -> SearchResult:
    """Look for any deletion set of fair cost <= target satisfying the formula.

    Exhaustive up to twin symmetry of dangling vertices; on a non-colorable
    source the expected outcome is ``found == False``.
    """
    return _Search(inst, time_limit).run()
