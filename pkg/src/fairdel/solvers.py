"""Fair deletion solvers and their brute-force oracles.

Every engine sorts its candidates by fair cost and model-checks them in that
order, so the first satisfying candidate is a minimum; a bound simply cuts
the list. Yes-answers are re-verified on the concrete witness before they
are returned.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import groupby
from typing import Callable, Optional, Sequence

import numpy as np

from . import _accel
from .graph import Graph, NdPartition, min_vertex_cover, nd_partition, refine_for_cover
from .logic.ast import Dialect, Formula, Sort
from .logic.transform import formula_r, mso2_to_mso1
from .mc import BudgetExceeded, Kernel, check_shape, eval_bruteforce, kernel_cap, kernelize
from .shapes import (
    CoverLayout,
    SignatureShape,
    count_exact_signature_shapes,
    count_signature_classes,
    cover_layout,
    enumerate_representatives,
    enumerate_signature_representatives,
    enumerate_signature_shapes,
    fair_edge_cost,
    fair_edge_cost_of_signature_shape,
    fair_vertex_cost,
    realize_shape,
    realize_signature,
    shape_costs,
)

MODES = ("plain", "generalized")
DEFAULT_EXACT_BUDGET = 200_000
MAX_BRUTE_BITS = 20


class WitnessCheckError(AssertionError):
    """A solver produced a witness that fails direct verification."""


@dataclass
class Solution:
    answer: Optional[bool]  # None when a budget ran out
    witness: Optional[tuple] = None
    fair_cost: Optional[int] = None
    status: str = "solved"  # solved | budget_exceeded
    heuristic: bool = False
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "answer": None if self.answer is None else ("yes" if self.answer else "no"),
            "fair_cost": self.fair_cost,
            "witness": None if self.witness is None else [list(w) if isinstance(w, tuple) else w for w in self.witness],
            "heuristic": self.heuristic,
            "stats": self.stats,
        }


def _check_mode(f: Formula, mode: str, set_sort: Sort) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "plain":
        if f.free:
            raise ValueError("plain mode expects a sentence (no free variables)")
    elif len(f.free) != 1 or f.free[0].sort is not set_sort:
        raise ValueError(f"generalized mode expects exactly one free {set_sort.name} variable")


def _holds(g: Graph, f: Formula, mode: str, deleted, vertex: bool, budget) -> bool:
    if mode == "plain":
        h = g.delete_vertices(deleted) if vertex else g.delete_edges(deleted)
        return eval_bruteforce(h, f, {}, budget=budget)
    return eval_bruteforce(g, f, {f.free[0].name: list(deleted)}, budget=budget)


def _first_hit(
    candidates: list,
    costs: Sequence[int],
    check: Callable,
    bound: Optional[int],
    jobs: int,
    stats: dict,
):
    """Smallest ``(cost, candidate)`` pair passing ``check``, or None.

    Candidates are grouped by cost; with ``jobs > 1`` a whole cost level is
    checked in parallel and the earliest passing candidate wins, so the
    result never depends on completion order.
    """
    order = sorted(range(len(candidates)), key=lambda i: (costs[i], i))
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        for cost, group in groupby(order, key=lambda i: costs[i]):
            if bound is not None and cost > bound:
                break
            idx = list(group)
            if pool is None:
                for i in idx:
                    stats["checked"] += 1
                    if check(candidates[i]):
                        return int(cost), candidates[i]
            else:
                results = list(pool.map(check, [candidates[i] for i in idx]))
                stats["checked"] += len(idx)
                for i, ok in zip(idx, results):
                    if ok:
                        return int(cost), candidates[i]
    finally:
        if pool is not None:
            pool.shutdown()
    return None


def _finish(sol: Solution, start: float) -> Solution:
    sol.stats["elapsed_s"] = round(time.perf_counter() - start, 6)
    return sol


# --- vertex deletion, neighborhood diversity ----------------------------------


@dataclass(frozen=True)
class _ShapeCheck:
    g: Graph
    nd: NdPartition
    f: Formula
    mode: str
    r: int
    kernel: Kernel
    budget: Optional[int]

    def __call__(self, s) -> bool:
        return check_shape(self.g, self.nd, self.f, s, mode=self.mode, r=self.r, kernel=self.kernel, budget=self.budget)


def solve_fair_vertex_nd(
    g: Graph,
    f: Formula,
    *,
    bound: Optional[int] = None,
    mode: str = "generalized",
    budget: Optional[int] = None,
    jobs: int = 1,
) -> Solution:
    """Fair vertex deletion by shape enumeration over the twin classes.

    ``bound=None`` minimizes. Only the r-representatives with minimal cost
    in their class are checked, each on the kernel of the graph.
    """
    start = time.perf_counter()
    if f.dialect is Dialect.MSO2:
        raise ValueError("vertex solver takes FO or MSO1 formulas, got MSO2")
    _check_mode(f, mode, Sort.VERTEX_SET)
    nd = nd_partition(g)
    r = formula_r(f)
    kernel = kernelize(nd, kernel_cap(r))
    reps = list(enumerate_representatives(nd, r))
    costs = shape_costs(nd, np.array(reps, dtype=np.int64)) if nd.k else np.zeros(len(reps), dtype=np.int64)
    stats = {"engine": "nd", "n": g.n, "m": g.m, "nd": nd.k, "r": r, "kernel_n": kernel.graph.n,
             "representatives": len(reps), "checked": 0}
    check = _ShapeCheck(g, nd, f, mode, r, kernel, budget)
    try:
        hit = _first_hit(reps, costs.tolist(), check, bound, jobs, stats)
    except BudgetExceeded:
        return _finish(Solution(None, status="budget_exceeded", stats=stats), start)
    if hit is None:
        return _finish(Solution(False, stats=stats), start)
    cost, shape = hit
    w = tuple(realize_shape(nd, shape))
    stats["shape"] = list(shape)
    sol = Solution(True, w, cost, stats=stats)
    return _finish(_verify_vertex(g, f, mode, sol, bound, budget), start)


def _verify_vertex(g, f, mode, sol: Solution, bound, budget) -> Solution:
    real = fair_vertex_cost(g, sol.witness)
    try:
        ok = _holds(g, f, mode, sol.witness, True, budget)
    except BudgetExceeded:
        sol.status, sol.answer = "budget_exceeded", None
        return sol
    if not ok or real != sol.fair_cost or (bound is not None and real > bound):
        raise WitnessCheckError(f"witness {sol.witness} failed verification (cost {real}, holds {ok})")
    sol.stats["verified"] = True
    return sol


def _subset_order(width: int, costs: np.ndarray) -> np.ndarray:
    return np.lexsort((np.arange(1 << width), costs))


def brute_force_fair_vertex(
    g: Graph,
    f: Formula,
    *,
    bound: Optional[int] = None,
    mode: str = "generalized",
    budget: Optional[int] = None,
) -> Solution:
    """Oracle: every ``W`` of ``V`` in order of fair cost."""
    start = time.perf_counter()
    _check_mode(f, mode, Sort.VERTEX_SET)
    if g.n > MAX_BRUTE_BITS:
        raise BudgetExceeded(1 << g.n)
    masks = np.arange(1 << g.n, dtype=np.uint64)
    costs = _accel.set_costs(masks, g.adjacency)
    stats = {"engine": "brute", "n": g.n, "m": g.m, "candidates": len(masks), "checked": 0}
    try:
        for i in _subset_order(g.n, costs):
            cost = int(costs[i])
            if bound is not None and cost > bound:
                break
            w = tuple(v for v in range(g.n) if int(i) >> v & 1)
            stats["checked"] += 1
            if _holds(g, f, mode, w, True, budget):
                return _finish(Solution(True, w, cost, stats=stats), start)
    except BudgetExceeded:
        return _finish(Solution(None, status="budget_exceeded", stats=stats), start)
    return _finish(Solution(False, stats=stats), start)


# --- edge deletion, vertex cover ---------------------------------------------


def cell_kernel(g: Graph, layout: CoverLayout, sig, cap: int) -> tuple[Graph, list[int], list[list[int]]]:
    """Truncate every (class, signature cell) group to ``cap`` vertices.

    Vertices of one group are twins with identical membership in all ``U_i``,
    so the kernel satisfies the same bounded-quantifier formulas. Returns
    the kernel and the assignment of ``c_i`` / ``U_i`` in kernel indices.
    """
    sets = [set(u) for u in sig]
    groups: dict[tuple[int, int], list[int]] = {}
    cls = layout.nd.class_of
    for w in range(g.n):
        mask = sum(1 << i for i, u in enumerate(sets) if w in u)
        groups.setdefault((cls[w], mask), []).append(w)
    keep = sorted(v for members in groups.values() for v in members[:cap])
    kg, old = g.induced(keep)
    pos = {v: i for i, v in enumerate(old)}
    cover = [pos[c] for c in layout.cover]
    usets = [[pos[w] for w in u if w in pos] for u in sets]
    return kg, cover, usets


@dataclass(frozen=True)
class _SignatureCheck:
    g: Graph
    layout: CoverLayout
    translated: Formula
    cap: int
    budget: Optional[int]

    def __call__(self, s: SignatureShape) -> bool:
        sig, _ = realize_signature(self.layout, s)
        kg, cover, usets = cell_kernel(self.g, self.layout, sig, self.cap)
        names = [v.name for v in self.translated.free]
        k = self.layout.k
        assignment = dict(zip(names[:k], cover))
        assignment.update(zip(names[k:], usets))
        return eval_bruteforce(kg, self.translated, assignment, budget=self.budget)


def solve_fair_edge_vc(
    g: Graph,
    f: Formula,
    *,
    bound: Optional[int] = None,
    mode: str = "generalized",
    budget: Optional[int] = None,
    exact_budget: int = DEFAULT_EXACT_BUDGET,
    force_greedy: bool = False,
    jobs: int = 1,
) -> Solution:
    """Fair edge deletion over a minimum vertex cover.

    The formula is rewritten to talk about the cover ``c_1..c_k`` and the
    signature sets ``U_1..U_k``. When the number of signature shapes is at
    most ``exact_budget`` all of them are enumerated; otherwise one greedy
    representative per r-equivalence class is used and the solution is
    flagged ``heuristic`` unless representatives and shapes coincide.
    """
    start = time.perf_counter()
    _check_mode(f, mode, Sort.EDGE_SET)
    cover = min_vertex_cover(g).cover
    nd = refine_for_cover(nd_partition(g), cover)
    layout = cover_layout(nd, cover)
    translated = mso2_to_mso1(f, len(cover), deletion=(mode == "plain"))
    r = formula_r(translated)
    exact_count = count_exact_signature_shapes(layout)
    stats = {"engine": "vc", "n": g.n, "m": g.m, "vc": len(cover), "cover": list(cover),
             "classes": nd.k, "r": r, "exact_shapes": exact_count, "checked": 0}
    heuristic = False
    if exact_count <= exact_budget and not force_greedy:
        shapes = list(enumerate_signature_shapes(layout))
        stats["enumeration"] = "exact"
    else:
        shapes = list(enumerate_signature_representatives(layout, r))
        stats["enumeration"] = "representatives"
        heuristic = count_signature_classes(layout, r) != exact_count
    stats["representatives"] = len(shapes)
    costs = [fair_edge_cost_of_signature_shape(nd, cover, s, layout=layout) for s in shapes]
    check = _SignatureCheck(g, layout, translated, kernel_cap(r), budget)
    try:
        hit = _first_hit(shapes, costs, check, bound, jobs, stats)
    except BudgetExceeded:
        return _finish(Solution(None, status="budget_exceeded", heuristic=heuristic, stats=stats), start)
    if hit is None:
        return _finish(Solution(False, heuristic=heuristic, stats=stats), start)
    cost, s = hit
    _, edges = realize_signature(layout, s)
    stats["signature_shape"] = s.to_records()
    sol = Solution(True, tuple(sorted(edges)), cost, heuristic=heuristic, stats=stats)
    return _finish(_verify_edge(g, f, mode, sol, bound, budget), start)


def _verify_edge(g, f, mode, sol: Solution, bound, budget) -> Solution:
    real = fair_edge_cost(g, sol.witness)
    try:
        ok = _holds(g, f, mode, sol.witness, False, budget)
    except BudgetExceeded:
        sol.status, sol.answer = "budget_exceeded", None
        return sol
    if not ok or real != sol.fair_cost or (bound is not None and real > bound):
        raise WitnessCheckError(f"witness {sol.witness} failed verification (cost {real}, holds {ok})")
    sol.stats["verified"] = True
    return sol


def brute_force_fair_edge(
    g: Graph,
    f: Formula,
    *,
    bound: Optional[int] = None,
    mode: str = "generalized",
    budget: Optional[int] = None,
) -> Solution:
    """Oracle: every ``F`` of ``E`` in order of fair cost."""
    start = time.perf_counter()
    _check_mode(f, mode, Sort.EDGE_SET)
    if g.m > MAX_BRUTE_BITS:
        raise BudgetExceeded(1 << g.m)
    masks = np.arange(1 << g.m, dtype=np.uint64)
    costs = _accel.edge_set_costs(masks, g.incidence) if g.m else np.zeros(1, dtype=np.int64)
    edges = g.edge_list
    stats = {"engine": "brute", "n": g.n, "m": g.m, "candidates": len(masks), "checked": 0}
    try:
        for i in _subset_order(g.m, costs):
            cost = int(costs[i])
            if bound is not None and cost > bound:
                break
            fset = tuple(edges[e] for e in range(g.m) if int(i) >> e & 1)
            stats["checked"] += 1
            if _holds(g, f, mode, fset, False, budget):
                return _finish(Solution(True, fset, cost, stats=stats), start)
    except BudgetExceeded:
        return _finish(Solution(None, status="budget_exceeded", stats=stats), start)
    return _finish(Solution(False, stats=stats), start)


# --- equitable 3-coloring ------------------------------------------------------


def is_equitable_coloring(g: Graph, colors: Sequence[int], parts: int = 3) -> bool:
    if len(colors) != g.n or any(not 0 <= c < parts for c in colors):
        return False
    if any(colors[u] == colors[v] for u, v in g.edges):
        return False
    sizes = [list(colors).count(c) for c in range(parts)]
    return max(sizes) - min(sizes) <= 1


def is_equitable_connected_partition(g: Graph, parts_of: Sequence[int], parts: int) -> bool:
    """Every part induces a connected subgraph; part sizes differ by at most one."""
    if len(parts_of) != g.n or any(not 0 <= c < parts for c in parts_of):
        return False
    sizes = [list(parts_of).count(c) for c in range(parts)]
    if max(sizes) - min(sizes) > 1:
        return False
    for c in range(parts):
        members = {v for v in range(g.n) if parts_of[v] == c}
        if not members:
            continue
        stack = [min(members)]
        seen = set(stack)
        while stack:
            u = stack.pop()
            for w in g.neighbors[u] & members:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen != members:
            return False
    return True


def equitable_3_coloring(g: Graph) -> Optional[list[int]]:
    """A proper 3-coloring with class sizes differing by at most one, or None."""
    n = g.n
    lo, extra = divmod(n, 3)
    hi = lo + (1 if extra else 0)
    order = sorted(range(n), key=lambda v: (-g.degree(v), v))
    colors = [-1] * n
    sizes = [0, 0, 0]

    def big() -> int:
        return sum(1 for s in sizes if s > lo)

    def go(idx: int, used: int) -> bool:
        if idx == n:
            return all(lo <= s <= hi for s in sizes)
        v = order[idx]
        remaining = n - idx
        # every class must still be able to reach the floor size
        if sum(max(0, lo - s) for s in sizes) > remaining:
            return False
        for c in range(min(used + 1, 3)):
            if sizes[c] >= hi or any(colors[u] == c for u in g.neighbors[v]):
                continue
            if sizes[c] == lo and big() >= extra:
                continue
            colors[v] = c
            sizes[c] += 1
            if go(idx + 1, max(used, c + 1)):
                return True
            sizes[c] -= 1
            colors[v] = -1
        return False

    return list(colors) if go(0, 0) else None
