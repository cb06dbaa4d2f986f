"""Model checking.

:func:`eval_bruteforce` is the ground-truth evaluator: element quantifiers
iterate vertices or edges, set quantifiers iterate every subset (smallest
first). :func:`check_shape` answers ``G |= psi(X)`` for any ``X`` of a given
shape by evaluating on a kernel whose twin classes are truncated to
``2r + 2`` vertices.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping, Sequence

from .graph import Graph, NdPartition
from .logic.ast import (
    Adj,
    And,
    Const,
    Count,
    Eq,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    In,
    Inc,
    Node,
    Not,
    Or,
    Sort,
    free_names,
)
from .logic.transform import formula_r

DEFAULT_BUDGET = 50_000_000


class BudgetExceeded(RuntimeError):
    """The evaluator ran out of steps; no truth value was produced."""

    def __init__(self, budget: int):
        self.budget = budget
        super().__init__(f"evaluation budget of {budget} steps exceeded")


def default_budget() -> int:
    raw = os.environ.get("FAIRDEL_EVAL_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


@lru_cache(maxsize=32)
def _masks_by_popcount(width: int) -> tuple[int, ...]:
    if width > 24:
        raise BudgetExceeded(1 << width)
    return tuple(sorted(range(1 << width), key=lambda x: (x.bit_count(), x)))


def _encode(g: Graph, sort: Sort, value) -> int:
    if sort is Sort.VERTEX:
        v = int(value)
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} not in graph")
        return v
    if sort is Sort.VERTEX_SET:
        if isinstance(value, int):
            return value
        mask = 0
        for v in value:
            if not 0 <= v < g.n:
                raise ValueError(f"vertex {v} not in graph")
            mask |= 1 << v
        return mask
    if sort is Sort.EDGE:
        u, v = value
        return g.edge_index[(min(u, v), max(u, v))]
    if isinstance(value, int):
        return value
    mask = 0
    for u, v in value:
        mask |= 1 << g.edge_index[(min(u, v), max(u, v))]
    return mask


class _Evaluator:
    def __init__(self, g: Graph, f: Formula, budget: int):
        self.g = g
        self.adj = g.adj_masks
        self.ends = g.edge_list
        self.budget = budget
        self.steps = 0
        self.slots: dict[str, int] = {}
        self.nslots = 0

    def tick(self, k: int = 1) -> None:
        self.steps += k
        if self.steps > self.budget:
            raise BudgetExceeded(self.budget)

    def domain(self, sort: Sort) -> Sequence[int]:
        if sort is Sort.VERTEX:
            return range(self.g.n)
        if sort is Sort.EDGE:
            return range(self.g.m)
        if sort is Sort.VERTEX_SET:
            return _masks_by_popcount(self.g.n)
        return _masks_by_popcount(self.g.m)

    def compile(self, node: Node, scope: dict[str, int], depth: int) -> Callable[[list], bool]:
        if isinstance(node, Const):
            val = node.value
            return lambda env: val
        if isinstance(node, Adj):
            a, b, adj = scope[node.a], scope[node.b], self.adj
            return lambda env: bool(adj[env[a]] >> env[b] & 1)
        if isinstance(node, Inc):
            v, e, ends = scope[node.v], scope[node.e], self.ends
            return lambda env: env[v] in ends[env[e]]
        if isinstance(node, Eq):
            a, b = scope[node.a], scope[node.b]
            return lambda env: env[a] == env[b]
        if isinstance(node, In):
            x, s = scope[node.elem], scope[node.set]
            return lambda env: bool(env[s] >> env[x] & 1)
        if isinstance(node, Not):
            inner = self.compile(node.arg, scope, depth)
            return lambda env: not inner(env)
        if isinstance(node, And):
            parts = [self.compile(a, scope, depth) for a in node.args]
            return lambda env: all(p(env) for p in parts)
        if isinstance(node, Or):
            parts = [self.compile(a, scope, depth) for a in node.args]
            return lambda env: any(p(env) for p in parts)
        if isinstance(node, Implies):
            left = self.compile(node.left, scope, depth)
            right = self.compile(node.right, scope, depth)
            return lambda env: (not left(env)) or right(env)
        if isinstance(node, Iff):
            left = self.compile(node.left, scope, depth)
            right = self.compile(node.right, scope, depth)
            return lambda env: left(env) == right(env)
        return self._quant(node, scope, depth)

    def _quant(self, node, scope: dict[str, int], depth: int) -> Callable[[list], bool]:
        slot = depth
        self.nslots = max(self.nslots, slot + 1)
        inner_scope = dict(scope)
        inner_scope[node.var.name] = slot
        body = self.compile(node.body, inner_scope, depth + 1)
        dom = self.domain(node.var.sort)
        key_slots = tuple(sorted(scope[n] for n in free_names(node)))
        memo: dict = {}
        tick = self.tick

        if isinstance(node, Exists):
            def run(env):
                for x in dom:
                    env[slot] = x
                    tick()
                    if body(env):
                        return True
                return False
        elif isinstance(node, Forall):
            def run(env):
                for x in dom:
                    env[slot] = x
                    tick()
                    if not body(env):
                        return False
                return True
        else:
            k, at_most = node.k, node.op == "<="

            def run(env):
                count = 0
                for x in dom:
                    env[slot] = x
                    tick()
                    if body(env):
                        count += 1
                        if count > k:
                            return False
                return at_most or count == k

        def cached(env):
            key = tuple(env[s] for s in key_slots)
            hit = memo.get(key)
            if hit is None:
                hit = memo[key] = run(env)
            return hit

        return cached

    def run(self, f: Formula, assignment: Mapping[str, object]) -> bool:
        scope = {}
        values = []
        for i, var in enumerate(f.free):
            if var.name not in assignment:
                raise KeyError(f"free variable {var.name!r} has no value")
            scope[var.name] = i
            values.append(_encode(self.g, var.sort, assignment[var.name]))
        fn = self.compile(f.root, scope, len(f.free))
        env = values + [0] * max(0, self.nslots - len(values))
        return bool(fn(env))


def eval_bruteforce(
    g: Graph,
    f: Formula,
    assignment: Mapping[str, object] | None = None,
    *,
    budget: int | None = None,
    stats: dict | None = None,
) -> bool:
    """Tarskian truth of ``f`` in ``g`` under ``assignment``.

    Vertex values are indices, vertex sets iterables of indices (or a
    bitmask), edges ``(u, v)`` pairs and edge sets iterables of pairs.
    Raises :class:`BudgetExceeded` rather than guessing.
    """
    ev = _Evaluator(g, f, default_budget() if budget is None else budget)
    try:
        return ev.run(f, assignment or {})
    finally:
        if stats is not None:
            stats["steps"] = stats.get("steps", 0) + ev.steps
            stats["evaluations"] = stats.get("evaluations", 0) + 1


# --- kernels -----------------------------------------------------------------


@dataclass(frozen=True)
class Kernel:
    graph: Graph
    nd: NdPartition  # partition of the kernel graph, same class order
    cap: int
    sizes: tuple[int, ...]
    members: tuple[tuple[int, ...], ...]  # original vertices kept per class
    to_original: tuple[int, ...]


def kernelize(nd: NdPartition, cap: int) -> Kernel:
    """Keep the ``min(|N_i|, cap)`` lowest-indexed vertices of every class."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    members = tuple(cls[:cap] for cls in nd.classes)
    keep = sorted(v for cls in members for v in cls)
    kg, old = nd.graph.induced(keep)
    pos = {v: i for i, v in enumerate(old)}
    knd = NdPartition(kg, tuple(tuple(pos[v] for v in cls) for cls in members), nd.clique)
    return Kernel(kg, knd, cap, tuple(len(c) for c in members), members, tuple(old))


def kernel_cap(r: int) -> int:
    return 2 * r + 2


def kernel_shape(sizes: Sequence[int], shape: Sequence[int], r: int, cap: int) -> tuple[int, ...]:
    """Map a shape to an r-equivalent shape of the truncated classes."""
    out = []
    for size, s in zip(sizes, shape):
        if size <= cap:
            out.append(s)
            continue
        comp = size - s
        if s <= r:
            out.append(s)
        elif comp <= r:
            out.append(cap - comp)
        else:
            out.append(r + 1)
    return tuple(out)


def _realize(nd: NdPartition, shape: Sequence[int]) -> list[int]:
    return [v for cls, s in zip(nd.classes, shape) for v in cls[:s]]


def check_shape(
    g: Graph,
    nd: NdPartition,
    f: Formula,
    shape: Sequence[int],
    *,
    mode: str = "generalized",
    r: int | None = None,
    kernel: Kernel | None = None,
    budget: int | None = None,
    stats: dict | None = None,
) -> bool:
    """Does ``psi`` hold for the sets of shape ``shape``?

    ``generalized``: ``f`` has one free vertex-set variable, checked as
    ``G |= f(X)``. ``plain``: ``f`` is a sentence checked on ``G - X``.
    """
    if len(shape) != nd.k or any(not 0 <= s <= n for s, n in zip(shape, nd.sizes)):
        raise ValueError(f"invalid shape {tuple(shape)} for class sizes {nd.sizes}")
    if r is None:
        r = formula_r(f)
    if kernel is None:
        kernel = kernelize(nd, kernel_cap(r))
    kshape = kernel_shape(nd.sizes, shape, r, kernel.cap)
    x = _realize(kernel.nd, kshape)
    if mode == "plain":
        if f.free:
            raise ValueError("plain mode expects a sentence")
        return eval_bruteforce(kernel.graph.delete_vertices(x), f, {}, budget=budget, stats=stats)
    if len(f.free) != 1 or f.free[0].sort is not Sort.VERTEX_SET:
        raise ValueError("generalized mode expects exactly one free vertex-set variable")
    return eval_bruteforce(kernel.graph, f, {f.free[0].name: x}, budget=budget, stats=stats)
