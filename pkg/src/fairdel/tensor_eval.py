"""Vectorized evaluation over boolean tensors, with three-valued presence.

Every subformula is computed as a tensor with one axis per free variable,
so a quantifier costs one numpy reduction instead of a Python loop. Vertices
may be marked *maybe present*; the result is then a pair ``(must, may)``
meaning definitely true / possibly true over all completions (Kleene logic,
sound but not complete). Set quantifiers are only supported when every
vertex presence is decided.
"""

from __future__ import annotations

from typing import Mapping, Optional

import numpy as np

from .graph import Graph
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
)

MAX_SET_BITS = 16


class _T:
    """A tensor pair over named axes."""

    __slots__ = ("must", "may", "axes")

    def __init__(self, must: np.ndarray, may: np.ndarray, axes: tuple[str, ...]):
        self.must, self.may, self.axes = must, may, axes


def _align(arr: np.ndarray, axes: tuple[str, ...], target: tuple[str, ...]) -> np.ndarray:
    if axes == target:
        return arr
    order = sorted(range(len(axes)), key=lambda i: target.index(axes[i]))
    arr = np.transpose(arr, order)
    present = [axes[i] for i in order]
    shape = []
    it = iter(arr.shape)
    for name in target:
        shape.append(next(it) if name in present else 1)
    return arr.reshape(shape)


def _union(parts: list[_T]) -> tuple[str, ...]:
    out: list[str] = []
    for p in parts:
        for a in p.axes:
            if a not in out:
                out.append(a)
    return tuple(out)


class TensorEvaluator:
    def __init__(self, g: Graph, must: Optional[np.ndarray] = None, may: Optional[np.ndarray] = None):
        self.g = g
        n = g.n
        self.pmust = np.ones(n, dtype=bool) if must is None else np.asarray(must, dtype=bool)
        self.pmay = self.pmust.copy() if may is None else np.asarray(may, dtype=bool)
        if (self.pmust & ~self.pmay).any():
            raise ValueError("must-present vertices have to be possibly present")
        self.two_valued = bool((self.pmust == self.pmay).all())
        self.adj = g.adjacency

    # domains: index arrays per variable
    def _domain(self, sort: Sort) -> np.ndarray:
        if sort is Sort.VERTEX:
            return np.arange(self.g.n)
        if sort is Sort.VERTEX_SET:
            if self.g.n > MAX_SET_BITS:
                raise ValueError(f"set quantifiers need n <= {MAX_SET_BITS}")
            return np.arange(1 << self.g.n)
        raise NotImplementedError("edge sorts are not supported by the tensor evaluator")

    def evaluate(self, f: Formula, assignment: Mapping[str, object] | None = None) -> Optional[bool]:
        """True / False when decided for every completion, None otherwise."""
        assignment = assignment or {}
        dom: dict[str, np.ndarray] = {}
        sorts: dict[str, Sort] = {}
        for var in f.free:
            val = assignment[var.name]
            if var.sort is Sort.VERTEX:
                dom[var.name] = np.array([int(val)])
            elif var.sort is Sort.VERTEX_SET:
                mask = val if isinstance(val, int) else sum(1 << int(v) for v in set(val))
                dom[var.name] = np.array([mask], dtype=np.int64)
            else:
                raise NotImplementedError("edge sorts are not supported by the tensor evaluator")
            sorts[var.name] = var.sort
        t = self._eval(f.root, dom, sorts)
        must, may = bool(t.must.all()), bool(t.may.all())
        if must:
            return True
        if not may:
            return False
        return None

    def _pair(self, arr: np.ndarray, axes: tuple[str, ...]) -> _T:
        return _T(arr, arr, axes)

    def _eval(self, node: Node, dom: dict, sorts: dict) -> _T:
        if isinstance(node, Const):
            arr = np.array(node.value)
            return self._pair(arr, ())
        if isinstance(node, Adj):
            if node.a == node.b:
                da = dom[node.a]
                return self._pair(self.adj[da, da], (node.a,))
            return self._pair(self.adj[np.ix_(dom[node.a], dom[node.b])], (node.a, node.b))
        if isinstance(node, Eq):
            if node.a == node.b:
                return self._pair(np.ones(len(dom[node.a]), dtype=bool), (node.a,))
            return self._pair(dom[node.a][:, None] == dom[node.b][None, :], (node.a, node.b))
        if isinstance(node, In):
            x, s = dom[node.elem], dom[node.set]
            return self._pair(((s[None, :] >> x[:, None]) & 1).astype(bool), (node.elem, node.set))
        if isinstance(node, Inc):
            raise NotImplementedError("edge sorts are not supported by the tensor evaluator")
        if isinstance(node, Not):
            t = self._eval(node.arg, dom, sorts)
            return _T(~t.may, ~t.must, t.axes)
        if isinstance(node, (And, Or)):
            parts = [self._eval(a, dom, sorts) for a in node.args]
            axes = _union(parts)
            op = np.logical_and if isinstance(node, And) else np.logical_or
            must = _align(parts[0].must, parts[0].axes, axes)
            may = _align(parts[0].may, parts[0].axes, axes)
            for p in parts[1:]:
                must = op(must, _align(p.must, p.axes, axes))
                may = op(may, _align(p.may, p.axes, axes))
            return _T(must, may, axes)
        if isinstance(node, Implies):
            return self._eval(Or((Not(node.left), node.right)), dom, sorts)
        if isinstance(node, Iff):
            a, b = self._eval(node.left, dom, sorts), self._eval(node.right, dom, sorts)
            axes = _union([a, b])
            am, aM = _align(a.must, a.axes, axes), _align(a.may, a.axes, axes)
            bm, bM = _align(b.must, b.axes, axes), _align(b.may, b.axes, axes)
            # definitely equal: both definite and agreeing
            must = (am & bm) | (~aM & ~bM)
            may = (aM & bM) | (~am & ~bm)
            return _T(must, may, axes)
        return self._quant(node, dom, sorts)

    def _quant(self, node, dom: dict, sorts: dict) -> _T:
        name, sort = node.var.name, node.var.sort
        inner_dom = dict(dom)
        inner_dom[name] = self._domain(sort)
        inner_sorts = dict(sorts)
        inner_sorts[name] = sort
        if sort.is_set and not self.two_valued:
            raise NotImplementedError("set quantifiers need fully decided presence")
        body = self._eval(node.body, inner_dom, inner_sorts)
        if name not in body.axes:
            size = len(inner_dom[name])
            body = _T(body.must[..., None], body.may[..., None], body.axes + (name,))
            body.must = np.broadcast_to(body.must, body.must.shape[:-1] + (size,))
            body.may = np.broadcast_to(body.may, body.may.shape[:-1] + (size,))
        axes = body.axes
        ax = axes.index(name)
        rest = axes[:ax] + axes[ax + 1 :]
        if sort is Sort.VERTEX:
            shape = [1] * len(axes)
            shape[ax] = self.g.n
            pm, pM = self.pmust.reshape(shape), self.pmay.reshape(shape)
        else:
            pm = pM = np.ones(1, dtype=bool).reshape([1] * len(axes))
        if isinstance(node, Forall):
            must = (~pM | body.must).all(axis=ax)
            may = (~pm | body.may).all(axis=ax)
        elif isinstance(node, Exists):
            must = (pm & body.must).any(axis=ax)
            may = (pM & body.may).any(axis=ax)
        else:
            lo = (pm & body.must).sum(axis=ax)
            hi = (pM & body.may).sum(axis=ax)
            k = node.k
            if node.op == "<=":
                must, may = hi <= k, lo <= k
            else:
                must = (lo == k) & (hi == k)
                may = (lo <= k) & (hi >= k)
        return _T(np.asarray(must), np.asarray(may), rest)


def eval_tensor(
    g: Graph,
    f: Formula,
    assignment: Mapping[str, object] | None = None,
    *,
    must: Optional[np.ndarray] = None,
    may: Optional[np.ndarray] = None,
) -> Optional[bool]:
    """Evaluate ``f`` on the subgraph of present vertices.

    ``must`` / ``may`` mark definitely / possibly present vertices (default:
    all present). Returns None when the answer depends on the undecided ones.
    """
    return TensorEvaluator(g, must, may).evaluate(f, assignment)
