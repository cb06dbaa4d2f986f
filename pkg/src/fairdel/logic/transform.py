"""Formula rewrites: counting desugaring, quantifier counts, MSO2 -> MSO1."""

from __future__ import annotations

import itertools
from dataclasses import replace
from typing import Callable

from .ast import (
    FALSE,
    TRUE,
    Adj,
    And,
    Const,
    Count,
    Dialect,
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
    Var,
    all_names,
    conj,
    disj,
    walk,
)
from .parser import check_formula


class TranslationError(ValueError):
    pass


class FreshNames:
    """Deterministic supply of variable names avoiding a reserved set."""

    def __init__(self, taken=()):
        self.taken = set(taken)
        self.counters: dict[str, itertools.count] = {}

    def __call__(self, stem: str) -> str:
        counter = self.counters.setdefault(stem, itertools.count(1))
        while True:
            name = f"{stem}{next(counter)}"
            if name not in self.taken:
                self.taken.add(name)
                return name


def map_children(node: Node, fn: Callable[[Node], Node]) -> Node:
    if isinstance(node, (And, Or)):
        return type(node)(tuple(fn(a) for a in node.args))
    if isinstance(node, Not):
        return Not(fn(node.arg))
    if isinstance(node, (Implies, Iff)):
        return type(node)(fn(node.left), fn(node.right))
    if isinstance(node, (Forall, Exists, Count)):
        return replace(node, body=fn(node.body))
    return node


def substitute(node: Node, name: str, new: str) -> Node:
    """Rename free occurrences of element variable ``name`` to ``new``."""
    if isinstance(node, (Adj, Eq)):
        return type(node)(new if node.a == name else node.a, new if node.b == name else node.b)
    if isinstance(node, Inc):
        return Inc(new if node.v == name else node.v, new if node.e == name else node.e)
    if isinstance(node, In):
        return In(new if node.elem == name else node.elem, new if node.set == name else node.set)
    if isinstance(node, (Forall, Exists, Count)) and node.var.name == name:
        return node
    return map_children(node, lambda ch: substitute(ch, name, new))


# --- counting quantifiers ----------------------------------------------------


def _expand_count(node: Count, fresh: FreshNames) -> Node:
    sort = node.var.sort
    body = node.body
    k = node.k
    if k < 0:
        raise ValueError("count must be nonnegative")
    other = fresh(node.var.name + "_")
    pred_other = substitute(body, node.var.name, other)
    if node.op == "<=":
        # not (at least k+1 distinct witnesses); stays correct on empty domains
        wit = [fresh(node.var.name + "_") for _ in range(k + 1)]
        inner = conj(
            *[substitute(body, node.var.name, w) for w in wit],
            *[Not(Eq(a, b)) for a, b in itertools.combinations(wit, 2)],
        )
        return Not(_exists([Var(w, sort) for w in wit], inner))
    if k == 0:
        return Forall(Var(other, sort), Not(pred_other))
    wit = [fresh(node.var.name + "_") for _ in range(k)]
    closure = Forall(
        Var(other, sort),
        Implies(pred_other, disj(*[Eq(other, w) for w in wit])),
    )
    inner = conj(
        *[substitute(body, node.var.name, w) for w in wit],
        *[Not(Eq(a, b)) for a, b in itertools.combinations(wit, 2)],
        closure,
    )
    return _exists([Var(w, sort) for w in wit], inner)


def _exists(vars_: list[Var], body: Node) -> Node:
    for v in reversed(vars_):
        body = Exists(v, body)
    return body


def desugar_node(node: Node, fresh: FreshNames) -> Node:
    if isinstance(node, Count):
        inner = desugar_node(node.body, fresh)
        return _expand_count(replace(node, body=inner), fresh)
    return map_children(node, lambda ch: desugar_node(ch, fresh))


def desugar_counting(f: Formula) -> Formula:
    """Replace every counting quantifier by plain quantifiers.

    ``E=k w. p(w)`` becomes ``k`` distinct witnesses satisfying ``p`` plus a
    universal clause forcing every ``p``-element to equal a witness;
    ``E=0`` becomes ``Aw'. ~p(w')``. ``E<=k w. p(w)`` becomes the negation of
    ``k+1`` distinct witnesses.
    """
    if not any(isinstance(n, Count) for n in walk(f.root)):
        return f
    fresh = FreshNames(all_names(f.root) | {v.name for v in f.free})
    return check_formula(desugar_node(f.root, fresh), f.free)


def quantifier_counts(f: Formula) -> tuple[int, int]:
    """Bound vertex-element and vertex-set quantifier counts ``(q_E, q_S)``."""
    if any(isinstance(n, Count) for n in walk(f.root)):
        f = desugar_counting(f)
    q_e = q_s = 0
    for node in walk(f.root):
        if isinstance(node, (Forall, Exists)):
            if node.var.sort is Sort.VERTEX:
                q_e += 1
            elif node.var.sort is Sort.VERTEX_SET:
                q_s += 1
    return q_e, q_s


def compute_r(q_e: int, q_s: int) -> int:
    """Equivalence threshold ``2**q_S * q_E``, clamped to at least 1."""
    return max(1, (2 ** q_s) * q_e)


def formula_r(f: Formula) -> int:
    return compute_r(*quantifier_counts(f))


# --- MSO2 -> MSO1 --------------------------------------------------------------


def cover_var_names(f: Formula, k: int) -> tuple[list[str], list[str]]:
    taken = all_names(f.root) | {v.name for v in f.free}
    fresh = FreshNames(taken)
    return [fresh("c") for _ in range(k)], [fresh("U") for _ in range(k)]


class _Translator:
    def __init__(self, cover: list[str], fresh: FreshNames, deleted: list[str] | None):
        self.cover = cover
        self.fresh = fresh
        self.deleted = deleted  # signature sets of the deleted edge set, plain mode

    def edge_in(self, sets: list[str], a: str, b: str) -> Node:
        parts = []
        for c, s in zip(self.cover, sets):
            parts.append(conj(Eq(a, c), In(b, s)))
            parts.append(conj(Eq(b, c), In(a, s)))
        return disj(*parts)

    def edge_exists(self, a: str, b: str) -> Node:
        if self.deleted is None:
            return Adj(a, b)
        return conj(Adj(a, b), Not(self.edge_in(self.deleted, a, b)))

    def set_consistent(self, sets: list[str]) -> Node:
        w = self.fresh("w")
        parts = []
        for c, s in zip(self.cover, sets):
            allowed = Adj(w, c)
            if self.deleted is not None:
                d = self.deleted[self.cover.index(c)]
                allowed = conj(allowed, Not(In(w, d)))
            parts.append(Forall(Var(w, Sort.VERTEX), Implies(In(w, s), allowed)))
        for i, j in itertools.combinations(range(len(self.cover)), 2):
            parts.append(Iff(In(self.cover[j], sets[i]), In(self.cover[i], sets[j])))
        return conj(*parts)

    def tr(self, node: Node, env: dict) -> Node:
        """``env`` maps edge variables to endpoint pairs, edge sets to set lists."""
        if isinstance(node, Const):
            return node
        if isinstance(node, Adj):
            return self.edge_exists(node.a, node.b)
        if isinstance(node, Inc):
            a, b = env[node.e]
            return disj(Eq(node.v, a), Eq(node.v, b))
        if isinstance(node, Eq):
            if node.a in env and isinstance(env[node.a], tuple):
                a1, b1 = env[node.a]
                a2, b2 = env[node.b]
                return disj(conj(Eq(a1, a2), Eq(b1, b2)), conj(Eq(a1, b2), Eq(b1, a2)))
            return node
        if isinstance(node, In):
            target = env.get(node.set)
            if isinstance(target, list):
                a, b = env[node.elem]
                return self.edge_in(target, a, b)
            return node
        if isinstance(node, (Forall, Exists)):
            var = node.var
            inner = dict(env)
            if var.sort is Sort.EDGE:
                a, b = self.fresh(var.name + "_a"), self.fresh(var.name + "_b")
                inner[var.name] = (a, b)
                body = self.tr(node.body, inner)
                guard = self.edge_exists(a, b)
                va, vb = Var(a, Sort.VERTEX), Var(b, Sort.VERTEX)
                if isinstance(node, Forall):
                    return Forall(va, Forall(vb, Implies(guard, body)))
                return Exists(va, Exists(vb, conj(guard, body)))
            if var.sort is Sort.EDGE_SET:
                sets = [self.fresh(var.name + "_") for _ in self.cover]
                inner[var.name] = sets
                body = self.tr(node.body, inner)
                cons = self.set_consistent(sets)
                svars = [Var(s, Sort.VERTEX_SET) for s in sets]
                if isinstance(node, Forall):
                    out = Implies(cons, body)
                    for v in reversed(svars):
                        out = Forall(v, out)
                    return out
                out = conj(cons, body)
                for v in reversed(svars):
                    out = Exists(v, out)
                return out
            inner.pop(var.name, None)
            return type(node)(var, self.tr(node.body, inner))
        if isinstance(node, Count):
            raise AssertionError("desugar before translating")
        return map_children(node, lambda ch: self.tr(ch, env))


def mso2_to_mso1(f: Formula, k: int, *, deletion: bool = False) -> Formula:
    """Rewrite an MSO2 formula over a size-``k`` vertex cover into MSO1.

    Generalized mode (default): ``f`` has exactly one free edge-set variable
    ``F``. The result has free vertices ``c1..ck`` (the cover, in order) and
    free vertex sets ``U1..Uk`` with ``U_i`` the vertices joined to ``c_i`` by
    an edge of ``F``.

    Deletion mode: ``f`` is a sentence to be evaluated on ``G - F``; the
    result has the same free variables and ``U_i`` describe the deleted ``F``.
    """
    if k < 0:
        raise TranslationError("cover size must be nonnegative")
    if not deletion:
        if not any(v.sort.is_edge for v in f.free) and f.dialect is not Dialect.MSO2:
            return f
        edge_sets = [v for v in f.free if v.sort is Sort.EDGE_SET]
        if len(edge_sets) != 1 or len(f.free) != 1:
            if any(v.sort is Sort.EDGE for v in f.free):
                raise TranslationError("free edge-element variables are not supported")
            raise TranslationError("expected exactly one free edge-set variable")
    elif f.free:
        raise TranslationError("deletion mode expects a sentence")
    f = desugar_counting(f)
    cover, usets = cover_var_names(f, k)
    fresh = FreshNames(all_names(f.root) | set(cover) | set(usets) | {v.name for v in f.free})
    tr = _Translator(cover, fresh, usets if deletion else None)
    env = {} if deletion else {f.free[0].name: usets}
    root = tr.tr(f.root, env)
    free = tuple(Var(c, Sort.VERTEX) for c in cover) + tuple(Var(u, Sort.VERTEX_SET) for u in usets)
    return check_formula(root, free)
