"""Formula blocks of the equitable-coloring and equitable-partition gadgets.

The vertex-deletion blocks are evaluated on ``G' - W``, the edge-deletion
blocks on ``G' - F``; both are sentences.
"""

from __future__ import annotations

from .ast import (
    Adj,
    Count,
    Eq,
    Exists,
    Forall,
    Formula,
    Implies,
    In,
    Node,
    Not,
    Sort,
    Var,
    conj,
)
from .parser import check_formula
from .transform import FreshNames


def _v(name: str) -> Var:
    return Var(name, Sort.VERTEX)


class _Blocks:
    """Builds the named predicates with fresh bound variables at each use."""

    def __init__(self, edge_version: bool = False, verbatim: bool = False):
        self.fresh = FreshNames()
        self.edge = edge_version
        self.verbatim = verbatim

    def isol(self, v: str) -> Node:
        w = self.fresh("w")
        return Forall(_v(w), Not(Adj(v, w)))

    def dangling(self, v: str) -> Node:
        w, w2 = self.fresh("w"), self.fresh("w")
        return Exists(_v(w), conj(Adj(v, w), Forall(_v(w2), Implies(Adj(v, w2), Eq(w, w2)))))

    def original(self, v: str) -> Node:
        w = self.fresh("w")
        return Exists(_v(w), conj(self.dangling(w), Adj(v, w)))

    def selector(self, v: str) -> Node:
        w = self.fresh("w")
        return Count("=", 2, _v(w), Adj(v, w))

    def is_class(self, v: str) -> Node:
        if self.edge:
            parts = [Not(self.original(v)), Not(self.dangling(v))]
            if not self.verbatim:
                # isolated leftovers of deleted dangling edges are not classes
                parts.append(Not(self.isol(v)))
            return conj(*parts)
        return conj(Not(self.original(v)), Not(self.selector(v)), Not(self.dangling(v)))

    def belongs_to(self, v: str, a: str) -> Node:
        if self.edge:
            return conj(self.original(v), self.is_class(a), Not(Adj(v, a)))
        w = self.fresh("w")
        return conj(
            self.original(v),
            self.is_class(a),
            Not(Exists(_v(w), conj(Adj(v, w), Adj(w, a)))),
        )

    def same_class(self, v: str, w: str) -> Node:
        a = self.fresh("a")
        return conj(
            self.original(v),
            self.original(w),
            Exists(_v(a), conj(self.is_class(a), self.belongs_to(v, a), self.belongs_to(w, a))),
        )

    def valid_deletion(self) -> Node:
        v, v2, c = self.fresh("v"), self.fresh("v"), self.fresh("c")
        if self.edge:
            w = self.fresh("w")
            first = Forall(_v(v), Count("<=", 2, _v(w), conj(Adj(v, w), self.dangling(w))))
        else:
            first = Forall(_v(v), Not(self.isol(v)))
        second = Forall(
            _v(v2), Implies(self.original(v2), Count("=", 1, _v(c), self.belongs_to(v2, c)))
        )
        return conj(first, second)

    def eq_3_col(self) -> Node:
        v, w = self.fresh("v"), self.fresh("w")
        proper = Forall(_v(v), Forall(_v(w), Implies(self.same_class(v, w), Not(Adj(v, w)))))
        return conj(self.valid_deletion(), proper)

    def connected(self, W: str) -> Node:
        S = self.fresh("S")
        x, y = self.fresh("x"), self.fresh("y")
        x2, x3 = self.fresh("x"), self.fresh("x")
        nonempty = Exists(_v(x), In(x, S))
        inside = Forall(_v(x2), Implies(In(x2, S), In(x2, W)))
        proper = Exists(_v(x3), conj(In(x3, W), Not(In(x3, S))))
        leaves = Exists(_v(x), Exists(_v(y), conj(In(x, S), In(y, W), Not(In(y, S)), Adj(x, y))))
        return Forall(
            Var(S, Sort.VERTEX_SET), Implies(conj(nonempty, inside, proper), leaves)
        )

    def class_set(self, W: str) -> Node:
        v, v2, w2, w3, z = (self.fresh(s) for s in ("v", "v", "w", "w", "z"))
        return conj(
            Exists(_v(v), In(v, W)),
            Forall(_v(v2), Forall(_v(w2), Implies(conj(In(v2, W), In(w2, W)), self.same_class(v2, w2)))),
            Forall(
                _v(w3),
                Forall(_v(z), Implies(conj(In(w3, W), Not(In(z, W))), Not(self.same_class(w3, z)))),
            ),
        )

    def eq_conn(self) -> Node:
        W = self.fresh("W")
        return conj(
            self.valid_deletion(),
            Forall(Var(W, Sort.VERTEX_SET), Implies(self.class_set(W), self.connected(W))),
        )


LIBRARY_NAMES = ("eq_3_col_vertex", "eq_3_col_edge", "eq_conn", "connected_set")


def formula_library(name: str, **params) -> Formula:
    """Return a named gadget formula.

    ``eq_3_col_edge`` accepts ``verbatim=True`` for the unpatched ``class``
    block (which misreads isolated vertices as class vertices). ``eq_conn``
    accepts and ignores ``parts``; the formula does not depend on it.
    """
    if name == "eq_3_col_vertex":
        return check_formula(_Blocks().eq_3_col())
    if name == "eq_3_col_edge":
        blocks = _Blocks(edge_version=True, verbatim=bool(params.get("verbatim", False)))
        return check_formula(blocks.eq_3_col())
    if name == "eq_conn":
        return check_formula(_Blocks().eq_conn())
    if name == "connected_set":
        W = Var("W", Sort.VERTEX_SET)
        return check_formula(_Blocks().connected("W"), (W,))
    raise KeyError(f"unknown library formula {name!r}; known: {', '.join(LIBRARY_NAMES)}")
