"""Shapes of vertex sets, signatures of edge sets, and their fair costs.

A *shape* counts how many vertices of each twin class a set takes. Twins are
interchangeable, so the shape fixes the set up to automorphism, and the fair
cost of a set is a function of its shape alone.

For edge sets over a vertex cover ``c_1..c_k`` the analogue is the
*signature* ``U_i = {w : {w, c_i} in F}`` and its shape, the table
``S(j, I)`` of class-``j`` vertices lying in exactly the ``U_i`` for
``i in I`` (``I`` stored as a bitmask over cover positions).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _accel
from .graph import Graph, NdPartition

Shape = tuple[int, ...]


# --- vertex shapes -------------------------------------------------------------


def shape_of(nd: NdPartition, x: Iterable[int]) -> Shape:
    counts = [0] * nd.k
    cls = nd.class_of
    for v in set(x):
        counts[cls[v]] += 1
    return tuple(counts)


def complement_shape(nd: NdPartition, s: Sequence[int]) -> Shape:
    return tuple(n - si for n, si in zip(nd.sizes, s))


def is_valid_shape(nd: NdPartition, s: Sequence[int]) -> bool:
    return len(s) == nd.k and all(0 <= si <= n for si, n in zip(s, nd.sizes))


def realize_shape(nd: NdPartition, s: Sequence[int]) -> list[int]:
    """The lowest-indexed set of shape ``s``."""
    if not is_valid_shape(nd, s):
        raise ValueError(f"invalid shape {tuple(s)} for class sizes {nd.sizes}")
    return sorted(v for cls, si in zip(nd.classes, s) for v in cls[:si])


def fair_vertex_cost(g: Graph, x: Iterable[int]) -> int:
    """``max_v |N(v) & X|`` over every vertex, deleted ones included."""
    xs = set(x)
    if not xs:
        return 0
    return max(len(g.neighbors[v] & xs) for v in range(g.n))


def fair_vertex_cost_of_shape(nd: NdPartition, s: Sequence[int]) -> int:
    """Fair cost of any set of shape ``s``.

    A vertex of class ``i`` sees every deleted vertex of each adjacent class
    ``j != i``; inside a clique class it sees the deleted classmates other
    than itself, i.e. ``s_i - 1`` when the whole class is deleted and ``s_i``
    otherwise (pick a surviving vertex).
    """
    best = 0
    adj = nd.class_adj
    for i in range(nd.k):
        if nd.clique[i]:
            total = s[i] - 1 if s[i] == nd.sizes[i] else s[i]
            total = max(total, 0)
        else:
            total = 0
        for j in range(nd.k):
            if j != i and adj[i, j]:
                total += s[j]
        best = max(best, total)
    return best


def uncorrected_shape_cost(nd: NdPartition, s: Sequence[int]) -> int:
    """``max_i (sum_{j ~ i} s_j - eta_i)`` with ``eta_i = 1`` on clique classes
    meeting the set; kept only to demonstrate where it undercounts."""
    best = 0
    for i in range(nd.k):
        total = sum(s[j] for j in range(nd.k) if nd.class_adj[i, j])
        if nd.clique[i] and s[i] > 0:
            total -= 1
        best = max(best, total)
    return best


def shape_costs(nd: NdPartition, shapes: np.ndarray) -> np.ndarray:
    """Vectorized :func:`fair_vertex_cost_of_shape` over rows of ``shapes``."""
    shapes = np.asarray(shapes, dtype=np.int64).reshape(-1, nd.k)
    if nd.k == 0:
        return np.zeros(len(shapes), dtype=np.int64)
    return _accel.shape_costs(shapes, nd.class_adj, np.array(nd.clique), np.array(nd.sizes))


def r_equivalent(nd: NdPartition, s: Sequence[int], t: Sequence[int], r: int) -> bool:
    for n, a, b in zip(nd.sizes, s, t):
        if a == b:
            continue
        if not (a > r and b > r and n - a > r and n - b > r):
            return False
    return True


def candidate_values(size: int, r: int) -> list[int]:
    """Minimal-cost member of every r-equivalence class of one coordinate."""
    if size <= 2 * r + 2:
        return list(range(size + 1))
    return list(range(r + 1)) + [r + 1] + list(range(size - r, size + 1))


def representative_of(nd: NdPartition, s: Sequence[int], r: int) -> Shape:
    """The enumerated representative r-equivalent to ``s``."""
    out = []
    for n, si in zip(nd.sizes, s):
        if si > r and n - si > r:
            out.append(r + 1)
        else:
            out.append(si)
    return tuple(out)


def count_representatives(nd: NdPartition, r: int) -> int:
    return math.prod(len(candidate_values(n, r)) for n in nd.sizes)


def enumerate_representatives(nd: NdPartition, r: int) -> Iterator[Shape]:
    """One minimal-cost shape per r-equivalence class, lexicographic order."""
    if r < 1:
        raise ValueError("r must be at least 1")
    yield from itertools.product(*(candidate_values(n, r) for n in nd.sizes))


def all_shapes(nd: NdPartition) -> Iterator[Shape]:
    yield from itertools.product(*(range(n + 1) for n in nd.sizes))


# --- signatures ----------------------------------------------------------------


class SignatureError(ValueError):
    pass


def fair_edge_cost(g: Graph, f: Iterable[tuple[int, int]]) -> int:
    """``max_v`` number of edges of ``F`` at ``v``."""
    load = [0] * g.n
    for u, v in f:
        if not g.has_edge(u, v):
            raise ValueError(f"({u}, {v}) is not an edge")
        load[u] += 1
        load[v] += 1
    return max(load, default=0)


def signature_of(g: Graph, cover: Sequence[int], f: Iterable[tuple[int, int]]) -> tuple[frozenset, ...]:
    pos = {c: i for i, c in enumerate(cover)}
    sig: list[set[int]] = [set() for _ in cover]
    for u, v in f:
        if not g.has_edge(u, v):
            raise SignatureError(f"({u}, {v}) is not an edge")
        hit = False
        if u in pos:
            sig[pos[u]].add(v)
            hit = True
        if v in pos:
            sig[pos[v]].add(u)
            hit = True
        if not hit:
            raise SignatureError(f"edge ({u}, {v}) avoids the cover")
    return tuple(frozenset(s) for s in sig)


def edges_of_signature(cover: Sequence[int], sig: Sequence[Iterable[int]]) -> frozenset:
    return frozenset((min(c, w), max(c, w)) for c, u in zip(cover, sig) for w in u)


@dataclass(frozen=True)
class SignatureShape:
    """Sparse table ``(class, mask) -> count`` with zero cells omitted.

    ``cells`` is sorted; cover vertices are singleton classes whose single
    nonzero cell records which cover neighbours they are joined to by ``F``.
    """

    cells: tuple[tuple[int, int, int], ...]

    @classmethod
    def from_dict(cls, table: dict[tuple[int, int], int]) -> "SignatureShape":
        return cls(tuple(sorted((j, m, c) for (j, m), c in table.items() if c)))

    def as_dict(self) -> dict[tuple[int, int], int]:
        return {(j, m): c for j, m, c in self.cells}

    def to_records(self) -> list[list[int]]:
        return [list(c) for c in self.cells]


@dataclass(frozen=True)
class CoverLayout:
    """Per-class feasibility data for signatures over a fixed cover."""

    nd: NdPartition  # refined: every cover vertex is a singleton class
    cover: tuple[int, ...]
    cover_class: tuple[int, ...]  # class index of each cover vertex
    allowed: tuple[int, ...]  # per class: mask of cover positions adjacent to it
    is_cover: tuple[bool, ...]
    cover_edges: tuple[tuple[int, int], ...]  # pairs of cover positions i < m

    @property
    def k(self) -> int:
        return len(self.cover)


def cover_layout(nd_refined: NdPartition, cover: Sequence[int]) -> CoverLayout:
    g = nd_refined.graph
    cover = tuple(cover)
    cls = nd_refined.class_of
    cover_class = tuple(cls[c] for c in cover)
    if any(nd_refined.sizes[j] != 1 for j in cover_class):
        raise SignatureError("cover vertices must be singleton classes; refine first")
    allowed = []
    for members in nd_refined.classes:
        w = members[0]
        allowed.append(sum(1 << i for i, c in enumerate(cover) if g.has_edge(w, c)))
    is_cover = tuple(j in set(cover_class) for j in range(nd_refined.k))
    cc = tuple(
        (i, m) for i, m in itertools.combinations(range(len(cover)), 2) if g.has_edge(cover[i], cover[m])
    )
    return CoverLayout(nd_refined, cover, cover_class, tuple(allowed), is_cover, cc)


def signature_shape(nd_refined: NdPartition, cover: Sequence[int], sig: Sequence[Iterable[int]]) -> SignatureShape:
    sets = [set(u) for u in sig]
    table: dict[tuple[int, int], int] = {}
    cls = nd_refined.class_of
    for w in range(nd_refined.graph.n):
        mask = sum(1 << i for i, u in enumerate(sets) if w in u)
        key = (cls[w], mask)
        table[key] = table.get(key, 0) + 1
    return SignatureShape.from_dict(table)


def check_signature_shape(layout: CoverLayout, s: SignatureShape) -> None:
    """Raise :class:`SignatureError` unless ``s`` satisfies the table invariants."""
    sums = [0] * layout.nd.k
    cover_masks = {}
    for j, mask, c in s.cells:
        if not 0 <= j < layout.nd.k or c < 0:
            raise SignatureError(f"bad cell ({j}, {mask})")
        if mask & ~layout.allowed[j]:
            raise SignatureError(f"cell ({j}, {mask:b}) uses a non-adjacent cover vertex")
        sums[j] += c
        if layout.is_cover[j]:
            cover_masks[j] = mask
    if tuple(sums) != layout.nd.sizes:
        raise SignatureError("cell counts do not partition the classes")
    for i, m in layout.cover_edges:
        a = cover_masks[layout.cover_class[m]] >> i & 1
        b = cover_masks[layout.cover_class[i]] >> m & 1
        if a != b:
            raise SignatureError("cover-cover membership is not symmetric")


def fair_edge_cost_of_signature_shape(
    nd_refined: NdPartition, cover: Sequence[int], s: SignatureShape, *, layout: CoverLayout | None = None
) -> int:
    """``max(max_i |U_i|, max |I| over nonzero non-cover cells)``."""
    layout = layout or cover_layout(nd_refined, cover)
    check_signature_shape(layout, s)
    loads = [0] * layout.k
    worst = 0
    for j, mask, c in s.cells:
        for i in range(layout.k):
            if mask >> i & 1:
                loads[i] += c
        if c and not layout.is_cover[j]:
            worst = max(worst, mask.bit_count())
    return max([worst, *loads])


def realize_signature(layout: CoverLayout, s: SignatureShape) -> tuple[tuple[frozenset, ...], frozenset]:
    """Lowest-indexed signature of shape ``s`` and its edge set.

    Members of each class are dealt to the class's cells in increasing mask
    order.
    """
    check_signature_shape(layout, s)
    sig: list[set[int]] = [set() for _ in layout.cover]
    by_class: dict[int, list[tuple[int, int]]] = {}
    for j, mask, c in s.cells:
        by_class.setdefault(j, []).append((mask, c))
    for j, cells in by_class.items():
        members = iter(layout.nd.classes[j])
        for mask, c in sorted(cells):
            for _ in range(c):
                w = next(members)
                for i in range(layout.k):
                    if mask >> i & 1:
                        sig[i].add(w)
    frozen = tuple(frozenset(u) for u in sig)
    return frozen, edges_of_signature(layout.cover, frozen)


def _submasks(mask: int) -> list[int]:
    out = []
    sub = mask
    while True:
        out.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & mask
    return sorted(out)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


def _cover_tables(layout: CoverLayout) -> Iterator[dict[tuple[int, int], int]]:
    """Cell entries of the cover singletons for every cover-cover edge subset."""
    cc = layout.cover_edges
    for chosen in itertools.product((0, 1), repeat=len(cc)):
        masks = [0] * layout.k
        for (i, m), bit in zip(cc, chosen):
            if bit:
                masks[i] |= 1 << m
                masks[m] |= 1 << i
        yield {(layout.cover_class[i], masks[i]): 1 for i in range(layout.k)}


def _free_classes(layout: CoverLayout) -> list[int]:
    return [j for j in range(layout.nd.k) if not layout.is_cover[j]]


def count_exact_signature_shapes(layout: CoverLayout) -> int:
    total = 2 ** len(layout.cover_edges)
    for j in _free_classes(layout):
        cells = 2 ** layout.allowed[j].bit_count()
        total *= math.comb(layout.nd.sizes[j] + cells - 1, cells - 1)
    return total


def enumerate_signature_shapes(layout: CoverLayout) -> Iterator[SignatureShape]:
    """Every signature shape, exactly once."""
    free = _free_classes(layout)
    per_class = []
    for j in free:
        cells = _submasks(layout.allowed[j])
        per_class.append(
            [{(j, m): c for m, c in zip(cells, comp) if c} for comp in _compositions(layout.nd.sizes[j], len(cells))]
        )
    for cover_part in _cover_tables(layout):
        for combo in itertools.product(*per_class):
            table = dict(cover_part)
            for part in combo:
                table.update(part)
            yield SignatureShape.from_dict(table)


LARGE = -1


def _class_patterns(size: int, cells: list[int], r: int) -> Iterator[tuple[int, ...]]:
    """Per-cell values in ``0..r`` or LARGE whose minimum realization fits ``size``."""
    def rec(i: int, left: int, any_large: bool) -> Iterator[tuple[int, ...]]:
        # ``left``: vertices not yet placed at their minimum realization
        if i == len(cells):
            if left == 0 or (any_large and left > 0):
                yield ()
            return
        for v in range(min(r, left) + 1):
            for tail in rec(i + 1, left - v, any_large):
                yield (v, *tail)
        if left >= r + 1:
            for tail in rec(i + 1, left - r - 1, True):
                yield (LARGE, *tail)

    yield from rec(0, size, False)


def count_signature_classes(layout: CoverLayout, r: int) -> int:
    total = 2 ** len(layout.cover_edges)
    for j in _free_classes(layout):
        cells = _submasks(layout.allowed[j])
        total *= sum(1 for _ in _class_patterns(layout.nd.sizes[j], cells, r))
    return total


def signature_class_bound(layout: CoverLayout, r: int) -> int:
    return (2 * r + 3) ** (layout.nd.k * 2 ** layout.k)


def enumerate_signature_representatives(layout: CoverLayout, r: int) -> Iterator[SignatureShape]:
    """One representative per signature r-equivalence class.

    Large cells start at ``r + 1``; the rest of each class is poured into its
    large cells one vertex at a time, each time into the cell whose cover
    vertices currently carry the least load (ties: fewer cover vertices, then
    the lower mask). Greedy; not proven to minimize the fair cost.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    free = _free_classes(layout)
    cells_of = {j: _submasks(layout.allowed[j]) for j in free}
    per_class = [list(_class_patterns(layout.nd.sizes[j], cells_of[j], r)) for j in free]
    k = layout.k
    for cover_part in _cover_tables(layout):
        for combo in itertools.product(*per_class):
            table = dict(cover_part)
            loads = [0] * k
            for (j, mask), c in cover_part.items():
                for i in range(k):
                    if mask >> i & 1:
                        loads[i] += c
            pending = []
            for j, pattern in zip(free, combo):
                rem = layout.nd.sizes[j]
                large = []
                for mask, v in zip(cells_of[j], pattern):
                    c = r + 1 if v == LARGE else v
                    if v == LARGE:
                        large.append(mask)
                    rem -= c
                    if c:
                        table[(j, mask)] = c
                        for i in range(k):
                            if mask >> i & 1:
                                loads[i] += c
                if rem:
                    pending.append((j, large, rem))
            for j, large, rem in pending:
                for _ in range(rem):
                    best = min(
                        large,
                        key=lambda m: (
                            max((loads[i] + 1 for i in range(k) if m >> i & 1), default=0),
                            m.bit_count(),
                            m,
                        ),
                    )
                    table[(j, best)] += 1
                    for i in range(k):
                        if best >> i & 1:
                            loads[i] += 1
            yield SignatureShape.from_dict(table)


def signature_r_equivalent(s: SignatureShape, t: SignatureShape, r: int) -> bool:
    a, b = s.as_dict(), t.as_dict()
    for key in set(a) | set(b):
        x, y = a.get(key, 0), b.get(key, 0)
        if x != y and not (x > r and y > r):
            return False
    return True
