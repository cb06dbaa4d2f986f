import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import atlas, graphs, named, random_graph
from fairdel.graph import Graph, min_vertex_cover, nd_partition, refine_for_cover
from fairdel.shapes import (
    LARGE,
    SignatureError,
    SignatureShape,
    all_shapes,
    candidate_values,
    check_signature_shape,
    complement_shape,
    count_exact_signature_shapes,
    count_representatives,
    count_signature_classes,
    cover_layout,
    enumerate_representatives,
    enumerate_signature_representatives,
    enumerate_signature_shapes,
    fair_edge_cost,
    fair_edge_cost_of_signature_shape,
    fair_vertex_cost,
    fair_vertex_cost_of_shape,
    r_equivalent,
    realize_shape,
    realize_signature,
    representative_of,
    shape_costs,
    shape_of,
    signature_class_bound,
    signature_of,
    signature_r_equivalent,
    signature_shape,
    uncorrected_shape_cost,
)


def classes_graph() -> Graph:
    """Classes of sizes 1, 5 and 12: a star's centre and leaves, plus K12."""
    edges = [(0, i) for i in range(1, 6)]
    edges += list(itertools.combinations(range(6, 18), 2))
    return Graph.from_edges(18, edges)


# --- vertex shapes ---------------------------------------------------------------


def test_shape_of_examples():
    nd = nd_partition(named("K33"))
    assert shape_of(nd, [0, 3, 4]) == (1, 2)
    assert shape_of(nd, []) == (0, 0)
    assert complement_shape(nd, (1, 2)) == (2, 1)


def test_realize_lowest_indexed():
    nd = nd_partition(named("K33"))
    assert realize_shape(nd, (1, 2)) == [0, 3, 4]
    with pytest.raises(ValueError):
        realize_shape(nd, (4, 0))


def test_vertex_cost_examples():
    assert fair_vertex_cost(named("star3"), [0]) == 1
    assert fair_vertex_cost(named("star3"), [1, 2, 3]) == 3
    assert fair_vertex_cost(named("K4"), [0, 1, 2, 3]) == 3
    assert fair_vertex_cost(named("C4"), []) == 0


def test_clique_correction_k3():
    """Deleting one triangle vertex: the survivors each see it."""
    nd = nd_partition(named("K3"))
    assert fair_vertex_cost(named("K3"), [0]) == 1
    assert fair_vertex_cost_of_shape(nd, (1,)) == 1
    assert uncorrected_shape_cost(nd, (1,)) == 0


def test_shape_cost_matches_definition_random():
    rng = random.Random(5)
    for _ in range(500):
        g = random_graph(rng, rng.randint(1, 12), rng.random())
        nd = nd_partition(g)
        x = [v for v in range(g.n) if rng.random() < rng.random()]
        s = shape_of(nd, x)
        assert fair_vertex_cost_of_shape(nd, s) == fair_vertex_cost(g, x)


def test_shape_cost_matches_definition_atlas():
    for g in atlas(5):
        nd = nd_partition(g)
        shapes = list(all_shapes(nd))
        vec = shape_costs(nd, np.array(shapes))
        for s, c in zip(shapes, vec):
            assert c == fair_vertex_cost_of_shape(nd, s) == fair_vertex_cost(g, realize_shape(nd, s))


@settings(max_examples=150, deadline=None)
@given(graphs(min_n=1, max_n=9), st.randoms(use_true_random=False))
def test_shape_cost_is_monotone(g, rng):
    nd = nd_partition(g)
    s = tuple(rng.randint(0, n) for n in nd.sizes)
    t = tuple(rng.randint(si, n) for si, n in zip(s, nd.sizes))
    assert fair_vertex_cost_of_shape(nd, s) <= fair_vertex_cost_of_shape(nd, t)


@settings(max_examples=100)
@given(graphs(min_n=1, max_n=9), st.randoms(use_true_random=False))
def test_complement_is_involution(g, rng):
    nd = nd_partition(g)
    s = tuple(rng.randint(0, n) for n in nd.sizes)
    assert complement_shape(nd, complement_shape(nd, s)) == s


# --- representatives -------------------------------------------------------------


def test_representative_count_example():
    nd = nd_partition(classes_graph())
    assert nd.sizes == (1, 5, 12)
    assert count_representatives(nd, 2) == 84
    reps = list(enumerate_representatives(nd, 2))
    assert len(reps) == len(set(reps)) == 84
    assert len(reps) <= (2 * 2 + 3) ** 3


def test_candidate_values():
    assert candidate_values(12, 2) == [0, 1, 2, 3, 10, 11, 12]
    assert candidate_values(6, 2) == list(range(7))


def test_small_classes_enumerate_everything():
    for g in atlas(5):
        nd = nd_partition(g)
        assert sorted(enumerate_representatives(nd, 3)) == sorted(all_shapes(nd))


def test_rejects_r_zero():
    with pytest.raises(ValueError):
        next(enumerate_representatives(nd_partition(named("K3")), 0))


@pytest.mark.parametrize("r", [1, 2])
def test_every_shape_has_one_cheapest_representative(r):
    nd = nd_partition(classes_graph())
    reps = set(enumerate_representatives(nd, r))
    best: dict = {}
    for s in all_shapes(nd):
        matches = [t for t in reps if r_equivalent(nd, s, t, r)]
        assert matches == [representative_of(nd, s, r)]
        c = fair_vertex_cost_of_shape(nd, s)
        best[matches[0]] = min(best.get(matches[0], c), c)
    assert set(best) == reps
    for t, c in best.items():
        assert fair_vertex_cost_of_shape(nd, t) == c


# --- signatures --------------------------------------------------------------------


def test_signature_examples():
    g = named("K33")
    cover = [0, 1, 2]
    f = [(0, 3), (0, 4), (0, 5)]
    sig = signature_of(g, cover, f)
    assert sig == (frozenset({3, 4, 5}), frozenset(), frozenset())
    assert fair_edge_cost(g, f) == 3
    nd = refine_for_cover(nd_partition(g), cover)
    s = signature_shape(nd, cover, sig)
    assert s.as_dict() == {(0, 0): 1, (1, 0): 1, (2, 0): 1, (3, 1): 3}
    assert fair_edge_cost_of_signature_shape(nd, cover, s) == 3


def test_signature_errors():
    g = named("P4")
    with pytest.raises(SignatureError):
        signature_of(g, [1, 2], [(0, 2)])
    with pytest.raises(SignatureError):
        signature_of(named("C4"), [1], [(2, 3)])


def test_signature_shape_invariants():
    g = named("star3")
    nd = refine_for_cover(nd_partition(g), [0])
    layout = cover_layout(nd, [0])
    with pytest.raises(SignatureError):
        check_signature_shape(layout, SignatureShape.from_dict({(0, 0): 1, (1, 1): 2}))
    with pytest.raises(SignatureError):
        check_signature_shape(layout, SignatureShape.from_dict({(0, 1): 1, (1, 1): 3}))


def test_layout_requires_refinement():
    g = named("K33")
    with pytest.raises(SignatureError):
        cover_layout(nd_partition(g), [0, 1, 2])


def _random_edge_case(rng, max_n=12):
    g = random_graph(rng, rng.randint(1, max_n), rng.random())
    cover = min_vertex_cover(g).cover
    f = [e for e in g.edge_list if rng.random() < rng.random()]
    return g, cover, f


def test_edge_cost_matches_definition_random():
    rng = random.Random(17)
    for _ in range(500):
        g, cover, f = _random_edge_case(rng)
        nd = refine_for_cover(nd_partition(g), cover)
        s = signature_shape(nd, cover, signature_of(g, cover, f))
        assert fair_edge_cost_of_signature_shape(nd, cover, s) == fair_edge_cost(g, f)


def test_realize_signature_round_trip():
    rng = random.Random(23)
    for _ in range(200):
        g, cover, f = _random_edge_case(rng, 9)
        nd = refine_for_cover(nd_partition(g), cover)
        layout = cover_layout(nd, cover)
        s = signature_shape(nd, cover, signature_of(g, cover, f))
        sig, edges = realize_signature(layout, s)
        assert signature_shape(nd, cover, sig) == s
        assert all(g.has_edge(u, v) for u, v in edges)
        assert fair_edge_cost(g, edges) == fair_edge_cost_of_signature_shape(nd, cover, s)


def _exact_layouts():
    rng = random.Random(31)
    out = []
    while len(out) < 40:
        g = random_graph(rng, rng.randint(1, 6), rng.random())
        cover = min_vertex_cover(g).cover
        if len(cover) > 3:
            continue
        nd = refine_for_cover(nd_partition(g), cover)
        out.append((g, cover, cover_layout(nd, cover)))
    return out


def test_exact_enumeration_covers_every_edge_set():
    for g, cover, layout in _exact_layouts():
        shapes = list(enumerate_signature_shapes(layout))
        assert len(shapes) == len(set(shapes)) == count_exact_signature_shapes(layout)
        seen = set()
        for k in range(g.m + 1):
            for f in itertools.combinations(g.edge_list, k):
                seen.add(signature_shape(layout.nd, cover, signature_of(g, cover, f)))
        assert seen == set(shapes)


def _class_key(s: SignatureShape, r: int):
    return tuple((j, m, c if c <= r else LARGE) for j, m, c in s.cells)


def _blown_up(rng):
    """A random graph whose non-cover twin classes grow large."""
    base = random_graph(rng, rng.randint(2, 4), 0.6)
    cover = min_vertex_cover(base).cover
    rest = [v for v in range(base.n) if v not in cover]
    sizes = {v: rng.randint(1, 5) for v in rest}
    ids = {v: [v] for v in cover}
    nxt = base.n
    for v in rest:
        ids[v] = [v] + list(range(nxt, nxt + sizes[v] - 1))
        nxt += sizes[v] - 1
    edges = [(a, b) for u, w in base.edge_list for a in ids[u] for b in ids[w]]
    return Graph.from_edges(nxt, edges)


@pytest.mark.parametrize("r", [1, 2])
def test_signature_representatives_classify_and_are_cheapest(r):
    """One representative per class; its cost is the class minimum."""
    rng = random.Random(40 + r)
    checked = 0
    while checked < 25:
        g = _blown_up(rng)
        cover = min_vertex_cover(g).cover
        nd = refine_for_cover(nd_partition(g), cover)
        layout = cover_layout(nd, cover)
        if count_exact_signature_shapes(layout) > 20_000:
            continue
        checked += 1
        reps = list(enumerate_signature_representatives(layout, r))
        assert len(reps) == count_signature_classes(layout, r) <= signature_class_bound(layout, r)
        by_key = {_class_key(t, r): t for t in reps}
        assert len(by_key) == len(reps)
        best: dict = {}
        for s in enumerate_signature_shapes(layout):
            key = _class_key(s, r)
            t = by_key[key]
            assert signature_r_equivalent(s, t, r)
            c = fair_edge_cost_of_signature_shape(nd, cover, s, layout=layout)
            best[key] = min(best.get(key, c), c)
        assert set(best) == set(by_key)
        for key, t in by_key.items():
            assert fair_edge_cost_of_signature_shape(nd, cover, t, layout=layout) == best[key]


def test_signature_representatives_reject_r_zero():
    g = named("star3")
    nd = refine_for_cover(nd_partition(g), [0])
    with pytest.raises(ValueError):
        next(enumerate_signature_representatives(cover_layout(nd, [0]), 0))
