import pytest

from conftest import named
from fairdel.graph import Graph, parse_graph
from fairdel.logic import parse_formula
from fairdel.logic.library import _Blocks
from fairdel.logic.parser import check_formula
from fairdel.logic.ast import Sort, Var
from fairdel.mc import eval_bruteforce
from fairdel.reductions import (
    expected_size,
    pad_source,
    reduce,
    reverse_search,
    size_audit,
    witness_cost,
    witness_from_coloring,
    write_instance,
)
from fairdel.solvers import equitable_3_coloring
from fairdel.tensor_eval import eval_tensor


def test_padding():
    assert pad_source(named("K3")).n == 6
    assert pad_source(Graph(7)).n == 9
    assert pad_source(named("K3"), parts=2, minimum=2).n == 4
    assert pad_source(named("K3")).edges == named("K3").edges


def test_vertex_sizes_k3():
    inst = reduce(named("K3"), "vertex")
    audit = size_audit(inst)
    assert audit["ok"]
    assert (inst.graph.n, inst.graph.m) == (63, 75)
    assert inst.graph.n == inst.n ** 2 + 4 * inst.n + 3
    assert audit["roles"] == {"original": 6, "class": 3, "selector": 18, "dangling": 36}
    assert inst.target == 2 and audit["padding"] == 3


def test_edge_sizes_k3():
    inst = reduce(named("K3"), "edge")
    assert size_audit(inst)["ok"]
    assert (inst.graph.n, inst.graph.m) == (27, 3 + 18 + 18)
    assert inst.dangling_per_original == 3 and inst.target == 2


@pytest.mark.parametrize("name", ["K3", "C6", "K33", "P4", "star3"])
@pytest.mark.parametrize("variant", ["vertex", "edge"])
def test_size_audit(name, variant):
    inst = reduce(named(name), variant)
    assert size_audit(inst)["ok"]
    assert (inst.graph.n, inst.graph.m) == expected_size(inst)


def test_eqcp_sizes():
    inst = reduce(named("C6"), "eqcp", parts=3)
    assert size_audit(inst)["ok"]
    assert len(inst.class_vertices) == 3 and inst.target == 2
    inst = reduce(named("C6"), "eqcp", parts=6)
    assert inst.target == 1


def test_eqcp_rejects_one_part():
    with pytest.raises(ValueError):
        reduce(named("C6"), "eqcp", parts=1)


def test_unknown_variant():
    with pytest.raises(ValueError):
        reduce(named("K3"), "bogus")


def test_layout_helpers():
    inst = reduce(named("K3"), "vertex")
    assert inst.labels[inst.selector(2, 1)] == "selector"
    assert set(inst.graph.neighbors[inst.selector(2, 1)]) == {2, inst.n + 1}
    assert all(inst.labels[w] == "dangling" for w in inst.dangling_of(4))
    assert inst.back_map()[1] == 1 and inst.back_map()[4] is None
    with pytest.raises(ValueError):
        reduce(named("K3"), "edge").selector(0, 0)


@pytest.mark.parametrize("name", ["K3", "C6"])
def test_vertex_forward(name):
    inst = reduce(named(name), "vertex")
    coloring = equitable_3_coloring(inst.source)
    assert coloring is not None
    w = witness_from_coloring(inst, coloring)
    assert len(w) == inst.n
    assert witness_cost(inst, w) == inst.target == inst.n // 3
    assert eval_tensor(inst.graph.delete_vertices(w), inst.formula)


def test_vertex_forward_bruteforce_k3():
    inst = reduce(named("K3"), "vertex")
    w = witness_from_coloring(inst, equitable_3_coloring(inst.source))
    assert eval_bruteforce(inst.graph.delete_vertices(w), inst.formula)


@pytest.mark.parametrize("name", ["K3", "C6"])
def test_edge_forward(name):
    inst = reduce(named(name), "edge")
    coloring = equitable_3_coloring(inst.source)
    f = witness_from_coloring(inst, coloring)
    assert all(inst.graph.has_edge(u, v) for u, v in f)
    assert witness_cost(inst, f) == inst.target
    assert eval_tensor(inst.graph.delete_edges(f), inst.formula)


def test_wrong_color_class_breaks_the_formula():
    inst = reduce(named("K3"), "vertex")
    c = equitable_3_coloring(inst.source)
    w = witness_from_coloring(inst, c)
    # move vertex 0 onto vertex 1's class vertex: now two triangle vertices share a class
    bad = sorted(set(w) - {inst.selector(0, c[0])} | {inst.selector(0, c[1])})
    assert not eval_tensor(inst.graph.delete_vertices(bad), inst.formula)


def test_bad_coloring_raises():
    inst = reduce(named("K3"), "vertex")
    with pytest.raises(ValueError):
        witness_from_coloring(inst, [0, 0, 1, 1, 2, 2])
    with pytest.raises(ValueError):
        witness_from_coloring(inst, [0, 1, 2, 0, 0, 1])


def test_eqcp_forward():
    """Equitable partition of P6 into two paths.

    The whole ``eq_conn`` sentence quantifies over sets of a 56-vertex graph,
    beyond both evaluators; its parts are checked separately instead.
    """
    src = Graph.from_edges(6, [(i, i + 1) for i in range(5)])
    inst = reduce(src, "eqcp", parts=2)
    assert size_audit(inst)["padding"] == 0
    parts = [0, 0, 0, 1, 1, 1]
    w = witness_from_coloring(inst, parts)
    assert witness_cost(inst, w) == inst.target == 3
    h = inst.graph.delete_vertices(w)
    blocks = _Blocks()
    assert eval_tensor(h, check_formula(blocks.valid_deletion()))
    class_set = check_formula(blocks.class_set("W"), (Var("W", Sort.VERTEX_SET),))
    for c in range(2):
        members = [v for v in range(6) if parts[v] == c]
        assert eval_tensor(h, class_set, {"W": members})
        sub, _ = h.induced(members)
        conn = check_formula(blocks.connected("W"), (Var("W", Sort.VERTEX_SET),))
        assert eval_bruteforce(sub, conn, {"W": list(range(sub.n))})
    assert not eval_tensor(h, class_set, {"W": [0, 1, 2, 3]})
    assert not eval_tensor(h, class_set, {"W": [0, 1]})


def test_eqcp_requires_connected_parts():
    src = Graph.from_edges(6, [(i, i + 1) for i in range(5)])
    inst = reduce(src, "eqcp", parts=2)
    with pytest.raises(ValueError):
        witness_from_coloring(inst, [0, 1, 0, 1, 0, 1])


def test_eqcp_gadget_is_well_formed_on_tiny_sources():
    """Class vertices must keep at least three neighbours after deletion."""
    inst = reduce(Graph.from_edges(2, [(0, 1)]), "eqcp", parts=2)
    assert inst.n - inst.n // inst.parts >= 3


def test_write_instance(tmp_path):
    inst = reduce(named("K3"), "vertex")
    paths = write_instance(inst, tmp_path, "k3")
    assert sorted(p.name for p in paths.values()) == ["k3.formula", "k3.graph", "k3.labels", "k3.target"]
    assert parse_graph(paths["graph"].read_text()) == inst.graph
    assert parse_formula(paths["formula"].read_text()) == inst.formula
    assert paths["target"].read_text().strip() == "2"
    labels = paths["labels"].read_text().splitlines()
    assert len(labels) == 63 and labels[6] == "6 class"


def test_reverse_search_finds_k3_witness():
    inst = reduce(named("K3"), "vertex")
    res = reverse_search(inst, time_limit=600)
    assert res.found
    assert witness_cost(inst, res.witness) <= inst.target
    assert eval_bruteforce(inst.graph.delete_vertices(res.witness), inst.formula)


def test_reverse_search_time_limit():
    with pytest.raises(TimeoutError):
        reverse_search(reduce(named("K4"), "vertex"), time_limit=0.0)


def test_reverse_search_vertex_only():
    with pytest.raises(ValueError):
        reverse_search(reduce(named("K3"), "edge"))
