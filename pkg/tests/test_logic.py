import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import EDGE_CORPUS, SET_FORMULAS, VERTEX_CORPUS, atlas, named, random_graph
from fairdel.graph import min_vertex_cover
from fairdel.logic import (
    Dialect,
    FormulaSortError,
    FormulaSyntaxError,
    TranslationError,
    compute_r,
    desugar_counting,
    format_formula,
    formula_library,
    mso2_to_mso1,
    parse_formula,
    quantifier_counts,
)
from fairdel.logic.ast import Count, walk
from fairdel.mc import eval_bruteforce
from fairdel.shapes import signature_of

# --- parsing -----------------------------------------------------------------


def test_parse_fo():
    f = parse_formula("Ax. Ey. adj(x,y)")
    assert f.dialect is Dialect.FO
    assert quantifier_counts(f) == (2, 0)


def test_parse_mso1():
    f = parse_formula("ES. Ax. (x in S)")
    assert f.dialect is Dialect.MSO1
    assert quantifier_counts(f) == (1, 1)


def test_parse_mso2():
    f = parse_formula("A e^E. Ev. inc(v,e)")
    assert f.dialect is Dialect.MSO2


def test_counts_with_set():
    assert quantifier_counts(parse_formula("ES. Ax. Ey. (y in S & adj(x,y))")) == (2, 1)


def test_free_header():
    f = parse_formula("# comment\nfree: W^VS, x\nx in W")
    assert [v.name for v in f.free] == ["W", "x"]
    assert f.dialect is Dialect.FO


@pytest.mark.parametrize(
    "text",
    ["Ax. adj(x", "Ax adj(x,x)", "adj(x,y) &", "", "x ? y", "E=x y. true"],
)
def test_syntax_errors(text):
    with pytest.raises(FormulaSyntaxError):
        parse_formula(text)


def test_syntax_error_position():
    with pytest.raises(FormulaSyntaxError) as err:
        parse_formula("Ax. adj(x,x) & @")
    assert err.value.pos == 15


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("Ax. adj(x,y)", "unbound variable 'y' not declared free"),
        ("AS. adj(S,S)", "adj expects vertex terms"),
        ("Ax. Ay. inc(x,y)", "inc expects an edge"),
        ("Ax. AS. x = S", "cannot compare"),
        ("Ae^E. Ax. e in x", "not a set variable"),
        ("Ae^E. AS. e in S", "cannot be a member"),
    ],
)
def test_sort_errors(text, fragment):
    with pytest.raises(FormulaSortError, match=fragment):
        parse_formula(text)


def test_counting_only_over_elements():
    with pytest.raises(FormulaSortError):
        parse_formula("E=1 S. true")


def test_precedence():
    f = parse_formula("Ax. Ay. adj(x,y) | x = y & ~adj(y,x) -> true <-> false")
    assert format_formula(f) == "Ax. Ay. adj(x,y) | x = y & ~adj(y,x) -> true <-> false"
    g = parse_formula("Ax. Ay. (adj(x,y) | x = y) & adj(y,x)")
    assert format_formula(g) == "Ax. Ay. (adj(x,y) | x = y) & adj(y,x)"


def all_corpus_texts():
    texts = [t for _, t in VERTEX_CORPUS.values()] + [t for _, t in EDGE_CORPUS.values()]
    return texts + list(SET_FORMULAS.values())


@pytest.mark.parametrize("text", all_corpus_texts())
def test_round_trip(text):
    f = parse_formula(text)
    assert parse_formula(format_formula(f)) == f


@pytest.mark.parametrize("name", ["eq_3_col_vertex", "eq_3_col_edge", "eq_conn", "connected_set"])
def test_library_round_trip(name):
    f = formula_library(name)
    assert parse_formula(format_formula(f)) == f


# --- counting quantifiers ------------------------------------------------------


def test_exactly_one_expansion():
    f = desugar_counting(parse_formula("free: v\nE=1 w. adj(v,w)"))
    assert not any(isinstance(n, Count) for n in walk(f.root))
    assert quantifier_counts(f) == (2, 0)


def test_exactly_two_adds_three_quantifiers():
    assert quantifier_counts(parse_formula("free: v\nE=2 w. adj(v,w)")) == (3, 0)


def test_exactly_zero_is_universal():
    f = desugar_counting(parse_formula("free: v\nE=0 w. adj(v,w)"))
    assert format_formula(f).splitlines()[-1].startswith("Aw")


def test_negative_count_rejected():
    with pytest.raises(FormulaSyntaxError):
        parse_formula("E=-1 x. true")


COUNT_TEMPLATES = [
    "Ax. E{op}{k} y. adj(x,y)",
    "E{op}{k} x. Ey. adj(x,y)",
    "Ex. E{op}{k} y. (adj(x,y) | x = y)",
    "E{op}{k} x. (E{op}{k} y. adj(x,y))",
]


def test_desugaring_preserves_semantics():
    graphs = atlas(5)
    for template, op, k in itertools.product(COUNT_TEMPLATES, ("=", "<="), range(4)):
        f = parse_formula(template.format(op=op, k=k))
        d = desugar_counting(f)
        for g in graphs:
            assert eval_bruteforce(g, f) == eval_bruteforce(g, d), (template, op, k, g)


def test_desugared_eq3col_golden_count():
    assert quantifier_counts(formula_library("eq_3_col_vertex")) == (73, 0)


# --- r -----------------------------------------------------------------------


@pytest.mark.parametrize("q, r", [((2, 1), 4), ((3, 0), 3), ((0, 2), 1), ((0, 0), 1)])
def test_compute_r(q, r):
    assert compute_r(*q) == r


def test_set_only_formulas_need_r_one():
    """r is clamped to 1 for set-only formulas; the shape check agrees with
    brute force on every small graph."""
    from fairdel.graph import nd_partition
    from fairdel.mc import check_shape
    from fairdel.shapes import all_shapes, realize_shape

    f = parse_formula("free: W^VS\nES. AT. (ES. true)")
    assert quantifier_counts(f) == (0, 3) and compute_r(0, 3) == 1
    for g in atlas(5):
        nd = nd_partition(g)
        for s in all_shapes(nd):
            assert check_shape(g, nd, f, s, r=1) == eval_bruteforce(g, f, {"W": realize_shape(nd, s)})


# --- library ---------------------------------------------------------------------


def test_library_dialects():
    assert formula_library("eq_3_col_vertex").dialect is Dialect.FO
    assert formula_library("eq_3_col_edge").dialect is Dialect.FO
    assert formula_library("eq_conn").dialect is Dialect.MSO1
    assert formula_library("connected_set").free[0].name == "W"


def test_library_unknown():
    with pytest.raises(KeyError):
        formula_library("eq_4_col")


def test_connected_set_examples():
    f = formula_library("connected_set")
    p4 = named("P4")
    assert eval_bruteforce(p4, f, {"W": [2]})
    assert eval_bruteforce(p4, f, {"W": [0, 1, 2]})
    assert not eval_bruteforce(p4, f, {"W": [0, 2]})


def test_verbatim_edge_class_block_differs():
    patched = formula_library("eq_3_col_edge")
    verbatim = formula_library("eq_3_col_edge", verbatim=True)
    assert quantifier_counts(verbatim)[0] < quantifier_counts(patched)[0]


# --- MSO2 -> MSO1 ------------------------------------------------------------------


def test_translation_identity_without_edges():
    f = parse_formula(SET_FORMULAS["dominating"])
    assert mso2_to_mso1(f, 2) is f


def test_translation_errors():
    with pytest.raises(TranslationError):
        mso2_to_mso1(parse_formula("free: F^ES, G^ES\ntrue"), 1)
    with pytest.raises(TranslationError):
        mso2_to_mso1(parse_formula("free: e^E\nEv. inc(v,e)"), 1)
    with pytest.raises(TranslationError):
        mso2_to_mso1(parse_formula("free: F^ES\ntrue"), 1, deletion=True)


def test_translation_star():
    """Every vertex touches F, over a star: the centre or a member of U1."""
    f = parse_formula(EDGE_CORPUS["edge_cover"][1])
    t = mso2_to_mso1(f, 1)
    assert t.dialect is Dialect.FO
    assert [v.name for v in t.free] == ["c1", "U1"]
    star = named("star3")
    for k in range(4):
        for leaves in itertools.combinations([1, 2, 3], k):
            F = [(0, w) for w in leaves]
            assert eval_bruteforce(star, f, {"F": F}) == eval_bruteforce(star, t, {"c1": 0, "U1": list(leaves)})
            assert eval_bruteforce(star, f, {"F": F}) == (k == 3)


TRANSLATION_FORMULAS = [
    EDGE_CORPUS["edge_cover"][1],
    EDGE_CORPUS["perfect_matching"][1],
    "free: F^ES\nAe^E. e in F -> (Ax. inc(x,e) -> Ey. adj(x,y))",
    "free: F^ES\nEe^E. Ef^E. ~(e = f) & e in F & f in F",
    "free: F^ES\nEG^ES. (Ae^E. e in G -> e in F) & (Ae^E. e in F -> e in G)",
    "free: F^ES\nEG^ES. Ae^E. (e in G <-> ~(e in F))",
]


def _random_case(rng: random.Random, max_n: int = 5):
    g = random_graph(rng, rng.randint(1, max_n), rng.random())
    cover = min_vertex_cover(g).cover
    F = [e for e in g.edge_list if rng.random() < 0.5]
    return g, cover, F


@pytest.mark.parametrize("text", TRANSLATION_FORMULAS)
def test_translation_generalized(text):
    f = parse_formula(text)
    rng = random.Random(hash(text) % 1000)
    for _ in range(40):
        g, cover, F = _random_case(rng, 4 if "G^ES" in text else 5)
        t = mso2_to_mso1(f, len(cover))
        sig = signature_of(g, cover, F)
        a = {**{f"c{i + 1}": c for i, c in enumerate(cover)}, **{f"U{i + 1}": sorted(u) for i, u in enumerate(sig)}}
        assert eval_bruteforce(g, f, {"F": F}) == eval_bruteforce(g, t, a)


@pytest.mark.parametrize(
    "text",
    [EDGE_CORPUS["maxdeg1"][1], EDGE_CORPUS["connected_maxdeg2"][1], "Ae^E. Ev. inc(v,e)", "EG^ES. Ae^E. e in G"],
)
def test_translation_deletion(text):
    f = parse_formula(text)
    rng = random.Random(7)
    for _ in range(40):
        g, cover, F = _random_case(rng, 4 if "G^ES" in text else 5)
        t = mso2_to_mso1(f, len(cover), deletion=True)
        sig = signature_of(g, cover, F)
        a = {**{f"c{i + 1}": c for i, c in enumerate(cover)}, **{f"U{i + 1}": sorted(u) for i, u in enumerate(sig)}}
        assert eval_bruteforce(g.delete_edges(F), f) == eval_bruteforce(g, t, a)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_translation_avoids_name_clashes(seed):
    """Bound variables named like the cover variables stay distinct."""
    f = parse_formula("free: F^ES\nAc1. EU1. (c1 in U1) & (Ee^E. e in F & inc(c1,e) | ~(Ey. adj(c1,y)) | Ae^E. ~(e in F))")
    rng = random.Random(seed)
    g, cover, F = _random_case(rng, 4)
    t = mso2_to_mso1(f, len(cover))
    assert all(v.name not in ("c1", "U1") for v in t.free)
    sig = signature_of(g, cover, F)
    a = {**{v.name: c for v, c in zip(t.free, cover)}, **{v.name: sorted(u) for v, u in zip(t.free[len(cover):], sig)}}
    assert eval_bruteforce(g, f, {"F": F}) == eval_bruteforce(g, t, a)
