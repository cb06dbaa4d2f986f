import itertools
import random

import networkx as nx
import pytest
from hypothesis import strategies as st

from fairdel.graph import Graph
from fairdel.logic import parse_formula


def to_graph(G) -> Graph:
    return Graph.from_edges(G.number_of_nodes(), G.edges())


def atlas(max_n: int, min_n: int = 1) -> list[Graph]:
    """All graphs up to isomorphism on ``min_n..max_n`` vertices."""
    return [to_graph(G) for G in nx.graph_atlas_g() if min_n <= G.number_of_nodes() <= max_n]


def random_graph(rng: random.Random, n: int, p: float = 0.5) -> Graph:
    return Graph.from_edges(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < p])


def named(name: str) -> Graph:
    n, edges = NAMED[name]
    return Graph.from_edges(n, edges)


NAMED = {
    "K1": (1, []),
    "K2": (2, [(0, 1)]),
    "P3": (3, [(0, 1), (1, 2)]),
    "K3": (3, [(0, 1), (1, 2), (0, 2)]),
    "P4": (4, [(0, 1), (1, 2), (2, 3)]),
    "C4": (4, [(0, 1), (1, 2), (2, 3), (0, 3)]),
    "K4": (4, list(itertools.combinations(range(4), 2))),
    "star3": (4, [(0, 1), (0, 2), (0, 3)]),
    "C6": (6, [(i, (i + 1) % 6) for i in range(6)]),
    "K33": (6, [(a, b) for a in range(3) for b in range(3, 6)]),
}


@st.composite
def graphs(draw, min_n: int = 0, max_n: int = 7):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, chosen)


# formula corpora shared by the oracle tests: (mode, text)
VERTEX_CORPUS = {
    "edgeless": ("plain", "Ax. Ay. ~adj(x,y)"),
    "maxdeg1": ("plain", "Ax. Ay. Az. (adj(x,y) & adj(x,z)) -> y = z"),
    "dominating": ("generalized", "free: W^VS\nAx. x in W | (Ey. adj(x,y) & y in W)"),
    "independent": ("generalized", "free: W^VS\nAx. Ay. (x in W & y in W) -> ~adj(x,y)"),
    "connected": ("plain", "AS. ((Ex. x in S) & (Ey. ~(y in S))) -> (Eu. Ev. u in S & ~(v in S) & adj(u,v))"),
    "true": ("plain", "true"),
}

EDGE_CORPUS = {
    "maxdeg1": ("plain", "Ax. Ay. Az. (adj(x,y) & adj(x,z)) -> y = z"),
    "edge_cover": ("generalized", "free: F^ES\nAv. Ee^E. e in F & inc(v,e)"),
    "perfect_matching": ("generalized", "free: F^ES\nAv. E=1 e^E. e in F & inc(v,e)"),
    "connected_maxdeg2": (
        "plain",
        "(AS. ((Ex. x in S) & (Ey. ~(y in S))) -> (Eu. Ev. u in S & ~(v in S) & adj(u,v)))"
        " & (Ax. Ay. Az. Aw. (adj(x,y) & adj(x,z) & adj(x,w)) -> (y = z | y = w | z = w))",
    ),
}

# generalized-mode formulas with one free vertex set, for model-checking tests
SET_FORMULAS = {
    "dominating": "free: W^VS\nAx. x in W | (Ey. adj(x,y) & y in W)",
    "independent": "free: W^VS\nAx. Ay. (x in W & y in W) -> ~adj(x,y)",
    "connected_set": "free: W^VS\nAS. ((Ex. x in S) & (Ax. x in S -> x in W) & (Ey. y in W & ~(y in S))) -> (Eu. Ev. u in S & v in W & ~(v in S) & adj(u,v))",
    "two_outside": "free: W^VS\nE=2 x. ~(x in W)",
    "nonempty": "free: W^VS\nEx. x in W",
    "true": "free: W^VS\ntrue",
}


def formula(text: str):
    return parse_formula(text)


@pytest.fixture(scope="session")
def small_atlas():
    return atlas(6)


# --- acceptance summary ------------------------------------------------------------

_CRITERIA: dict[int, list[str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or report.outcome != "passed":
        num = int(report.nodeid.split("test_criterion_")[1].split("_")[0])
        _CRITERIA.setdefault(num, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        outcomes = _CRITERIA[num]
        if all(o == "passed" for o in outcomes):
            verdict = "PASS"
        elif all(o == "skipped" for o in outcomes):
            verdict = "SKIP"
        else:
            verdict = "FAIL"
        terminalreporter.write_line(f"criterion {num}: {verdict} ({len(outcomes)} check(s))")
