"""Compare the numba and numpy fair-cost kernels.

    python3 benchmarks/bench_kernels.py [--n 16] [--repeat 5]

Runs each kernel once to warm up (numba compiles on first call), then
reports the best of ``--repeat`` timings and checks both paths agree.
"""

import argparse
import itertools
import time

import numpy as np

from fairdel import _accel
from fairdel.graph import Graph, nd_partition


def best_time(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def random_graph(n, p, rng):
    return Graph.from_edges(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < p])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=16, help="vertices; all 2^n vertex sets are costed")
    ap.add_argument("--m", type=int, default=16, help="edges; all 2^m edge sets are costed")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    g = random_graph(args.n, 0.4, rng)
    vmasks = np.arange(1 << args.n, dtype=np.uint64)
    edges = list(itertools.combinations(range(args.n), 2))
    pick = rng.choice(len(edges), size=min(args.m, len(edges)), replace=False)
    ge = Graph.from_edges(args.n, [edges[i] for i in pick])
    emasks = np.arange(1 << ge.m, dtype=np.uint64)

    nd = nd_partition(random_graph(40, 0.5, rng))
    sizes = np.array(nd.sizes)
    shapes = np.array(list(itertools.islice(itertools.product(*(range(s + 1) for s in nd.sizes)), 200_000)))

    cases = [
        ("vertex sets", lambda: _accel.set_costs_numpy(vmasks, g.adjacency),
         lambda: _accel.set_costs(vmasks, g.adjacency), len(vmasks)),
        ("edge sets", lambda: _accel.edge_set_costs_numpy(emasks, ge.incidence),
         lambda: _accel.edge_set_costs(emasks, ge.incidence), len(emasks)),
        ("shapes", lambda: _accel.shape_costs_numpy(shapes, nd.class_adj, np.array(nd.clique), sizes),
         lambda: _accel.shape_costs(shapes, nd.class_adj, np.array(nd.clique), sizes), len(shapes)),
    ]
    print(f"numba active: {_accel.USE_NUMBA}")
    print(f"{'kernel':<12} {'items':>9} {'numpy s':>10} {'numba s':>10} {'speedup':>8}")
    for name, np_fn, nb_fn, items in cases:
        t_np, out_np = best_time(np_fn, args.repeat)
        t_nb, out_nb = best_time(nb_fn, args.repeat)
        assert np.array_equal(out_np, out_nb), f"{name}: kernels disagree"
        print(f"{name:<12} {items:>9} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
