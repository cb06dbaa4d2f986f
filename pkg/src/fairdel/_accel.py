"""Batch fair-cost kernels.

Each kernel has a numba ``@njit`` version and a pure-numpy version with the
same signature. The numba path is used when numba imports and the
``FAIRDEL_NO_NUMBA`` environment variable is unset (or ``0``). Both paths are
kept importable so the benchmark and the tests can compare them.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "USE_NUMBA",
    "set_costs",
    "edge_set_costs",
    "shape_costs",
    "set_costs_numpy",
    "edge_set_costs_numpy",
    "shape_costs_numpy",
]


def _flag_disabled() -> bool:
    return os.environ.get("FAIRDEL_NO_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")


try:
    if _flag_disabled():
        raise ImportError("disabled by FAIRDEL_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


# --- numpy reference paths ---------------------------------------------------


def _mask_bits(masks: np.ndarray, width: int) -> np.ndarray:
    shifts = np.arange(width, dtype=np.uint64)
    return ((masks.astype(np.uint64)[:, None] >> shifts) & np.uint64(1)).astype(np.int64)


def set_costs_numpy(masks: np.ndarray, adjacency: np.ndarray) -> np.ndarray:
    """Fair vertex cost of every vertex set given as a bitmask."""
    n = adjacency.shape[0]
    if n == 0 or masks.size == 0:
        return np.zeros(masks.shape[0], dtype=np.int64)
    bits = _mask_bits(masks, n)
    return (bits @ adjacency.astype(np.int64)).max(axis=1)


def edge_set_costs_numpy(masks: np.ndarray, incidence: np.ndarray) -> np.ndarray:
    """Fair edge cost of every edge set given as a bitmask over edge indices."""
    m, n = incidence.shape
    if m == 0 or n == 0 or masks.size == 0:
        return np.zeros(masks.shape[0], dtype=np.int64)
    bits = _mask_bits(masks, m)
    return (bits @ incidence).max(axis=1)


def shape_costs_numpy(
    shapes: np.ndarray, class_adj: np.ndarray, clique: np.ndarray, sizes: np.ndarray
) -> np.ndarray:
    """Fair vertex cost of every shape (rows of ``shapes``)."""
    if shapes.shape[0] == 0 or shapes.shape[1] == 0:
        return np.zeros(shapes.shape[0], dtype=np.int64)
    off = class_adj.astype(np.int64).copy()
    np.fill_diagonal(off, 0)
    cross = shapes @ off
    full = shapes == sizes[None, :]
    inclass = np.where(clique[None, :], shapes - full.astype(np.int64), 0)
    return (cross + inclass).max(axis=1)


# --- numba paths -------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _set_costs_nb(masks, adj_masks):
        out = np.zeros(masks.shape[0], dtype=np.int64)
        n = adj_masks.shape[0]
        for t in range(masks.shape[0]):
            x = masks[t]
            best = 0
            for v in range(n):
                y = adj_masks[v] & x
                c = 0
                while y:
                    y &= y - np.uint64(1)
                    c += 1
                if c > best:
                    best = c
            out[t] = best
        return out

    @njit(cache=True)
    def _edge_set_costs_nb(masks, ends, n):
        out = np.zeros(masks.shape[0], dtype=np.int64)
        m = ends.shape[0]
        deg = np.zeros(n, dtype=np.int64)
        for t in range(masks.shape[0]):
            x = masks[t]
            deg[:] = 0
            for e in range(m):
                if (x >> np.uint64(e)) & np.uint64(1):
                    deg[ends[e, 0]] += 1
                    deg[ends[e, 1]] += 1
            best = 0
            for v in range(n):
                if deg[v] > best:
                    best = deg[v]
            out[t] = best
        return out

    @njit(cache=True)
    def _shape_costs_nb(shapes, class_adj, clique, sizes):
        rows, k = shapes.shape
        out = np.zeros(rows, dtype=np.int64)
        for t in range(rows):
            best = 0
            for i in range(k):
                c = 0
                for j in range(k):
                    if j != i and class_adj[i, j]:
                        c += shapes[t, j]
                if clique[i]:
                    s = shapes[t, i]
                    c += s - 1 if s == sizes[i] and s > 0 else s
                if c > best:
                    best = c
            out[t] = best
        return out


def _adj_mask_array(adjacency: np.ndarray) -> np.ndarray:
    n = adjacency.shape[0]
    weights = np.uint64(1) << np.arange(n, dtype=np.uint64)
    return (adjacency.astype(np.uint64) * weights[None, :]).sum(axis=1, dtype=np.uint64)


USE_NUMBA = HAVE_NUMBA


def set_costs(masks: np.ndarray, adjacency: np.ndarray) -> np.ndarray:
    masks = np.ascontiguousarray(masks, dtype=np.uint64)
    if adjacency.shape[0] > 64:
        raise ValueError("bitmask kernels support at most 64 vertices")
    if USE_NUMBA:
        return _set_costs_nb(masks, _adj_mask_array(adjacency))
    return set_costs_numpy(masks, adjacency)


def edge_set_costs(masks: np.ndarray, incidence: np.ndarray) -> np.ndarray:
    masks = np.ascontiguousarray(masks, dtype=np.uint64)
    m, n = incidence.shape
    if m > 64:
        raise ValueError("bitmask kernels support at most 64 edges")
    if USE_NUMBA:
        ends = np.zeros((m, 2), dtype=np.int64)
        for e in range(m):
            ends[e] = np.nonzero(incidence[e])[0]
        return _edge_set_costs_nb(masks, ends, n)
    return edge_set_costs_numpy(masks, incidence)


def shape_costs(
    shapes: np.ndarray, class_adj: np.ndarray, clique: np.ndarray, sizes: np.ndarray
) -> np.ndarray:
    shapes = np.ascontiguousarray(shapes, dtype=np.int64)
    clique = np.asarray(clique, dtype=np.bool_)
    sizes = np.asarray(sizes, dtype=np.int64)
    if USE_NUMBA:
        return _shape_costs_nb(shapes, np.asarray(class_adj, dtype=np.bool_), clique, sizes)
    return shape_costs_numpy(shapes, class_adj, clique, sizes)
