# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; behaviorally identical to aggsculpt.kernels._ref.

The counting-sort grouping and the dense pair accumulator are the hot inner
loops of supernode and superlink derivation.
"""

import numpy as np

from libc.stdint cimport int64_t

from . import _ref

# above this many candidate pairs the dense accumulator would thrash memory,
# so superlink aggregation falls back to the sort-based reference path
DEF DENSE_PAIR_LIMIT = 4194304


def fuse_codes(code_arrays, radices):
    """Combine per-level category indices into a single mixed-radix index."""
    out_arr = np.ascontiguousarray(code_arrays[0], dtype=np.int64).copy()
    cdef int64_t[::1] out = out_arr
    cdef int64_t[::1] codes
    cdef int64_t radix
    cdef Py_ssize_t i, n = out.shape[0]
    for arr, r in zip(code_arrays[1:], radices[1:]):
        codes = np.ascontiguousarray(arr, dtype=np.int64)
        radix = r
        for i in range(n):
            out[i] = out[i] * radix + codes[i]
    return out_arr


def group_table(cells, Py_ssize_t n_cells):
    """Counting-sort grouping of positions by cell index."""
    cdef int64_t[::1] cv = np.ascontiguousarray(cells, dtype=np.int64)
    cdef Py_ssize_t n = cv.shape[0]

    counts_arr = np.zeros(n_cells, dtype=np.int64)
    starts_arr = np.zeros(n_cells + 1, dtype=np.int64)
    order_arr = np.empty(n, dtype=np.int64)
    pos_arr = np.empty(n_cells, dtype=np.int64)
    cdef int64_t[::1] counts = counts_arr
    cdef int64_t[::1] starts = starts_arr
    cdef int64_t[::1] order = order_arr
    cdef int64_t[::1] pos = pos_arr
    cdef Py_ssize_t i
    cdef int64_t c, acc = 0

    for i in range(n):
        counts[cv[i]] += 1
    for i in range(n_cells):
        starts[i] = acc
        pos[i] = acc
        acc += counts[i]
    starts[n_cells] = acc
    for i in range(n):
        c = cv[i]
        order[pos[c]] = i
        pos[c] += 1
    return counts_arr, order_arr, starts_arr


def pair_sums(src_cells, dst_cells, weights, Py_ssize_t n_cells):
    """Aggregate directed edges by (source cell, target cell)."""
    if n_cells * n_cells > DENSE_PAIR_LIMIT:
        return _ref.pair_sums(src_cells, dst_cells, weights, n_cells)
    cdef int64_t[::1] sv = np.ascontiguousarray(src_cells, dtype=np.int64)
    cdef int64_t[::1] dv = np.ascontiguousarray(dst_cells, dtype=np.int64)
    cdef double[::1] wv = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t m = sv.shape[0]

    weight_acc = np.zeros(n_cells * n_cells, dtype=np.float64)
    count_acc = np.zeros(n_cells * n_cells, dtype=np.int64)
    cdef double[::1] wacc = weight_acc
    cdef int64_t[::1] cacc = count_acc
    cdef Py_ssize_t i
    cdef int64_t p

    for i in range(m):
        p = sv[i] * n_cells + dv[i]
        wacc[p] += wv[i]
        cacc[p] += 1

    pair_ids = np.flatnonzero(count_acc)
    return pair_ids.astype(np.int64), weight_acc[pair_ids], count_acc[pair_ids]
