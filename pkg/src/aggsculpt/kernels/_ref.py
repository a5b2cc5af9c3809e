"""Reference numpy implementations of the aggregation kernels.

These are the fallback for environments where the compiled extension is not
built. Both implementations must stay behaviorally identical; see
tests/test_kernels.py and benchmarks/bench_kernels.py.
"""

import numpy as np


def fuse_codes(code_arrays, radices):
    """Combine per-level category indices into a single mixed-radix index.

    ``code_arrays[i]`` holds values in ``[0, radices[i])``; level 0 is the
    most significant. Returns an int64 array.
    """
    out = np.asarray(code_arrays[0], dtype=np.int64).copy()
    for codes, radix in zip(code_arrays[1:], radices[1:]):
        out *= radix
        out += codes
    return out


def group_table(cells, n_cells):
    """Group positions by cell index.

    Returns ``(counts, order, starts)`` where ``counts[c]`` is the number of
    positions in cell ``c``, ``order`` lists positions grouped by cell
    (stable, so ascending within each cell), and ``starts`` is the running
    offset of each cell's slice in ``order`` (length ``n_cells + 1``).
    """
    cells = np.asarray(cells, dtype=np.int64)
    counts = np.bincount(cells, minlength=n_cells)
    starts = np.zeros(n_cells + 1, dtype=np.int64)
    np.cumsum(counts, out=starts[1:])
    order = np.argsort(cells, kind="stable").astype(np.int64, copy=False)
    return counts, order, starts


def pair_sums(src_cells, dst_cells, weights, n_cells):
    """Aggregate directed edges by (source cell, target cell).

    Returns ``(pair_ids, weight_sums, edge_counts)`` where
    ``pair_ids = src * n_cells + dst``, sorted ascending, one entry per pair
    with at least one edge.
    """
    pair = np.asarray(src_cells, dtype=np.int64) * np.int64(n_cells)
    pair += dst_cells
    pair_ids, inverse = np.unique(pair, return_inverse=True)
    weight_sums = np.bincount(inverse, weights=weights, minlength=len(pair_ids))
    edge_counts = np.bincount(inverse, minlength=len(pair_ids)).astype(np.int64)
    return pair_ids, weight_sums, edge_counts
