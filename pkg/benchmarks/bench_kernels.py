"""Benchmark the compiled kernels against the numpy reference implementations.

Usage::

    python benchmarks/bench_kernels.py [--rows 10000000] [--edges 2000000]

Also times an end-to-end supernode derivation with each backend.
"""

import argparse
import time

import numpy as np

from aggsculpt.kernels import _ref

try:
    from aggsculpt.kernels import _fast
except ImportError:
    _fast = None


def timeit(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def row(name, n, ref_s, fast_s):
    speedup = f"{ref_s / fast_s:5.1f}x" if fast_s else "    -"
    fast_txt = f"{fast_s:8.3f}s" if fast_s else "       -"
    print(f"{name:<22} {n:>12,} {ref_s:8.3f}s {fast_txt} {speedup}")


def bench_kernels(rows, edges):
    rng = np.random.default_rng(0)
    codes = [
        rng.integers(0, 9, rows, dtype=np.int64),
        rng.integers(0, 30, rows, dtype=np.int64),
        rng.integers(0, 30, rows, dtype=np.int64),
    ]
    radices = [9, 30, 30]
    n_cells = 9 * 30 * 30

    ref_s = timeit(lambda: _ref.fuse_codes(codes, radices))
    fast_s = timeit(lambda: _fast.fuse_codes(codes, radices)) if _fast else None
    row("fuse_codes (3 levels)", rows, ref_s, fast_s)

    fused = _ref.fuse_codes(codes, radices)
    ref_s = timeit(lambda: _ref.group_table(fused, n_cells))
    fast_s = timeit(lambda: _fast.group_table(fused, n_cells)) if _fast else None
    row("group_table", rows, ref_s, fast_s)

    src = rng.integers(0, 400, edges, dtype=np.int64)
    dst = rng.integers(0, 400, edges, dtype=np.int64)
    weight = rng.uniform(0, 5, edges)
    ref_s = timeit(lambda: _ref.pair_sums(src, dst, weight, 400))
    fast_s = timeit(lambda: _fast.pair_sums(src, dst, weight, 400)) if _fast else None
    row("pair_sums (400 cells)", edges, ref_s, fast_s)


def bench_end_to_end(rows):
    import aggsculpt as ag
    from aggsculpt import kernels
    from aggsculpt.derive import _grid_cache

    rng = np.random.default_rng(1)
    years = [str(y) for y in range(2014, 2023)]
    zones = [f"zone{z:02d}" for z in range(30)]
    dataset = ag.Dataset({
        "year": ag.Column.from_codes(rng.integers(0, 9, rows, dtype=np.int32), years),
        "pu_zone": ag.Column.from_codes(rng.integers(0, 30, rows, dtype=np.int32), zones),
        "do_zone": ag.Column.from_codes(rng.integers(0, 30, rows, dtype=np.int32), zones),
    })
    session = ag.new_session(dataset)
    session = ag.pivot_partition(session, 1, "horizontal", "pu_zone")
    session = ag.pivot_partition(session, 1, "vertical", "do_zone")

    def derive_with(impl):
        saved = (kernels.fuse_codes, kernels.group_table, kernels.pair_sums)
        kernels.fuse_codes, kernels.group_table, kernels.pair_sums = (
            impl.fuse_codes, impl.group_table, impl.pair_sums,
        )
        # derive.py binds the kernels module, not the functions, so this sticks
        try:
            _grid_cache._slots.clear()
            return timeit(lambda: (_grid_cache._slots.clear(), ag.supernodes_of(session, 1)))
        finally:
            kernels.fuse_codes, kernels.group_table, kernels.pair_sums = saved

    ref_s = derive_with(_ref)
    fast_s = derive_with(_fast) if _fast else None
    row("supernode derivation", rows, ref_s, fast_s)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--rows", type=int, default=10_000_000)
    parser.add_argument("--edges", type=int, default=2_000_000)
    args = parser.parse_args()

    if _fast is None:
        print("compiled kernels not built; timing the numpy reference only\n")
    print(f"{'kernel':<22} {'n':>12} {'ref':>9} {'fast':>9} {'speedup':>6}")
    bench_kernels(args.rows, args.edges)
    bench_end_to_end(args.rows)


if __name__ == "__main__":
    main()
