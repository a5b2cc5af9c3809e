"""Hot grouping/aggregation kernels with a compiled fast path.

The Cython extension ``aggsculpt.kernels._fast`` is compiled at install time
when a C compiler is available; otherwise the numpy reference implementations
in ``aggsculpt.kernels._ref`` are used. Set ``AGGSCULPT_NO_EXT=1`` to force
the reference path (useful for benchmarking and debugging).
"""

import os

from . import _ref

if os.environ.get("AGGSCULPT_NO_EXT"):
    _impl = _ref
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _ref

USING_FAST = _impl is not _ref

fuse_codes = _impl.fuse_codes
group_table = _impl.group_table
pair_sums = _impl.pair_sums

__all__ = ["USING_FAST", "fuse_codes", "group_table", "pair_sums"]
