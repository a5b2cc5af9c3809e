"""Deriving supernodes, superlinks, and category scales from substrate state.

All functions here are pure: identical inputs produce identical outputs,
including ordering. Grid cells are numbered row-major (vertical index major,
horizontal minor) over the full cross product of display categories, so empty
combinations keep their slot and the grid stays rectangular.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from . import kernels
from .errors import SculptError
from .model import (
    DEFAULT_BIN_COUNT,
    MISSING,
    NOMINAL,
    QUANTITATIVE,
    SORT_NUMERICAL,
    AttributeSpec,
    Dataset,
    FacetKey,
    Session,
    SessionState,
    Substrate,
    Supernode,
    Superlink,
    format_number,
)


def order_categories(categories, sort_order):
    """Order observed categories per the attribute's sort order; the missing
    category is appended by the caller."""
    cats = list(categories)
    if isinstance(sort_order, tuple):
        explicit = [c for c in sort_order if c != MISSING]
        if sorted(explicit) != sorted(cats):
            raise SculptError(
                "invalid_sort",
                "explicit sort order must be a permutation of the observed categories",
            )
        return explicit
    if sort_order == SORT_NUMERICAL:
        def key(cat):
            try:
                return (0, float(cat), "")
            except ValueError:
                return (1, 0.0, cat)
        return sorted(cats, key=key)
    return sorted(cats)


def bin_left_edges(column, binning) -> list:
    """Left edge per bin; each bin is right-open, the last extends to +∞.

    Unparseable cells are excluded from the observed min/max (they group
    under the missing category instead).
    """
    values = column.numbers_coerced
    if binning is not None and binning.method == "explicit-edges":
        edges = list(binning.edges)
        finite = values[~np.isnan(values)]
        if len(finite) and finite.min() < edges[0]:
            raise SculptError(
                "invalid_bins",
                f"bin edges start at {edges[0]} but values as low as {finite.min()} exist",
            )
        return edges
    count = binning.bin_count if binning is not None else DEFAULT_BIN_COUNT
    finite = values[~np.isnan(values)]
    if not len(finite):
        return []
    lo, hi = float(finite.min()), float(finite.max())
    if lo == hi:
        return [lo]
    step = (hi - lo) / count
    return [lo + i * step for i in range(count)]


def bin_labels(edges) -> list:
    labels = []
    for i, left in enumerate(edges):
        if i + 1 < len(edges):
            labels.append(f"[{format_number(left)}, {format_number(edges[i + 1])})")
        else:
            labels.append(f"[{format_number(left)}, ∞)")
    return labels


def _collapse_piles(base, piles):
    """Collapse pile members into single display categories.

    Returns (display categories, base index -> display index array). A pile
    occupies the slot of its first member in base order; members whose label
    no longer exists in the base are ignored.
    """
    member_to_pile = {}
    for pile in piles:
        for m in pile.members:
            member_to_pile.setdefault(m, pile)
    display = []
    placed = {}
    mapping = np.empty(len(base), dtype=np.int64)
    for bi, cat in enumerate(base):
        pile = member_to_pile.get(cat)
        if pile is None:
            mapping[bi] = len(display)
            display.append(cat)
        elif id(pile) in placed:
            mapping[bi] = placed[id(pile)]
        else:
            placed[id(pile)] = len(display)
            mapping[bi] = len(display)
            display.append(pile.name)
    return display, mapping


class AxisScale:
    """Maps rows to display-category indices for one attribute in one substrate.

    ``base_categories`` are the pre-pile categories (sorted raw categories for
    nominal attributes, bin labels for quantitative ones, missing last);
    ``categories`` are the displayed ones after pile collapsing.
    """

    __slots__ = (
        "attribute", "kind", "categories", "base_categories",
        "_column", "_lut", "_edges", "_missing_slot", "_index",
    )

    def __init__(self, dataset: Dataset, spec: AttributeSpec, piles=()):
        self.attribute = spec.name
        self.kind = spec.kind
        column = dataset.column(spec.name)
        self._column = column
        if spec.kind == NOMINAL:
            ordered = order_categories(column.categories, spec.sort_order)
            base = list(ordered)
            raw_to_base = {c: i for i, c in enumerate(ordered)}
            self._edges = None
            missing_present = column.has_missing
        else:
            edges = bin_left_edges(column, spec.binning)
            base = bin_labels(edges)
            self._edges = np.asarray(edges, dtype=np.float64)
            missing_present = bool(np.isnan(column.numbers_coerced).any())
        if missing_present:
            base.append(MISSING)
        self._missing_slot = len(base) - 1 if missing_present else -1

        display, base_map = _collapse_piles(base, piles)
        self.base_categories = tuple(base)
        self.categories = tuple(display)
        self._index = None

        if spec.kind == NOMINAL:
            # raw code -> display index; the extra trailing slot catches code -1
            lut = np.empty(len(column.categories) + 1, dtype=np.int64)
            for i, cat in enumerate(column.categories):
                lut[i] = base_map[raw_to_base[cat]]
            lut[-1] = base_map[self._missing_slot] if self._missing_slot >= 0 else -1
            self._lut = lut
        else:
            # bin index (or the trailing missing slot) -> display index
            self._lut = base_map

    def __len__(self):
        return len(self.categories)

    def codes(self, rows: np.ndarray) -> np.ndarray:
        """Display-category index per row (int64)."""
        if self._edges is None:
            raw = self._column.codes[rows]
            return self._lut[raw]
        values = self._column.numbers_coerced[rows]
        nan = np.isnan(values)
        idx = np.searchsorted(self._edges, values, side="right").astype(np.int64) - 1
        if self._missing_slot >= 0:
            idx[nan] = len(self._edges)
        if len(idx) and ((idx < 0) & ~nan).any():
            raise SculptError("invalid_bins", "value below the first bin edge")
        return self._lut[idx]

    def index_of(self, category: str) -> int:
        if self._index is None:
            self._index = {c: i for i, c in enumerate(self.categories)}
        try:
            return self._index[category]
        except KeyError:
            raise SculptError(
                "dangling_key",
                f"{category!r} is not a category of {self.attribute!r}",
            ) from None


def build_scale(dataset: Dataset, spec: AttributeSpec, piles=()) -> AxisScale:
    return AxisScale(dataset, spec, piles)


class GridModel:
    """Grouping of one substrate's live rows into the full facet grid."""

    def __init__(self, dataset: Dataset, specs: dict, substrate: Substrate):
        self.substrate_id = substrate.id
        self.h_scales = tuple(
            build_scale(dataset, _axis_spec(specs, a), substrate.piles_for(a)) for a in substrate.h_axis
        )
        self.v_scales = tuple(
            build_scale(dataset, _axis_spec(specs, a), substrate.piles_for(a)) for a in substrate.v_axis
        )
        self.n_x = _prod(len(s) for s in self.h_scales)
        self.n_y = _prod(len(s) for s in self.v_scales)
        self.n_cells = self.n_x * self.n_y
        self.live = substrate.live

        scales = self.v_scales + self.h_scales
        if scales and len(self.live):
            radices = [len(s) for s in scales]
            codes = [s.codes(self.live) for s in scales]
            self.cell_of_live = kernels.fuse_codes(codes, radices)
        else:
            self.cell_of_live = np.zeros(len(self.live), dtype=np.int64)
        self.counts, self.order, self.starts = kernels.group_table(self.cell_of_live, max(self.n_cells, 1))

    def rows_of_cell(self, cell: int) -> np.ndarray:
        pos = self.order[self.starts[cell]:self.starts[cell + 1]]
        return self.live[pos]

    def non_empty_cells(self) -> np.ndarray:
        return np.flatnonzero(self.counts)

    def h_of_cell(self, cell: int) -> int:
        return cell % self.n_x

    def v_of_cell(self, cell: int) -> int:
        return cell // self.n_x

    def _pairs(self, scales, index: int) -> tuple:
        pairs = []
        for scale in reversed(scales):
            index, i = divmod(index, len(scale))
            pairs.append((scale.attribute, scale.categories[i]))
        return tuple(reversed(pairs))

    def key_of_cell(self, cell: int) -> FacetKey:
        return FacetKey(
            h=self._pairs(self.h_scales, self.h_of_cell(cell)),
            v=self._pairs(self.v_scales, self.v_of_cell(cell)),
        )

    def _axis_index(self, scales, pairs, axis_name: str) -> int:
        if len(pairs) != len(scales) or any(a != s.attribute for (a, _), s in zip(pairs, scales)):
            raise SculptError(
                "dangling_key",
                f"facet key does not match the {axis_name} axis stack",
            )
        index = 0
        for (_, category), scale in zip(pairs, scales):
            index = index * len(scale) + scale.index_of(category)
        return index

    def cell_of_key(self, key: FacetKey) -> int:
        h = self._axis_index(self.h_scales, key.h, "horizontal")
        v = self._axis_index(self.v_scales, key.v, "vertical")
        return v * self.n_x + h


def _axis_spec(specs: dict, name: str) -> AttributeSpec:
    try:
        return specs[name]
    except KeyError:
        raise SculptError("unknown_attribute", f"unknown attribute {name!r}") from None


def _prod(values) -> int:
    out = 1
    for v in values:
        out *= v
    return out


class _GridCache:
    """Small keep-alive cache for derived grids.

    Keyed on dataset/live-array identity plus the substrate's facet
    configuration; holding strong references to the keys makes identity
    checks sound.
    """

    def __init__(self, capacity: int = 8):
        self.capacity = capacity
        self._slots = []

    def _config(self, specs, substrate):
        involved = substrate.h_axis + substrate.v_axis
        return (
            substrate.h_axis,
            substrate.v_axis,
            substrate.piles,
            tuple(specs[a] for a in involved if a in specs),
        )

    def get(self, dataset, specs, substrate) -> GridModel:
        config = self._config(specs, substrate)
        for i, (ds, live, cfg, grid) in enumerate(self._slots):
            if ds is dataset and live is substrate.live and cfg == config:
                if i:
                    self._slots.insert(0, self._slots.pop(i))
                return grid
        grid = GridModel(dataset, specs, substrate)
        self._slots.insert(0, (dataset, substrate.live, config, grid))
        del self._slots[self.capacity:]
        return grid


_grid_cache = _GridCache()


def derive_grid(dataset: Dataset, specs: dict, substrate: Substrate) -> GridModel:
    return _grid_cache.get(dataset, specs, substrate)


def supernodes_of(session: Session, substrate_id: int) -> list:
    """One supernode per non-empty grid cell, in row-major grid order."""
    substrate = session.state.substrate(substrate_id)
    grid = derive_grid(session.dataset, session.specs, substrate)
    return [
        Supernode(key=grid.key_of_cell(c), rows=grid.rows_of_cell(c), count=int(grid.counts[c]))
        for c in grid.non_empty_cells()
    ]


def superlinks_of(session: Session, substrate_id: int) -> list:
    """Aggregated directed edges between this substrate's supernodes.

    Edges with either endpoint outside the substrate's live rows are omitted.
    """
    links, _ = _superlink_table(session.dataset, session.specs, session.state.substrate(substrate_id))
    return links


def _superlink_table(dataset: Dataset, specs: dict, substrate: Substrate):
    if dataset.edges is None:
        raise SculptError("no_edges", "dataset has no edge list")
    grid = derive_grid(dataset, specs, substrate)
    cell_of_row = np.full(dataset.row_count, -1, dtype=np.int64)
    cell_of_row[grid.live] = grid.cell_of_live
    src = cell_of_row[dataset.edges.source]
    dst = cell_of_row[dataset.edges.target]
    both_live = (src >= 0) & (dst >= 0)
    n = max(grid.n_cells, 1)
    pair_ids, weight_sums, edge_counts = kernels.pair_sums(
        src[both_live], dst[both_live], dataset.edges.weight[both_live], n
    )
    links = []
    for pid, w, c in zip(pair_ids.tolist(), weight_sums.tolist(), edge_counts.tolist()):
        s_cell, t_cell = divmod(pid, n)
        links.append(
            Superlink(
                source=grid.key_of_cell(s_cell),
                target=grid.key_of_cell(t_cell),
                weight=float(w),
                edge_count=int(c),
            )
        )
    return links, grid


def category_counts(session: Session, substrate_id: int, attribute: str) -> list:
    """(category, live-row count) per display category, in display order."""
    substrate = session.state.substrate(substrate_id)
    return _category_counts(session.dataset, session.specs, substrate, attribute)


def _category_counts(dataset: Dataset, specs: dict, substrate: Substrate, attribute: str) -> list:
    spec = _axis_spec(specs, attribute)
    dataset.column(attribute)
    scale = build_scale(dataset, spec, substrate.piles_for(attribute))
    counts = np.bincount(scale.codes(substrate.live), minlength=len(scale))
    return list(zip(scale.categories, counts.tolist()))


def peek_fractions(dataset: Dataset, specs: dict, substrate: Substrate, grid: GridModel):
    """Distribution of the peeked attribute inside every grid cell.

    Returns (display categories, fractions matrix [n_cells, n_categories]);
    rows of empty cells are all zero, others sum to 1.
    """
    spec = _axis_spec(specs, substrate.peek)
    scale = build_scale(dataset, spec, substrate.piles_for(substrate.peek))
    k = len(scale)
    if k == 0 or grid.n_cells == 0:
        return scale.categories, np.zeros((grid.n_cells, max(k, 1)))
    codes = scale.codes(grid.live)
    fused = grid.cell_of_live * np.int64(k) + codes
    table = np.bincount(fused, minlength=grid.n_cells * k).reshape(grid.n_cells, k)
    totals = table.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        fractions = np.where(totals > 0, table / totals, 0.0)
    return scale.categories, fractions
