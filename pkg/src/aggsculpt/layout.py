"""Deterministic geometric model of a substrate, renderer-agnostic.

The card body hands in a canvas; cells of the facet grid are laid out on a
surface that matches the canvas unless the per-cell space would drop below
the minimum mark size, in which case the surface is extended to
``N · MIN_CELL_SIZE`` per axis and the client is expected to scroll.
Everything is plain data; serialization (`GridLayout.to_dict`) is stable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .derive import derive_grid, peek_fractions, _superlink_table
from .errors import SculptError
from .model import FacetKey, Session

#: minimum cell size in pixels; below this the surface extends and scrolls
MIN_CELL_SIZE = 5.0
#: mark diameter as a fraction of the cell size (keeps neighbors from touching)
NODE_DIAMETER_RATIO = 0.8
#: counts are printed inside marks only when cells are at least this large
COUNT_LABEL_MIN_CELL = 24.0
#: attribute names are attached to label levels at least this wide/tall
LABEL_NAME_MIN_EXTENT = 24.0

LINK_COLOR = "#c8c8c8"
LINK_OPACITY = 0.3
ORIGIN_LINK_COLOR = "#b39ddb"    # hover: links leaving the node (light purple)
INCOMING_LINK_COLOR = "#a5d6a7"  # hover: links entering the node (light green)
MAX_LINK_THICKNESS = 6.0
ARC_BULGE_RATIO = 0.15

#: single-hue ramp for the count encoding: light tint at 0, saturated at max
COLOR_RAMP = ("#f2f0f7", "#54278f")

CATEGORICAL_PALETTE = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
)


@dataclass(frozen=True, eq=False)
class CellMark:
    key: FacetKey
    h_index: int
    v_index: int
    x: float
    y: float
    count: int
    color_value: float
    peek_fractions: Optional[tuple] = None

    def to_dict(self) -> dict:
        return {
            "key": self.key.to_dict(),
            "hIndex": self.h_index,
            "vIndex": self.v_index,
            "x": self.x,
            "y": self.y,
            "count": self.count,
            "colorValue": self.color_value,
            "peekFractions": list(self.peek_fractions) if self.peek_fractions is not None else None,
        }


@dataclass(frozen=True, eq=False)
class LabelSpan:
    label: str
    start: float
    end: float

    def to_dict(self) -> dict:
        return {"label": self.label, "start": self.start, "end": self.end}


@dataclass(frozen=True, eq=False)
class LabelLevel:
    attribute: str
    show_name: bool
    spans: tuple

    def to_dict(self) -> dict:
        return {
            "attribute": self.attribute,
            "showName": self.show_name,
            "spans": [s.to_dict() for s in self.spans],
        }


@dataclass(frozen=True, eq=False)
class LinkMark:
    id: str
    source: FacetKey
    target: FacetKey
    x1: float
    y1: float
    x2: float
    y2: float
    thickness: float
    weight: float
    edge_count: int

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "source": self.source.to_dict(),
            "target": self.target.to_dict(),
            "x1": self.x1,
            "y1": self.y1,
            "x2": self.x2,
            "y2": self.y2,
            "thickness": self.thickness,
            "weight": self.weight,
            "edgeCount": self.edge_count,
        }


@dataclass(frozen=True, eq=False)
class GridLayout:
    substrate_id: int
    substrate_name: str
    canvas_width: float
    canvas_height: float
    surface_width: float
    surface_height: float
    n_x: int
    n_y: int
    cell_size: float
    node_radius: float
    show_count_labels: bool
    show_arrows: bool
    peek_attribute: Optional[str]
    peek_categories: tuple
    max_count: int
    cells: tuple
    h_labels: tuple
    v_labels: tuple
    links: tuple
    _cell_index: dict = field(default_factory=dict, repr=False)

    def cell(self, key: FacetKey) -> CellMark:
        if not self._cell_index:
            self._cell_index.update({c.key: c for c in self.cells})
        try:
            return self._cell_index[key]
        except KeyError:
            raise SculptError("dangling_key", "no grid cell with this key") from None

    def to_dict(self) -> dict:
        return {
            "substrateId": self.substrate_id,
            "substrateName": self.substrate_name,
            "canvasWidth": self.canvas_width,
            "canvasHeight": self.canvas_height,
            "surfaceWidth": self.surface_width,
            "surfaceHeight": self.surface_height,
            "nX": self.n_x,
            "nY": self.n_y,
            "cellSize": self.cell_size,
            "nodeRadius": self.node_radius,
            "showCountLabels": self.show_count_labels,
            "showArrows": self.show_arrows,
            "peekAttribute": self.peek_attribute,
            "peekCategories": list(self.peek_categories),
            "maxCount": self.max_count,
            "cells": [c.to_dict() for c in self.cells],
            "hLabels": [l.to_dict() for l in self.h_labels],
            "vLabels": [l.to_dict() for l in self.v_labels],
            "links": [l.to_dict() for l in self.links],
            "style": {
                "colorRamp": list(COLOR_RAMP),
                "palette": list(CATEGORICAL_PALETTE),
                "linkColor": LINK_COLOR,
                "linkOpacity": LINK_OPACITY,
                "originLinkColor": ORIGIN_LINK_COLOR,
                "incomingLinkColor": INCOMING_LINK_COLOR,
            },
        }


def surface_size(canvas_width: float, canvas_height: float, n_x: int, n_y: int):
    """Surface extension rule: honor the canvas until cells would shrink
    below MIN_CELL_SIZE, then pin cells at the minimum and extend."""
    if min(canvas_width / n_x, canvas_height / n_y) < MIN_CELL_SIZE:
        return n_x * MIN_CELL_SIZE, n_y * MIN_CELL_SIZE
    return canvas_width, canvas_height


def cell_size_for(surface_width: float, surface_height: float, n_x: int, n_y: int) -> float:
    return max(min(surface_width / n_x, surface_height / n_y), MIN_CELL_SIZE)


def _label_levels(scales, spacing: float, vertical: bool) -> tuple:
    """Nested label spans, outermost level first; spans cover their leaves exactly."""
    radices = [len(s) for s in scales]
    levels = []
    for level, scale in enumerate(scales):
        group = spacing
        for r in radices[level + 1:]:
            group *= r
        repeats = 1
        for r in radices[:level]:
            repeats *= r
        spans = []
        for rep in range(repeats):
            for ci, cat in enumerate(scale.categories):
                j = rep * len(scale) + ci
                spans.append(LabelSpan(label=cat, start=j * group, end=(j + 1) * group))
        show_name = group >= LABEL_NAME_MIN_EXTENT and (not vertical or level == 0)
        levels.append(LabelLevel(attribute=scale.attribute, show_name=show_name, spans=tuple(spans)))
    return tuple(levels)


def axis_label_tree(session: Session, substrate_id: int, axis: str, extent: float = 1.0) -> tuple:
    """Hierarchical label spans for one axis, spanning ``extent`` pixels total."""
    substrate = session.state.substrate(substrate_id)
    grid = derive_grid(session.dataset, session.specs, substrate)
    if axis == "horizontal":
        scales, n = grid.h_scales, grid.n_x
    elif axis == "vertical":
        scales, n = grid.v_scales, grid.n_y
    else:
        raise SculptError("invalid_axis", f"unknown axis {axis!r}")
    if not scales or n == 0:
        return ()
    return _label_levels(scales, extent / n, vertical=axis == "vertical")


def compute_layout(
    session: Session,
    substrate_id: int,
    canvas_width: float,
    canvas_height: float,
    proportional: bool = False,
) -> GridLayout:
    """Full geometric model of one substrate for a given card-body viewport.

    ``proportional`` reserves the count-proportional space-allocation mode;
    only equal allocation is implemented.
    """
    if proportional:
        raise SculptError("unsupported_mode", "proportional space allocation is not implemented")
    if canvas_width <= 0 or canvas_height <= 0:
        raise SculptError("invalid_canvas", "canvas dimensions must be positive")
    substrate = session.state.substrate(substrate_id)
    dataset = session.dataset
    grid = derive_grid(dataset, session.specs, substrate)

    if substrate.live_count == 0 or grid.n_cells == 0:
        return GridLayout(
            substrate_id=substrate.id,
            substrate_name=substrate.name,
            canvas_width=float(canvas_width),
            canvas_height=float(canvas_height),
            surface_width=float(canvas_width),
            surface_height=float(canvas_height),
            n_x=0,
            n_y=0,
            cell_size=MIN_CELL_SIZE,
            node_radius=MIN_CELL_SIZE * NODE_DIAMETER_RATIO / 2,
            show_count_labels=False,
            show_arrows=substrate.show_arrows,
            peek_attribute=substrate.peek,
            peek_categories=(),
            max_count=0,
            cells=(),
            h_labels=(),
            v_labels=(),
            links=(),
        )

    n_x, n_y = grid.n_x, grid.n_y
    surface_w, surface_h = surface_size(canvas_width, canvas_height, n_x, n_y)
    cell_size = cell_size_for(surface_w, surface_h, n_x, n_y)
    node_radius = cell_size * NODE_DIAMETER_RATIO / 2
    spacing_x = surface_w / n_x
    spacing_y = surface_h / n_y

    peek_cats: tuple = ()
    fractions = None
    if substrate.peek is not None:
        peek_cats, fractions = peek_fractions(dataset, session.specs, substrate, grid)
        peek_cats = tuple(peek_cats)

    counts = grid.counts
    max_count = int(counts.max()) if len(counts) else 0
    cells = []
    for c in range(grid.n_cells):
        hi, vi = grid.h_of_cell(c), grid.v_of_cell(c)
        count = int(counts[c])
        cells.append(CellMark(
            key=grid.key_of_cell(c),
            h_index=hi,
            v_index=vi,
            x=(hi + 0.5) * spacing_x,
            y=(vi + 0.5) * spacing_y,
            count=count,
            color_value=count / max_count if max_count else 0.0,
            peek_fractions=tuple(fractions[c].tolist()) if fractions is not None and count else None,
        ))

    links = []
    if substrate.show_links and dataset.has_edges:
        raw_links, _ = _superlink_table(dataset, session.specs, substrate)
        max_weight = max((l.weight for l in raw_links), default=0.0)
        by_key = {cell.key: cell for cell in cells}
        for link in raw_links:
            src, dst = by_key[link.source], by_key[link.target]
            thickness = 1.0 + (MAX_LINK_THICKNESS - 1.0) * (link.weight / max_weight) if max_weight > 0 else 1.0
            links.append(LinkMark(
                id=f"{src.v_index * n_x + src.h_index}->{dst.v_index * n_x + dst.h_index}",
                source=link.source,
                target=link.target,
                x1=src.x, y1=src.y, x2=dst.x, y2=dst.y,
                thickness=thickness,
                weight=link.weight,
                edge_count=link.edge_count,
            ))

    return GridLayout(
        substrate_id=substrate.id,
        substrate_name=substrate.name,
        canvas_width=float(canvas_width),
        canvas_height=float(canvas_height),
        surface_width=float(surface_w),
        surface_height=float(surface_h),
        n_x=n_x,
        n_y=n_y,
        cell_size=cell_size,
        node_radius=node_radius,
        show_count_labels=cell_size >= COUNT_LABEL_MIN_CELL,
        show_arrows=substrate.show_arrows,
        peek_attribute=substrate.peek,
        peek_categories=peek_cats,
        max_count=max_count,
        cells=tuple(cells),
        h_labels=_label_levels(grid.h_scales, spacing_x, vertical=False),
        v_labels=_label_levels(grid.v_scales, spacing_y, vertical=True),
        links=tuple(links),
    )


def hover_highlight_model(layout: GridLayout, key: FacetKey) -> dict:
    """What lights up when a node is hovered: labels, link classes, and count."""
    cell = layout.cell(key)
    labels = []
    for axis, levels, index, total in (
        ("horizontal", layout.h_labels, cell.h_index, layout.n_x),
        ("vertical", layout.v_labels, cell.v_index, layout.n_y),
    ):
        for level_no, level in enumerate(levels):
            group_size = total // len(level.spans)
            span_index = index // group_size
            labels.append({
                "axis": axis,
                "attribute": level.attribute,
                "level": level_no,
                "spanIndex": span_index,
                "label": level.spans[span_index].label,
            })
    origin = [l.id for l in layout.links if l.source == key]
    incoming = [l.id for l in layout.links if l.target == key]
    return {"key": key.to_dict(), "count": cell.count, "labels": labels,
            "origin": origin, "incoming": incoming}
