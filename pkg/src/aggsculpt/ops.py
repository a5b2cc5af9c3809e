"""The six sculpting operations plus selection, as pure Session transitions.

Every public operation builds a :class:`SculptOp`, executes it against the
current state, and appends it to the interaction log (truncating any redo
tail). ``execute`` is the single dispatch point used both for live operations
and for log replay.
"""

from __future__ import annotations

import time
from dataclasses import replace
from typing import Optional

import numpy as np

from .derive import _category_counts, build_scale, derive_grid
from .errors import SculptError
from .model import (
    AXES,
    COLUMN_FACET,
    HORIZONTAL,
    KINDS,
    NODES,
    ROW_FACET,
    VERTICAL,
    AttributeSpec,
    Binning,
    Dataset,
    LogEntry,
    OperationLog,
    Pile,
    SculptOp,
    Selection,
    Session,
    SessionState,
    Substrate,
)

PIVOT_PARTITION = "pivot-partition"
UNPARTITION = "unpartition"
PEEK = "peek"
CLEAR_PEEK = "clear-peek"
PILE = "pile"
PROJECT = "project"
PRUNE = "prune"
PRUNE_BY_FREQUENCY = "prune-by-frequency"
CONFIGURE = "configure"
TOGGLE_VIEW = "toggle-view"

OP_KINDS = (
    PIVOT_PARTITION, UNPARTITION, PEEK, CLEAR_PEEK, PILE,
    PROJECT, PRUNE, PRUNE_BY_FREQUENCY, CONFIGURE, TOGGLE_VIEW,
)


def resolve_selection(session: Session, selection: Selection) -> np.ndarray:
    """Row indices a selection stands for, sorted ascending.

    Nodes mode unions the selected supernodes' rows; facet mode unions every
    live row carrying the selected category, across the whole cross axis.
    """
    return _resolve(session.dataset, session.state, selection)


def _resolve(dataset: Dataset, state: SessionState, selection: Selection) -> np.ndarray:
    substrate = state.substrate(selection.substrate_id)
    if selection.mode == NODES:
        grid = derive_grid(dataset, state.specs, substrate)
        cells = sorted({grid.cell_of_key(key) for key in selection.keys})
        if not cells:
            return np.empty(0, dtype=np.int64)
        return np.sort(np.concatenate([grid.rows_of_cell(c) for c in cells]))

    axis = substrate.h_axis if selection.mode == COLUMN_FACET else substrate.v_axis
    mask = np.zeros(len(substrate.live), dtype=bool)
    scales = {}
    for attribute, category in selection.keys:
        if attribute not in axis:
            raise SculptError(
                "dangling_key",
                f"{attribute!r} is not partitioned on the selected axis",
            )
        if attribute not in scales:
            scales[attribute] = build_scale(
                dataset, state.spec(attribute), substrate.piles_for(attribute)
            )
        scale = scales[attribute]
        mask |= scale.codes(substrate.live) == scale.index_of(category)
    return substrate.live[mask]


# --- op handlers -----------------------------------------------------------

def _do_pivot_partition(dataset, state, params):
    substrate = state.substrate(int(params["substrateId"]))
    axis = params["axis"]
    attribute = params["attribute"]
    if axis not in AXES:
        raise SculptError("invalid_axis", f"unknown axis {axis!r}")
    dataset.column(attribute)
    if attribute in substrate.h_axis or attribute in substrate.v_axis:
        raise SculptError(
            "attribute_already_partitioned",
            f"{attribute!r} is already on an axis of this substrate",
        )
    # fail fast on unusable specs (bad bins, non-numeric quantitative, ...)
    build_scale(dataset, state.spec(attribute), substrate.piles_for(attribute))
    if axis == HORIZONTAL:
        substrate = replace(substrate, h_axis=substrate.h_axis + (attribute,))
    else:
        substrate = replace(substrate, v_axis=substrate.v_axis + (attribute,))
    return state.replace_substrate(substrate)


def _do_unpartition(dataset, state, params):
    substrate = state.substrate(int(params["substrateId"]))
    axis = params["axis"]
    attribute = params["attribute"]
    if axis not in AXES:
        raise SculptError("invalid_axis", f"unknown axis {axis!r}")
    stack = substrate.axis_stack(axis)
    if attribute not in stack:
        raise SculptError("attribute_not_on_axis", f"{attribute!r} is not on the {axis} axis")
    new_stack = tuple(a for a in stack if a != attribute)
    if axis == HORIZONTAL:
        substrate = replace(substrate, h_axis=new_stack)
    else:
        substrate = replace(substrate, v_axis=new_stack)
    return state.replace_substrate(substrate)


def _do_peek(dataset, state, params):
    substrate = state.substrate(int(params["substrateId"]))
    attribute = params["attribute"]
    dataset.column(attribute)
    build_scale(dataset, state.spec(attribute), substrate.piles_for(attribute))
    return state.replace_substrate(replace(substrate, peek=attribute))


def _do_clear_peek(dataset, state, params):
    substrate = state.substrate(int(params["substrateId"]))
    return state.replace_substrate(replace(substrate, peek=None))


def _do_pile(dataset, state, params):
    selection = Selection.from_dict(params["selection"])
    substrate = state.substrate(selection.substrate_id)
    if selection.mode not in (ROW_FACET, COLUMN_FACET):
        raise SculptError("invalid_selection", "pile needs a row or column facet selection")
    attributes = {a for a, _ in selection.keys}
    if len(attributes) != 1:
        raise SculptError("pile_mixed_attributes", "piled categories must share one attribute")
    attribute = attributes.pop()
    axis = substrate.h_axis if selection.mode == COLUMN_FACET else substrate.v_axis
    if attribute not in axis:
        raise SculptError("dangling_key", f"{attribute!r} is not partitioned on the selected axis")
    categories = []
    for _, category in selection.keys:
        if category not in categories:
            categories.append(category)
    if len(categories) < 2:
        raise SculptError("pile_too_few", "pile needs at least two categories")

    scale = build_scale(dataset, state.spec(attribute), substrate.piles_for(attribute))
    display_order = {c: i for i, c in enumerate(scale.categories)}
    for category in categories:
        if category not in display_order:
            raise SculptError("dangling_key", f"{category!r} is not a category of {attribute!r}")
    categories.sort(key=display_order.get)

    pile_by_name = {p.name: p for p in substrate.piles_for(attribute)}
    members, absorbed = [], []
    for category in categories:
        old = pile_by_name.get(category)
        if old is not None and category not in scale.base_categories:
            members.extend(old.members)
            absorbed.append(old)
        else:
            members.append(category)
    members = tuple(sorted(set(members)))

    name = params.get("name") or ", ".join(categories)
    remaining = [c for c in scale.categories if c not in categories]
    if name in remaining or name in scale.base_categories:
        name = name + " (pile)"

    piles = tuple(p for p in substrate.piles if p not in absorbed) + (
        Pile(attribute=attribute, members=members, name=name),
    )
    return state.replace_substrate(replace(substrate, piles=piles))


def _do_project(dataset, state, params):
    selection = Selection.from_dict(params["selection"])
    source = state.substrate(selection.substrate_id)
    rows = _resolve(dataset, state, selection)
    if not len(rows):
        raise SculptError("empty_selection", "nothing selected to project")
    new_id = state.next_substrate_id
    target = Substrate(
        id=new_id,
        name=params.get("name") or f"View {new_id}",
        live=rows,
        pruned=np.empty(0, dtype=np.int64),
    )
    source = replace(source, live=np.setdiff1d(source.live, rows, assume_unique=True))
    state = state.replace_substrate(source)
    return replace(state, substrates=state.substrates + (target,), next_substrate_id=new_id + 1)


def _do_prune(dataset, state, params):
    selection = Selection.from_dict(params["selection"])
    substrate = state.substrate(selection.substrate_id)
    rows = _resolve(dataset, state, selection)
    if not len(rows):
        raise SculptError("empty_selection", "nothing selected to prune")
    substrate = replace(
        substrate,
        live=np.setdiff1d(substrate.live, rows, assume_unique=True),
        pruned=np.union1d(substrate.pruned, rows),
    )
    return state.replace_substrate(substrate)


def _do_prune_by_frequency(dataset, state, params):
    substrate = state.substrate(int(params["substrateId"]))
    attribute = params["attribute"]
    min_count = int(params["minCount"])
    dataset.column(attribute)
    counts = dict(_category_counts(dataset, state.specs, substrate, attribute))
    scale = build_scale(dataset, state.spec(attribute), substrate.piles_for(attribute))
    codes = scale.codes(substrate.live)
    rare = np.array([counts[c] < min_count for c in scale.categories], dtype=bool)
    if not rare.any():
        return state
    rows = substrate.live[rare[codes]]
    if not len(rows):
        return state
    substrate = replace(
        substrate,
        live=np.setdiff1d(substrate.live, rows, assume_unique=True),
        pruned=np.union1d(substrate.pruned, rows),
    )
    return state.replace_substrate(substrate)


def _do_configure(dataset, state, params):
    attribute = params["attribute"]
    dataset.column(attribute)
    current = state.spec(attribute)
    data = dict(params["spec"])
    data.setdefault("name", attribute)
    data.setdefault("kind", current.kind)
    spec = AttributeSpec.from_dict(data)
    if spec.name != attribute:
        raise SculptError("invalid_spec", "spec name must match the attribute")
    build_scale(dataset, spec)  # validates sort order and bin edges
    specs = dict(state.specs)
    specs[attribute] = spec
    return replace(state, specs=specs)


def _do_toggle_view(dataset, state, params):
    substrate = state.substrate(int(params["substrateId"]))
    target = params["target"]
    value = bool(params["value"])
    if target == "links":
        substrate = replace(substrate, show_links=value)
    elif target == "arrows":
        substrate = replace(substrate, show_arrows=value)
    else:
        raise SculptError("invalid_toggle", f"unknown view toggle {target!r}")
    return state.replace_substrate(substrate)


_HANDLERS = {
    PIVOT_PARTITION: _do_pivot_partition,
    UNPARTITION: _do_unpartition,
    PEEK: _do_peek,
    CLEAR_PEEK: _do_clear_peek,
    PILE: _do_pile,
    PROJECT: _do_project,
    PRUNE: _do_prune,
    PRUNE_BY_FREQUENCY: _do_prune_by_frequency,
    CONFIGURE: _do_configure,
    TOGGLE_VIEW: _do_toggle_view,
}


def execute(dataset: Dataset, state: SessionState, op: SculptOp) -> SessionState:
    """Apply one op to a state; pure, raises SculptError on invalid ops."""
    handler = _HANDLERS.get(op.kind)
    if handler is None:
        raise SculptError("invalid_op", f"unknown operation kind {op.kind!r}")
    return handler(dataset, state, op.params)


def apply(session: Session, op: SculptOp) -> Session:
    """Execute, truncate the redo tail, append to the log, advance the cursor."""
    new_state = execute(session.dataset, session.state, op)
    log = session.log
    entries = log.entries[: log.cursor] + (LogEntry(op=op, state_after=new_state),)
    return Session(
        dataset=session.dataset,
        state=new_state,
        log=OperationLog(initial=log.initial, entries=entries, cursor=log.cursor + 1),
    )


def _make_op(kind: str, params: dict, timestamp: Optional[float] = None) -> SculptOp:
    return SculptOp(kind=kind, params=params, timestamp=time.time() if timestamp is None else timestamp)


# --- public operations -----------------------------------------------------

def pivot_partition(session: Session, substrate_id: int, axis: str, attribute: str) -> Session:
    """Split along ``attribute`` and lay the pieces out on ``axis`` (nested if repeated)."""
    return apply(session, _make_op(PIVOT_PARTITION, {
        "substrateId": substrate_id, "axis": axis, "attribute": attribute,
    }))


def unpartition(session: Session, substrate_id: int, axis: str, attribute: str) -> Session:
    return apply(session, _make_op(UNPARTITION, {
        "substrateId": substrate_id, "axis": axis, "attribute": attribute,
    }))


def peek(session: Session, substrate_id: int, attribute: str) -> Session:
    """Show each supernode's distribution over ``attribute`` as glyph fractions."""
    return apply(session, _make_op(PEEK, {"substrateId": substrate_id, "attribute": attribute}))


def clear_peek(session: Session, substrate_id: int) -> Session:
    return apply(session, _make_op(CLEAR_PEEK, {"substrateId": substrate_id}))


def pile(session: Session, selection: Selection, name: Optional[str] = None) -> Session:
    """Merge the selected categories of one attribute into a single one."""
    params = {"selection": selection.to_dict()}
    if name:
        params["name"] = name
    return apply(session, _make_op(PILE, params))


def project(session: Session, selection: Selection, name: Optional[str] = None) -> Session:
    """Move the selected rows onto a new substrate, subtracting them from the source."""
    params = {"selection": selection.to_dict()}
    if name:
        params["name"] = name
    return apply(session, _make_op(PROJECT, params))


def prune(session: Session, selection: Selection) -> Session:
    """Hide the selected rows from the substrate; undo restores them exactly."""
    return apply(session, _make_op(PRUNE, {"selection": selection.to_dict()}))


def prune_by_frequency(session: Session, substrate_id: int, attribute: str, min_count: int) -> Session:
    """Prune rows whose category occurs fewer than ``min_count`` times among live rows."""
    return apply(session, _make_op(PRUNE_BY_FREQUENCY, {
        "substrateId": substrate_id, "attribute": attribute, "minCount": int(min_count),
    }))


def configure_attribute(session: Session, name: str, spec: AttributeSpec) -> Session:
    """Replace an attribute's spec; category orders and bins re-derive everywhere."""
    return apply(session, _make_op(CONFIGURE, {"attribute": name, "spec": spec.to_dict()}))


def toggle_view(session: Session, substrate_id: int, target: str, value: bool) -> Session:
    return apply(session, _make_op(TOGGLE_VIEW, {
        "substrateId": substrate_id, "target": target, "value": bool(value),
    }))
