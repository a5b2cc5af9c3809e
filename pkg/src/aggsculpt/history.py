"""Interaction log: undo/redo, log replay, session digests, and CSV export.

Each log entry carries the state it produced, so undo/redo are O(1) state
swaps; ``replay_log`` re-executes the ops from the initial state and must
reproduce the same states (the core determinism contract, exercised heavily
in the tests).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json

import numpy as np

from . import ops
from .derive import build_scale
from .errors import SculptError
from .model import (
    Dataset,
    LogEntry,
    OperationLog,
    SculptOp,
    Session,
    SessionState,
    new_session,
)

apply = ops.apply


def undo(session: Session) -> Session:
    if session.log.cursor == 0:
        raise SculptError("nothing_to_undo", "nothing to undo")
    log = session.log
    cursor = log.cursor - 1
    state = log.initial if cursor == 0 else log.entries[cursor - 1].state_after
    return Session(
        dataset=session.dataset,
        state=state,
        log=OperationLog(initial=log.initial, entries=log.entries, cursor=cursor),
    )


def redo(session: Session) -> Session:
    log = session.log
    if log.cursor >= len(log.entries):
        raise SculptError("nothing_to_redo", "nothing to redo")
    return Session(
        dataset=session.dataset,
        state=log.entries[log.cursor].state_after,
        log=OperationLog(initial=log.initial, entries=log.entries, cursor=log.cursor + 1),
    )


def replay_log(session: Session) -> Session:
    """Re-execute the logged ops from the initial state.

    Returns a session that must be digest-identical to ``session``; used to
    verify that every op is a pure, deterministic transition.
    """
    state = session.log.initial
    entries = []
    for entry in session.log.entries:
        state = ops.execute(session.dataset, state, entry.op)
        entries.append(LogEntry(op=entry.op, state_after=state))
    cursor = session.log.cursor
    current = session.log.initial if cursor == 0 else entries[cursor - 1].state_after
    return Session(
        dataset=session.dataset,
        state=current,
        log=OperationLog(initial=session.log.initial, entries=tuple(entries), cursor=cursor),
    )


def _state_dict(state: SessionState) -> dict:
    return {
        "specs": {name: spec.to_dict() for name, spec in sorted(state.specs.items())},
        "substrates": [
            {
                "id": sub.id,
                "name": sub.name,
                "live": sub.live.tolist(),
                "pruned": sub.pruned.tolist(),
                "hAxis": list(sub.h_axis),
                "vAxis": list(sub.v_axis),
                "piles": [
                    {"attribute": p.attribute, "members": list(p.members), "name": p.name}
                    for p in sub.piles
                ],
                "peek": sub.peek,
                "showLinks": sub.show_links,
                "showArrows": sub.show_arrows,
            }
            for sub in state.substrates
        ],
        "nextSubstrateId": state.next_substrate_id,
    }


def state_digest(session: Session) -> str:
    """SHA-256 over the canonical JSON encoding of the session state."""
    payload = json.dumps(_state_dict(session.state), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def export_csv(session: Session, substrate_id: int) -> bytes:
    """Live rows of one substrate as RFC-4180 CSV (UTF-8, CRLF).

    Original columns keep their order and raw values; each attribute with an
    active pile gains a ``<attr>__piled`` companion column right after it
    holding the displayed (possibly merged) category.
    """
    substrate = session.state.substrate(substrate_id)
    dataset = session.dataset
    rows = substrate.live  # kept sorted ascending by every op

    header = []
    columns = []
    for name in dataset.column_names:
        header.append(name)
        columns.append(dataset.column(name).raw_values(rows))
        if substrate.piles_for(name):
            scale = build_scale(dataset, session.state.spec(name), substrate.piles_for(name))
            labels = np.array(scale.categories, dtype=object)
            header.append(f"{name}__piled")
            columns.append(labels[scale.codes(rows)])

    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(header)
    writer.writerows(zip(*columns) if columns else [])
    return buffer.getvalue().encode("utf-8")


def log_to_dict(session: Session) -> dict:
    """Serializable form of the interaction log (ops only, states re-derivable)."""
    return {
        "version": 1,
        "initialSpecs": {name: spec.to_dict() for name, spec in sorted(session.log.initial.specs.items())},
        "ops": [entry.op.to_dict() for entry in session.log.entries],
        "cursor": session.log.cursor,
    }


def save_session_log(session: Session, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(log_to_dict(session), fh, indent=2, ensure_ascii=False)


def session_from_log(dataset: Dataset, data: dict) -> Session:
    """Rebuild a session by replaying a saved log against the same dataset."""
    from .model import AttributeSpec

    specs = {name: AttributeSpec.from_dict(d) for name, d in data.get("initialSpecs", {}).items()}
    session = new_session(dataset, specs=specs or None)
    for op_data in data.get("ops", []):
        session = ops.apply(session, SculptOp.from_dict(op_data))
    cursor = data.get("cursor", len(session.log.entries))
    while session.log.cursor > cursor:
        session = undo(session)
    return session


def load_session_log(dataset: Dataset, path) -> Session:
    with open(path, "r", encoding="utf-8") as fh:
        return session_from_log(dataset, json.load(fh))
