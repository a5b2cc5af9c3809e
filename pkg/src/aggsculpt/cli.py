"""Command line interface: serve the HTTP API, or run op scripts headlessly.

Script format (one op per line, ``#`` comments allowed)::

    partition h year
    select h 2016 2017 2018 2019
    project pre-pandemic
    partition h pu_borough
    partition v do_borough

``select`` stores a pending facet selection (``attr=value`` tokens, or bare
values resolved against the axis stack) consumed by the next ``prune``,
``project``, or ``pile``. ``card N`` switches the current substrate; after
``project`` the new substrate becomes current.
"""

from __future__ import annotations

import json
import os
import shlex
from pathlib import Path

import click

from . import history, ops
from .errors import SculptError
from .ingest import EdgeColumns, IngestConfig, open_session
from .layout import compute_layout
from .model import (
    COLUMN_FACET,
    HORIZONTAL,
    ROW_FACET,
    VERTICAL,
    AttributeSpec,
    Binning,
    Selection,
    Session,
)
from .svg import render_svg

_AXES = {"h": HORIZONTAL, "horizontal": HORIZONTAL, "v": VERTICAL, "vertical": VERTICAL}


class _ScriptError(Exception):
    pass


def _axis(token: str) -> str:
    axis = _AXES.get(token.lower())
    if axis is None:
        raise _ScriptError(f"expected axis h or v, got {token!r}")
    return axis


def _facet_keys(session: Session, substrate_id: int, axis: str, tokens) -> list:
    """Resolve select tokens to (attribute, category) pairs on one axis."""
    from .derive import build_scale

    substrate = session.substrate(substrate_id)
    stack = substrate.h_axis if axis == HORIZONTAL else substrate.v_axis
    if not stack:
        raise _ScriptError(f"the {axis} axis has no partitions to select from")
    scales = {
        a: build_scale(session.dataset, session.specs[a], substrate.piles_for(a))
        for a in stack
    }
    keys = []
    for token in tokens:
        if "=" in token:
            attr, _, cat = token.partition("=")
            if attr not in scales:
                raise _ScriptError(f"{attr!r} is not on the {axis} axis")
            keys.append((attr, cat))
            continue
        owners = [a for a, s in scales.items() if token in s.categories]
        if not owners:
            raise _ScriptError(f"no category {token!r} on the {axis} axis")
        if len(owners) > 1:
            raise _ScriptError(f"{token!r} is ambiguous ({', '.join(owners)}); use attr=value")
        keys.append((owners[0], token))
    return keys


def _parse_configure(session: Session, attribute: str, tokens) -> AttributeSpec:
    current = session.specs.get(attribute)
    if current is None:
        raise _ScriptError(f"unknown attribute {attribute!r}")
    kind, sort_order, binning = current.kind, current.sort_order, current.binning
    for token in tokens:
        key, _, value = token.partition("=")
        if not value:
            raise _ScriptError(f"expected key=value, got {token!r}")
        if key == "kind":
            kind = value
        elif key == "sort":
            sort_order = tuple(value.split(",")) if "," in value else value
        elif key == "bins":
            parts = value.split(",")
            if len(parts) == 1:
                binning = Binning(method="equal-width", bin_count=int(parts[0]))
            else:
                binning = Binning(method="explicit-edges", edges=tuple(float(p) for p in parts))
        else:
            raise _ScriptError(f"unknown configure option {key!r}")
    return AttributeSpec(name=attribute, kind=kind, sort_order=sort_order, binning=binning)


def run_script(session: Session, lines) -> Session:
    """Execute a newline-separated op script; raises _ScriptError with the line no."""
    current = session.substrates[0].id
    selection = None
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            verb, *args = shlex.split(line)  # quotes protect categories with spaces
            verb = verb.lower()
            if verb == "partition":
                session = ops.pivot_partition(session, current, _axis(args[0]), args[1])
            elif verb == "unpartition":
                session = ops.unpartition(session, current, _axis(args[0]), args[1])
            elif verb == "peek":
                session = ops.peek(session, current, args[0])
            elif verb == "clearpeek":
                session = ops.clear_peek(session, current)
            elif verb == "select":
                axis = _axis(args[0])
                mode = COLUMN_FACET if axis == HORIZONTAL else ROW_FACET
                keys = _facet_keys(session, current, axis, args[1:])
                selection = Selection(substrate_id=current, mode=mode, keys=tuple(keys))
            elif verb in ("project", "prune", "pile"):
                if selection is None or selection.substrate_id != current:
                    raise _ScriptError(f"{verb} needs a preceding select on this card")
                name = " ".join(args) or None
                if verb == "project":
                    session = ops.project(session, selection, name=name)
                    current = session.substrates[-1].id
                elif verb == "prune":
                    session = ops.prune(session, selection)
                else:
                    session = ops.pile(session, selection, name=name)
                selection = None
            elif verb == "prunefreq":
                session = ops.prune_by_frequency(session, current, args[0], int(args[1]))
            elif verb == "configure":
                spec = _parse_configure(session, args[0], args[1:])
                session = ops.configure_attribute(session, args[0], spec)
            elif verb == "toggle":
                value = True if len(args) < 2 else args[1].lower() in ("on", "true", "1")
                session = ops.toggle_view(session, current, args[0], value)
            elif verb == "card":
                current = session.substrate(int(args[0])).id
                selection = None
            elif verb == "undo":
                session = history.undo(session)
                current = _existing_card(session, current)
            elif verb == "redo":
                session = history.redo(session)
            else:
                raise _ScriptError(f"unknown command {verb!r}")
        except _ScriptError as exc:
            raise _ScriptError(f"script line {line_no}: {exc}") from exc
        except SculptError as exc:
            raise _ScriptError(f"script line {line_no}: {exc.message}") from exc
        except (IndexError, ValueError) as exc:
            raise _ScriptError(f"script line {line_no}: bad arguments for {verb!r}: {exc}") from exc
    return session


def _existing_card(session: Session, current: int) -> int:
    for sub in session.substrates:
        if sub.id == current:
            return current
    return session.substrates[0].id


@click.group()
def main():
    """Sculptable aggregate grids over columnar data."""


@main.command()
@click.option("--port", default=None, type=int, help="Port (default: $AGGSCULPT_PORT or 8000).")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--static", "static_dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="Directory with the UI bundle to host at /.")
@click.option("--max-sessions", default=32, show_default=True)
def serve(port, host, static_dir, max_sessions):
    """Run the HTTP session service (and host the UI bundle)."""
    import uvicorn

    from .service import SessionStore, create_app

    app = create_app(store=SessionStore(max_sessions=max_sessions), static_dir=static_dir)
    port = port or int(os.environ.get("AGGSCULPT_PORT", 8000))
    uvicorn.run(app, host=host, port=port)


@main.command()
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--edges", "edge_file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--key", "key_column", default=None, help="Node id column for edge joining.")
@click.option("--source-col", default="source", show_default=True)
@click.option("--target-col", default="target", show_default=True)
@click.option("--weight-col", default=None)
@click.option("--nominal", multiple=True, help="Force a column nominal (repeatable).")
@click.option("--quantitative", multiple=True, help="Force a column quantitative (repeatable).")
@click.option("--script", "script_file", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Newline-separated op script; see module docs.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--sample", type=int, default=None, help="Reservoir-sample N rows at ingest.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--width", default=800.0, show_default=True)
@click.option("--height", default=600.0, show_default=True)
def run(data, edge_file, key_column, source_col, target_col, weight_col,
        nominal, quantitative, script_file, out_dir, sample, seed, width, height):
    """Execute an op script headlessly; write layout JSON, SVG, and CSV exports."""
    overrides = {name: "nominal" for name in nominal}
    overrides.update({name: "quantitative" for name in quantitative})
    try:
        session = open_session(IngestConfig(
            node_file=data,
            edge_file=edge_file,
            edge_columns=EdgeColumns(source=source_col, target=target_col, weight=weight_col),
            key_column=key_column,
            type_overrides=overrides,
            sample=sample,
            seed=seed,
        ))
    except SculptError as exc:
        raise click.ClickException(exc.message)

    with open(script_file, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    try:
        session = run_script(session, lines)
    except _ScriptError as exc:
        raise click.ClickException(str(exc))

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for sub in session.substrates:
        layout = compute_layout(session, sub.id, width, height)
        (out / f"layout-{sub.id}.json").write_text(
            json.dumps(layout.to_dict(), indent=2, ensure_ascii=False), encoding="utf-8"
        )
        (out / f"substrate-{sub.id}.svg").write_text(render_svg(layout), encoding="utf-8")
        (out / f"export-{sub.id}.csv").write_bytes(history.export_csv(session, sub.id))
    history.save_session_log(session, out / "session-log.json")
    click.echo(f"wrote {3 * len(session.substrates) + 1} files to {out}")


if __name__ == "__main__":
    main()
