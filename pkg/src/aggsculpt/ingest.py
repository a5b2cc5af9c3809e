"""CSV ingestion: node and edge tables, type inference, and attribute config.

Dialect is fixed: comma-separated, double-quote escaping, UTF-8, header row
required. A column is inferred quantitative iff every non-empty value parses
as a number; explicit overrides win. Empty cells are missing values.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import IngestError
from .model import Column, Dataset, Edges, Session, default_specs, new_session
from .ops import configure_attribute  # re-exported: attribute config is part of ingestion

__all__ = [
    "EdgeColumns",
    "IngestConfig",
    "ingest_csv",
    "open_session",
    "configure_attribute",
]


@dataclass(frozen=True)
class EdgeColumns:
    source: str = "source"
    target: str = "target"
    weight: Optional[str] = None


@dataclass(frozen=True)
class IngestConfig:
    node_file: str
    edge_file: Optional[str] = None
    edge_columns: EdgeColumns = field(default_factory=EdgeColumns)
    key_column: Optional[str] = None
    type_overrides: dict = field(default_factory=dict)
    #: reservoir-sample this many node rows (original order kept); edges whose
    #: endpoints were not sampled are dropped.
    sample: Optional[int] = None
    seed: int = 0


def _read_table(path, sample: Optional[int] = None, seed: int = 0):
    """Read a CSV with a header row; returns (header, rows of str)."""
    try:
        fh = open(path, "r", encoding="utf-8-sig", newline="")
    except OSError as exc:
        raise IngestError("file_error", f"cannot open {path}: {exc}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError("parse_error", f"{path}: empty file, header row required") from None
        except csv.Error as exc:
            raise IngestError("parse_error", f"{path}: {exc}") from None
        if len(set(header)) != len(header):
            raise IngestError("parse_error", f"{path}: duplicate column names in header")
        width = len(header)
        rng = random.Random(seed) if sample is not None else None
        kept = []
        seen = 0
        try:
            for row in reader:
                if not row:
                    continue  # blank line
                if len(row) != width:
                    raise IngestError(
                        "parse_error",
                        f"{path}: row {seen + 1}: expected {width} fields, got {len(row)}",
                    )
                if rng is None:
                    kept.append(row)
                elif len(kept) < sample:
                    kept.append((seen, row))
                else:
                    j = rng.randint(0, seen)
                    if j < sample:
                        kept[j] = (seen, row)
                seen += 1
        except csv.Error as exc:
            raise IngestError("parse_error", f"{path}: row {seen + 1}: {exc}") from None
        if rng is not None:
            kept.sort(key=lambda item: item[0])
            kept = [row for _, row in kept]
    return header, kept


def _parse_weight(value: str, path, row: int, column: str) -> float:
    if value == "":
        return 1.0
    try:
        return float(value)
    except ValueError:
        raise IngestError(
            "parse_error",
            f"{path}: row {row}: column {column!r}: {value!r} is not a number",
        ) from None


def ingest_csv(config: IngestConfig) -> Dataset:
    """Load the node table (and optional edge table) into an immutable Dataset."""
    header, rows = _read_table(config.node_file, sample=config.sample, seed=config.seed)
    for name in config.type_overrides:
        if name not in header:
            raise IngestError("unknown_attribute", f"type override for unknown column {name!r}")
    columns = [
        (name, Column.from_strings([row[i] for row in rows]))
        for i, name in enumerate(header)
    ]

    edges = None
    if config.edge_file is not None:
        if config.key_column is None:
            raise IngestError("config_error", "edge ingestion requires a key column")
        if config.key_column not in header:
            raise IngestError("unknown_attribute", f"key column {config.key_column!r} not in node table")
        key_idx = header.index(config.key_column)
        row_of_key = {}
        for r, row in enumerate(rows):
            key = row[key_idx]
            if key in row_of_key:
                raise IngestError("duplicate_key", f"duplicate node key {key!r} (rows {row_of_key[key]} and {r})")
            row_of_key[key] = r

        ec = config.edge_columns
        e_header, e_rows = _read_table(config.edge_file)
        for name in (ec.source, ec.target) + ((ec.weight,) if ec.weight else ()):
            if name not in e_header:
                raise IngestError("unknown_attribute", f"edge table has no column {name!r}")
        si, ti = e_header.index(ec.source), e_header.index(ec.target)
        wi = e_header.index(ec.weight) if ec.weight else None

        sources, targets, weights = [], [], []
        for r, row in enumerate(e_rows, start=1):
            src, dst = row[si], row[ti]
            if src not in row_of_key or dst not in row_of_key:
                if config.sample is not None:
                    continue  # endpoint fell outside the sample
                missing = src if src not in row_of_key else dst
                raise IngestError("unknown_key", f"{config.edge_file}: row {r}: unknown node key {missing!r}")
            sources.append(row_of_key[src])
            targets.append(row_of_key[dst])
            weights.append(_parse_weight(row[wi], config.edge_file, r, ec.weight) if wi is not None else 1.0)
        edges = Edges(
            source=np.array(sources, dtype=np.int64),
            target=np.array(targets, dtype=np.int64),
            weight=np.array(weights, dtype=np.float64),
        )

    return Dataset(columns, edges=edges)


def open_session(config: IngestConfig) -> Session:
    """Ingest per config and start a session with inferred attribute specs."""
    dataset = ingest_csv(config)
    specs = default_specs(dataset, config.type_overrides)
    return new_session(dataset, specs=specs)
