import pathlib
import random

import numpy as np
import pytest

from aggsculpt import (
    Dataset,
    Edges,
    IngestConfig,
    new_session,
    open_session,
)

DATA = pathlib.Path(__file__).resolve().parents[1] / "data"


@pytest.fixture
def cars_session():
    """The bundled car-style fixture; cylinders and year treated as categories."""
    return open_session(IngestConfig(
        node_file=str(DATA / "cars.csv"),
        type_overrides={"cylinders": "nominal", "year": "nominal"},
    ))


@pytest.fixture
def cars_table():
    """Raw cell strings of the cars fixture, for the brute-force oracles."""
    import csv

    with open(DATA / "cars.csv", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    return {name: [row[i] for row in rows] for i, name in enumerate(header)}


@pytest.fixture
def papers_session():
    """Small citation network: 12 papers in 4 tracks with weighted edges."""
    from aggsculpt import EdgeColumns

    return open_session(IngestConfig(
        node_file=str(DATA / "papers.csv"),
        edge_file=str(DATA / "citations.csv"),
        edge_columns=EdgeColumns(weight="weight"),
        key_column="paper_id",
        type_overrides={"year": "nominal"},
    ))


def random_table(rng: random.Random, max_rows=200, max_attrs=4, max_cats=6):
    """Random nominal table as plain python lists (occasionally with missing cells)."""
    n_rows = rng.randint(1, max_rows)
    n_attrs = rng.randint(1, max_attrs)
    table = {}
    for a in range(n_attrs):
        k = rng.randint(1, max_cats)
        cats = [f"c{a}_{j}" for j in range(k)]
        if rng.random() < 0.3:
            cats.append("")  # missing cells
        table[f"attr{a}"] = [rng.choice(cats) for _ in range(n_rows)]
    return table


def random_graph(rng: random.Random, n_rows: int, max_edges=400, integer_weights=True):
    m = rng.randint(0, max_edges)
    src = [rng.randrange(n_rows) for _ in range(m)]
    dst = [rng.randrange(n_rows) for _ in range(m)]
    if integer_weights:
        w = [float(rng.randint(1, 9)) for _ in range(m)]
    else:
        w = [rng.random() * 10 for _ in range(m)]
    return src, dst, w


def session_from_table(table: dict, edges=None):
    ds = Dataset(
        {name: values for name, values in table.items()},
        edges=Edges(
            source=np.array(edges[0], dtype=np.int64),
            target=np.array(edges[1], dtype=np.int64),
            weight=np.array(edges[2], dtype=np.float64),
        ) if edges else None,
    )
    return new_session(ds)
