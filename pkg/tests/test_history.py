import csv
import io
import random

import pytest

from aggsculpt import (
    SculptError,
    Selection,
    export_csv,
    load_session_log,
    log_to_dict,
    pile,
    pivot_partition,
    prune,
    redo,
    replay_log,
    save_session_log,
    session_from_log,
    state_digest,
    supernodes_of,
    undo,
    unpartition,
)

from conftest import DATA, random_table, session_from_table


def parse_csv(data: bytes):
    rows = list(csv.reader(io.StringIO(data.decode("utf-8"))))
    return rows[0], rows[1:]


def test_cursor_advances_and_truncates(cars_session):
    s = pivot_partition(cars_session, 1, "horizontal", "origin")
    s = pivot_partition(s, 1, "vertical", "cylinders")
    s = pivot_partition(s, 1, "vertical", "year")
    assert s.log.cursor == 3 and len(s.log.entries) == 3

    s = undo(undo(s))
    assert s.log.cursor == 1 and len(s.log.entries) == 3

    s = pivot_partition(s, 1, "horizontal", "year")  # discards the redo tail
    assert s.log.cursor == 2 and len(s.log.entries) == 2
    with pytest.raises(SculptError) as err:
        redo(s)
    assert err.value.code == "nothing_to_redo"


def test_undo_restores_initial_state(cars_session):
    initial = state_digest(cars_session)
    s = pivot_partition(cars_session, 1, "horizontal", "origin")
    assert state_digest(undo(s)) == initial
    with pytest.raises(SculptError) as err:
        undo(undo(s))
    assert err.value.code == "nothing_to_undo"


def test_undo_redo_pair(cars_session):
    s1 = pivot_partition(cars_session, 1, "horizontal", "origin")
    s2 = pivot_partition(s1, 1, "vertical", "cylinders")
    after = state_digest(s2)
    assert state_digest(redo(undo(s2))) == after


def test_ten_random_ops_undo_redo_cycle(cars_session):
    rng = random.Random(11)
    attrs = ["origin", "cylinders", "year", "name"]
    s = cars_session
    for _ in range(10):
        free = [a for a in attrs
                if a not in s.substrate(1).h_axis and a not in s.substrate(1).v_axis]
        if free and rng.random() < 0.8:
            s = pivot_partition(s, 1, rng.choice(["horizontal", "vertical"]), rng.choice(free))
        else:
            stacked = s.substrate(1).h_axis or s.substrate(1).v_axis
            if stacked:
                axis = "horizontal" if s.substrate(1).h_axis else "vertical"
                s = unpartition(s, 1, axis, stacked[0])
            else:
                s = pivot_partition(s, 1, "horizontal", attrs[0])
    target = state_digest(s)
    for _ in range(10):
        s = undo(s)
    for _ in range(10):
        s = redo(s)
    assert state_digest(s) == target


def test_replay_reproduces_digest(cars_session):
    s = pivot_partition(cars_session, 1, "horizontal", "origin")
    s = prune(s, Selection(substrate_id=1, mode="column-facet", keys=(("origin", "US"),)))
    s = undo(s)
    assert state_digest(replay_log(s)) == state_digest(s)
    assert replay_log(s).log.cursor == s.log.cursor


def test_export_matches_source_data(cars_session):
    header, rows = parse_csv(export_csv(cars_session, 1))
    with open(DATA / "cars.csv", newline="", encoding="utf-8") as fh:
        src = list(csv.reader(fh))
    assert header == src[0]
    assert rows == src[1:]


def test_export_after_prune_drops_rows(cars_session):
    s = pivot_partition(cars_session, 1, "horizontal", "origin")
    s = prune(s, Selection(substrate_id=1, mode="column-facet", keys=(("origin", "US"),)))
    header, rows = parse_csv(export_csv(s, 1))
    origin = header.index("origin")
    assert rows and all(row[origin] != "US" for row in rows)


def test_export_piled_companion_column(cars_session):
    s = pivot_partition(cars_session, 1, "horizontal", "origin")
    s = pile(s, Selection(substrate_id=1, mode="column-facet",
                          keys=(("origin", "Europe"), ("origin", "Asia"))),
             name="overseas")
    header, rows = parse_csv(export_csv(s, 1))
    assert header.index("origin__piled") == header.index("origin") + 1
    origin, piled = header.index("origin"), header.index("origin__piled")
    for row in rows:
        if row[origin] in ("Europe", "Asia"):
            assert row[piled] == "overseas"
        else:
            assert row[piled] == row[origin]  # original value preserved


def test_export_row_order_is_ascending(cars_session):
    s = pivot_partition(cars_session, 1, "horizontal", "origin")
    s = prune(s, Selection(substrate_id=1, mode="column-facet", keys=(("origin", "Asia"),)))
    header, rows = parse_csv(export_csv(s, 1))
    with open(DATA / "cars.csv", newline="", encoding="utf-8") as fh:
        src_rows = list(csv.reader(fh))[1:]
    name = header.index("name")
    kept = [row[0] for row in src_rows if row[6] != "Asia"]
    assert [row[name] for row in rows] == kept


def test_session_log_roundtrip(tmp_path, cars_session):
    s = pivot_partition(cars_session, 1, "horizontal", "origin")
    s = pile(s, Selection(substrate_id=1, mode="column-facet",
                          keys=(("origin", "Europe"), ("origin", "Asia"))))
    s = pivot_partition(s, 1, "vertical", "cylinders")
    s = undo(s)

    path = tmp_path / "log.json"
    save_session_log(s, path)
    restored = load_session_log(s.dataset, path)
    assert state_digest(restored) == state_digest(s)
    assert restored.log.cursor == s.log.cursor
    assert len(restored.log.entries) == len(s.log.entries)
    assert log_to_dict(restored) == log_to_dict(s)


def test_random_small_session_replay():
    rng = random.Random(13)
    for _ in range(10):
        table = random_table(rng, max_rows=60, max_attrs=3)
        session = session_from_table(table)
        attrs = list(table)
        for a in attrs:
            session = pivot_partition(session, 1, rng.choice(["horizontal", "vertical"]), a)
        if rng.random() < 0.5:
            session = undo(session)
        assert state_digest(replay_log(session)) == state_digest(session)
        data = log_to_dict(session)
        assert state_digest(session_from_log(session.dataset, data)) == state_digest(session)
