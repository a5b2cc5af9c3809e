import csv
import io
import json
import threading

import pytest
from fastapi.testclient import TestClient

from aggsculpt import pivot_partition, prune_by_frequency, state_digest, toggle_view
from aggsculpt.service import SessionStore, create_app

from conftest import DATA


@pytest.fixture
def store():
    return SessionStore(max_sessions=4)


@pytest.fixture
def client(store):
    return TestClient(create_app(store=store))


def upload_cars(client, **config):
    config.setdefault("typeOverrides", {"cylinders": "nominal", "year": "nominal"})
    with open(DATA / "cars.csv", "rb") as fh:
        response = client.post(
            "/sessions",
            files={"nodes": ("cars.csv", fh, "text/csv")},
            data={"config": json.dumps(config)},
        )
    assert response.status_code == 200, response.text
    return response.json()


def upload_papers(client):
    with open(DATA / "papers.csv", "rb") as nodes, open(DATA / "citations.csv", "rb") as edges:
        response = client.post(
            "/sessions",
            files={
                "nodes": ("papers.csv", nodes, "text/csv"),
                "edges": ("citations.csv", edges, "text/csv"),
            },
            data={"config": json.dumps({
                "keyColumn": "paper_id",
                "edgeColumns": {"weight": "weight"},
                "typeOverrides": {"year": "nominal"},
            })},
        )
    assert response.status_code == 200, response.text
    return response.json()


def test_create_session_summary(client):
    handle = upload_cars(client)
    assert handle["dataset"]["rowCount"] == 32
    kinds = {c["name"]: c["kind"] for c in handle["dataset"]["columns"]}
    assert kinds["cylinders"] == "nominal"
    assert kinds["mpg"] == "quantitative"
    assert handle["dataset"]["hasEdges"] is False
    assert handle["substrates"][0]["name"] == "Main"
    assert handle["log"] == {"cursor": 0, "length": 0, "entries": []}

    again = client.get(f"/sessions/{handle['sessionId']}")
    assert again.status_code == 200
    assert again.json()["dataset"] == handle["dataset"]


def test_fresh_layout_is_single_supernode(client):
    handle = upload_cars(client)
    r = client.get(f"/sessions/{handle['sessionId']}/substrates/1/layout", params={"w": 800, "h": 600})
    assert r.status_code == 200
    layout = r.json()
    assert layout["nX"] == 1 and layout["nY"] == 1
    assert layout["cells"][0]["count"] == 32


def test_pivot_op_changes_layout(client):
    sid = upload_cars(client)["sessionId"]
    r = client.post(f"/sessions/{sid}/ops", json={
        "kind": "pivot-partition",
        "params": {"substrateId": 1, "axis": "horizontal", "attribute": "cylinders"},
    })
    assert r.status_code == 200
    body = r.json()
    assert body["substrates"][0]["hAxis"] == ["cylinders"]
    assert body["log"]["cursor"] == 1

    layout = client.get(f"/sessions/{sid}/substrates/1/layout").json()
    assert layout["nX"] == 3


def test_undo_redo_endpoints(client):
    sid = upload_cars(client)["sessionId"]
    r = client.post(f"/sessions/{sid}/undo")
    assert r.status_code == 409
    assert r.json()["error"]["code"] == "nothing_to_undo"

    client.post(f"/sessions/{sid}/ops", json={
        "kind": "pivot-partition",
        "params": {"substrateId": 1, "axis": "horizontal", "attribute": "origin"},
    })
    assert client.post(f"/sessions/{sid}/undo").json()["log"]["cursor"] == 0
    assert client.post(f"/sessions/{sid}/redo").json()["log"]["cursor"] == 1
    assert client.post(f"/sessions/{sid}/redo").status_code == 409


def test_invalid_ops_are_400_with_codes(client):
    sid = upload_cars(client)["sessionId"]
    r = client.post(f"/sessions/{sid}/ops", json={"kind": "florp", "params": {}})
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "invalid_op"

    r = client.post(f"/sessions/{sid}/ops", json={
        "kind": "pivot-partition",
        "params": {"substrateId": 1, "axis": "horizontal", "attribute": "nope"},
    })
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "unknown_attribute"

    r = client.post(f"/sessions/{sid}/ops", json={"nonsense": True})
    assert r.status_code == 400


def test_unknown_ids_are_404(client):
    assert client.get("/sessions/doesnotexist").status_code == 404
    sid = upload_cars(client)["sessionId"]
    r = client.get(f"/sessions/{sid}/substrates/99/layout")
    assert r.status_code == 404
    assert r.json()["error"]["code"] == "unknown_substrate"


def test_histogram_endpoint(client):
    sid = upload_cars(client)["sessionId"]
    r = client.get(f"/sessions/{sid}/substrates/1/histogram", params={"attr": "origin"})
    assert r.status_code == 200
    bins = {b["category"]: b["count"] for b in r.json()["bins"]}
    assert bins == {"US": 14, "Europe": 8, "Asia": 10}


def test_export_endpoint_streams_csv(client):
    sid = upload_cars(client)["sessionId"]
    r = client.get(f"/sessions/{sid}/substrates/1/export")
    assert r.status_code == 200
    assert r.headers["content-type"].startswith("text/csv")
    assert "attachment" in r.headers["content-disposition"]
    rows = list(csv.reader(io.StringIO(r.text)))
    assert rows[0][0] == "name" and len(rows) == 33


def test_links_in_layout_for_network_session(client):
    handle = upload_papers(client)
    sid = handle["sessionId"]
    assert handle["dataset"]["hasEdges"] is True
    client.post(f"/sessions/{sid}/ops", json={
        "kind": "pivot-partition",
        "params": {"substrateId": 1, "axis": "horizontal", "attribute": "track"},
    })
    client.post(f"/sessions/{sid}/ops", json={
        "kind": "toggle-view", "params": {"substrateId": 1, "target": "links", "value": True},
    })
    layout = client.get(f"/sessions/{sid}/substrates/1/layout").json()
    assert len(layout["links"]) > 0
    total = sum(l["weight"] for l in layout["links"])
    assert total == 20.0  # sum of all fixture edge weights


def test_api_equals_library_digest(client, store):
    sid = upload_cars(client)["sessionId"]
    ops = [
        {"kind": "pivot-partition",
         "params": {"substrateId": 1, "axis": "horizontal", "attribute": "cylinders"}},
        {"kind": "pivot-partition",
         "params": {"substrateId": 1, "axis": "vertical", "attribute": "origin"}},
        {"kind": "prune-by-frequency",
         "params": {"substrateId": 1, "attribute": "origin", "minCount": 10}},
    ]
    for op in ops:
        assert client.post(f"/sessions/{sid}/ops", json=op).status_code == 200
    via_api = store.entry(sid)["session"]

    from aggsculpt import IngestConfig, open_session

    lib = open_session(IngestConfig(
        node_file=str(DATA / "cars.csv"),
        type_overrides={"cylinders": "nominal", "year": "nominal"},
    ))
    lib = pivot_partition(lib, 1, "horizontal", "cylinders")
    lib = pivot_partition(lib, 1, "vertical", "origin")
    lib = prune_by_frequency(lib, 1, "origin", 10)
    assert state_digest(via_api) == state_digest(lib)


def test_concurrent_ops_all_land(client, store):
    sid = upload_papers(client)["sessionId"]
    attrs = ["track", "year", "paper_id"]

    def hit(i):
        client.post(f"/sessions/{sid}/ops", json={
            "kind": "pivot-partition",
            "params": {"substrateId": 1, "axis": "horizontal", "attribute": attrs[i]},
        })

    threads = [threading.Thread(target=hit, args=(i,)) for i in range(3)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    session = store.entry(sid)["session"]
    assert len(session.log.entries) == 3
    assert set(session.substrate(1).h_axis) == set(attrs)


def test_lru_eviction(client, store):
    ids = [upload_cars(client)["sessionId"] for _ in range(5)]
    # store capacity is 4: the oldest session is gone
    assert client.get(f"/sessions/{ids[0]}").status_code == 404
    for sid in ids[1:]:
        assert client.get(f"/sessions/{sid}").status_code == 200


def test_upload_size_cap(store):
    capped = TestClient(create_app(store=store, max_upload=64))
    with open(DATA / "cars.csv", "rb") as fh:
        r = capped.post("/sessions", files={"nodes": ("cars.csv", fh, "text/csv")})
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "upload_too_large"


def test_bad_config_rejected(client):
    with open(DATA / "cars.csv", "rb") as fh:
        r = client.post("/sessions", files={"nodes": ("cars.csv", fh, "text/csv")},
                        data={"config": "{not json"})
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "bad_config"
