from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from conftest import build_scene
from lotforge import fixtures
from lotforge.codec import decode_scene, encode_scene
from lotforge.scene import DEFAULT_LOT, create_scene
from lotforge.service import create_app


@pytest.fixture()
def client(tmp_path):
    app = create_app(tmp_path / "data", seed=42)
    with TestClient(app) as c:
        yield c


def post_scene(client, scene) -> str:
    response = client.post("/api/scenes", content=encode_scene(scene))
    assert response.status_code == 201, response.text
    return response.json()["scene_id"]


def test_catalog_endpoint_serves_twelve_scenarios(client):
    doc = client.get("/api/catalog").json()
    assert len(doc["scenarios"]) == 12
    assert any(e["entry_id"] == "goat" for e in doc["entries"])


def test_scene_save_get_round_trip(client, catalog):
    scene = build_scene(catalog, [("tree.oak", 10, 10), ("bench.basic", 20, 12, 90)])
    scene_id = post_scene(client, scene)
    fetched = decode_scene(client.get(f"/api/scenes/{scene_id}").text)
    assert fetched == scene


def test_get_unknown_scene_is_404(client):
    response = client.get("/api/scenes/missing")
    assert response.status_code == 404
    body = response.json()
    assert body["code"] == "not-found" and "message" in body


def test_save_invalid_scene_is_422_with_issues(client):
    document = json.dumps({
        "format_version": "1",
        "lot": {"width": 40, "depth": 30, "location_tag": "x"},
        "scenario_id": None,
        "instances": [
            {"id": "i0001", "entry": "ghost", "x": 5, "y": 5, "rot": 0, "scale": 1},
        ],
    })
    response = client.post("/api/scenes", content=document)
    assert response.status_code == 422
    body = response.json()
    assert body["code"] == "invalid-scene"
    assert any(d["code"] == "unknown-entry" for d in body["details"])


def test_save_malformed_document_is_422(client):
    response = client.post("/api/scenes", content="{not json")
    assert response.status_code == 422
    assert response.json()["code"] == "bad-document"


def test_practice_round_trip_and_gate(client):
    practice_doc = client.get("/api/practice").json()
    assert practice_doc["tolerances"]["pos_eps"] == 1.0
    report = client.post(
        "/api/scenes/validate-practice", content=practice_doc["scene"]
    ).json()
    assert report["passed"] is True
    assert report["missing"] == [] and report["extras"] == []


def test_practice_gate_fails_empty_candidate(client):
    empty = create_scene(DEFAULT_LOT)
    report = client.post(
        "/api/scenes/validate-practice", content=encode_scene(empty)
    ).json()
    assert report["passed"] is False
    assert len(report["missing"]) == len(fixtures.practice_scene().instances)


def test_practice_gate_fails_on_extra_goat(client, catalog):
    from lotforge.scene import Pose, Vec2, add_element

    candidate, _ = add_element(
        fixtures.practice_scene(), "goat", Pose(Vec2(5, 5)), catalog
    )
    report = client.post(
        "/api/scenes/validate-practice", content=encode_scene(candidate)
    ).json()
    assert report["passed"] is False
    assert len(report["extras"]) == 1


def test_score_endpoint_empty_scene_floor(client):
    scene_id = post_scene(client, create_scene(DEFAULT_LOT))
    response = client.get(f"/api/scenes/{scene_id}/score")
    assert response.status_code == 200
    assert "ETag" in response.headers
    scores = response.json()["scores"]
    assert all(v == 1.0 for v in scores.values())


def test_score_endpoint_matches_golden(client):
    scene_id = post_scene(client, fixtures.garden_demo_scene())
    scores = client.get(f"/api/scenes/{scene_id}/score").json()["scores"]
    for metric, expected in fixtures.garden_demo_scores()["scores"].items():
        assert scores[metric] == pytest.approx(expected, abs=1e-5)


def test_plan_endpoint_serves_svg(client):
    scene_id = post_scene(client, create_scene(DEFAULT_LOT))
    response = client.get(f"/api/scenes/{scene_id}/plan.svg")
    assert response.status_code == 200
    assert response.headers["content-type"].startswith("image/svg+xml")
    assert 'id="scale-bar"' in response.text
    assert "<circle" not in response.text

    bad = client.get(f"/api/scenes/{scene_id}/plan.svg", params={"sun": "oops"})
    assert bad.status_code == 400
    assert bad.json()["code"] == "bad-sun"


def test_assignment_idempotent_and_round_robin(client):
    first = client.post("/api/assignments", json={"participant_id": "p1"}).json()
    again = client.post("/api/assignments", json={"participant_id": "p1"}).json()
    assert first == again
    second = client.post("/api/assignments", json={"participant_id": "p2"}).json()
    third = client.post("/api/assignments", json={"participant_id": "p3"}).json()
    assert [first["group"], second["group"], third["group"]] == ["A", "B", "C"]
    for assignment in (first, second, third):
        group = assignment["group"]
        assert sorted(assignment["scenario_order"]) == [f"{group}{n}" for n in range(1, 5)]


def test_assignment_permutation_property(client):
    for i in range(60):
        body = client.post(
            "/api/assignments", json={"participant_id": f"bulk-{i}"}
        ).json()
        group = body["group"]
        assert sorted(body["scenario_order"]) == [f"{group}{n}" for n in range(1, 5)]


def test_assignment_rejects_blank_participant(client):
    response = client.post("/api/assignments", json={"participant_id": "  "})
    assert response.status_code == 422


def test_submission_flow(client, catalog):
    assignment = client.post("/api/assignments", json={"participant_id": "p1"}).json()
    scenario_id = assignment["scenario_order"][0]
    scene = build_scene(catalog, [("tree.oak", 10, 10)], scenario=scenario_id)
    scene_id = post_scene(client, scene)

    ok = client.post("/api/submissions", json={
        "participant_id": "p1", "scenario_id": scenario_id, "scene_id": scene_id,
    })
    assert ok.status_code == 201
    first_submission = ok.json()["submission_id"]

    # resubmission allowed, new id
    again = client.post("/api/submissions", json={
        "participant_id": "p1", "scenario_id": scenario_id, "scene_id": scene_id,
    })
    assert again.status_code == 201
    assert again.json()["submission_id"] != first_submission

    # a scenario outside the participant's group conflicts (p1 got group A)
    conflict = client.post("/api/submissions", json={
        "participant_id": "p1", "scenario_id": "B1", "scene_id": scene_id,
    })
    assert conflict.status_code == 409

    missing = client.post("/api/submissions", json={
        "participant_id": "p1", "scenario_id": scenario_id, "scene_id": "nope",
    })
    assert missing.status_code == 404


def test_submission_stores_server_plan_svg(tmp_path, catalog):
    data_dir = tmp_path / "data"
    app = create_app(data_dir, seed=1)
    with TestClient(app) as client:
        assignment = client.post("/api/assignments", json={"participant_id": "p1"}).json()
        scenario_id = assignment["scenario_order"][0]
        scene_id = post_scene(client, build_scene(catalog, [("tree.oak", 10, 10)]))
        client.post("/api/submissions", json={
            "participant_id": "p1", "scenario_id": scenario_id,
            "scene_id": scene_id, "screenshot": "ZmFrZS1wbmc=",
        })
    service = app.state.service
    record = service.store.all("submission")[0]
    assert record["body"]["plan_svg"].startswith("<svg")
    assert record["body"]["screenshot"] == "ZmFrZS1wbmc="


def test_records_survive_restart(tmp_path, catalog):
    data_dir = tmp_path / "data"
    scene = build_scene(catalog, [("goat", 12, 12)])

    app1 = create_app(data_dir, seed=7)
    with TestClient(app1) as client:
        scene_id = post_scene(client, scene)
        assignment = client.post("/api/assignments", json={"participant_id": "px"}).json()

    app2 = create_app(data_dir, seed=7)
    with TestClient(app2) as client:
        assert decode_scene(client.get(f"/api/scenes/{scene_id}").text) == scene
        again = client.post("/api/assignments", json={"participant_id": "px"}).json()
        assert again == assignment  # identical shape incl. issued_at


def test_gets_do_not_mutate(client):
    scene_id = post_scene(client, create_scene(DEFAULT_LOT))
    store = client.app.state.service.store
    counts = {k: store.count(k) for k in ("scene", "submission", "assignment")}
    client.get("/api/catalog")
    client.get("/api/practice")
    client.get(f"/api/scenes/{scene_id}")
    client.get(f"/api/scenes/{scene_id}/score")
    client.get(f"/api/scenes/{scene_id}/plan.svg")
    assert {k: store.count(k) for k in counts} == counts
