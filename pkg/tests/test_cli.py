from __future__ import annotations

import json
import signal
import socket
import subprocess
import sys
import time

import httpx
import pytest
from click.testing import CliRunner

from conftest import build_scene
from lotforge import fixtures
from lotforge.cli import main
from lotforge.codec import encode_scene
from lotforge.scene import DEFAULT_LOT, create_scene


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def scene_file(tmp_path, catalog):
    path = tmp_path / "scene.json"
    path.write_text(encode_scene(build_scene(catalog, [("tree.oak", 10, 10)])))
    return path


def write_scene(tmp_path, scene, name="s.json"):
    path = tmp_path / name
    path.write_text(encode_scene(scene))
    return path


def test_validate_ok(runner, scene_file):
    result = runner.invoke(main, ["validate", str(scene_file)])
    assert result.exit_code == 0
    assert "0 issues" in result.output


def test_validate_dangling_entry_exits_1(runner, tmp_path, scene_file):
    text = scene_file.read_text().replace("tree.oak", "ghost")
    bad = tmp_path / "bad.json"
    bad.write_text(text)
    result = runner.invoke(main, ["validate", str(bad)])
    assert result.exit_code == 1
    assert "unknown-entry" in result.output


def test_validate_missing_file_exits_2(runner, tmp_path):
    result = runner.invoke(main, ["validate", str(tmp_path / "nope.json")])
    assert result.exit_code == 2


def test_score_empty_scene_prints_floor(runner, tmp_path):
    path = write_scene(tmp_path, create_scene(DEFAULT_LOT))
    result = runner.invoke(main, ["score", str(path)])
    assert result.exit_code == 0
    lines = [l for l in result.output.splitlines() if l.strip()]
    assert len(lines) == 8
    assert all(line.endswith("1.00") for line in lines)


def test_score_golden_fixture_json(runner, tmp_path):
    path = write_scene(tmp_path, fixtures.garden_demo_scene())
    result = runner.invoke(main, ["score", str(path), "--format", "json"])
    assert result.exit_code == 0
    scores = json.loads(result.output)["scores"]
    for metric, expected in fixtures.garden_demo_scores()["scores"].items():
        assert scores[metric] == pytest.approx(expected, abs=1e-5)


def test_score_breakdown_mentions_shaded_fraction(runner, scene_file):
    result = runner.invoke(main, ["score", str(scene_file), "--breakdown"])
    assert result.exit_code == 0
    assert "shaded fraction" in result.output


def test_render_writes_deterministic_svg(runner, tmp_path, scene_file):
    out1 = tmp_path / "a.svg"
    out2 = tmp_path / "b.svg"
    for out in (out1, out2):
        result = runner.invoke(main, [
            "render", str(scene_file), "-o", str(out), "--sun", "45,180",
        ])
        assert result.exit_code == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert b"polygon" in out1.read_bytes()  # the shadow


def test_render_bad_sun_exits_2(runner, tmp_path, scene_file):
    result = runner.invoke(main, [
        "render", str(scene_file), "-o", str(tmp_path / "x.svg"), "--sun", "120,bad",
    ])
    assert result.exit_code == 2


def test_analyze_reproduces_agreement(runner, tmp_path):
    ratings = tmp_path / "ratings.csv"
    fixtures.write_reference_ratings_csv(ratings)
    out_dir = tmp_path / "report"
    result = runner.invoke(main, ["analyze", str(ratings), "-o", str(out_dir)])
    assert result.exit_code == 0
    assert "agreement: 9/12" in result.output
    assert "excluded 0 raters" in result.output
    assert (out_dir / "report.json").exists()
    doc = json.loads((out_dir / "report.json").read_text())
    assert doc["disagreements"] == ["A2", "C1", "C4"]


def test_analyze_notes_excluded_raters(runner, tmp_path):
    rows = ["rater_id,design_id,scenario_id,metric,value,is_attention_check,expected_value"]
    for metric in ("shade", "play", "comfort", "safety", "nature",
                   "recreation", "entertainment", "sociability"):
        rows.append(f"good,A1-d1,A1,{metric},4,false,")
        rows.append(f"cheat,A1-d1,A1,{metric},4,false,")
    rows.append("cheat,A1-d1,A1,shade,1,true,7")
    rows.append("cheat,A1-d1,A1,shade,1,true,7")
    rows.append("good,A1-d1,A1,shade,7,true,7")
    path = tmp_path / "r.csv"
    path.write_text("\n".join(rows) + "\n")
    result = runner.invoke(main, ["analyze", str(path)])
    assert result.exit_code == 0
    assert "excluded 1 rater(s)" in result.output
    assert "cheat" in result.output


def test_analyze_empty_csv_exits_2(runner, tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    result = runner.invoke(main, ["analyze", str(path)])
    assert result.exit_code == 2


def test_analyze_bad_row_cites_row_number(runner, tmp_path):
    path = tmp_path / "r.csv"
    path.write_text(
        "rater_id,design_id,scenario_id,metric,value,is_attention_check,expected_value\n"
        "r1,d1,A1,shade,9,false,\n"
    )
    result = runner.invoke(main, ["analyze", str(path)])
    assert result.exit_code == 2
    assert "row 2" in result.output


def test_analyze_with_responses(runner, tmp_path):
    ratings = tmp_path / "ratings.csv"
    fixtures.write_reference_ratings_csv(ratings)
    responses = tmp_path / "responses.csv"
    responses.write_text(
        "rater_id,design_id,scenario_id,text\n"
        "r1,d1,A4,we would plant vegetables in the community garden\n"
        "r2,d1,A4,park\n"
    )
    result = runner.invoke(main, [
        "analyze", str(ratings), "--responses", str(responses), "--format", "json",
    ])
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert doc["capture"]["A4"] == {
        "direct": 1, "indirect": 0, "uncaptured": 0, "discarded": 1,
    }


def test_serve_busy_port_exits_2(runner, tmp_path):
    blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    blocker.bind(("127.0.0.1", 0))
    port = blocker.getsockname()[1]
    try:
        result = runner.invoke(main, [
            "serve", "--port", str(port), "--data-dir", str(tmp_path / "data"),
        ])
        assert result.exit_code == 2
    finally:
        blocker.close()


def _free_port() -> int:
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]
    probe.close()
    return port


def _wait_ready(port: int, timeout: float = 15.0) -> None:
    deadline = time.time() + timeout
    while time.time() < deadline:
        try:
            httpx.get(f"http://127.0.0.1:{port}/api/catalog", timeout=1.0)
            return
        except httpx.HTTPError:
            time.sleep(0.1)
    raise RuntimeError("service did not come up")


def _spawn(port: int, data_dir) -> subprocess.Popen:
    return subprocess.Popen(
        [sys.executable, "-m", "lotforge", "--quiet", "serve",
         "--port", str(port), "--data-dir", str(data_dir)],
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL,
    )


def test_serve_round_trip_and_restart_durability(tmp_path, catalog):
    port = _free_port()
    data_dir = tmp_path / "data"
    scene_doc = encode_scene(build_scene(catalog, [("goat", 10, 10)]))

    proc = _spawn(port, data_dir)
    try:
        _wait_ready(port)
        base = f"http://127.0.0.1:{port}"
        catalog_doc = httpx.get(f"{base}/api/catalog").json()
        assert len(catalog_doc["scenarios"]) == 12
        scene_id = httpx.post(f"{base}/api/scenes", content=scene_doc).json()["scene_id"]
    finally:
        proc.send_signal(signal.SIGTERM)
        proc.wait(timeout=10)

    proc = _spawn(port, data_dir)
    try:
        _wait_ready(port)
        fetched = httpx.get(f"http://127.0.0.1:{port}/api/scenes/{scene_id}")
        assert fetched.status_code == 200
        assert json.loads(fetched.text) == json.loads(scene_doc)
    finally:
        proc.send_signal(signal.SIGTERM)
        proc.wait(timeout=10)
