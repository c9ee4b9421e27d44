"""The recorded responses the composer UI replays must track the engine."""

from __future__ import annotations

import importlib.util
import json
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
SCRIPT = ROOT / "scripts" / "export_frontend_fixtures.py"
STUBS = ROOT / "frontend" / "test" / "fixtures" / "stubs.json"


@pytest.fixture(scope="module")
def exporter():
    spec = importlib.util.spec_from_file_location("export_frontend_fixtures",
                                                  SCRIPT)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


@pytest.fixture(scope="module")
def fresh(exporter):
    return exporter.build_stubs()


def test_committed_stubs_are_current(fresh):
    committed = json.loads(STUBS.read_text(encoding="utf-8"))
    assert committed == fresh, (
        "frontend/test/fixtures/stubs.json is stale; rerun "
        "scripts/export_frontend_fixtures.py")


def test_every_stub_answered_success(fresh):
    assert all(entry["status"] == 200 for entry in fresh["stubs"])


def test_item_candidates_are_covered(fresh):
    matches = {e["body"]["id"]: e["response"]["candidates"]
               for e in fresh["stubs"] if e["path"] == "/match"}
    assert matches == {
        "vt:BuildingName_B12": ["vt:BuildingLabel_Text_WS_3D_TextObject"],
        "vt:AirQualityValue_B12": ["vt:AirQuality_Scalar_VS_3D_ColoredBalls",
                                   "vt:Urban_Scalar_VS_3D_ColoredBalls"],
        "vt:NoiseLevel_B12": ["vt:Noise_Scalar_VS_3D_ColoredBalls",
                              "vt:Urban_Scalar_VS_3D_ColoredBalls"],
    }


def test_pinning_scenario_is_covered(fresh):
    checks = [e for e in fresh["stubs"] if e["path"] == "/check"]
    verdicts = [e["response"]["valid"] for e in checks]
    assert verdicts == [True, True, True, False, False, True, False, True]
    double_balls = checks[3]["response"]
    assert [c["rule"] for c in double_balls["conflicts"]] == [
        "unique-technique-per-location"]
    occlusion = checks[4]["response"]
    assert [c["rule"] for c in occlusion["conflicts"]] == ["no-slot-occlusion"]
    adopted = checks[5]["response"]
    assert adopted["score"] == pytest.approx(0.7666666666666667)
    swap_air, swap_noise = checks[6]["response"], checks[7]["response"]
    assert not swap_air["valid"] and swap_noise["valid"]


def test_rankings_cover_both_rule_modes(fresh):
    runs = [e for e in fresh["stubs"] if e["path"] == "/recommend"]
    assert len(runs) == 2
    with_rules, without_rules = runs
    assert "active_rules" not in with_rules["body"]
    assert without_rules["body"]["active_rules"] == []
    assert [round(p["score"], 5)
            for p in with_rules["response"]["plans"]] == [
        0.76667, 0.73333, 0.66667]
    assert [round(p["score"], 5)
            for p in without_rules["response"]["plans"]] == [
        0.76667, 0.73333, 0.7, 0.66667]
