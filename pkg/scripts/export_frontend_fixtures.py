#!/usr/bin/env python3
"""Regenerate the recorded HTTP responses the composer UI tests replay.

The composer's test suite stubs fetch() with responses recorded from the
real service over the demo knowledge base, so its assertions track the
engine without running a live server. Each stub entry carries the exact
request the UI issues (method, path, JSON body) and the response the
service returned for it.

Run from the repository root:

    python3 scripts/export_frontend_fixtures.py [output_dir]

The default output directory is frontend/test/fixtures.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
DEFAULT_OUT = ROOT / "frontend" / "test" / "fixtures"

AIR = "vt:AirQualityValue_B12"
LABEL = "vt:BuildingName_B12"
NOISE = "vt:NoiseLevel_B12"
AIR_BALLS = "vt:AirQuality_Scalar_VS_3D_ColoredBalls"
NOISE_BALLS = "vt:Noise_Scalar_VS_3D_ColoredBalls"
URBAN_BALLS = "vt:Urban_Scalar_VS_3D_ColoredBalls"
TEXT_OBJECT = "vt:BuildingLabel_Text_WS_3D_TextObject"


def plan_body(scene: dict, placements: list[dict]) -> dict:
    return {"scene": scene, "plan": {"placements": placements}}


def pin(data: str, technique: str, slot: str | None = None) -> dict:
    entry = {"data": data, "technique": technique}
    if slot is not None:
        entry["slot"] = slot
    return entry


def build_stubs() -> dict[str, Any]:
    from fastapi.testclient import TestClient

    from vtkb import parse_kb
    from vtkb.service import create_app

    kb = parse_kb((FIXTURES / "composer_demo.vtkb").read_text(encoding="utf-8"))
    client = TestClient(create_app(kb))
    scene = json.loads((FIXTURES / "scene_b12.json").read_text(encoding="utf-8"))
    scene_no_rules = scene | {"active_rules": []}
    item = {doc["id"]: doc for doc in scene["data_items"]}

    requests: list[tuple[str, str, Any]] = [
        ("GET", "/kb/summary", None),
        ("GET", "/techniques", None),
        # adding an item asks the service for its candidate techniques
        ("POST", "/match", item[LABEL]),
        ("POST", "/match", item[AIR]),
        ("POST", "/match", item[NOISE]),
        ("POST", "/recommend", scene),
        ("POST", "/recommend", scene_no_rules),
        # pin feedback: the UI re-checks the pinned set itself ...
        ("POST", "/check", plan_body(scene, [pin(AIR, URBAN_BALLS)])),
        # ... and every still-open candidate against the pinned set,
        # including the pinned item's own alternatives
        ("POST", "/check", plan_body(scene, [pin(AIR, AIR_BALLS)])),
        ("POST", "/check", plan_body(scene, [pin(AIR, URBAN_BALLS),
                                             pin(NOISE, NOISE_BALLS)])),
        ("POST", "/check", plan_body(scene, [pin(AIR, URBAN_BALLS),
                                             pin(NOISE, URBAN_BALLS)])),
        ("POST", "/check", plan_body(scene, [pin(AIR, URBAN_BALLS),
                                             pin(LABEL, TEXT_OBJECT)])),
        # adopting the top ranked plan submits its placements verbatim,
        # slots included
        ("POST", "/check", plan_body(scene, [
            pin(AIR, AIR_BALLS, "Volume"),
            pin(LABEL, TEXT_OBJECT, "TopOfObject"),
            pin(NOISE, URBAN_BALLS, "Volume"),
        ])),
        # hypothetical swaps explored from the adopted plan; a fresh
        # selection carries no slot, adopted placements keep theirs
        ("POST", "/check", plan_body(scene, [
            pin(AIR, URBAN_BALLS),
            pin(LABEL, TEXT_OBJECT, "TopOfObject"),
            pin(NOISE, URBAN_BALLS, "Volume"),
        ])),
        ("POST", "/check", plan_body(scene, [
            pin(AIR, AIR_BALLS, "Volume"),
            pin(LABEL, TEXT_OBJECT, "TopOfObject"),
            pin(NOISE, NOISE_BALLS),
        ])),
    ]

    entries = []
    for method, path, body in requests:
        if method == "GET":
            response = client.get(path)
        else:
            response = client.post(path, json=body)
        entries.append({
            "method": method,
            "path": path,
            "body": body,
            "status": response.status_code,
            "response": response.json(),
        })
    return {"scene": scene, "stubs": entries}


def main(argv: list[str]) -> int:
    out_dir = Path(argv[1]) if len(argv) > 1 else DEFAULT_OUT
    out_dir.mkdir(parents=True, exist_ok=True)
    document = build_stubs()
    text = json.dumps(document, indent=2, sort_keys=True,
                      ensure_ascii=False) + "\n"
    target = out_dir / "stubs.json"
    target.write_text(text, encoding="utf-8")
    print(f"wrote {target} ({len(document['stubs'])} stubbed requests)")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
