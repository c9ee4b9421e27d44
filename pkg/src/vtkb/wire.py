"""JSON encoding and decoding for the external interfaces.

Every document shape the CLI prints and the HTTP service serves lives
here, so the two stay in lockstep. Encoders take the in-memory records
and return plain dict/list structures; decoders validate incoming
payloads and raise WireFormatError with a dotted path to the offending
field.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from .matching import MatchReport
from .model import KnowledgeBase, LiteralValue, Severity, canonical, instances_of
from .model import (
    DATA_TYPE_CONCEPT,
    ISSUE_CONCEPT,
    TECHNIQUE_CONCEPT,
    URBAN_OBJECT_CONCEPT,
)
from .model import AnchorSlot, Violation
from .queries import BindingSet, BoundValue, EntityRef
from .rules import Conflict, Placement
from .selection import CheckResult, RankedPlan, SceneSpec
from .views import (
    Coordinates2D,
    Coordinates3D,
    DataItem,
    GeoName,
    Geolocation,
    ObjectAnchored,
    TechniqueSpec,
)


class WireFormatError(ValueError):
    """A request payload that does not fit the documented shape."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.message = message


def dump_json(document: Any) -> str:
    """The canonical pretty-printed form used by the CLI."""
    return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------
# Decoding helpers
# ---------------------------------------------------------------------

def _require_object(doc: Any, path: str) -> Mapping[str, Any]:
    if not isinstance(doc, Mapping):
        raise WireFormatError(path, "expected a JSON object")
    return doc


def _get_string(doc: Mapping[str, Any], key: str, path: str) -> str:
    value = doc.get(key)
    if not isinstance(value, str) or not value:
        raise WireFormatError(f"{path}.{key}", "expected a non-empty string")
    return value


def _get_optional_string(doc: Mapping[str, Any], key: str, path: str) -> str | None:
    value = doc.get(key)
    if value is None:
        return None
    if not isinstance(value, str):
        raise WireFormatError(f"{path}.{key}", "expected a string or null")
    return value


def _get_number(doc: Mapping[str, Any], key: str, path: str) -> float:
    value = doc.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise WireFormatError(f"{path}.{key}", "expected a number")
    return float(value)


# ---------------------------------------------------------------------
# Geolocation
# ---------------------------------------------------------------------

def encode_geolocation(location: Geolocation) -> dict[str, Any]:
    if isinstance(location, Coordinates2D):
        return {"kind": location.kind, "x": location.x, "y": location.y}
    if isinstance(location, Coordinates3D):
        return {"kind": location.kind, "x": location.x, "y": location.y,
                "z": location.z}
    if isinstance(location, GeoName):
        return {"kind": location.kind, "name": location.name}
    return {"kind": location.kind, "object": location.urban_object}


def decode_geolocation(doc: Any, path: str = "geolocation") -> Geolocation:
    body = _require_object(doc, path)
    kind = _get_string(body, "kind", path)
    if kind == "Coordinates2D":
        return Coordinates2D(x=_get_number(body, "x", path),
                             y=_get_number(body, "y", path))
    if kind == "Coordinates3D":
        return Coordinates3D(x=_get_number(body, "x", path),
                             y=_get_number(body, "y", path),
                             z=_get_number(body, "z", path))
    if kind == "GeoName":
        return GeoName(name=_get_string(body, "name", path))
    if kind == "ObjectAnchored":
        return ObjectAnchored(urban_object=_get_string(body, "object", path))
    raise WireFormatError(f"{path}.kind", f"unknown geolocation kind {kind!r}")


# ---------------------------------------------------------------------
# Data items and scenes
# ---------------------------------------------------------------------

def encode_data_item(item: DataItem) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "id": item.id,
        "data_type": item.data_type,
        "issue": item.issue,
        "geolocation": encode_geolocation(item.geolocation),
    }
    if item.format is not None:
        doc["format"] = item.format
    if item.urban_object is not None:
        doc["urban_object"] = item.urban_object
    return doc


def decode_data_item(doc: Any, path: str = "data_item") -> DataItem:
    body = _require_object(doc, path)
    geolocation = body.get("geolocation")
    if geolocation is None:
        raise WireFormatError(f"{path}.geolocation", "expected a JSON object")
    return DataItem(
        id=_get_string(body, "id", path),
        data_type=_get_string(body, "data_type", path),
        geolocation=decode_geolocation(geolocation, f"{path}.geolocation"),
        issue=_get_optional_string(body, "issue", path),
        format=_get_optional_string(body, "format", path),
        urban_object=_get_optional_string(body, "urban_object", path),
    )


def encode_scene(scene: SceneSpec) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "data_items": [encode_data_item(item) for item in scene.data_items],
        "task": scene.task,
        "context": scene.context,
    }
    if scene.active_rules is not None:
        doc["active_rules"] = list(scene.active_rules)
    return doc


def decode_scene(doc: Any, path: str = "scene") -> SceneSpec:
    body = _require_object(doc, path)
    raw_items = body.get("data_items")
    if not isinstance(raw_items, list):
        raise WireFormatError(f"{path}.data_items", "expected an array")
    items = tuple(decode_data_item(raw, f"{path}.data_items[{i}]")
                  for i, raw in enumerate(raw_items))
    active = body.get("active_rules")
    if active is not None:
        if not isinstance(active, list) or any(not isinstance(r, str) for r in active):
            raise WireFormatError(f"{path}.active_rules",
                                  "expected an array of rule ids")
        active = tuple(active)
    try:
        return SceneSpec(
            data_items=items,
            task=_get_string(body, "task", path),
            context=_get_string(body, "context", path),
            active_rules=active,
        )
    except ValueError as exc:
        raise WireFormatError(f"{path}.data_items", str(exc)) from None


def decode_plan(doc: Any, path: str = "plan") \
        -> list[tuple[str, str, AnchorSlot | None]]:
    """Placement triples for a plan check; slot is optional per entry."""
    body = _require_object(doc, path)
    raw = body.get("placements")
    if not isinstance(raw, list):
        raise WireFormatError(f"{path}.placements", "expected an array")
    placements: list[tuple[str, str, AnchorSlot | None]] = []
    slots = {s.value: s for s in AnchorSlot}
    for i, entry in enumerate(raw):
        entry_path = f"{path}.placements[{i}]"
        entry_body = _require_object(entry, entry_path)
        data = _get_string(entry_body, "data", entry_path)
        technique = _get_string(entry_body, "technique", entry_path)
        slot_name = _get_optional_string(entry_body, "slot", entry_path)
        slot: AnchorSlot | None = None
        if slot_name is not None:
            slot = slots.get(slot_name)
            if slot is None:
                raise WireFormatError(f"{entry_path}.slot",
                                      f"unknown anchor slot {slot_name!r}")
        placements.append((data, technique, slot))
    return placements


# ---------------------------------------------------------------------
# Techniques
# ---------------------------------------------------------------------

def encode_technique(spec: TechniqueSpec) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "id": spec.id,
        "accepted_data_type": spec.accepted_data_type,
        "applicable_issues": list(spec.applicable_issues),
        "output_location": {
            "space": spec.output_location.space.value,
            "dimensionality": spec.output_location.dimensionality.value,
            "anchor_slot": spec.output_location.anchor_slot.value,
        },
        "visual_attributes": {name: value
                              for name, value in spec.visual_attributes},
    }
    if spec.visualization_abstraction is not None:
        doc["visualization_abstraction"] = spec.visualization_abstraction
    if spec.reference is not None:
        doc["reference"] = spec.reference
    if spec.example is not None:
        doc["example"] = spec.example
    return doc


# ---------------------------------------------------------------------
# Plans, conflicts, checks
# ---------------------------------------------------------------------

def _encode_conflict_placement(placement: Placement) -> dict[str, Any]:
    return {
        "data": placement.data,
        "technique": placement.technique,
        "slot": placement.resolved_slot.value,
    }


def encode_conflict(conflict: Conflict) -> dict[str, Any]:
    first, second = conflict.placements
    return {
        "rule": conflict.rule,
        "severity": conflict.severity.value,
        "placements": [_encode_conflict_placement(first),
                       _encode_conflict_placement(second)],
        "message": conflict.message,
    }


def encode_ranked_plan(ranked: RankedPlan) -> dict[str, Any]:
    placements = []
    for scored in ranked.per_placement:
        placement = scored.placement
        placements.append({
            "data": placement.data,
            "technique": placement.technique,
            "slot": placement.resolved_slot.value,
            "usability": scored.usability,
            "source": scored.source.value,
        })
    return {
        "score": ranked.score,
        "placements": placements,
        "warnings": [c.message for c in ranked.conflicts
                     if c.severity is Severity.WARN],
    }


def encode_recommendation(plans: list[RankedPlan]) -> dict[str, Any]:
    return {"plans": [encode_ranked_plan(plan) for plan in plans]}


def encode_check(result: CheckResult) -> dict[str, Any]:
    return {
        "valid": result.valid,
        "conflicts": [encode_conflict(c) for c in result.conflicts],
        "score": result.score,
    }


# ---------------------------------------------------------------------
# Queries and matching
# ---------------------------------------------------------------------

def _encode_cell(value: BoundValue) -> Any:
    if isinstance(value, EntityRef):
        return {"id": value.id}
    return value


def encode_bindings(result: BindingSet) -> dict[str, Any]:
    return {
        "variables": [str(v) for v in result.variables],
        "rows": [[_encode_cell(cell) for cell in row] for row in result.rows],
    }


def render_cell(value: BoundValue) -> str:
    """Plain-text form of one query result cell (CLI output)."""
    if isinstance(value, EntityRef):
        return value.id
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        from .textio import format_number
        return format_number(value)
    return value


def encode_match_report(report: MatchReport) -> dict[str, Any]:
    return {
        "technique": report.technique,
        "verdict": report.verdict.value,
        "criteria": [{
            "criterion": entry.criterion,
            "passed": entry.passed,
            "explanation": entry.explanation,
        } for entry in report.criteria],
    }


def encode_match_response(candidate_ids: list[str],
                          reports: list[MatchReport]) -> dict[str, Any]:
    return {
        "candidates": list(candidate_ids),
        "reports": [encode_match_report(r) for r in reports],
    }


# ---------------------------------------------------------------------
# Summary
# ---------------------------------------------------------------------

def encode_violation(violation: Violation) -> dict[str, Any]:
    return {
        "location": violation.location,
        "kind": violation.kind,
        "message": violation.message,
    }


def encode_summary(kb: KnowledgeBase,
                   violations: list[Violation]) -> dict[str, Any]:
    def safe_instances(concept: str) -> list[str]:
        if not kb.has_concept(concept):
            return []
        return list(instances_of(kb, concept))

    return {
        "violations": [encode_violation(v) for v in violations],
        "concept_count": len(kb.taxonomy.concepts),
        "individual_count": len(kb.individuals),
        "data_types": safe_instances(DATA_TYPE_CONCEPT),
        "issues": safe_instances(ISSUE_CONCEPT),
        "urban_objects": safe_instances(URBAN_OBJECT_CONCEPT),
        "techniques": safe_instances(TECHNIQUE_CONCEPT),
        "tasks": [t.id for t in kb.tasks],
        "contexts": [c.id for c in kb.contexts],
        "rules": [{"id": r.id, "severity": r.severity.value} for r in kb.rules],
    }
