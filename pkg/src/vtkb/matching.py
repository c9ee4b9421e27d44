"""Effectivity matching: which techniques can display a given data item.

Three criteria decide a match. The data type must sit at or below the
technique's accepted type, the item's issue must be covered (or the
technique must be issue-generic), and the technique's anchor slot must
be compatible with the item's geolocation form. The compatibility table
is deliberately small:

    Volume, TopOfObject, SideOfObject  ->  Coordinates3D or ObjectAnchored
    Surface                            ->  Coordinates2D, GeoName, or ObjectAnchored
    Overlay (and any screen-space)     ->  any geolocation
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .model import (
    AnchorSlot,
    KnowledgeBase,
    OutputSpace,
    SubsumptionClosure,
    UnknownTechnique,
    canonical,
    subsumption_path,
)
from .views import (
    Coordinates2D,
    Coordinates3D,
    DataItem,
    GeoName,
    Geolocation,
    InvalidIndividual,
    ObjectAnchored,
    TechniqueSpec,
    technique_from_individual,
    technique_ids,
)

CRITERION_DATA_TYPE = "data_type"
CRITERION_ISSUE = "issue"
CRITERION_LOCATION = "location_compatibility"


class Verdict(Enum):
    MATCH = "Match"
    REJECT = "Reject"


@dataclass(frozen=True)
class CriterionResult:
    criterion: str
    passed: bool
    explanation: str


@dataclass(frozen=True)
class MatchReport:
    """Per-criterion account of why a technique matches a data item or not."""

    technique: str
    verdict: Verdict
    criteria: tuple[CriterionResult, ...]


def location_compatible(slot: AnchorSlot, space: OutputSpace,
                        geolocation: Geolocation) -> bool:
    if space is OutputSpace.SCREEN_SPACE or slot is AnchorSlot.OVERLAY:
        return True
    if slot in (AnchorSlot.VOLUME, AnchorSlot.TOP_OF_OBJECT, AnchorSlot.SIDE_OF_OBJECT):
        return isinstance(geolocation, (Coordinates3D, ObjectAnchored))
    if slot is AnchorSlot.SURFACE:
        return isinstance(geolocation, (Coordinates2D, GeoName, ObjectAnchored))
    return False


def _subsumes(closure: SubsumptionClosure, sub: str, sup: str) -> bool:
    if canonical(sub) not in closure.supers_by_concept:
        return False
    if canonical(sup) not in closure.supers_by_concept:
        return False
    return closure.is_subconcept(sub, sup)


def _chain_text(kb: KnowledgeBase, sub: str, sup: str) -> str:
    path = subsumption_path(kb.taxonomy, sub, sup)
    if path is None or len(path) == 1:
        return canonical(sub)
    return " -> ".join(path)


def _criterion_results(kb: KnowledgeBase, closure: SubsumptionClosure,
                       item: DataItem, tech: TechniqueSpec) -> tuple[CriterionResult, ...]:
    results: list[CriterionResult] = []

    type_ok = _subsumes(closure, item.data_type, tech.accepted_data_type)
    if type_ok:
        type_note = (f"{item.data_type} is at or below accepted type "
                     f"{tech.accepted_data_type}: "
                     f"{_chain_text(kb, item.data_type, tech.accepted_data_type)}")
    else:
        type_note = (f"{item.data_type} is not at or below accepted type "
                     f"{tech.accepted_data_type}")
    results.append(CriterionResult(CRITERION_DATA_TYPE, type_ok, type_note))

    if not tech.applicable_issues:
        issue_ok = True
        issue_note = "technique is issue-generic"
    elif item.issue is None:
        issue_ok = False
        issue_note = ("item carries no issue but the technique is limited to: "
                      + ", ".join(tech.applicable_issues))
    else:
        covering = [i for i in tech.applicable_issues
                    if _subsumes(closure, item.issue, i)]
        issue_ok = bool(covering)
        if issue_ok:
            issue_note = (f"{item.issue} is covered by {covering[0]}: "
                          f"{_chain_text(kb, item.issue, covering[0])}")
        else:
            issue_note = (f"{item.issue} is not under any of: "
                          + ", ".join(tech.applicable_issues))
    results.append(CriterionResult(CRITERION_ISSUE, issue_ok, issue_note))

    slot = tech.output_location.anchor_slot
    space = tech.output_location.space
    loc_ok = location_compatible(slot, space, item.geolocation)
    kind = type(item.geolocation).kind
    if loc_ok:
        loc_note = f"slot {slot.value} accepts a {kind} geolocation"
    else:
        loc_note = f"slot {slot.value} does not accept a {kind} geolocation"
    results.append(CriterionResult(CRITERION_LOCATION, loc_ok, loc_note))
    return tuple(results)


def candidates(kb: KnowledgeBase, closure: SubsumptionClosure,
               item: DataItem) -> list[str]:
    """Technique ids able to display the item, sorted canonically.

    Technique individuals that cannot be projected into a TechniqueSpec
    are skipped; validate() and match_report() surface their problems.
    """
    out: list[str] = []
    for tech_id in technique_ids(kb):
        try:
            tech = technique_from_individual(kb, tech_id)
        except InvalidIndividual:
            continue
        if all(c.passed for c in _criterion_results(kb, closure, item, tech)):
            out.append(tech.id)
    return sorted(out, key=canonical)


def match_report(kb: KnowledgeBase, closure: SubsumptionClosure,
                 item: DataItem, technique_id: str) -> MatchReport:
    """Full per-criterion report for one technique against one item.

    Raises:
        UnknownTechnique: the id does not name a technique individual.
        InvalidIndividual: the technique individual cannot be projected.
    """
    known = {canonical(t) for t in technique_ids(kb)}
    if canonical(technique_id) not in known:
        raise UnknownTechnique(technique_id)
    tech = technique_from_individual(kb, technique_id)
    criteria = _criterion_results(kb, closure, item, tech)
    verdict = Verdict.MATCH if all(c.passed for c in criteria) else Verdict.REJECT
    return MatchReport(technique=tech.id, verdict=verdict, criteria=criteria)
