"""Pairwise compatibility rules over scene plans.

A plan places techniques on data items; rules are conjunctions of
symmetric predicates over unordered placement pairs. A rule whose whole
condition holds for a pair yields a Conflict at the rule's severity.
Forbid conflicts invalidate a plan, Warn conflicts only cost score.

Two built-in rules reproduce the canonical failure modes: using one
technique twice at the same spot for different issues, and stacking two
same-object placements into overlapping anchor slots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .model import (
    AnchorSlot,
    CompatibilityRule,
    InvalidIndividual,
    KnowledgeBase,
    RuleAtom,
    RulePredicate,
    Severity,
    UnknownIndividual,
    UnknownReference,
    canonical,
)
from .views import (
    Coordinates2D,
    Coordinates3D,
    DataItem,
    GeoName,
    Geolocation,
    ObjectAnchored,
    data_item_from_individual,
    technique_from_individual,
)

BUILTIN_UNIQUE_TECHNIQUE = "unique-technique-per-location"
BUILTIN_NO_SLOT_OCCLUSION = "no-slot-occlusion"


@dataclass(frozen=True)
class Placement:
    """One data item shown with one technique at a resolved anchor slot.

    ``location`` is copied from the data item. ``overridden`` records a
    slot relocation applied by the selector; it never affects rule
    semantics, only reporting.
    """

    data: str
    technique: str
    resolved_slot: AnchorSlot
    location: Geolocation
    overridden: bool = False


@dataclass(frozen=True)
class ScenePlan:
    """A set of placements, at most one per data item."""

    placements: tuple[Placement, ...] = ()

    def __post_init__(self):
        seen: set[str] = set()
        for placement in self.placements:
            key = canonical(placement.data)
            if key in seen:
                raise ValueError(f"data item placed twice: {placement.data}")
            seen.add(key)
        object.__setattr__(
            self, "placements",
            tuple(sorted(self.placements, key=lambda p: canonical(p.data))))


@dataclass(frozen=True)
class Conflict:
    rule: str
    severity: Severity
    placements: tuple[Placement, Placement]
    message: str


# =====================================================================
# Predicate semantics
# =====================================================================

def same_location(a: Geolocation, b: Geolocation, epsilon: float) -> bool:
    """Same place within tolerance. Mixed location forms are never the
    same; anchored locations compare by object, geonames by name."""
    if isinstance(a, Coordinates3D) and isinstance(b, Coordinates3D):
        return math.dist((a.x, a.y, a.z), (b.x, b.y, b.z)) <= epsilon
    if isinstance(a, Coordinates2D) and isinstance(b, Coordinates2D):
        return math.dist((a.x, a.y), (b.x, b.y)) <= epsilon
    if isinstance(a, GeoName) and isinstance(b, GeoName):
        return a.name == b.name
    if isinstance(a, ObjectAnchored) and isinstance(b, ObjectAnchored):
        return canonical(a.urban_object) == canonical(b.urban_object)
    return False


def slots_overlap(a: AnchorSlot, b: AnchorSlot) -> bool:
    if a is AnchorSlot.VOLUME and b is AnchorSlot.VOLUME:
        return True
    return a == b and a in (AnchorSlot.TOP_OF_OBJECT, AnchorSlot.SIDE_OF_OBJECT)


def _anchor_object(placement: Placement) -> str | None:
    if isinstance(placement.location, ObjectAnchored):
        return canonical(placement.location.urban_object)
    return None


def _related_objects(placement: Placement, item: DataItem | None) -> set[str]:
    objects: set[str] = set()
    anchor = _anchor_object(placement)
    if anchor is not None:
        objects.add(anchor)
    if item is not None and item.urban_object is not None:
        objects.add(canonical(item.urban_object))
    return objects


def same_object(p: Placement, q: Placement,
                p_item: DataItem | None, q_item: DataItem | None) -> bool:
    """Two placements contend for one object when at least one of them is
    anchored to an object the other placement relates to (by anchor or by
    the data item's own urban object). Coordinate-located placements are
    spatial, not object-bound, so two of them never contend even when
    their items concern the same building."""
    p_anchor = _anchor_object(p)
    q_anchor = _anchor_object(q)
    if p_anchor is not None and p_anchor in _related_objects(q, q_item):
        return True
    if q_anchor is not None and q_anchor in _related_objects(p, p_item):
        return True
    return False


def _atom_holds(atom: RuleAtom, p: Placement, q: Placement,
                p_item: DataItem | None, q_item: DataItem | None) -> bool:
    pred = atom.predicate
    if pred is RulePredicate.SAME_TECHNIQUE:
        value = canonical(p.technique) == canonical(q.technique)
    elif pred is RulePredicate.SAME_DATA_TYPE:
        if p_item is None or q_item is None:
            value = False
        else:
            value = canonical(p_item.data_type) == canonical(q_item.data_type)
    elif pred is RulePredicate.SAME_ISSUE:
        if p_item is None or q_item is None:
            value = False
        elif p_item.issue is None and q_item.issue is None:
            value = True
        elif p_item.issue is None or q_item.issue is None:
            value = False
        else:
            value = canonical(p_item.issue) == canonical(q_item.issue)
    elif pred is RulePredicate.SAME_OBJECT:
        value = same_object(p, q, p_item, q_item)
    elif pred is RulePredicate.SAME_LOCATION:
        assert atom.epsilon is not None
        value = same_location(p.location, q.location, atom.epsilon)
    elif pred is RulePredicate.SLOT_EQUALS:
        value = p.resolved_slot is atom.slot and q.resolved_slot is atom.slot
    elif pred is RulePredicate.SLOTS_OVERLAP:
        value = slots_overlap(p.resolved_slot, q.resolved_slot)
    else:
        raise AssertionError(f"unhandled predicate {pred}")
    return value != atom.negated


def rule_fires(rule: CompatibilityRule, p: Placement, q: Placement,
               p_item: DataItem | None, q_item: DataItem | None) -> bool:
    return all(_atom_holds(atom, p, q, p_item, q_item)
               for atom in rule.condition)


# =====================================================================
# Plan checking
# =====================================================================

def builtin_rules() -> list[CompatibilityRule]:
    """The two always-available rules, with stable ids."""
    return [
        CompatibilityRule(
            id=BUILTIN_UNIQUE_TECHNIQUE,
            severity=Severity.FORBID,
            condition=(
                RuleAtom(RulePredicate.SAME_TECHNIQUE),
                RuleAtom(RulePredicate.SAME_LOCATION, epsilon=1.0),
                RuleAtom(RulePredicate.SAME_DATA_TYPE),
                RuleAtom(RulePredicate.SAME_ISSUE, negated=True),
            )),
        CompatibilityRule(
            id=BUILTIN_NO_SLOT_OCCLUSION,
            severity=Severity.FORBID,
            condition=(
                RuleAtom(RulePredicate.SAME_OBJECT),
                RuleAtom(RulePredicate.SLOTS_OVERLAP),
            )),
    ]


def with_builtin_rules(kb: KnowledgeBase) -> KnowledgeBase:
    """KB copy whose rule set includes the built-ins. Rules already
    declared in the KB win on id collision."""
    declared = {canonical(rule.id) for rule in kb.rules}
    merged = list(kb.rules)
    merged.extend(rule for rule in builtin_rules()
                  if canonical(rule.id) not in declared)
    return kb.with_rules(merged)


def _resolve_items(kb: KnowledgeBase, plan: ScenePlan,
                   data_items: Mapping[str, DataItem] | None) -> dict[str, DataItem | None]:
    """Find each placed item's facets: supplied map first, KB projection
    second. A placement whose data id resolves nowhere is an error."""
    supplied = {canonical(k): v for k, v in (data_items or {}).items()}
    out: dict[str, DataItem | None] = {}
    for placement in plan.placements:
        key = canonical(placement.data)
        if key in supplied:
            out[key] = supplied[key]
            continue
        if kb.individual(placement.data) is not None:
            try:
                out[key] = data_item_from_individual(kb, placement.data)
            except (InvalidIndividual, UnknownIndividual):
                # The individual exists but lacks data facets; item-based
                # predicates then evaluate over unknown facets.
                out[key] = None
            continue
        raise UnknownReference(placement.data,
                               f"unknown data item: {placement.data}")
    return out


def check_plan(kb: KnowledgeBase, plan: ScenePlan, *,
               data_items: Mapping[str, DataItem] | None = None,
               rules: Sequence[CompatibilityRule] | None = None) -> list[Conflict]:
    """Evaluate every rule against every unordered placement pair.

    ``data_items`` supplies facets for items not stored in the KB (scene
    items arrive inline). ``rules`` defaults to the KB's declared rules.

    Returns conflicts sorted by rule id, then by the pair's data ids.

    Raises:
        UnknownReference: a placement names a data item or technique
            that neither the KB nor ``data_items`` knows.
    """
    active = list(kb.rules) if rules is None else list(rules)
    items = _resolve_items(kb, plan, data_items)
    for placement in plan.placements:
        if kb.individual(placement.technique) is None:
            raise UnknownReference(placement.technique,
                                   f"unknown technique: {placement.technique}")

    conflicts: list[Conflict] = []
    ordered = plan.placements
    for rule in sorted(active, key=lambda r: canonical(r.id)):
        for i in range(len(ordered)):
            for j in range(i + 1, len(ordered)):
                p, q = ordered[i], ordered[j]
                p_item = items[canonical(p.data)]
                q_item = items[canonical(q.data)]
                if rule_fires(rule, p, q, p_item, q_item):
                    conflicts.append(Conflict(
                        rule=rule.id,
                        severity=rule.severity,
                        placements=(p, q),
                        message=(f"rule {rule.id} ({rule.severity.value}): "
                                 f"{p.data} shown with {p.technique} conflicts "
                                 f"with {q.data} shown with {q.technique}"),
                    ))
    conflicts.sort(key=lambda c: (canonical(c.rule),
                                  canonical(c.placements[0].data),
                                  canonical(c.placements[1].data)))
    return conflicts


def check_occlusion(kb: KnowledgeBase, plan: ScenePlan, *,
                    data_items: Mapping[str, DataItem] | None = None) -> list[Conflict]:
    """Run only the built-in occlusion rule against the plan."""
    occlusion = [r for r in builtin_rules()
                 if canonical(r.id) == canonical(BUILTIN_NO_SLOT_OCCLUSION)]
    return check_plan(kb, plan, data_items=data_items, rules=occlusion)


def declared_slot(kb: KnowledgeBase, technique_id: str) -> AnchorSlot:
    """The technique's own anchor slot, for building placements."""
    return technique_from_individual(kb, technique_id).output_location.anchor_slot
