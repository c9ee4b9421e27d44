"""Integrated scene selection: rank rule-valid technique assignments.

Given a scene (data items, task, context, active rules), recommend()
searches the space of complete assignments built from each item's
matching techniques, drops every plan on which a Forbid rule fires,
scores the survivors by mean usability minus a penalty per Warn
conflict, and returns the top N in deterministic order.

Anchor slots resolve before rule checking. A 3D text label declared for
the Volume slot moves to the top of its object (or the side when the top
is taken) whenever it would share the volume with another placement on
the same object; the move is recorded on the placement. The override is
part of plan construction, so checking and scoring always see the final
slots. It applies only while rules are active: with rules switched off
there is nothing to relocate for.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    AnchorSlot,
    CompatibilityRule,
    Dimensionality,
    KbError,
    KnowledgeBase,
    Severity,
    SubsumptionClosure,
    TEXT_CONCEPT,
    UnknownIndividual,
    UnknownReference,
    canonical,
)
from .views import DataItem, TechniqueSpec, technique_from_individual
from .matching import candidates
from .rules import Conflict, Placement, ScenePlan, check_plan, rule_fires
from .evaluation import UsabilitySource, usability

WARN_PENALTY = 0.1


class InfeasibleItem(KbError):
    """A scene item no technique can display."""

    def __init__(self, data_id: str):
        super().__init__(f"no technique can display data item: {data_id}")
        self.data_id = data_id


@dataclass(frozen=True)
class SceneSpec:
    """What to visualize: items plus the task and context they serve.

    ``active_rules`` selects KB rules by id; None means all declared
    rules, an empty tuple disables rule checking entirely.
    """

    data_items: tuple[DataItem, ...]
    task: str
    context: str
    active_rules: tuple[str, ...] | None = None

    def __post_init__(self):
        seen: set[str] = set()
        for item in self.data_items:
            key = canonical(item.id)
            if key in seen:
                raise ValueError(f"duplicate data item id: {item.id}")
            seen.add(key)


@dataclass(frozen=True)
class PlacementScore:
    placement: Placement
    usability: float
    source: UsabilitySource


@dataclass(frozen=True)
class RankedPlan:
    plan: ScenePlan
    score: float
    per_placement: tuple[PlacementScore, ...]
    conflicts: tuple[Conflict, ...]


@dataclass(frozen=True)
class CheckResult:
    valid: bool
    conflicts: tuple[Conflict, ...]
    score: float


def resolve_active_rules(kb: KnowledgeBase,
                         scene: SceneSpec) -> list[CompatibilityRule]:
    if scene.active_rules is None:
        return list(kb.rules)
    out: list[CompatibilityRule] = []
    for rule_id in scene.active_rules:
        rule = kb.rule(rule_id)
        if rule is None:
            raise UnknownReference(rule_id, f"unknown rule: {rule_id}")
        out.append(rule)
    return out


def _check_scene_references(kb: KnowledgeBase, scene: SceneSpec) -> None:
    if kb.task(scene.task) is None:
        raise UnknownReference(scene.task, f"unknown task: {scene.task}")
    if kb.context(scene.context) is None:
        raise UnknownReference(scene.context, f"unknown context: {scene.context}")


# =====================================================================
# Slot resolution
# =====================================================================

def _override_eligible(item: DataItem, tech: TechniqueSpec) -> bool:
    # Only 3D text labels declared for the Volume slot ever relocate.
    return (canonical(item.data_type) == canonical(TEXT_CONCEPT)
            and tech.output_location.dimensionality is Dimensionality.D3
            and tech.output_location.anchor_slot is AnchorSlot.VOLUME)


def _same_object_pair(p: Placement, q: Placement,
                      items: dict[str, DataItem]) -> bool:
    from .rules import same_object
    return same_object(p, q, items.get(canonical(p.data)),
                       items.get(canonical(q.data)))


def resolve_slots(plan_placements: list[Placement],
                  items: dict[str, DataItem],
                  techniques: dict[str, TechniqueSpec], *,
                  apply_override: bool) -> list[Placement]:
    """Apply the label-relocation override to a complete assignment.

    Eligible placements are visited in canonical data-id order against
    the evolving plan state, so an earlier relocation can push a later
    label from the top to the side of a shared object.
    """
    placements = sorted(plan_placements, key=lambda p: canonical(p.data))
    if not apply_override:
        return placements
    for index, placement in enumerate(placements):
        item = items.get(canonical(placement.data))
        tech = techniques.get(canonical(placement.technique))
        if item is None or tech is None:
            continue
        if not _override_eligible(item, tech):
            continue
        if placement.resolved_slot is not AnchorSlot.VOLUME:
            continue
        others = [p for i, p in enumerate(placements) if i != index]
        crowded = any(
            p.resolved_slot is AnchorSlot.VOLUME
            and _same_object_pair(placement, p, items)
            for p in others)
        if not crowded:
            continue
        top_taken = any(
            p.resolved_slot is AnchorSlot.TOP_OF_OBJECT
            and _same_object_pair(placement, p, items)
            for p in others)
        side_taken = any(
            p.resolved_slot is AnchorSlot.SIDE_OF_OBJECT
            and _same_object_pair(placement, p, items)
            for p in others)
        if not top_taken:
            slot = AnchorSlot.TOP_OF_OBJECT
        elif not side_taken:
            slot = AnchorSlot.SIDE_OF_OBJECT
        else:
            slot = AnchorSlot.TOP_OF_OBJECT
        placements[index] = Placement(
            data=placement.data,
            technique=placement.technique,
            resolved_slot=slot,
            location=placement.location,
            overridden=True,
        )
    return placements


# =====================================================================
# Recommendation
# =====================================================================

def _score_plan(kb: KnowledgeBase, placements: list[Placement],
                task: str, context: str, conflicts: list[Conflict], *,
                warn_penalty: float,
                default_score: float | None) -> tuple[float, list[PlacementScore]]:
    per: list[PlacementScore] = []
    for placement in placements:
        score, source = usability(kb, placement.technique, task, context,
                                  default_score=default_score)
        per.append(PlacementScore(placement, score, source))
    if not per:
        return (0.0, per)
    warns = sum(1 for c in conflicts if c.severity is Severity.WARN)
    raw = sum(p.usability for p in per) / len(per) - warn_penalty * warns
    return (min(1.0, max(0.0, raw)), per)


def _plan_sort_key(ranked: RankedPlan, item_order: list[str]):
    by_data = {canonical(p.data): p for p in ranked.plan.placements}
    technique_seq = tuple(canonical(by_data[key].technique)
                          for key in item_order if key in by_data)
    return (-ranked.score, technique_seq)


def _prunable(rule: CompatibilityRule, p: Placement, q: Placement,
              eligibility: dict[str, bool]) -> bool:
    """A partial-plan Forbid conflict justifies pruning only when no
    later slot relocation could undo it: either the rule reads no slots,
    or neither placement can ever be re-slotted."""
    from .model import RulePredicate
    slot_predicates = (RulePredicate.SLOT_EQUALS, RulePredicate.SLOTS_OVERLAP)
    reads_slots = any(atom.predicate in slot_predicates for atom in rule.condition)
    if not reads_slots:
        return True
    return not (eligibility.get(canonical(p.data), False)
                or eligibility.get(canonical(q.data), False))


def recommend(kb: KnowledgeBase, closure: SubsumptionClosure, scene: SceneSpec,
              top_n: int = 5, *, warn_penalty: float = WARN_PENALTY,
              default_score: float | None = None,
              prune: bool = True) -> list[RankedPlan]:
    """Top-N valid plans for the scene, best first.

    Every returned plan assigns each data item one matching technique and
    passes the scene's active rules with zero Forbid conflicts. Ties in
    score break by the plans' technique-id sequences taken in data-id
    order. ``prune`` switches the sound partial-plan cutoff; results are
    identical either way.

    Raises:
        ValueError: top_n < 1.
        UnknownReference: undeclared task, context, or rule id.
        InfeasibleItem: the first scene item (in given order) that no
            technique can display.
    """
    if top_n < 1:
        raise ValueError("top_n must be at least 1")
    _check_scene_references(kb, scene)
    active = resolve_active_rules(kb, scene)

    items = {canonical(item.id): item for item in scene.data_items}
    candidate_map: dict[str, list[str]] = {}
    for item in scene.data_items:
        found = candidates(kb, closure, item)
        if not found:
            raise InfeasibleItem(item.id)
        candidate_map[canonical(item.id)] = found

    if not scene.data_items:
        return [RankedPlan(plan=ScenePlan(), score=0.0,
                           per_placement=(), conflicts=())]

    techniques: dict[str, TechniqueSpec] = {}
    for found in candidate_map.values():
        for tech_id in found:
            techniques.setdefault(canonical(tech_id),
                                  technique_from_individual(kb, tech_id))

    eligibility = {
        key: any(_override_eligible(items[key], techniques[canonical(t)])
                 for t in candidate_map[key])
        for key in candidate_map
    }

    def make_placement(item_key: str, tech_id: str) -> Placement:
        item = items[item_key]
        tech = techniques[canonical(tech_id)]
        return Placement(data=item.id, technique=tech.id,
                         resolved_slot=tech.output_location.anchor_slot,
                         location=item.geolocation)

    # Fewest candidates first keeps the backtracking tree small.
    order = sorted(candidate_map,
                   key=lambda key: (len(candidate_map[key]), key))
    apply_override = bool(active)
    valid: list[RankedPlan] = []

    def finish(partial: list[Placement]) -> None:
        placements = resolve_slots(partial, items, techniques,
                                   apply_override=apply_override)
        plan = ScenePlan(tuple(placements))
        conflicts = check_plan(kb, plan, data_items=items, rules=active)
        if any(c.severity is Severity.FORBID for c in conflicts):
            return
        warn_conflicts = [c for c in conflicts if c.severity is Severity.WARN]
        score, per = _score_plan(kb, placements, scene.task, scene.context,
                                 warn_conflicts, warn_penalty=warn_penalty,
                                 default_score=default_score)
        valid.append(RankedPlan(plan=plan, score=score,
                                per_placement=tuple(per),
                                conflicts=tuple(warn_conflicts)))

    def extend(depth: int, partial: list[Placement]) -> None:
        if depth == len(order):
            finish(partial)
            return
        item_key = order[depth]
        for tech_id in candidate_map[item_key]:
            placement = make_placement(item_key, tech_id)
            if prune and _partial_pruned(kb, active, partial, placement,
                                         items, eligibility):
                continue
            partial.append(placement)
            extend(depth + 1, partial)
            partial.pop()

    extend(0, [])

    item_order = sorted(candidate_map)
    valid.sort(key=lambda r: _plan_sort_key(r, item_order))
    return valid[:top_n]


def _partial_pruned(kb: KnowledgeBase, active: list[CompatibilityRule],
                    partial: list[Placement], new: Placement,
                    items: dict[str, DataItem],
                    eligibility: dict[str, bool]) -> bool:
    new_item = items.get(canonical(new.data))
    for rule in active:
        if rule.severity is not Severity.FORBID:
            continue
        for existing in partial:
            if not _prunable(rule, existing, new, eligibility):
                continue
            existing_item = items.get(canonical(existing.data))
            if rule_fires(rule, existing, new, existing_item, new_item):
                return True
    return False


# =====================================================================
# Plan checking against a scene
# =====================================================================

def check(kb: KnowledgeBase, scene: SceneSpec,
          placements: list[tuple[str, str, AnchorSlot | None]], *,
          warn_penalty: float = WARN_PENALTY,
          default_score: float | None = None) -> CheckResult:
    """Check a (possibly partial) plan against the scene's rules.

    ``placements`` holds (data id, technique id, slot) triples; a None
    slot means the technique's declared slot. Slots are taken exactly as
    given: checking reports on the plan the caller stated, it never
    relocates anything.

    Raises:
        UnknownReference: a placement names an item outside the scene or
            an unknown technique; or the scene's task/context/rule ids
            are undeclared.
    """
    _check_scene_references(kb, scene)
    active = resolve_active_rules(kb, scene)
    items = {canonical(item.id): item for item in scene.data_items}

    built: list[Placement] = []
    for data_id, technique_id, slot in placements:
        key = canonical(data_id)
        if key not in items:
            raise UnknownReference(data_id, f"data item not in scene: {data_id}")
        try:
            tech = technique_from_individual(kb, technique_id)
        except UnknownIndividual:
            raise UnknownReference(technique_id,
                                   f"unknown technique: {technique_id}") from None
        built.append(Placement(
            data=items[key].id,
            technique=tech.id,
            resolved_slot=slot if slot is not None else tech.output_location.anchor_slot,
            location=items[key].geolocation,
        ))

    plan = ScenePlan(tuple(built))
    conflicts = check_plan(kb, plan, data_items=items, rules=active)
    valid = not any(c.severity is Severity.FORBID for c in conflicts)
    warn_conflicts = [c for c in conflicts if c.severity is Severity.WARN]
    score, _ = _score_plan(kb, built, scene.task, scene.context, warn_conflicts,
                           warn_penalty=warn_penalty, default_score=default_score)
    return CheckResult(valid=valid, conflicts=tuple(conflicts), score=score)
