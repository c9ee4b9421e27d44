"""Core in-memory knowledge-base model.

This module defines the symbolic layer shared by every other part of the
package: identifiers, the concept taxonomy, property declarations,
individuals with their assertions, evaluation records, tasks, contexts,
compatibility rules, and the aggregate KnowledgeBase. It also implements
the reasoning primitives over that layer: subsumption classification,
instance retrieval, and referential-integrity validation.

The model is deliberately small. Concepts are named nodes in a directed
acyclic subsumption graph, individuals carry asserted types plus object
and datum assertions, and nothing else is inferred. Typed interpretations
of individuals (data items, technique descriptions) live in
:mod:`vtkb.views`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Union

# =====================================================================
# Identifiers
# =====================================================================

#: Namespace assumed for identifiers written without an explicit prefix.
DEFAULT_NAMESPACE = "vt"

#: Wildcard marker used by evaluation records for "any task / any context".
WILDCARD = "*"

_SEGMENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*\Z")

LiteralValue = Union[str, float, bool]


def canonical(identifier: str) -> str:
    """Return the canonical form of an identifier.

    A bare identifier is implicitly in the default namespace, so
    ``Scalar`` and ``vt:Scalar`` denote the same thing. The canonical
    form always carries the namespace prefix; declared spellings are
    preserved separately for display and serialization.
    """
    if ":" in identifier:
        return identifier
    return f"{DEFAULT_NAMESPACE}:{identifier}"


def is_valid_identifier(identifier: str) -> bool:
    """Check identifier syntax: colon-joined segments, each starting with
    a letter or underscore and continuing with letters, digits, underscore
    or hyphen."""
    if not identifier:
        return False
    segments = identifier.split(":")
    return all(_SEGMENT_RE.match(segment) for segment in segments)


def local_name(identifier: str) -> str:
    """Strip the default namespace prefix if present; other prefixes stay."""
    prefix = DEFAULT_NAMESPACE + ":"
    if identifier.startswith(prefix):
        return identifier[len(prefix):]
    return identifier


# =====================================================================
# Errors
# =====================================================================

class KbError(Exception):
    """Base class for knowledge-base level errors."""


class UnknownConcept(KbError):
    def __init__(self, concept: str):
        super().__init__(f"unknown concept: {concept}")
        self.concept = concept


class UnknownProperty(KbError):
    def __init__(self, prop: str):
        super().__init__(f"unknown property: {prop}")
        self.property = prop


class UnknownIndividual(KbError):
    def __init__(self, individual: str):
        super().__init__(f"unknown individual: {individual}")
        self.individual = individual


class UnknownTechnique(KbError):
    def __init__(self, technique: str):
        super().__init__(f"unknown technique: {technique}")
        self.technique = technique


class UnknownReference(KbError):
    """A plan, scene, or request referenced something the KB does not hold."""

    def __init__(self, reference: str, message: str | None = None):
        super().__init__(message or f"unknown reference: {reference}")
        self.reference = reference


class InvalidIndividual(KbError):
    """An individual cannot be interpreted in the requested typed view."""

    def __init__(self, individual: str, message: str):
        super().__init__(f"{individual}: {message}")
        self.individual = individual


class CycleError(KbError):
    """The subsumption graph contains a cycle; one offending path is kept."""

    def __init__(self, cycle: tuple[str, ...]):
        path = " -> ".join(cycle)
        super().__init__(f"subsumption cycle: {path}")
        self.cycle = cycle


# =====================================================================
# Shared vocabulary
# =====================================================================

class PropertyKind(Enum):
    OBJECT = "object"
    DATUM = "datum"


#: Datatype tags allowed as the range of a datum property.
DATUM_RANGES = ("Text", "Number", "Boolean", "URI")


class OutputSpace(Enum):
    WORLD_SPACE = "WorldSpace"
    VIEW_SPACE = "ViewSpace"
    SCREEN_SPACE = "ScreenSpace"


class Dimensionality(Enum):
    D2 = "D2"
    D3 = "D3"


class AnchorSlot(Enum):
    VOLUME = "Volume"
    SURFACE = "Surface"
    TOP_OF_OBJECT = "TopOfObject"
    SIDE_OF_OBJECT = "SideOfObject"
    OVERLAY = "Overlay"


class SizeMode(Enum):
    FIXED = "Fixed"
    DYNAMIC = "Dynamic"


class Severity(Enum):
    FORBID = "forbid"
    WARN = "warn"


class RulePredicate(Enum):
    SAME_TECHNIQUE = "sameTechnique"
    SAME_DATA_TYPE = "sameDataType"
    SAME_ISSUE = "sameIssue"
    SAME_OBJECT = "sameObject"
    SAME_LOCATION = "sameLocation"
    SLOT_EQUALS = "slotEquals"
    SLOTS_OVERLAP = "slotsOverlap"


# Well-known concept ids that typed views and the matcher interpret.
DATA_CONCEPT = "vt:Data"
DATA_TYPE_CONCEPT = "vt:DataType"
TEXT_CONCEPT = "vt:Text"
ISSUE_CONCEPT = "vt:EnvironmentalIssue"
TECHNIQUE_CONCEPT = "vt:Visualization_Technique"
URBAN_OBJECT_CONCEPT = "vt:UrbanObject"
GEOLOCATION_CONCEPT = "vt:Geolocation"
COORDINATES_2D_CONCEPT = "vt:Coordinates2D"
COORDINATES_3D_CONCEPT = "vt:Coordinates3D"
GEO_NAME_CONCEPT = "vt:GeoName"
OBJECT_ANCHORED_CONCEPT = "vt:ObjectAnchored"


def _value_sort_key(value: LiteralValue | str) -> tuple[str, str]:
    # Booleans are checked before floats because bool subclasses int.
    if isinstance(value, bool):
        return ("b", "true" if value else "false")
    if isinstance(value, float):
        return ("n", repr(value))
    return ("s", str(value))


# =====================================================================
# Records
# =====================================================================

@dataclass(frozen=True)
class Taxonomy:
    """Named concepts plus direct subsumption edges (child, parent)."""

    concepts: tuple[str, ...] = ()
    direct_subsumptions: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        concepts: dict[str, str] = {}
        for concept in self.concepts:
            concepts.setdefault(canonical(concept), concept)
        object.__setattr__(
            self, "concepts",
            tuple(sorted(concepts.values(), key=canonical)))
        edges: dict[tuple[str, str], tuple[str, str]] = {}
        for sub, sup in self.direct_subsumptions:
            edges.setdefault((canonical(sub), canonical(sup)), (sub, sup))
        object.__setattr__(
            self, "direct_subsumptions",
            tuple(sorted(edges.values(),
                         key=lambda e: (canonical(e[0]), canonical(e[1])))))


@dataclass(frozen=True)
class PropertyDef:
    """A binary property declaration.

    ``range`` names a concept for object properties and one of the
    datatype tags in ``DATUM_RANGES`` for datum properties.
    """

    id: str
    kind: PropertyKind
    domain: str
    range: str


@dataclass(frozen=True)
class Individual:
    """A named individual with asserted types and assertions.

    Assertions are stored as sorted, deduplicated tuples so that two
    individuals built from the same facts compare equal regardless of
    source order.
    """

    id: str
    asserted_types: tuple[str, ...]
    object_assertions: tuple[tuple[str, str], ...] = ()
    datum_assertions: tuple[tuple[str, LiteralValue], ...] = ()

    def __post_init__(self):
        types: dict[str, str] = {}
        for asserted in self.asserted_types:
            types.setdefault(canonical(asserted), asserted)
        object.__setattr__(
            self, "asserted_types",
            tuple(sorted(types.values(), key=canonical)))
        object.__setattr__(
            self, "object_assertions",
            tuple(sorted(set(self.object_assertions),
                         key=lambda a: (canonical(a[0]), canonical(a[1])))))
        object.__setattr__(
            self, "datum_assertions",
            tuple(sorted(set(self.datum_assertions),
                         key=lambda a: (canonical(a[0]), _value_sort_key(a[1])))))

    def object_targets(self, prop: str) -> tuple[str, ...]:
        key = canonical(prop)
        return tuple(t for p, t in self.object_assertions if canonical(p) == key)

    def datum_values(self, prop: str) -> tuple[LiteralValue, ...]:
        key = canonical(prop)
        return tuple(v for p, v in self.datum_assertions if canonical(p) == key)


@dataclass(frozen=True)
class EvaluationRecord:
    """A usability score for a technique under a task and context.

    ``task`` and ``context`` are identifiers or the wildcard ``*``.
    """

    id: str
    technique: str
    task: str
    context: str
    score: float
    provenance: str


@dataclass(frozen=True)
class TaskSpec:
    id: str
    attributes: tuple[tuple[str, LiteralValue], ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "attributes",
            tuple(sorted(set(self.attributes),
                         key=lambda a: (a[0], _value_sort_key(a[1])))))

    def attribute(self, key: str) -> LiteralValue | None:
        for k, v in self.attributes:
            if k == key:
                return v
        return None


#: Attribute key a context uses to state the expected viewpoint frame.
VIEWPOINT_FRAME_KEY = "viewpointFrame"
VIEWPOINT_FRAMES = ("Inside", "Outside")


@dataclass(frozen=True)
class ContextSpec:
    id: str
    attributes: tuple[tuple[str, LiteralValue], ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "attributes",
            tuple(sorted(set(self.attributes),
                         key=lambda a: (a[0], _value_sort_key(a[1])))))

    def attribute(self, key: str) -> LiteralValue | None:
        for k, v in self.attributes:
            if k == key:
                return v
        return None

    @property
    def viewpoint_frame(self) -> str | None:
        value = self.attribute(VIEWPOINT_FRAME_KEY)
        return value if isinstance(value, str) else None


@dataclass(frozen=True)
class RuleAtom:
    """One conjunct of a compatibility rule condition.

    ``epsilon`` is meaningful only for ``sameLocation`` (meters), and
    ``slot`` only for ``slotEquals``.
    """

    predicate: RulePredicate
    negated: bool = False
    epsilon: float | None = None
    slot: AnchorSlot | None = None

    def __post_init__(self):
        if self.predicate is RulePredicate.SAME_LOCATION:
            if self.epsilon is None:
                object.__setattr__(self, "epsilon", 1.0)
        elif self.epsilon is not None:
            raise ValueError(f"{self.predicate.value} takes no epsilon")
        if self.predicate is RulePredicate.SLOT_EQUALS:
            if self.slot is None:
                raise ValueError("slotEquals requires a slot argument")
        elif self.slot is not None:
            raise ValueError(f"{self.predicate.value} takes no slot")


@dataclass(frozen=True)
class CompatibilityRule:
    """A pairwise incompatibility rule over scene placements."""

    id: str
    severity: Severity
    condition: tuple[RuleAtom, ...]


@dataclass(frozen=True)
class Violation:
    """One validation finding, tied to the location string it was found at."""

    location: str
    kind: str
    message: str

    def __str__(self) -> str:
        return f"{self.location}: {self.kind}: {self.message}"


# =====================================================================
# Knowledge base
# =====================================================================

@dataclass
class KnowledgeBase:
    """Aggregate of everything a loaded knowledge base holds.

    Instances are treated as immutable after construction; derived
    indexes are cached. Component tuples are normalized to canonical-id
    order so equal content compares equal.
    """

    taxonomy: Taxonomy = field(default_factory=Taxonomy)
    properties: tuple[PropertyDef, ...] = ()
    individuals: tuple[Individual, ...] = ()
    rules: tuple[CompatibilityRule, ...] = ()
    evaluations: tuple[EvaluationRecord, ...] = ()
    tasks: tuple[TaskSpec, ...] = ()
    contexts: tuple[ContextSpec, ...] = ()

    def __post_init__(self):
        self.properties = tuple(sorted(self.properties, key=lambda p: canonical(p.id)))
        self.individuals = tuple(sorted(self.individuals, key=lambda i: canonical(i.id)))
        self.rules = tuple(sorted(self.rules, key=lambda r: canonical(r.id)))
        self.evaluations = tuple(sorted(self.evaluations, key=lambda e: canonical(e.id)))
        self.tasks = tuple(sorted(self.tasks, key=lambda t: canonical(t.id)))
        self.contexts = tuple(sorted(self.contexts, key=lambda c: canonical(c.id)))

    # -- lookup ---------------------------------------------------------

    @cached_property
    def _concepts_by_key(self) -> dict[str, str]:
        return {canonical(c): c for c in self.taxonomy.concepts}

    @cached_property
    def _properties_by_key(self) -> dict[str, PropertyDef]:
        return {canonical(p.id): p for p in self.properties}

    @cached_property
    def _individuals_by_key(self) -> dict[str, Individual]:
        return {canonical(i.id): i for i in self.individuals}

    @cached_property
    def _tasks_by_key(self) -> dict[str, TaskSpec]:
        return {canonical(t.id): t for t in self.tasks}

    @cached_property
    def _contexts_by_key(self) -> dict[str, ContextSpec]:
        return {canonical(c.id): c for c in self.contexts}

    @cached_property
    def _rules_by_key(self) -> dict[str, CompatibilityRule]:
        return {canonical(r.id): r for r in self.rules}

    def has_concept(self, ref: str) -> bool:
        return canonical(ref) in self._concepts_by_key

    def concept_spelling(self, ref: str) -> str:
        """Declared spelling for a concept reference, if declared."""
        return self._concepts_by_key.get(canonical(ref), ref)

    def property_def(self, ref: str) -> PropertyDef | None:
        return self._properties_by_key.get(canonical(ref))

    def individual(self, ref: str) -> Individual | None:
        return self._individuals_by_key.get(canonical(ref))

    def task(self, ref: str) -> TaskSpec | None:
        return self._tasks_by_key.get(canonical(ref))

    def context(self, ref: str) -> ContextSpec | None:
        return self._contexts_by_key.get(canonical(ref))

    def rule(self, ref: str) -> CompatibilityRule | None:
        return self._rules_by_key.get(canonical(ref))

    @cached_property
    def subsumption(self) -> "SubsumptionClosure":
        """Cached classification result. Raises CycleError on cyclic input."""
        return classify(self.taxonomy)

    def with_rules(self, rules: Iterable[CompatibilityRule]) -> "KnowledgeBase":
        """A copy of this KB with a replaced rule set."""
        return KnowledgeBase(
            taxonomy=self.taxonomy,
            properties=self.properties,
            individuals=self.individuals,
            rules=tuple(rules),
            evaluations=self.evaluations,
            tasks=self.tasks,
            contexts=self.contexts,
        )


# =====================================================================
# Classification
# =====================================================================

@dataclass(frozen=True)
class SubsumptionClosure:
    """Reflexive-transitive subsumption over the declared concepts.

    Maps each canonical concept id to the frozen set of canonical ids of
    all its superconcepts, itself included, and nothing else.
    """

    supers_by_concept: Mapping[str, frozenset[str]]

    def concepts(self) -> frozenset[str]:
        return frozenset(self.supers_by_concept)

    def supers(self, concept: str) -> frozenset[str]:
        key = canonical(concept)
        if key not in self.supers_by_concept:
            raise UnknownConcept(concept)
        return self.supers_by_concept[key]

    def is_subconcept(self, sub: str, sup: str) -> bool:
        sup_key = canonical(sup)
        if sup_key not in self.supers_by_concept:
            raise UnknownConcept(sup)
        return sup_key in self.supers(sub)

    def pairs(self) -> frozenset[tuple[str, str]]:
        return frozenset(
            (sub, sup)
            for sub, supers in self.supers_by_concept.items()
            for sup in supers)


def _find_cycle(nodes: Iterable[str], parents: Mapping[str, list[str]]) -> tuple[str, ...]:
    """Locate one cycle path in the (child -> parents) graph via DFS."""
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {n: WHITE for n in nodes}
    stack: list[str] = []

    def visit(node: str) -> tuple[str, ...] | None:
        color[node] = GRAY
        stack.append(node)
        for parent in parents.get(node, ()):
            if color[parent] == GRAY:
                start = stack.index(parent)
                return tuple(stack[start:]) + (parent,)
            if color[parent] == WHITE:
                found = visit(parent)
                if found:
                    return found
        stack.pop()
        color[node] = BLACK
        return None

    for node in sorted(color):
        if color[node] == WHITE:
            found = visit(node)
            if found:
                return found
    raise AssertionError("cycle reported but not found")


def classify(taxonomy: Taxonomy) -> SubsumptionClosure:
    """Compute the reflexive-transitive subsumption closure.

    Args:
        taxonomy: declared concepts and direct edges. Every edge endpoint
            must be a declared concept.

    Returns:
        A SubsumptionClosure over canonical concept ids.

    Raises:
        UnknownConcept: an edge endpoint is not declared.
        CycleError: the direct edges contain a cycle; the error lists one
            offending path.
    """
    concepts = {canonical(c) for c in taxonomy.concepts}
    parents: dict[str, list[str]] = {c: [] for c in concepts}
    children_count: dict[str, int] = {c: 0 for c in concepts}
    for sub, sup in taxonomy.direct_subsumptions:
        sub_key, sup_key = canonical(sub), canonical(sup)
        if sub_key not in concepts:
            raise UnknownConcept(sub)
        if sup_key not in concepts:
            raise UnknownConcept(sup)
        parents[sub_key].append(sup_key)

    # Kahn ordering over child -> parent edges; leftovers mean a cycle.
    indegree = {c: 0 for c in concepts}
    for sub_key in parents:
        for sup_key in parents[sub_key]:
            indegree[sup_key] += 1
    queue = sorted(c for c in concepts if indegree[c] == 0)
    order: list[str] = []
    while queue:
        node = queue.pop()
        order.append(node)
        for sup_key in parents[node]:
            indegree[sup_key] -= 1
            if indegree[sup_key] == 0:
                queue.append(sup_key)
    if len(order) != len(concepts):
        remaining = [c for c in concepts if indegree[c] > 0]
        raise CycleError(_find_cycle(remaining, parents))

    supers: dict[str, frozenset[str]] = {}
    # Parents appear later in `order` than their children never holds in
    # general, so resolve lazily with memoization instead.
    resolved: dict[str, frozenset[str]] = {}

    def resolve(node: str) -> frozenset[str]:
        if node in resolved:
            return resolved[node]
        acc: set[str] = {node}
        for parent in parents[node]:
            acc |= resolve(parent)
        result = frozenset(acc)
        resolved[node] = result
        return result

    for node in order:
        supers[node] = resolve(node)
    return SubsumptionClosure(supers_by_concept=supers)


def is_subconcept(closure: SubsumptionClosure, sub: str, sup: str) -> bool:
    """True when ``sub`` is subsumed by ``sup`` in the closure (reflexive)."""
    return closure.is_subconcept(sub, sup)


def subsumption_path(taxonomy: Taxonomy, sub: str, sup: str) -> tuple[str, ...] | None:
    """One shortest direct-edge chain from ``sub`` up to ``sup``.

    Returns canonical ids, endpoints included, or None when no chain
    exists. Used by explanation traces.
    """
    start, goal = canonical(sub), canonical(sup)
    if start == goal:
        return (start,)
    parents: dict[str, list[str]] = {}
    for a, b in taxonomy.direct_subsumptions:
        parents.setdefault(canonical(a), []).append(canonical(b))
    for targets in parents.values():
        targets.sort()
    frontier = [(start,)]
    seen = {start}
    while frontier:
        next_frontier: list[tuple[str, ...]] = []
        for path in frontier:
            for parent in parents.get(path[-1], ()):
                if parent == goal:
                    return path + (parent,)
                if parent not in seen:
                    seen.add(parent)
                    next_frontier.append(path + (parent,))
        frontier = next_frontier
    return None


def instances_of(kb: KnowledgeBase, concept: str) -> list[str]:
    """All individuals with at least one asserted type subsumed by ``concept``.

    Returns declared individual ids sorted canonically. Asserted types
    that are not declared concepts are skipped; validate() reports them.
    """
    closure = kb.subsumption
    if canonical(concept) not in closure.supers_by_concept:
        raise UnknownConcept(concept)
    found: list[str] = []
    for individual in kb.individuals:
        for asserted in individual.asserted_types:
            if canonical(asserted) not in closure.supers_by_concept:
                continue
            if closure.is_subconcept(asserted, concept):
                found.append(individual.id)
                break
    return sorted(found, key=canonical)


# =====================================================================
# Validation
# =====================================================================

def _reachable_supers(start: str, parents: Mapping[str, set[str]]) -> set[str]:
    # Plain BFS so validation also works on cyclic taxonomies.
    seen = {start}
    frontier = [start]
    while frontier:
        node = frontier.pop()
        for parent in parents.get(node, ()):
            if parent not in seen:
                seen.add(parent)
                frontier.append(parent)
    return seen


def _datum_value_matches(tag: str, value: LiteralValue) -> bool:
    if tag in ("Text", "URI"):
        return isinstance(value, str)
    if tag == "Number":
        return isinstance(value, float) and not isinstance(value, bool)
    if tag == "Boolean":
        return isinstance(value, bool)
    return False


def validate(kb: KnowledgeBase) -> list[Violation]:
    """Report every integrity violation in the knowledge base.

    Covers identifier syntax, duplicate ids per statement kind, dangling
    references, taxonomy cycles, domain and range violations, datum value
    typing, evaluation record constraints, and rule well-formedness.
    Findings come back sorted by location, kind, then message, so output
    is deterministic for a given KB.
    """
    out: list[Violation] = []

    def flag(location: str, kind: str, message: str) -> None:
        out.append(Violation(location, kind, message))

    def check_identifier(identifier: str, location: str) -> None:
        if not is_valid_identifier(identifier):
            flag(location, "invalid-identifier", f"bad identifier syntax: {identifier!r}")

    # ---- taxonomy ----
    concept_keys: set[str] = set()
    for concept in kb.taxonomy.concepts:
        loc = f"concept {concept}"
        check_identifier(concept, loc)
        key = canonical(concept)
        if key in concept_keys:
            flag(loc, "duplicate-id", "concept declared more than once")
        concept_keys.add(key)

    parents: dict[str, set[str]] = {c: set() for c in concept_keys}
    for sub, sup in kb.taxonomy.direct_subsumptions:
        loc = f"concept {sub}"
        sub_key, sup_key = canonical(sub), canonical(sup)
        if sub_key not in concept_keys:
            flag(loc, "dangling-reference", f"subsumption child not declared: {sub}")
        if sup_key not in concept_keys:
            flag(loc, "dangling-reference", f"superconcept not declared: {sup}")
        if sub_key in concept_keys and sup_key in concept_keys:
            parents[sub_key].add(sup_key)

    try:
        classify(Taxonomy(
            concepts=tuple(concept_keys),
            direct_subsumptions=tuple(
                (a, b) for a, bs in parents.items() for b in bs)))
    except CycleError as err:
        flag("taxonomy", "cycle", str(err))

    def subsumed(sub_key: str, sup_key: str) -> bool:
        return sup_key in _reachable_supers(sub_key, parents)

    # ---- properties ----
    property_keys: dict[str, PropertyDef] = {}
    for prop in kb.properties:
        loc = f"property {prop.id}"
        check_identifier(prop.id, loc)
        key = canonical(prop.id)
        if key in property_keys:
            flag(loc, "duplicate-id", "property declared more than once")
        property_keys[key] = prop
        if canonical(prop.domain) not in concept_keys:
            flag(loc, "dangling-reference", f"domain not declared: {prop.domain}")
        if prop.kind is PropertyKind.OBJECT:
            if canonical(prop.range) not in concept_keys:
                flag(loc, "dangling-reference", f"range not declared: {prop.range}")
        else:
            if prop.range not in DATUM_RANGES:
                flag(loc, "invalid-value",
                     f"datum range must be one of {', '.join(DATUM_RANGES)}: {prop.range}")

    # ---- individuals ----
    individual_keys: set[str] = set()
    for ind in kb.individuals:
        loc = f"individual {ind.id}"
        check_identifier(ind.id, loc)
        key = canonical(ind.id)
        if key in individual_keys:
            flag(loc, "duplicate-id", "individual declared more than once")
        individual_keys.add(key)

    def individual_type_keys(ind: Individual) -> set[str]:
        return {canonical(t) for t in ind.asserted_types if canonical(t) in concept_keys}

    for ind in kb.individuals:
        loc = f"individual {ind.id}"
        if not ind.asserted_types:
            flag(loc, "invalid-value", "individual has no asserted type")
        for asserted in ind.asserted_types:
            if canonical(asserted) not in concept_keys:
                flag(loc, "dangling-reference", f"asserted type not declared: {asserted}")

        own_types = individual_type_keys(ind)

        def check_domain(prop: PropertyDef, assertion_loc: str) -> None:
            domain_key = canonical(prop.domain)
            if domain_key not in concept_keys:
                return
            if not any(subsumed(t, domain_key) for t in own_types):
                flag(assertion_loc, "domain-violation",
                     f"subject not typed under domain {prop.domain}")

        for prop_ref, target in ind.object_assertions:
            aloc = f"{loc} / {prop_ref}"
            prop = property_keys.get(canonical(prop_ref))
            if prop is None:
                flag(aloc, "dangling-reference", f"property not declared: {prop_ref}")
                continue
            if prop.kind is not PropertyKind.OBJECT:
                flag(aloc, "range-violation",
                     "datum property used with an individual target")
                continue
            check_domain(prop, aloc)
            target_key = canonical(target)
            if target_key not in individual_keys:
                flag(aloc, "dangling-reference", f"target not declared: {target}")
                continue
            range_key = canonical(prop.range)
            if range_key in concept_keys:
                target_ind = kb.individual(target)
                assert target_ind is not None
                target_types = individual_type_keys(target_ind)
                if not any(subsumed(t, range_key) for t in target_types):
                    flag(aloc, "range-violation",
                         f"target {target} not typed under range {prop.range}")

        for prop_ref, value in ind.datum_assertions:
            aloc = f"{loc} / {prop_ref}"
            prop = property_keys.get(canonical(prop_ref))
            if prop is None:
                flag(aloc, "dangling-reference", f"property not declared: {prop_ref}")
                continue
            if prop.kind is not PropertyKind.DATUM:
                flag(aloc, "range-violation",
                     "object property used with a literal value")
                continue
            check_domain(prop, aloc)
            if prop.range in DATUM_RANGES and not _datum_value_matches(prop.range, value):
                flag(aloc, "range-violation",
                     f"value {value!r} does not match datum range {prop.range}")
            if isinstance(value, float) and not isinstance(value, bool) and not math.isfinite(value):
                flag(aloc, "invalid-value", "numeric values must be finite")
            if isinstance(value, str) and ("\n" in value or "\r" in value):
                flag(aloc, "invalid-value", "text values may not contain line breaks")

    # ---- tasks and contexts ----
    task_keys: set[str] = set()
    for task in kb.tasks:
        loc = f"task {task.id}"
        check_identifier(task.id, loc)
        key = canonical(task.id)
        if key in task_keys:
            flag(loc, "duplicate-id", "task declared more than once")
        task_keys.add(key)
        for attr_key, attr_value in task.attributes:
            if isinstance(attr_value, str) and ("\n" in attr_value or "\r" in attr_value):
                flag(f"{loc} / {attr_key}", "invalid-value",
                     "text values may not contain line breaks")

    context_keys: set[str] = set()
    for context in kb.contexts:
        loc = f"context {context.id}"
        check_identifier(context.id, loc)
        key = canonical(context.id)
        if key in context_keys:
            flag(loc, "duplicate-id", "context declared more than once")
        context_keys.add(key)
        frame = context.viewpoint_frame
        if frame is None:
            flag(loc, "invalid-value",
                 f"context must set {VIEWPOINT_FRAME_KEY} to Inside or Outside")
        elif frame not in VIEWPOINT_FRAMES:
            flag(loc, "invalid-value",
                 f"{VIEWPOINT_FRAME_KEY} must be Inside or Outside, got {frame!r}")
        for attr_key, attr_value in context.attributes:
            if isinstance(attr_value, str) and ("\n" in attr_value or "\r" in attr_value):
                flag(f"{loc} / {attr_key}", "invalid-value",
                     "text values may not contain line breaks")

    # ---- evaluation records ----
    eval_keys: set[str] = set()
    for record in kb.evaluations:
        loc = f"evaluation {record.id}"
        check_identifier(record.id, loc)
        key = canonical(record.id)
        if key in eval_keys:
            flag(loc, "duplicate-id", "evaluation declared more than once")
        eval_keys.add(key)
        if canonical(record.technique) not in individual_keys:
            flag(loc, "dangling-reference", f"technique not declared: {record.technique}")
        if record.task != WILDCARD and canonical(record.task) not in task_keys:
            flag(loc, "dangling-reference", f"task not declared: {record.task}")
        if record.context != WILDCARD and canonical(record.context) not in context_keys:
            flag(loc, "dangling-reference", f"context not declared: {record.context}")
        if not (isinstance(record.score, float) and 0.0 <= record.score <= 1.0):
            flag(loc, "invalid-value", f"score must be within [0, 1]: {record.score!r}")
        if not record.provenance.strip():
            flag(loc, "invalid-value", "provenance must be non-empty")
        elif "\n" in record.provenance or "\r" in record.provenance:
            flag(loc, "invalid-value", "text values may not contain line breaks")

    # ---- rules ----
    rule_keys: set[str] = set()
    for rule in kb.rules:
        loc = f"rule {rule.id}"
        check_identifier(rule.id, loc)
        key = canonical(rule.id)
        if key in rule_keys:
            flag(loc, "duplicate-id", "rule declared more than once")
        rule_keys.add(key)
        if not rule.condition:
            flag(loc, "invalid-value", "rule condition must have at least one atom")
        for atom in rule.condition:
            if atom.predicate is RulePredicate.SAME_LOCATION:
                if atom.epsilon is None or atom.epsilon <= 0.0:
                    flag(loc, "invalid-value", "sameLocation epsilon must be positive")

    return sorted(out, key=lambda v: (v.location, v.kind, v.message))
