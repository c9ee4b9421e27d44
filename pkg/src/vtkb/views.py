"""Typed views over knowledge-base individuals.

Individuals in the KB are untyped bags of assertions. This module
projects them into the two structured records the selection pipeline
works with, DataItem and TechniqueSpec, together with their geolocation
and output-location structure. Projections are lossy only for
unrecognized object assertions; unrecognized datum assertions on a
technique survive inside ``visual_attributes``.

Concept-valued facets (data types, issues) point at individuals that
carry the same id as the concept they stand for, so subsumption-aware
queries keep working over them. The projection simply reads the target
id back as a concept reference.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .model import (
    AnchorSlot,
    COORDINATES_2D_CONCEPT,
    COORDINATES_3D_CONCEPT,
    DATA_CONCEPT,
    Dimensionality,
    GEO_NAME_CONCEPT,
    Individual,
    InvalidIndividual,
    KnowledgeBase,
    LiteralValue,
    OBJECT_ANCHORED_CONCEPT,
    OutputSpace,
    SizeMode,
    TECHNIQUE_CONCEPT,
    UnknownIndividual,
    canonical,
)

# =====================================================================
# Geolocation
# =====================================================================

@dataclass(frozen=True)
class Coordinates2D:
    """A point on the scene's ground plane, in meters."""

    x: float
    y: float

    kind = "Coordinates2D"


@dataclass(frozen=True)
class Coordinates3D:
    """A point in the scene frame, in meters."""

    x: float
    y: float
    z: float

    kind = "Coordinates3D"


@dataclass(frozen=True)
class GeoName:
    """A named place; resolution to coordinates is out of scope."""

    name: str

    kind = "GeoName"

    def __post_init__(self):
        if not self.name:
            raise ValueError("GeoName requires a non-empty name")


@dataclass(frozen=True)
class ObjectAnchored:
    """Located at a scene object rather than at coordinates."""

    urban_object: str

    kind = "ObjectAnchored"


Geolocation = Union[Coordinates2D, Coordinates3D, GeoName, ObjectAnchored]

GEOLOCATION_KINDS = ("Coordinates2D", "Coordinates3D", "GeoName", "ObjectAnchored")


# =====================================================================
# Output location
# =====================================================================

@dataclass(frozen=True)
class OutputLocation:
    """Where and how a technique renders.

    Two structural constraints hold by construction: screen-space output
    is always an overlay, and a volume anchor is only meaningful for 3D
    output.
    """

    space: OutputSpace
    dimensionality: Dimensionality
    anchor_slot: AnchorSlot

    def __post_init__(self):
        if (self.space is OutputSpace.SCREEN_SPACE
                and self.anchor_slot is not AnchorSlot.OVERLAY):
            raise ValueError("screen-space output requires the Overlay slot")
        if (self.anchor_slot is AnchorSlot.VOLUME
                and self.dimensionality is not Dimensionality.D3):
            raise ValueError("the Volume slot requires 3D output")


# =====================================================================
# Data items and techniques
# =====================================================================

@dataclass(frozen=True)
class DataItem:
    """One abstract-information item to visualize.

    ``issue`` may be None for items carrying no issue tag; such items
    only match issue-generic techniques. Projection from a KB individual
    treats a missing issue as an error, since the KB schema declares it.
    """

    id: str
    data_type: str
    geolocation: Geolocation
    issue: str | None = None
    format: str | None = None
    urban_object: str | None = None


@dataclass(frozen=True)
class TechniqueSpec:
    """A visualization technique's selection-relevant description.

    ``applicable_issues`` empty means issue-generic. ``visual_attributes``
    holds every descriptive datum assertion, keyed by property local
    name; ``transparency`` (boolean) and ``sizeMode`` (Fixed or Dynamic)
    are always present.
    """

    id: str
    accepted_data_type: str
    output_location: OutputLocation
    applicable_issues: tuple[str, ...] = ()
    visual_attributes: tuple[tuple[str, LiteralValue], ...] = ()
    visualization_abstraction: str | None = None
    reference: str | None = None
    example: str | None = None

    def __post_init__(self):
        issues: dict[str, str] = {}
        for issue in self.applicable_issues:
            issues.setdefault(canonical(issue), issue)
        object.__setattr__(
            self, "applicable_issues",
            tuple(sorted(issues.values(), key=canonical)))
        object.__setattr__(
            self, "visual_attributes",
            tuple(sorted(dict(self.visual_attributes).items())))

    def attribute(self, name: str) -> LiteralValue | None:
        for key, value in self.visual_attributes:
            if key == name:
                return value
        return None

    @property
    def transparency(self) -> bool:
        value = self.attribute("transparency")
        return bool(value) if isinstance(value, bool) else False

    @property
    def size_mode(self) -> SizeMode:
        value = self.attribute("sizeMode")
        return SizeMode(value) if value in ("Fixed", "Dynamic") else SizeMode.FIXED


class MissingFacet(InvalidIndividual):
    """A required facet is absent from the individual being projected."""

    def __init__(self, individual: str, facet: str):
        super().__init__(individual, f"missing required facet: {facet}")
        self.facet = facet


# =====================================================================
# Projections
# =====================================================================

# Property local names the projections interpret structurally.
P_DATA_TYPE = "hasDataType"
P_FORMAT = "hasFormat"
P_ISSUE = "hasIssue"
P_URBAN_OBJECT = "hasUrbanObject"
P_GEOLOCATION = "hasGeolocation"
P_LOC_X = "locX"
P_LOC_Y = "locY"
P_LOC_Z = "locZ"
P_GEO_NAME = "geoName"
P_ACCEPTS_DATA_TYPE = "acceptsDataType"
P_OUTPUT_SPACE = "outputSpace"
P_OUTPUT_DIM = "outputDim"
P_ANCHOR_SLOT = "anchorSlot"
P_ABSTRACTION = "visualizationAbstraction"
P_REFERENCE = "reference"
P_EXAMPLE = "example"

#: Datum properties on techniques that are structural, not visual attributes.
_TECHNIQUE_STRUCTURAL_DATA = (
    P_OUTPUT_SPACE, P_OUTPUT_DIM, P_ANCHOR_SLOT,
    P_ABSTRACTION, P_REFERENCE, P_EXAMPLE,
)


def _require_individual(kb: KnowledgeBase, ref: str) -> Individual:
    ind = kb.individual(ref)
    if ind is None:
        raise UnknownIndividual(ref)
    return ind


def _typed_under(kb: KnowledgeBase, ind: Individual, concept: str) -> bool:
    closure = kb.subsumption
    if canonical(concept) not in closure.supers_by_concept:
        return False
    for asserted in ind.asserted_types:
        if canonical(asserted) not in closure.supers_by_concept:
            continue
        if closure.is_subconcept(asserted, concept):
            return True
    return False


def _single_target(ind: Individual, prop: str) -> str | None:
    targets = ind.object_targets(prop)
    if len(targets) > 1:
        raise InvalidIndividual(ind.id, f"multiple values for {prop}")
    return targets[0] if targets else None


def _single_datum(ind: Individual, prop: str) -> LiteralValue | None:
    values = ind.datum_values(prop)
    if len(values) > 1:
        raise InvalidIndividual(ind.id, f"multiple values for {prop}")
    return values[0] if values else None


def _single_string(ind: Individual, prop: str) -> str | None:
    value = _single_datum(ind, prop)
    if value is None:
        return None
    if not isinstance(value, str):
        raise InvalidIndividual(ind.id, f"{prop} must be a string value")
    return value


def _single_number(ind: Individual, prop: str) -> float | None:
    value = _single_datum(ind, prop)
    if value is None:
        return None
    if not isinstance(value, float) or isinstance(value, bool):
        raise InvalidIndividual(ind.id, f"{prop} must be a numeric value")
    return value


def geolocation_from_individual(kb: KnowledgeBase, ref: str) -> Geolocation:
    """Interpret an individual as one of the four geolocation forms.

    The individual's asserted types decide the form; exactly one of the
    location concepts must apply.
    """
    ind = _require_individual(kb, ref)
    forms = [
        concept for concept in (
            COORDINATES_2D_CONCEPT, COORDINATES_3D_CONCEPT,
            GEO_NAME_CONCEPT, OBJECT_ANCHORED_CONCEPT)
        if _typed_under(kb, ind, concept)
    ]
    if len(forms) != 1:
        raise InvalidIndividual(
            ind.id, "individual must be typed under exactly one geolocation form")
    form = forms[0]
    if form == COORDINATES_2D_CONCEPT:
        x, y = _single_number(ind, P_LOC_X), _single_number(ind, P_LOC_Y)
        if x is None:
            raise MissingFacet(ind.id, P_LOC_X)
        if y is None:
            raise MissingFacet(ind.id, P_LOC_Y)
        return Coordinates2D(x, y)
    if form == COORDINATES_3D_CONCEPT:
        x, y, z = (_single_number(ind, P_LOC_X), _single_number(ind, P_LOC_Y),
                   _single_number(ind, P_LOC_Z))
        if x is None:
            raise MissingFacet(ind.id, P_LOC_X)
        if y is None:
            raise MissingFacet(ind.id, P_LOC_Y)
        if z is None:
            raise MissingFacet(ind.id, P_LOC_Z)
        return Coordinates3D(x, y, z)
    if form == GEO_NAME_CONCEPT:
        name = _single_string(ind, P_GEO_NAME)
        if not name:
            raise MissingFacet(ind.id, P_GEO_NAME)
        return GeoName(name)
    target = _single_target(ind, P_URBAN_OBJECT)
    if target is None:
        raise MissingFacet(ind.id, P_URBAN_OBJECT)
    anchored = kb.individual(target)
    if anchored is None:
        raise UnknownIndividual(target)
    return ObjectAnchored(anchored.id)


def data_item_from_individual(kb: KnowledgeBase, ref: str) -> DataItem:
    """Project an individual typed under the data concept into a DataItem.

    Raises:
        UnknownIndividual: no such individual.
        InvalidIndividual: not typed under the data concept, or an
            assertion is structurally unusable.
        MissingFacet: a required facet (data type, issue, geolocation)
            is absent.
    """
    ind = _require_individual(kb, ref)
    if not _typed_under(kb, ind, DATA_CONCEPT):
        raise InvalidIndividual(ind.id, f"not typed under {DATA_CONCEPT}")

    data_type = _single_target(ind, P_DATA_TYPE)
    if data_type is None:
        raise MissingFacet(ind.id, "data_type")
    issue = _single_target(ind, P_ISSUE)
    if issue is None:
        raise MissingFacet(ind.id, "issue")
    location_ref = _single_target(ind, P_GEOLOCATION)
    if location_ref is None:
        raise MissingFacet(ind.id, "geolocation")

    urban_object = _single_target(ind, P_URBAN_OBJECT)
    if urban_object is not None:
        target = kb.individual(urban_object)
        urban_object = target.id if target else urban_object

    return DataItem(
        id=ind.id,
        data_type=data_type,
        issue=issue,
        format=_single_string(ind, P_FORMAT),
        urban_object=urban_object,
        geolocation=geolocation_from_individual(kb, location_ref),
    )


def technique_from_individual(kb: KnowledgeBase, ref: str) -> TechniqueSpec:
    """Project an individual typed under the technique concept.

    Raises:
        UnknownIndividual / InvalidIndividual: as for data items.
        MissingFacet: absent accepted data type, output-location facet,
            or required visual attribute (transparency, sizeMode).
    """
    ind = _require_individual(kb, ref)
    if not _typed_under(kb, ind, TECHNIQUE_CONCEPT):
        raise InvalidIndividual(ind.id, f"not typed under {TECHNIQUE_CONCEPT}")

    accepted = _single_target(ind, P_ACCEPTS_DATA_TYPE)
    if accepted is None:
        raise MissingFacet(ind.id, "accepted_data_type")

    space_s = _single_string(ind, P_OUTPUT_SPACE)
    dim_s = _single_string(ind, P_OUTPUT_DIM)
    slot_s = _single_string(ind, P_ANCHOR_SLOT)
    if space_s is None or dim_s is None or slot_s is None:
        raise MissingFacet(ind.id, "output_location")
    try:
        output = OutputLocation(
            OutputSpace(space_s), Dimensionality(dim_s), AnchorSlot(slot_s))
    except ValueError as err:
        raise InvalidIndividual(ind.id, f"bad output location: {err}") from None

    attributes: dict[str, LiteralValue] = {}
    for prop, value in ind.datum_assertions:
        name = canonical(prop).split(":", 1)[1]
        if name in _TECHNIQUE_STRUCTURAL_DATA:
            continue
        if name in attributes:
            raise InvalidIndividual(ind.id, f"multiple values for {prop}")
        attributes[name] = value
    if "transparency" not in attributes:
        raise MissingFacet(ind.id, "transparency")
    if not isinstance(attributes["transparency"], bool):
        raise InvalidIndividual(ind.id, "transparency must be a boolean value")
    if "sizeMode" not in attributes:
        raise MissingFacet(ind.id, "size_mode")
    if attributes["sizeMode"] not in ("Fixed", "Dynamic"):
        raise InvalidIndividual(ind.id, "sizeMode must be Fixed or Dynamic")

    return TechniqueSpec(
        id=ind.id,
        accepted_data_type=accepted,
        applicable_issues=ind.object_targets(P_ISSUE),
        output_location=output,
        visual_attributes=tuple(attributes.items()),
        visualization_abstraction=_single_string(ind, P_ABSTRACTION),
        reference=_single_string(ind, P_REFERENCE),
        example=_single_string(ind, P_EXAMPLE),
    )


def technique_ids(kb: KnowledgeBase) -> list[str]:
    """Declared ids of all individuals typed under the technique concept."""
    if canonical(TECHNIQUE_CONCEPT) not in kb.subsumption.supers_by_concept:
        return []
    return [ind.id for ind in kb.individuals
            if _typed_under(kb, ind, TECHNIQUE_CONCEPT)]


def resolve_data_item(kb: KnowledgeBase, item: DataItem) -> DataItem:
    """Check that an externally supplied data item only references
    declared concepts and individuals. Returns the item unchanged;
    raises the matching lookup error otherwise."""
    from .model import UnknownConcept, UnknownReference

    closure = kb.subsumption
    if canonical(item.data_type) not in closure.supers_by_concept:
        raise UnknownConcept(item.data_type)
    if item.issue is not None and canonical(item.issue) not in closure.supers_by_concept:
        raise UnknownConcept(item.issue)
    if item.urban_object is not None and kb.individual(item.urban_object) is None:
        raise UnknownReference(item.urban_object, f"unknown urban object: {item.urban_object}")
    if isinstance(item.geolocation, ObjectAnchored):
        if kb.individual(item.geolocation.urban_object) is None:
            raise UnknownReference(
                item.geolocation.urban_object,
                f"unknown anchored object: {item.geolocation.urban_object}")
    return item
