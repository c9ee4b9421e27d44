"""Effectivity matching between data items and techniques."""

from __future__ import annotations

import pytest

from vtkb import (
    AnchorSlot,
    Coordinates2D,
    Coordinates3D,
    DataItem,
    GeoName,
    ObjectAnchored,
    OutputSpace,
    UnknownTechnique,
    Verdict,
    candidates,
    classify,
    match_report,
    parse_kb,
)
from vtkb.matching import location_compatible

AIR_BALLS = "vt:AirQuality_Scalar_VS_3D_ColoredBalls"
TEXTURES = "vt:AirQuality_Scalar_WS_2D_ColoredTextures"
NOISE_BALLS = "vt:Noise_Scalar_VS_3D_ColoredBalls"
LABEL = "vt:BuildingLabel_Text_WS_3D_TextObject"

POINT3D = Coordinates3D(0.0, 0.0, 0.0)

# Issue and data-type subsumption both use concept-named individuals as
# facet targets.
SUBSUMPTION_KB = """
concept vt:Top .
concept vt:Visualization_Technique subclassof vt:Top .
concept vt:DataType subclassof vt:Top .
concept vt:Numeric subclassof vt:DataType .
concept vt:Scalar subclassof vt:Numeric .
concept vt:Issue subclassof vt:Top .
concept vt:Pollution subclassof vt:Issue .
concept vt:AirQuality subclassof vt:Pollution .
property acceptsDataType object domain vt:Visualization_Technique range vt:DataType .
property hasIssue object domain vt:Top range vt:Issue .
property outputSpace datum domain vt:Visualization_Technique range Text .
property outputDim datum domain vt:Visualization_Technique range Text .
property anchorSlot datum domain vt:Visualization_Technique range Text .
property transparency datum domain vt:Visualization_Technique range Boolean .
property sizeMode datum domain vt:Visualization_Technique range Text .
individual vt:AirQuality type vt:AirQuality .
individual vt:DataType type vt:DataType .
individual t type vt:Visualization_Technique ; acceptsDataType vt:DataType ;
  hasIssue vt:AirQuality ; outputSpace WorldSpace ; outputDim D2 ;
  anchorSlot Overlay ; transparency false ; sizeMode Fixed .
"""


def air_item(**overrides) -> DataItem:
    base = dict(id="probe", data_type="vt:Scalar", issue="vt:AirQuality",
                geolocation=POINT3D)
    base.update(overrides)
    return DataItem(**base)


@pytest.fixture(scope="module")
def closure(fixture_kb):
    return classify(fixture_kb.taxonomy)


class TestLocationTable:
    ANCHORED = ObjectAnchored("vt:Building_B12")
    CASES = [
        (AnchorSlot.VOLUME, POINT3D, True),
        (AnchorSlot.VOLUME, ANCHORED, True),
        (AnchorSlot.VOLUME, Coordinates2D(1.0, 2.0), False),
        (AnchorSlot.VOLUME, GeoName("plaza"), False),
        (AnchorSlot.TOP_OF_OBJECT, POINT3D, True),
        (AnchorSlot.TOP_OF_OBJECT, ANCHORED, True),
        (AnchorSlot.TOP_OF_OBJECT, Coordinates2D(1.0, 2.0), False),
        (AnchorSlot.TOP_OF_OBJECT, GeoName("plaza"), False),
        (AnchorSlot.SIDE_OF_OBJECT, POINT3D, True),
        (AnchorSlot.SIDE_OF_OBJECT, ANCHORED, True),
        (AnchorSlot.SIDE_OF_OBJECT, Coordinates2D(1.0, 2.0), False),
        (AnchorSlot.SIDE_OF_OBJECT, GeoName("plaza"), False),
        (AnchorSlot.SURFACE, Coordinates2D(1.0, 2.0), True),
        (AnchorSlot.SURFACE, GeoName("plaza"), True),
        (AnchorSlot.SURFACE, ANCHORED, True),
        (AnchorSlot.SURFACE, POINT3D, False),
        (AnchorSlot.OVERLAY, POINT3D, True),
        (AnchorSlot.OVERLAY, Coordinates2D(1.0, 2.0), True),
        (AnchorSlot.OVERLAY, GeoName("plaza"), True),
        (AnchorSlot.OVERLAY, ANCHORED, True),
    ]

    @pytest.mark.parametrize("slot,geo,expected", CASES)
    def test_world_and_view_space(self, slot, geo, expected):
        assert location_compatible(slot, OutputSpace.WORLD_SPACE, geo) is expected
        assert location_compatible(slot, OutputSpace.VIEW_SPACE, geo) is expected

    @pytest.mark.parametrize("geo", [POINT3D, Coordinates2D(1.0, 2.0),
                                     GeoName("plaza"), ANCHORED])
    def test_screen_space_accepts_everything(self, geo):
        assert location_compatible(AnchorSlot.OVERLAY,
                                   OutputSpace.SCREEN_SPACE, geo)


class TestCandidates:
    def test_air_scalar_at_point(self, fixture_kb, closure):
        assert candidates(fixture_kb, closure, air_item()) == [AIR_BALLS]

    def test_air_scalar_on_ground(self, fixture_kb, closure):
        item = air_item(geolocation=Coordinates2D(1.0, 2.0))
        assert candidates(fixture_kb, closure, item) == [TEXTURES]

    def test_air_scalar_anchored_matches_both(self, fixture_kb, closure):
        item = air_item(geolocation=ObjectAnchored("vt:Building_B12"))
        assert candidates(fixture_kb, closure, item) == [AIR_BALLS, TEXTURES]

    def test_noise_scalar(self, fixture_kb, closure):
        item = air_item(issue="vt:Noise")
        assert candidates(fixture_kb, closure, item) == [NOISE_BALLS]

    def test_text_label(self, fixture_kb, closure):
        item = air_item(data_type="vt:Text", issue="vt:GeneralInformation",
                        geolocation=ObjectAnchored("vt:Building_B12"))
        assert candidates(fixture_kb, closure, item) == [LABEL]

    def test_issueless_item_matches_only_generic(self, fixture_kb, closure):
        item = air_item(data_type="vt:Text", issue=None)
        assert candidates(fixture_kb, closure, item) == [LABEL]

    def test_unmatchable_item(self, fixture_kb, closure):
        item = air_item(data_type="vt:Vector")
        assert candidates(fixture_kb, closure, item) == []


class TestMatchReport:
    def test_match_verdict(self, fixture_kb, closure):
        report = match_report(fixture_kb, closure, air_item(), AIR_BALLS)
        assert report.verdict is Verdict.MATCH
        assert [c.criterion for c in report.criteria] == [
            "data_type", "issue", "location_compatibility"]
        assert all(c.passed for c in report.criteria)

    def test_type_chain_in_explanation(self):
        kb = parse_kb(SUBSUMPTION_KB)
        closure = classify(kb.taxonomy)
        item = DataItem(id="d", data_type="vt:Scalar", issue=None,
                        geolocation=POINT3D)
        report = match_report(kb, closure, item, "t")
        type_result = report.criteria[0]
        assert type_result.passed
        assert type_result.explanation.endswith(
            "vt:Scalar -> vt:Numeric -> vt:DataType")

    def test_reject_explains_each_failure(self, fixture_kb, closure):
        item = air_item(data_type="vt:Text", issue="vt:Noise",
                        geolocation=Coordinates2D(0.0, 0.0))
        report = match_report(fixture_kb, closure, item, AIR_BALLS)
        assert report.verdict is Verdict.REJECT
        results = {c.criterion: c for c in report.criteria}
        assert not results["data_type"].passed
        assert not results["issue"].passed
        assert not results["location_compatibility"].passed
        assert "not at or below" in results["data_type"].explanation
        assert "not under any of" in results["issue"].explanation
        assert "does not accept" in results["location_compatibility"].explanation

    def test_issue_generic_explanation(self, fixture_kb, closure):
        item = air_item(data_type="vt:Text", issue=None,
                        geolocation=ObjectAnchored("vt:Building_B12"))
        report = match_report(fixture_kb, closure, item, LABEL)
        assert report.verdict is Verdict.MATCH
        assert report.criteria[1].explanation == "technique is issue-generic"

    def test_issueless_item_vs_specific_technique(self, fixture_kb, closure):
        report = match_report(fixture_kb, closure, air_item(issue=None),
                              AIR_BALLS)
        assert report.verdict is Verdict.REJECT
        assert "carries no issue" in report.criteria[1].explanation

    def test_unknown_technique(self, fixture_kb, closure):
        with pytest.raises(UnknownTechnique):
            match_report(fixture_kb, closure, air_item(), "vt:NoSuchTechnique")


class TestIssueSubsumption:
    def test_issue_matching_walks_the_taxonomy(self):
        kb = parse_kb(SUBSUMPTION_KB)
        closure = classify(kb.taxonomy)
        specific = DataItem(id="d", data_type="vt:Scalar",
                            issue="vt:AirQuality", geolocation=POINT3D)
        broader = DataItem(id="d", data_type="vt:Scalar",
                           issue="vt:Pollution", geolocation=POINT3D)
        assert candidates(kb, closure, specific) == ["t"]
        # the item's issue must sit at or below the technique's issue
        assert candidates(kb, closure, broader) == []
