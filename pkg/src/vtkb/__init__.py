"""vtkb: a knowledge base engine for 3D urban data visualization.

The package models visualization techniques, urban data, tasks,
contexts, and evaluation scores as a small ontology, answers
subsumption-aware queries over it, and selects compatible, ranked
technique assignments for all the data in one 3D city scene.
"""

from .evaluation import UsabilitySource, usability
from .matching import MatchReport, Verdict, candidates, match_report
from .model import (
    AnchorSlot,
    CompatibilityRule,
    ContextSpec,
    CycleError,
    Dimensionality,
    EvaluationRecord,
    Individual,
    InvalidIndividual,
    KbError,
    KnowledgeBase,
    OutputSpace,
    PropertyDef,
    PropertyKind,
    RuleAtom,
    RulePredicate,
    Severity,
    SizeMode,
    SubsumptionClosure,
    TaskSpec,
    Taxonomy,
    UnknownConcept,
    UnknownIndividual,
    UnknownProperty,
    UnknownReference,
    UnknownTechnique,
    Violation,
    canonical,
    classify,
    instances_of,
    is_subconcept,
    validate,
)
from .queries import (
    AtomTrace,
    BindingSet,
    EntityRef,
    InvalidQuery,
    Query,
    RowNotInResult,
    Variable,
)
from .queries import evaluate as evaluate_query
from .queries import explain as explain_query
from .rules import (
    Conflict,
    Placement,
    ScenePlan,
    builtin_rules,
    check_plan,
    with_builtin_rules,
)
from .selection import (
    CheckResult,
    InfeasibleItem,
    RankedPlan,
    SceneSpec,
    check,
    recommend,
)
from .textio import (
    ParseError,
    SemanticError,
    load_document,
    parse_kb,
    parse_query,
    parse_rule,
    serialize_kb,
)
from .views import (
    Coordinates2D,
    Coordinates3D,
    DataItem,
    GeoName,
    ObjectAnchored,
    OutputLocation,
    TechniqueSpec,
    data_item_from_individual,
    technique_from_individual,
    technique_ids,
)

__version__ = "0.1.0"

__all__ = [
    "AnchorSlot", "AtomTrace", "BindingSet", "CheckResult",
    "CompatibilityRule", "Conflict", "ContextSpec", "Coordinates2D",
    "Coordinates3D", "CycleError", "DataItem", "Dimensionality",
    "EntityRef", "EvaluationRecord", "GeoName", "Individual",
    "InfeasibleItem", "InvalidIndividual", "InvalidQuery", "KbError",
    "KnowledgeBase", "MatchReport", "ObjectAnchored", "OutputLocation",
    "OutputSpace", "ParseError", "Placement", "PropertyDef",
    "PropertyKind", "Query", "RankedPlan", "RowNotInResult", "RuleAtom",
    "RulePredicate", "ScenePlan", "SceneSpec",
    "SemanticError", "Severity", "SizeMode", "SubsumptionClosure",
    "TaskSpec", "Taxonomy", "TechniqueSpec", "UnknownConcept",
    "UnknownIndividual", "UnknownProperty", "UnknownReference",
    "UnknownTechnique", "UsabilitySource", "Variable", "Verdict",
    "Violation", "builtin_rules", "candidates", "canonical", "check",
    "check_plan", "classify", "data_item_from_individual",
    "evaluate_query", "explain_query", "instances_of", "is_subconcept",
    "load_document", "match_report", "parse_kb", "parse_query",
    "parse_rule", "recommend",
    "serialize_kb", "technique_from_individual", "technique_ids",
    "usability", "validate", "with_builtin_rules",
]
