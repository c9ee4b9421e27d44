"""Usability lookup with wildcard fallback.

Evaluation records score a technique for a task and context, either of
which may be the wildcard ``*``. Lookup walks from most to least
specific: exact (task and context), task-only, fully generic. A
technique nobody has evaluated gets the default score, which encodes
"unassessed, not unusable". Records scoped to a context but not a task
fall outside the fallback chain and are ignored.
"""

from __future__ import annotations

import os
from enum import Enum

from .model import (
    EvaluationRecord,
    KnowledgeBase,
    TECHNIQUE_CONCEPT,
    UnknownTechnique,
    WILDCARD,
    canonical,
    instances_of,
)

DEFAULT_SCORE = 0.5
DEFAULT_SCORE_ENV = "VTKB_DEFAULT_SCORE"


class UsabilitySource(Enum):
    EXACT = "Exact"
    TASK_ONLY = "TaskOnly"
    GENERIC = "Generic"
    DEFAULT = "Default"


def resolve_default_score(default_score: float | None = None) -> float:
    """Explicit argument, else the environment override, else 0.5."""
    if default_score is not None:
        return default_score
    raw = os.environ.get(DEFAULT_SCORE_ENV)
    if raw is None:
        return DEFAULT_SCORE
    try:
        value = float(raw)
    except ValueError:
        return DEFAULT_SCORE
    return min(1.0, max(0.0, value))


def _mean(scores: list[float]) -> float:
    return sum(scores) / len(scores)


def usability(kb: KnowledgeBase, technique: str, task: str, context: str, *,
              default_score: float | None = None) -> tuple[float, UsabilitySource]:
    """Score one technique for a task and context.

    Ties at one specificity level average. Returns the score with the
    level it came from.

    Raises:
        UnknownTechnique: the id names no technique individual.
    """
    known = {canonical(t) for t in instances_of(kb, TECHNIQUE_CONCEPT)} \
        if canonical(TECHNIQUE_CONCEPT) in kb.subsumption.supers_by_concept else set()
    if canonical(technique) not in known:
        raise UnknownTechnique(technique)

    tech_key = canonical(technique)
    task_key = canonical(task)
    context_key = canonical(context)

    def matches(record: EvaluationRecord, want_task: bool, want_context: bool) -> bool:
        if canonical(record.technique) != tech_key:
            return False
        task_ok = (canonical(record.task) == task_key) if want_task \
            else record.task == WILDCARD
        context_ok = (canonical(record.context) == context_key) if want_context \
            else record.context == WILDCARD
        return task_ok and context_ok

    levels = (
        (True, True, UsabilitySource.EXACT),
        (True, False, UsabilitySource.TASK_ONLY),
        (False, False, UsabilitySource.GENERIC),
    )
    for want_task, want_context, source in levels:
        scores = [r.score for r in kb.evaluations
                  if matches(r, want_task, want_context)]
        if scores:
            return (_mean(scores), source)
    return (resolve_default_score(default_score), UsabilitySource.DEFAULT)
