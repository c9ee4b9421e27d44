"""Conjunctive query evaluation over the knowledge base.

Queries are conjunctions of three atom forms: type atoms (subsumption
aware), property atoms (exact match on asserted assertions), and filter
atoms (literal comparisons). Evaluation binds variables to either
individuals or literal values; the two are kept distinguishable in
bindings, individuals as EntityRef and literals as plain Python values,
so that equality never confuses an id with a string that happens to
spell the same.

The join order is chosen by ascending candidate-count, which is an
optimization only: results are defined to equal brute-force enumeration
of all assignments, and the test suite holds the engine to that.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from .model import (
    Individual,
    KbError,
    KnowledgeBase,
    LiteralValue,
    PropertyKind,
    SubsumptionClosure,
    UnknownConcept,
    UnknownProperty,
    canonical,
    instances_of,
    subsumption_path,
)

# =====================================================================
# AST
# =====================================================================

@dataclass(frozen=True)
class Variable:
    """A query variable; ``name`` is stored without the leading ``?``."""

    name: str

    def __str__(self) -> str:
        return f"?{self.name}"


@dataclass(frozen=True)
class EntityRef:
    """An identifier constant in a query (an individual or a bare tag)."""

    id: str

    def __str__(self) -> str:
        return self.id

    def __eq__(self, other) -> bool:
        return isinstance(other, EntityRef) and canonical(self.id) == canonical(other.id)

    def __hash__(self) -> int:
        return hash(canonical(self.id))


Term = Union[Variable, EntityRef, str, float, bool]
BoundValue = Union[EntityRef, str, float, bool]

FILTER_OPS = ("=", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class TypeAtom:
    var: Variable
    concept: str

    def __str__(self) -> str:
        return f"{self.var} type {self.concept}"


@dataclass(frozen=True)
class PropertyAtom:
    subject: Variable
    prop: str
    value: Term

    def __str__(self) -> str:
        return f"{self.subject} {self.prop} {_term_text(self.value)}"


@dataclass(frozen=True)
class FilterAtom:
    var: Variable
    op: str
    literal: LiteralValue

    def __str__(self) -> str:
        return f"filter({self.var} {self.op} {_term_text(self.literal)})"


Atom = Union[TypeAtom, PropertyAtom, FilterAtom]


def _term_text(term: Term) -> str:
    if isinstance(term, (Variable, EntityRef)):
        return str(term)
    if isinstance(term, bool):
        return "true" if term else "false"
    if isinstance(term, float):
        return repr(term)
    return f'"{term}"'


class InvalidQuery(KbError):
    """The query is structurally ill-formed."""


class RowNotInResult(KbError):
    """explain() was asked about a row the query does not produce."""


@dataclass(frozen=True)
class Query:
    """``select`` head variables plus a non-empty conjunctive body."""

    head: tuple[Variable, ...]
    body: tuple[Atom, ...]

    def __post_init__(self):
        if not self.head:
            raise InvalidQuery("query must select at least one variable")
        if not self.body:
            raise InvalidQuery("query body must contain at least one atom")
        generated = _generated_variables(self.body)
        for var in self.head:
            if var not in generated:
                raise InvalidQuery(f"head variable {var} not bound by the body")
        for atom in self.body:
            if isinstance(atom, FilterAtom) and atom.var not in generated:
                raise InvalidQuery(f"filter variable {atom.var} not bound by the body")


def _generated_variables(body: tuple[Atom, ...]) -> set[Variable]:
    """Variables bound by a type or property atom (filters only test)."""
    out: set[Variable] = set()
    for atom in body:
        if isinstance(atom, TypeAtom):
            out.add(atom.var)
        elif isinstance(atom, PropertyAtom):
            out.add(atom.subject)
            if isinstance(atom.value, Variable):
                out.add(atom.value)
    return out


# =====================================================================
# Binding sets
# =====================================================================

def value_sort_key(value: BoundValue) -> tuple[int, str]:
    """Total deterministic order over bound values for row sorting."""
    if isinstance(value, EntityRef):
        return (0, canonical(value.id))
    if isinstance(value, bool):
        return (1, "1" if value else "0")
    if isinstance(value, float):
        return (2, repr(value))
    return (3, value)


@dataclass(frozen=True)
class BindingSet:
    """Deterministically ordered solutions projected to the head variables."""

    variables: tuple[Variable, ...]
    rows: tuple[tuple[BoundValue, ...], ...]

    def __len__(self) -> int:
        return len(self.rows)

    def __contains__(self, row: tuple[BoundValue, ...]) -> bool:
        return tuple(row) in set(self.rows)


# =====================================================================
# Evaluation
# =====================================================================

def _check_references(kb: KnowledgeBase, closure: SubsumptionClosure,
                      query: Query) -> None:
    for atom in query.body:
        if isinstance(atom, TypeAtom):
            if canonical(atom.concept) not in closure.supers_by_concept:
                raise UnknownConcept(atom.concept)
        elif isinstance(atom, PropertyAtom):
            if kb.property_def(atom.prop) is None:
                raise UnknownProperty(atom.prop)


def _subject_entries(kb: KnowledgeBase, prop: str) -> list[tuple[Individual, BoundValue]]:
    """All (subject, value) pairs asserted for a property, KB-wide."""
    definition = kb.property_def(prop)
    assert definition is not None
    pairs: list[tuple[Individual, BoundValue]] = []
    if definition.kind is PropertyKind.OBJECT:
        for ind in kb.individuals:
            for target in ind.object_targets(prop):
                resolved = kb.individual(target)
                pairs.append((ind, EntityRef(resolved.id if resolved else target)))
    else:
        for ind in kb.individuals:
            for value in ind.datum_values(prop):
                pairs.append((ind, value))
    return pairs


def _has_type(closure: SubsumptionClosure, ind: Individual, concept: str) -> bool:
    for asserted in ind.asserted_types:
        if canonical(asserted) not in closure.supers_by_concept:
            continue
        if closure.is_subconcept(asserted, concept):
            return True
    return False


def _literal_eq(a: BoundValue, b: BoundValue) -> bool:
    if isinstance(a, EntityRef) or isinstance(b, EntityRef):
        return isinstance(a, EntityRef) and isinstance(b, EntityRef) and a == b
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    if isinstance(a, str) != isinstance(b, str):
        return False
    return a == b


def _constant_matches(wanted: Term, value: BoundValue) -> bool:
    """Constant-position match. A bare identifier constant also matches
    a string datum value equal to its raw spelling, mirroring the
    bare-identifier sugar allowed in KB datum assertions."""
    if isinstance(wanted, EntityRef) and isinstance(value, str):
        return wanted.id == value
    return _literal_eq(wanted, value)  # type: ignore[arg-type]


def _compare(value: BoundValue, op: str, literal: LiteralValue) -> bool:
    """Filter semantics: mismatched runtime kinds satisfy only ``!=``."""
    if isinstance(value, EntityRef):
        raise InvalidQuery("filter comparisons apply to literal values only")
    same_kind = (isinstance(value, bool) == isinstance(literal, bool)
                 and isinstance(value, str) == isinstance(literal, str))
    if op == "=":
        return same_kind and value == literal
    if op == "!=":
        return not (same_kind and value == literal)
    if not same_kind or isinstance(value, bool):
        return False
    if op == "<":
        return value < literal
    if op == "<=":
        return value <= literal
    if op == ">":
        return value > literal
    if op == ">=":
        return value >= literal
    raise InvalidQuery(f"unknown filter operator: {op}")


Binding = dict[Variable, BoundValue]


def _extensions(kb: KnowledgeBase, closure: SubsumptionClosure,
                atom: Atom, binding: Binding) -> Iterator[Binding]:
    """Yield every extension of ``binding`` satisfying ``atom``."""
    if isinstance(atom, TypeAtom):
        bound = binding.get(atom.var)
        if bound is not None:
            if isinstance(bound, EntityRef):
                ind = kb.individual(bound.id)
                if ind is not None and _has_type(closure, ind, atom.concept):
                    yield binding
            return
        for ind_id in instances_of(kb, atom.concept):
            yield {**binding, atom.var: EntityRef(ind_id)}
        return

    if isinstance(atom, FilterAtom):
        bound = binding.get(atom.var)
        if bound is not None and _compare(bound, atom.op, atom.literal):
            yield binding
        return

    subject_bound = binding.get(atom.subject)
    value_term = atom.value
    for ind, value in _subject_entries(kb, atom.prop):
        if subject_bound is not None:
            if not (isinstance(subject_bound, EntityRef)
                    and canonical(subject_bound.id) == canonical(ind.id)):
                continue
        if isinstance(value_term, Variable):
            extended = dict(binding)
            extended[atom.subject] = EntityRef(ind.id)
            # read through the extension so a variable used as both
            # subject and value must hold one consistent binding
            existing = extended.get(value_term)
            if existing is not None and not _literal_eq(existing, value):
                continue
            extended[value_term] = value
            yield extended
        else:
            if not _constant_matches(value_term, value):
                continue
            yield {**binding, atom.subject: EntityRef(ind.id)}


def _estimate(kb: KnowledgeBase, closure: SubsumptionClosure,
              atom: Atom, binding: Binding) -> int:
    """Rough extension count used to pick the next atom to join."""
    if isinstance(atom, TypeAtom):
        if atom.var in binding:
            return 0
        return len(instances_of(kb, atom.concept))
    assert isinstance(atom, PropertyAtom)
    entries = _subject_entries(kb, atom.prop)
    bound = binding.get(atom.subject)
    if bound is not None:
        if not isinstance(bound, EntityRef):
            return 0
        key = canonical(bound.id)
        return sum(1 for ind, _ in entries if canonical(ind.id) == key)
    return len(entries)


def _solutions(kb: KnowledgeBase, closure: SubsumptionClosure,
               atoms: list[Atom], binding: Binding) -> Iterator[Binding]:
    if not atoms:
        yield binding
        return
    # Filters wait until their variable is bound; everything else joins
    # cheapest-first.
    ready_filters = [a for a in atoms
                     if isinstance(a, FilterAtom) and a.var in binding]
    if ready_filters:
        atom = ready_filters[0]
    else:
        generators = [a for a in atoms if not isinstance(a, FilterAtom)]
        if not generators:
            # Only filters left but none ready: impossible for validated
            # queries, where every filter variable is generated somewhere.
            atom = atoms[0]
        else:
            atom = min(generators,
                       key=lambda a: _estimate(kb, closure, a, binding))
    rest = [a for a in atoms if a is not atom]
    for extended in _extensions(kb, closure, atom, binding):
        yield from _solutions(kb, closure, rest, extended)


def evaluate(kb: KnowledgeBase, closure: SubsumptionClosure,
             query: Query) -> BindingSet:
    """Evaluate a conjunctive query.

    Returns the deduplicated solutions projected to the head variables,
    sorted by their binding tuples.

    Raises:
        UnknownConcept / UnknownProperty: the query references something
            the KB does not declare.
    """
    _check_references(kb, closure, query)
    rows: set[tuple[BoundValue, ...]] = set()
    for solution in _solutions(kb, closure, list(query.body), {}):
        rows.add(tuple(solution[var] for var in query.head))
    ordered = sorted(rows, key=lambda row: tuple(value_sort_key(v) for v in row))
    return BindingSet(variables=query.head, rows=tuple(ordered))


# =====================================================================
# Explanation traces
# =====================================================================

@dataclass(frozen=True)
class AtomTrace:
    """Why one body atom holds for a row: the satisfying fact, plus the
    subsumption chain for type atoms."""

    atom: str
    satisfied_by: str
    chain: tuple[str, ...] = ()


def explain(kb: KnowledgeBase, closure: SubsumptionClosure, query: Query,
            row: tuple[BoundValue, ...]) -> tuple[AtomTrace, ...]:
    """Produce a per-atom satisfaction trace for one result row.

    The row must project from some full solution; the first such
    solution in deterministic order is used as the witness.

    Raises:
        RowNotInResult: the row does not satisfy the query.
    """
    _check_references(kb, closure, query)
    if len(row) != len(query.head):
        raise RowNotInResult("row width does not match the query head")
    seed: Binding = dict(zip(query.head, row))

    witness: Binding | None = None
    candidates = []
    for solution in _solutions(kb, closure, list(query.body), dict(seed)):
        candidates.append(solution)
    if candidates:
        def solution_key(sol: Binding):
            return tuple(value_sort_key(sol[v])
                         for v in sorted(sol, key=lambda v: v.name))
        witness = min(candidates, key=solution_key)
    if witness is None:
        raise RowNotInResult(f"row {row!r} is not produced by the query")

    traces: list[AtomTrace] = []
    for atom in query.body:
        traces.append(_trace_atom(kb, closure, atom, witness))
    return tuple(traces)


def _trace_atom(kb: KnowledgeBase, closure: SubsumptionClosure,
                atom: Atom, binding: Binding) -> AtomTrace:
    if isinstance(atom, TypeAtom):
        bound = binding[atom.var]
        assert isinstance(bound, EntityRef)
        ind = kb.individual(bound.id)
        assert ind is not None
        for asserted in ind.asserted_types:
            if canonical(asserted) not in closure.supers_by_concept:
                continue
            if closure.is_subconcept(asserted, atom.concept):
                chain = subsumption_path(kb.taxonomy, asserted, atom.concept) or ()
                return AtomTrace(
                    atom=str(atom),
                    satisfied_by=f"{ind.id} has asserted type {asserted}",
                    chain=tuple(chain))
        raise AssertionError("witness does not satisfy a type atom")
    if isinstance(atom, FilterAtom):
        bound = binding[atom.var]
        return AtomTrace(
            atom=str(atom),
            satisfied_by=f"{atom.var} = {_term_text(bound)} satisfies {atom.op} "
                         f"{_term_text(atom.literal)}")
    bound_subject = binding[atom.subject]
    assert isinstance(bound_subject, EntityRef)
    value = atom.value
    bound_value: BoundValue
    if isinstance(value, Variable):
        bound_value = binding[value]
    else:
        bound_value = value
    return AtomTrace(
        atom=str(atom),
        satisfied_by=f"assertion {bound_subject.id} {atom.prop} "
                     f"{_term_text(bound_value)}")
