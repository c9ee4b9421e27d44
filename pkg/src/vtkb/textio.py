"""The VTKB text format: lexer, parsers, and canonical serializer.

VTKB is a line-oriented statement language in the spirit of Turtle.
Seven statement kinds cover the whole knowledge base: ``concept``,
``property``, ``individual``, ``evaluation``, ``task``, ``context`` and
``rule``. Statements end in `` .``; multi-assertion statements chain
with ``;``. Comments run from ``#`` to end of line. Strings are
double-quoted with exactly two escapes, ``\\"`` and ``\\\\``; numbers
are plain decimals with optional sign and fraction. ``true`` and
``false`` are reserved words.

Parsing is two-phase: syntax first (ParseError on the first bad token),
then assembly plus integrity checking (SemanticError, same shape, at
the offending statement's position). Query and rule texts share the
lexer.

Serialization is canonical: statements grouped by kind in a fixed group
order, each group sorted by canonical id, one statement per line, LF
line endings. Serializing the same KB twice is byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal

from .model import (
    AnchorSlot,
    CompatibilityRule,
    ContextSpec,
    EvaluationRecord,
    Individual,
    KnowledgeBase,
    LiteralValue,
    PropertyDef,
    PropertyKind,
    RuleAtom,
    RulePredicate,
    Severity,
    TaskSpec,
    Taxonomy,
    Violation,
    WILDCARD,
    canonical,
    validate,
)
from .queries import (
    Atom,
    EntityRef,
    FILTER_OPS,
    FilterAtom,
    PropertyAtom,
    Query,
    TypeAtom,
    Variable,
)

# =====================================================================
# Errors
# =====================================================================

class ParseError(Exception):
    """A syntax error with a 1-based source position."""

    def __init__(self, line: int, column: int, message: str,
                 expected: tuple[str, ...] = ()):
        detail = f"line {line}, column {column}: {message}"
        if expected:
            detail += " (expected: " + ", ".join(expected) + ")"
        super().__init__(detail)
        self.line = line
        self.column = column
        self.message = message
        self.expected = list(expected)


class SemanticError(ParseError):
    """An integrity violation found after a syntactically clean parse."""


# =====================================================================
# Lexer
# =====================================================================

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | set("0123456789-")
_VAR_CONT = _IDENT_START | set("0123456789")
_DIGITS = set("0123456789")

STATEMENT_KEYWORDS = ("concept", "property", "individual", "evaluation",
                      "task", "context", "rule")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int
    value: object = None


def _lex(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, column = 1, 1
    i, n = 0, len(text)

    def err(message: str, at_line: int, at_col: int) -> ParseError:
        return ParseError(at_line, at_col, message)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            column = 1
            continue
        if ch in " \t\r":
            i += 1
            column += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue

        start_line, start_col = line, column

        if ch == '"':
            i += 1
            column += 1
            parts: list[str] = []
            while True:
                if i >= n or text[i] in "\n\r":
                    raise err("unterminated string literal", start_line, start_col)
                c = text[i]
                if c == '"':
                    i += 1
                    column += 1
                    break
                if c == "\\":
                    if i + 1 >= n or text[i + 1] not in ('"', "\\"):
                        raise err("invalid escape sequence (only \\\" and \\\\ exist)",
                                  line, column)
                    parts.append(text[i + 1])
                    i += 2
                    column += 2
                    continue
                parts.append(c)
                i += 1
                column += 1
            tokens.append(Token("STRING", "".join(parts), start_line, start_col,
                                value="".join(parts)))
            continue

        if ch in _DIGITS or (ch in "+-" and i + 1 < n and text[i + 1] in _DIGITS):
            j = i
            if text[j] in "+-":
                j += 1
            while j < n and text[j] in _DIGITS:
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1] in _DIGITS:
                j += 1
                while j < n and text[j] in _DIGITS:
                    j += 1
            raw = text[i:j]
            tokens.append(Token("NUMBER", raw, start_line, start_col,
                                value=float(raw)))
            column += j - i
            i = j
            continue

        if ch in _IDENT_START:
            j = i + 1
            while j < n and text[j] in _IDENT_CONT:
                j += 1
            while j < n and text[j] == ":":
                if j + 1 < n and text[j + 1] in _IDENT_START:
                    j += 2
                    while j < n and text[j] in _IDENT_CONT:
                        j += 1
                else:
                    raise err("expected an identifier segment after ':'",
                              line, column + (j - i) + 1)
            raw = text[i:j]
            if raw == "true":
                tokens.append(Token("BOOL", raw, start_line, start_col, value=True))
            elif raw == "false":
                tokens.append(Token("BOOL", raw, start_line, start_col, value=False))
            else:
                tokens.append(Token("IDENT", raw, start_line, start_col, value=raw))
            column += j - i
            i = j
            continue

        if ch == "?":
            if i + 1 >= n or text[i + 1] not in _IDENT_START:
                raise err("expected a variable name after '?'", start_line, start_col)
            j = i + 1
            while j < n and text[j] in _VAR_CONT:
                j += 1
            raw = text[i:j]
            tokens.append(Token("VAR", raw, start_line, start_col, value=raw[1:]))
            column += j - i
            i = j
            continue

        two = text[i:i + 2]
        if two in ("!=", "<=", ">="):
            tokens.append(Token("OP", two, start_line, start_col, value=two))
            i += 2
            column += 2
            continue
        if two == "&&":
            tokens.append(Token("AMPAMP", two, start_line, start_col))
            i += 2
            column += 2
            continue
        if ch == "&":
            raise err("expected '&&'", start_line, start_col)
        if ch in "<>=":
            tokens.append(Token("OP", ch, start_line, start_col, value=ch))
            i += 1
            column += 1
            continue
        if ch == "!":
            tokens.append(Token("BANG", ch, start_line, start_col))
            i += 1
            column += 1
            continue
        simple = {".": "DOT", ";": "SEMI", ",": "COMMA", "{": "LBRACE",
                  "}": "RBRACE", "(": "LPAREN", ")": "RPAREN", "*": "STAR"}
        if ch in simple:
            tokens.append(Token(simple[ch], ch, start_line, start_col))
            i += 1
            column += 1
            continue
        raise err(f"unexpected character {ch!r}", start_line, start_col)

    tokens.append(Token("EOF", "", line, column))
    return tokens


# =====================================================================
# Token stream
# =====================================================================

class _Stream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind != "EOF":
            self.pos += 1
        return token

    def fail(self, message: str, expected: tuple[str, ...] = ()) -> ParseError:
        token = self.peek()
        return ParseError(token.line, token.column, message, expected)

    def expect(self, kind: str, description: str) -> Token:
        token = self.peek()
        if token.kind != kind:
            raise self.fail(f"found {_describe(token)}", (description,))
        return self.advance()

    def expect_keyword(self, word: str) -> Token:
        token = self.peek()
        if token.kind != "IDENT" or token.text != word:
            raise self.fail(f"found {_describe(token)}", (f"'{word}'",))
        return self.advance()

    def at_keyword(self, word: str) -> bool:
        token = self.peek()
        return token.kind == "IDENT" and token.text == word

    def expect_identifier(self) -> Token:
        return self.expect("IDENT", "an identifier")


def _describe(token: Token) -> str:
    if token.kind == "EOF":
        return "end of input"
    return f"{token.kind.lower()} {token.text!r}"


# =====================================================================
# Raw statements
# =====================================================================

RawValue = tuple[str, object]  # ("id"|"string"|"number"|"bool", payload)


@dataclass
class _RawConcept:
    id: str
    parents: list[tuple[str, int, int]]
    line: int
    column: int


@dataclass
class _RawProperty:
    id: str
    kind: PropertyKind
    domain: str
    range: str
    line: int
    column: int


@dataclass
class _RawIndividual:
    id: str
    types: list[str]
    assertions: list[tuple[str, RawValue, int, int]]
    line: int
    column: int


@dataclass
class _RawEvaluation:
    record: EvaluationRecord
    line: int
    column: int


@dataclass
class _RawNamedMap:
    keyword: str
    id: str
    attributes: list[tuple[str, LiteralValue]]
    line: int
    column: int


@dataclass
class _RawRule:
    rule: CompatibilityRule
    line: int
    column: int


@dataclass
class _Document:
    concepts: list[_RawConcept] = field(default_factory=list)
    properties: list[_RawProperty] = field(default_factory=list)
    individuals: list[_RawIndividual] = field(default_factory=list)
    evaluations: list[_RawEvaluation] = field(default_factory=list)
    tasks: list[_RawNamedMap] = field(default_factory=list)
    contexts: list[_RawNamedMap] = field(default_factory=list)
    rules: list[_RawRule] = field(default_factory=list)


def _parse_value(stream: _Stream) -> RawValue:
    token = stream.peek()
    if token.kind == "IDENT":
        stream.advance()
        return ("id", token.text)
    if token.kind == "STRING":
        stream.advance()
        return ("string", token.value)
    if token.kind == "NUMBER":
        stream.advance()
        return ("number", token.value)
    if token.kind == "BOOL":
        stream.advance()
        return ("bool", token.value)
    raise stream.fail(f"found {_describe(token)}",
                      ("an identifier", "a string", "a number", "true", "false"))


def _parse_concept(stream: _Stream, start: Token) -> _RawConcept:
    name = stream.expect_identifier()
    parents: list[tuple[str, int, int]] = []
    if stream.at_keyword("subclassof"):
        stream.advance()
        while True:
            parent = stream.expect_identifier()
            parents.append((parent.text, parent.line, parent.column))
            if stream.peek().kind == "COMMA":
                stream.advance()
                continue
            break
    stream.expect("DOT", "'.'")
    return _RawConcept(name.text, parents, start.line, start.column)


def _parse_property(stream: _Stream, start: Token) -> _RawProperty:
    name = stream.expect_identifier()
    kind_token = stream.peek()
    if stream.at_keyword("object"):
        kind = PropertyKind.OBJECT
    elif stream.at_keyword("datum"):
        kind = PropertyKind.DATUM
    else:
        raise stream.fail(f"found {_describe(kind_token)}", ("'object'", "'datum'"))
    stream.advance()
    stream.expect_keyword("domain")
    domain = stream.expect_identifier()
    stream.expect_keyword("range")
    range_token = stream.expect_identifier()
    stream.expect("DOT", "'.'")
    return _RawProperty(name.text, kind, domain.text, range_token.text,
                        start.line, start.column)


def _parse_individual(stream: _Stream, start: Token) -> _RawIndividual:
    name = stream.expect_identifier()
    stream.expect_keyword("type")
    types = [stream.expect_identifier().text]
    while stream.peek().kind == "COMMA":
        stream.advance()
        types.append(stream.expect_identifier().text)
    assertions: list[tuple[str, RawValue, int, int]] = []
    while stream.peek().kind == "SEMI":
        stream.advance()
        prop = stream.expect_identifier()
        value = _parse_value(stream)
        assertions.append((prop.text, value, prop.line, prop.column))
    stream.expect("DOT", "'.'")
    return _RawIndividual(name.text, types, assertions, start.line, start.column)


def _parse_id_or_wildcard(stream: _Stream) -> str:
    token = stream.peek()
    if token.kind == "STAR":
        stream.advance()
        return WILDCARD
    if token.kind == "IDENT":
        stream.advance()
        return token.text
    raise stream.fail(f"found {_describe(token)}", ("an identifier", "'*'"))


def _parse_evaluation(stream: _Stream, start: Token) -> _RawEvaluation:
    name = stream.expect_identifier()
    stream.expect_keyword("technique")
    technique = stream.expect_identifier()
    stream.expect_keyword("task")
    task = _parse_id_or_wildcard(stream)
    stream.expect_keyword("context")
    context = _parse_id_or_wildcard(stream)
    stream.expect_keyword("score")
    score = stream.expect("NUMBER", "a number")
    stream.expect_keyword("provenance")
    provenance = stream.expect("STRING", "a string")
    stream.expect("DOT", "'.'")
    record = EvaluationRecord(
        id=name.text, technique=technique.text, task=task, context=context,
        score=float(score.value), provenance=str(provenance.value))
    return _RawEvaluation(record, start.line, start.column)


def _parse_named_map(stream: _Stream, start: Token, keyword: str) -> _RawNamedMap:
    name = stream.expect_identifier()
    attributes: list[tuple[str, LiteralValue]] = []
    while stream.peek().kind == "SEMI":
        stream.advance()
        key = stream.expect_identifier()
        tag, payload = _parse_value(stream)
        if tag == "id":
            attributes.append((key.text, str(payload)))
        else:
            attributes.append((key.text, payload))  # type: ignore[arg-type]
    stream.expect("DOT", "'.'")
    return _RawNamedMap(keyword, name.text, attributes, start.line, start.column)


_PREDICATES = {p.value: p for p in RulePredicate}
_SLOTS = {s.value: s for s in AnchorSlot}


def _parse_rule_atom(stream: _Stream) -> RuleAtom:
    negated = False
    if stream.peek().kind == "BANG":
        stream.advance()
        negated = True
    token = stream.expect("IDENT", "a rule predicate")
    predicate = _PREDICATES.get(token.text)
    if predicate is None:
        raise ParseError(token.line, token.column,
                         f"unknown rule predicate {token.text!r}",
                         tuple(sorted(_PREDICATES)))
    epsilon: float | None = None
    slot: AnchorSlot | None = None
    if predicate is RulePredicate.SLOT_EQUALS:
        stream.expect("LPAREN", "'('")
        slot_token = stream.expect("IDENT", "an anchor slot name")
        slot = _SLOTS.get(slot_token.text)
        if slot is None:
            raise ParseError(slot_token.line, slot_token.column,
                             f"unknown anchor slot {slot_token.text!r}",
                             tuple(sorted(_SLOTS)))
        stream.expect("RPAREN", "')'")
    elif predicate is RulePredicate.SAME_LOCATION:
        if stream.peek().kind == "LPAREN":
            stream.advance()
            number = stream.expect("NUMBER", "a number")
            epsilon = float(number.value)
            if epsilon <= 0:
                raise ParseError(number.line, number.column,
                                 "sameLocation tolerance must be positive")
            stream.expect("RPAREN", "')'")
    elif stream.peek().kind == "LPAREN":
        raise stream.fail(f"{predicate.value} takes no argument")
    return RuleAtom(predicate=predicate, negated=negated,
                    epsilon=epsilon, slot=slot)


def _parse_rule_statement(stream: _Stream, start: Token) -> _RawRule:
    name = stream.expect_identifier()
    severity_token = stream.peek()
    if stream.at_keyword("forbid"):
        severity = Severity.FORBID
    elif stream.at_keyword("warn"):
        severity = Severity.WARN
    else:
        raise stream.fail(f"found {_describe(severity_token)}",
                          ("'forbid'", "'warn'"))
    stream.advance()
    stream.expect_keyword("when")
    atoms = [_parse_rule_atom(stream)]
    while stream.peek().kind == "AMPAMP":
        stream.advance()
        atoms.append(_parse_rule_atom(stream))
    stream.expect("DOT", "'.'")
    rule = CompatibilityRule(id=name.text, severity=severity,
                             condition=tuple(atoms))
    return _RawRule(rule, start.line, start.column)


def _parse_document(text: str) -> _Document:
    stream = _Stream(_lex(text))
    doc = _Document()
    while stream.peek().kind != "EOF":
        token = stream.peek()
        if token.kind != "IDENT" or token.text not in STATEMENT_KEYWORDS:
            raise stream.fail(
                f"found {_describe(token)} where a statement begins",
                tuple(f"'{k}'" for k in STATEMENT_KEYWORDS))
        stream.advance()
        if token.text == "concept":
            doc.concepts.append(_parse_concept(stream, token))
        elif token.text == "property":
            doc.properties.append(_parse_property(stream, token))
        elif token.text == "individual":
            doc.individuals.append(_parse_individual(stream, token))
        elif token.text == "evaluation":
            doc.evaluations.append(_parse_evaluation(stream, token))
        elif token.text == "task":
            doc.tasks.append(_parse_named_map(stream, token, "task"))
        elif token.text == "context":
            doc.contexts.append(_parse_named_map(stream, token, "context"))
        else:
            doc.rules.append(_parse_rule_statement(stream, token))
    return doc


# =====================================================================
# Assembly
# =====================================================================

def _assemble(doc: _Document) -> tuple[KnowledgeBase, "_Positions"]:
    positions = _Positions()

    concepts: list[str] = []
    seen_concepts: dict[str, _RawConcept] = {}
    edges: list[tuple[str, str]] = []
    for raw in doc.concepts:
        key = canonical(raw.id)
        if key in seen_concepts:
            raise SemanticError(raw.line, raw.column,
                                f"concept declared more than once: {raw.id}")
        seen_concepts[key] = raw
        concepts.append(raw.id)
        positions.set(("concept", key), raw.line, raw.column)
        for parent, p_line, p_col in raw.parents:
            edges.append((raw.id, parent))
            positions.set(("edge", key, canonical(parent)), p_line, p_col)

    property_kinds: dict[str, PropertyKind] = {}
    properties: list[PropertyDef] = []
    for raw in doc.properties:
        properties.append(PropertyDef(id=raw.id, kind=raw.kind,
                                      domain=raw.domain, range=raw.range))
        positions.set(("property", canonical(raw.id)), raw.line, raw.column)
        property_kinds.setdefault(canonical(raw.id), raw.kind)

    individuals: list[Individual] = []
    for raw in doc.individuals:
        object_assertions: list[tuple[str, str]] = []
        datum_assertions: list[tuple[str, LiteralValue]] = []
        key = canonical(raw.id)
        positions.set(("individual", key), raw.line, raw.column)
        for prop, (tag, payload), a_line, a_col in raw.assertions:
            positions.set(("assertion", key, canonical(prop)), a_line, a_col)
            kind = property_kinds.get(canonical(prop))
            if tag == "id":
                if kind is PropertyKind.DATUM:
                    datum_assertions.append((prop, str(payload)))
                else:
                    object_assertions.append((prop, str(payload)))
            elif tag == "string":
                datum_assertions.append((prop, str(payload)))
            elif tag == "number":
                datum_assertions.append((prop, float(payload)))  # type: ignore[arg-type]
            else:
                datum_assertions.append((prop, bool(payload)))
        individuals.append(Individual(
            id=raw.id, asserted_types=tuple(raw.types),
            object_assertions=tuple(object_assertions),
            datum_assertions=tuple(datum_assertions)))

    for raw in doc.evaluations:
        positions.set(("evaluation", canonical(raw.record.id)), raw.line, raw.column)
    for raw in doc.tasks:
        positions.set(("task", canonical(raw.id)), raw.line, raw.column)
    for raw in doc.contexts:
        positions.set(("context", canonical(raw.id)), raw.line, raw.column)
    for raw in doc.rules:
        positions.set(("rule", canonical(raw.rule.id)), raw.line, raw.column)

    kb = KnowledgeBase(
        taxonomy=Taxonomy(concepts=tuple(concepts),
                          direct_subsumptions=tuple(edges)),
        properties=tuple(properties),
        individuals=tuple(individuals),
        evaluations=tuple(r.record for r in doc.evaluations),
        tasks=tuple(TaskSpec(id=t.id, attributes=tuple(t.attributes))
                    for t in doc.tasks),
        contexts=tuple(ContextSpec(id=c.id, attributes=tuple(c.attributes))
                       for c in doc.contexts),
        rules=tuple(r.rule for r in doc.rules),
    )
    return kb, positions


class _Positions:
    """Statement and assertion positions for semantic error reporting."""

    def __init__(self):
        self._map: dict[tuple, tuple[int, int]] = {}

    def set(self, key: tuple, line: int, column: int) -> None:
        self._map.setdefault(key, (line, column))

    def get(self, key: tuple) -> tuple[int, int] | None:
        return self._map.get(key)

    def locate(self, violation: Violation) -> tuple[int, int]:
        """Best-effort position for a validation finding."""
        location = violation.location
        if location == "taxonomy":
            edge_positions = [pos for key, pos in self._map.items()
                              if key[0] == "edge"]
            return max(edge_positions, default=(1, 1))
        for prefix in ("concept", "property", "individual", "evaluation",
                       "task", "context", "rule"):
            marker = prefix + " "
            if location.startswith(marker):
                rest = location[len(marker):]
                if " / " in rest:
                    subject, prop = rest.split(" / ", 1)
                    found = self.get(("assertion", canonical(subject),
                                      canonical(prop)))
                    if found:
                        return found
                    rest = subject
                found = self.get((prefix, canonical(rest)))
                if found:
                    return found
        return (1, 1)


def load_document(text: str) -> tuple[KnowledgeBase, list[Violation]]:
    """Parse a VTKB document and report all integrity violations.

    Raises ParseError on syntax errors; semantic findings come back as
    data so callers can show all of them.
    """
    kb, _ = _assemble_with_positions(text)
    return kb, validate(kb)


def _assemble_with_positions(text: str) -> tuple[KnowledgeBase, _Positions]:
    return _assemble(_parse_document(text))


def parse_kb(text: str, origin: str = "<inline>") -> KnowledgeBase:
    """Parse a VTKB document into a validated KnowledgeBase.

    Raises:
        ParseError: on the first syntax error.
        SemanticError: on the first integrity violation (position of the
            offending statement or assertion).
    """
    kb, positions = _assemble_with_positions(text)
    violations = validate(kb)
    if violations:
        def sort_key(v: Violation):
            line, column = positions.locate(v)
            return (line, column, v.kind, v.message)
        first = min(violations, key=sort_key)
        line, column = positions.locate(first)
        raise SemanticError(line, column, str(first))
    return kb


# =====================================================================
# Query parsing
# =====================================================================

def _parse_query_term(stream: _Stream):
    token = stream.peek()
    if token.kind == "VAR":
        stream.advance()
        return Variable(str(token.value))
    if token.kind == "IDENT":
        stream.advance()
        return EntityRef(token.text)
    if token.kind == "STRING":
        stream.advance()
        return str(token.value)
    if token.kind == "NUMBER":
        stream.advance()
        return float(token.value)  # type: ignore[arg-type]
    if token.kind == "BOOL":
        stream.advance()
        return bool(token.value)
    raise stream.fail(f"found {_describe(token)}",
                      ("a variable", "an identifier", "a literal"))


def _parse_query_atom(stream: _Stream) -> Atom:
    token = stream.peek()
    if token.kind == "IDENT" and token.text == "filter":
        stream.advance()
        stream.expect("LPAREN", "'('")
        var_token = stream.expect("VAR", "a variable")
        op_token = stream.expect("OP", "a comparison operator")
        if op_token.text not in FILTER_OPS:
            raise ParseError(op_token.line, op_token.column,
                             f"unknown comparison operator {op_token.text!r}",
                             FILTER_OPS)
        literal_token = stream.peek()
        if literal_token.kind == "STRING":
            literal: LiteralValue = str(literal_token.value)
        elif literal_token.kind == "NUMBER":
            literal = float(literal_token.value)  # type: ignore[arg-type]
        elif literal_token.kind == "BOOL":
            literal = bool(literal_token.value)
        else:
            raise stream.fail(f"found {_describe(literal_token)}",
                              ("a string", "a number", "true", "false"))
        stream.advance()
        stream.expect("RPAREN", "')'")
        return FilterAtom(var=Variable(str(var_token.value)),
                          op=op_token.text, literal=literal)

    subject = stream.expect("VAR", "a variable")
    predicate = stream.expect("IDENT", "'type' or a property name")
    if predicate.text == "type":
        concept = stream.expect_identifier()
        return TypeAtom(var=Variable(str(subject.value)), concept=concept.text)
    value = _parse_query_term(stream)
    return PropertyAtom(subject=Variable(str(subject.value)),
                        prop=predicate.text, value=value)


def parse_query(text: str) -> Query:
    """Parse a ``select ... where { ... }`` query.

    Raises ParseError for syntax problems and SemanticError for
    structural ones (unbound head or filter variables).
    """
    stream = _Stream(_lex(text))
    stream.expect_keyword("select")
    head_tokens = [stream.expect("VAR", "a variable")]
    while stream.peek().kind == "COMMA":
        stream.advance()
        head_tokens.append(stream.expect("VAR", "a variable"))
    stream.expect_keyword("where")
    stream.expect("LBRACE", "'{'")
    if stream.peek().kind == "RBRACE":
        raise stream.fail("query body must contain at least one atom",
                          ("an atom",))
    atoms = [_parse_query_atom(stream)]
    stream.expect("DOT", "'.'")
    while stream.peek().kind != "RBRACE":
        atoms.append(_parse_query_atom(stream))
        stream.expect("DOT", "'.'")
    stream.expect("RBRACE", "'}'")
    stream.expect("EOF", "end of input")

    generated: set[Variable] = set()
    for atom in atoms:
        if isinstance(atom, TypeAtom):
            generated.add(atom.var)
        elif isinstance(atom, PropertyAtom):
            generated.add(atom.subject)
            if isinstance(atom.value, Variable):
                generated.add(atom.value)
    for token in head_tokens:
        if Variable(str(token.value)) not in generated:
            raise SemanticError(token.line, token.column,
                                f"head variable ?{token.value} is not bound "
                                f"by the query body")
    for atom in atoms:
        if isinstance(atom, FilterAtom) and atom.var not in generated:
            raise SemanticError(1, 1,
                                f"filter variable {atom.var} is not bound "
                                f"by the query body")
    return Query(head=tuple(Variable(str(t.value)) for t in head_tokens),
                 body=tuple(atoms))


def parse_rule(text: str) -> CompatibilityRule:
    """Parse a single standalone rule statement."""
    stream = _Stream(_lex(text))
    start = stream.expect_keyword("rule")
    raw = _parse_rule_statement(stream, start)
    stream.expect("EOF", "end of input")
    return raw.rule


# =====================================================================
# Serialization
# =====================================================================

def format_number(value: float) -> str:
    """Decimal text for a float, never in exponent notation."""
    text = repr(float(value))
    if "e" in text or "E" in text:
        text = format(Decimal(text), "f")
    return text


def _string_text(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _value_text(value: LiteralValue) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_number(value)
    return _string_text(value)


def _atom_text(atom: RuleAtom) -> str:
    prefix = "!" if atom.negated else ""
    if atom.predicate is RulePredicate.SAME_LOCATION:
        assert atom.epsilon is not None
        return f"{prefix}sameLocation({format_number(atom.epsilon)})"
    if atom.predicate is RulePredicate.SLOT_EQUALS:
        assert atom.slot is not None
        return f"{prefix}slotEquals({atom.slot.value})"
    return prefix + atom.predicate.value


def serialize_kb(kb: KnowledgeBase) -> str:
    """Canonical VTKB text for a valid knowledge base.

    Groups run concepts, properties, individuals, evaluations, tasks,
    contexts, rules; each group is sorted by canonical id; an empty KB
    serializes to the empty string.
    """
    groups: list[list[str]] = []

    children: dict[str, list[str]] = {}
    for sub, sup in kb.taxonomy.direct_subsumptions:
        children.setdefault(canonical(sub), []).append(sup)
    concept_lines = []
    for concept in kb.taxonomy.concepts:
        parents = sorted(children.get(canonical(concept), []), key=canonical)
        if parents:
            concept_lines.append(
                f"concept {concept} subclassof {', '.join(parents)} .")
        else:
            concept_lines.append(f"concept {concept} .")
    groups.append(concept_lines)

    groups.append([
        f"property {p.id} {p.kind.value} domain {p.domain} range {p.range} ."
        for p in kb.properties
    ])

    individual_lines = []
    for ind in kb.individuals:
        parts = [f"individual {ind.id} type {', '.join(ind.asserted_types)}"]
        for prop, target in ind.object_assertions:
            parts.append(f"{prop} {target}")
        for prop, value in ind.datum_assertions:
            parts.append(f"{prop} {_value_text(value)}")
        individual_lines.append(" ; ".join(parts) + " .")
    groups.append(individual_lines)

    groups.append([
        f"evaluation {e.id} technique {e.technique} task {e.task} "
        f"context {e.context} score {format_number(e.score)} "
        f"provenance {_string_text(e.provenance)} ."
        for e in kb.evaluations
    ])

    def named_map_lines(keyword: str, entries) -> list[str]:
        lines = []
        for entry in entries:
            parts = [f"{keyword} {entry.id}"]
            for key, value in entry.attributes:
                parts.append(f"{key} {_value_text(value)}")
            lines.append(" ; ".join(parts) + " .")
        return lines

    groups.append(named_map_lines("task", kb.tasks))
    groups.append(named_map_lines("context", kb.contexts))

    groups.append([
        f"rule {r.id} {r.severity.value} when "
        + " && ".join(_atom_text(atom) for atom in r.condition) + " ."
        for r in kb.rules
    ])

    populated = [g for g in groups if g]
    if not populated:
        return ""
    return "\n\n".join("\n".join(g) for g in populated) + "\n"
