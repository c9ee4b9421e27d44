"""Command-line interface.

Subcommands: validate, classify, query, match, recommend, check, serve.
Data goes to stdout, diagnostics to stderr. Exit codes: 0 success,
1 parse/semantic/reference failures, 2 usage errors (argparse).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import selection
from .matching import candidates
from .model import KbError, KnowledgeBase, canonical
from .queries import evaluate
from .rules import with_builtin_rules
from .textio import ParseError, load_document, parse_kb, parse_query
from .views import resolve_data_item
from .wire import (
    WireFormatError,
    decode_data_item,
    decode_plan,
    decode_scene,
    dump_json,
    encode_check,
    encode_recommendation,
    render_cell,
)


class _Failure(Exception):
    """A terminal CLI failure carrying the message for stderr."""


def _read_file(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise _Failure(f"cannot read {path}: {exc.strerror}") from None


def _read_json(path: str) -> object:
    text = _read_file(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise _Failure(f"{path}: line {exc.lineno}, column {exc.colno}: "
                       f"{exc.msg}") from None


def _load_kb(path: str) -> KnowledgeBase:
    return parse_kb(_read_file(path), origin=path)


def _effective_kb(args: argparse.Namespace) -> KnowledgeBase:
    kb = _load_kb(args.kb)
    if getattr(args, "no_default_rules", False):
        return kb
    return with_builtin_rules(kb)


# ---------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------

def _cmd_validate(args: argparse.Namespace) -> int:
    _, violations = load_document(_read_file(args.kb))
    for violation in violations:
        print(violation)
    return 0 if not violations else 1


def _cmd_classify(args: argparse.Namespace) -> int:
    kb = _load_kb(args.kb)
    closure = kb.subsumption
    if not args.emit_hierarchy:
        for sub, sup in sorted(closure.pairs()):
            print(f"{sub}\t{sup}")
        return 0

    children: dict[str, list[str]] = {}
    has_parent: set[str] = set()
    for sub, sup in kb.taxonomy.direct_subsumptions:
        children.setdefault(canonical(sup), []).append(canonical(sub))
        has_parent.add(canonical(sub))
    roots = [c for c in map(canonical, kb.taxonomy.concepts)
             if c not in has_parent]

    def emit(concept: str, depth: int) -> None:
        print("  " * depth + concept)
        for child in sorted(set(children.get(concept, []))):
            emit(child, depth + 1)

    for root in sorted(set(roots)):
        emit(root, 0)
    return 0


def _cmd_query(args: argparse.Namespace) -> int:
    kb = _load_kb(args.kb)
    query = parse_query(_read_file(args.query))
    result = evaluate(kb, kb.subsumption, query)
    for row in result.rows:
        print("\t".join(render_cell(cell) for cell in row))
    return 0


def _cmd_match(args: argparse.Namespace) -> int:
    kb = _load_kb(args.kb)
    item = decode_data_item(_read_json(args.data))
    resolved = resolve_data_item(kb, item)
    for technique_id in candidates(kb, kb.subsumption, resolved):
        print(technique_id)
    return 0


def _cmd_recommend(args: argparse.Namespace) -> int:
    kb = _effective_kb(args)
    scene = decode_scene(_read_json(args.scene))
    plans = selection.recommend(kb, kb.subsumption, scene, top_n=args.top)
    sys.stdout.write(dump_json(encode_recommendation(plans)))
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    kb = _effective_kb(args)
    scene = decode_scene(_read_json(args.scene))
    placements = decode_plan(_read_json(args.plan))
    result = selection.check(kb, scene, placements)
    sys.stdout.write(dump_json(encode_check(result)))
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import ServiceConfig, serve
    config = ServiceConfig(kb_path=args.kb, port=args.port,
                           default_rules_enabled=not args.no_default_rules,
                           cors_allowed_origin=args.cors_origin)
    serve(config)
    return 0


# ---------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vtkb",
        description="Knowledge-base tooling for 3D urban visualization "
                    "technique selection.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="report integrity violations")
    p_validate.add_argument("kb", help="knowledge base file")
    p_validate.set_defaults(handler=_cmd_validate)

    p_classify = sub.add_parser("classify", help="print the subsumption closure")
    p_classify.add_argument("kb", help="knowledge base file")
    p_classify.add_argument("--emit-hierarchy", action="store_true",
                            help="print an indented concept tree instead of pairs")
    p_classify.set_defaults(handler=_cmd_classify)

    p_query = sub.add_parser("query", help="run a select query")
    p_query.add_argument("kb", help="knowledge base file")
    p_query.add_argument("--query", required=True,
                         help="query file, or - for stdin")
    p_query.set_defaults(handler=_cmd_query)

    p_match = sub.add_parser("match", help="list candidate techniques for one data item")
    p_match.add_argument("kb", help="knowledge base file")
    p_match.add_argument("--data", required=True,
                         help="JSON file holding one data item")
    p_match.set_defaults(handler=_cmd_match)

    p_recommend = sub.add_parser("recommend", help="rank scene plans")
    p_recommend.add_argument("kb", help="knowledge base file")
    p_recommend.add_argument("--scene", required=True,
                             help="JSON scene file")
    p_recommend.add_argument("--top", type=int, default=5,
                             help="number of plans to return (default 5)")
    p_recommend.add_argument("--no-default-rules", action="store_true",
                             help="use only the rules declared in the KB")
    p_recommend.set_defaults(handler=_cmd_recommend)

    p_check = sub.add_parser("check", help="check one plan against the rules")
    p_check.add_argument("kb", help="knowledge base file")
    p_check.add_argument("--scene", required=True, help="JSON scene file")
    p_check.add_argument("--plan", required=True, help="JSON plan file")
    p_check.add_argument("--no-default-rules", action="store_true",
                         help="use only the rules declared in the KB")
    p_check.set_defaults(handler=_cmd_check)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("kb", help="knowledge base file")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--no-default-rules", action="store_true",
                         help="use only the rules declared in the KB")
    p_serve.add_argument("--cors-origin", default="*",
                         help="allowed CORS origin (default *)")
    p_serve.set_defaults(handler=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (KbError, _Failure, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
