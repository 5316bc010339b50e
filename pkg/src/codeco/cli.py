"""Command-line front end.

Exit codes: 0 success; 1 negative result (parse rejected, ambiguity or
counterexamples found, invalid grammar); 2 usage or input error (bad
flags, unreadable file, syntax errors); 3 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import __version__
from .core import Grammar, validate_grammar
from .errors import (
    BudgetExceededError,
    GrammarSyntaxError,
    GrammarValidationError,
    TokenRejectedError,
    UnknownStartError,
)
from .generate import DEFAULT_BUDGET, check_ambiguity, check_subset, generate
from .notation import parse_grammar
from .oracle import OracleConfig, continuations_naive, enumerate_naive
from .parser import extract_trees, feed_token, is_complete, new_session, next_tokens
from .wire import option_to_wire, render_tree_text, tree_to_wire

OK, NEGATIVE, USAGE, BUDGET = 0, 1, 2, 3


def _read_grammar_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise _CliError(USAGE, f"cannot read {path}: {e.strerror}")


def _load(path: str) -> Grammar:
    text = _read_grammar_text(path)
    try:
        return parse_grammar(text)
    except GrammarSyntaxError as e:
        for d in e.diagnostics:
            print(f"{path}:{d}")
        raise _CliError(USAGE, None)
    except GrammarValidationError as e:
        for d in e.diagnostics:
            print(f"{path}:{d}")
        raise _CliError(NEGATIVE, None)


class _CliError(Exception):
    def __init__(self, code: int, message: Optional[str]):
        self.code = code
        self.message = message


def _gather_tokens(args) -> list[str]:
    tokens = list(args.tokens)
    if args.stdin:
        tokens.extend(sys.stdin.read().split())
    return tokens


def _feed_all(grammar: Grammar, start: Optional[str], tokens) -> tuple:
    """Returns (state, rejected_token or None)."""
    state = new_session(grammar, start)
    for token in tokens:
        try:
            state = feed_token(state, token)
        except TokenRejectedError:
            return state, token
    return state, None


# ---------------------------------------------------------------------------
# Commands


def cmd_validate(args) -> int:
    text = _read_grammar_text(args.grammar)
    try:
        grammar = parse_grammar(text)
    except GrammarSyntaxError as e:
        for d in e.diagnostics:
            print(f"{args.grammar}:{d}")
        return USAGE
    except GrammarValidationError as e:
        for d in e.diagnostics:
            print(f"{args.grammar}:{d}")
        return NEGATIVE
    issues = validate_grammar(grammar)  # parse_grammar already validated; belt and braces
    for d in issues:
        print(f"{args.grammar}: {d}")
    if issues:
        return NEGATIVE
    print(f"ok: {len(grammar.rules)} rules, {len(grammar.lexical_rules)} lexical rules, start {grammar.start!r}")
    return OK


def cmd_complete(args) -> int:
    grammar = _load(args.grammar)
    state, rejected = _feed_all(grammar, args.start, _gather_tokens(args))
    if rejected is not None:
        return NEGATIVE
    options = next_tokens(state)
    if args.details:
        for opt in options:
            wire = option_to_wire(opt)
            feats = ",".join(f"{n}:{v}" for n, v in sorted(wire["features"].items()))
            print(f"{wire['token']}\t{wire['category']}\t{feats}")
    else:
        for token in sorted({opt.token for opt in options}):
            print(token)
    return OK if options or is_complete(state) else NEGATIVE


def cmd_parse(args) -> int:
    grammar = _load(args.grammar)
    tokens = _gather_tokens(args)
    state, rejected = _feed_all(grammar, args.start, tokens)
    if rejected is not None:
        print(f"rejected at token {rejected!r} (position {len(state.tokens)})")
        return NEGATIVE
    if not is_complete(state):
        print("incomplete")
        return NEGATIVE
    trees = extract_trees(state)
    print(f"complete: {len(trees)} derivation(s)")
    if args.trees:
        if args.format == "json":
            print(json.dumps([tree_to_wire(t) for t in trees], indent=2, sort_keys=True))
        else:
            for i, tree in enumerate(trees):
                if len(trees) > 1:
                    print(f"-- derivation {i + 1}")
                print(render_tree_text(tree))
    return OK


def cmd_generate(args) -> int:
    grammar = _load(args.grammar)
    for sentence, _tree in generate(grammar, args.start, args.max_tokens, args.budget):
        print(" ".join(sentence))
    return OK


def cmd_check_ambiguity(args) -> int:
    grammar = _load(args.grammar)
    report = check_ambiguity(grammar, args.start, args.max_tokens, args.budget)
    print(f"sentences: {report.sentence_count} (bound {report.bound})")
    if not report.duplicate_groups:
        print("no ambiguity found within bound")
        return OK
    for sentence, count in report.duplicate_groups:
        print(f"ambiguous ({count} derivations): {' '.join(sentence)}")
    return NEGATIVE


def cmd_check_subset(args) -> int:
    grammar_a = _load(args.grammar_a)
    grammar_b = _load(args.grammar_b)
    report = check_subset(grammar_a, grammar_b, args.start_a, args.start_b,
                          args.max_tokens, args.budget)
    print(f"checked: {report.checked_count} sentences (bound {report.bound})")
    if report.is_subset:
        print("no counterexamples: bounded evidence of inclusion")
        return OK
    for sentence in report.counterexamples:
        print(f"not parsed by second grammar: {' '.join(sentence)}")
    return NEGATIVE


def cmd_serve(args) -> int:
    import os

    if not os.path.isdir(args.grammar_dir):
        print(f"not a directory: {args.grammar_dir}")
        return USAGE
    if not (0 < args.port < 65536):
        print(f"invalid port: {args.port}")
        return USAGE
    from .service import create_app

    try:
        app = create_app(args.grammar_dir, session_ttl=args.session_ttl)
    except (GrammarSyntaxError, GrammarValidationError) as e:
        for d in e.diagnostics:
            print(str(d))
        return USAGE
    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return OK


def cmd_oracle(args) -> int:
    # debugging aid: run the brute-force baseline directly
    grammar = _load(args.grammar)
    cfg = OracleConfig(max_tokens=args.max_tokens, expansion_budget=args.budget)
    if args.continuations:
        for token in sorted(continuations_naive(grammar, args.tokens, cfg, args.start)):
            print(token)
    else:
        for sentence in sorted(enumerate_naive(grammar, args.start, cfg)):
            print(" ".join(sentence))
    return OK


# ---------------------------------------------------------------------------
# Argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="codeco",
        description="Controlled-language grammar toolkit: validate grammars, "
        "compute continuations, parse, generate, and serve a completion service.",
    )
    parser.add_argument("--version", action="version", version=f"codeco {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add_tokens(p):
        p.add_argument("tokens", nargs="*", help="tokens, one per argument")
        p.add_argument("--stdin", action="store_true",
                       help="also read whitespace-separated tokens from stdin")
        p.add_argument("--start", default=None, help="override the start category")

    p = sub.add_parser("validate", help="parse and validate a grammar file")
    p.add_argument("grammar")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("complete", help="print the possible next tokens after a prefix")
    p.add_argument("grammar")
    add_tokens(p)
    p.add_argument("--details", action="store_true",
                   help="print token, category and features (tab-separated)")
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("parse", help="parse a token sequence")
    p.add_argument("grammar")
    add_tokens(p)
    p.add_argument("--trees", action="store_true", help="print syntax trees")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("generate", help="exhaustively generate sentences up to a bound")
    p.add_argument("grammar")
    p.add_argument("--max-tokens", type=int, default=8)
    p.add_argument("--start", default=None)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("check-ambiguity", help="report sentences with multiple derivations")
    p.add_argument("grammar")
    p.add_argument("--max-tokens", type=int, default=8)
    p.add_argument("--start", default=None)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_check_ambiguity)

    p = sub.add_parser("check-subset",
                       help="check every sentence of grammar A parses under grammar B")
    p.add_argument("grammar_a")
    p.add_argument("grammar_b")
    p.add_argument("--max-tokens", type=int, default=8)
    p.add_argument("--start-a", default=None)
    p.add_argument("--start-b", default=None)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_check_subset)

    p = sub.add_parser("serve", help="run the HTTP completion service")
    p.add_argument("grammar_dir", help="directory of .codeco grammar files")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--session-ttl", type=float, default=1800.0,
                   help="idle seconds before a session expires")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("oracle")  # undocumented: brute-force baseline for debugging
    p.add_argument("grammar")
    p.add_argument("tokens", nargs="*")
    p.add_argument("--start", default=None)
    p.add_argument("--max-tokens", type=int, default=8)
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--continuations", action="store_true")
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else USAGE
    try:
        return args.func(args)
    except _CliError as e:
        if e.message:
            print(e.message)
        return e.code
    except BudgetExceededError as e:
        print(f"budget exceeded: {e}")
        return BUDGET
    except UnknownStartError as e:
        print(str(e))
        return USAGE
    except TokenRejectedError as e:
        print(str(e))
        return NEGATIVE


def main_entry():  # console_scripts hook
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
