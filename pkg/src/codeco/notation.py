"""Textual grammar format: parsing and serialization.

File layout (UTF-8, extension `.codeco`):

    # comments run to end of line
    start: s                      # optional; defaults to the first rule's head
    s ~> np vp                    # `~>` marks a scope-closing rule
    np => det(exist:+) noun(text:$N) >(type:noun, noun:$N)
    ref => [the] noun(text:$N) <(type:noun, noun:$N)
    det(exist:-) => // [every]
    noun(text:man, noun:man) => [man]
    empty => .                    # explicit epsilon body

Categories are `name` or `name(f:v, g:$Var)`; terminals `[token]` or
`['token']`; forward references `>(…)`, backward references `<(…)`,
scope openers `//`. A name is classified as a preterminal iff all of
its rules have all-terminal bodies.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .core import (
    Atom,
    Category,
    CategoryKind,
    FeatureStructure,
    Grammar,
    Rule,
    Variable,
    bwd_ref,
    fwd_ref,
    nonterminal,
    preterminal,
    scope_opener,
    terminal,
    validate_grammar,
)
from .errors import GrammarSyntaxError, GrammarValidationError


# ---------------------------------------------------------------------------
# Diagnostics


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1


@dataclass(frozen=True)
class ParseDiagnostic:
    span: SourceSpan
    message: str
    severity: str = "error"

    def __str__(self):
        return f"{self.span.line}:{self.span.column}: {self.severity}: {self.message}"


# ---------------------------------------------------------------------------
# Line tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#.*)
  | (?P<arrow>=>|~>)
  | (?P<scope>//)
  | (?P<var>\$[A-Za-z_][A-Za-z0-9_]*)
  | (?P<quoted>'[^'\s]*')
  | (?P<word>[A-Za-z0-9_+\-]+)
  | (?P<sym>[()\[\],:<>.])
    """,
    re.VERBOSE,
)

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_BARE_ATOM_RE = re.compile(r"[A-Za-z0-9_+\-]+\Z")


@dataclass(frozen=True)
class _Tok:
    type: str
    text: str
    col: int  # 1-based


def _lex_line(line: str, lineno: int) -> tuple[list[_Tok], Optional[ParseDiagnostic]]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(line):
        m = _TOKEN_RE.match(line, pos)
        if m is None:
            return toks, ParseDiagnostic(
                SourceSpan(lineno, pos + 1), f"unexpected character {line[pos]!r}"
            )
        kind = m.lastgroup
        if kind == "comment":
            break
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos + 1))
        pos = m.end()
    return toks, None


# ---------------------------------------------------------------------------
# Rule parser (recursive descent over one line)


class _LineParser:
    def __init__(self, toks: list[_Tok], lineno: int, var_ids: "_VarAllocator"):
        self.toks = toks
        self.i = 0
        self.lineno = lineno
        self.vars = var_ids

    def span(self, tok: Optional[_Tok] = None) -> SourceSpan:
        if tok is None:
            if self.i < len(self.toks):
                tok = self.toks[self.i]
            else:
                last = self.toks[-1]
                return SourceSpan(self.lineno, last.col + len(last.text), 1)
        return SourceSpan(self.lineno, tok.col, len(tok.text))

    def fail(self, message: str, tok: Optional[_Tok] = None):
        raise _LineError(ParseDiagnostic(self.span(tok), message))

    def peek(self) -> Optional[_Tok]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self) -> _Tok:
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of line")
        self.i += 1
        return tok

    def expect(self, type_: str, text: Optional[str] = None) -> _Tok:
        tok = self.peek()
        if tok is None or tok.type != type_ or (text is not None and tok.text != text):
            want = text or type_
            self.fail(f"expected {want!r}")
        return self.take()

    # grammar element parsers ------------------------------------------------

    def parse_rule(self) -> Rule:
        head = self.parse_element(head_position=True)
        arrow = self.peek()
        if arrow is None or arrow.type != "arrow":
            self.fail("expected '=>' or '~>' after rule head")
        self.take()
        scope_closing = arrow.text == "~>"
        body = self.parse_body()
        if self.peek() is not None:
            self.fail("unexpected trailing input")
        return Rule(head, tuple(body), scope_closing)

    def parse_body(self) -> list[Category]:
        nxt = self.peek()
        if nxt is not None and nxt.type == "sym" and nxt.text == ".":
            self.take()
            if self.peek() is not None:
                self.fail("nothing may follow the empty-body marker '.'")
            return []
        if nxt is None:
            self.fail("rule body is empty; write '.' for an intentional epsilon")
        body = []
        while self.peek() is not None:
            body.append(self.parse_element(head_position=False))
        return body

    def parse_element(self, head_position: bool) -> Category:
        tok = self.peek()
        if tok is None:
            self.fail("expected a category")
        if tok.type == "scope":
            self.take()
            if head_position:
                self.fail("scope opener '//' cannot be a rule head", tok)
            if self._at_feature_list():
                self.fail("scope opener carries no features")
            return scope_opener()
        if tok.type == "sym" and tok.text in ("<", ">"):
            self.take()
            if head_position:
                self.fail(f"reference category {tok.text!r} cannot be a rule head", tok)
            feats = self.parse_feature_list() if self._at_feature_list() else FeatureStructure()
            return fwd_ref(feats) if tok.text == ">" else bwd_ref(feats)
        if tok.type == "sym" and tok.text == "[":
            if head_position:
                self.fail("terminal cannot be a rule head", tok)
            return self.parse_terminal()
        if tok.type == "word":
            if not _IDENT_RE.match(tok.text):
                self.fail(f"{tok.text!r} is not a valid category name", tok)
            self.take()
            feats = self.parse_feature_list() if self._at_feature_list() else FeatureStructure()
            # kind refined to preterminal later, once all rules are known
            return nonterminal(tok.text, feats)
        self.fail(f"unexpected {tok.text!r}", tok)

    def parse_terminal(self) -> Category:
        self.expect("sym", "[")
        tok = self.peek()
        if tok is None:
            self.fail("unterminated terminal")
        if tok.type == "quoted":
            text = tok.text[1:-1]
            if not text:
                self.fail("empty token", tok)
            self.take()
        elif tok.type == "word" and _IDENT_RE.match(tok.text):
            text = tok.text
            self.take()
        else:
            self.fail("expected a token inside [ ]", tok)
        self.expect("sym", "]")
        return terminal(text)

    def _at_feature_list(self) -> bool:
        tok = self.peek()
        return tok is not None and tok.type == "sym" and tok.text == "("

    def parse_feature_list(self) -> FeatureStructure:
        self.expect("sym", "(")
        entries: list[tuple[str, object]] = []
        seen: set[str] = set()
        while True:
            name_tok = self.peek()
            if name_tok is None or name_tok.type != "word" or not _IDENT_RE.match(name_tok.text):
                self.fail("expected a feature name")
            self.take()
            self.expect("sym", ":")
            entries.append((name_tok.text, self.parse_value()))
            if name_tok.text in seen:
                self.fail(f"feature name {name_tok.text!r} duplicated", name_tok)
            seen.add(name_tok.text)
            tok = self.peek()
            if tok is not None and tok.type == "sym" and tok.text == ",":
                self.take()
                continue
            self.expect("sym", ")")
            return FeatureStructure(tuple(entries))

    def parse_value(self):
        tok = self.peek()
        if tok is None:
            self.fail("expected a feature value")
        if tok.type == "var":
            self.take()
            return self.vars.get(tok.text[1:])
        if tok.type == "word":
            self.take()
            return Atom(tok.text)
        if tok.type == "quoted":
            text = tok.text[1:-1]
            if not text:
                self.fail("empty atom", tok)
            self.take()
            return Atom(text)
        self.fail(f"expected a feature value, got {tok.text!r}", tok)


class _LineError(Exception):
    def __init__(self, diagnostic: ParseDiagnostic):
        self.diagnostic = diagnostic


class _VarAllocator:
    """Hands out rule-local variable objects; ids are globally distinct."""

    def __init__(self, start: int = 0):
        self.next_id = start
        self.by_name: dict[str, Variable] = {}

    def new_rule(self):
        self.by_name = {}

    def get(self, name: str) -> Variable:
        if name not in self.by_name:
            self.by_name[name] = Variable(self.next_id, name)
            self.next_id += 1
        return self.by_name[name]


# ---------------------------------------------------------------------------
# Grammar assembly

_START_LINE_RE = re.compile(r"\s*start\s*:\s*(\S+)\s*(#.*)?\Z")


def build_grammar(raw_rules: list[Rule], start: Optional[str]) -> Grammar:
    """Classify names as preterminals, split the lexicon off and fix up
    category kinds. Shared by the text parser and by programmatic
    grammar construction so both produce identical structures."""
    by_name: dict[str, list[Rule]] = {}
    for rule in raw_rules:
        by_name.setdefault(rule.head.name, []).append(rule)
    pre_names = {
        name
        for name, rules in by_name.items()
        if name is not None and rules and all(r.is_lexical() for r in rules)
    }

    def fix(cat: Category) -> Category:
        if cat.kind in (CategoryKind.NONTERMINAL, CategoryKind.PRETERMINAL):
            kind = CategoryKind.PRETERMINAL if cat.name in pre_names else CategoryKind.NONTERMINAL
            if kind is not cat.kind:
                return Category(kind, name=cat.name, features=cat.features)
        return cat

    fixed = [Rule(fix(r.head), tuple(fix(c) for c in r.body), r.scope_closing) for r in raw_rules]
    rules = tuple(r for r in fixed if r.head.name not in pre_names)
    lexical = tuple(r for r in fixed if r.head.name in pre_names)
    if start is None:
        start = raw_rules[0].head.name if raw_rules else "s"
    return Grammar(rules=rules, lexical_rules=lexical, start=start)


def parse_grammar(text: str) -> Grammar:
    """Parse grammar text into a validated Grammar.

    Raises GrammarSyntaxError (with per-line spans) on syntax errors and
    GrammarValidationError when the text parses but breaks a structural
    invariant. Rule order in the file is preserved.
    """
    diagnostics: list[ParseDiagnostic] = []
    raw_rules: list[Rule] = []
    rule_lines: list[int] = []
    start: Optional[str] = None
    vars_ = _VarAllocator()

    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _START_LINE_RE.match(line)
        if m:
            if start is not None:
                diagnostics.append(
                    ParseDiagnostic(SourceSpan(lineno, 1, len(stripped)), "duplicate start declaration")
                )
            elif not _IDENT_RE.match(m.group(1)):
                diagnostics.append(
                    ParseDiagnostic(SourceSpan(lineno, 1, len(stripped)), f"invalid start name {m.group(1)!r}")
                )
            else:
                start = m.group(1)
            continue
        toks, lex_err = _lex_line(line, lineno)
        if lex_err is not None:
            diagnostics.append(lex_err)
            continue
        if not toks:
            continue
        vars_.new_rule()
        try:
            raw_rules.append(_LineParser(toks, lineno, vars_).parse_rule())
            rule_lines.append(lineno)
        except _LineError as e:
            diagnostics.append(e.diagnostic)

    if diagnostics:
        raise GrammarSyntaxError(diagnostics)

    grammar = build_grammar(raw_rules, start)
    issues = validate_grammar(grammar)
    if issues:
        # map rule indexes back to source lines where possible
        line_of = _source_lines(grammar, raw_rules, rule_lines)
        out = []
        for d in issues:
            line = line_of.get(d.rule_index, 1)
            out.append(ParseDiagnostic(SourceSpan(line, 1), d.message))
        raise GrammarValidationError(out)
    return grammar


def _source_lines(grammar: Grammar, raw_rules: list[Rule], rule_lines: list[int]) -> dict[Optional[int], int]:
    # all_rules is a reordering of raw_rules; match by identity of content order
    remaining = list(zip(raw_rules, rule_lines))
    mapping: dict[Optional[int], int] = {}
    for i, rule in enumerate(grammar.all_rules):
        for j, (raw, line) in enumerate(remaining):
            if raw.scope_closing == rule.scope_closing and len(raw.body) == len(rule.body) \
                    and raw.head.name == rule.head.name:
                mapping[i] = line
                del remaining[j]
                break
    return mapping


def load_grammar(path) -> Grammar:
    with open(path, encoding="utf-8") as fh:
        return parse_grammar(fh.read())


# ---------------------------------------------------------------------------
# Serialization


def _render_atom(a: Atom) -> str:
    if _BARE_ATOM_RE.match(a.text):
        return a.text
    if "'" in a.text or re.search(r"\s", a.text):
        raise ValueError(f"atom {a.text!r} is not representable in grammar text")
    return f"'{a.text}'"


def _render_token(token: str) -> str:
    if _IDENT_RE.match(token):
        return f"[{token}]"
    if "'" in token or re.search(r"\s", token):
        raise ValueError(f"token {token!r} is not representable in grammar text")
    return f"['{token}']"


def _var_namer():
    """Canonical per-rule variable names: $A .. $Z, then $V26, $V27, ..."""
    names: dict[int, str] = {}

    def name_for(var: Variable) -> str:
        if var.id not in names:
            n = len(names)
            names[var.id] = chr(ord("A") + n) if n < 26 else f"V{n}"
        return names[var.id]

    return name_for


def _render_category(cat: Category, name_for) -> str:
    if cat.kind is CategoryKind.TERMINAL:
        return _render_token(cat.token)
    if cat.kind is CategoryKind.SCOPE_OPENER:
        return "//"
    feats = ""
    if cat.features:
        parts = []
        for n, v in cat.features:
            rendered = f"${name_for(v)}" if isinstance(v, Variable) else _render_atom(v)
            parts.append(f"{n}:{rendered}")
        feats = f"({', '.join(parts)})"
    if cat.kind is CategoryKind.FWD_REF:
        return f">{feats}"
    if cat.kind is CategoryKind.BWD_REF:
        return f"<{feats}"
    return f"{cat.name}{feats}"


def serialize_grammar(g: Grammar) -> str:
    """Render a grammar as text that re-parses to a structurally equal
    grammar (up to variable renaming). One round trip reaches a fixpoint
    because variable names and terminal quoting are canonical."""
    lines = [f"start: {g.start}"]
    for rule in g.all_rules:
        name_for = _var_namer()
        head = _render_category(rule.head, name_for)
        arrow = "~>" if rule.scope_closing else "=>"
        body = " ".join(_render_category(c, name_for) for c in rule.body) if rule.body else "."
        lines.append(f"{head} {arrow} {body}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Structural comparison helper (used by tests and round-trip checks)


def canonicalize_grammar(g: Grammar) -> Grammar:
    """Renumber variables rule-locally in first-occurrence order so two
    grammars equal up to variable renaming compare equal."""

    def canon_rule(rule: Rule) -> Rule:
        mapping: dict[int, Variable] = {}

        def canon_cat(cat: Category) -> Category:
            if not cat.features:
                return cat
            entries = []
            for n, v in cat.features:
                if isinstance(v, Variable):
                    if v.id not in mapping:
                        mapping[v.id] = Variable(len(mapping))
                    v = mapping[v.id]
                entries.append((n, v))
            return Category(cat.kind, cat.name, cat.token, FeatureStructure(tuple(entries)))

        return Rule(canon_cat(rule.head), tuple(canon_cat(c) for c in rule.body), rule.scope_closing)

    return Grammar(
        rules=tuple(canon_rule(r) for r in g.rules),
        lexical_rules=tuple(canon_rule(r) for r in g.lexical_rules),
        start=g.start,
    )
