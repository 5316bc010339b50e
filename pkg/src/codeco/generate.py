"""Exhaustive language generation up to a token bound, ambiguity checking
by duplicate detection, and bounded subset checking between grammars.

Generation is driven by the chart parser's exact lookahead: the tree of
viable prefixes is walked token count by token count, so every emitted
sentence comes with its syntax trees and the stream is canonical
(ordered by length, then lexicographically by token sequence). This keeps
the machinery disjoint from the brute-force oracle, which enumerates by
recursive rule expansion instead; the two are compared in the test suite.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterator, Optional

from .core import Grammar
from .errors import BudgetExceededError, TokenRejectedError
from .parser import ParseState, SyntaxTree, extract_trees, feed_token, is_complete, new_session, next_tokens

DEFAULT_BUDGET = 10_000_000


@dataclass(frozen=True)
class GenerationReport:
    bound: int
    sentence_count: int  # distinct sentences
    duplicate_groups: tuple[tuple[tuple[str, ...], int], ...]  # (sentence, derivations >= 2)
    elapsed: float

    @property
    def ambiguous(self) -> bool:
        return bool(self.duplicate_groups)


@dataclass(frozen=True)
class SubsetReport:
    bound: int
    counterexamples: tuple[tuple[str, ...], ...]
    checked_count: int

    @property
    def is_subset(self) -> bool:
        return not self.counterexamples


class _Budget:
    def __init__(self, limit: int):
        self.left = limit

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise BudgetExceededError("generation expansion budget exhausted")


def generate(
    grammar: Grammar,
    start: Optional[str] = None,
    max_tokens: int = 8,
    expansion_budget: int = DEFAULT_BUDGET,
) -> Iterator[tuple[tuple[str, ...], SyntaxTree]]:
    """Emit every derivation whose yield has at most max_tokens tokens,
    exactly once each (ambiguous sentences appear once per derivation),
    in canonical order: shorter sentences first, ties broken
    lexicographically by token sequence."""
    if max_tokens < 0:
        raise ValueError("max_tokens must be >= 0")
    budget = _Budget(expansion_budget)
    layer: list[tuple[tuple[str, ...], ParseState]] = [((), new_session(grammar, start))]
    for _length in range(max_tokens + 1):
        next_layer: list[tuple[tuple[str, ...], ParseState]] = []
        for prefix, state in layer:
            if is_complete(state):
                for tree in extract_trees(state):
                    yield prefix, tree
            if len(prefix) == max_tokens:
                continue
            for token in sorted({opt.token for opt in next_tokens(state)}):
                budget.tick()
                try:
                    next_layer.append((prefix + (token,), feed_token(state, token)))
                except TokenRejectedError:  # pragma: no cover - lookahead is exact
                    continue
        layer = sorted(next_layer, key=lambda e: e[0])


def check_ambiguity(
    grammar: Grammar,
    start: Optional[str] = None,
    max_tokens: int = 8,
    expansion_budget: int = DEFAULT_BUDGET,
) -> GenerationReport:
    """Generate everything within the bound and report sentences with two
    or more derivations. An empty duplicate list proves unambiguity up to
    the bound; it says nothing beyond it."""
    t0 = time.monotonic()
    counts: dict[tuple[str, ...], int] = {}
    for sentence, _tree in generate(grammar, start, max_tokens, expansion_budget):
        counts[sentence] = counts.get(sentence, 0) + 1
    duplicates = tuple(
        (sentence, n) for sentence, n in sorted(counts.items()) if n >= 2
    )
    return GenerationReport(
        bound=max_tokens,
        sentence_count=len(counts),
        duplicate_groups=duplicates,
        elapsed=time.monotonic() - t0,
    )


def check_subset(
    grammar_a: Grammar,
    grammar_b: Grammar,
    start_a: Optional[str] = None,
    start_b: Optional[str] = None,
    max_tokens: int = 8,
    expansion_budget: int = DEFAULT_BUDGET,
) -> SubsetReport:
    """Bounded language inclusion: every sentence generated from grammar_a
    within the bound must parse to a complete sentence under grammar_b."""
    seen: set[tuple[str, ...]] = set()
    counterexamples: list[tuple[str, ...]] = []
    for sentence, _tree in generate(grammar_a, start_a, max_tokens, expansion_budget):
        if sentence in seen:
            continue
        seen.add(sentence)
        if not _parses(grammar_b, start_b, sentence):
            counterexamples.append(sentence)
    return SubsetReport(
        bound=max_tokens,
        counterexamples=tuple(sorted(counterexamples)),
        checked_count=len(seen),
    )


def _parses(grammar: Grammar, start: Optional[str], sentence: tuple[str, ...]) -> bool:
    state = new_session(grammar, start)
    try:
        for token in sentence:
            state = feed_token(state, token)
    except TokenRejectedError:
        return False
    return is_complete(state)
