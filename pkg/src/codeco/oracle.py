"""Brute-force recognizer and enumerator used for differential testing.

Deliberately naive: derivations are expanded top-down over an explicit
goal agenda, with no chart and no sharing. A linear antecedent list is
maintained while walking the yield left to right; finishing a
scope-closing node drops every element introduced inside its span, from
the earliest scope mark on.

The only concession to termination is a minimum-yield table (the fewest
tokens each category can possibly consume, a small fixpoint): a branch is
pruned as soon as the tokens already emitted plus the minimum for the
remaining goals exceed the bound. That makes left-recursive rules finite
to explore. Grammars that can nest rules unboundedly without consuming
anything (unit or epsilon cycles) still hit the depth cap, and then the
oracle raises rather than return a possibly truncated answer. Slow is
fine; the point of this module is to be simple enough to audit by eye,
because it is the baseline the real parser is tested against.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Union

from .core import (
    EMPTY_ENV,
    BindingEnv,
    Category,
    CategoryKind,
    FeatureStructure,
    Grammar,
    Variable,
    fresh_rule_instance,
    nonterminal,
    resolve_features,
    unify_categories,
    unify_features,
)
from .errors import BudgetExceededError, OracleDepthError


@dataclass(frozen=True)
class OracleConfig:
    max_tokens: int = 8
    max_depth: int = 64
    expansion_budget: int = 2_000_000


@dataclass(frozen=True)
class _Ant:
    features: FeatureStructure
    position: int


@dataclass(frozen=True)
class _Mark:
    position: int


@dataclass(frozen=True)
class _Walk:
    """State threaded through the left-to-right derivation walk."""

    tokens: tuple[str, ...]
    access: tuple
    env: BindingEnv


@dataclass(frozen=True)
class _Finish:
    """Agenda marker: a rule's body is done, unify its head with the goal
    and close scopes if the rule was scope-closing."""

    goal: Category
    head: Category
    base: int  # antecedent-list length when the rule was entered
    scope_closing: bool


_Goal = Union[Category, _Finish]


class _Budget:
    def __init__(self, limit: int):
        self.left = limit

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise BudgetExceededError("oracle expansion budget exhausted")


_NAMED = (CategoryKind.NONTERMINAL, CategoryKind.PRETERMINAL)


@lru_cache(maxsize=64)
def _min_yields(grammar: Grammar) -> dict[str, float]:
    """Fewest tokens each category name must consume (inf if it can never
    finish). Standard fixpoint."""
    mins: dict[str, float] = {name: float("inf") for name in grammar.rules_by_name}

    def element_min(cat: Category) -> float:
        if cat.kind is CategoryKind.TERMINAL:
            return 1.0
        if cat.kind in _NAMED:
            return mins.get(cat.name, float("inf"))
        return 0.0

    changed = True
    while changed:
        changed = False
        for name, rules in grammar.rules_by_name.items():
            for _, rule in rules:
                total = sum(element_min(c) for c in rule.body)
                if total < mins[name]:
                    mins[name] = total
                    changed = True
    return mins


def _agenda_min(agenda: tuple[_Goal, ...], mins: dict[str, float]) -> float:
    total = 0.0
    for goal in agenda:
        if isinstance(goal, _Finish):
            continue
        if goal.kind is CategoryKind.TERMINAL:
            total += 1.0
        elif goal.kind in _NAMED:
            total += mins.get(goal.name, float("inf"))
    return total


def _rename_fresh(fs: FeatureStructure, ids: Iterator[int]) -> FeatureStructure:
    mapping: dict[int, Variable] = {}
    entries = []
    for name, value in fs:
        if isinstance(value, Variable):
            if value.id not in mapping:
                mapping[value.id] = Variable(next(ids), value.name)
            value = mapping[value.id]
        entries.append((name, value))
    return FeatureStructure(tuple(entries))


def _expand(
    agenda: tuple[_Goal, ...],
    walk: _Walk,
    depth: int,
    grammar: Grammar,
    cfg: OracleConfig,
    budget: _Budget,
    ids: Iterator[int],
    mins: dict[str, float],
) -> Iterator[_Walk]:
    budget.tick()
    if not agenda:
        yield walk
        return
    goal, rest = agenda[0], agenda[1:]

    if isinstance(goal, _Finish):
        env = unify_categories(goal.goal, goal.head, walk.env)
        if env is None:
            return
        access = walk.access
        if goal.scope_closing:
            for i in range(goal.base, len(access)):
                if isinstance(access[i], _Mark):
                    access = access[:i]
                    break
        yield from _expand(rest, _Walk(walk.tokens, access, env), depth - 1,
                           grammar, cfg, budget, ids, mins)
        return

    kind = goal.kind
    if kind is CategoryKind.TERMINAL:
        if len(walk.tokens) >= cfg.max_tokens:
            return
        yield from _expand(rest, _Walk(walk.tokens + (goal.token,), walk.access, walk.env),
                           depth, grammar, cfg, budget, ids, mins)
    elif kind is CategoryKind.FWD_REF:
        ant = _Ant(resolve_features(goal.features, walk.env), len(walk.tokens))
        yield from _expand(rest, _Walk(walk.tokens, walk.access + (ant,), walk.env),
                           depth, grammar, cfg, budget, ids, mins)
    elif kind is CategoryKind.SCOPE_OPENER:
        mark = _Mark(len(walk.tokens))
        yield from _expand(rest, _Walk(walk.tokens, walk.access + (mark,), walk.env),
                           depth, grammar, cfg, budget, ids, mins)
    elif kind is CategoryKind.BWD_REF:
        # most recent unifiable antecedent wins; snapshot variables are
        # local wildcards, renamed fresh for every attempt
        for entry in reversed(walk.access):
            if isinstance(entry, _Ant):
                env = unify_features(goal.features, _rename_fresh(entry.features, ids), walk.env)
                if env is not None:
                    yield from _expand(rest, _Walk(walk.tokens, walk.access, env),
                                       depth, grammar, cfg, budget, ids, mins)
                    return
        return
    else:  # nonterminal or preterminal: try every rule of that name
        if depth >= cfg.max_depth:
            raise OracleDepthError(f"derivation deeper than {cfg.max_depth}")
        for _, rule in grammar.rules_for(goal.name):
            instance = fresh_rule_instance(rule, ids)
            finish = _Finish(goal, instance.head, len(walk.access), rule.scope_closing)
            agenda2 = instance.body + (finish,) + rest
            if len(walk.tokens) + _agenda_min(agenda2, mins) > cfg.max_tokens:
                continue
            yield from _expand(agenda2, walk, depth + 1, grammar, cfg, budget, ids, mins)


def enumerate_naive(
    grammar: Grammar, start: Optional[str] = None, cfg: OracleConfig = OracleConfig()
) -> tuple[tuple[str, ...], ...]:
    """Every derivation whose yield has at most cfg.max_tokens tokens, as a
    tuple of sentences with one entry per derivation (multiplicity counts)."""
    goal = nonterminal(start if start is not None else grammar.start)
    out = []
    for done in _expand((goal,), _Walk((), (), EMPTY_ENV), 0, grammar, cfg,
                        _Budget(cfg.expansion_budget), itertools.count(), _min_yields(grammar)):
        out.append(done.tokens)
    return tuple(out)


@lru_cache(maxsize=64)
def _sentence_multiset(grammar: Grammar, start: Optional[str], cfg: OracleConfig):
    counts: dict[tuple[str, ...], int] = {}
    for sentence in enumerate_naive(grammar, start, cfg):
        counts[sentence] = counts.get(sentence, 0) + 1
    return counts


def recognize_naive(
    grammar: Grammar, tokens, start: Optional[str] = None, cfg: Optional[OracleConfig] = None
) -> int:
    """Number of distinct derivations yielding exactly `tokens`."""
    tokens = tuple(tokens)
    if cfg is None:
        cfg = OracleConfig(max_tokens=len(tokens))
    return _sentence_multiset(grammar, start, cfg).get(tokens, 0)


def continuations_naive(
    grammar: Grammar, prefix, cfg: OracleConfig = OracleConfig(), start: Optional[str] = None
) -> frozenset[str]:
    """Tokens t such that some full sentence within cfg.max_tokens extends
    prefix + [t]."""
    prefix = tuple(prefix)
    out = set()
    for sentence in _sentence_multiset(grammar, start, cfg):
        if len(sentence) > len(prefix) and sentence[: len(prefix)] == prefix:
            out.add(sentence[len(prefix)])
    return frozenset(out)
