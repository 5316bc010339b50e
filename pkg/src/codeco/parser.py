"""Incremental chart parser with scope tracking, deterministic backward
reference resolution, exact lookahead and syntax tree extraction.

The chart is Earley-style: one item set per token position, saturated by
prediction, completion and zero-width processing. Items carry, beyond the
classic (rule, dot, origin) triple, a binding environment and an
accessibility list, so two items merge only when those agree; merged items
keep one backpointer per derivation, which is how ambiguity is counted.

Zero-width categories are processed eagerly the moment the dot reaches
them: a forward reference appends an antecedent (its features snapshot
resolved at that moment), a scope opener appends a scope mark, and a
backward reference resolves against the most recent unifiable antecedent
or kills the item. When a scope-closing rule completes, the earliest scope
mark appended inside its span and everything after it are removed from the
accessibility list (suffix removal), which is what makes antecedents under
a closed scope unreachable afterwards.

Lookahead is trial-scan: candidate tokens are read off the chart frontier,
then each is validated by running scan plus closure on a scratch set; a
candidate survives only if the resulting set can still make progress.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Union

from .core import (
    EMPTY_ENV,
    BindingEnv,
    Category,
    CategoryKind,
    FeatureStructure,
    Grammar,
    Rule,
    Variable,
    fresh_rule_instance,
    preterminal,
    resolve,
    resolve_features,
    terminal,
    unify_categories,
    unify_features,
)
from .errors import ClosureBudgetError, DerivationCycleError, TokenRejectedError, UnknownStartError

__all__ = [
    "Antecedent",
    "ScopeMark",
    "TokenOption",
    "ParseState",
    "SyntaxTree",
    "TokenLeaf",
    "FwdRefLeaf",
    "BwdRefLeaf",
    "ScopeOpenerLeaf",
    "new_session",
    "feed_token",
    "next_tokens",
    "accessible_antecedents",
    "is_complete",
    "extract_trees",
    "derivation_count",
    "resolve_backward_ref",
]


# ---------------------------------------------------------------------------
# Accessibility list entries


@dataclass(frozen=True)
class Antecedent:
    """A stored potential antecedent: features snapshot taken when the
    forward reference was processed, never updated afterwards."""

    features: FeatureStructure
    position: int
    scope_depth: int


@dataclass(frozen=True)
class ScopeMark:
    """Marks an open scope; `opened_by` identifies the opening rule position
    structurally so marks from re-derivations compare equal."""

    position: int
    opened_by: tuple[int, int, int]  # (rule index, item origin, dot)


AccessEntry = Union[Antecedent, ScopeMark]
AccessList = tuple[AccessEntry, ...]


def _scope_depth(access: AccessList) -> int:
    return sum(1 for e in access if isinstance(e, ScopeMark))


# ---------------------------------------------------------------------------
# Backward reference resolution


def _resolve_bwd(
    ref: Category, access: AccessList, env: BindingEnv, fresh_ids: Iterator[int]
) -> Optional[tuple[Antecedent, BindingEnv]]:
    """Scan antecedents from most recent to oldest; return the first whose
    features unify with the reference's features.

    Unbound variables inside an antecedent snapshot are renamed fresh for
    every resolution attempt: they act as local wildcards and never
    accumulate constraints across references (the snapshot is frozen).
    Reference-side variables bind normally into the returned environment.
    """
    for entry in reversed(access):
        if not isinstance(entry, Antecedent):
            continue
        mapping: dict[int, Variable] = {}
        renamed = []
        for name, value in entry.features:
            if isinstance(value, Variable):
                if value.id not in mapping:
                    mapping[value.id] = Variable(next(fresh_ids), value.name)
                value = mapping[value.id]
            renamed.append((name, value))
        out = unify_features(ref.features, FeatureStructure(tuple(renamed)), env)
        if out is not None:
            return entry, out
    return None


def resolve_backward_ref(
    ref: Category, access: AccessList, env: BindingEnv = EMPTY_ENV
) -> Optional[tuple[Antecedent, BindingEnv]]:
    """Public form of backward-reference resolution; returns None when no
    accessible antecedent unifies (the owning chart item would die)."""
    if ref.kind is not CategoryKind.BWD_REF:
        raise ValueError("resolve_backward_ref expects a backward-reference category")
    top = 0
    for var_id, value in env.bindings:
        top = max(top, var_id + 1, value.id + 1 if isinstance(value, Variable) else 0)
    for entry in access:
        if isinstance(entry, Antecedent):
            for _, v in entry.features:
                if isinstance(v, Variable):
                    top = max(top, v.id + 1)
    for _, v in ref.features:
        if isinstance(v, Variable):
            top = max(top, v.id + 1)
    return _resolve_bwd(ref, access, env, itertools.count(top))


# ---------------------------------------------------------------------------
# Static feasibility analysis for pending backward references
#
# An item whose remaining body contains a backward reference that provably
# cannot resolve is dead on arrival: the reference needs an antecedent that
# neither the current accessibility list nor anything derivable from the
# intervening body elements can supply. The check is optimistic (variables
# act as wildcards, scope closings are ignored), so it only ever removes
# items with no completion whatsoever; exact resolution still happens when
# the dot reaches the reference.


_NAMED = (CategoryKind.NONTERMINAL, CategoryKind.PRETERMINAL)


@lru_cache(maxsize=64)
def _producible_templates(grammar: Grammar) -> dict[str, tuple[FeatureStructure, ...]]:
    """For every category name, the feature structures of all forward
    references any derivation of it could append (fixpoint over rules)."""
    templates: dict[str, set[FeatureStructure]] = {name: set() for name in grammar.rules_by_name}
    changed = True
    while changed:
        changed = False
        for name, rules in grammar.rules_by_name.items():
            bucket = templates[name]
            for _, rule in rules:
                for cat in rule.body:
                    if cat.kind is CategoryKind.FWD_REF:
                        produced: Iterable = (cat.features,)
                    elif cat.kind in _NAMED:
                        produced = templates.get(cat.name, ())
                    else:
                        continue
                    for fs in tuple(produced):
                        if fs not in bucket:
                            bucket.add(fs)
                            changed = True
    return {name: tuple(fss) for name, fss in templates.items()}


def _optimistic_compatible(ref_features: FeatureStructure, env: BindingEnv,
                           candidate: FeatureStructure) -> bool:
    """Could the reference ever unify with an instance of `candidate`?
    Only a definite atom-atom clash rules it out."""
    for name, value in ref_features:
        rv = env.resolve_value(value)
        if isinstance(rv, Variable):
            continue
        cv = candidate.get(name)
        if cv is not None and not isinstance(cv, Variable) and cv.text != rv.text:
            return False
    return True


def _pending_refs_feasible(rule: Rule, dot: int, env: BindingEnv, access: AccessList,
                           templates: dict[str, tuple[FeatureStructure, ...]]) -> bool:
    body = rule.body
    for j in range(dot, len(body)):
        ref = body[j]
        if ref.kind is not CategoryKind.BWD_REF:
            continue
        if any(
            isinstance(e, Antecedent) and _optimistic_compatible(ref.features, env, e.features)
            for e in access
        ):
            continue
        producible = []
        for mid in body[dot:j]:
            if mid.kind is CategoryKind.FWD_REF:
                producible.append(mid.features)
            elif mid.kind in _NAMED:
                producible.extend(templates.get(mid.name, ()))
        if not any(_optimistic_compatible(ref.features, env, fs) for fs in producible):
            return False
    return True


# ---------------------------------------------------------------------------
# Chart items


_ZW_KINDS = ("f", "o", "b")  # forward ref, scope opener, backward ref


class Item:
    """One chart entry: a dotted rule instance with its environment and
    accessibility list. `base_len` is the accessibility-list length at
    prediction time; everything beyond it was appended inside this item's
    own span (the cut point for scope closing)."""

    __slots__ = ("rule", "rule_key", "dot", "origin", "end", "env", "access", "base_len",
                 "closed_spans", "backpointers", "key")

    def __init__(self, rule: Rule, rule_key: int, dot: int, origin: int, end: int,
                 env: BindingEnv, access: AccessList, base_len: int,
                 closed_spans: tuple[tuple[int, int], ...] = ()):
        self.rule = rule
        self.rule_key = rule_key
        self.dot = dot
        self.origin = origin
        self.end = end
        self.env = env
        self.access = access
        self.base_len = base_len
        self.closed_spans = closed_spans
        self.backpointers: list[tuple] = []  # (kind, pred, payload)
        self.key = (rule_key, dot, origin, end, base_len, env.canonical, access)

    @property
    def complete(self) -> bool:
        return self.dot == len(self.rule.body)

    @property
    def next_category(self) -> Optional[Category]:
        return self.rule.body[self.dot] if self.dot < len(self.rule.body) else None

    def initial_access(self) -> AccessList:
        return self.access[: self.base_len]

    def __repr__(self):
        body = list(map(repr, self.rule.body))
        body.insert(self.dot, "·")
        return f"<{self.rule.head!r} -> {' '.join(body)} @{self.origin}>"


class _ItemSet:
    """Items ending at one token position, with lookup indexes."""

    __slots__ = ("index", "items", "order", "by_next_name", "by_next_token",
                 "completed", "completed_here", "predictions")

    def __init__(self, index: int):
        self.index = index
        self.items: dict[tuple, Item] = {}
        self.order: list[Item] = []
        self.by_next_name: dict[str, list[Item]] = {}
        self.by_next_token: dict[str, list[Item]] = {}
        self.completed: list[Item] = []
        self.completed_here: dict[str, list[Item]] = {}
        self.predictions: dict[tuple, Optional[Item]] = {}


class _Closure:
    """Worklist saturation of one item set (predict, complete, zero-width)."""

    def __init__(self, state: "ParseState", index: int, var_counter: int):
        self.state = state
        self.grammar = state.grammar
        self.set = _ItemSet(index)
        self.queue: list[Item] = []
        self.var_counter = var_counter
        self.budget = state.max_items_per_set
        self.templates = _producible_templates(state.grammar)

    def fresh_ids(self) -> "itertools.count":
        return _CountProxy(self)

    def add(self, item: Item, bp: Optional[tuple]) -> Item:
        existing = self.set.items.get(item.key)
        if existing is not None:
            # the same (parent, cause) pair can be offered twice when a
            # zero-width child and its parent each see the other during
            # saturation; one backpointer per derivation step
            if bp is not None and not any(
                old[0] == bp[0] and old[1] is bp[1] and old[2] is bp[2]
                for old in existing.backpointers
            ):
                existing.backpointers.append(bp)
            return existing
        if len(self.set.order) >= self.budget:
            raise ClosureBudgetError(
                f"more than {self.budget} chart items at position {self.set.index}"
            )
        if bp is not None:
            item.backpointers.append(bp)
        self.set.items[item.key] = item
        self.set.order.append(item)
        self.queue.append(item)
        if item.complete:
            self.set.completed.append(item)
            if item.origin == self.set.index:
                self.set.completed_here.setdefault(item.rule.head.name, []).append(item)
        else:
            nxt = item.next_category
            if nxt.kind is CategoryKind.TERMINAL:
                self.set.by_next_token.setdefault(nxt.token, []).append(item)
            elif nxt.kind in _NAMED:
                self.set.by_next_name.setdefault(nxt.name, []).append(item)
        return item

    def run(self):
        while self.queue:
            self.process(self.queue.pop())

    def predict(self, name: str, access: AccessList):
        for rule_key, rule in self.grammar.rules_for(name):
            pkey = (rule_key, access)
            if pkey in self.set.predictions:
                continue
            if not _pending_refs_feasible(rule, 0, EMPTY_ENV, access, self.templates):
                self.set.predictions[pkey] = None
                continue
            counter = self.fresh_ids()
            instance = fresh_rule_instance(rule, counter)
            item = Item(instance, rule_key, 0, self.set.index, self.set.index,
                        EMPTY_ENV, access, len(access))
            self.set.predictions[pkey] = item
            self.add(item, None)

    def advance(self, pred: Item, env: BindingEnv, access: AccessList, bp: tuple) -> Optional[Item]:
        dot = pred.dot + 1
        if not _pending_refs_feasible(pred.rule, dot, env, access, self.templates):
            return None
        closed: tuple[tuple[int, int], ...] = ()
        if dot == len(pred.rule.body) and pred.rule.scope_closing:
            cut = None
            for i in range(pred.base_len, len(access)):
                if isinstance(access[i], ScopeMark):
                    cut = i
                    break
            if cut is not None:
                closed = tuple(
                    (e.position, self.set.index) for e in access[cut:] if isinstance(e, ScopeMark)
                )
                access = access[:cut]
        item = Item(pred.rule, pred.rule_key, dot, pred.origin, self.set.index,
                    env, access, pred.base_len, closed)
        return self.add(item, bp)

    def try_advance_over_child(self, parent: Item, child: Item, resolved_head: Category):
        if parent.access != child.initial_access():
            return
        env = unify_categories(parent.next_category, resolved_head, parent.env)
        if env is None:
            return
        self.advance(parent, env, child.access, ("c", parent, child))

    def process(self, item: Item):
        if item.complete:
            resolved_head = resolve(item.rule.head, item.env)
            origin_set = (
                self.set if item.origin == self.set.index else self.state.sets[item.origin]
            )
            waiting = origin_set.by_next_name.get(item.rule.head.name, ())
            for parent in list(waiting):
                self.try_advance_over_child(parent, item, resolved_head)
            return
        nxt = item.next_category
        kind = nxt.kind
        if kind in _NAMED:
            self.predict(nxt.name, item.access)
            # a zero-width child of this category may already have completed here
            for child in list(self.set.completed_here.get(nxt.name, ())):
                self.try_advance_over_child(item, child, resolve(child.rule.head, child.env))
        elif kind is CategoryKind.FWD_REF:
            ant = Antecedent(
                resolve_features(nxt.features, item.env),
                self.set.index,
                _scope_depth(item.access),
            )
            self.advance(item, item.env, item.access + (ant,), ("f", item, ant))
        elif kind is CategoryKind.SCOPE_OPENER:
            mark = ScopeMark(self.set.index, (item.rule_key, item.origin, item.dot))
            self.advance(item, item.env, item.access + (mark,), ("o", item, mark))
        elif kind is CategoryKind.BWD_REF:
            got = _resolve_bwd(nxt, item.access, item.env, self.fresh_ids())
            if got is not None:
                ant, env = got
                self.advance(item, env, item.access, ("b", item, ant))
            # no unifiable antecedent: the item dies (stays inert in the set)


class _CountProxy:
    """Iterator handing out fresh variable ids from the closure's counter."""

    __slots__ = ("closure",)

    def __init__(self, closure: _Closure):
        self.closure = closure

    def __iter__(self):
        return self

    def __next__(self) -> int:
        v = self.closure.var_counter
        self.closure.var_counter = v + 1
        return v


# ---------------------------------------------------------------------------
# Parse state and session operations


@dataclass(frozen=True)
class TokenOption:
    """One possible continuation token, with the category it satisfies and
    resolved features for UI grouping."""

    token: str
    category: Category
    features: FeatureStructure = FeatureStructure()


def _option_sort_key(opt: TokenOption):
    return (opt.token, opt.category.kind.value, opt.category.name or "", _features_key(opt.features))


def _features_key(fs: FeatureStructure):
    return tuple(
        (n, ("a", v.text) if not isinstance(v, Variable) else ("v", v.id)) for n, v in fs
    )


class ParseState:
    """Immutable-by-convention parse state; feeding a token returns a new
    state sharing all earlier item sets."""

    __slots__ = ("grammar", "start_name", "tokens", "sets", "next_var_id",
                 "max_items_per_set", "_trials", "_options", "_complete")

    def __init__(self, grammar: Grammar, start_name: str, tokens: tuple[str, ...],
                 sets: tuple[_ItemSet, ...], next_var_id: int, max_items_per_set: int):
        self.grammar = grammar
        self.start_name = start_name
        self.tokens = tokens
        self.sets = sets
        self.next_var_id = next_var_id
        self.max_items_per_set = max_items_per_set
        self._trials: dict[str, tuple[_ItemSet, int]] = {}
        self._options: Optional[tuple[TokenOption, ...]] = None
        self._complete: Optional[bool] = None

    # -- internals ----------------------------------------------------------

    def _last(self) -> _ItemSet:
        return self.sets[-1]

    def _trial_scan(self, token: str) -> tuple[_ItemSet, int]:
        """Scan + closure on a scratch set; does not mutate this state."""
        if token in self._trials:
            return self._trials[token]
        closure = _Closure(self, len(self.sets), self.next_var_id)
        for parent in self._last().by_next_token.get(token, ()):
            closure.advance(parent, parent.env, parent.access, ("s", parent, token))
        closure.run()
        result = (closure.set, closure.var_counter)
        self._trials[token] = result
        return result

    @staticmethod
    def _set_alive(item_set: _ItemSet) -> bool:
        """A set can make progress iff some item can scan a next token."""
        return bool(item_set.by_next_token)

    @staticmethod
    def _set_complete(item_set: _ItemSet, start_name: str) -> bool:
        return any(
            it.origin == 0 and it.rule.head.name == start_name for it in item_set.completed
        )

    def _alive_items(self) -> list[Item]:
        """Items of the last set that can still lead to a scan, computed by
        propagating aliveness from scannable items through zero-width
        backpointers and prediction links."""
        s = self._last()
        alive: set[int] = set()
        worklist: list[Item] = []
        for items in s.by_next_token.values():
            for it in items:
                if id(it) not in alive:
                    alive.add(id(it))
                    worklist.append(it)
        # reverse edges: zero-width successor -> predecessor
        preds_of: dict[int, list[Item]] = {}
        for it in s.order:
            for kind, pred, _payload in it.backpointers:
                if kind in _ZW_KINDS:
                    preds_of.setdefault(id(it), []).append(pred)
        while worklist:
            it = worklist.pop()
            for pred in preds_of.get(id(it), ()):
                if id(pred) not in alive:
                    alive.add(id(pred))
                    worklist.append(pred)
            if it.dot == 0 and it.origin == s.index:
                # a live prediction keeps its predictors alive
                for parent in s.by_next_name.get(it.rule.head.name, ()):
                    if id(parent) not in alive and parent.access == it.access:
                        alive.add(id(parent))
                        worklist.append(parent)
        return [it for it in s.order if id(it) in alive]


def new_session(grammar: Grammar, start: Optional[str] = None, *,
                max_items_per_set: int = 100_000) -> ParseState:
    """Fresh parse state at position 0 with the prediction closure (and all
    zero-width processing reachable before any token) already computed."""
    start_name = start if start is not None else grammar.start
    if not grammar.rules_for(start_name):
        raise UnknownStartError(f"start category {start_name!r} heads no rule")
    state = ParseState(grammar, start_name, (), (), 0, max_items_per_set)
    closure = _Closure(state, 0, 0)
    closure.predict(start_name, ())
    closure.run()
    return ParseState(grammar, start_name, (), (closure.set,), closure.var_counter,
                      max_items_per_set)


def feed_token(state: ParseState, token: str) -> ParseState:
    """Extend the chart by one token. Raises TokenRejectedError (carrying
    the valid options) when the token is not a possible continuation; the
    input state is never mutated."""
    trial_set, var_counter = state._trial_scan(token)
    if not ParseState._set_alive(trial_set) and not ParseState._set_complete(trial_set, state.start_name):
        raise TokenRejectedError(token, next_tokens(state))
    return ParseState(
        state.grammar,
        state.start_name,
        state.tokens + (token,),
        state.sets + (trial_set,),
        var_counter,
        state.max_items_per_set,
    )


def next_tokens(state: ParseState) -> tuple[TokenOption, ...]:
    """Exact lookahead: all token options whose token, when fed, leaves the
    chart able to make progress (or completes the sentence)."""
    if state._options is not None:
        return state._options
    lexical_offset = len(state.grammar.rules)
    candidates: dict[str, list[TokenOption]] = {}
    for token, items in state._last().by_next_token.items():
        opts = candidates.setdefault(token, [])
        for item in items:
            if item.rule_key >= lexical_offset:
                head = item.rule.head
                opt = TokenOption(token, preterminal(head.name), resolve_features(head.features, item.env))
            else:
                opt = TokenOption(token, terminal(token))
            if opt not in opts:
                opts.append(opt)
    out: list[TokenOption] = []
    for token in sorted(candidates):
        trial_set, _ = state._trial_scan(token)
        if ParseState._set_alive(trial_set) or ParseState._set_complete(trial_set, state.start_name):
            out.extend(candidates[token])
    result = tuple(sorted(set(out), key=_option_sort_key))
    state._options = result
    return result


def accessible_antecedents(state: ParseState) -> tuple[Antecedent, ...]:
    """Antecedents reachable by some live item of the current frontier,
    merged across item families and ordered by position."""
    merged: set[Antecedent] = set()
    for item in state._alive_items():
        for entry in item.access:
            if isinstance(entry, Antecedent):
                merged.add(entry)
    return tuple(sorted(merged, key=lambda a: (a.position, _features_key(a.features), a.scope_depth)))


def is_complete(state: ParseState) -> bool:
    """True iff some completed start-category item spans the whole input."""
    if state._complete is None:
        state._complete = ParseState._set_complete(state._last(), state.start_name)
    return state._complete


# ---------------------------------------------------------------------------
# Syntax trees


@dataclass(frozen=True)
class TokenLeaf:
    token: str


@dataclass(frozen=True)
class FwdRefLeaf:
    antecedent: Antecedent


@dataclass(frozen=True)
class BwdRefLeaf:
    features: FeatureStructure
    antecedent: Antecedent


@dataclass(frozen=True)
class ScopeOpenerLeaf:
    position: int


TreeChild = Union["SyntaxTree", TokenLeaf, FwdRefLeaf, BwdRefLeaf, ScopeOpenerLeaf]


@dataclass(frozen=True)
class SyntaxTree:
    """A derivation tree. `scope_spans` lists, for scope-closing nodes (and
    for the root, which implicitly closes whatever is still open), the token
    interval each closed scope covered. Backward-reference leaves link to
    their antecedent's position."""

    category: Category
    children: tuple[TreeChild, ...]
    scope_spans: tuple[tuple[int, int], ...] = ()

    def leaves(self) -> tuple[str, ...]:
        out: list[str] = []
        for child in self.children:
            if isinstance(child, TokenLeaf):
                out.append(child.token)
            elif isinstance(child, SyntaxTree):
                out.extend(child.leaves())
        return tuple(out)

    def reference_links(self) -> tuple[tuple[FeatureStructure, int], ...]:
        """(backward-reference features, antecedent position) pairs."""
        out: list[tuple[FeatureStructure, int]] = []
        for child in self.children:
            if isinstance(child, BwdRefLeaf):
                out.append((child.features, child.antecedent.position))
            elif isinstance(child, SyntaxTree):
                out.extend(child.reference_links())
        return tuple(out)


def _merge_envs(inherited: BindingEnv, own: BindingEnv) -> BindingEnv:
    if not inherited.bindings:
        return own
    if not own.bindings:
        return inherited
    return BindingEnv(inherited.bindings + own.bindings)


def _root_items(state: ParseState) -> list[Item]:
    return [
        it
        for it in state._last().completed
        if it.origin == 0 and it.rule.head.name == state.start_name
    ]


def extract_trees(state: ParseState) -> tuple[SyntaxTree, ...]:
    """One syntax tree per distinct derivation of the full input; empty when
    the input is not a complete sentence."""
    n = len(state.tokens)
    trees: list[SyntaxTree] = []
    for root in _root_items(state):
        for tree in _build_trees(root, EMPTY_ENV, frozenset()):
            leftover = tuple(
                (e.position, n) for e in root.access if isinstance(e, ScopeMark)
            )
            if leftover:
                tree = SyntaxTree(tree.category, tree.children, tree.scope_spans + leftover)
            trees.append(tree)
    return tuple(trees)


def _build_trees(item: Item, inherited: BindingEnv, in_progress: frozenset) -> list[SyntaxTree]:
    if item.key in in_progress:
        raise DerivationCycleError("derivation derives itself; infinitely many trees")
    env = _merge_envs(inherited, item.env)
    label = resolve(item.rule.head, env)
    seqs = _child_sequences(item, env, in_progress | {item.key})
    return [SyntaxTree(label, tuple(seq), item.closed_spans) for seq in seqs]


def _child_sequences(item: Item, env: BindingEnv, in_progress: frozenset) -> list[list[TreeChild]]:
    if item.dot == 0:
        return [[]]
    out: list[list[TreeChild]] = []
    for kind, pred, payload in item.backpointers:
        prefixes = _child_sequences(pred, env, in_progress)
        tails: list[TreeChild]
        if kind == "s":
            tails = [TokenLeaf(payload)]
        elif kind == "f":
            tails = [FwdRefLeaf(payload)]
        elif kind == "o":
            tails = [ScopeOpenerLeaf(payload.position)]
        elif kind == "b":
            ref_cat = item.rule.body[item.dot - 1]
            tails = [BwdRefLeaf(resolve_features(ref_cat.features, env), payload)]
        else:  # "c"
            tails = _build_trees(payload, env, in_progress)
        for prefix in prefixes:
            for tail in tails:
                out.append(prefix + [tail])
    return out


def derivation_count(state: ParseState) -> int:
    """Number of distinct derivations of the full input (0 when incomplete).
    Cheaper than building every tree."""
    memo: dict[tuple, int] = {}

    def item_count(item: Item, stack: frozenset) -> int:
        if item.key in stack:
            raise DerivationCycleError("derivation derives itself; infinitely many trees")
        if item.key in memo:
            return memo[item.key]
        total = _chain_count(item, stack | {item.key})
        memo[item.key] = total
        return total

    def _chain_count(item: Item, stack: frozenset) -> int:
        if item.dot == 0:
            return 1
        total = 0
        for kind, pred, payload in item.backpointers:
            factor = item_count(payload, stack) if kind == "c" else 1
            total += _chain_count(pred, stack) * factor
        return total

    return sum(item_count(root, frozenset()) for root in _root_items(state))
