"""Domain types for grammars, categories and flat feature structures,
plus the unification engine everything else builds on.

All types are immutable after construction and safe to share across
threads; the operations are pure functions.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Optional, Union


# ---------------------------------------------------------------------------
# Feature values and structures


@dataclass(frozen=True)
class Atom:
    """A constant feature value, compared by exact (case-sensitive) text."""

    text: str

    def __repr__(self):
        return f"Atom({self.text!r})"


@dataclass(frozen=True)
class Variable:
    """A logic variable, scoped to one rule instance.

    Identity is the numeric id; `name` is a display hint only and is
    deliberately excluded from equality so renamed instances still
    compare by id alone.
    """

    id: int
    name: Optional[str] = field(default=None, compare=False)

    def __repr__(self):
        return f"${self.name or self.id}#{self.id}"


FeatureValue = Union[Atom, Variable]


@dataclass(frozen=True)
class FeatureStructure:
    """A flat mapping from feature names to atoms or variables.

    Entries keep their construction order (this is what the notation
    serializer emits), but equality of grammars is order-sensitive only
    because entry tuples are; unification treats entries as a mapping.
    """

    entries: tuple[tuple[str, FeatureValue], ...] = ()

    @staticmethod
    def of(pairs: Union[Mapping[str, FeatureValue], Iterable[tuple[str, FeatureValue]]] = ()) -> "FeatureStructure":
        items = tuple(pairs.items()) if isinstance(pairs, Mapping) else tuple(pairs)
        names = [n for n, _ in items]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate feature name in {names}")
        return FeatureStructure(items)

    def get(self, name: str) -> Optional[FeatureValue]:
        for n, v in self.entries:
            if n == name:
                return v
        return None

    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.entries)

    def __bool__(self):
        return bool(self.entries)

    def __iter__(self) -> Iterator[tuple[str, FeatureValue]]:
        return iter(self.entries)


EMPTY_FEATURES = FeatureStructure()


# ---------------------------------------------------------------------------
# Categories, rules, grammars


class CategoryKind(enum.Enum):
    NONTERMINAL = "nonterminal"
    PRETERMINAL = "preterminal"
    TERMINAL = "terminal"
    FWD_REF = "fwd_ref"
    BWD_REF = "bwd_ref"
    SCOPE_OPENER = "scope_opener"


@dataclass(frozen=True)
class Category:
    """One element of a rule: a named category, a literal token, a
    reference marker, or a scope opener.

    Terminals carry exactly one token and no features; scope openers
    carry neither name nor features; references carry features only.
    """

    kind: CategoryKind
    name: Optional[str] = None
    token: Optional[str] = None
    features: FeatureStructure = EMPTY_FEATURES

    def is_special(self) -> bool:
        """True for the zero-width kinds and terminals (non-predictable)."""
        return self.kind not in (CategoryKind.NONTERMINAL, CategoryKind.PRETERMINAL)

    def is_zero_width(self) -> bool:
        return self.kind in (CategoryKind.FWD_REF, CategoryKind.BWD_REF, CategoryKind.SCOPE_OPENER)

    def __repr__(self):
        if self.kind is CategoryKind.TERMINAL:
            return f"[{self.token}]"
        if self.kind is CategoryKind.SCOPE_OPENER:
            return "//"
        feats = ", ".join(f"{n}:{v}" for n, v in self.features) if self.features else ""
        feats = f"({feats})" if feats else ""
        if self.kind is CategoryKind.FWD_REF:
            return f">{feats}"
        if self.kind is CategoryKind.BWD_REF:
            return f"<{feats}"
        return f"{self.name}{feats}"


def nonterminal(name: str, features: FeatureStructure = EMPTY_FEATURES) -> Category:
    return Category(CategoryKind.NONTERMINAL, name=name, features=features)


def preterminal(name: str, features: FeatureStructure = EMPTY_FEATURES) -> Category:
    return Category(CategoryKind.PRETERMINAL, name=name, features=features)


def terminal(token: str) -> Category:
    return Category(CategoryKind.TERMINAL, token=token)


def fwd_ref(features: FeatureStructure = EMPTY_FEATURES) -> Category:
    return Category(CategoryKind.FWD_REF, features=features)


def bwd_ref(features: FeatureStructure = EMPTY_FEATURES) -> Category:
    return Category(CategoryKind.BWD_REF, features=features)


def scope_opener() -> Category:
    return Category(CategoryKind.SCOPE_OPENER)


@dataclass(frozen=True)
class Rule:
    """A production with an optional scope-closing marker.

    A scope-closing rule closes, upon its completion, every scope opened
    anywhere inside its own subtree. Variables are rule-local: one id in
    head and body denotes one shared value.
    """

    head: Category
    body: tuple[Category, ...] = ()
    scope_closing: bool = False

    def is_lexical(self) -> bool:
        return bool(self.body) and all(c.kind is CategoryKind.TERMINAL for c in self.body)

    def __repr__(self):
        arrow = "~>" if self.scope_closing else "=>"
        body = " ".join(map(repr, self.body)) if self.body else "."
        return f"{self.head!r} {arrow} {body}"


@dataclass(frozen=True)
class Grammar:
    """An immutable collection of rules with a designated start category.

    `lexical_rules` hold the rules whose bodies are exclusively terminals
    (the lexicon); `rules` hold everything else.
    """

    rules: tuple[Rule, ...]
    lexical_rules: tuple[Rule, ...]
    start: str

    @cached_property
    def all_rules(self) -> tuple[Rule, ...]:
        return self.rules + self.lexical_rules

    @cached_property
    def rules_by_name(self) -> dict[str, tuple[tuple[int, Rule], ...]]:
        """Head name -> ((stable rule index, rule), ...) over all rules."""
        index: dict[str, list[tuple[int, Rule]]] = {}
        for i, rule in enumerate(self.all_rules):
            index.setdefault(rule.head.name, []).append((i, rule))
        return {name: tuple(rs) for name, rs in index.items()}

    @cached_property
    def lexicon(self) -> tuple[str, ...]:
        """All distinct terminal tokens, sorted."""
        tokens = set()
        for rule in self.all_rules:
            for cat in rule.body:
                if cat.kind is CategoryKind.TERMINAL:
                    tokens.add(cat.token)
        return tuple(sorted(tokens))

    def rules_for(self, name: str) -> tuple[tuple[int, Rule], ...]:
        return self.rules_by_name.get(name, ())


# ---------------------------------------------------------------------------
# Binding environments and unification


@dataclass(frozen=True)
class BindingEnv:
    """A substitution: variable id -> feature value, acyclic by construction.

    Extension returns a new environment; failed unifications leave the
    input untouched, which lets the chart parser share environments
    across items.
    """

    bindings: tuple[tuple[int, FeatureValue], ...] = ()

    @cached_property
    def _map(self) -> dict[int, FeatureValue]:
        return dict(self.bindings)

    def lookup(self, var_id: int) -> Optional[FeatureValue]:
        return self._map.get(var_id)

    def resolve_value(self, value: FeatureValue) -> FeatureValue:
        """Follow binding chains to the terminal atom or unbound variable."""
        seen = 0
        while isinstance(value, Variable):
            nxt = self._map.get(value.id)
            if nxt is None:
                return value
            value = nxt
            seen += 1
            if seen > len(self.bindings):  # cycle guard; unreachable via bind()
                raise RuntimeError("cyclic binding environment")
        return value

    def bind(self, var: Variable, value: FeatureValue) -> "BindingEnv":
        """Extend with var -> value. `var` must be unbound (a chain root)."""
        return BindingEnv(self.bindings + ((var.id, value),))

    @cached_property
    def canonical(self) -> tuple[tuple[int, tuple], ...]:
        """Chain-insensitive fingerprint: every bound id mapped to its
        fully resolved value."""
        out = []
        for var_id, _ in self.bindings:
            v = self.resolve_value(Variable(var_id))
            out.append((var_id, ("a", v.text) if isinstance(v, Atom) else ("v", v.id)))
        return tuple(sorted(set(out)))


EMPTY_ENV = BindingEnv()


def _unify_values(a: FeatureValue, b: FeatureValue, env: BindingEnv) -> Optional[BindingEnv]:
    ra = env.resolve_value(a)
    rb = env.resolve_value(b)
    if isinstance(ra, Atom) and isinstance(rb, Atom):
        return env if ra.text == rb.text else None
    if isinstance(ra, Variable):
        if isinstance(rb, Variable) and rb.id == ra.id:
            return env
        return env.bind(ra, rb)
    # ra is an atom, rb must be a variable
    return env.bind(rb, ra)


def unify_features(a: FeatureStructure, b: FeatureStructure, env: BindingEnv = EMPTY_ENV) -> Optional[BindingEnv]:
    """Unify two flat feature structures under an environment.

    Features present on only one side impose no constraint. Returns the
    extended environment, or None when two atoms clash.
    """
    b_map = dict(b.entries)
    for name, va in a.entries:
        if name in b_map:
            env = _unify_values(va, b_map[name], env)
            if env is None:
                return None
    return env


def unify_categories(a: Category, b: Category, env: BindingEnv = EMPTY_ENV) -> Optional[BindingEnv]:
    """Unify two categories: compatible kinds, equal names/tokens where
    applicable, and unifiable features."""
    named = (CategoryKind.NONTERMINAL, CategoryKind.PRETERMINAL)
    if a.kind in named and b.kind in named:
        if a.name != b.name:
            return None
        return unify_features(a.features, b.features, env)
    if {a.kind, b.kind} == {CategoryKind.FWD_REF, CategoryKind.BWD_REF}:
        return unify_features(a.features, b.features, env)
    if a.kind is CategoryKind.TERMINAL and b.kind is CategoryKind.TERMINAL:
        return env if a.token == b.token else None
    if a.kind is CategoryKind.SCOPE_OPENER and b.kind is CategoryKind.SCOPE_OPENER:
        return env
    return None


def resolve_features(fs: FeatureStructure, env: BindingEnv) -> FeatureStructure:
    return FeatureStructure(tuple((n, env.resolve_value(v)) for n, v in fs.entries))


def resolve(cat: Category, env: BindingEnv) -> Category:
    """Replace every variable reachable through env by its terminal
    binding; unbound variables remain."""
    if not cat.features:
        return cat
    return replace(cat, features=resolve_features(cat.features, env))


# ---------------------------------------------------------------------------
# Rule instantiation


InstanceCounter = Iterator[int]


def new_instance_counter(start: int = 0) -> InstanceCounter:
    return itertools.count(start)


def _rename_value(v: FeatureValue, mapping: dict[int, Variable], counter: InstanceCounter) -> FeatureValue:
    if isinstance(v, Variable):
        if v.id not in mapping:
            mapping[v.id] = Variable(next(counter), v.name)
        return mapping[v.id]
    return v


def _rename_category(cat: Category, mapping: dict[int, Variable], counter: InstanceCounter) -> Category:
    if not cat.features:
        return cat
    entries = tuple((n, _rename_value(v, mapping, counter)) for n, v in cat.features.entries)
    return replace(cat, features=FeatureStructure(entries))


def fresh_rule_instance(rule: Rule, counter: InstanceCounter) -> Rule:
    """Copy of `rule` with all variable ids renamed injectively to ids the
    counter has never produced before; sharing within the rule preserved."""
    mapping: dict[int, Variable] = {}
    head = _rename_category(rule.head, mapping, counter)
    body = tuple(_rename_category(c, mapping, counter) for c in rule.body)
    return Rule(head, body, rule.scope_closing)


def rule_variables(rule: Rule) -> tuple[Variable, ...]:
    """All distinct variables of a rule, in first-occurrence order."""
    seen: dict[int, Variable] = {}
    for cat in (rule.head, *rule.body):
        for _, v in cat.features:
            if isinstance(v, Variable) and v.id not in seen:
                seen[v.id] = v
    return tuple(seen.values())


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Diagnostic:
    """One invariant violation; rule_index is None for grammar-level issues."""

    rule_index: Optional[int]
    message: str

    def __str__(self):
        where = "grammar" if self.rule_index is None else f"rule {self.rule_index}"
        return f"{where}: {self.message}"


_HEAD_KINDS = (CategoryKind.NONTERMINAL, CategoryKind.PRETERMINAL)


def validate_grammar(g: Grammar) -> tuple[Diagnostic, ...]:
    """Check the structural invariants; one diagnostic per violation.

    Returns an empty tuple iff the grammar is well-formed.
    """
    out: list[Diagnostic] = []
    heads = {r.head.name for r in g.all_rules if r.head.name}
    if g.start not in heads:
        out.append(Diagnostic(None, f"start category {g.start!r} heads no rule"))

    preterminal_names = {r.head.name for r in g.lexical_rules}

    def check_features(i: int, cat: Category, where: str):
        names = cat.features.names()
        for dup in sorted({n for n in names if names.count(n) > 1}):
            out.append(Diagnostic(i, f"feature name {dup!r} duplicated in {where}"))

    for i, rule in enumerate(g.all_rules):
        is_lexical = i >= len(g.rules)
        if rule.head.kind not in _HEAD_KINDS:
            out.append(Diagnostic(i, f"special category {rule.head!r} in head position"))
            continue
        check_features(i, rule.head, "head")
        for cat in rule.body:
            check_features(i, cat, f"body element {cat!r}")
        if is_lexical and not rule.is_lexical():
            out.append(Diagnostic(i, "rule in lexicon has a non-terminal body element"))
        if not is_lexical and rule.head.name in preterminal_names:
            out.append(Diagnostic(i, f"preterminal {rule.head.name!r} with non-lexical rule"))
        if rule.head.kind is CategoryKind.TERMINAL:  # unreachable, head kinds checked
            out.append(Diagnostic(i, "terminal in head position"))
    return tuple(out)
