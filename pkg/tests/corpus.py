"""Grammar corpus for differential testing.

Each entry pins two bounds: `prefix_bound` is the sentence length whose
prefixes get their lookahead checked, and `oracle_bound` is the token
bound handed to the brute-force oracle. The oracle's continuation set is
bounded while the parser's lookahead is not, so `oracle_bound` must leave
room for the longest shortest-completion behind any tested prefix; the
bounds below were picked per grammar and the differential tests fail
loudly if one is ever too tight.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from codeco import load_demo_grammar
from codeco.core import Grammar
from codeco.notation import parse_grammar


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    text: str | None  # None: bundled demo grammar of the same name
    prefix_bound: int
    oracle_bound: int
    expansion_budget: int = 5_000_000


ENTRIES: tuple[CorpusEntry, ...] = (
    CorpusEntry("demo_core", None, 8, 12, 50_000_000),
    CorpusEntry("single_token", "s => [a]\n", 8, 1),
    CorpusEntry("two_tokens", "s => [a] [b]\n", 8, 2),
    CorpusEntry(
        "epsilon_options",
        """
        start: s
        s => x y [z]
        x => [a]
        x => .
        y => [b]
        y => .
        """,
        8,
        3,
    ),
    CorpusEntry(
        "epsilon_only",
        "s => .\n",
        8,
        2,
    ),
    CorpusEntry(
        "left_recursion",
        """
        start: s
        s => s [a]
        s => [a]
        """,
        8,
        9,
    ),
    CorpusEntry(
        "left_recursion_expr",
        """
        start: s
        s => e
        e => e [plus] t
        e => t
        t => [n]
        """,
        8,
        10,
    ),
    CorpusEntry(
        "right_recursion_epsilon",
        """
        start: s
        s => [go] items
        items => item items
        items => .
        item => [i]
        """,
        8,
        9,
    ),
    CorpusEntry(
        "planted_ambiguity",
        """
        start: s
        s => a
        s => b
        a => [x]
        b => [x]
        """,
        8,
        1,
    ),
    CorpusEntry(
        "merged_ambiguity",
        """
        start: s
        s => c [y]
        c => a
        c => b
        a => [x]
        b => [x]
        """,
        8,
        2,
    ),
    CorpusEntry(
        # an antecedent born inside a scope dies when the scope-closing
        # rule around it completes; one born outside survives
        "scope_closure",
        """
        start: s
        s ~> intro link
        intro ~> det2 [n]
        det2 => // [shut] >(k:a)
        det2 => [free] >(k:a)
        link => [ref] <(k:a)
        link => [plain]
        """,
        8,
        4,
    ),
    CorpusEntry(
        # recency: the most recent unifiable antecedent wins, and its
        # features flow into later categories through the environment
        "reference_recency",
        """
        start: s
        s => one two after
        one => [x1] >(t:n, v:a)
        two => [x2] >(t:n, v:b)
        after => [get_a] <(t:n, v:a)
        after => [get_b] <(t:n, v:b)
        after => [probe] <(t:n, v:$X) result(val:$X)
        result(val:a) => [was_a]
        result(val:b) => [was_b]
        """,
        8,
        4,
    ),
    CorpusEntry(
        # number agreement must filter the verb menu
        "agreement",
        """
        start: s
        s => subj(num:$N) verb(num:$N)
        subj(num:sg) => [he]
        subj(num:pl) => [they]
        verb(num:sg) => [runs]
        verb(num:pl) => [run]
        """,
        8,
        2,
    ),
    CorpusEntry(
        # multi-token lexical units: the editor walks them token by token
        "multi_token_lexical",
        """
        start: s
        s => m [tail]
        m(k:a) => [one] [two]
        m(k:b) => [three]
        """,
        8,
        3,
    ),
    CorpusEntry(
        # nested scopes: the inner closer removes only its own suffix
        "nested_scopes",
        """
        start: s
        s ~> outer fin
        outer => [o] >(k:top) mid
        mid ~> // [m] >(k:deep)
        fin => [want_top] <(k:top)
        fin => [want_deep] <(k:deep)
        fin => [stop]
        """,
        8,
        4,
    ),
)


@lru_cache(maxsize=None)
def grammar_for(name: str) -> Grammar:
    entry = by_name()[name]
    if entry.text is None:
        return load_demo_grammar(name)
    return parse_grammar(entry.text)


@lru_cache(maxsize=None)
def by_name() -> dict[str, CorpusEntry]:
    return {e.name: e for e in ENTRIES}


def all_names() -> tuple[str, ...]:
    return tuple(e.name for e in ENTRIES)
