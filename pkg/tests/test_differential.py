"""Randomized differential testing: the chart parser (via the generation
stream) against the brute-force oracle on whole-language multisets and on
derivation counts of arbitrary token sequences.

The generator produces leveled grammars (rule bodies only reference
strictly lower levels), so every language is finite and the oracle's
depth cap is never in play.
"""

from collections import Counter

from hypothesis import given, settings
from hypothesis import strategies as st

from codeco.core import (
    Atom,
    FeatureStructure,
    Rule,
    Variable,
    bwd_ref,
    fwd_ref,
    nonterminal,
    scope_opener,
    terminal,
)
from codeco.errors import TokenRejectedError
from codeco.generate import generate
from codeco.notation import build_grammar
from codeco.oracle import OracleConfig, enumerate_naive, recognize_naive
from codeco.parser import derivation_count, feed_token, new_session

_TOKENS = ("t", "u")
_values = st.sampled_from([Atom("a"), Atom("b"), Variable(0, "V")])
_ref_features = st.dictionaries(st.sampled_from(["k", "m"]), _values, max_size=2).map(
    FeatureStructure.of
)


@st.composite
def leveled_grammars(draw):
    n_levels = draw(st.integers(min_value=2, max_value=4))
    names = [f"n{i}" for i in range(n_levels)]
    rules = []
    for level, name in enumerate(names):
        for _ in range(draw(st.integers(min_value=1, max_value=3))):
            body = []
            kinds = ["term", "fwd", "bwd", "scope"] + (["cat", "cat"] if level else [])
            for _ in range(draw(st.integers(min_value=0, max_value=3))):
                kind = draw(st.sampled_from(kinds))
                if kind == "term":
                    body.append(terminal(draw(st.sampled_from(_TOKENS))))
                elif kind == "cat":
                    body.append(nonterminal(draw(st.sampled_from(names[:level]))))
                elif kind == "fwd":
                    body.append(fwd_ref(draw(_ref_features)))
                elif kind == "bwd":
                    body.append(bwd_ref(draw(_ref_features)))
                else:
                    body.append(scope_opener())
            rules.append(Rule(nonterminal(name), tuple(body), draw(st.booleans())))
    return build_grammar(rules, names[-1])


_CFG = OracleConfig(max_tokens=5, max_depth=40, expansion_budget=500_000)


@settings(max_examples=250, derandomize=True, deadline=None)
@given(leveled_grammars())
def test_language_multisets_agree(g):
    oracle_side = Counter(enumerate_naive(g, None, _CFG))
    parser_side = Counter(s for s, _ in generate(g, max_tokens=5))
    assert parser_side == oracle_side


@settings(max_examples=150, derandomize=True, deadline=None)
@given(leveled_grammars(), st.lists(st.sampled_from(_TOKENS), max_size=5))
def test_arbitrary_sequence_counts_agree(g, seq):
    seq = tuple(seq)
    state = new_session(g)
    got = 0
    try:
        for token in seq:
            state = feed_token(state, token)
        got = derivation_count(state)
    except TokenRejectedError:
        got = 0
    want = recognize_naive(g, seq, cfg=OracleConfig(max_tokens=5, max_depth=40))
    assert got == want


@settings(max_examples=100, derandomize=True, deadline=None)
@given(leveled_grammars())
def test_generated_sentences_reparse_to_same_count(g):
    stream = Counter(s for s, _ in generate(g, max_tokens=4))
    for sentence, multiplicity in stream.items():
        state = new_session(g)
        for token in sentence:
            state = feed_token(state, token)
        assert derivation_count(state) == multiplicity


def test_full_demo_lookahead_sweep(demo):
    """Lookahead exactness on the full demo grammar. Its language grows
    too fast for the 8-token corpus sweep, so this uses 6-token prefixes
    against a 10-token oracle bound (enough headroom for the longest
    shortest-completion behind any tested prefix)."""
    from codeco.oracle import OracleConfig, continuations_naive, _sentence_multiset
    from codeco.parser import next_tokens

    cfg = OracleConfig(max_tokens=10, expansion_budget=50_000_000)
    sentences = [s for s in _sentence_multiset(demo, None, cfg) if len(s) <= 6]
    prefixes = sorted({s[:i] for s in sentences for i in range(len(s) + 1)})
    states = {(): new_session(demo)}
    for prefix in prefixes:
        if prefix not in states:
            states[prefix] = feed_token(states[prefix[:-1]], prefix[-1])
        got = {o.token for o in next_tokens(states[prefix])}
        want = set(continuations_naive(demo, prefix, cfg))
        assert got == want, f"mismatch at {prefix}: parser {sorted(got)} oracle {sorted(want)}"
