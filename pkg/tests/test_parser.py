"""Chart parser: session mechanics, references, scopes, trees."""

import pytest

from codeco.core import Atom
from codeco.errors import DerivationCycleError, TokenRejectedError, UnknownStartError
from codeco.notation import parse_grammar
from codeco.parser import (
    Antecedent,
    accessible_antecedents,
    derivation_count,
    extract_trees,
    feed_token,
    is_complete,
    new_session,
    next_tokens,
    resolve_backward_ref,
)
from codeco.core import EMPTY_ENV, FeatureStructure, Variable, bwd_ref

from conftest import feed_all, token_set

PARTIAL = "every man protects a house from every enemy and does not destroy".split()


def ant(position, **features):
    return Antecedent(FeatureStructure.of({k: Atom(v) for k, v in features.items()}), position, 0)


class TestNewSession:
    def test_demo_start_nonempty(self, demo):
        assert token_set(next_tokens(new_session(demo))) == {"a", "every"}

    def test_single_token_grammar(self):
        st = new_session(parse_grammar("s => [a]\n"))
        assert token_set(next_tokens(st)) == {"a"}

    def test_epsilon_language_complete_immediately(self):
        st = new_session(parse_grammar("s => .\n"))
        assert is_complete(st)
        assert next_tokens(st) == ()

    def test_unknown_start(self, demo):
        with pytest.raises(UnknownStartError):
            new_session(demo, "nope")


class TestFeedToken:
    def test_rejection_leaves_state_unchanged(self):
        st = new_session(parse_grammar("s => [a]\n"))
        with pytest.raises(TokenRejectedError) as e:
            feed_token(st, "b")
        assert e.value.token == "b"
        assert token_set(e.value.options) == {"a"}
        assert token_set(next_tokens(st)) == {"a"}
        assert st.tokens == ()

    def test_two_token_sentence(self):
        st = feed_all(new_session(parse_grammar("s => [a] [b]\n")), ["a", "b"])
        assert is_complete(st)

    def test_running_example_antecedents(self, demo_core):
        st = feed_all(new_session(demo_core), PARTIAL)
        ants = accessible_antecedents(st)
        nouns = {a.features.get("noun").text for a in ants}
        assert nouns == {"man", "house"}


class TestNextTokens:
    def test_running_example_the_then_nouns(self, demo_core):
        st = feed_all(new_session(demo_core), PARTIAL)
        assert "the" in token_set(next_tokens(st))
        st = feed_token(st, "the")
        assert token_set(next_tokens(st)) == {"man", "house"}

    def test_soundness_every_offer_feedable(self, demo):
        st = new_session(demo)
        for step in "every man that waits protects a house from the".split():
            for opt in next_tokens(st):
                feed_token(st, opt.token)  # must not raise
            st = feed_token(st, step)

    def test_definite_np_impossible_at_sentence_start(self, demo_core):
        # no antecedent exists yet, so the backward reference can never
        # resolve and "the" must not be offered
        assert "the" not in token_set(next_tokens(new_session(demo_core)))


class TestAccessibleAntecedents:
    def test_fresh_session_empty(self, demo_core):
        assert accessible_antecedents(new_session(demo_core)) == ()

    def test_after_every_man(self, demo_core):
        st = feed_all(new_session(demo_core), ["every", "man"])
        ants = accessible_antecedents(st)
        assert len(ants) == 1
        assert ants[0].features.get("noun") == Atom("man")
        assert ants[0].position == 2

    def test_scope_monotonicity(self, demo):
        # in the full grammar a relative clause could still attach to
        # "every enemy", so the antecedent is accessible right after it;
        # once it disappears behind the closed scope it never comes back
        st = feed_all(new_session(demo), PARTIAL[:8])  # ... every enemy
        assert {a.features.get("noun").text for a in accessible_antecedents(st)} >= {"enemy"}
        seen_gone = False
        for token in PARTIAL[8:] + ["the", "house"]:
            st = feed_token(st, token)
            nouns = {a.features.get("noun").text for a in accessible_antecedents(st)}
            if seen_gone:
                assert "enemy" not in nouns
            if "enemy" not in nouns:
                seen_gone = True
        assert seen_gone

    def test_core_closes_enemy_scope_at_vp_end(self, demo_core):
        # the core grammar has no continuation inside the object noun
        # phrase, so the scope is already closed once "enemy" is read
        st = feed_all(new_session(demo_core), PARTIAL[:8])
        nouns = {a.features.get("noun").text for a in accessible_antecedents(st)}
        assert nouns == {"man", "house"}


class TestIsComplete:
    def test_single_token(self):
        st = feed_all(new_session(parse_grammar("s => [a]\n")), ["a"])
        assert is_complete(st)

    def test_fresh_non_nullable(self, demo):
        assert not is_complete(new_session(demo))

    def test_prefix_complete_then_extendable(self, demo_core):
        st = feed_all(new_session(demo_core), "every man protects a house".split())
        assert is_complete(st)
        assert "from" in token_set(next_tokens(st))


class TestExtractTrees:
    def test_unambiguous_sentence_single_tree(self, demo_core):
        st = feed_all(new_session(demo_core), "every man protects a house".split())
        trees = extract_trees(st)
        assert len(trees) == 1 == derivation_count(st)

    def test_planted_ambiguity_two_trees(self):
        g = parse_grammar("start: s\ns => a\ns => b\na => [x]\nb => [x]\n")
        st = feed_all(new_session(g), ["x"])
        assert len(extract_trees(st)) == 2 == derivation_count(st)

    def test_merged_items_count_derivations(self):
        g = parse_grammar("start: s\ns => c [y]\nc => a\nc => b\na => [x]\nb => [x]\n")
        st = feed_all(new_session(g), ["x", "y"])
        assert derivation_count(st) == 2
        trees = extract_trees(st)
        assert len(trees) == 2
        assert all(t.leaves() == ("x", "y") for t in trees)

    def test_incomplete_empty(self, demo_core):
        st = feed_all(new_session(demo_core), ["every"])
        assert extract_trees(st) == ()

    def test_running_example_links_and_scopes(self, demo_core):
        st = feed_all(new_session(demo_core), PARTIAL + ["the", "house"])
        [tree] = extract_trees(st)
        assert tree.leaves() == tuple(PARTIAL + ["the", "house"])
        [(features, position)] = tree.reference_links()
        assert features.get("noun") == Atom("house")
        assert position == 5  # the antecedent created right after "a house"

        def all_spans(t):
            spans = list(t.scope_spans)
            for c in t.children:
                if hasattr(c, "children"):
                    spans.extend(all_spans(c))
            return spans

        spans = all_spans(tree)
        # enemy's scope (opened at 6) closes when the inner verb phrase
        # ends (position 8); the subject scope closes at sentence end
        assert (6, 8) in spans
        assert (0, 14) in spans

    def test_leaf_agreement_across_derivations(self, demo):
        tokens = "every man waits and waits and waits".split()
        st = feed_all(new_session(demo), tokens)
        trees = extract_trees(st)
        assert len(trees) == 2  # coordination is intentionally ambiguous
        assert all(t.leaves() == tuple(tokens) for t in trees)

    def test_infinite_ambiguity_detected(self):
        g = parse_grammar("start: s\ns => s\ns => [t]\n")
        st = feed_all(new_session(g), ["t"])
        with pytest.raises(DerivationCycleError):
            derivation_count(st)


class TestResolveBackwardRef:
    def test_most_recent_wins(self):
        access = (ant(2, type="noun", noun="man"), ant(5, type="noun", noun="house"))
        n = Variable(0, "N")
        ref = bwd_ref(FeatureStructure.of({"type": Atom("noun"), "noun": n}))
        got = resolve_backward_ref(ref, access, EMPTY_ENV)
        assert got is not None
        chosen, env = got
        assert chosen.position == 5
        assert env.resolve_value(n) == Atom("house")

    def test_skips_non_unifiable(self):
        access = (ant(2, type="noun", noun="man"), ant(5, type="noun", noun="house"))
        ref = bwd_ref(FeatureStructure.of({"type": Atom("noun"), "noun": Atom("man")}))
        chosen, _ = resolve_backward_ref(ref, access, EMPTY_ENV)
        assert chosen.position == 2

    def test_empty_access_fails(self):
        ref = bwd_ref(FeatureStructure.of({"type": Atom("noun")}))
        assert resolve_backward_ref(ref, (), EMPTY_ENV) is None


class TestDeterminism:
    def test_replay_reproduces_options(self, demo):
        tokens = "every man protects a house from every enemy and does not destroy the".split()
        runs = []
        for _ in range(2):
            st = new_session(demo)
            seen = [next_tokens(st)]
            for t in tokens:
                st = feed_token(st, t)
                seen.append(next_tokens(st))
            runs.append(seen)
        assert runs[0] == runs[1]


class TestAccessSuffixLaw:
    def test_closing_removes_contiguous_suffix(self, demo_core):
        # compare the union access lists around the scope closure at "enemy"
        st = feed_all(new_session(demo_core), PARTIAL[:8])
        before = accessible_antecedents(st)
        st2 = feed_token(st, "and")
        after = accessible_antecedents(st2)
        # survivors form a prefix of the earlier antecedent sequence
        assert list(after) == list(before)[: len(after)]
