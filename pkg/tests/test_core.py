"""Unification engine: the worked examples plus hypothesis properties."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codeco.core import (
    EMPTY_ENV,
    Atom,
    BindingEnv,
    Category,
    CategoryKind,
    FeatureStructure,
    Grammar,
    Rule,
    Variable,
    bwd_ref,
    fresh_rule_instance,
    fwd_ref,
    new_instance_counter,
    nonterminal,
    preterminal,
    resolve,
    rule_variables,
    scope_opener,
    terminal,
    unify_categories,
    unify_features,
    validate_grammar,
)


def fs(**pairs):
    return FeatureStructure.of({k: Atom(v) if isinstance(v, str) else v for k, v in pairs.items()})


class TestUnifyFeatures:
    def test_equal_atoms_no_new_bindings(self):
        env = unify_features(fs(num="sg"), fs(num="sg", case="acc"))
        assert env is not None
        assert env.bindings == ()

    def test_atom_clash(self):
        assert unify_features(fs(num="sg"), fs(num="pl")) is None

    def test_single_variable_binding(self):
        n = Variable(0, "N")
        env = unify_features(fs(noun=n), fs(type="noun", noun="house"))
        assert env is not None
        assert env.resolve_value(n) == Atom("house")

    def test_disjoint_features_unconstrained(self):
        env = unify_features(fs(a="1"), fs(b="2"))
        assert env is not None and env.bindings == ()

    def test_input_env_not_mutated(self):
        n = Variable(0, "N")
        env0 = EMPTY_ENV
        unify_features(fs(x=n), fs(x="a"), env0)
        assert env0.bindings == ()

    def test_failure_leaves_env_usable(self):
        n = Variable(0)
        env = unify_features(fs(x=n), fs(x="a"))
        assert unify_features(fs(y="p"), fs(y="q"), env) is None
        assert env.resolve_value(n) == Atom("a")

    def test_variable_variable_chain(self):
        v1, v2 = Variable(1), Variable(2)
        env = unify_features(fs(x=v1), fs(x=v2))
        env = unify_features(fs(y=v2), fs(y="val"), env)
        assert env.resolve_value(v1) == Atom("val")


class TestUnifyCategories:
    def test_preterminal_variable(self):
        n = Variable(0, "N")
        env = unify_categories(preterminal("noun", fs(text=n)), preterminal("noun", fs(text="man")))
        assert env is not None and env.resolve_value(n) == Atom("man")

    def test_name_mismatch(self):
        assert unify_categories(nonterminal("np", fs(case="acc")), nonterminal("vp", fs(case="acc"))) is None

    def test_bwd_matches_fwd(self):
        n = Variable(0, "N")
        env = unify_categories(
            bwd_ref(fs(type="noun", noun=n)), fwd_ref(fs(type="noun", noun="house"))
        )
        assert env is not None and env.resolve_value(n) == Atom("house")

    def test_terminals(self):
        assert unify_categories(terminal("a"), terminal("a")) is not None
        assert unify_categories(terminal("a"), terminal("b")) is None

    def test_kind_mismatch(self):
        assert unify_categories(terminal("a"), nonterminal("a")) is None
        assert unify_categories(fwd_ref(), fwd_ref()) is None


class TestResolve:
    def test_bound_variable(self):
        n = Variable(0, "N")
        env = unify_features(fs(text=n), fs(text="man"))
        assert resolve(preterminal("noun", fs(text=n)), env) == preterminal("noun", fs(text="man"))

    def test_unbound_identity(self):
        n = Variable(0, "N")
        cat = preterminal("noun", fs(text=n))
        assert resolve(cat, EMPTY_ENV) == cat

    def test_no_variables(self):
        cat = nonterminal("det", fs(exist="+"))
        assert resolve(cat, EMPTY_ENV) == cat


class TestFreshInstance:
    def rule(self):
        num = Variable(0, "Num")
        return Rule(nonterminal("vp", fs(num=num)), (nonterminal("v", fs(num=num)),))

    def test_disjoint_instances(self):
        counter = new_instance_counter()
        r1 = fresh_rule_instance(self.rule(), counter)
        r2 = fresh_rule_instance(self.rule(), counter)
        ids1 = {v.id for v in rule_variables(r1)}
        ids2 = {v.id for v in rule_variables(r2)}
        assert ids1.isdisjoint(ids2)

    def test_no_variables_identical(self):
        rule = Rule(nonterminal("s"), (terminal("a"),))
        assert fresh_rule_instance(rule, new_instance_counter()) == rule

    def test_sharing_preserved(self):
        r = fresh_rule_instance(self.rule(), new_instance_counter(100))
        head_var = r.head.features.get("num")
        body_var = r.body[0].features.get("num")
        assert head_var == body_var and head_var.id >= 100


class TestValidateGrammar:
    def test_demo_grammar_clean(self, demo):
        assert validate_grammar(demo) == ()

    def test_unknown_start(self):
        g = Grammar(rules=(Rule(nonterminal("s"), (terminal("a"),)),), lexical_rules=(), start="zzz")
        diags = validate_grammar(g)
        assert len(diags) == 1 and "start" in diags[0].message

    def test_special_head(self):
        g = Grammar(rules=(Rule(scope_opener(), (terminal("a"),)), Rule(nonterminal("s"), ())), lexical_rules=(), start="s")
        diags = validate_grammar(g)
        assert len(diags) == 1 and "head" in diags[0].message

    def test_duplicate_feature(self):
        head = Category(CategoryKind.NONTERMINAL, name="s",
                        features=FeatureStructure((("f", Atom("a")), ("f", Atom("b")))))
        g = Grammar(rules=(Rule(head, (terminal("a"),)),), lexical_rules=(), start="s")
        diags = validate_grammar(g)
        assert len(diags) == 1 and "duplicated" in diags[0].message

    def test_preterminal_with_nonlexical_rule(self):
        g = Grammar(
            rules=(Rule(preterminal("n"), (nonterminal("x"),)), Rule(nonterminal("x"), (terminal("t"),))),
            lexical_rules=(Rule(preterminal("n"), (terminal("t"),)),),
            start="n",
        )
        diags = validate_grammar(g)
        assert any("non-lexical" in d.message for d in diags)


# ---------------------------------------------------------------------------
# Properties

_atoms = st.sampled_from([Atom("a"), Atom("b"), Atom("+"), Atom("-"), Atom("val")])
_vars = st.integers(min_value=0, max_value=5).map(Variable)
_values = st.one_of(_atoms, _vars)
_names = st.sampled_from(["f", "g", "h", "num", "case"])
_features = st.dictionaries(_names, _values, max_size=4).map(FeatureStructure.of)


def _well_formed(env: BindingEnv) -> bool:
    # every chain terminates and resolution is idempotent
    for var_id, _ in env.bindings:
        value = env.resolve_value(Variable(var_id))
        assert env.resolve_value(value) == value
    return True


@settings(max_examples=300, derandomize=True)
@given(_features, _features)
def test_unify_symmetry(a, b):
    left = unify_features(a, b)
    right = unify_features(b, a)
    assert (left is None) == (right is None)
    if left is not None:
        for name, _ in a:
            if b.get(name) is not None:
                assert left.resolve_value(a.get(name)) == left.resolve_value(b.get(name))
                assert right.resolve_value(a.get(name)) == right.resolve_value(b.get(name))
        _well_formed(left)
        _well_formed(right)


@settings(max_examples=300, derandomize=True)
@given(_features)
def test_unify_idempotence(a):
    env = unify_features(a, a)
    assert env is not None
    for _, value in a:
        assert env.resolve_value(value) == env.resolve_value(value)
    _well_formed(env)


@settings(max_examples=300, derandomize=True)
@given(_features, _features, _features)
def test_unify_monotonic_and_acyclic(a, b, c):
    env = unify_features(a, b)
    if env is None:
        return
    before = {var_id: env.resolve_value(Variable(var_id)) for var_id, _ in env.bindings}
    env2 = unify_features(b, c, env)
    if env2 is None:
        return
    _well_formed(env2)
    for var_id, value in before.items():
        resolved = env2.resolve_value(Variable(var_id))
        if isinstance(value, Atom):
            assert resolved == value  # successful unification never unbinds


@settings(max_examples=300, derandomize=True)
@given(_features, _features)
def test_resolve_fixpoint(a, b):
    env = unify_features(a, b)
    if env is None:
        return
    cat = nonterminal("x", a)
    once = resolve(cat, env)
    assert resolve(once, env) == once
