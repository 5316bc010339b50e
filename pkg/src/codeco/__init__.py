"""Grammar notation and toolkit for controlled natural languages in
predictive editors: feature-structure rules with forward/backward
references and scopes, an incremental chart parser with exact lookahead,
exhaustive-generation checks, a CLI and a completion service."""

from importlib import resources

from .core import (
    Atom,
    BindingEnv,
    Category,
    CategoryKind,
    Diagnostic,
    FeatureStructure,
    Grammar,
    Rule,
    Variable,
    bwd_ref,
    fresh_rule_instance,
    fwd_ref,
    nonterminal,
    preterminal,
    resolve,
    scope_opener,
    terminal,
    unify_categories,
    unify_features,
    validate_grammar,
)
from .errors import (
    BudgetExceededError,
    CodecoError,
    GrammarSyntaxError,
    GrammarValidationError,
    TokenRejectedError,
    UnknownStartError,
)
from .generate import GenerationReport, SubsetReport, check_ambiguity, check_subset, generate
from .notation import (
    ParseDiagnostic,
    SourceSpan,
    load_grammar,
    parse_grammar,
    serialize_grammar,
)
from .parser import (
    Antecedent,
    ParseState,
    ScopeMark,
    SyntaxTree,
    TokenOption,
    accessible_antecedents,
    extract_trees,
    feed_token,
    is_complete,
    new_session,
    next_tokens,
    resolve_backward_ref,
)

__version__ = "0.1.0"


def demo_grammar_path(name: str = "demo") -> str:
    """Filesystem path of a bundled grammar (`demo` or `demo_core`)."""
    return str(resources.files(__package__) / "grammars" / f"{name}.codeco")


def load_demo_grammar(name: str = "demo") -> Grammar:
    return load_grammar(demo_grammar_path(name))
