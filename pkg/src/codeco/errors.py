"""Exception types shared across the package."""

from __future__ import annotations


class CodecoError(Exception):
    """Base class for all errors raised by this package."""


class BudgetExceededError(CodecoError):
    """A configured resource budget (expansions, depth, chart size) ran out."""


class ClosureBudgetError(BudgetExceededError):
    """Chart closure did not reach a fixpoint within the item budget.

    Happens only for degenerate grammars that can apply zero-width
    categories unboundedly often at a single token position.
    """


class DerivationCycleError(BudgetExceededError):
    """A derivation derives itself (infinitely ambiguous grammar)."""


class OracleDepthError(BudgetExceededError):
    """The brute-force enumerator hit its depth cap before the token bound.

    Raised instead of returning a possibly truncated answer: the oracle is
    a ground-truth baseline and must never be silently wrong.
    """


class GrammarSyntaxError(CodecoError):
    """Grammar text could not be parsed. Carries ParseDiagnostic objects."""

    def __init__(self, diagnostics):
        self.diagnostics = tuple(diagnostics)
        first = self.diagnostics[0].message if self.diagnostics else "syntax error"
        super().__init__(f"{len(self.diagnostics)} syntax error(s): {first}")


class GrammarValidationError(CodecoError):
    """Grammar parsed but violates a structural invariant."""

    def __init__(self, diagnostics):
        self.diagnostics = tuple(diagnostics)
        first = self.diagnostics[0].message if self.diagnostics else "invalid grammar"
        super().__init__(f"{len(self.diagnostics)} validation error(s): {first}")


class UnknownStartError(CodecoError):
    """The requested start category heads no rule in the grammar."""


class TokenRejectedError(CodecoError):
    """A fed token is not a valid continuation of the current prefix."""

    def __init__(self, token, options):
        self.token = token
        self.options = tuple(options)
        super().__init__(f"token {token!r} is not a valid continuation")
