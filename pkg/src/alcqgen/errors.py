"""Exception hierarchy for alcqgen.

Every failure mode that callers are expected to handle gets its own class;
anything else is a plain bug and raises builtins.
"""

from __future__ import annotations


class AlcqError(Exception):
    """Base class for all alcqgen errors."""


# ---------------------------------------------------------------------------
# Syntax / parsing
# ---------------------------------------------------------------------------

class LevelOverflow(AlcqError):
    """A concept expression exceeds the level-3 operator budget."""


class IllegalLevelPair(AlcqError):
    """A subsumption's (lhs level, rhs level) pair is not an allowed combination."""


class UnsupportedNegation(AlcqError):
    """Negation was requested for an axiom kind that has no ALCQ negation."""


class DuplicateAxiom(AlcqError):
    """A knowledge base was built with two structurally equal axioms."""


class ParseError(AlcqError):
    """Malformed KB text. Carries 1-based line/column of the offending token."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})" if line else message)
        self.line = line
        self.column = column


class NestingLimit(ParseError):
    """Quantifier nesting in the input exceeds the configured limit."""


class ArityError(ParseError):
    """A cardinality in the input is outside the allowed range."""


# ---------------------------------------------------------------------------
# Reasoning
# ---------------------------------------------------------------------------

class InconsistentKB(AlcqError):
    """An operation that requires a consistent KB was given an inconsistent one."""


class NotDerivable(AlcqError):
    """A justification was requested for an axiom whose answer is unknown."""


class ResourceLimit(AlcqError):
    """A reasoning call exceeded its node/expansion budget."""


class BudgetExceeded(AlcqError):
    """The brute-force oracle refused a signature too large to enumerate."""


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------

class UnknownPool(AlcqError):
    """Pool name other than A or B."""


class DepthRunaway(AlcqError):
    """Grammar expansion exceeded its safety bound."""


class ExhaustedAttempts(AlcqError):
    """A bounded sampling loop ran out of retries."""


class GenerationFailed(AlcqError):
    """KB generation gave up after max_retries.

    ``diagnostics`` maps (depth, answer) slots to the number of attempts in
    which that slot could not be filled, so callers can see *why* a
    configuration keeps failing.
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NoCandidateAtDepth(AlcqError):
    """The inferred closure holds no usable consequence at the requested depth."""


class SlotUnfillable(AlcqError):
    """A (depth, answer) query slot cannot be filled; the KB must be discarded."""

    def __init__(self, depth: int, answer: str, reason: str = ""):
        msg = f"cannot fill ({answer}, depth {depth}) slot"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)
        self.depth = depth
        self.answer = answer


# ---------------------------------------------------------------------------
# Pipeline / rendering
# ---------------------------------------------------------------------------

class MismatchedConfig(AlcqError):
    """Datasets with incompatible generation parameters cannot be merged."""


class UnmappedTerm(AlcqError):
    """A content word has no entry in the renaming map."""
