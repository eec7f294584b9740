"""Sampling concepts and axioms from the level grammars.

The sampler walks grammar bodies as a small prefix/infix token language:
nonterminals recurse, ``⊑`` splits a subsumption, ``(``/``)`` group,
polarity attaches to names, and Restriction heads produce quantifier
operators whose surface comparison (``>``, ``<``, ``=``) is desugared into
AtLeast/AtMost immediately, keeping the spelled form as a rendering hint.

Sampled rules must land exactly on a requested side-level pair, and a few
grammar shapes can over- or under-shoot (``=`` desugars into an extra
conjunction, filler draws may collapse the level), so sampling rejects and
redraws within a bounded number of attempts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import DepthRunaway, ExhaustedAttempts, LevelOverflow
from .grammar import Grammar
from .pools import Pool
from .syntax import (
    BOTTOM,
    TOP,
    And,
    AtLeast,
    AtMost,
    Atomic,
    Axiom,
    Concept,
    ConceptAssertion,
    Exists,
    Fact,
    Forall,
    Not,
    Or,
    RoleAssertion,
    SURFACE_EQ,
    SURFACE_GT,
    SURFACE_LT,
    Subsumption,
    atomic_names,
    linguistic_level,
    quantifier_nesting,
)

MAX_RULE_ATOMS = 7
MAX_NESTING = 2
_RESAMPLE_LIMIT = 200


@dataclass(frozen=True)
class Vocabulary:
    """The active term subset a single KB is built from."""

    concepts: tuple[str, ...]
    roles: tuple[str, ...]
    individuals: tuple[str, ...]

    @staticmethod
    def sample(pool: Pool, rng: random.Random, concepts: int, roles: int, individuals: int
               ) -> "Vocabulary":
        return Vocabulary(
            tuple(sorted(rng.sample(pool.concepts, min(concepts, len(pool.concepts))))),
            tuple(sorted(rng.sample(pool.roles, min(roles, len(pool.roles))))),
            tuple(sorted(rng.sample(pool.individuals, min(individuals, len(pool.individuals))))),
        )

    @staticmethod
    def full(pool: Pool) -> "Vocabulary":
        return Vocabulary(pool.concepts, pool.roles, pool.individuals)


class _Restriction:
    """Pending quantifier operator: kind plus surface bookkeeping."""

    __slots__ = ("kind", "n", "surface")

    def __init__(self, kind: str, n: int = 0, surface: str | None = None):
        self.kind = kind
        self.n = n
        self.surface = surface

    def apply(self, role: str, filler: Concept) -> Concept:
        if self.kind == "forall":
            return Forall(role, filler)
        if self.kind == "exists":
            return Exists(role, filler)
        if self.kind == "atleast":
            return AtLeast(self.n, role, filler, self.surface)
        if self.kind == "atmost":
            return AtMost(self.n, role, filler, self.surface)
        # exactly-n is the conjunction of both bounds
        return And(
            AtLeast(self.n, role, filler, SURFACE_EQ),
            AtMost(self.n, role, filler, SURFACE_EQ),
        )


class AxiomSampler:
    """Draws concepts, facts and rules from one grammar over one vocabulary."""

    def __init__(self, grammar: Grammar, vocab: Vocabulary, rng: random.Random):
        self.grammar = grammar
        self.vocab = vocab
        self.rng = rng
        self.level = grammar.level

    # -- body interpretation -------------------------------------------------

    def _symbol(self, tokens: list[str], pos: int) -> tuple[object, int]:
        """Evaluate one body item starting at pos; returns (value, next pos)."""
        tok = tokens[pos]
        if tok == "(":
            value, pos = self._expr(tokens, pos + 1)
            if tokens[pos] != ")":
                raise DepthRunaway(f"unbalanced group in grammar body {tokens}")
            return value, pos + 1
        if tok == "+":
            nxt = tokens[pos + 1]
            if nxt == "⊤":
                return TOP, pos + 2
            if nxt == "⊥":
                return BOTTOM, pos + 2
            raise DepthRunaway(f"stray '+' in grammar body {tokens}")
        if tok == "¬":
            value, pos = self._symbol(tokens, pos + 1)
            return Not(value), pos
        if tok == "∀":
            return _Restriction("forall"), pos + 1
        if tok == "∃":
            return _Restriction("exists"), pos + 1
        if tok == "⊤":
            return TOP, pos + 1
        if tok == "⊥":
            return BOTTOM, pos + 1
        if tok == "ConceptName":
            return Atomic(self.rng.choice(self.vocab.concepts)), pos + 1
        if tok == "RoleName":
            return self.rng.choice(self.vocab.roles), pos + 1
        if tok == "IndividualName":
            return self.rng.choice(self.vocab.individuals), pos + 1
        if tok == "Polarity":
            alt = self.grammar.pick("Polarity", self.rng)
            value, pos = self._symbol(tokens, pos + 1)
            return (Not(value) if alt.name == "neg" else value), pos
        if tok == "Restriction":
            return self._restriction_op(), pos + 1
        if tok == "Symbol" or tok == "Number":
            raise DepthRunaway("Symbol/Number appear only under Restriction")
        # any other token: a nonterminal head
        return self._head(tok), pos + 1

    def _restriction_op(self) -> _Restriction:
        alt = self.grammar.pick("Restriction", self.rng)
        if alt.name == "forall":
            return _Restriction("forall")
        if alt.name == "exists":
            return _Restriction("exists")
        symbol = self.grammar.pick("Symbol", self.rng).name
        n = int(self.grammar.pick("Number", self.rng).body[0])
        if symbol == "gt":
            return _Restriction("atleast", n + 1, SURFACE_GT)
        if symbol == "geq":
            return _Restriction("atleast", n)
        if symbol == "lt":
            return _Restriction("atmost", n - 1, SURFACE_LT)
        if symbol == "leq":
            return _Restriction("atmost", n)
        return _Restriction("exact", n)

    def _expr(self, tokens: list[str], pos: int) -> tuple[object, int]:
        """Parse value [Connective value]* with quantifier application."""
        value, pos = self._operand(tokens, pos)
        while pos < len(tokens) and tokens[pos] == "Connective":
            alt = self.grammar.pick("Connective", self.rng)
            rhs, pos = self._operand(tokens, pos + 1)
            value = Or(value, rhs) if alt.name == "or" else And(value, rhs)
        return value, pos

    def _operand(self, tokens: list[str], pos: int) -> tuple[object, int]:
        value, pos = self._symbol(tokens, pos)
        if isinstance(value, _Restriction):
            role, pos = self._symbol(tokens, pos)
            if pos < len(tokens) and tokens[pos] == ".":
                pos += 1
            filler, pos = self._symbol(tokens, pos)
            return value.apply(role, filler), pos
        return value, pos

    def _head(self, head: str):
        alt = self.grammar.pick(head, self.rng)
        tokens = list(alt.body)
        if "⊑" in tokens:
            cut = tokens.index("⊑")
            lhs, _ = self._expr(tokens[:cut], 0)
            rhs, _ = self._expr(tokens[cut + 1:], 0)
            return Subsumption(lhs, rhs)
        if head == "ConceptAssertion":
            concept, pos = self._symbol(tokens, 1)  # skip "("
            individual, _ = self._symbol(tokens, pos + 2)  # skip ") ("
            return ConceptAssertion(concept, individual)
        if head == "RoleAssertion":
            role, pos = self._symbol(tokens, 0)
            subject, pos = self._symbol(tokens, pos + 1)  # skip "("
            target, _ = self._symbol(tokens, pos + 1)  # skip ","
            return RoleAssertion(role, subject, target)
        value, _ = self._expr(tokens, 0)
        return value

    # -- public sampling -----------------------------------------------------

    def concept(self, head: str | None = None) -> Concept:
        """One concept expression within the level's structural budget."""
        head = head or f"ConceptL{self.level}"
        for _ in range(_RESAMPLE_LIMIT):
            value = self._head(head)
            if not isinstance(value, (Subsumption, ConceptAssertion, RoleAssertion)):
                if (
                    quantifier_nesting(value) <= MAX_NESTING
                    and len(atomic_names(value)) <= MAX_RULE_ATOMS
                ):
                    try:
                        linguistic_level(value)
                    except LevelOverflow:
                        continue
                    return value
        raise DepthRunaway(f"could not sample a well-bounded concept from {head}")

    def concept_exact(self, level: int) -> Concept:
        """A concept of exactly the given linguistic level."""
        for _ in range(_RESAMPLE_LIMIT):
            value = self.concept(f"ConceptL{level}")
            if linguistic_level(value) == level:
                return value
        raise ExhaustedAttempts(f"no level-{level} concept after {_RESAMPLE_LIMIT} draws")

    def fact(self) -> Fact:
        for _ in range(_RESAMPLE_LIMIT):
            value = self._head(self.grammar.start_fact)
            if isinstance(value, RoleAssertion):
                return value
            if self._concept_ok(value.concept):
                return value
        raise ExhaustedAttempts("no well-bounded fact")

    def rule(self) -> Subsumption:
        for _ in range(_RESAMPLE_LIMIT):
            value = self._head(self.grammar.start_rule)
            if self._concept_ok(value.lhs) and self._concept_ok(value.rhs):
                return value
        raise ExhaustedAttempts("no well-bounded rule")

    def statement(self) -> Axiom:
        """A random fact or rule, used for unknown-query sampling."""
        if self.rng.random() < 0.5:
            return self.fact()
        return self.rule()

    def _concept_ok(self, c: Concept) -> bool:
        if quantifier_nesting(c) > MAX_NESTING or len(atomic_names(c)) > MAX_RULE_ATOMS:
            return False
        try:
            linguistic_level(c)
        except LevelOverflow:
            return False
        return True
