"""Abstract syntax for ALCQ: concept expressions, axioms, knowledge bases.

Concepts are immutable trees built from atomic names, top/bottom, boolean
connectives, value/existential restrictions and qualified number
restrictions.  Axioms are subsumptions (rules) and assertions (facts).
Everything here is a pure value: hashable, comparable, safe to share.

Number restrictions carry an optional ``surface`` hint recording which
comparison spelled them in source material ("<", ">", "=", ...).  The hint
never participates in equality or hashing; it exists only so renderers can
reproduce surface forms like "less than one" instead of "at most zero".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Union

from .errors import DuplicateAxiom, IllegalLevelPair, LevelOverflow, UnsupportedNegation

# Surface hints for number restrictions (how the cardinality was written).
SURFACE_GT = "gt"        # > n
SURFACE_GEQ = "geq"      # >= n  (canonical for AtLeast)
SURFACE_LT = "lt"        # < n
SURFACE_LEQ = "leq"      # <= n  (canonical for AtMost)
SURFACE_EQ = "eq"        # = n, desugared to AtLeast(n) AND AtMost(n)


# ---------------------------------------------------------------------------
# Concept expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Atomic:
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Top:
    def __repr__(self) -> str:
        return "top"


@dataclass(frozen=True, slots=True)
class Bottom:
    def __repr__(self) -> str:
        return "bottom"


@dataclass(frozen=True, slots=True)
class Not:
    inner: "Concept"

    def __repr__(self) -> str:
        return f"not({self.inner!r})"


@dataclass(frozen=True, slots=True)
class And:
    left: "Concept"
    right: "Concept"

    def __repr__(self) -> str:
        return f"and({self.left!r}, {self.right!r})"


@dataclass(frozen=True, slots=True)
class Or:
    left: "Concept"
    right: "Concept"

    def __repr__(self) -> str:
        return f"or({self.left!r}, {self.right!r})"


@dataclass(frozen=True, slots=True)
class Exists:
    role: str
    filler: "Concept"

    def __repr__(self) -> str:
        return f"some({self.role}, {self.filler!r})"


@dataclass(frozen=True, slots=True)
class Forall:
    role: str
    filler: "Concept"

    def __repr__(self) -> str:
        return f"only({self.role}, {self.filler!r})"


@dataclass(frozen=True, slots=True)
class AtLeast:
    n: int
    role: str
    filler: "Concept"
    surface: str | None = field(default=None, compare=False)

    def __repr__(self) -> str:
        return f"atleast({self.n}, {self.role}, {self.filler!r})"


@dataclass(frozen=True, slots=True)
class AtMost:
    n: int
    role: str
    filler: "Concept"
    surface: str | None = field(default=None, compare=False)

    def __repr__(self) -> str:
        return f"atmost({self.n}, {self.role}, {self.filler!r})"


Concept = Union[Atomic, Top, Bottom, Not, And, Or, Exists, Forall, AtLeast, AtMost]

TOP = Top()
BOTTOM = Bottom()

_QUANTIFIERS = (Exists, Forall, AtLeast, AtMost)
_BOOLEANS = (And, Or)


# ---------------------------------------------------------------------------
# Axioms and knowledge bases
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Subsumption:
    """A rule C ⊑ D: every instance of lhs is an instance of rhs."""

    lhs: Concept
    rhs: Concept

    def __repr__(self) -> str:
        return f"sub({self.lhs!r}, {self.rhs!r})"


@dataclass(frozen=True, slots=True)
class ConceptAssertion:
    """A fact C(a): the named individual is an instance of the concept."""

    concept: Concept
    individual: str

    def __repr__(self) -> str:
        return f"assert({self.concept!r}, {self.individual})"


@dataclass(frozen=True, slots=True)
class RoleAssertion:
    """A fact R(a, b).  Negated role assertions do not exist in ALCQ."""

    role: str
    subject: str
    target: str

    def __repr__(self) -> str:
        return f"{self.role}({self.subject}, {self.target})"


Fact = Union[ConceptAssertion, RoleAssertion]
Axiom = Union[Subsumption, ConceptAssertion, RoleAssertion]


@dataclass(frozen=True)
class Signature:
    """Exactly the names occurring in some syntactic object."""

    concepts: frozenset[str] = frozenset()
    roles: frozenset[str] = frozenset()
    individuals: frozenset[str] = frozenset()

    def __or__(self, other: "Signature") -> "Signature":
        return Signature(
            self.concepts | other.concepts,
            self.roles | other.roles,
            self.individuals | other.individuals,
        )

    @staticmethod
    def of_concept(c: Concept) -> "Signature":
        concepts: set[str] = set()
        roles: set[str] = set()
        for sub in subconcepts(c):
            if isinstance(sub, Atomic):
                concepts.add(sub.name)
            elif isinstance(sub, _QUANTIFIERS):
                roles.add(sub.role)
        return Signature(frozenset(concepts), frozenset(roles))

    @staticmethod
    def of_axiom(ax: Axiom) -> "Signature":
        if isinstance(ax, Subsumption):
            return Signature.of_concept(ax.lhs) | Signature.of_concept(ax.rhs)
        if isinstance(ax, ConceptAssertion):
            return Signature.of_concept(ax.concept) | Signature(
                individuals=frozenset({ax.individual})
            )
        return Signature(
            roles=frozenset({ax.role}),
            individuals=frozenset({ax.subject, ax.target}),
        )

    @staticmethod
    def of_axioms(axioms) -> "Signature":
        sig = Signature()
        for ax in axioms:
            sig = sig | Signature.of_axiom(ax)
        return sig


class KnowledgeBase:
    """An ordered set of rules plus an ordered set of facts.

    Axiom identity is structural after NNF; building a KB with duplicates
    raises.  Size bounds for generated KBs are the sampler's job, not the
    type's: hand-written KBs of any size are legal here.
    """

    __slots__ = ("rules", "facts", "kb_id", "_keys")

    def __init__(self, rules=(), facts=(), kb_id: str = ""):
        self.rules: tuple[Subsumption, ...] = tuple(rules)
        self.facts: tuple[Fact, ...] = tuple(facts)
        self.kb_id = kb_id
        keys = []
        seen = set()
        for ax in self.axioms:
            key = axiom_key(ax)
            if key in seen:
                raise DuplicateAxiom(f"duplicate axiom (after NNF): {ax!r}")
            seen.add(key)
            keys.append(key)
        self._keys = frozenset(keys)

    @property
    def axioms(self) -> tuple[Axiom, ...]:
        return self.rules + self.facts

    def signature(self) -> Signature:
        return Signature.of_axioms(self.axioms)

    def key(self) -> frozenset:
        return self._keys

    def __len__(self) -> int:
        return len(self.rules) + len(self.facts)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, KnowledgeBase)
            and self.rules == other.rules
            and self.facts == other.facts
        )

    def __hash__(self) -> int:
        return hash((self.rules, self.facts))

    def __repr__(self) -> str:
        tag = f" {self.kb_id}" if self.kb_id else ""
        return f"<KB{tag}: {len(self.rules)} rules, {len(self.facts)} facts>"


class Answer(Enum):
    """Three-valued open-world verdict for a query against a KB."""

    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value


# ---------------------------------------------------------------------------
# Traversals and counts
# ---------------------------------------------------------------------------

def subconcepts(c: Concept) -> Iterator[Concept]:
    """Yield every sub-expression of c, including c itself (pre-order)."""
    yield c
    if isinstance(c, Not):
        yield from subconcepts(c.inner)
    elif isinstance(c, _BOOLEANS):
        yield from subconcepts(c.left)
        yield from subconcepts(c.right)
    elif isinstance(c, _QUANTIFIERS):
        yield from subconcepts(c.filler)


def boolean_count(c: Concept) -> int:
    """Number of ⊓/⊔ occurrences.  Negation does not count."""
    return sum(1 for sub in subconcepts(c) if isinstance(sub, _BOOLEANS))


def quantifier_count(c: Concept) -> int:
    """Number of ∃/∀/≥/≤ occurrences; number restrictions count as quantifiers."""
    return sum(1 for sub in subconcepts(c) if isinstance(sub, _QUANTIFIERS))


def quantifier_nesting(c: Concept) -> int:
    """Maximum depth of nested quantifiers."""
    if isinstance(c, _QUANTIFIERS):
        return 1 + quantifier_nesting(c.filler)
    if isinstance(c, Not):
        return quantifier_nesting(c.inner)
    if isinstance(c, _BOOLEANS):
        return max(quantifier_nesting(c.left), quantifier_nesting(c.right))
    return 0


def atomic_names(c: Concept) -> frozenset[str]:
    return frozenset(sub.name for sub in subconcepts(c) if isinstance(sub, Atomic))


# ---------------------------------------------------------------------------
# Normal forms and negation
# ---------------------------------------------------------------------------

def nnf(c: Concept) -> Concept:
    """Negation normal form: negation only directly on atomic concepts.

    Logically equivalent to the input and idempotent.  Number-restriction
    fillers are normalized in place; complements of number restrictions
    shift the bound (¬≤n ≡ ≥n+1, ¬≥n ≡ ≤n−1).
    """
    if isinstance(c, (Atomic, Top, Bottom)):
        return c
    if isinstance(c, And):
        return And(nnf(c.left), nnf(c.right))
    if isinstance(c, Or):
        return Or(nnf(c.left), nnf(c.right))
    if isinstance(c, Exists):
        return Exists(c.role, nnf(c.filler))
    if isinstance(c, Forall):
        return Forall(c.role, nnf(c.filler))
    if isinstance(c, AtLeast):
        return AtLeast(c.n, c.role, nnf(c.filler), c.surface)
    if isinstance(c, AtMost):
        return AtMost(c.n, c.role, nnf(c.filler), c.surface)
    # c is a negation: push it one level down.
    inner = c.inner
    if isinstance(inner, Atomic):
        return c
    if isinstance(inner, Top):
        return BOTTOM
    if isinstance(inner, Bottom):
        return TOP
    if isinstance(inner, Not):
        return nnf(inner.inner)
    if isinstance(inner, And):
        return Or(nnf(Not(inner.left)), nnf(Not(inner.right)))
    if isinstance(inner, Or):
        return And(nnf(Not(inner.left)), nnf(Not(inner.right)))
    if isinstance(inner, Exists):
        return Forall(inner.role, nnf(Not(inner.filler)))
    if isinstance(inner, Forall):
        return Exists(inner.role, nnf(Not(inner.filler)))
    if isinstance(inner, AtLeast):
        if inner.n <= 1:
            # ¬(≥1 R.C) ≡ no R-successor in C
            return Forall(inner.role, nnf(Not(inner.filler)))
        return AtMost(inner.n - 1, inner.role, nnf(inner.filler))
    if isinstance(inner, AtMost):
        return AtLeast(inner.n + 1, inner.role, nnf(inner.filler))
    raise TypeError(f"not a concept: {inner!r}")


def complement(c: Concept) -> Concept:
    """NNF of ¬c."""
    return nnf(Not(c))


def negate_axiom(ax: Axiom) -> Axiom:
    """Negate a concept assertion, pushing the negation into NNF.

    Role assertions have no negation in ALCQ, and a negated subsumption is
    not an axiom; both raise.  False rule-shaped queries are built by the
    inconsistency-injection route instead.
    """
    if isinstance(ax, ConceptAssertion):
        return ConceptAssertion(complement(ax.concept), ax.individual)
    if isinstance(ax, RoleAssertion):
        raise UnsupportedNegation("role assertions cannot be negated in ALCQ")
    raise UnsupportedNegation("subsumptions are negated only via inconsistency injection")


def axiom_key(ax: Axiom):
    """Structural identity key: the axiom with both sides in NNF."""
    if isinstance(ax, Subsumption):
        return ("sub", nnf(ax.lhs), nnf(ax.rhs))
    if isinstance(ax, ConceptAssertion):
        return ("ca", nnf(ax.concept), ax.individual)
    return ("ra", ax.role, ax.subject, ax.target)


# ---------------------------------------------------------------------------
# Linguistic complexity levels
# ---------------------------------------------------------------------------

MAX_LEVEL = 3

# Side-level pairs that define each KB level.  A level-n KB may also contain
# any pair legal at a smaller level; (2,2) and (3,3) are legal nowhere.
LEVEL_PAIRS: dict[int, frozenset[tuple[int, int]]] = {
    0: frozenset({(0, 0)}),
    1: frozenset({(0, 1), (1, 0), (1, 1)}),
    2: frozenset({(0, 2), (2, 0), (1, 2), (2, 1)}),
    3: frozenset({(0, 3), (1, 3), (2, 3), (3, 0), (3, 1), (3, 2)}),
}

ALL_LEVEL_PAIRS: frozenset[tuple[int, int]] = frozenset().union(*LEVEL_PAIRS.values())


def legal_pairs(kb_level: int) -> frozenset[tuple[int, int]]:
    """All side-level pairs a KB of the given level may contain."""
    pairs: frozenset[tuple[int, int]] = frozenset()
    for lvl in range(kb_level + 1):
        pairs = pairs | LEVEL_PAIRS[lvl]
    return pairs


def linguistic_level(c: Concept) -> int:
    """Smallest L with boolean_count ≤ L and quantifier_count ≤ L+1.

    Level L admits L boolean connectives and up to L+1 quantifiers; raises
    LevelOverflow past the level-3 budget (3 connectives, 4 quantifiers).
    """
    booleans = boolean_count(c)
    quantifiers = quantifier_count(c)
    if booleans > MAX_LEVEL:
        raise LevelOverflow(f"{booleans} boolean connectives exceed level {MAX_LEVEL}")
    if quantifiers > MAX_LEVEL + 1:
        raise LevelOverflow(f"{quantifiers} quantifiers exceed level {MAX_LEVEL}")
    return max(booleans, quantifiers - 1, 0)


def axiom_level(ax: Axiom, kb_level: int | None = None) -> int:
    """Level of an axiom: max of its side levels.

    For subsumptions the side-level pair must be a combination some KB level
    allows; with ``kb_level`` given, it must be allowed at that KB level.
    """
    if isinstance(ax, Subsumption):
        pair = (linguistic_level(ax.lhs), linguistic_level(ax.rhs))
        if pair not in ALL_LEVEL_PAIRS:
            raise IllegalLevelPair(f"no KB level admits a Level_{pair[0]} ⊑ Level_{pair[1]} axiom")
        if kb_level is not None and pair not in legal_pairs(kb_level):
            raise IllegalLevelPair(f"pair {pair} not allowed in a level-{kb_level} KB")
        return max(pair)
    if isinstance(ax, ConceptAssertion):
        return linguistic_level(ax.concept)
    return 0  # role assertions have no operators


def complexity_profile(ax: Axiom) -> tuple[int, int]:
    """(connective count, quantifier count) totalled over both sides."""
    if isinstance(ax, Subsumption):
        return (
            boolean_count(ax.lhs) + boolean_count(ax.rhs),
            quantifier_count(ax.lhs) + quantifier_count(ax.rhs),
        )
    if isinstance(ax, ConceptAssertion):
        return boolean_count(ax.concept), quantifier_count(ax.concept)
    return (0, 0)
