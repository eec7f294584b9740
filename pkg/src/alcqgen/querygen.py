"""Query construction: one true, one false and one unknown per depth.

True queries are drawn uniformly from the inferred closure at the target
depth.  False queries take one of two routes chosen uniformly: negating a
true concept assertion, or injecting an axiom that contradicts the KB (the
negation of a true assertion, or a rule C ⊑ ¬D flipped from a true C ⊑ D).
Unknown queries are random grammar statements over the full pool kept only
when the reasoner cannot decide them.  Every emitted label is re-verified
by the reasoner before the query is accepted.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import ExhaustedAttempts, NoCandidateAtDepth, SlotUnfillable, UnsupportedNegation
from .justify import Consequence, inferred_consequences, justification_size_bounded
from .model import ModelBank
from .reasoner import DEFAULT_NODE_BUDGET, answer
from .sampler import AxiomSampler
from .syntax import (
    Answer,
    Axiom,
    ConceptAssertion,
    KnowledgeBase,
    Subsumption,
    axiom_key,
    complement,
    negate_axiom,
)

ROUTE_FROM_CLOSURE = "from_closure"
ROUTE_NEGATED_TRUE = "negated_true"
ROUTE_INJECTION = "inconsistency_injection"
ROUTE_RANDOM_UNKNOWN = "random_unknown"

_UNKNOWN_TRIES = 400


@dataclass(frozen=True)
class Query:
    axiom: Axiom
    answer: Answer
    depth: int | None                      # None for unknown answers
    justification: tuple[Axiom, ...] | None
    route: str


def make_true_query(
    kb: KnowledgeBase,
    consequences: list[Consequence],
    d: int,
    rng: random.Random,
) -> Query:
    pool = [c for c in consequences if c.depth == d]
    if not pool:
        raise NoCandidateAtDepth(f"no true consequence at depth {d}")
    pick = rng.choice(pool)
    if answer(kb, pick.axiom, assume_consistent=True) is not Answer.TRUE:
        raise NoCandidateAtDepth(f"closure entry failed re-verification at depth {d}")
    return Query(pick.axiom, Answer.TRUE, d, tuple(pick.justification), ROUTE_FROM_CLOSURE)


def make_false_query(
    kb: KnowledgeBase,
    consequences: list[Consequence],
    d: int,
    rng: random.Random,
    taken: set | None = None,
    bank: ModelBank | None = None,
) -> Query:
    """False query at exactly depth d, via negation or injection."""
    taken = taken if taken is not None else set()
    assertions = [c for c in consequences if c.depth == d and isinstance(c.axiom, ConceptAssertion)]
    rules = [c for c in consequences if c.depth == d and isinstance(c.axiom, Subsumption)]
    routes = [ROUTE_NEGATED_TRUE, ROUTE_INJECTION]
    if rng.random() < 0.5:
        routes.reverse()
    for route in routes:
        if route == ROUTE_NEGATED_TRUE:
            candidates = list(assertions)
            rng.shuffle(candidates)
            for src in candidates:
                try:
                    negated = negate_axiom(src.axiom)
                except UnsupportedNegation:
                    continue
                query = _verified_false(kb, negated, src, d, route, taken, bank)
                if query is not None:
                    return query
        else:
            candidates = list(assertions) + list(rules)
            rng.shuffle(candidates)
            for src in candidates:
                if isinstance(src.axiom, ConceptAssertion):
                    injected: Axiom = negate_axiom(src.axiom)
                else:
                    injected = Subsumption(src.axiom.lhs, complement(src.axiom.rhs))
                query = _verified_false(kb, injected, src, d, route, taken, bank)
                if query is not None:
                    return query
    raise NoCandidateAtDepth(f"no verifiable false query at depth {d}")


def _verified_false(kb, axiom, src, d, route, taken, bank=None) -> Query | None:
    if axiom_key(axiom) in taken:
        return None
    if answer(kb, axiom, assume_consistent=True) is not Answer.FALSE:
        return None
    if isinstance(axiom, ConceptAssertion) and isinstance(src.axiom, ConceptAssertion):
        # ¬C(a) is inconsistent with exactly the subsets entailing C(a), so
        # the source's minimum justification carries over unchanged.
        return Query(axiom, Answer.FALSE, d, tuple(src.justification), route)
    hit = justification_size_bounded(
        kb, axiom, Answer.FALSE, d + 1, node_budget=DEFAULT_NODE_BUDGET, bank=bank
    )
    if hit is None or hit[0] != d + 1:
        return None  # contradicts the KB at some other depth
    return Query(axiom, Answer.FALSE, d, tuple(hit[1]), route)


def make_unknown_query(
    kb: KnowledgeBase,
    sampler: AxiomSampler,
    rng: random.Random,
    taken: set | None = None,
) -> Query:
    """A statement the KB can neither prove nor refute.

    Sampled from the level grammar over the full pool, so its terms may be
    entirely unrelated to the context; that is intended.
    """
    taken = taken if taken is not None else set()
    kb_keys = kb.key()
    for _ in range(_UNKNOWN_TRIES):
        statement = sampler.statement()
        key = axiom_key(statement)
        if key in taken or key in kb_keys:
            continue
        if answer(kb, statement, assume_consistent=True) is Answer.UNKNOWN:
            return Query(statement, Answer.UNKNOWN, None, None, ROUTE_RANDOM_UNKNOWN)
    raise ExhaustedAttempts(f"no unknown statement in {_UNKNOWN_TRIES} draws")


def build_example_set(
    kb: KnowledgeBase,
    m: int,
    unknown_sampler: AxiomSampler,
    rng: random.Random,
    consequences: list[Consequence] | None = None,
    bank: ModelBank | None = None,
) -> list[Query]:
    """Exactly 3·(m+1) verified queries: true/false/unknown per depth 0..m."""
    if consequences is None:
        from .justify import CandidateBounds

        consequences = inferred_consequences(kb, 3, CandidateBounds(depth_cap=m))
    taken: set = set()
    queries: list[Query] = []

    def emit(query: Query) -> None:
        taken.add(axiom_key(query.axiom))
        queries.append(query)

    for d in range(m + 1):
        try:
            emit(make_true_query(kb, consequences, d, rng))
        except NoCandidateAtDepth as why:
            raise SlotUnfillable(d, "true", str(why)) from None
        try:
            emit(make_false_query(kb, consequences, d, rng, taken, bank))
        except NoCandidateAtDepth as why:
            raise SlotUnfillable(d, "false", str(why)) from None
        try:
            emit(make_unknown_query(kb, unknown_sampler, rng, taken))
        except ExhaustedAttempts as why:
            raise SlotUnfillable(d, "unknown", str(why)) from None
    return queries
