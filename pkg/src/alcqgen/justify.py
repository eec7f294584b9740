"""Justifications, inference depths and the bounded inferred closure.

A justification is a minimum-cardinality subset of the KB that derives the
same true/false verdict for a query.  The search follows the classic
pinpointing recipe: a deletion pass over a syntactic locality module gives
a minimal set (an upper bound u), then an exhaustive cardinality-increasing
subset sweep from size 1 up to u returns the first hit, with ties broken
by the lexicographic order of axiom serializations.

The locality module is the standard ⊥-module: axioms outside it are
tautological once every symbol outside the module's signature is
interpreted as empty, so no justification can reach outside the module.
This keeps the exhaustive sweep affordable; the test suite re-checks
minimality and minimumness against module-free enumeration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import IllegalLevelPair, LevelOverflow, NotDerivable, ResourceLimit
from .model import ModelBank
from .reasoner import _consistent_with, _entailed, answer, find_completion, is_consistent
from .syntax import (
    And,
    Answer,
    AtLeast,
    AtMost,
    Atomic,
    Axiom,
    Bottom,
    Concept,
    ConceptAssertion,
    Exists,
    Forall,
    KnowledgeBase,
    Not,
    Or,
    RoleAssertion,
    Signature,
    Subsumption,
    TOP,
    Top,
    axiom_key,
    axiom_level,
    nnf,
    subconcepts,
)
from .textio import serialize_axiom

DEFAULT_SUBSET_BUDGET = 2_000_000


@dataclass(frozen=True)
class Justification:
    """A minimum axiom subset deriving a TRUE or FALSE answer."""

    axioms: tuple[Axiom, ...]
    for_answer: Answer

    def __len__(self) -> int:
        return len(self.axioms)


# ---------------------------------------------------------------------------
# ⊥-locality modules
# ---------------------------------------------------------------------------

_BOT, _TOP_, _OTHER = "bot", "top", "other"


def _status(c: Concept, concepts: set[str], roles: set[str]) -> str:
    """Evaluate c with out-of-signature symbols interpreted as empty."""
    if isinstance(c, Atomic):
        return _OTHER if c.name in concepts else _BOT
    if isinstance(c, Top):
        return _TOP_
    if isinstance(c, Bottom):
        return _BOT
    if isinstance(c, Not):
        inner = _status(c.inner, concepts, roles)
        if inner == _BOT:
            return _TOP_
        if inner == _TOP_:
            return _BOT
        return _OTHER
    if isinstance(c, And):
        left = _status(c.left, concepts, roles)
        right = _status(c.right, concepts, roles)
        if _BOT in (left, right):
            return _BOT
        if left == _TOP_ and right == _TOP_:
            return _TOP_
        return _OTHER
    if isinstance(c, Or):
        left = _status(c.left, concepts, roles)
        right = _status(c.right, concepts, roles)
        if _TOP_ in (left, right):
            return _TOP_
        if left == _BOT and right == _BOT:
            return _BOT
        return _OTHER
    if isinstance(c, (Exists, AtLeast)):
        if c.role not in roles:
            return _BOT
        return _BOT if _status(c.filler, concepts, roles) == _BOT else _OTHER
    if isinstance(c, Forall):
        if c.role not in roles:
            return _TOP_
        return _TOP_ if _status(c.filler, concepts, roles) == _TOP_ else _OTHER
    if isinstance(c, AtMost):
        if c.role not in roles:
            return _TOP_
        return _TOP_ if _status(c.filler, concepts, roles) == _BOT else _OTHER
    raise TypeError(f"not a concept: {c!r}")


def _is_local(ax: Axiom, concepts: set[str], roles: set[str]) -> bool:
    if isinstance(ax, Subsumption):
        return (
            _status(nnf(ax.lhs), concepts, roles) == _BOT
            or _status(nnf(ax.rhs), concepts, roles) == _TOP_
        )
    if isinstance(ax, ConceptAssertion):
        return _status(nnf(ax.concept), concepts, roles) == _TOP_
    return False  # a role assertion always constrains its role


def locality_module(axioms, seed: Signature) -> list[Axiom]:
    """The ⊥-locality module of ``axioms`` for the seed signature.

    Preserves KB order; contains every justification of any entailment
    whose signature lies within the seed.
    """
    module: list[Axiom] = []
    in_module = [False] * len(axioms)
    concepts = set(seed.concepts)
    roles = set(seed.roles)
    changed = True
    while changed:
        changed = False
        for i, ax in enumerate(axioms):
            if in_module[i] or _is_local(ax, concepts, roles):
                continue
            in_module[i] = True
            sig = Signature.of_axiom(ax)
            concepts |= sig.concepts
            roles |= sig.roles
            changed = True
    for i, ax in enumerate(axioms):
        if in_module[i]:
            module.append(ax)
    return module


# ---------------------------------------------------------------------------
# Minimum justification and depth
# ---------------------------------------------------------------------------

def _derives(
    subset: tuple[Axiom, ...],
    ax: Axiom,
    target: Answer,
    node_budget: int,
    bank: ModelBank | None = None,
) -> bool:
    """Does the subset alone derive the target answer for the axiom?

    With a model bank, non-derivation is first sought as a banked witness
    (a model of the subset refuting entailment, or one showing joint
    consistency); only unresolved cases run the tableau, whose found
    models are banked for later calls.
    """
    rules = tuple(a for a in subset if isinstance(a, Subsumption))
    facts = tuple(a for a in subset if not isinstance(a, Subsumption))
    if target is Answer.TRUE:
        if bank is None:
            return _entailed(rules, facts, ax, node_budget)
        if bank.refutes_entailment(subset, ax):
            return False
        if isinstance(ax, RoleAssertion):
            return _entailed(rules, facts, ax, node_budget)
        if isinstance(ax, ConceptAssertion):
            counter = ConceptAssertion(Not(ax.concept), ax.individual)
        else:
            counter = ConceptAssertion(And(ax.lhs, Not(ax.rhs)), "__witness__")
        found = find_completion(rules, facts + (counter,), node_budget)
        bank.add(found)
        return found is None
    # target FALSE: the subset together with the axiom must be inconsistent
    if bank is None:
        return not _consistent_with(rules, facts, ax, node_budget)
    if bank.shows_consistent(subset, ax):
        return False
    if isinstance(ax, Subsumption):
        found = find_completion(rules + (ax,), facts, node_budget)
    else:
        found = find_completion(rules, facts + (ax,), node_budget)
    bank.add(found)
    return found is None


def min_justification(
    kb: KnowledgeBase,
    ax: Axiom,
    *,
    verdict: Answer | None = None,
    subset_budget: int = DEFAULT_SUBSET_BUDGET,
    node_budget: int | None = None,
    bank: ModelBank | None = None,
) -> Justification:
    """Minimum-cardinality subset of the KB deriving the axiom's answer.

    Raises NotDerivable when the answer is UNKNOWN.  ``verdict`` may be
    passed when the caller has already computed the answer.
    """
    from .reasoner import DEFAULT_NODE_BUDGET

    budget = node_budget or DEFAULT_NODE_BUDGET
    target = verdict or answer(kb, ax)
    if target is Answer.UNKNOWN:
        raise NotDerivable("unknown answers have no justification")

    module = locality_module(kb.axioms, Signature.of_axiom(ax))
    pool = tuple(sorted(module, key=serialize_axiom))
    if not _derives(pool, ax, target, budget, bank):
        pool = tuple(sorted(kb.axioms, key=serialize_axiom))  # defensive fallback

    # Deletion pass: a minimal (not necessarily minimum) justification.
    kept = list(pool)
    for candidate in pool:
        trimmed = tuple(a for a in kept if a is not candidate)
        if _derives(trimmed, ax, target, budget, bank):
            kept = list(trimmed)
    upper = len(kept)

    spent = 0
    for size in range(0, upper + 1):  # size 0 catches tautological queries
        for subset in itertools.combinations(pool, size):
            spent += 1
            if spent > subset_budget:
                raise ResourceLimit(f"justification search exceeded {subset_budget} subsets")
            if _derives(subset, ax, target, budget, bank):
                return Justification(subset, target)
    return Justification(tuple(kept), target)  # unreachable: size==upper hits `kept`


def depth(kb: KnowledgeBase, ax: Axiom, **kwargs) -> int | None:
    """Inference depth: |minimum justification| − 1, or None for UNKNOWN.

    Direct look-ups of asserted axioms have depth 0.
    """
    verdict = answer(kb, ax)
    if verdict is Answer.UNKNOWN:
        return None
    just = min_justification(kb, ax, verdict=verdict, **kwargs)
    return len(just) - 1


def justification_size_bounded(
    kb: KnowledgeBase,
    ax: Axiom,
    target: Answer,
    max_size: int,
    *,
    node_budget: int,
    bank: ModelBank | None = None,
) -> tuple[int, tuple[Axiom, ...]] | None:
    """Exact minimum justification if its size is ≤ max_size, else None.

    The sweep ascends through cardinalities, so the first hit is exact even
    when the deletion bound is loose; no hit up to max_size proves the
    minimum exceeds it.
    """
    module = locality_module(kb.axioms, Signature.of_axiom(ax))
    pool = tuple(sorted(module, key=serialize_axiom))
    if not _derives(pool, ax, target, node_budget, bank):
        pool = tuple(sorted(kb.axioms, key=serialize_axiom))
    for size in range(1, min(max_size, len(pool)) + 1):
        for subset in itertools.combinations(pool, size):
            if _derives(subset, ax, target, node_budget, bank):
                return size, subset
    return None


# ---------------------------------------------------------------------------
# Bounded inferred closure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CandidateBounds:
    """Caps on the candidate space swept by inferred_consequences.

    The true closure of a KB is infinite; this bounds it to assertions of
    signature sub-expressions (plus existential/counting wrappers over
    atoms) and subsumptions between sub-expressions.  ``depth_cap`` drops
    consequences whose minimum justification exceeds depth_cap+1 axioms
    without computing their exact depth.
    """

    max_fact_candidates: int = 320
    max_rule_candidates: int = 80
    wrapper_cardinalities: tuple[int, ...] = (2,)
    depth_cap: int | None = None
    include_wrappers: bool = True


@dataclass(frozen=True)
class Consequence:
    axiom: Axiom
    depth: int
    justification: tuple[Axiom, ...] = field(compare=False, default=())


def _candidate_concepts(kb: KnowledgeBase, level: int, bounds: CandidateBounds) -> list[Concept]:
    sig = kb.signature()
    seen: set = set()
    ordered: list[Concept] = []

    def push(c: Concept) -> None:
        norm = nnf(c)
        if norm in seen:
            return
        seen.add(norm)
        ordered.append(norm)

    # Rule sides and fact concepts first: with capped candidate counts,
    # chain endpoints must survive ahead of speculative wrappers.
    for ax in kb.axioms:
        sides = ()
        if isinstance(ax, Subsumption):
            sides = (ax.lhs, ax.rhs)
        elif isinstance(ax, ConceptAssertion):
            sides = (ax.concept,)
        for side in sides:
            if not isinstance(side, (Top, Bottom)):
                push(side)
    for name in sorted(sig.concepts):
        push(Atomic(name))
        push(Not(Atomic(name)))
    for ax in kb.axioms:
        sides = ()
        if isinstance(ax, Subsumption):
            sides = (ax.lhs, ax.rhs)
        elif isinstance(ax, ConceptAssertion):
            sides = (ax.concept,)
        for side in sides:
            for sub in subconcepts(side):
                if not isinstance(sub, (Top, Bottom)):
                    push(sub)
    if bounds.include_wrappers:
        # Existential and counting wrappers only: universal wrappers that
        # matter occur as rule sides already, while speculative ones are
        # mostly vacuous truths that waste refutation searches.
        bases = [Atomic(name) for name in sorted(sig.concepts)]
        bases += [Not(Atomic(name)) for name in sorted(sig.concepts)]
        for role in sorted(sig.roles):
            push(Exists(role, TOP))
            for n in bounds.wrapper_cardinalities:
                push(AtLeast(n, role, TOP))
            for base in bases:
                push(Exists(role, base))
    return ordered


def inferred_consequences(
    kb: KnowledgeBase,
    level: int,
    bounds: CandidateBounds | None = None,
    *,
    node_budget: int | None = None,
    bank: ModelBank | None = None,
) -> list[Consequence]:
    """Entailed axioms from a bounded, level-capped candidate space.

    Every returned entry is reasoner-verified TRUE and carries its exact
    depth.  Deterministic order: (depth, axiom serialization).

    With a bank, a model of the whole KB is extracted once and candidates
    it refutes are skipped without touching the tableau; the tableau still
    confirms every candidate that is reported entailed.
    """
    from .reasoner import DEFAULT_NODE_BUDGET

    budget = node_budget or DEFAULT_NODE_BUDGET
    bounds = bounds or CandidateBounds()
    if bank is not None:
        if not bank.has_model_of(kb.axioms):
            base_model = find_completion(kb.rules, kb.facts, budget)
            if base_model is None:
                raise NotDerivable("inferred closure is undefined for an inconsistent KB")
            bank.add(base_model)
    elif not is_consistent(kb):
        raise NotDerivable("inferred closure is undefined for an inconsistent KB")

    sig = kb.signature()
    candidates: list[Axiom] = []
    seen: set = set()

    def push(ax: Axiom) -> bool:
        key = axiom_key(ax)
        if key in seen:
            return False
        seen.add(key)
        candidates.append(ax)
        return True

    for ax in kb.axioms:
        push(ax)
    concepts = _candidate_concepts(kb, level, bounds)
    n_facts = 0
    for ind in sorted(sig.individuals):
        if n_facts >= bounds.max_fact_candidates:
            break
        for c in concepts:
            if n_facts >= bounds.max_fact_candidates:
                break
            cand = ConceptAssertion(c, ind)
            try:
                if axiom_level(cand) > level:
                    continue
            except (LevelOverflow, IllegalLevelPair):
                continue
            if push(cand):
                n_facts += 1
    n_rules = 0
    for lhs in concepts:
        if n_rules >= bounds.max_rule_candidates:
            break
        for rhs in concepts:
            if n_rules >= bounds.max_rule_candidates:
                break
            if lhs == rhs:
                continue
            cand = Subsumption(lhs, rhs)
            try:
                if axiom_level(cand) > level:
                    continue
            except (LevelOverflow, IllegalLevelPair):
                continue
            if push(cand):
                n_rules += 1

    results: list[Consequence] = []
    rules, facts = kb.rules, kb.facts
    cap = bounds.depth_cap
    for cand in candidates:
        if isinstance(cand, RoleAssertion):
            key = axiom_key(cand)
            if any(axiom_key(f) == key for f in facts):
                results.append(Consequence(cand, 0, (cand,)))
            continue
        if bank is not None and bank.refutes_entailment(kb.axioms, cand):
            continue  # a banked model of the KB already falsifies it
        if not _derives(kb.axioms, cand, Answer.TRUE, budget, bank):
            continue
        if _derives((), cand, Answer.TRUE, budget):
            continue  # tautology: true in every KB, carries no information
        if cap is None:
            just = min_justification(
                kb, cand, verdict=Answer.TRUE, node_budget=budget, bank=bank
            )
            results.append(Consequence(cand, len(just) - 1, just.axioms))
        else:
            hit = justification_size_bounded(
                kb, cand, Answer.TRUE, cap + 1, node_budget=budget, bank=bank
            )
            if hit is not None:
                size, subset = hit
                results.append(Consequence(cand, size - 1, subset))
    results.sort(key=lambda e: (e.depth, serialize_axiom(e.axiom)))
    return results
