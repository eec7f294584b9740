"""Knowledge-base generation with the keep-only-if-fillable rule.

A KB is sampled facts-first (so rule growth has anchors), then rules whose
left-hand side must mention a concept already introduced by a fact or a
previous rule's right-hand side — the constraint that makes multi-hop
inference chains likely.  A candidate KB is kept only if it is consistent,
every atomic concept in it is satisfiable, and the query generator can
actually fill one true, one false and one unknown slot at every depth up
to the target; otherwise it is regenerated, up to ``max_retries``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import (
    DuplicateAxiom,
    ExhaustedAttempts,
    GenerationFailed,
    IllegalLevelPair,
    LevelOverflow,
    SlotUnfillable,
)
from .grammar import Grammar, load_grammar
from .justify import CandidateBounds, Consequence, inferred_consequences
from .model import ModelBank
from .pools import Pool
from .reasoner import clear_cache, find_completion, is_consistent, _satisfiable
from .sampler import AxiomSampler, Vocabulary
from .syntax import (
    Atomic,
    Axiom,
    ConceptAssertion,
    Fact,
    KnowledgeBase,
    RoleAssertion,
    Subsumption,
    atomic_names,
    axiom_key,
    axiom_level,
    linguistic_level,
)

# Rule/fact count ranges per target depth.  The published table covers
# depths {0,1,2,3,5}; depth 4 reuses the depth-5 ranges.
DEPTH_SIZE_RANGES: dict[int, tuple[tuple[int, int], tuple[int, int]]] = {
    0: ((3, 8), (1, 5)),
    1: ((3, 8), (2, 6)),
    2: ((3, 8), (3, 8)),
    3: ((4, 8), (5, 10)),
    4: ((6, 14), (6, 12)),
    5: ((6, 14), (6, 12)),
}


@dataclass
class GenConfig:
    """Parameters for generating one KB (and its query set)."""

    target_depth: int = 0
    level: int = 0
    rule_range: tuple[int, int] | None = None
    fact_range: tuple[int, int] | None = None
    seed: int = 0
    probability_overrides: dict[str, float] = field(default_factory=dict)
    max_retries: int = 500
    subvocab_concepts: tuple[int, int] = (3, 6)
    subvocab_roles: tuple[int, int] = (1, 3)
    subvocab_individuals: tuple[int, int] = (2, 4)
    chain_bias: float = 0.55  # probability of anchoring a rule LHS exactly on a prior concept

    def __post_init__(self):
        if not 0 <= self.target_depth <= 5:
            raise ValueError(f"target depth {self.target_depth} out of 0..5")
        if not 0 <= self.level <= 3:
            raise ValueError(f"level {self.level} out of 0..3")
        rules, facts = DEPTH_SIZE_RANGES[self.target_depth]
        if self.rule_range is None:
            self.rule_range = rules
        if self.fact_range is None:
            self.fact_range = facts


@dataclass
class GeneratedExample:
    kb: KnowledgeBase
    consequences: list[Consequence]
    queries: list  # list[Query]; typed loosely to avoid an import cycle
    attempts: int


# ---------------------------------------------------------------------------
# Anchored axiom sampling
# ---------------------------------------------------------------------------

def _anchor_state(rules, facts):
    concepts = []
    atoms: set[str] = set()
    for f in facts:
        if isinstance(f, ConceptAssertion):
            concepts.append(f.concept)
            atoms |= atomic_names(f.concept)
    for r in rules:
        concepts.append(r.rhs)
        atoms |= atomic_names(r.rhs)
    return concepts, atoms


def sample_axiom(
    grammar: Grammar,
    rng: random.Random,
    kb_so_far: KnowledgeBase,
    *,
    vocab: Vocabulary | None = None,
    pool: Pool | None = None,
    chain_bias: float = 0.55,
    max_tries: int = 300,
) -> Axiom:
    """One new axiom respecting the growth constraint against kb_so_far.

    Facts come first: with no facts yet, a fact is sampled.  Otherwise a
    rule or fact is drawn, and rule LHSs must mention (or exactly be) a
    concept already in a fact or a prior RHS; special axioms with a ⊤ or
    ∃R.⊤ LHS carry no concept names and are exempt.
    """
    if vocab is None:
        if pool is None:
            raise ValueError("sample_axiom needs a vocabulary or a pool")
        vocab = Vocabulary.full(pool)
    sampler = AxiomSampler(grammar, vocab, rng)
    if not kb_so_far.facts or rng.random() < 0.5:
        # facts never violate the growth constraint
        for _ in range(max_tries):
            fact = sampler.fact()
            if axiom_key(fact) not in kb_so_far.key():
                return fact
        raise ExhaustedAttempts("could not sample a fresh fact")
    return _sample_rule(sampler, rng, kb_so_far.rules, kb_so_far.facts,
                        grammar.level, chain_bias, max_tries)


def _sample_rule(
    sampler: AxiomSampler,
    rng: random.Random,
    rules,
    facts,
    kb_level: int,
    chain_bias: float,
    max_tries: int,
) -> Subsumption:
    anchors, anchor_atoms = _anchor_state(rules, facts)
    existing = {axiom_key(a) for a in rules} | {axiom_key(a) for a in facts}
    for _ in range(max_tries):
        rule = sampler.rule()
        try:
            axiom_level(rule, kb_level)
        except (IllegalLevelPair, LevelOverflow):
            continue
        lhs_atoms = atomic_names(rule.lhs)
        if anchors and lhs_atoms and rng.random() < chain_bias:
            # chain hard: replace the LHS with a previously introduced concept
            lhs_level = linguistic_level(rule.lhs)
            fits = [a for a in anchors if linguistic_level(a) == lhs_level]
            if fits:
                rule = Subsumption(rng.choice(fits), rule.rhs)
                lhs_atoms = atomic_names(rule.lhs)
        if anchor_atoms and lhs_atoms and not (lhs_atoms & anchor_atoms):
            continue  # growth constraint: LHS must touch known ground
        if axiom_key(rule) in existing:
            continue
        try:
            axiom_level(rule, kb_level)
        except (IllegalLevelPair, LevelOverflow):
            continue
        return rule
    raise ExhaustedAttempts("could not sample an anchored rule")


# ---------------------------------------------------------------------------
# Whole-KB generation
# ---------------------------------------------------------------------------

def _chain_estimate(rules, facts) -> int:
    """Rough longest-derivation estimate used to discard flat KBs early.

    Counts rule hops from fact-introduced atoms; deliberately generous
    (a heuristic pre-filter, never a correctness gate).
    """
    depth: dict[str, int] = {}
    for f in facts:
        if isinstance(f, ConceptAssertion):
            for name in atomic_names(f.concept):
                depth[name] = 0
    best = 0
    for _ in range(len(rules) + 1):
        changed = False
        for r in rules:
            lhs = atomic_names(r.lhs)
            known = [depth[a] for a in lhs if a in depth]
            if lhs and not known:
                continue
            step = 1 + (max(known) if known else 0)
            for name in atomic_names(r.rhs):
                if depth.get(name, -1) < step:
                    depth[name] = step
                    changed = True
                    best = max(best, step)
        if not changed:
            break
    return best


def _atoms_satisfiable(kb: KnowledgeBase, bank: ModelBank) -> bool:
    probe = "__probe__"
    for name in sorted(kb.signature().concepts):
        if bank.some_element_satisfies(kb.axioms, Atomic(name)):
            continue
        extra = ConceptAssertion(Atomic(name), probe)
        found = find_completion(kb.rules, kb.facts + (extra,), 100_000)
        bank.add(found)
        if found is None:
            return False
    return True


def generate_example(
    cfg: GenConfig,
    pool: Pool,
    rng: random.Random,
    grammar: Grammar | None = None,
) -> GeneratedExample:
    """Generate one kept KB together with its verified query set."""
    from .querygen import build_example_set  # local import: querygen uses kbgen types

    grammar = grammar or load_grammar(cfg.level, cfg.probability_overrides)
    m = cfg.target_depth
    diagnostics: dict = {}
    unknown_vocab = Vocabulary.full(pool)
    for attempt in range(1, cfg.max_retries + 1):
        clear_cache()
        vocab = Vocabulary.sample(
            pool, rng,
            rng.randint(*cfg.subvocab_concepts),
            rng.randint(*cfg.subvocab_roles),
            rng.randint(*cfg.subvocab_individuals),
        )
        sampler = AxiomSampler(grammar, vocab, rng)
        try:
            facts = _sample_facts(sampler, rng.randint(*cfg.fact_range))
            rules = _sample_rules(sampler, rng, facts, rng.randint(*cfg.rule_range),
                                  cfg.level, cfg.chain_bias)
        except ExhaustedAttempts:
            diagnostics["sampling"] = diagnostics.get("sampling", 0) + 1
            continue
        if m >= 2 and _chain_estimate(rules, facts) < max(1, m - 2):
            diagnostics["flat"] = diagnostics.get("flat", 0) + 1
            continue
        try:
            kb = KnowledgeBase(rules, facts)
        except DuplicateAxiom:
            continue
        bank = ModelBank()
        base_model = find_completion(kb.rules, kb.facts)
        if base_model is None:
            diagnostics["inconsistent"] = diagnostics.get("inconsistent", 0) + 1
            continue
        bank.add(base_model)
        if not _atoms_satisfiable(kb, bank):
            diagnostics["unsatisfiable-atom"] = diagnostics.get("unsatisfiable-atom", 0) + 1
            continue
        consequences = inferred_consequences(
            kb, cfg.level, CandidateBounds(depth_cap=m), bank=bank
        )
        depths = {c.depth for c in consequences}
        missing = [d for d in range(m + 1) if d not in depths]
        if missing:
            key = ("true", missing[0])
            diagnostics[key] = diagnostics.get(key, 0) + 1
            continue
        unknown_sampler = AxiomSampler(grammar, unknown_vocab, rng)
        try:
            queries = build_example_set(kb, m, unknown_sampler, rng, consequences, bank=bank)
        except SlotUnfillable as failure:
            key = (failure.answer, failure.depth)
            diagnostics[key] = diagnostics.get(key, 0) + 1
            continue
        return GeneratedExample(kb, consequences, queries, attempt)
    raise GenerationFailed(
        f"no acceptable KB after {cfg.max_retries} attempts "
        f"(depth {m}, level {cfg.level}, pool {pool.name})",
        diagnostics,
    )


def _sample_facts(sampler: AxiomSampler, count: int) -> tuple[Fact, ...]:
    facts: list[Fact] = []
    keys: set = set()
    guard = 0
    while len(facts) < count:
        guard += 1
        if guard > 60 * count:
            raise ExhaustedAttempts("fact sampling stalled")
        fact = sampler.fact()
        key = axiom_key(fact)
        if key in keys:
            continue
        keys.add(key)
        facts.append(fact)
    return tuple(facts)


def _sample_rules(
    sampler: AxiomSampler,
    rng: random.Random,
    facts,
    count: int,
    kb_level: int,
    chain_bias: float,
) -> tuple[Subsumption, ...]:
    rules: list[Subsumption] = []
    for _ in range(count):
        rule = _sample_rule(sampler, rng, tuple(rules), facts, kb_level, chain_bias, 300)
        rules.append(rule)
    return tuple(rules)


def generate_kb(
    cfg: GenConfig,
    grammar: Grammar | None = None,
    pool: Pool | None = None,
    rng: random.Random | None = None,
) -> KnowledgeBase:
    """The kept KB alone; see generate_example for the full artifact."""
    from .pools import POOL_A

    return generate_example(
        cfg, pool or POOL_A, rng or random.Random(cfg.seed), grammar
    ).kb
