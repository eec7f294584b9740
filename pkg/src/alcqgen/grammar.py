"""Probabilistic grammar loading, validation and probability overrides.

One grammar file per linguistic-complexity level ships with the package
(``grammars/l0.yaml`` .. ``l3.yaml``).  A production head maps to weighted
alternatives whose bodies mix nonterminals with literal terminals; the
lexical heads ConceptName/RoleName/IndividualName are supplied by the
active vocabulary at sampling time.

Probability overrides are addressed as ``Head.alternative`` (for example
``Restriction.forall=0.7``): the named alternative takes the given
probability and its siblings are rescaled proportionally.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from importlib import resources

import yaml

from .errors import AlcqError

_PROB_TOLERANCE = 1e-9
LEXICAL_HEADS = frozenset({"ConceptName", "RoleName", "IndividualName"})


@dataclass(frozen=True)
class Alternative:
    name: str
    body: tuple[str, ...]
    prob: float


@dataclass(frozen=True)
class Grammar:
    level: int
    start_fact: str
    start_rule: str
    productions: dict[str, tuple[Alternative, ...]]

    def __post_init__(self):
        for head, alts in self.productions.items():
            total = sum(a.prob for a in alts)
            if abs(total - 1.0) > _PROB_TOLERANCE:
                raise AlcqError(f"probabilities for {head} sum to {total}, not 1")
            names = [a.name for a in alts]
            if len(set(names)) != len(names):
                raise AlcqError(f"duplicate alternative names under {head}")

    def alternatives(self, head: str) -> tuple[Alternative, ...]:
        try:
            return self.productions[head]
        except KeyError:
            raise AlcqError(f"grammar level {self.level} has no head {head!r}") from None

    def pick(self, head: str, rng: random.Random) -> Alternative:
        alts = self.alternatives(head)
        if len(alts) == 1:
            return alts[0]
        roll = rng.random()
        acc = 0.0
        for alt in alts:
            acc += alt.prob
            if roll < acc:
                return alt
        return alts[-1]

    def with_overrides(self, overrides: dict[str, float]) -> "Grammar":
        """Reweight named alternatives, rescaling their siblings."""
        if not overrides:
            return self
        by_head: dict[str, dict[str, float]] = {}
        for key, prob in overrides.items():
            head, _, alt = key.partition(".")
            if not alt:
                raise AlcqError(f"override key {key!r} is not of the form Head.alternative")
            if not 0.0 <= prob <= 1.0:
                raise AlcqError(f"override probability {prob} for {key!r} out of [0, 1]")
            by_head.setdefault(head, {})[alt] = prob
        productions = dict(self.productions)
        for head, wanted in by_head.items():
            alts = self.alternatives(head)
            names = {a.name for a in alts}
            for alt in wanted:
                if alt not in names:
                    raise AlcqError(f"no alternative {head}.{alt} to override")
            pinned = sum(wanted.values())
            if pinned > 1.0 + _PROB_TOLERANCE:
                raise AlcqError(f"overrides for {head} exceed probability 1")
            rest = sum(a.prob for a in alts if a.name not in wanted)
            scale = (1.0 - pinned) / rest if rest > 0 else 0.0
            rebuilt = []
            for a in alts:
                prob = wanted.get(a.name, a.prob * scale)
                rebuilt.append(Alternative(a.name, a.body, prob))
            drift = 1.0 - sum(a.prob for a in rebuilt)
            if abs(drift) > _PROB_TOLERANCE:  # absorb float dust deterministically
                last = rebuilt[-1]
                rebuilt[-1] = Alternative(last.name, last.body, last.prob + drift)
            productions[head] = tuple(rebuilt)
        return Grammar(self.level, self.start_fact, self.start_rule, productions)


def _from_mapping(data: dict) -> Grammar:
    productions = {}
    for head, alts in data["productions"].items():
        productions[head] = tuple(
            Alternative(a["name"], tuple(str(s) for s in a["body"]), float(a["prob"]))
            for a in alts
        )
    start = data.get("start", {})
    return Grammar(
        level=int(data["level"]),
        start_fact=start.get("fact", "ABoxAssertion"),
        start_rule=start.get("rule", "TBoxAxiom"),
        productions=productions,
    )


def load_grammar(level: int, overrides: dict[str, float] | None = None) -> Grammar:
    """Load the packaged grammar for a level, with optional overrides."""
    if level not in (0, 1, 2, 3):
        raise AlcqError(f"no grammar for level {level}")
    text = resources.files("alcqgen.grammars").joinpath(f"l{level}.yaml").read_text("utf-8")
    grammar = _from_mapping(yaml.safe_load(text))
    return grammar.with_overrides(overrides or {})


def parse_override_args(pairs) -> dict[str, float]:
    """Parse ``Head.alt=prob`` strings (CLI style) into an override map."""
    overrides: dict[str, float] = {}
    for pair in pairs or ():
        key, _, value = str(pair).partition("=")
        if not value:
            raise AlcqError(f"override {pair!r} is not of the form Head.alt=prob")
        overrides[key.strip()] = float(value)
    return overrides
