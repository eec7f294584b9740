"""Brute-force model-enumeration oracle.

Exhaustively enumerates interpretations over domains of size 1..bound and
checks axioms semantically, sharing no code with the tableau.  It is the
anti-hallucination cross-check: whenever it is conclusive, the reasoner
must agree with it.

Verdicts are honest about conclusiveness.  A countermodel (or a model of
KB ∪ {query}) is a witness and always conclusive.  The *absence* of models
up to the bound proves entailment only when a finite-model argument
applies; the one used here is the role-free case: without roles, every
concept is a Boolean combination of atoms, constraints are pointwise, and
any model restricted to the named individuals plus one witness point is
still a model, so "no countermodel of size ≤ |individuals|+1" is decisive.
Everything else is reported as inconclusive.

Interpretations are enumerated in vectorized chunks: atom extensions and
role relations are decoded from the bits of a config index, and concepts
are evaluated as boolean arrays over (config, element).  Unique names:
individual maps are injective.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded
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
    Top,
    axiom_key,
)

DEFAULT_MAX_INTERPRETATIONS = 2 ** 22
_CHUNK_CELLS = 2 ** 19  # rows * k * k per evaluation chunk

ENTAILED = "entailed"
COUNTERMODEL = "countermodel"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class OracleVerdict:
    kind: str
    detail: str = ""

    @property
    def conclusive(self) -> bool:
        return self.kind != INCONCLUSIVE


# ---------------------------------------------------------------------------
# Interpretation enumeration
# ---------------------------------------------------------------------------

class _Enumerator:
    def __init__(self, axioms: tuple[Axiom, ...], max_interpretations: int):
        sig = Signature.of_axioms(axioms)
        self.concepts = sorted(sig.concepts)
        self.roles = sorted(sig.roles)
        self.individuals = sorted(sig.individuals)
        self.max_interpretations = max_interpretations

    def _eval(self, c: Concept, atoms: dict, rels: dict, shape: tuple[int, int]) -> np.ndarray:
        if isinstance(c, Atomic):
            return atoms[c.name]
        if isinstance(c, Top):
            return np.ones(shape, dtype=bool)
        if isinstance(c, Bottom):
            return np.zeros(shape, dtype=bool)
        if isinstance(c, Not):
            return ~self._eval(c.inner, atoms, rels, shape)
        if isinstance(c, And):
            return self._eval(c.left, atoms, rels, shape) & self._eval(c.right, atoms, rels, shape)
        if isinstance(c, Or):
            return self._eval(c.left, atoms, rels, shape) | self._eval(c.right, atoms, rels, shape)
        filler = self._eval(c.filler, atoms, rels, shape)[:, None, :]
        rel = rels[c.role]
        if isinstance(c, Exists):
            return (rel & filler).any(-1)
        if isinstance(c, Forall):
            return ~((rel & ~filler).any(-1))
        count = (rel & filler).sum(-1)
        if isinstance(c, AtLeast):
            return count >= c.n
        return count <= c.n

    def _axiom_sat(self, ax: Axiom, atoms, rels, ind_pos, shape) -> np.ndarray:
        if isinstance(ax, Subsumption):
            lhs = self._eval(ax.lhs, atoms, rels, shape)
            rhs = self._eval(ax.rhs, atoms, rels, shape)
            return (~lhs | rhs).all(-1)
        if isinstance(ax, ConceptAssertion):
            return self._eval(ax.concept, atoms, rels, shape)[:, ind_pos[ax.individual]]
        return rels[ax.role][:, ind_pos[ax.subject], ind_pos[ax.target]]

    def find_model(
        self, satisfy: tuple[Axiom, ...], falsify: Axiom | None, domain_bound: int
    ) -> str | None:
        """A model of ``satisfy`` violating ``falsify``, as a summary string."""
        n_ind = len(self.individuals)
        for k in range(max(1, n_ind), domain_bound + 1):
            bits = k * k * len(self.roles) + k * len(self.concepts)
            if 2 ** bits > self.max_interpretations:
                raise BudgetExceeded(
                    f"{2 ** bits} interpretations of size {k} exceed the "
                    f"budget of {self.max_interpretations}"
                )
            rows = max(1, min(2 ** bits, _CHUNK_CELLS // max(1, k * k)))
            for ind_map in itertools.permutations(range(k), n_ind):
                ind_pos = dict(zip(self.individuals, ind_map))
                for start in range(0, 2 ** bits, rows):
                    stop = min(start + rows, 2 ** bits)
                    configs = np.arange(start, stop, dtype=np.int64)
                    shape = (len(configs), k)
                    atoms: dict[str, np.ndarray] = {}
                    rels: dict[str, np.ndarray] = {}
                    bit = 0
                    for name in self.concepts:
                        cols = [(configs >> (bit + i)) & 1 for i in range(k)]
                        atoms[name] = np.stack(cols, axis=1).astype(bool)
                        bit += k
                    for name in self.roles:
                        cells = [(configs >> (bit + i)) & 1 for i in range(k * k)]
                        rels[name] = (
                            np.stack(cells, axis=1).astype(bool).reshape(len(configs), k, k)
                        )
                        bit += k * k
                    ok = np.ones(len(configs), dtype=bool)
                    for ax in satisfy:
                        ok &= self._axiom_sat(ax, atoms, rels, ind_pos, shape)
                        if not ok.any():
                            break
                    if falsify is not None and ok.any():
                        ok &= ~self._axiom_sat(falsify, atoms, rels, ind_pos, shape)
                    hits = np.flatnonzero(ok)
                    if hits.size:
                        row = int(hits[0])
                        return self._summary(row, atoms, rels, ind_pos, k)
        return None

    def _summary(self, row: int, atoms, rels, ind_pos, k: int) -> str:
        parts = [f"domain={list(range(k))}"]
        if ind_pos:
            parts.append("ind=" + ",".join(f"{n}->{i}" for n, i in sorted(ind_pos.items())))
        for name in self.concepts:
            ext = sorted(int(i) for i in np.flatnonzero(atoms[name][row]))
            parts.append(f"{name}={ext}")
        for name in self.roles:
            pairs = sorted(
                (int(i), int(j))
                for i in range(k)
                for j in range(k)
                if rels[name][row, i, j]
            )
            parts.append(f"{name}={pairs}")
        return "; ".join(parts)


# ---------------------------------------------------------------------------
# Public checks
# ---------------------------------------------------------------------------

def _role_free(axioms) -> bool:
    return not Signature.of_axioms(axioms).roles


def _exhaustive_bound(axioms, needs_witness: bool) -> int | None:
    """Domain size that decides satisfiability, when one is provable."""
    if not _role_free(axioms):
        return None
    n_ind = len(Signature.of_axioms(axioms).individuals)
    return max(1, n_ind + (1 if needs_witness else 0))


def oracle_check(
    kb: KnowledgeBase,
    ax: Axiom,
    domain_bound: int = 3,
    *,
    max_interpretations: int = DEFAULT_MAX_INTERPRETATIONS,
) -> OracleVerdict:
    """Entailment verdict by exhaustive enumeration up to the domain bound."""
    if isinstance(ax, RoleAssertion):
        key = axiom_key(ax)
        if any(axiom_key(f) == key for f in kb.facts):
            return OracleVerdict(ENTAILED, "asserted")
    axioms = kb.axioms + (ax,)
    search = _Enumerator(axioms, max_interpretations)
    model = search.find_model(kb.axioms, ax, domain_bound)
    if model is not None:
        return OracleVerdict(COUNTERMODEL, model)
    bound = _exhaustive_bound(axioms, needs_witness=isinstance(ax, Subsumption))
    if bound is not None and domain_bound >= bound:
        return OracleVerdict(ENTAILED, f"exhausted all interpretations up to size {bound}")
    return OracleVerdict(INCONCLUSIVE, f"no countermodel up to size {domain_bound}")


def oracle_satisfiable(
    axioms,
    domain_bound: int = 3,
    *,
    max_interpretations: int = DEFAULT_MAX_INTERPRETATIONS,
) -> OracleVerdict:
    """Satisfiability verdict for a set of axioms.

    ENTAILED here means "a model exists" (with its summary as detail);
    COUNTERMODEL means "provably unsatisfiable".
    """
    axioms = tuple(axioms)
    search = _Enumerator(axioms, max_interpretations)
    model = search.find_model(axioms, None, domain_bound)
    if model is not None:
        return OracleVerdict(ENTAILED, model)
    bound = _exhaustive_bound(axioms, needs_witness=False)
    if bound is not None and domain_bound >= bound:
        return OracleVerdict(COUNTERMODEL, f"no model up to decisive size {bound}")
    return OracleVerdict(INCONCLUSIVE, f"no model up to size {domain_bound}")


def oracle_answer(
    kb: KnowledgeBase,
    ax: Axiom,
    domain_bound: int = 3,
    *,
    max_interpretations: int = DEFAULT_MAX_INTERPRETATIONS,
) -> frozenset[Answer]:
    """The set of three-valued answers compatible with the enumeration.

    A singleton is a conclusive verdict.  Witnesses narrow the set from
    both sides: a countermodel rules out TRUE, a model of KB ∪ {query}
    rules out FALSE; the role-free bound argument closes the rest.
    """
    possible = {Answer.TRUE, Answer.FALSE, Answer.UNKNOWN}
    entail = oracle_check(kb, ax, domain_bound, max_interpretations=max_interpretations)
    if entail.kind == ENTAILED:
        return frozenset({Answer.TRUE})
    if entail.kind == COUNTERMODEL:
        possible.discard(Answer.TRUE)

    together = oracle_satisfiable(
        kb.axioms + (ax,), domain_bound, max_interpretations=max_interpretations
    )
    if together.kind == COUNTERMODEL:  # provably inconsistent together
        return frozenset({Answer.FALSE})
    if together.kind == ENTAILED:  # a model exists
        possible.discard(Answer.FALSE)
    return frozenset(possible)


def concepts_equivalent(
    c1: Concept,
    c2: Concept,
    domain_bound: int = 3,
    *,
    max_interpretations: int = DEFAULT_MAX_INTERPRETATIONS,
) -> bool:
    """Extensional equality of two concepts over all interpretations up to
    the bound.  Used by tests as an independent check of rewrites."""
    left = Subsumption(c1, c2)
    right = Subsumption(c2, c1)
    search = _Enumerator((left, right), max_interpretations)
    for falsify in (left, right):
        if search.find_model((), falsify, domain_bound) is not None:
            return False
    return True
