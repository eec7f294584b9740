"""Finite model views extracted from completed tableau graphs.

A completed, clash-free completion graph yields a model: the alive nodes
are the elements, atoms hold exactly where the labels say, and blocked
nodes borrow their blocker's successors (the finite stand-in for the
unravelled infinite tree — equivalent for evaluating any finite concept).

Model views make non-derivation checks nearly free: a banked model that
satisfies a subset while refuting a query is a witness that the subset
does not derive it, so no tableau search is needed.  Evaluation is
independent of the tableau's internals; every extracted view is verified
against the axioms that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import (
    And,
    AtLeast,
    AtMost,
    Atomic,
    Axiom,
    Bottom,
    Concept,
    ConceptAssertion,
    Exists,
    Forall,
    Not,
    Or,
    RoleAssertion,
    Subsumption,
    Top,
    axiom_key,
)


@dataclass(frozen=True)
class ModelView:
    atoms: tuple[frozenset[str], ...]                 # atom names per element
    successors: dict[str, tuple[tuple[int, ...], ...]]  # role -> per-element successors
    roots: dict[str, int]                             # individual name -> element

    @property
    def size(self) -> int:
        return len(self.atoms)

    def succ(self, x: int, role: str) -> tuple[int, ...]:
        table = self.successors.get(role)
        return table[x] if table is not None else ()


def eval_concept(m: ModelView, c: Concept, x: int) -> bool:
    if isinstance(c, Atomic):
        return c.name in m.atoms[x]
    if isinstance(c, Top):
        return True
    if isinstance(c, Bottom):
        return False
    if isinstance(c, Not):
        return not eval_concept(m, c.inner, x)
    if isinstance(c, And):
        return eval_concept(m, c.left, x) and eval_concept(m, c.right, x)
    if isinstance(c, Or):
        return eval_concept(m, c.left, x) or eval_concept(m, c.right, x)
    if isinstance(c, Exists):
        return any(eval_concept(m, c.filler, y) for y in m.succ(x, c.role))
    if isinstance(c, Forall):
        return all(eval_concept(m, c.filler, y) for y in m.succ(x, c.role))
    count = sum(1 for y in m.succ(x, c.role) if eval_concept(m, c.filler, y))
    if isinstance(c, AtLeast):
        return count >= c.n
    if isinstance(c, AtMost):
        return count <= c.n
    raise TypeError(f"not a concept: {c!r}")


def eval_axiom(m: ModelView, ax: Axiom) -> bool | None:
    """Truth of an axiom in the view; None when it mentions individuals the
    model does not interpret (the view then decides nothing about it)."""
    if isinstance(ax, Subsumption):
        return all(
            eval_concept(m, ax.rhs, x)
            for x in range(m.size)
            if eval_concept(m, ax.lhs, x)
        )
    if isinstance(ax, ConceptAssertion):
        x = m.roots.get(ax.individual)
        if x is None:
            return None
        return eval_concept(m, ax.concept, x)
    x = m.roots.get(ax.subject)
    y = m.roots.get(ax.target)
    if x is None or y is None:
        return None
    return y in m.succ(x, ax.role)


def satisfies_all(m: ModelView, axioms) -> bool:
    return all(eval_axiom(m, ax) is True for ax in axioms)


class ModelBank:
    """Models collected while checking one KB, reused as witnesses.

    Axiom truth per model is memoized by structural key, so scanning the
    bank against an axiom subset costs dictionary lookups, not evaluation.
    """

    def __init__(self, limit: int = 128):
        self.entries: list[tuple[ModelView, dict]] = []
        self.limit = limit

    def __len__(self) -> int:
        return len(self.entries)

    def add(self, m: ModelView | None) -> None:
        if m is not None and len(self.entries) < self.limit:
            self.entries.append((m, {}))

    @staticmethod
    def _truth(entry: tuple[ModelView, dict], ax: Axiom) -> bool | None:
        m, cache = entry
        key = axiom_key(ax)
        hit = cache.get(key, _MISS)
        if hit is _MISS:
            hit = eval_axiom(m, ax)
            cache[key] = hit
        return hit

    def _satisfying(self, axioms):
        for entry in self.entries:
            if all(self._truth(entry, ax) is True for ax in axioms):
                yield entry

    def has_model_of(self, axioms) -> bool:
        return next(self._satisfying(axioms), None) is not None

    def some_element_satisfies(self, axioms, concept: Concept) -> bool:
        """Some banked model of the axioms has an element in the concept
        (witnesses concept satisfiability w.r.t. the axioms)."""
        for entry in self._satisfying(axioms):
            m = entry[0]
            if any(eval_concept(m, concept, x) for x in range(m.size)):
                return True
        return False

    def refutes_entailment(self, axioms, query: Axiom) -> bool:
        """Some banked model satisfies the axioms but not the query."""
        return any(
            self._truth(entry, query) is False for entry in self._satisfying(axioms)
        )

    def shows_consistent(self, axioms, extra: Axiom) -> bool:
        """Some banked model satisfies the axioms and the extra axiom."""
        return any(
            self._truth(entry, extra) is True for entry in self._satisfying(axioms)
        )


_MISS = object()
