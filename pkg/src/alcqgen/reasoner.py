"""Tableau reasoner for ALCQ knowledge bases.

Decides KB consistency, entailment and three-valued answers under the
open-world assumption with unique names (distinct individual names denote
distinct elements; required for the intended semantics of counting
queries such as "likes more than two people").

Algorithm: a completion-graph tableau with
  * internalized subsumptions — every rule C ⊑ D contributes the disjunct
    ¬C ⊔ D to the label of every node;
  * the ⊓/⊔/∃/∀/≥ rules, the ≤ rule with merging, and the choose rule for
    qualified number restrictions;
  * pairwise blocking for termination;
  * semantic ⊔-branching (the right branch also asserts the complement of
    the left disjunct) and unit propagation over disjunctions.

Concepts are interned to integers once, so the search loops work on small
sets of ints.  Every public check is memoized per process; the cache is
keyed by the NNF-structural identity of the axioms involved.
"""

from __future__ import annotations

import itertools

from .errors import AlcqError, InconsistentKB, ResourceLimit
from .model import ModelView, eval_axiom
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
    Subsumption,
    Top,
    axiom_key,
)

DEFAULT_NODE_BUDGET = 100_000

# Interned concept kinds.
_ATOM, _NATOM, _TOP, _BOT, _AND, _OR, _SOME, _ONLY, _MIN, _MAX = range(10)


class _Interner:
    """Global concept/role interner.

    Interning normalizes: NNF, obvious boolean simplifications, ≥1 → ∃ and
    ≤0 R.C → ∀R.¬C.  A complement id is precomputed for every concept so
    clash detection and the choose rule are table lookups.
    """

    def __init__(self):
        self.kind: list[int] = []
        self.a: list[int] = []      # left child / filler / atom index
        self.b: list[int] = []      # right child / role / cardinality
        self.c: list[int] = []      # role for number restrictions
        self.comp: list[int] = []
        self.atom_names: list[str] = []
        self.role_names: list[str] = []
        self._atoms: dict[str, int] = {}
        self._roles: dict[str, int] = {}
        self._nodes: dict[tuple, int] = {}
        self.top = self._make((_TOP, 0, 0, 0))
        self.bot = self._make((_BOT, 0, 0, 0))
        self.comp[self.top] = self.bot
        self.comp[self.bot] = self.top

    def _make(self, sig: tuple) -> int:
        cid = self._nodes.get(sig)
        if cid is not None:
            return cid
        cid = len(self.kind)
        self._nodes[sig] = cid
        self.kind.append(sig[0])
        self.a.append(sig[1])
        self.b.append(sig[2])
        self.c.append(sig[3])
        self.comp.append(-1)
        return cid

    def role(self, name: str) -> int:
        rid = self._roles.get(name)
        if rid is None:
            rid = len(self.role_names)
            self._roles[name] = rid
            self.role_names.append(name)
        return rid

    def atom(self, name: str) -> int:
        aidx = self._atoms.get(name)
        if aidx is None:
            aidx = len(self.atom_names)
            self._atoms[name] = aidx
            self.atom_names.append(name)
        pos = self._make((_ATOM, aidx, 0, 0))
        if self.comp[pos] < 0:
            neg = self._make((_NATOM, aidx, 0, 0))
            self.comp[pos] = neg
            self.comp[neg] = pos
        return pos

    # -- normalized constructors -------------------------------------------

    def conj(self, x: int, y: int) -> int:
        if x == self.bot or y == self.bot:
            return self.bot
        if x == self.top:
            return y
        if y == self.top:
            return x
        if x == y:
            return x
        if self.comp[x] == y:
            return self.bot
        if x > y:
            x, y = y, x
        cid = self._make((_AND, x, y, 0))
        if self.comp[cid] == -1:
            self.comp[cid] = -2  # reserve to avoid re-entrancy surprises
            self.comp[cid] = self.disj(self.comp[x], self.comp[y])
            self.comp[self.comp[cid]] = cid
        return cid

    def disj(self, x: int, y: int) -> int:
        if x == self.top or y == self.top:
            return self.top
        if x == self.bot:
            return y
        if y == self.bot:
            return x
        if x == y:
            return x
        if self.comp[x] == y:
            return self.top
        if x > y:
            x, y = y, x
        cid = self._make((_OR, x, y, 0))
        if self.comp[cid] == -1:
            self.comp[cid] = -2
            self.comp[cid] = self.conj(self.comp[x], self.comp[y])
            self.comp[self.comp[cid]] = cid
        return cid

    def some(self, r: int, f: int) -> int:
        if f == self.bot:
            return self.bot
        cid = self._make((_SOME, f, r, 0))
        if self.comp[cid] == -1:
            self.comp[cid] = -2
            self.comp[cid] = self.only(r, self.comp[f])
            self.comp[self.comp[cid]] = cid
        return cid

    def only(self, r: int, f: int) -> int:
        if f == self.top:
            return self.top
        cid = self._make((_ONLY, f, r, 0))
        if self.comp[cid] == -1:
            self.comp[cid] = -2
            self.comp[cid] = self.some(r, self.comp[f])
            self.comp[self.comp[cid]] = cid
        return cid

    def atleast(self, n: int, r: int, f: int) -> int:
        if f == self.bot:
            return self.bot
        if n <= 0:
            return self.top
        if n == 1:
            return self.some(r, f)
        cid = self._make((_MIN, f, r, n))
        if self.comp[cid] == -1:
            self.comp[cid] = -2
            self.comp[cid] = self.atmost(n - 1, r, f)
            self.comp[self.comp[cid]] = cid
        return cid

    def atmost(self, n: int, r: int, f: int) -> int:
        if f == self.bot:
            return self.top
        if n == 0:
            return self.only(r, self.comp[f])
        cid = self._make((_MAX, f, r, n))
        if self.comp[cid] == -1:
            self.comp[cid] = -2
            self.comp[cid] = self.atleast(n + 1, r, f)
            self.comp[self.comp[cid]] = cid
        return cid

    def intern(self, concept: Concept, negated: bool = False) -> int:
        """Intern the NNF of ``concept`` (or of its negation)."""
        if isinstance(concept, Atomic):
            cid = self.atom(concept.name)
            return self.comp[cid] if negated else cid
        if isinstance(concept, Top):
            return self.bot if negated else self.top
        if isinstance(concept, Bottom):
            return self.top if negated else self.bot
        if isinstance(concept, Not):
            return self.intern(concept.inner, not negated)
        if isinstance(concept, And):
            left = self.intern(concept.left, negated)
            right = self.intern(concept.right, negated)
            return self.disj(left, right) if negated else self.conj(left, right)
        if isinstance(concept, Or):
            left = self.intern(concept.left, negated)
            right = self.intern(concept.right, negated)
            return self.conj(left, right) if negated else self.disj(left, right)
        if isinstance(concept, Exists):
            rid = self.role(concept.role)
            filler = self.intern(concept.filler, negated)
            return self.only(rid, filler) if negated else self.some(rid, filler)
        if isinstance(concept, Forall):
            rid = self.role(concept.role)
            filler = self.intern(concept.filler, negated)
            return self.some(rid, filler) if negated else self.only(rid, filler)
        if isinstance(concept, AtLeast):
            rid = self.role(concept.role)
            filler = self.intern(concept.filler)
            if negated:
                return self.atmost(concept.n - 1, rid, filler)
            return self.atleast(concept.n, rid, filler)
        if isinstance(concept, AtMost):
            rid = self.role(concept.role)
            filler = self.intern(concept.filler)
            if negated:
                return self.atleast(concept.n + 1, rid, filler)
            return self.atmost(concept.n, rid, filler)
        raise TypeError(f"not a concept: {concept!r}")


_INTERNER = _Interner()


def _role_name(rid: int) -> str:
    return _INTERNER.role_names[rid]



def _dnf(it: _Interner, cid: int, budget: int = 64) -> list[int] | None:
    """Top-level disjuncts of cid with \u2293 distributed over \u2294.

    Restriction fillers are left untouched.  Returns None if distribution
    would exceed the budget (caller falls back to plain internalization).
    """
    kind = it.kind[cid]
    if kind == _OR:
        left = _dnf(it, it.a[cid], budget)
        if left is None:
            return None
        right = _dnf(it, it.b[cid], budget - len(left))
        if right is None or len(left) + len(right) > budget:
            return None
        return left + right
    if kind == _AND:
        left = _dnf(it, it.a[cid], budget)
        right = _dnf(it, it.b[cid], budget)
        if left is None or right is None or len(left) * len(right) > budget:
            return None
        return [it.conj(p, q) for p in left for q in right]
    return [cid]


def _absorb(
    it: _Interner, rules
) -> tuple[dict[int, tuple[int, ...]], dict[int, tuple[int, ...]], tuple[int, ...]]:
    """Split rules into lazy unfoldings, edge triggers and internal GCIs.

    The LHS is put in disjunctive normal form and each disjunct becomes its
    own rule.  A disjunct with a positive atom conjunct A fires only when A
    enters a label; one whose only positive handle is an \u2203/\u2265 conjunct on
    role R fires only on nodes that have an R-edge (nodes without R-successors
    satisfy such a rule vacuously).  Whatever remains \u2014 purely negative or
    \u2200/\u2264-shaped disjuncts \u2014 is internalized into every node's label.
    Absorption is what keeps per-node branching tractable.
    """
    unfold: dict[int, list[int]] = {}
    edge_unfold: dict[int, list[int]] = {}
    internal: set[int] = set()
    for rule in rules:
        lhs = it.intern(rule.lhs)
        rhs = it.intern(rule.rhs)
        disjuncts = _dnf(it, lhs)
        if disjuncts is None:
            disjuncts = [lhs]
        for disjunct in disjuncts:
            if disjunct == it.bot:
                continue  # vacuous disjunct
            if disjunct == it.top:
                internal.add(rhs)
                continue
            conjuncts: list[int] = []
            stack = [disjunct]
            while stack:
                cid = stack.pop()
                if it.kind[cid] == _AND:
                    stack.append(it.a[cid])
                    stack.append(it.b[cid])
                else:
                    conjuncts.append(cid)
            atom = next((c for c in sorted(conjuncts) if it.kind[c] == _ATOM), None)
            if atom is not None:
                others = list(conjuncts)
                others.remove(atom)
                rest = it.top
                for c in others:
                    rest = it.conj(rest, c)
                unfold.setdefault(atom, []).append(it.disj(it.comp[rest], rhs))
                continue
            trigger = next(
                (c for c in sorted(conjuncts) if it.kind[c] in (_SOME, _MIN)), None
            )
            guarded = it.disj(it.comp[disjunct], rhs)
            if trigger is not None:
                edge_unfold.setdefault(it.b[trigger], []).append(guarded)
            else:
                internal.add(guarded)
    return (
        {atom: tuple(sorted(set(items))) for atom, items in unfold.items()},
        {rid: tuple(sorted(set(items))) for rid, items in edge_unfold.items()},
        tuple(sorted(internal)),
    )


# ---------------------------------------------------------------------------
# Completion graph with dependency-directed backjumping
# ---------------------------------------------------------------------------
#
# Every label entry, edge and distinctness mark carries the set of branch
# decision levels it was derived from.  A clash reports the union of its
# participants' dependencies, and the search jumps directly to the deepest
# decision in that set, skipping choice points that cannot repair it.  A
# clash with no dependencies refutes the whole problem at once.

_EMPTY: frozenset[int] = frozenset()


class _State:
    __slots__ = ("labels", "edges", "parent", "alive", "distinct", "n_roots")

    def __init__(self, labels, edges, parent, alive, distinct, n_roots):
        self.labels: list[dict[int, frozenset[int]]] = labels
        self.edges: list[dict[int, dict[int, frozenset[int]]]] = edges
        self.parent: list[int] = parent
        self.alive: list[bool] = alive
        self.distinct: dict[tuple[int, int], frozenset[int]] = distinct
        self.n_roots = n_roots

    def copy(self) -> "_State":
        return _State(
            [d.copy() for d in self.labels],
            [{r: ys.copy() for r, ys in d.items()} for d in self.edges],
            self.parent.copy(),
            self.alive.copy(),
            self.distinct.copy(),
            self.n_roots,
        )

    def distinct_dep(self, x: int, y: int) -> frozenset[int] | None:
        """Dependencies under which x and y denote distinct elements, or
        None if they may still be merged.  Roots are distinct by unique
        names, unconditionally."""
        if x < self.n_roots and y < self.n_roots:
            return _EMPTY
        return self.distinct.get((x, y) if x < y else (y, x))

    def mark_distinct(self, x: int, y: int, dep: frozenset[int]) -> None:
        self.distinct[(x, y) if x < y else (y, x)] = dep


class _Choice:
    """An open choice point: remaining alternatives over a saved state."""

    __slots__ = ("level", "saved", "alternatives", "base", "blame")

    def __init__(self, level, saved, alternatives, base):
        self.level: int = level
        self.saved: _State = saved
        self.alternatives: list[list[tuple]] = alternatives
        self.base: frozenset[int] = base
        self.blame: set[int] = set()


class _Tableau:
    def __init__(
        self,
        interner: _Interner,
        internal: tuple[int, ...],
        node_budget: int,
        unfold: dict[int, tuple[int, ...]] | None = None,
        edge_unfold: dict[int, tuple[int, ...]] | None = None,
    ):
        self.it = interner
        self.internal = internal
        self.unfold = unfold or {}
        self.edge_unfold = edge_unfold or {}
        self.budget = node_budget
        self.created = 0

    # -- node/label primitives ----------------------------------------------

    def _new_node(self, st: _State, parent: int) -> int:
        self.created += 1
        if self.created > self.budget:
            raise ResourceLimit(f"tableau exceeded {self.budget} nodes")
        st.labels.append({})
        st.edges.append({})
        st.parent.append(parent)
        st.alive.append(True)
        return len(st.labels) - 1

    def _add(self, st: _State, x: int, cid: int, dep: frozenset[int]) -> frozenset[int] | None:
        """Add cid to L(x) under the given dependencies.

        Returns the clash dependency set if a contradiction appears, else
        None.  The first derivation of a concept keeps its dependency set.
        On clash the label is poisoned with ⊥ so callers that drop the
        return value still leave a detectable state.
        """
        label = st.labels[x]
        if cid in label:
            return None
        it = self.it
        if cid == it.bot:
            label[it.bot] = label.get(it.bot, dep)
            return dep
        existing = label.get(it.comp[cid])
        if existing is not None:
            clash = dep | existing
            label[it.bot] = clash
            return clash
        label[cid] = dep
        if it.kind[cid] == _AND:  # eager ⊓
            return self._add(st, x, it.a[cid], dep) or self._add(st, x, it.b[cid], dep)
        for unfolded in self.unfold.get(cid, ()):  # lazy unfolding of absorbed rules
            clash = self._add(st, x, unfolded, dep)
            if clash is not None:
                return clash
        return None

    def _poison_dep(self, st: _State) -> frozenset[int] | None:
        bot = self.it.bot
        for x in range(len(st.labels)):
            if st.alive[x] and bot in st.labels[x]:
                return st.labels[x][bot]
        return None

    def _add_edge(self, st: _State, x: int, rid: int, y: int, dep: frozenset[int]) -> None:
        """Create an R-edge and fire the edge-absorbed rules on the source."""
        succs = st.edges[x].setdefault(rid, {})
        if y not in succs:
            succs[y] = dep
        for guarded in self.edge_unfold.get(rid, ()):
            self._add(st, x, guarded, dep)

    def _neighbors(self, st: _State, x: int, rid: int) -> list[int]:
        return sorted(y for y in st.edges[x].get(rid, {}) if st.alive[y])

    # -- deterministic rules ---------------------------------------------------

    def _saturate(self, st: _State, dirty: set[int] | None = None) -> frozenset[int] | None:
        """∀-propagation and ⊔ unit propagation to fixpoint.

        ``dirty`` restricts the scan to nodes whose labels or edges changed;
        propagation re-queues affected nodes until quiescent.
        """
        it = self.it
        queue = set(
            x for x in (dirty if dirty is not None else range(len(st.labels)))
            if x < len(st.labels) and st.alive[x]
        )
        while queue:
            x = min(queue)
            queue.discard(x)
            if not st.alive[x]:
                continue
            label = st.labels[x]
            before = len(label)
            for cid in sorted(label):
                kind = it.kind[cid]
                if kind == _ONLY:
                    filler = it.a[cid]
                    base = label.get(cid)
                    if base is None:
                        continue  # label mutated underneath us; requeued anyway
                    for y in self._neighbors(st, x, it.b[cid]):
                        if filler not in st.labels[y]:
                            edep = st.edges[x][it.b[cid]][y]
                            clash = self._add(st, y, filler, base | edep)
                            if clash is not None:
                                return clash
                            queue.add(y)
                elif kind == _OR:
                    a, b = it.a[cid], it.b[cid]
                    if a in label or b in label:
                        continue
                    da = label.get(it.comp[a])
                    db = label.get(it.comp[b])
                    if da is not None:
                        clash = self._add(st, x, b, label[cid] | da)
                    elif db is not None:
                        clash = self._add(st, x, a, label[cid] | db)
                    else:
                        continue
                    if clash is not None:
                        return clash
                    queue.add(x)
            if len(st.labels[x]) != before:
                queue.add(x)  # label grew during its own scan
        return self._poison_dep(st)

    # -- nondeterministic rules --------------------------------------------------

    def _find_branch(self, st: _State):
        """First applicable branching rule.

        Returns None, ("clash", deps), or (base_deps, [ops, ...]) where each
        ops list is applied to a copy of the state under base ∪ {level}.
        """
        it = self.it
        for x in range(len(st.labels)):
            if not st.alive[x]:
                continue
            label = st.labels[x]
            for cid in sorted(label):
                kind = it.kind[cid]
                if kind == _OR:
                    a, b = it.a[cid], it.b[cid]
                    if a in label or b in label:
                        continue
                    # semantic branching: the second branch refutes the first
                    return label[cid], [
                        [("add", x, a)],
                        [("add", x, it.comp[a]), ("add", x, b)],
                    ]
                if kind == _MAX:
                    filler, rid, n = it.a[cid], it.b[cid], it.c[cid]
                    neighbors = self._neighbors(st, x, rid)
                    edges = st.edges[x].get(rid, {})
                    for y in neighbors:  # choose rule
                        ylab = st.labels[y]
                        if filler not in ylab and it.comp[filler] not in ylab:
                            base = label[cid] | edges[y]
                            return base, [
                                [("add", y, filler)],
                                [("add", y, it.comp[filler])],
                            ]
                    holders = [y for y in neighbors if filler in st.labels[y]]
                    if len(holders) <= n:
                        continue
                    base = label[cid]
                    for y in holders:
                        base = base | edges[y] | st.labels[y][filler]
                    clique = self._distinct_clique(st, holders, n + 1)
                    if clique is not None:
                        return "clash", base | clique
                    merges = []
                    for y, z in itertools.combinations(holders, 2):
                        if st.distinct_dep(y, z) is None:
                            merges.append([("merge", y, z)])
                    if not merges:
                        # every pair distinct under some decisions
                        dep = base
                        for y, z in itertools.combinations(holders, 2):
                            dep = dep | (st.distinct_dep(y, z) or _EMPTY)
                        return "clash", dep
                    return base, merges
        return None

    def _distinct_clique(self, st: _State, holders, size) -> frozenset[int] | None:
        """Dependencies of some pairwise-distinct subset of the given size."""
        for group in itertools.combinations(holders, size):
            dep: frozenset[int] = _EMPTY
            ok = True
            for y, z in itertools.combinations(group, 2):
                pair = st.distinct_dep(y, z)
                if pair is None:
                    ok = False
                    break
                dep = dep | pair
            if ok:
                return dep
        return None

    def _merge(self, st: _State, y: int, z: int, base: frozenset[int]) -> frozenset[int] | None:
        """Merge y into z (roots survive).  Returns clash deps or None."""
        if y < st.n_roots:
            y, z = z, y
        pair_dep = st.distinct_dep(y, z)
        if pair_dep is not None:
            return base | pair_dep
        for cid, dep in sorted(st.labels[y].items()):
            clash = self._add(st, z, cid, dep | base)
            if clash is not None:
                return clash
        for rid, succs in st.edges[y].items():
            for s, edep in succs.items():
                self._add_edge(st, z, rid, s, edep | base)
                if st.alive[s] and st.parent[s] == y:
                    st.parent[s] = z
        for w in range(len(st.labels)):
            if not st.alive[w]:
                continue
            for rid, succs in st.edges[w].items():
                if y in succs:
                    dep = succs.pop(y) | base
                    succs[z] = succs.get(z, dep)
        rewritten = {}
        clash_dep = None
        for (a, b), dep in st.distinct.items():
            a2 = z if a == y else a
            b2 = z if b == y else b
            if a2 == b2:
                clash_dep = dep | base
                continue
            key = (a2, b2) if a2 < b2 else (b2, a2)
            rewritten[key] = rewritten.get(key, dep | base)
        st.distinct = rewritten
        st.alive[y] = False
        if clash_dep is not None:
            st.labels[z][self.it.bot] = clash_dep
            return clash_dep
        return None

    # -- generating rules and blocking ----------------------------------------

    def _blocked_nodes(self, st: _State) -> dict[int, int]:
        """Pairwise blocking: x is blocked by an earlier unblocked non-root y
        with equal label whose parent has equal label and equal connecting
        roles.  Descendants of blocked nodes are indirectly blocked (mapped
        to -1); directly blocked nodes map to their witness."""
        blocked: dict[int, int] = {}
        witnesses: list[int] = []
        for x in range(len(st.labels)):
            if not st.alive[x] or st.parent[x] < 0:
                continue
            px = st.parent[x]
            anc = px
            while anc >= 0 and anc not in blocked:
                anc = st.parent[anc]
            if anc >= 0:
                blocked[x] = -1  # indirectly blocked
                continue
            roles_x = {r for r, ys in st.edges[px].items() if x in ys}
            label_x = st.labels[x].keys()
            label_px = st.labels[px].keys()
            hit = -1
            for y in witnesses:
                py = st.parent[y]
                if (
                    label_x == st.labels[y].keys()
                    and label_px == st.labels[py].keys()
                    and roles_x == {r for r, ys in st.edges[py].items() if y in ys}
                ):
                    hit = y
                    break
            if hit >= 0:
                blocked[x] = hit
            else:
                witnesses.append(x)
        return blocked

    def _apply_generating(self, st: _State) -> set[int] | None:
        """Apply one ∃/≥ expansion; returns the touched nodes, or None."""
        it = self.it
        blocked = self._blocked_nodes(st)
        for x in range(len(st.labels)):
            if not st.alive[x] or x in blocked:
                continue
            label = st.labels[x]
            for cid in sorted(label):
                kind = it.kind[cid]
                if kind == _SOME:
                    filler, rid = it.a[cid], it.b[cid]
                    if any(filler in st.labels[y] for y in self._neighbors(st, x, rid)):
                        continue
                    dep = label[cid]
                    y = self._new_node(st, x)
                    self._add_edge(st, x, rid, y, dep)
                    self._add(st, y, filler, dep)
                    for g in self.internal:
                        self._add(st, y, g, dep)
                    return {x, y}
                if kind == _MIN:
                    filler, rid, n = it.a[cid], it.b[cid], it.c[cid]
                    holders = [y for y in self._neighbors(st, x, rid) if filler in st.labels[y]]
                    if self._distinct_clique(st, holders, n) is not None:
                        continue
                    dep = label[cid]
                    fresh = []
                    for _ in range(n):
                        y = self._new_node(st, x)
                        self._add_edge(st, x, rid, y, dep)
                        self._add(st, y, filler, dep)
                        for g in self.internal:
                            self._add(st, y, g, dep)
                        fresh.append(y)
                    for y, z in itertools.combinations(fresh, 2):
                        st.mark_distinct(y, z, dep)
                    return {x, *fresh}
        return None

    # -- search -----------------------------------------------------------------

    def _apply_ops(self, st: _State, ops, dep: frozenset[int]) -> set[int] | None:
        """Apply branch ops; returns touched nodes (None = everything)."""
        touched: set[int] = set()
        full = False
        for op in ops:
            if op[0] == "add":
                self._add(st, op[1], op[2], dep)
                touched.add(op[1])
            else:
                self._merge(st, op[1], op[2], dep)
                full = True  # merges rewrite edges across the graph
        return None if full else touched

    def satisfiable(self, st: _State) -> _State | None:
        """The completed clash-free state, or None when none exists."""
        stack: list[_Choice] = []
        dirty: set[int] | None = None  # None = scan everything
        while True:
            clash = self._saturate(st, dirty)
            dirty = set()
            if clash is None:
                branch = self._find_branch(st)
                if branch is None:
                    touched = self._apply_generating(st)
                    if touched is not None:
                        dirty = touched
                        clash = self._poison_dep(st)
                        if clash is None:
                            continue
                    else:
                        return st
                elif branch[0] == "clash":
                    clash = branch[1]
                else:
                    base, alternatives = branch
                    level = len(stack) + 1
                    choice = _Choice(level, st.copy(), alternatives[1:], base)
                    stack.append(choice)
                    dirty = self._apply_ops(st, alternatives[0], base | {level})
                    continue
            # backjump on the clash dependencies
            deps = set(clash)
            while True:
                if not deps:
                    return None  # contradiction independent of any decision
                target = max(deps)
                while stack and stack[-1].level > target:
                    stack.pop()  # decisions the clash does not depend on
                if not stack:
                    return None
                choice = stack[-1]
                choice.blame |= deps - {choice.level}
                if choice.alternatives:
                    st = choice.saved.copy()
                    ops = choice.alternatives.pop(0)
                    dirty = self._apply_ops(st, ops, choice.base | {choice.level})
                    break
                stack.pop()
                deps = set(choice.base) | choice.blame


# ---------------------------------------------------------------------------
# KB-level checks
# ---------------------------------------------------------------------------

_ANON = "__anon__"
_FRESH = "__witness__"

_sat_cache: dict = {}
_SAT_CACHE_LIMIT = 300_000


def clear_cache() -> None:
    _sat_cache.clear()


def _run_tableau(
    rules: tuple[Subsumption, ...],
    facts: tuple,
    node_budget: int,
):
    """Set up and run one completion; returns (tableau, final state or None,
    individual index)."""
    it = _INTERNER
    unfold, edge_unfold, internal = _absorb(it, rules)
    individuals: list[str] = []
    seen = set()
    for f in facts:
        names = (f.individual,) if isinstance(f, ConceptAssertion) else (f.subject, f.target)
        for name in names:
            if name not in seen:
                seen.add(name)
                individuals.append(name)
    if not individuals:
        individuals = [_ANON]  # interpretation domains are nonempty
    index = {name: i for i, name in enumerate(individuals)}

    st = _State([], [], [], [], {}, n_roots=len(individuals))
    tab = _Tableau(it, internal, node_budget, unfold, edge_unfold)
    none = frozenset()
    for _ in individuals:
        x = tab._new_node(st, -1)
        for g in internal:
            tab._add(st, x, g, none)
    for f in facts:
        if isinstance(f, ConceptAssertion):
            tab._add(st, index[f.individual], it.intern(f.concept), none)
        else:
            rid = it.role(f.role)
            tab._add_edge(st, index[f.subject], rid, index[f.target], none)
    if tab._poison_dep(st) is not None:
        return tab, None, index
    return tab, tab.satisfiable(st), index


def _satisfiable_raw(
    rules: tuple[Subsumption, ...],
    facts: tuple,
    node_budget: int,
) -> bool:
    return _run_tableau(rules, facts, node_budget)[1] is not None


def _extract_model(tab: _Tableau, st: _State, index: dict[str, int]) -> "ModelView":
    it = tab.it
    blocked = tab._blocked_nodes(st)
    kept = [
        x for x in range(len(st.labels))
        if st.alive[x] and blocked.get(x, 0) != -1
    ]
    renumber = {old: new for new, old in enumerate(kept)}
    atoms = []
    for x in kept:
        atoms.append(
            frozenset(
                it.atom_names[it.a[cid]]
                for cid in st.labels[x]
                if it.kind[cid] == _ATOM
            )
        )
    successors: dict[str, list[tuple[int, ...]]] = {}
    for x in kept:
        source = blocked.get(x, x)  # directly blocked nodes borrow the blocker's tree
        for rid, succs in st.edges[source].items():
            role = it.role_names[rid]
            table = successors.setdefault(role, [() for _ in kept])
            table[renumber[x]] = tuple(
                sorted(renumber[y] for y in succs if st.alive[y] and y in renumber)
            )
    roots = {name: renumber[node] for name, node in index.items()}
    return ModelView(
        atoms=tuple(atoms),
        successors={role: tuple(table) for role, table in successors.items()},
        roots=roots,
    )


def find_completion(rules, facts, node_budget: int = DEFAULT_NODE_BUDGET) -> "ModelView" | None:
    """A verified model of the axioms, or None if they are unsatisfiable.

    Every extraction is checked against its defining axioms; a failure
    means a reasoner bug and raises rather than returning a bogus witness.
    """
    rules = tuple(rules)
    facts = tuple(facts)
    tab, st, index = _run_tableau(rules, facts, node_budget)
    if st is None:
        return None
    view = _extract_model(tab, st, index)
    for ax in rules + facts:
        if eval_axiom(view, ax) is not True:
            raise AlcqError(
                f"model extraction failed verification on {ax!r}; "
                "this is a reasoner bug"
            )
    return view


def _satisfiable(rules, facts, node_budget: int = DEFAULT_NODE_BUDGET) -> bool:
    key = (frozenset(axiom_key(r) for r in rules), frozenset(axiom_key(f) for f in facts))
    hit = _sat_cache.get(key)
    if hit is not None:
        return hit
    result = _satisfiable_raw(tuple(rules), tuple(facts), node_budget)
    if len(_sat_cache) < _SAT_CACHE_LIMIT:
        _sat_cache[key] = result
    return result


def is_consistent(kb: KnowledgeBase, *, node_budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """True iff the KB has a model (with unique names)."""
    return _satisfiable(kb.rules, kb.facts, node_budget)


def _entailed(rules, facts, ax: Axiom, node_budget: int) -> bool:
    if isinstance(ax, ConceptAssertion):
        extra = ConceptAssertion(Not(ax.concept), ax.individual)
        return not _satisfiable(rules, tuple(facts) + (extra,), node_budget)
    if isinstance(ax, Subsumption):
        witness = ConceptAssertion(And(ax.lhs, Not(ax.rhs)), _FRESH)
        return not _satisfiable(rules, tuple(facts) + (witness,), node_budget)
    # Role assertions: ALCQ derives no role atoms between named individuals,
    # so entailment is membership.
    key = axiom_key(ax)
    return any(axiom_key(f) == key for f in facts)


def entails(
    kb: KnowledgeBase,
    ax: Axiom,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
    assume_consistent: bool = False,
) -> bool:
    """True iff every model of the KB satisfies the axiom."""
    if not assume_consistent and not is_consistent(kb, node_budget=node_budget):
        raise InconsistentKB("entailment is undefined for an inconsistent KB")
    return _entailed(kb.rules, kb.facts, ax, node_budget)


def _consistent_with(rules, facts, ax: Axiom, node_budget: int) -> bool:
    if isinstance(ax, Subsumption):
        return _satisfiable(tuple(rules) + (ax,), facts, node_budget)
    return _satisfiable(rules, tuple(facts) + (ax,), node_budget)


def answer(
    kb: KnowledgeBase,
    ax: Axiom,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
    assume_consistent: bool = False,
) -> Answer:
    """Three-valued verdict: TRUE if entailed, FALSE if the axiom contradicts
    the KB, UNKNOWN otherwise (open world)."""
    if not assume_consistent and not is_consistent(kb, node_budget=node_budget):
        raise InconsistentKB("answers are undefined for an inconsistent KB")
    if _entailed(kb.rules, kb.facts, ax, node_budget):
        return Answer.TRUE
    if not _consistent_with(kb.rules, kb.facts, ax, node_budget):
        return Answer.FALSE
    return Answer.UNKNOWN
