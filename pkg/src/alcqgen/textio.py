"""Human-readable text codec for knowledge bases.

One axiom per line, ``#`` comments, UTF-8.  Keywords: ``subclassof``,
``and``, ``or``, ``not``, ``some``, ``only``, ``atleast N``, ``atmost N``,
``top``, ``bottom``.  ``exists``/``forall`` are accepted as aliases of
``some``/``only``.  Concept assertions are written ``(<concept>)(<ind>)``
and role assertions ``<role>(<a>, <b>)``.

Surface comparisons ``> n``, ``< n``, ``= n``, ``>= n``, ``<= n`` are
accepted on input and desugared immediately: ``> n`` to ``atleast n+1``,
``< n`` to ``atmost n-1`` and ``= n`` to the conjunction of both bounds.
The serializer always emits the canonical ``atleast``/``atmost`` spelling,
so surface hints do not survive a text round-trip (structural equality
ignores them).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ArityError, NestingLimit, ParseError
from .syntax import (
    BOTTOM,
    TOP,
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
    KnowledgeBase,
    Not,
    Or,
    RoleAssertion,
    SURFACE_EQ,
    SURFACE_GT,
    SURFACE_LT,
    Subsumption,
    Top,
    quantifier_nesting,
)

MAX_NESTING = 2
MAX_ATLEAST = 4   # surface numerals stop at 3, so > 3 gives at most AtLeast(4)
MAX_ATMOST = 3

_TOKEN_RE = re.compile(r"\s*(>=|<=|[A-Za-z_][A-Za-z0-9_]*|\d+|[().,=<>])")

_KEYWORDS = {
    "subclassof", "and", "or", "not", "top", "bottom",
    "some", "exists", "only", "forall", "atleast", "atmost",
}


@dataclass(frozen=True)
class _Token:
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        pos = 0
        while pos < len(line):
            if line[pos].isspace():
                pos += 1
                continue
            m = _TOKEN_RE.match(line, pos)
            if not m:
                raise ParseError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
            tokens.append(_Token(m.group(1), lineno, m.start(1) + 1))
            pos = m.end()
        tokens.append(_Token("\n", lineno, len(raw) + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], strict_cardinality: bool, max_nesting: int):
        self.tokens = tokens
        self.pos = 0
        self.strict = strict_cardinality
        self.max_nesting = max_nesting

    # -- token plumbing ----------------------------------------------------

    def _peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self) -> _Token:
        tok = self._peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else _Token("", 1, 1)
            raise ParseError("unexpected end of input", last.line, last.column)
        self.pos += 1
        return tok

    def _expect(self, text: str) -> _Token:
        tok = self._next()
        if tok.text != text:
            shown = "end of line" if tok.text == "\n" else repr(tok.text)
            raise ParseError(f"expected {text!r}, found {shown}", tok.line, tok.column)
        return tok

    def _name(self, what: str) -> _Token:
        tok = self._next()
        if tok.text in _KEYWORDS or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok.text):
            raise ParseError(f"expected {what} name, found {tok.text!r}", tok.line, tok.column)
        return tok

    def _number(self) -> tuple[int, _Token]:
        tok = self._next()
        if not tok.text.isdigit():
            raise ParseError(f"expected a number, found {tok.text!r}", tok.line, tok.column)
        return int(tok.text), tok

    # -- grammar -----------------------------------------------------------

    def parse_axioms(self) -> list[Axiom]:
        axioms: list[Axiom] = []
        while self._peek() is not None:
            if self._peek().text == "\n":
                self._next()
                continue
            axioms.append(self._axiom_line())
            tok = self._peek()
            if tok is not None and tok.text != "\n":
                raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.column)
        return axioms

    def _axiom_line(self) -> Axiom:
        # Role assertion: NAME ( NAME , NAME )
        tok = self._peek()
        if (
            tok.text not in _KEYWORDS
            and tok.text != "("
            and self.pos + 1 < len(self.tokens)
            and self.tokens[self.pos + 1].text == "("
        ):
            role = self._name("role")
            self._expect("(")
            subject = self._name("individual")
            self._expect(",")
            target = self._name("individual")
            self._expect(")")
            return RoleAssertion(role.text, subject.text, target.text)

        first = self._concept()
        nxt = self._peek()
        if nxt is not None and nxt.text == "subclassof":
            self._next()
            rhs = self._concept()
            return self._check(Subsumption(first, rhs), nxt)
        # Concept assertion: the concept must have been parenthesized and is
        # followed by ( individual ).
        if nxt is not None and nxt.text == "(":
            self._next()
            ind = self._name("individual")
            self._expect(")")
            return self._check(ConceptAssertion(first, ind.text), nxt)
        where = nxt if nxt is not None else tok
        raise ParseError("expected 'subclassof' or '(<individual>)'", where.line, where.column)

    def _check(self, ax: Axiom, tok: _Token) -> Axiom:
        for side in (ax.lhs, ax.rhs) if isinstance(ax, Subsumption) else (ax.concept,):
            if quantifier_nesting(side) > self.max_nesting:
                raise NestingLimit(
                    f"quantifier nesting exceeds {self.max_nesting}", tok.line, tok.column
                )
        return ax

    def _concept(self) -> Concept:
        left = self._and_expr()
        while (tok := self._peek()) is not None and tok.text == "or":
            self._next()
            left = Or(left, self._and_expr())
        return left

    def _and_expr(self) -> Concept:
        left = self._unary()
        while (tok := self._peek()) is not None and tok.text == "and":
            self._next()
            left = And(left, self._unary())
        return left

    def _unary(self) -> Concept:
        tok = self._next()
        text = tok.text
        if text == "(":
            inner = self._concept()
            self._expect(")")
            return inner
        if text == "not":
            return Not(self._unary())
        if text == "top":
            return TOP
        if text == "bottom":
            return BOTTOM
        if text in ("some", "exists"):
            role = self._name("role")
            self._expect(".")
            return Exists(role.text, self._unary())
        if text in ("only", "forall"):
            role = self._name("role")
            self._expect(".")
            return Forall(role.text, self._unary())
        if text in ("atleast", "atmost", ">", "<", ">=", "<=", "="):
            return self._restriction(text, tok)
        if text in _KEYWORDS or text == "\n" or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", text):
            shown = "end of line" if text == "\n" else repr(text)
            raise ParseError(f"expected a concept, found {shown}", tok.line, tok.column)
        return Atomic(text)

    def _restriction(self, op: str, where: _Token) -> Concept:
        n, ntok = self._number()
        role = self._name("role")
        self._expect(".")
        filler = self._unary()
        if op == "atleast" or op == ">=":
            return self._atleast(n, role.text, filler, None, ntok)
        if op == "atmost" or op == "<=":
            return self._atmost(n, role.text, filler, None, ntok)
        if op == ">":
            return self._atleast(n + 1, role.text, filler, SURFACE_GT, ntok)
        if op == "<":
            if n < 1:
                raise ArityError("'< 0' is unsatisfiable by syntax", ntok.line, ntok.column)
            return self._atmost(n - 1, role.text, filler, SURFACE_LT, ntok)
        # = n: both bounds
        return And(
            self._atleast(n, role.text, filler, SURFACE_EQ, ntok),
            self._atmost(n, role.text, filler, SURFACE_EQ, ntok),
        )

    def _atleast(self, n: int, role: str, filler: Concept, surface, tok: _Token) -> AtLeast:
        if n < 1 or (self.strict and n > MAX_ATLEAST):
            raise ArityError(f"atleast cardinality {n} out of range", tok.line, tok.column)
        return AtLeast(n, role, filler, surface)

    def _atmost(self, n: int, role: str, filler: Concept, surface, tok: _Token) -> AtMost:
        if n < 0 or (self.strict and n > MAX_ATMOST):
            raise ArityError(f"atmost cardinality {n} out of range", tok.line, tok.column)
        return AtMost(n, role, filler, surface)


def parse_axiom_lines(
    text: str, *, strict_cardinality: bool = True, max_nesting: int = MAX_NESTING
) -> list[Axiom]:
    """Parse text into a list of axioms (may be empty)."""
    return _Parser(_tokenize(text), strict_cardinality, max_nesting).parse_axioms()


def parse_kb(
    text: str,
    *,
    kb_id: str = "",
    strict_cardinality: bool = True,
    max_nesting: int = MAX_NESTING,
) -> KnowledgeBase:
    """Parse KB text.  Rules and facts may be interleaved; order is kept per kind."""
    axioms = parse_axiom_lines(text, strict_cardinality=strict_cardinality, max_nesting=max_nesting)
    if not axioms:
        raise ParseError("empty KB", 1, 1)
    rules = [ax for ax in axioms if isinstance(ax, Subsumption)]
    facts = [ax for ax in axioms if not isinstance(ax, Subsumption)]
    return KnowledgeBase(rules, facts, kb_id=kb_id)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def serialize_concept(c: Concept, *, _parenthesize: bool = False) -> str:
    if isinstance(c, Atomic):
        return c.name
    if isinstance(c, Top):
        return "top"
    if isinstance(c, Bottom):
        return "bottom"
    if isinstance(c, Not):
        return f"not {serialize_concept(c.inner, _parenthesize=True)}"
    if isinstance(c, And):
        text = (
            f"{serialize_concept(c.left, _parenthesize=True)} and "
            f"{serialize_concept(c.right, _parenthesize=True)}"
        )
    elif isinstance(c, Or):
        text = (
            f"{serialize_concept(c.left, _parenthesize=True)} or "
            f"{serialize_concept(c.right, _parenthesize=True)}"
        )
    elif isinstance(c, Exists):
        text = f"some {c.role} . {serialize_concept(c.filler, _parenthesize=True)}"
    elif isinstance(c, Forall):
        text = f"only {c.role} . {serialize_concept(c.filler, _parenthesize=True)}"
    elif isinstance(c, AtLeast):
        text = f"atleast {c.n} {c.role} . {serialize_concept(c.filler, _parenthesize=True)}"
    elif isinstance(c, AtMost):
        text = f"atmost {c.n} {c.role} . {serialize_concept(c.filler, _parenthesize=True)}"
    else:
        raise TypeError(f"not a concept: {c!r}")
    return f"({text})" if _parenthesize else text


def serialize_axiom(ax: Axiom) -> str:
    if isinstance(ax, Subsumption):
        return f"{serialize_concept(ax.lhs)} subclassof {serialize_concept(ax.rhs)}"
    if isinstance(ax, ConceptAssertion):
        return f"({serialize_concept(ax.concept)})({ax.individual})"
    return f"{ax.role}({ax.subject}, {ax.target})"


def serialize_kb(kb: KnowledgeBase) -> str:
    """Deterministic text form; parse_kb(serialize_kb(kb)) equals kb structurally."""
    lines: list[str] = []
    if kb.rules:
        lines.append("# rules")
        lines.extend(serialize_axiom(ax) for ax in kb.rules)
    if kb.facts:
        lines.append("# facts")
        lines.extend(serialize_axiom(ax) for ax in kb.facts)
    return "\n".join(lines) + "\n"
