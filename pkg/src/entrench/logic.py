"""Ground propositional logic over predicate-style atoms.

Sentences are built from atoms of the form ``pred(arg)`` with the
connectives ``!``, ``&``, ``|``, ``->`` and ``<->``.  A restricted
universal rule ``forall x. body`` (exactly one variable) is supported as
a schema that expands into ground instances over a finite constant pool.
Entailment is refutation by DPLL over a naive CNF translation.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence, Union


class ParseError(ValueError):
    """Raised when a formula, schema or file payload fails to parse."""


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    """Ground atom ``pred(arg)``; both fields are case-insensitive."""

    pred: str
    arg: str

    def __post_init__(self) -> None:
        if not self.pred or not self.arg:
            raise ValueError("atom predicate and argument must be non-empty")


@dataclass(frozen=True)
class Var:
    """Occurrence of a schema variable in an atom argument position."""

    name: str


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


Formula = Union[Atom, Not, And, Or, Implies, Iff]


@dataclass(frozen=True)
class SchemaAtom:
    """Atom inside a schema body; ``arg`` may be the bound variable."""

    pred: str
    arg: Union[str, Var]


@dataclass(frozen=True)
class Schema:
    """Single-variable universal rule, e.g. ``forall x. p(x) -> q(x)``."""

    var: str
    body: "Formula"  # built over Atom/SchemaAtom leaves

    def __post_init__(self) -> None:
        if not _mentions_var(self.body, self.var):
            raise ValueError(f"schema body never uses variable {self.var!r}")


Sentence = Union[Formula, Schema]

_BINARY = (And, Or, Implies, Iff)


def _mentions_var(node: Formula, var: str) -> bool:
    if isinstance(node, SchemaAtom):
        return isinstance(node.arg, Var) and node.arg.name == var
    if isinstance(node, Atom):
        return False
    if isinstance(node, Not):
        return _mentions_var(node.child, var)
    return _mentions_var(node.left, var) or _mentions_var(node.right, var)


def atoms_of(formula: Formula) -> frozenset[Atom]:
    """All atoms occurring in a ground formula."""
    if isinstance(formula, Atom):
        return frozenset((formula,))
    if isinstance(formula, Not):
        return atoms_of(formula.child)
    return atoms_of(formula.left) | atoms_of(formula.right)


def constants_of(sentence: Sentence) -> frozenset[str]:
    """Constant arguments occurring in a sentence (schema vars excluded)."""
    if isinstance(sentence, Schema):
        return _schema_constants(sentence.body)
    return frozenset(a.arg for a in atoms_of(sentence))


def _schema_constants(node) -> frozenset[str]:
    if isinstance(node, (Atom, SchemaAtom)):
        return frozenset() if isinstance(node.arg, Var) else frozenset((node.arg,))
    if isinstance(node, Not):
        return _schema_constants(node.child)
    return _schema_constants(node.left) | _schema_constants(node.right)


def ground_schema(schema: Schema, constants: Iterable[str]) -> frozenset[Formula]:
    """Instantiate a schema over a finite, non-empty set of constants."""
    pool = sorted(set(constants))
    if not pool:
        raise ValueError("cannot ground a schema over an empty constant set")
    return frozenset(_substitute(schema.body, schema.var, c) for c in pool)


def _substitute(node, var: str, constant: str) -> Formula:
    if isinstance(node, SchemaAtom):
        arg = constant if (isinstance(node.arg, Var) and node.arg.name == var) else node.arg
        if isinstance(arg, Var):  # stray variable — rejected earlier, guard anyway
            raise ValueError(f"unbound variable {arg.name!r}")
        return Atom(node.pred, arg)
    if isinstance(node, Atom):
        return node
    if isinstance(node, Not):
        return Not(_substitute(node.child, var, constant))
    return type(node)(_substitute(node.left, var, constant),
                      _substitute(node.right, var, constant))


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<op><->|->|[!&|().])|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<quoted>\"(?:[^\"\\]|\\.)*\"))"
)
_IDENT_RE = re.compile(r"[a-z_][a-z0-9_]*\Z")


def _tokenize(text: str) -> list[tuple[str, str]]:
    text = text.strip()
    tokens: list[tuple[str, str]] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r} at column {pos}")
        pos = match.end()
        if match.lastgroup == "op":
            tokens.append(("op", match.group("op")))
        elif match.lastgroup == "ident":
            tokens.append(("ident", match.group("ident").lower()))
        else:
            raw = match.group("quoted")[1:-1]
            tokens.append(("quoted", raw.replace('\\"', '"').replace("\\\\", "\\")))
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str]], var: str | None = None):
        self.tokens = tokens
        self.pos = 0
        self.var = var

    def peek(self) -> tuple[str, str] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input")
        self.pos += 1
        return tok

    def expect(self, value: str) -> None:
        tok = self.take()
        if tok != ("op", value):
            raise ParseError(f"expected {value!r}, got {tok[1]!r}")

    # precedence (low to high): <->  ->  |  &  !
    def parse_iff(self):
        node = self.parse_implies()
        while self.peek() == ("op", "<->"):
            self.take()
            node = Iff(node, self.parse_implies())
        return node

    def parse_implies(self):
        node = self.parse_or()
        if self.peek() == ("op", "->"):
            self.take()
            return Implies(node, self.parse_implies())  # right-associative
        return node

    def parse_or(self):
        node = self.parse_and()
        while self.peek() == ("op", "|"):
            self.take()
            node = Or(node, self.parse_and())
        return node

    def parse_and(self):
        node = self.parse_unary()
        while self.peek() == ("op", "&"):
            self.take()
            node = And(node, self.parse_unary())
        return node

    def parse_unary(self):
        tok = self.peek()
        if tok == ("op", "!"):
            self.take()
            return Not(self.parse_unary())
        if tok == ("op", "("):
            self.take()
            node = self.parse_iff()
            self.expect(")")
            return node
        return self.parse_atom()

    def parse_atom(self):
        kind, value = self.take()
        if kind != "ident":
            raise ParseError(f"expected an atom, got {value!r}")
        if value == "forall":
            raise ParseError("'forall' is only allowed at the start of a sentence")
        self.expect("(")
        akind, arg = self.take()
        if akind == "op":
            raise ParseError(f"expected an argument, got {arg!r}")
        self.expect(")")
        if self.var is not None and akind == "ident" and arg == self.var:
            return SchemaAtom(value, Var(arg))
        return Atom(value, arg)


def parse_sentence(text: str) -> Sentence:
    """Parse a formula or a ``forall``-schema in canonical grammar."""
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty formula")
    if tokens[0] == ("ident", "forall"):
        if len(tokens) < 3 or tokens[1][0] != "ident" or tokens[2] != ("op", "."):
            raise ParseError("expected 'forall <var>. <body>'")
        var = tokens[1][1]
        parser = _Parser(tokens[3:], var=var)
        body = parser.parse_iff()
        if parser.peek() is not None:
            raise ParseError(f"trailing tokens after schema body: {parser.peek()[1]!r}")
        try:
            return Schema(var, body)
        except ValueError as exc:
            raise ParseError(str(exc)) from None
    parser = _Parser(tokens)
    node = parser.parse_iff()
    if parser.peek() is not None:
        raise ParseError(f"trailing tokens after formula: {parser.peek()[1]!r}")
    return node


def parse_formula(text: str) -> Formula:
    """Parse a ground formula; schemas are rejected."""
    sentence = parse_sentence(text)
    if isinstance(sentence, Schema):
        raise ParseError("expected a ground formula, got a schema")
    return sentence


# ---------------------------------------------------------------------------
# Rendering (canonical text; parse(render(f)) == f)
# ---------------------------------------------------------------------------

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5}


def _render_arg(arg: Union[str, Var]) -> str:
    if isinstance(arg, Var):
        return arg.name
    if _IDENT_RE.match(arg) and arg != "forall":
        return arg
    return '"' + arg.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render(sentence: Sentence) -> str:
    """Canonical text of a sentence (minimal parentheses)."""
    if isinstance(sentence, Schema):
        return f"forall {sentence.var}. {_render_node(sentence.body, 0)}"
    return _render_node(sentence, 0)


_CONNECTIVE = {And: "&", Or: "|", Implies: "->", Iff: "<->"}


def _render_node(node, parent_prec: int) -> str:
    if isinstance(node, (Atom, SchemaAtom)):
        text = f"{node.pred}({_render_arg(node.arg)})"
        return text
    if isinstance(node, Not):
        return "!" + _render_node(node.child, _PREC[Not])
    prec = _PREC[type(node)]
    # '&', '|', '<->' associate left; '->' associates right
    if isinstance(node, Implies):
        left = _render_node(node.left, prec + 1)
        right = _render_node(node.right, prec)
    else:
        left = _render_node(node.left, prec)
        right = _render_node(node.right, prec + 1)
    text = f"{left} {_CONNECTIVE[type(node)]} {right}"
    return f"({text})" if prec < parent_prec else text


# ---------------------------------------------------------------------------
# CNF + DPLL
# ---------------------------------------------------------------------------

Literal = tuple[Atom, bool]
Clause = frozenset[Literal]
ClauseSet = frozenset[Clause]

TRUE: ClauseSet = frozenset()
FALSE: ClauseSet = frozenset((frozenset(),))


def _nnf(node: Formula, positive: bool) -> Formula:
    if isinstance(node, Atom):
        return node if positive else Not(node)
    if isinstance(node, Not):
        return _nnf(node.child, not positive)
    if isinstance(node, And):
        ctor = And if positive else Or
        return ctor(_nnf(node.left, positive), _nnf(node.right, positive))
    if isinstance(node, Or):
        ctor = Or if positive else And
        return ctor(_nnf(node.left, positive), _nnf(node.right, positive))
    if isinstance(node, Implies):
        return _nnf(Or(Not(node.left), node.right), positive)
    if isinstance(node, Iff):
        both = And(Implies(node.left, node.right), Implies(node.right, node.left))
        return _nnf(both, positive)
    raise TypeError(f"not a ground formula: {node!r}")


@lru_cache(maxsize=None)
def to_clauses(formula: Formula) -> ClauseSet:
    """Naive CNF (distribution, no auxiliary variables)."""
    return _clauses_of_nnf(_nnf(formula, True))


def _clauses_of_nnf(node: Formula) -> ClauseSet:
    if isinstance(node, Atom):
        return frozenset((frozenset(((node, True),)),))
    if isinstance(node, Not):  # NNF: child is an atom
        return frozenset((frozenset(((node.child, False),)),))
    if isinstance(node, And):
        return _simplify(_clauses_of_nnf(node.left) | _clauses_of_nnf(node.right))
    # Or: distribute
    left, right = _clauses_of_nnf(node.left), _clauses_of_nnf(node.right)
    if not left or not right:  # either side already true
        return TRUE
    return _simplify(frozenset(lc | rc for lc in left for rc in right))


def _simplify(clauses: ClauseSet) -> ClauseSet:
    kept = [c for c in clauses if not any((atom, not sign) in c for atom, sign in c)]
    return frozenset(kept)


def clauses_for(formulas: Iterable[Formula]) -> ClauseSet:
    result: frozenset[Clause] = frozenset()
    for f in formulas:
        result |= to_clauses(f)
    return result


def _dpll(clauses: list[Clause]) -> bool:
    assignment: dict[Atom, bool] = {}
    while True:
        # unit propagation
        unit = next((c for c in clauses if len(c) == 1), None)
        if unit is not None:
            atom, sign = next(iter(unit))
            assignment[atom] = sign
            clauses = _assign(clauses, atom, sign)
            if clauses is None:
                return False
            continue
        # pure literal elimination
        polarity: dict[Atom, set[bool]] = {}
        for c in clauses:
            for atom, sign in c:
                polarity.setdefault(atom, set()).add(sign)
        pure = next((a for a, signs in polarity.items() if len(signs) == 1), None)
        if pure is not None:
            sign = next(iter(polarity[pure]))
            clauses = _assign(clauses, pure, sign)
            if clauses is None:  # pragma: no cover — pure assignment cannot clash
                return False
            continue
        if not clauses:
            return True
        # branch on the first literal of the smallest clause
        branch_clause = min(clauses, key=len)
        atom, sign = next(iter(branch_clause))
        for choice in (sign, not sign):
            reduced = _assign(clauses, atom, choice)
            if reduced is not None and _dpll(reduced):
                return True
        return False


def _assign(clauses: list[Clause], atom: Atom, sign: bool) -> list[Clause] | None:
    out: list[Clause] = []
    for c in clauses:
        if (atom, sign) in c:
            continue
        if (atom, not sign) in c:
            c = c - {(atom, not sign)}
            if not c:
                return None
        out.append(c)
    return out


def satisfiable(clauses: ClauseSet) -> bool:
    return _dpll(sorted(clauses, key=len))


def is_consistent(formulas: Iterable[Formula]) -> bool:
    """True iff the set of ground formulas has a model."""
    return satisfiable(clauses_for(formulas))


def entails(premises: Iterable[Formula], goal: Formula) -> bool:
    """Refutation: premises ⊢ goal iff premises ∪ {!goal} is unsatisfiable."""
    return not satisfiable(clauses_for(premises) | to_clauses(Not(goal)))


def minimal_entailing_subset(premises: Sequence[Formula], goal: Formula) -> list[Formula]:
    """Deletion-minimal subset of ``premises`` that still entails ``goal``.

    The input order is respected, so callers control tie-breaking.
    """
    if not entails(premises, goal):
        raise ValueError("premises do not entail the goal")
    core = list(premises)
    for candidate in list(core):
        trial = [p for p in core if p is not candidate]
        if entails(trial, goal):
            core = trial
    return core


def minimal_entailing_supersets(
    base: Sequence[Formula],
    candidates: Sequence[Formula],
    goal: Formula,
) -> list[frozenset[Formula]]:
    """All ⊆-minimal Γ ⊆ candidates with base ∪ Γ ⊢ goal (deterministic order)."""
    if entails(base, goal):
        return [frozenset()]
    found: list[frozenset[Formula]] = []
    for size in range(1, len(candidates) + 1):
        for combo in itertools.combinations(candidates, size):
            gamma = frozenset(combo)
            if any(prior <= gamma for prior in found):
                continue
            if entails(list(base) + list(combo), goal):
                found.append(gamma)
    return found
