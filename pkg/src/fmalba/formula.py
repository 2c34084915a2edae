"""Syntax trees, parsing and printing for the modal language and its expansion.

The basic language has propositional variables, ``bot``, ``top``, ``&``,
``|``, ``->`` and the box ``[]``.  The expanded language used by the
variable-elimination engine adds nominals (``@i0``) and the black diamond
``<*>``, the left adjoint of box.  Inequalities ``phi <= psi`` and
quasi-inequalities ``ineq & ... & ineq => ineq`` are the engine's working
state.

All values are immutable; operations are pure functions.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass


class Formula:
    """Base class for formula nodes. Concrete nodes are frozen dataclasses."""

    __slots__ = ()

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class PropVar(Formula):
    name: str


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Nominal(Formula):
    name: str


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box(Formula):
    body: Formula


@dataclass(frozen=True)
class BlackDiamond(Formula):
    body: Formula


BOT = Bot()
TOP = Top()


@dataclass(frozen=True)
class Inequality:
    """phi <= psi, read as global truth of phi -> psi."""

    lhs: Formula
    rhs: Formula

    def __str__(self) -> str:
        return print_inequality(self)


@dataclass(frozen=True)
class QuasiInequality:
    """Meta-implication: a finite conjunction of inequalities entails one.

    An empty antecedent tuple is legal and prints as the empty
    meta-conjunction symbol.
    """

    antecedents: tuple[Inequality, ...]
    consequent: Inequality

    def __str__(self) -> str:
        return print_quasi_inequality(self)


class Polarity(enum.IntFlag):
    """Occurrence polarity of a variable, ordered as a four-point lattice.

    NONE (absent) sits below POSITIVE and NEGATIVE, which join to BOTH.
    ``|`` is the lattice join.
    """

    NONE = 0
    POSITIVE = 1
    NEGATIVE = 2
    BOTH = 3

    def flipped(self) -> "Polarity":
        return Polarity(((self & Polarity.POSITIVE) << 1) | ((self & Polarity.NEGATIVE) >> 1))


def is_basic(f: Formula) -> bool:
    """True iff f is in the basic fragment: no nominals, no black diamond."""
    if isinstance(f, (Nominal, BlackDiamond)):
        return False
    if isinstance(f, (And, Or, Implies)):
        return is_basic(f.left) and is_basic(f.right)
    if isinstance(f, Box):
        return is_basic(f.body)
    return True


def is_pure(f: Formula) -> bool:
    """True iff f contains no propositional variables (nominals permitted)."""
    if isinstance(f, PropVar):
        return False
    if isinstance(f, (And, Or, Implies)):
        return is_pure(f.left) and is_pure(f.right)
    if isinstance(f, (Box, BlackDiamond)):
        return is_pure(f.body)
    return True


def prop_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, PropVar):
        return frozenset({f.name})
    if isinstance(f, (And, Or, Implies)):
        return prop_vars(f.left) | prop_vars(f.right)
    if isinstance(f, (Box, BlackDiamond)):
        return prop_vars(f.body)
    return frozenset()


def nominal_names(f: Formula) -> frozenset[str]:
    if isinstance(f, Nominal):
        return frozenset({f.name})
    if isinstance(f, (And, Or, Implies)):
        return nominal_names(f.left) | nominal_names(f.right)
    if isinstance(f, (Box, BlackDiamond)):
        return nominal_names(f.body)
    return frozenset()


def rename_nominals(f: Formula, mapping: dict[str, str]) -> Formula:
    if isinstance(f, Nominal):
        return Nominal(mapping.get(f.name, f.name))
    if isinstance(f, And):
        return And(rename_nominals(f.left, mapping), rename_nominals(f.right, mapping))
    if isinstance(f, Or):
        return Or(rename_nominals(f.left, mapping), rename_nominals(f.right, mapping))
    if isinstance(f, Implies):
        return Implies(rename_nominals(f.left, mapping), rename_nominals(f.right, mapping))
    if isinstance(f, Box):
        return Box(rename_nominals(f.body, mapping))
    if isinstance(f, BlackDiamond):
        return BlackDiamond(rename_nominals(f.body, mapping))
    return f


def nominals_in_order(q: QuasiInequality) -> list[str]:
    """Nominal names in first-occurrence order (antecedents, then consequent)."""
    seen: list[str] = []

    def walk(f: Formula) -> None:
        if isinstance(f, Nominal):
            if f.name not in seen:
                seen.append(f.name)
        elif isinstance(f, (And, Or, Implies)):
            walk(f.left)
            walk(f.right)
        elif isinstance(f, (Box, BlackDiamond)):
            walk(f.body)

    for ineq in q.antecedents + (q.consequent,):
        walk(ineq.lhs)
        walk(ineq.rhs)
    return seen


def canonical_quasi(q: QuasiInequality) -> QuasiInequality:
    """Rename nominals to i0, i1, ... in first-occurrence order, so two
    systems are equal up to nominal renaming iff their canonical forms are
    structurally equal."""
    mapping = {name: f"i{k}" for k, name in enumerate(nominals_in_order(q))}
    return QuasiInequality(
        tuple(Inequality(rename_nominals(a.lhs, mapping), rename_nominals(a.rhs, mapping))
              for a in q.antecedents),
        Inequality(rename_nominals(q.consequent.lhs, mapping),
                   rename_nominals(q.consequent.rhs, mapping)),
    )


def substitute(f: Formula, name: str, repl: Formula) -> Formula:
    """Replace every PropVar(name) leaf by repl; other leaves unchanged."""
    if isinstance(f, PropVar):
        return repl if f.name == name else f
    if isinstance(f, And):
        return And(substitute(f.left, name, repl), substitute(f.right, name, repl))
    if isinstance(f, Or):
        return Or(substitute(f.left, name, repl), substitute(f.right, name, repl))
    if isinstance(f, Implies):
        return Implies(substitute(f.left, name, repl), substitute(f.right, name, repl))
    if isinstance(f, Box):
        return Box(substitute(f.body, name, repl))
    if isinstance(f, BlackDiamond):
        return BlackDiamond(substitute(f.body, name, repl))
    return f


def polarity(f: Formula, name: str) -> Polarity:
    """Occurrence polarity of a propositional variable in f.

    Conjunction, disjunction, box and black diamond are monotone;
    implication flips its antecedent.  NONE iff the variable is absent.
    """
    if isinstance(f, PropVar):
        return Polarity.POSITIVE if f.name == name else Polarity.NONE
    if isinstance(f, (And, Or)):
        return polarity(f.left, name) | polarity(f.right, name)
    if isinstance(f, Implies):
        return polarity(f.left, name).flipped() | polarity(f.right, name)
    if isinstance(f, (Box, BlackDiamond)):
        return polarity(f.body, name)
    return Polarity.NONE


def positive_or_absent(f: Formula, name: str) -> bool:
    return not (polarity(f, name) & Polarity.NEGATIVE)


def negative_or_absent(f: Formula, name: str) -> bool:
    return not (polarity(f, name) & Polarity.POSITIVE)


def fresh_nominal(used: frozenset[str] | set[str]) -> str:
    """First name of the form i0, i1, ... not in `used` (first-gap scheme)."""
    k = 0
    while f"i{k}" in used:
        k += 1
    return f"i{k}"


def quasi_nominal_names(q: QuasiInequality) -> frozenset[str]:
    names: frozenset[str] = frozenset()
    for ineq in q.antecedents + (q.consequent,):
        names |= nominal_names(ineq.lhs) | nominal_names(ineq.rhs)
    return names


def quasi_prop_vars(q: QuasiInequality) -> frozenset[str]:
    names: frozenset[str] = frozenset()
    for ineq in q.antecedents + (q.consequent,):
        names |= prop_vars(ineq.lhs) | prop_vars(ineq.rhs)
    return names


# ---------------------------------------------------------------------------
# Printing.  Precedence: -> (right assoc) < | < & < prefix [] and <*>.
# ---------------------------------------------------------------------------

_PREC_IMPLIES = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_UNARY = 4


def print_formula(f: Formula) -> str:
    """Minimal-parenthesis rendering; reparses to an equal tree."""
    return _render(f, 0)


def _render(f: Formula, ctx: int) -> str:
    if isinstance(f, PropVar):
        return f.name
    if isinstance(f, Bot):
        return "bot"
    if isinstance(f, Top):
        return "top"
    if isinstance(f, Nominal):
        return "@" + f.name
    if isinstance(f, Box):
        return "[]" + _render(f.body, _PREC_UNARY)
    if isinstance(f, BlackDiamond):
        return "<*>" + _render(f.body, _PREC_UNARY)
    if isinstance(f, And):
        s = f"{_render(f.left, _PREC_AND)} & {_render(f.right, _PREC_AND + 1)}"
        return f"({s})" if ctx > _PREC_AND else s
    if isinstance(f, Or):
        s = f"{_render(f.left, _PREC_OR)} | {_render(f.right, _PREC_OR + 1)}"
        return f"({s})" if ctx > _PREC_OR else s
    if isinstance(f, Implies):
        s = f"{_render(f.left, _PREC_IMPLIES + 1)} -> {_render(f.right, _PREC_IMPLIES)}"
        return f"({s})" if ctx > _PREC_IMPLIES else s
    raise TypeError(f"not a formula node: {f!r}")


def _has_toplevel_amp(text: str) -> bool:
    depth = 0
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "&" and depth == 0:
            return True
    return False


def print_inequality(ineq: Inequality, *, guard_rhs: bool = False) -> str:
    """Render ``lhs <= rhs``.

    With guard_rhs, a right-hand side whose rendering exposes a depth-0 &
    is parenthesized so that a following meta-& cannot be misread as part
    of it.
    """
    rhs = print_formula(ineq.rhs)
    if guard_rhs and _has_toplevel_amp(rhs):
        rhs = f"({rhs})"
    return f"{print_formula(ineq.lhs)} <= {rhs}"


EMPTY_ANTECEDENTS = "∅"


def print_quasi_inequality(q: QuasiInequality) -> str:
    if q.antecedents:
        ants = " & ".join(print_inequality(a, guard_rhs=True) for a in q.antecedents)
    else:
        ants = EMPTY_ANTECEDENTS
    return f"{ants} => {print_inequality(q.consequent)}"


def formula_to_dict(f: Formula) -> dict:
    """JSON-friendly tree for machine-readable output."""
    if isinstance(f, PropVar):
        return {"node": "propvar", "name": f.name}
    if isinstance(f, Bot):
        return {"node": "bot"}
    if isinstance(f, Top):
        return {"node": "top"}
    if isinstance(f, Nominal):
        return {"node": "nominal", "name": f.name}
    if isinstance(f, And):
        return {"node": "and", "left": formula_to_dict(f.left), "right": formula_to_dict(f.right)}
    if isinstance(f, Or):
        return {"node": "or", "left": formula_to_dict(f.left), "right": formula_to_dict(f.right)}
    if isinstance(f, Implies):
        return {"node": "implies", "left": formula_to_dict(f.left), "right": formula_to_dict(f.right)}
    if isinstance(f, Box):
        return {"node": "box", "body": formula_to_dict(f.body)}
    if isinstance(f, BlackDiamond):
        return {"node": "blackdiamond", "body": formula_to_dict(f.body)}
    raise TypeError(f"not a formula node: {f!r}")


# ---------------------------------------------------------------------------
# Parsing.
# ---------------------------------------------------------------------------

class ParseError(ValueError):
    """Syntax error carrying the byte offset and the expected-token set."""

    def __init__(self, message: str, offset: int, expected: frozenset[str]):
        super().__init__(f"{message} at offset {offset} (expected: {', '.join(sorted(expected))})")
        self.offset = offset
        self.expected = expected


_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<nominal>@[a-z][a-zA-Z0-9_]*)
    | (?P<ident>[a-z][a-zA-Z0-9_]*)
    | (?P<box>\[\])
    | (?P<bdiamond><\*>)
    | (?P<leq><=)
    | (?P<entails>=>)
    | (?P<arrow>->)
    | (?P<amp>&)
    | (?P<bar>\|)
    | (?P<lparen>\()
    | (?P<rparen>\))
    | (?P<empty>∅|\{\})
    """,
    re.VERBOSE,
)

_ATOM_EXPECTED = frozenset({"identifier", "'@name'", "'bot'", "'top'", "'[]'", "'<*>'", "'('"})


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, _ATOM_EXPECTED)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"unexpected {tok.text!r}" if tok.kind != "eof" else "unexpected end of input",
                             tok.offset, frozenset({what}))
        return self.advance()

    # -> is right-associative and binds loosest.
    def implies(self) -> Formula:
        left = self.disj()
        if self.peek().kind == "arrow":
            self.advance()
            return Implies(left, self.implies())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek().kind == "bar":
            self.advance()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek().kind == "amp":
            self.advance()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "box":
            self.advance()
            return Box(self.unary())
        if tok.kind == "bdiamond":
            self.advance()
            return BlackDiamond(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "ident":
            self.advance()
            if tok.text == "bot":
                return BOT
            if tok.text == "top":
                return TOP
            return PropVar(tok.text)
        if tok.kind == "nominal":
            self.advance()
            return Nominal(tok.text[1:])
        if tok.kind == "lparen":
            self.advance()
            f = self.implies()
            self.expect("rparen", "')'")
            return f
        raise ParseError(f"unexpected {tok.text!r}" if tok.kind != "eof" else "unexpected end of input",
                         tok.offset, _ATOM_EXPECTED)

    def inequality(self) -> Inequality:
        lhs = self.implies()
        self.expect("leq", "'<='")
        rhs = self.implies()
        return Inequality(lhs, rhs)

    def done(self, what: str = "end of input") -> None:
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(f"unexpected {tok.text!r}", tok.offset, frozenset({what}))


def parse_formula(text: str) -> Formula:
    p = _Parser(_tokenize(text))
    f = p.implies()
    p.done()
    return f


def parse_inequality(text: str) -> Inequality:
    p = _Parser(_tokenize(text))
    ineq = p.inequality()
    p.done()
    return ineq


def parse_quasi_inequality(text: str) -> QuasiInequality:
    """Parse ``ineq & ... & ineq => ineq`` (empty antecedents written ∅ or {}).

    A depth-0 ``&`` separates antecedent inequalities once a ``<=`` has been
    seen since the previous cut; before that it is formula conjunction.
    """
    tokens = _tokenize(text)
    depth = 0
    entails_at = -1
    for idx, tok in enumerate(tokens):
        if tok.kind == "lparen":
            depth += 1
        elif tok.kind == "rparen":
            depth -= 1
        elif tok.kind == "entails" and depth == 0:
            if entails_at >= 0:
                raise ParseError("duplicate '=>'", tok.offset, frozenset({"end of input"}))
            entails_at = idx
    if entails_at < 0:
        last = tokens[-1]
        raise ParseError("missing '=>'", last.offset, frozenset({"'=>'"}))

    head, tail = tokens[:entails_at], tokens[entails_at + 1:]
    antecedents: list[Inequality] = []
    if not (len(head) == 0 or (len(head) == 1 and head[0].kind == "empty")):
        segments: list[list[_Token]] = []
        current: list[_Token] = []
        depth = 0
        seen_leq = False
        for tok in head:
            if tok.kind == "lparen":
                depth += 1
            elif tok.kind == "rparen":
                depth -= 1
            if tok.kind == "amp" and depth == 0 and seen_leq:
                segments.append(current)
                current = []
                seen_leq = False
                continue
            if tok.kind == "leq" and depth == 0:
                seen_leq = True
            current.append(tok)
        segments.append(current)
        for seg in segments:
            p = _Parser(seg + [_Token("eof", "", seg[-1].offset + len(seg[-1].text) if seg else 0)])
            antecedents.append(p.inequality())
            p.done("'&' or '=>'")

    p = _Parser(tail)
    consequent = p.inequality()
    p.done()
    return QuasiInequality(tuple(antecedents), consequent)
