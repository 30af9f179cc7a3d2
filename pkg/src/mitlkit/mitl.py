"""MITL formulas: syntax tree, concrete syntax, negative normal form and
the pointwise semantics over finite timed words."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .core import Interval, TimedWord, format_rational

UNBOUNDED = Interval(Fraction(0), None, True, False)


class Formula:
    """Base class of the syntax tree. Nodes are frozen dataclasses."""

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, eq=True)
class Top(Formula):
    pass


@dataclass(frozen=True, eq=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True, eq=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True, eq=True)
class NegAtom(Formula):
    name: str


@dataclass(frozen=True, eq=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True, eq=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=True)
class Until(Formula):
    left: Formula
    interval: Interval
    right: Formula


@dataclass(frozen=True, eq=True)
class Release(Formula):
    """Dual of :class:`Until`: ``left R_I right == !(!left U_I !right)``."""

    left: Formula
    interval: Interval
    right: Formula


MODALITIES = (Until, Release)
LITERALS = (Top, Bottom, Atom, NegAtom)


class MitlSyntaxError(ValueError):
    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)


def eventually(arg: Formula, interval: Interval = UNBOUNDED) -> Until:
    return Until(Top(), interval, arg)


def always(arg: Formula, interval: Interval = UNBOUNDED) -> Release:
    return Release(Bottom(), interval, arg)


def negate(phi: Formula) -> Formula:
    """Negation with literal shortcuts; compound formulas get a Not node."""
    if isinstance(phi, Atom):
        return NegAtom(phi.name)
    if isinstance(phi, NegAtom):
        return Atom(phi.name)
    if isinstance(phi, Top):
        return Bottom()
    if isinstance(phi, Bottom):
        return Top()
    if isinstance(phi, Not):
        return phi.arg
    return Not(phi)


def implies(lhs: Formula, rhs: Formula) -> Formula:
    return Or(negate(lhs), rhs)


def children(phi: Formula) -> tuple[Formula, ...]:
    if isinstance(phi, Not):
        return (phi.arg,)
    if isinstance(phi, (And, Or, Until, Release)):
        return (phi.left, phi.right)
    return ()


def walk(phi: Formula) -> Iterator[Formula]:
    stack = [phi]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def atoms(phi: Formula) -> set[str]:
    return {n.name for n in walk(phi) if isinstance(n, (Atom, NegAtom))}


def subformulas(phi: Formula) -> set[Formula]:
    out = {phi}
    if isinstance(phi, NegAtom):
        out.add(Atom(phi.name))
    for child in children(phi):
        out |= subformulas(child)
    return out


def size(phi: Formula) -> int:
    """Number of Until / Release modalities (occurrences, not distinct)."""
    return sum(isinstance(n, MODALITIES) for n in walk(phi))


def intervals(phi: Formula) -> list[Interval]:
    return [n.interval for n in walk(phi) if isinstance(n, MODALITIES)]


def is_nnf(phi: Formula) -> bool:
    return not any(isinstance(n, Not) for n in walk(phi))


def to_nnf(phi: Formula) -> Formula:
    """Push negations down to the letters."""
    if isinstance(phi, LITERALS):
        return phi
    if isinstance(phi, And):
        return And(to_nnf(phi.left), to_nnf(phi.right))
    if isinstance(phi, Or):
        return Or(to_nnf(phi.left), to_nnf(phi.right))
    if isinstance(phi, Until):
        return Until(to_nnf(phi.left), phi.interval, to_nnf(phi.right))
    if isinstance(phi, Release):
        return Release(to_nnf(phi.left), phi.interval, to_nnf(phi.right))
    return _negated_nnf(phi.arg)


def _negated_nnf(phi: Formula) -> Formula:
    if isinstance(phi, LITERALS):
        return negate(phi)
    if isinstance(phi, Not):
        return to_nnf(phi.arg)
    if isinstance(phi, And):
        return Or(_negated_nnf(phi.left), _negated_nnf(phi.right))
    if isinstance(phi, Or):
        return And(_negated_nnf(phi.left), _negated_nnf(phi.right))
    if isinstance(phi, Until):
        return Release(_negated_nnf(phi.left), phi.interval, _negated_nnf(phi.right))
    if isinstance(phi, Release):
        return Until(_negated_nnf(phi.left), phi.interval, _negated_nnf(phi.right))
    raise TypeError(f"not a formula: {phi!r}")


def validate(phi: Formula) -> None:
    """Raise :class:`MitlSyntaxError` unless every modality interval is an
    MITL interval: natural endpoints (or +inf) and not singular."""
    for node in walk(phi):
        if not isinstance(node, MODALITIES):
            continue
        i = node.interval
        if i.lo.denominator != 1 or i.lo < 0 or (i.hi is not None and i.hi.denominator != 1):
            raise MitlSyntaxError(f"modality interval {i} must have natural endpoints")
        if i.hi is not None and i.hi == i.lo:
            raise MitlSyntaxError(f"singular interval {i} is not allowed in MITL")


# -- semantics ---------------------------------------------------------------


def eval(word: TimedWord, i: int, phi: Formula) -> bool:  # noqa: A001
    """``(word, i) |= phi`` with 1-based position ``i``."""
    n = len(word)
    if not 1 <= i <= n:
        raise IndexError(f"position {i} outside 1..{n}")
    return _Evaluator(word).holds(phi, i)


def satisfies(word: TimedWord, phi: Formula) -> bool:
    """``word |= phi``, i.e. truth at position 1. The empty word has no
    first position and satisfies nothing."""
    if len(word) == 0:
        return False
    return eval(word, 1, phi)


class _Evaluator:
    def __init__(self, word: TimedWord):
        self.letters = word.letters
        self.times = word.times
        self.memo: dict[tuple[Formula, int], bool] = {}

    def holds(self, phi: Formula, i: int) -> bool:
        key = (phi, i)
        hit = self.memo.get(key)
        if hit is None:
            hit = self.memo[key] = self._holds(phi, i)
        return hit

    def _holds(self, phi: Formula, i: int) -> bool:
        if isinstance(phi, Top):
            return True
        if isinstance(phi, Bottom):
            return False
        if isinstance(phi, Atom):
            return self.letters[i - 1] == phi.name
        if isinstance(phi, NegAtom):
            return self.letters[i - 1] != phi.name
        if isinstance(phi, Not):
            return not self.holds(phi.arg, i)
        if isinstance(phi, And):
            return self.holds(phi.left, i) and self.holds(phi.right, i)
        if isinstance(phi, Or):
            return self.holds(phi.left, i) or self.holds(phi.right, i)
        if isinstance(phi, Until):
            return self._until(phi.left, phi.interval, phi.right, i, positive=True)
        if isinstance(phi, Release):
            # not (not left U_I not right), negations taken semantically
            return not self._until(phi.left, phi.interval, phi.right, i, positive=False)
        raise TypeError(f"not a formula: {phi!r}")

    def _until(self, left, interval, right, i, positive):
        start = self.times[i - 1]
        for j in range(i, len(self.times) + 1):
            if interval.contains(self.times[j - 1] - start) and self.holds(right, j) == positive:
                return True
            if self.holds(left, j) != positive:
                return False
        return False


# -- concrete syntax ---------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<num>\d+)|(?P<word>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[!&|()\[\],]))"
)
RESERVED = {"true", "false", "T", "F", "G", "U", "R", "inf"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise MitlSyntaxError(f"unexpected character {text[pos + stripped]!r}", pos + stripped)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive descent; precedence ``!`` > U/R/F/G > ``&`` > ``|`` > ``->``."""

    def __init__(self, text: str, alphabet: Optional[Iterable[str]]):
        self.tokens = _tokenize(text)
        self.k = 0
        self.alphabet = None if alphabet is None else set(alphabet)

    def peek(self, offset: int = 0):
        return self.tokens[min(self.k + offset, len(self.tokens) - 1)]

    def next(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.next()
        if text != value:
            raise MitlSyntaxError(f"expected {value!r}, found {text or 'end of input'!r}", pos)

    def parse(self) -> Formula:
        phi = self.implication()
        kind, text, pos = self.peek()
        if kind != "end":
            raise MitlSyntaxError(f"unexpected {text!r}", pos)
        return phi

    def implication(self) -> Formula:
        lhs = self.disjunction()
        if self.peek()[0] == "arrow":
            self.next()
            return implies(lhs, self.implication())
        return lhs

    def disjunction(self) -> Formula:
        phi = self.conjunction()
        while self.peek()[1] == "|":
            self.next()
            phi = Or(phi, self.conjunction())
        return phi

    def conjunction(self) -> Formula:
        phi = self.temporal()
        while self.peek()[1] == "&":
            self.next()
            phi = And(phi, self.temporal())
        return phi

    def temporal(self) -> Formula:
        lhs = self.unary()
        if self.peek()[1] in ("U", "R"):
            op = self.next()[1]
            interval = self.optional_interval()
            rhs = self.temporal()
            return Until(lhs, interval, rhs) if op == "U" else Release(lhs, interval, rhs)
        return lhs

    def starts_formula(self, offset: int = 0) -> bool:
        kind, text, _ = self.peek(offset)
        if kind == "word":
            return text not in ("U", "R", "inf")
        return text in ("!", "(")

    def starts_interval(self) -> bool:
        kind, text, _ = self.peek()
        if text == "[":
            return True
        return text == "(" and self.peek(1)[0] == "num" and self.peek(2)[1] == ","

    def unary(self) -> Formula:
        kind, text, pos = self.peek()
        if text == "!":
            self.next()
            return negate(self.unary())
        if text in ("F", "G"):
            self.next()
            # a bare F not followed by an operand is the constant false
            if text == "F" and not (self.starts_interval() or self.starts_formula()):
                return Bottom()
            interval = self.optional_interval()
            arg = self.unary()
            return eventually(arg, interval) if text == "F" else always(arg, interval)
        if text == "(":
            self.next()
            phi = self.implication()
            self.expect(")")
            return phi
        if kind == "word":
            self.next()
            if text in ("true", "T"):
                return Top()
            if text == "false":
                return Bottom()
            if text in RESERVED:
                raise MitlSyntaxError(f"unexpected keyword {text!r}", pos)
            if self.alphabet is not None and text not in self.alphabet:
                raise MitlSyntaxError(f"unknown atom {text!r}", pos)
            return Atom(text)
        raise MitlSyntaxError(f"unexpected {text or 'end of input'!r}", pos)

    def optional_interval(self) -> Interval:
        if not self.starts_interval():
            return UNBOUNDED
        _, left, pos = self.next()
        kind, lo, lo_pos = self.next()
        if kind != "num":
            raise MitlSyntaxError("interval lower bound must be a natural number", lo_pos)
        self.expect(",")
        kind, hi, hi_pos = self.next()
        if kind == "num":
            upper = Fraction(int(hi))
        elif hi == "inf":
            upper = None
        else:
            raise MitlSyntaxError("interval upper bound must be a natural number or inf", hi_pos)
        _, right, rpos = self.next()
        if right not in ("]", ")"):
            raise MitlSyntaxError(f"expected ']' or ')', found {right!r}", rpos)
        lower = Fraction(int(lo))
        if upper is not None and upper == lower:
            raise MitlSyntaxError(f"singular interval {left}{lo},{hi}{right} is not allowed in MITL", pos)
        if upper is not None and upper < lower:
            raise MitlSyntaxError(f"empty interval {left}{lo},{hi}{right}", pos)
        return Interval(lower, upper, left == "[", right == "]" and upper is not None)


def parse(text: str, alphabet: Optional[Iterable[str]] = None) -> Formula:
    """Parse concrete syntax. Sugar (F, G, ->) is expanded while parsing.

    >>> print(parse("G(a -> F[1,2] b)"))
    F R[0,inf) (!a | (T U[1,2] b))
    """
    phi = _Parser(text, alphabet).parse()
    validate(phi)
    return phi


def _wrap(phi: Formula) -> str:
    text = to_text(phi)
    if isinstance(phi, LITERALS) or (isinstance(phi, Not) and isinstance(phi.arg, LITERALS)):
        return text
    return f"({text})"


def to_text(phi: Formula) -> str:
    """Print in the concrete syntax accepted by :func:`parse`."""
    if isinstance(phi, Top):
        return "T"
    if isinstance(phi, Bottom):
        return "F"
    if isinstance(phi, Atom):
        return phi.name
    if isinstance(phi, NegAtom):
        return f"!{phi.name}"
    if isinstance(phi, Not):
        return f"!{_wrap(phi.arg)}"
    if isinstance(phi, And):
        return f"{_wrap(phi.left)} & {_wrap(phi.right)}"
    if isinstance(phi, Or):
        return f"{_wrap(phi.left)} | {_wrap(phi.right)}"
    if isinstance(phi, (Until, Release)):
        op = "U" if isinstance(phi, Until) else "R"
        return f"{_wrap(phi.left)} {op}{phi.interval} {_wrap(phi.right)}"
    raise TypeError(f"not a formula: {phi!r}")


def to_tree(phi: Formula) -> str:
    """Constructor-style rendering of the syntax tree, e.g. ``Atom a``."""
    if isinstance(phi, Top):
        return "True"
    if isinstance(phi, Bottom):
        return "False"
    if isinstance(phi, Atom):
        return f"Atom {phi.name}"
    if isinstance(phi, NegAtom):
        return f"NegAtom {phi.name}"
    if isinstance(phi, Not):
        return f"Not({to_tree(phi.arg)})"
    if isinstance(phi, (And, Or)):
        return f"{type(phi).__name__}({to_tree(phi.left)}, {to_tree(phi.right)})"
    return f"{type(phi).__name__}({to_tree(phi.left)}, {phi.interval}, {to_tree(phi.right)})"


def shifted(phi: Formula, v: Fraction) -> Formula:
    """Replace the outer modality interval ``I`` by ``I - v``."""
    if not isinstance(phi, MODALITIES):
        raise TypeError("only modalities carry an interval")
    return type(phi)(phi.left, phi.interval.minus(v), phi.right)


__all__ = [
    "Formula", "Top", "Bottom", "Atom", "NegAtom", "Not", "And", "Or", "Until", "Release",
    "MitlSyntaxError", "parse", "to_text", "to_tree", "to_nnf", "is_nnf", "eval", "satisfies",
    "subformulas", "size", "atoms", "walk", "validate", "negate", "implies", "eventually",
    "always", "intervals", "shifted", "UNBOUNDED", "format_rational",
]
