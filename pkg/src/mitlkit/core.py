"""Exact time values, intervals, timed words and clock-copy counting."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

RationalLike = Union[int, str, Fraction]

# Clock constraint operators. "!=" only appears in hand-written transition
# formulas; it is split into "<" / ">" when arcs are normalised.
OPS = ("<", "<=", ">", ">=")


def rational(value: RationalLike) -> Fraction:
    """Convert an int, a Fraction, or a decimal/fraction literal exactly.

    Floats are refused: ``0.1`` as a float is not 1/10.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not time values")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError:
            raise ValueError(f"not a rational literal: {value!r}") from None
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def format_rational(q: Fraction) -> str:
    """Decimal notation when the expansion terminates, ``p/q`` otherwise."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    d = q.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{q.numerator}/{q.denominator}"
    digits = max(twos, fives)
    scaled = abs(q) * 10**digits
    whole, frac = divmod(int(scaled), 10**digits)
    text = f"{whole}.{frac:0{digits}d}".rstrip("0")
    return ("-" if q < 0 else "") + text


@dataclass(frozen=True)
class Interval:
    """A convex set of rationals.

    ``hi is None`` encodes a +inf upper end, which is always open. A
    singular interval ``[a,a]`` must be closed on both sides, so an empty
    interval cannot be built.
    """

    lo: Fraction
    hi: Optional[Fraction]
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lo", rational(self.lo))
        if self.hi is None:
            if self.hi_closed:
                object.__setattr__(self, "hi_closed", False)
            return
        object.__setattr__(self, "hi", rational(self.hi))
        if self.hi < self.lo:
            raise ValueError(f"empty interval: lower {self.lo} above upper {self.hi}")
        if self.hi == self.lo and not (self.lo_closed and self.hi_closed):
            raise ValueError(f"empty interval at {self.lo}")

    @classmethod
    def point(cls, value: RationalLike) -> "Interval":
        v = rational(value)
        return cls(v, v)

    @classmethod
    def closed(cls, lo: RationalLike, hi: RationalLike) -> "Interval":
        return cls(rational(lo), rational(hi))

    @classmethod
    def parse(cls, text: str) -> "Interval":
        """Parse ``[1,2]``, ``(0,inf)``, ``[0.5,1/3)`` style literals."""
        m = re.fullmatch(r"\s*([\[(])\s*([^,\s]+)\s*,\s*([^\])\s]+)\s*([\])])\s*", text)
        if not m:
            raise ValueError(f"not an interval literal: {text!r}")
        left, lo, hi, right = m.groups()
        upper = None if hi in ("inf", "+inf", "oo") else rational(hi)
        return cls(rational(lo), upper, left == "[", right == "]")

    @property
    def inf(self) -> Fraction:
        return self.lo

    @property
    def sup(self) -> Optional[Fraction]:
        return self.hi

    @property
    def bounded(self) -> bool:
        return self.hi is not None

    @property
    def singular(self) -> bool:
        return self.hi is not None and self.hi == self.lo

    @property
    def length(self) -> Optional[Fraction]:
        """``sup - inf``; ``None`` stands for an infinite length."""
        return None if self.hi is None else self.hi - self.lo

    def contains(self, v: RationalLike) -> bool:
        v = rational(v)
        if v < self.lo or (v == self.lo and not self.lo_closed):
            return False
        if self.hi is None:
            return True
        return v < self.hi or (v == self.hi and self.hi_closed)

    __contains__ = contains

    def shift(self, t: RationalLike) -> "Interval":
        t = rational(t)
        if t < 0:
            raise ValueError("time shifts must be non-negative")
        return self.offset(t)

    def minus(self, v: RationalLike) -> "Interval":
        """``{i - v | i in I}``; endpoints may become negative."""
        return self.offset(-rational(v))

    def offset(self, d: Fraction) -> "Interval":
        hi = None if self.hi is None else self.hi + d
        return Interval(self.lo + d, hi, self.lo_closed, self.hi_closed)

    def lt(self, other: "Interval") -> bool:
        """Every point of ``self`` lies strictly below every point of ``other``."""
        if self.hi is None:
            return False
        if self.hi < other.lo:
            return True
        return self.hi == other.lo and not (self.hi_closed and other.lo_closed)

    def disjoint(self, other: "Interval") -> bool:
        return self.lt(other) or other.lt(self)

    def issubset(self, other: "Interval") -> bool:
        if self.lo < other.lo or (self.lo == other.lo and self.lo_closed and not other.lo_closed):
            return False
        if other.hi is None:
            return True
        if self.hi is None or self.hi > other.hi:
            return False
        return not (self.hi == other.hi and self.hi_closed and not other.hi_closed)

    def hull(self, other: "Interval") -> "Interval":
        """Smallest interval containing both."""
        if (self.lo, not self.lo_closed) <= (other.lo, not other.lo_closed):
            lo, lo_closed = self.lo, self.lo_closed
        else:
            lo, lo_closed = other.lo, other.lo_closed
        if self.hi is None or other.hi is None:
            return Interval(lo, None, lo_closed, False)
        if (self.hi, self.hi_closed) >= (other.hi, other.hi_closed):
            hi, hi_closed = self.hi, self.hi_closed
        else:
            hi, hi_closed = other.hi, other.hi_closed
        return Interval(lo, hi, lo_closed, hi_closed)

    def sat(self, op: str, c: Optional[int]) -> bool:
        """True iff every point of the interval satisfies ``x op c``.

        ``c is None`` means +inf: ``x < inf`` and ``x <= inf`` always hold,
        ``x > inf`` and ``x >= inf`` never do.
        """
        if c is None:
            if op in ("<", "<="):
                return True
            if op in (">", ">="):
                return False
            raise ValueError(f"unknown operator {op!r}")
        if op == "<":
            return self.hi is not None and (self.hi < c or (self.hi == c and not self.hi_closed))
        if op == "<=":
            return self.hi is not None and self.hi <= c
        if op == ">":
            return self.lo > c or (self.lo == c and not self.lo_closed)
        if op == ">=":
            return self.lo >= c
        if op == "==":
            return self.singular and self.lo == c
        if op == "!=":
            return self.sat("<", c) or self.sat(">", c)
        raise ValueError(f"unknown operator {op!r}")

    def sort_key(self):
        return (self.lo, not self.lo_closed)

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        hi = "inf" if self.hi is None else format_rational(self.hi)
        return f"{left}{format_rational(self.lo)},{hi}{right}"

    def __repr__(self) -> str:
        return f"Interval({self})"


ZERO = Interval.point(0)


def interval_shift(interval: Interval, t: RationalLike) -> Interval:
    return interval.shift(t)


def interval_minus_scalar(interval: Interval, v: RationalLike) -> Interval:
    return interval.minus(v)


def interval_lt(first: Interval, second: Interval) -> bool:
    return first.lt(second)


def interval_sat(interval: Interval, op: str, c: Optional[int]) -> bool:
    return interval.sat(op, c)


def clock_copies(intervals: Iterable[Interval]) -> int:
    """One clock per singular interval, two (inf and sup) for the others."""
    return sum(1 if i.singular else 2 for i in set(intervals))


@dataclass(frozen=True)
class TimedWord:
    """Finite sequence of (letter, timestamp) with non-decreasing timestamps."""

    events: tuple[tuple[str, Fraction], ...] = ()

    def __post_init__(self):
        events = tuple((str(a), rational(t)) for a, t in self.events)
        last = Fraction(0)
        for _, t in events:
            if t < 0:
                raise ValueError(f"negative timestamp {t}")
            if t < last:
                raise ValueError(f"timestamps must be non-decreasing ({last} then {t})")
            last = t
        object.__setattr__(self, "events", events)

    @classmethod
    def of(cls, *events: tuple[str, RationalLike]) -> "TimedWord":
        return cls(tuple(events))

    @classmethod
    def parse(cls, text: str) -> "TimedWord":
        """Read ``(a,0.1)(b,2)`` or a JSON array of ``{letter, time}`` objects."""
        stripped = text.strip()
        if stripped.startswith("["):
            items = json.loads(stripped)
            return cls(tuple((item["letter"], rational(str(item["time"]))) for item in items))
        pos = 0
        events = []
        pattern = re.compile(r"\s*\(\s*([A-Za-z_][A-Za-z0-9_]*)\s*,\s*([0-9./]+)\s*\)\s*")
        while pos < len(stripped):
            m = pattern.match(stripped, pos)
            if not m:
                raise ValueError(f"malformed timed word at offset {pos}: {stripped[pos:pos + 12]!r}")
            events.append((m.group(1), rational(m.group(2))))
            pos = m.end()
        return cls(tuple(events))

    @property
    def letters(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.events)

    @property
    def times(self) -> tuple[Fraction, ...]:
        return tuple(t for _, t in self.events)

    def delays(self) -> list[Fraction]:
        """``tau_i - tau_{i-1}`` with ``tau_0 = 0``."""
        prev = Fraction(0)
        out = []
        for t in self.times:
            out.append(t - prev)
            prev = t
        return out

    def to_json(self) -> str:
        return json.dumps([{"letter": a, "time": format_rational(t)} for a, t in self.events])

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __getitem__(self, index):
        return self.events[index]

    def __str__(self) -> str:
        return "".join(f"({a},{format_rational(t)})" for a, t in self.events)
