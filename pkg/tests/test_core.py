import operator
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import iv
from mitlkit.core import (
    Interval,
    TimedWord,
    clock_copies,
    format_rational,
    interval_lt,
    interval_minus_scalar,
    interval_sat,
    interval_shift,
    rational,
)
from strategies import grid, intervals, signed, words


OPS = {"<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge}


def brute_lt(a: Interval, b: Interval) -> bool:
    """``a < b`` by checking points: endpoints, and points just inside them."""
    eps = Fraction(1, 10**6)

    def samples(i: Interval):
        pts = [i.lo, i.lo + eps]
        if i.hi is not None:
            pts += [i.hi, i.hi - eps]
        else:
            pts.append(i.lo + 10**6)
        return [p for p in pts if i.contains(p)]

    return all(x < y for x in samples(a) for y in samples(b))


class TestRational:
    def test_decimal_literals_are_exact(self):
        assert rational("0.1") + rational("0.2") == rational("0.3")

    def test_fraction_literal(self):
        assert rational("1/3") == Fraction(1, 3)

    def test_floats_refused(self):
        with pytest.raises(TypeError):
            rational(0.1)

    def test_format(self):
        assert format_rational(Fraction(1, 5)) == "0.2"
        assert format_rational(Fraction(7, 4)) == "1.75"
        assert format_rational(Fraction(1, 3)) == "1/3"
        assert format_rational(Fraction(-3, 2)) == "-1.5"
        assert format_rational(Fraction(4)) == "4"

    @given(signed, signed)
    def test_exact_arithmetic(self, a, b):
        assert (a + b) - b == a


class TestInterval:
    def test_empty_intervals_unrepresentable(self):
        with pytest.raises(ValueError):
            Interval(Fraction(1), Fraction(1), True, False)
        with pytest.raises(ValueError):
            Interval(Fraction(2), Fraction(1))

    def test_unbounded_upper_is_open(self):
        assert not Interval(Fraction(0), None, True, True).hi_closed

    def test_parse_and_print(self):
        for text in ("[0,0.2]", "(1,inf)", "[1,2)", "(0.5,3]"):
            assert str(Interval.parse(text)) == text

    def test_shift_point(self):
        assert interval_shift(iv(0), Fraction(1, 5)) == iv("0.2")

    def test_shift_zero_is_identity(self):
        assert interval_shift(iv(1, 2), 0) == iv(1, 2)

    def test_shift_unbounded(self):
        assert interval_shift(iv(0, "inf", lo_closed=False), 1) == iv(1, "inf", lo_closed=False)

    def test_negative_shift_rejected(self):
        with pytest.raises(ValueError):
            iv(0).shift(-1)

    def test_minus_scalar(self):
        assert interval_minus_scalar(iv(2, 3), 0) == iv(2, 3)
        assert interval_minus_scalar(iv(2, 3), 2) == iv(0, 1)
        assert interval_minus_scalar(iv(1, 2), 3) == iv(-2, -1)

    def test_lt_examples(self):
        assert interval_lt(iv(0), iv("0.1", "0.2"))
        assert not interval_lt(iv(0, 1), iv(1, 2))
        half_open = Interval(Fraction(0), Fraction(1), True, False)
        assert interval_lt(half_open, iv(1, 2))
        assert interval_lt(half_open, iv(1, 2)) == brute_lt(half_open, iv(1, 2))

    def test_sat_examples(self):
        assert interval_sat(iv("1.5", 2), ">", 1)
        assert not interval_sat(iv("0.6", "1.1"), "==", 1)
        assert not interval_sat(iv("0.6", "1.1"), "!=", 1)
        assert interval_sat(iv(0), "<=", 0)

    def test_sat_infinite_constant(self):
        i = iv(3, "inf")
        assert i.sat("<=", None) and i.sat("<", None)
        assert not i.sat(">", None) and not i.sat(">=", None)

    def test_hull(self):
        assert iv(0).hull(iv(2)) == iv(0, 2)

    @given(intervals(), grid, grid)
    def test_shift_additive(self, i, t1, t2):
        assert interval_shift(interval_shift(i, t1), t2) == interval_shift(i, t1 + t2)

    @given(intervals(), intervals())
    def test_lt_matches_pointwise_definition(self, a, b):
        assert a.lt(b) == brute_lt(a, b)

    @given(intervals(), intervals())
    def test_disjoint_intervals_are_ordered_one_way(self, a, b):
        if a.disjoint(b):
            assert a.lt(b) != b.lt(a)
        else:
            assert not a.lt(b) and not b.lt(a)

    @given(intervals(), st.sampled_from(["<", "<=", ">", ">="]), st.integers(0, 6))
    def test_sat_is_universal(self, i, op, c):
        points = [i.lo, i.hi if i.hi is not None else i.lo + 100]
        points += [(i.lo + (i.hi if i.hi is not None else i.lo + 1)) / 2]
        inside = [p for p in points if i.contains(p)]
        if i.sat(op, c):
            assert all(OPS[op](p, c) for p in inside)
        elif i.hi is not None and i.lo_closed and i.hi_closed:
            # a closed bounded interval fails at one of its endpoints
            assert not all(OPS[op](p, c) for p in (i.lo, i.hi))


class TestClockCopies:
    def test_examples(self):
        assert clock_copies([]) == 0
        assert clock_copies([iv(0)]) == 1
        assert clock_copies([iv(0, "0.2"), iv(1)]) == 3

    @given(st.lists(intervals(), max_size=4), st.lists(intervals(), max_size=4))
    def test_additive_on_disjoint_sets(self, xs, ys):
        shared = set(xs) & set(ys)
        if not shared:
            assert clock_copies(xs + ys) == clock_copies(xs) + clock_copies(ys)


class TestTimedWord:
    def test_parse_text(self):
        w = TimedWord.parse("(a,0.1)(b,2)(b,3)")
        assert w.letters == ("a", "b", "b")
        assert w.times == (Fraction(1, 10), Fraction(2), Fraction(3))

    def test_parse_json(self):
        w = TimedWord.parse('[{"letter": "a", "time": "0.5"}, {"letter": "b", "time": 1}]')
        assert str(w) == "(a,0.5)(b,1)"

    def test_decreasing_rejected(self):
        with pytest.raises(ValueError):
            TimedWord.of(("a", 1), ("a", 0))

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            TimedWord.of(("a", -1))

    def test_delays(self):
        assert TimedWord.parse("(a,0.1)(a,0.3)(b,0.3)").delays() == [
            Fraction(1, 10),
            Fraction(1, 5),
            Fraction(0),
        ]

    @given(words())
    def test_text_round_trip(self, w):
        assert TimedWord.parse(str(w)) == w
        assert TimedWord.parse(w.to_json()) == w
