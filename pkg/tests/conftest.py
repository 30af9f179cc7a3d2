from fractions import Fraction

import pytest

from mitlkit.core import Interval, TimedWord
from mitlkit.mitl import parse
from mitlkit.ocata import GClock, GLoc, GOr, GReset, Ocata, conj
from mitlkit.translate import mitl_to_ocata


def iv(lo, hi=None, lo_closed=True, hi_closed=True) -> Interval:
    """Shorthand: ``iv("0.2")`` is a point, ``iv(0, "0.5")`` a closed interval."""
    if hi is None:
        return Interval.point(lo)
    if hi == "inf":
        return Interval(Fraction(lo), None, lo_closed, False)
    return Interval(Fraction(str(lo)), Fraction(str(hi)), lo_closed, hi_closed)


@pytest.fixture
def fig1() -> Ocata:
    """Three-location automaton over one letter: l0 spawns l1 copies, a copy
    moves to l2 exactly at x = 1 and stays in l1 otherwise."""
    delta = {
        ("l0", "s"): conj(GLoc("l0"), GReset(GLoc("l1"))),
        ("l1", "s"): GOr(conj(GLoc("l2"), GClock("==", 1)), conj(GLoc("l1"), GClock("!=", 1))),
        ("l2", "s"): GLoc("l2"),
    }
    return Ocata.from_formulas({"s"}, ["l0", "l1", "l2"], "l0", ["l0", "l1"], delta)


PHI1 = "G(a -> F[1,2] b)"
PHI2 = "T U[2,3] b"
THETA1 = "(a,0.1)(a,0.2)(a,0.3)(b,2)"
THETA2 = "(a,0.1)(a,0.2)(a,1.9)(b,2)(b,3)"
THETA_PRIME = "(s,0)(s,0.2)(s,0.5)(s,1.1)"


@pytest.fixture
def phi1():
    return parse(PHI1)


@pytest.fixture
def fig2(phi1) -> Ocata:
    return mitl_to_ocata(phi1)


@pytest.fixture
def theta1() -> TimedWord:
    return TimedWord.parse(THETA1)


@pytest.fixture
def theta2() -> TimedWord:
    return TimedWord.parse(THETA2)
