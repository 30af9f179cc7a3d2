"""Compile MITL formulas into one-clock alternating timed automata and timed
automata, and decide membership of finite timed words four ways."""

from .core import Interval, TimedWord, clock_copies, rational
from .mitl import parse, to_nnf, satisfies
from .ocata import Configuration, Ocata, accepts, accepts_from
from .approx import FK, Hull, Identity, f_star, k_star, m_bound
from .translate import mitl_to_ocata

__all__ = [
    "Interval", "TimedWord", "clock_copies", "rational", "parse", "to_nnf", "satisfies",
    "Configuration", "Ocata", "accepts", "accepts_from", "FK", "Hull", "Identity", "f_star",
    "k_star", "m_bound", "mitl_to_ocata",
]
