"""Approximation functions and the clock-copy bound ``M``.

An approximation function maps a configuration to a nonempty set of
configurations that cover it with no more clock copies per location and
whose interval endpoints come from the original intervals.
"""

from __future__ import annotations

import itertools
import math
import random
import zlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .core import ZERO, Interval, clock_copies
from .mitl import (
    And,
    Atom,
    Bottom,
    Formula,
    NegAtom,
    Not,
    Or,
    Release,
    Top,
    Until,
    is_nnf,
)
from .ocata import Configuration, OverlapError

# -- the definition contract ---------------------------------------------------


def validate_approx(before: Configuration, after: Configuration) -> bool:
    """Check covering, copy count and endpoint provenance per location."""
    for loc in set(before.locations) | set(after.locations):
        old, new = before[loc], after[loc]
        if clock_copies(new) > clock_copies(old):
            return False
        if not all(any(i.issubset(j) for j in new) for i in old):
            return False
        infs = {i.lo for i in old}
        sups = {i.hi for i in old}
        if not all(j.lo in infs and j.hi in sups for j in new):
            return False
    return True


def hull_of(intervals: Sequence[Interval]) -> Interval:
    out = intervals[0]
    for i in intervals[1:]:
        out = out.hull(i)
    return out


def merge_location(intervals: Sequence[Interval]) -> tuple[Interval, ...]:
    """Absorb a leading ``[0,0]`` into the next interval.

    The result ``[0, sup(I1)]`` is closed at ``sup(I1)``; lists that do
    not start with ``[0,0]`` or have a single element are returned as is.
    """
    intervals = tuple(intervals)
    if len(intervals) < 2 or intervals[0] != ZERO:
        return intervals
    second = intervals[1]
    merged = Interval(Fraction(0), second.hi, True, second.hi is not None)
    return (merged,) + intervals[2:]


def _well_formed(intervals: Sequence[Interval]) -> bool:
    return all(a.lt(b) for a, b in zip(intervals, intervals[1:]))


def hull(config: Configuration, locations: Optional[Iterable[str]] = None) -> Configuration:
    """Replace the intervals of the selected locations (all by default) by their hull."""
    chosen = None if locations is None else set(locations)
    mapping = {}
    for loc, ivs in config.items:
        if chosen is None or loc in chosen:
            mapping[loc] = (hull_of(ivs),)
        else:
            mapping[loc] = ivs
    return Configuration.from_mapping(mapping)


def f_k(config: Configuration, k: int) -> list[Configuration]:
    """All per-location merge / keep combinations with at most ``k`` copies.

    The merging option is listed first. Combinations breaking disjointness
    are left out; when nothing fits, the full hull is the only result.
    """
    if k < 1:
        raise ValueError("the bound k must be at least 1")
    options = []
    for loc, ivs in config.items:
        merged = merge_location(ivs)
        if merged != ivs and _well_formed(merged):
            options.append([(loc, merged), (loc, ivs)])
        else:
            options.append([(loc, ivs)])
    out = []
    for combo in itertools.product(*options):
        if sum(clock_copies(ivs) for _, ivs in combo) <= k:
            out.append(Configuration(tuple(combo)))
    if out:
        return out
    return [hull(config)]


# -- approximation function objects -----------------------------------------------


class ApproxFn:
    """Callable returning the ordered list ``f(C)``."""

    name = "approx"
    bound: Optional[int] = None

    def __call__(self, config: Configuration) -> list[Configuration]:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Identity(ApproxFn):
    name = "id"

    def __call__(self, config):
        return [config]


@dataclass(frozen=True)
class FK(ApproxFn):
    k: int

    @property
    def name(self):
        return f"fk:{self.k}"

    @property
    def bound(self):
        return self.k

    def __call__(self, config):
        return f_k(config, self.k)


@dataclass(frozen=True)
class Hull(ApproxFn):
    """Merge all intervals of the given locations (every location if ``None``)."""

    locations: Optional[frozenset] = None

    @property
    def name(self):
        return "hull:all" if self.locations is None else "hull:" + ",".join(sorted(self.locations))

    def __call__(self, config):
        return [hull(config, self.locations)]


@dataclass(frozen=True)
class RandomGrouping(ApproxFn):
    """Deterministic pseudo-random grouping of consecutive intervals.

    For each configuration a seeded generator decides, per location, how
    to cut the sorted interval list into consecutive groups; every group
    is replaced by its hull. Up to ``width`` alternatives are returned.
    """

    seed: int = 0
    width: int = 2

    @property
    def name(self):
        return f"random:{self.seed}"

    def __call__(self, config):
        rng = random.Random(zlib.crc32(f"{self.seed}|{config}".encode()))
        out = []
        for _ in range(self.width):
            mapping = {}
            for loc, ivs in config.items:
                groups = [[ivs[0]]]
                for i in ivs[1:]:
                    if rng.random() < 0.5:
                        groups[-1].append(i)
                    else:
                        groups.append([i])
                mapping[loc] = [hull_of(g) for g in groups]
            try:
                candidate = Configuration.from_mapping(mapping)
            except OverlapError:
                continue
            if candidate not in out:
                out.append(candidate)
        return out or [config]


# -- the bound recursion -------------------------------------------------------------


@dataclass(frozen=True)
class BoundTriple:
    M: int
    M_inf: int
    M_one: int

    def __str__(self):
        return f"M={self.M} M_inf={self.M_inf} M_1={self.M_one}"


def _ceil_ratio(value: Optional[Fraction], interval: Interval) -> int:
    """``ceil(value / |I|)`` with ``c/inf = 0`` and ``inf/inf = 1``."""
    length = interval.length
    if length is None:
        return 1 if value is None else 0
    return math.ceil(Fraction(value) / length)


def until_weight(interval: Interval) -> int:
    """``4 * ceil(inf(I)/|I|) + 2``."""
    return 4 * _ceil_ratio(interval.inf, interval) + 2


def release_weight(interval: Interval) -> int:
    """``2 * ceil(sup(I)/|I|) + 2``."""
    return 2 * _ceil_ratio(interval.sup, interval) + 2


def m_bound(phi: Formula) -> BoundTriple:
    """The triple ``(M, M_inf, M_1)`` of an NNF formula."""
    if not is_nnf(phi):
        raise ValueError("m_bound expects a formula in negative normal form")
    return _bound(phi)


def _bound(phi: Formula) -> BoundTriple:
    if isinstance(phi, (Top, Bottom, Atom, NegAtom)):
        return BoundTriple(2, 0, 0)
    if isinstance(phi, Not):
        raise ValueError("m_bound expects a formula in negative normal form")
    a, b = _bound(phi.left), _bound(phi.right)
    if isinstance(phi, And):
        return BoundTriple(max(2, a.M_one + b.M_one), a.M_inf + b.M_inf, a.M_one + b.M_one)
    if isinstance(phi, Or):
        return BoundTriple(max(2, a.M_one, b.M_one), max(a.M_inf, b.M_inf), max(a.M_one, b.M_one))
    if isinstance(phi, Until):
        return BoundTriple(
            max(2, a.M_inf + b.M_one + 1),
            until_weight(phi.interval) + a.M_inf + b.M_inf,
            a.M_inf + b.M_one + 1,
        )
    if isinstance(phi, Release):
        return BoundTriple(
            max(2, a.M_one + b.M_inf + 1),
            release_weight(phi.interval) + a.M_inf + b.M_inf,
            a.M_one + b.M_inf + 1,
        )
    raise TypeError(f"not a formula: {phi!r}")


def k_star(phi: Formula, location_count: int) -> int:
    """``K = max(2 |L|, M(phi))``."""
    return max(2 * location_count, m_bound(phi).M)


def f_star(phi: Formula, location_count: Optional[int] = None) -> FK:
    """The bounded approximation ``F^K`` attached to ``phi``."""
    if location_count is None:
        from .translate import location_count as count

        location_count = count(phi)
    return FK(k_star(phi, location_count))


def parse_approx(text: str, phi: Optional[Formula] = None) -> ApproxFn:
    """Read ``id``, ``fk:<k>``, ``fstar`` or ``hull:<loc,...|all>``."""
    text = text.strip()
    if text == "id":
        return Identity()
    if text == "fstar":
        if phi is None:
            raise ValueError("fstar needs the formula")
        return f_star(phi)
    if text.startswith("fk:"):
        return FK(int(text[3:]))
    if text.startswith("hull:"):
        rest = text[5:]
        return Hull(None if rest == "all" else frozenset(x for x in rest.split(",") if x))
    raise ValueError(f"unknown approximation {text!r}")


__all__ = [
    "validate_approx", "merge_location", "hull", "hull_of", "f_k", "ApproxFn", "Identity", "FK",
    "Hull", "RandomGrouping", "BoundTriple", "m_bound", "k_star", "f_star", "until_weight",
    "release_weight", "parse_approx",
]
