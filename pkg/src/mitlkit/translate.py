"""Compilation of NNF MITL formulas into OCATA, and the finite criteria that
characterise acceptance from an Until or Release location holding an
interval of clock values."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .core import Interval, TimedWord
from .mitl import (
    And,
    Atom,
    Bottom,
    Formula,
    NegAtom,
    Or,
    Release,
    Top,
    Until,
    eval as mitl_eval,
    is_nnf,
    validate,
    walk,
)
from .ocata import GAnd, GClock, GFalse, GLoc, GOr, GReset, GTrue, Gamma, Ocata, conj, disj

INIT = "init"


@dataclass(frozen=True)
class LocationTag:
    """A location of the compiled automaton.

    ``path`` addresses the modality occurrence in the syntax tree (child
    indices from the root), so equal subformulas at different places get
    different locations.
    """

    kind: str  # "init", "until" or "release"
    path: tuple[int, ...]
    formula: Formula

    @property
    def name(self) -> str:
        if self.kind == "init":
            return INIT
        prefix = "U" if self.kind == "until" else "R"
        return prefix + "@" + ".".join(str(p) for p in (0,) + self.path)


def _occurrences(phi: Formula, path: tuple[int, ...] = ()):
    if isinstance(phi, (Until, Release)):
        yield path, phi
    if isinstance(phi, (And, Or, Until, Release)):
        yield from _occurrences(phi.left, path + (0,))
        yield from _occurrences(phi.right, path + (1,))


def location_tags(phi: Formula) -> list[LocationTag]:
    tags = [LocationTag("init", (), phi)]
    for path, node in _occurrences(phi):
        tags.append(LocationTag("until" if isinstance(node, Until) else "release", path, node))
    return tags


def location_count(phi: Formula) -> int:
    """One location for the initial copy plus one per modality occurrence."""
    return len(location_tags(phi))


def _in(interval: Interval) -> Gamma:
    parts = [GClock(">=" if interval.lo_closed else ">", int(interval.lo))]
    if interval.hi is not None:
        parts.append(GClock("<=" if interval.hi_closed else "<", int(interval.hi)))
    return conj(*parts)


def _not_in(interval: Interval) -> Gamma:
    parts = [GClock("<" if interval.lo_closed else "<=", int(interval.lo))]
    if interval.hi is not None:
        parts.append(GClock(">" if interval.hi_closed else ">=", int(interval.hi)))
    return disj(*parts)


def _sup(interval: Interval) -> Optional[int]:
    return None if interval.hi is None else int(interval.hi)


def _delta(phi: Formula, path: tuple[int, ...], letter: str) -> Gamma:
    if isinstance(phi, Top):
        return GTrue()
    if isinstance(phi, Bottom):
        return GFalse()
    if isinstance(phi, Atom):
        return GTrue() if phi.name == letter else GFalse()
    if isinstance(phi, NegAtom):
        return GFalse() if phi.name == letter else GTrue()
    if isinstance(phi, And):
        return GAnd(_delta(phi.left, path + (0,), letter), _delta(phi.right, path + (1,), letter))
    if isinstance(phi, Or):
        return GOr(_delta(phi.left, path + (0,), letter), _delta(phi.right, path + (1,), letter))
    here = GLoc(LocationTag("until" if isinstance(phi, Until) else "release", path, phi).name)
    left = GReset(_delta(phi.left, path + (0,), letter))
    right = GReset(_delta(phi.right, path + (1,), letter))
    sup = GClock("<=", _sup(phi.interval))
    if isinstance(phi, Until):
        return GOr(GAnd(right, _in(phi.interval)), conj(left, here, sup))
    above = GClock(">", _sup(phi.interval))
    return GAnd(GOr(right, _not_in(phi.interval)), disj(left, here, above))


def mitl_to_ocata(phi: Formula, alphabet: Optional[Iterable[str]] = None) -> Ocata:
    """Build the OCATA of an NNF formula.

    The alphabet defaults to the atoms of ``phi``; extra letters may be
    supplied. The accepting locations are the Release occurrences.
    """
    if not is_nnf(phi):
        raise ValueError("the translation expects a formula in negative normal form")
    validate(phi)
    letters = set(alphabet or ()) | {n.name for n in walk(phi) if isinstance(n, (Atom, NegAtom))}
    if not letters:
        raise ValueError("the alphabet is empty")
    tags = location_tags(phi)
    delta = {}
    for tag in tags:
        for letter in sorted(letters):
            if tag.kind == "init":
                delta[(tag.name, letter)] = GReset(_delta(phi, (), letter))
            else:
                delta[(tag.name, letter)] = _delta(tag.formula, tag.path, letter)
    return Ocata.from_formulas(
        letters,
        [t.name for t in tags],
        INIT,
        [t.name for t in tags if t.kind == "release"],
        delta,
        tags={t.name: t for t in tags},
    )


def find_location(automaton: Ocata, node: Formula) -> str:
    """Name of the first location compiled from ``node`` (by tree order)."""
    for name in automaton.locations:
        tag = automaton.tags.get(name)
        if tag is not None and tag.kind != "init" and tag.formula == node:
            return name
    raise KeyError(f"no location for {node}")


# -- finite criteria ------------------------------------------------------------------


def _require_closed(j: Interval) -> None:
    if not (j.bounded and j.lo_closed and j.hi_closed):
        raise ValueError(f"the criterion needs a closed bounded interval, got {j}")


def check_until_criterion(
    word: TimedWord, left: Formula, right: Formula, interval: Interval, j: Interval
) -> bool:
    """Acceptance of ``word`` from an Until location holding ``j`` at time 0.

    Some position ``m`` satisfies ``right``, the whole shifted interval
    ``j + tau_m`` lies inside ``interval``, and ``left`` holds at every
    earlier position.
    """
    _require_closed(j)
    low, high = interval.minus(j.lo), interval.minus(j.hi)
    for m in range(1, len(word) + 1):
        tau = word.times[m - 1]
        if mitl_eval(word, m, right) and low.contains(tau) and high.contains(tau):
            return True
        if not mitl_eval(word, m, left):
            return False
    return False


def release_samples(word: TimedWord, interval: Interval, j: Interval) -> list[Fraction]:
    """Points of ``j`` between which the Release verdict cannot change.

    The verdict for value ``v`` depends only on how each ``v + tau_m``
    compares with the endpoints of ``interval``; the boundaries are
    ``e - tau_m``. The samples are those boundaries inside ``j``, the
    endpoints of ``j`` and one midpoint per gap.
    """
    ends = [interval.lo] + ([interval.hi] if interval.hi is not None else [])
    points = {j.lo, j.hi}
    for tau in word.times:
        for e in ends:
            v = e - tau
            if j.contains(v):
                points.add(v)
    ordered = sorted(points)
    mids = [(a + b) / 2 for a, b in zip(ordered, ordered[1:])]
    return sorted(set(ordered) | set(mids))


def check_release_criterion(
    word: TimedWord,
    left: Formula,
    right: Formula,
    interval: Interval,
    j: Interval,
    samples: Optional[Iterable[Fraction]] = None,
) -> bool:
    """Acceptance of ``word`` from a Release location holding ``j`` at time 0.

    Every value ``v`` of ``j`` must be accepted on its own, which amounts
    to ``left R_{I - v - tau_1} right`` at position 1 (clock values are
    read against absolute time while the formula is read relative to the
    first event).
    """
    _require_closed(j)
    if len(word) == 0:
        return True
    points = release_samples(word, interval, j) if samples is None else list(samples)
    tau1 = word.times[0]
    return all(
        mitl_eval(word, 1, Release(left, interval.minus(v + tau1), right)) for v in points
    )


def singleton_verdict(word: TimedWord, node: Formula, v: Fraction) -> bool:
    """Truth of ``node`` with its interval shifted by ``v + tau_1`` at position 1.

    This is what acceptance from ``{(location of node, [v,v])}`` should
    compute; the empty word is accepted exactly by Release locations.
    """
    if len(word) == 0:
        return isinstance(node, Release)
    shifted = type(node)(node.left, node.interval.minus(v + word.times[0]), node.right)
    return mitl_eval(word, 1, shifted)


__all__ = [
    "INIT", "LocationTag", "location_tags", "location_count", "mitl_to_ocata", "find_location",
    "check_until_criterion", "check_release_criterion", "release_samples", "singleton_verdict",
]
