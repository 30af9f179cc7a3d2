"""Timed automata simulating the bounded interval semantics of a compiled OCATA.

A location assigns to every OCATA location a sequence of clock pairs; the
pair ``(x, y)`` denotes the interval ``[v(x), v(y)]``. A singular interval
is held by one clock used for both components, ``(x, x)``, so the number of
clocks in use equals the clock-copy count of the encoded configuration.
Locations are built
lazily and kept canonical: clocks are numbered in order of first use, so
two locations with the same shape are the same object.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

from .core import TimedWord, format_rational
from .ocata import Ocata

Pair = tuple[int, int]
# a clock guard: (clock index, operator, constant or None for +inf)
ClockGuard = tuple[int, str, Optional[int]]


class ClockBudgetExceeded(RuntimeError):
    """A step needs more clocks than the automaton owns."""


@dataclass(frozen=True)
class TaLocation:
    """Clock pairs per OCATA location, in OCATA location order."""

    slots: tuple[tuple[str, tuple[Pair, ...]], ...]

    def pairs(self, loc: str) -> tuple[Pair, ...]:
        for name, ps in self.slots:
            if name == loc:
                return ps
        return ()

    @property
    def live(self) -> tuple[str, ...]:
        return tuple(name for name, ps in self.slots if ps)

    def clocks_used(self) -> int:
        return sum(1 if x == y else 2 for _, ps in self.slots for x, y in ps)

    def __str__(self) -> str:
        parts = []
        for name, ps in self.slots:
            if ps:
                parts.append(name + ":" + "".join(f"(c{x})" if x == y else f"(c{x},c{y})" for x, y in ps))
        return "{" + " ".join(parts) + "}"


@dataclass(frozen=True)
class TaTransition:
    """Guard and resets refer to clocks of the source location; ``source_of``
    maps each clock of the target to the source clock it continues, or to
    ``None`` when the clock is reset."""

    letter: str
    guard: tuple[ClockGuard, ...]
    target: TaLocation
    source_of: tuple[Optional[int], ...]

    @property
    def resets(self) -> frozenset[int]:
        return frozenset(k for k, src in enumerate(self.source_of) if src is None)

    def enabled(self, valuation: tuple[Fraction, ...]) -> bool:
        return _holds(self.guard, valuation)

    def apply(self, valuation: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
        """Valuation of the target's clocks (only clocks in use are stored)."""
        return tuple(Fraction(0) if src is None else valuation[src] for src in self.source_of)

    def label(self) -> str:
        guard = " & ".join(f"c{c}{op}{'inf' if k is None else k}" for c, op, k in self.guard)
        resets = ",".join(f"c{k}" for k in sorted(self.resets))
        text = self.letter
        if guard:
            text += f", {guard}"
        if resets:
            text += f", {{{resets}}}:=0"
        return text


def _holds(guard: tuple[ClockGuard, ...], valuation: tuple[Fraction, ...]) -> bool:
    return all(_check(valuation[c], op, k) for c, op, k in guard)


def _check(value: Fraction, op: str, c: Optional[int]) -> bool:
    if c is None:
        return op in ("<", "<=")
    return {"<": value < c, "<=": value <= c, ">": value > c, ">=": value >= c}[op]


# While a successor is assembled, a pair is described by the source clocks
# of its components; ``None`` marks a reset clock. ``(s,)`` is a singular
# pair held by one clock.
_FRESH = None
_NEW_POINT = (_FRESH,)


def _sources(pair: Pair) -> tuple:
    x, y = pair
    return (x,) if x == y else (x, y)


def _canonical(order: tuple[str, ...], pending: dict[str, list[tuple]]) -> tuple[TaLocation, tuple]:
    """Number clocks in order of appearance; return the location and the
    source clock (or ``None``) of every new clock."""
    slots = []
    source_of = []
    for loc in order:
        pairs = []
        for sources in pending.get(loc, ()):
            first = len(source_of)
            source_of.extend(sources)
            pairs.append((first, len(source_of) - 1))
        slots.append((loc, tuple(pairs)))
    return TaLocation(tuple(slots)), tuple(source_of)


@dataclass(frozen=True)
class ArcChoice:
    """The successors for one choice of arcs, and the guards of the layouts
    that would need more clocks than available."""

    transitions: tuple[TaTransition, ...]
    overflow: tuple[tuple[ClockGuard, ...], ...]


@dataclass
class TimedAutomaton:
    """Lazily expanded timed automaton attached to an OCATA.

    Layouts needing more than ``clock_count`` clocks do not exist in the
    automaton and are dropped (``None`` lifts the limit). With ``strict``,
    :func:`ta_accepts` raises :class:`ClockBudgetExceeded` when dropping
    them changed the verdict.
    """

    ocata: Ocata
    clock_count: Optional[int]
    strict: bool = True
    _memo: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.clock_count is not None and self.clock_count < 1:
            raise ValueError("at least one clock is needed")
        for arc in self.ocata.arc_list():
            for target, reset in arc.targets:
                if not reset and target != arc.source:
                    raise ValueError(
                        f"arc from {arc.source!r} keeps {target!r} without reset; "
                        "only self-loops and resets are supported"
                    )

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.ocata.alphabet

    @property
    def initial(self) -> TaLocation:
        order = self.ocata.locations
        return TaLocation(tuple((loc, ((0, 0),) if loc == self.ocata.initial else ()) for loc in order))

    def is_accepting(self, location: TaLocation) -> bool:
        return all(loc in self.ocata.accepting for loc in location.live)

    def transitions(self, location: TaLocation, letter: str) -> tuple[TaTransition, ...]:
        return tuple(t for group in self.groups(location, letter) for t in group.transitions)

    def groups(self, location: TaLocation, letter: str) -> tuple["ArcChoice", ...]:
        """Successors grouped by the choice of one arc per clock pair."""
        key = (location, letter)
        hit = self._memo.get(key)
        if hit is None:
            # insertion is idempotent, so concurrent fills agree
            hit = self._memo.setdefault(key, tuple(self._build(location, letter)))
        return hit

    def _build(self, location: TaLocation, letter: str) -> Iterator["ArcChoice"]:
        pairs = [(loc, p) for loc, ps in location.slots for p in ps]
        choices = [self.ocata.arcs(loc, letter) for loc, _ in pairs]
        for picked in itertools.product(*choices):
            guard: set[ClockGuard] = set()
            kept: dict[str, list[Pair]] = {}
            reset_targets: set[str] = set()
            for (loc, (x, y)), body in zip(pairs, picked):
                for op, c in body.guard:
                    guard |= {(x, op, c), (y, op, c)}
                for target, reset in body.targets:
                    if reset:
                        reset_targets.add(target)
                    else:
                        kept.setdefault(loc, []).append((x, y))
            fitting = []
            overflow = []
            for extra, pending in self._layouts(kept, reset_targets):
                full_guard = tuple(sorted(guard | set(extra), key=_guard_key))
                target, source_of = _canonical(self.ocata.locations, pending)
                if self.clock_count is not None and target.clocks_used() > self.clock_count:
                    overflow.append(full_guard)
                    continue
                t = TaTransition(letter, full_guard, target, source_of)
                if t not in fitting:
                    fitting.append(t)
            yield ArcChoice(tuple(fitting), tuple(overflow))

    def _layouts(self, kept: dict[str, list[Pair]], reset_targets: set[str]):
        """Per OCATA location, the ways of laying out kept pairs and a fresh
        ``[0,0]``; yields ``(extra guard, pending pair sources)``."""
        per_loc = []
        for loc in self.ocata.locations:
            ps = kept.get(loc, [])
            layout = [_sources(p) for p in ps]
            options = []
            if loc in reset_targets:
                if not ps:
                    options.append(((), [_NEW_POINT]))
                else:
                    (x1, y1) = ps[0]
                    # the kept first interval starts after 0: fresh or merged
                    options.append((((x1, ">", 0),), [_NEW_POINT] + layout))
                    options.append((((x1, ">", 0),), [(_FRESH, y1)] + layout[1:]))
                    # it is [0,0] itself: the fresh copy coincides with it
                    options += self._zero_first(ps, layout)
            else:
                options.append(((), layout))
                if len(ps) >= 2:
                    options += self._zero_first(ps, layout)[1:]
            per_loc.append(options)
        for combo in itertools.product(*per_loc):
            extra = tuple(g for guard, _ in combo for g in guard)
            pending = {loc: layout for loc, (_, layout) in zip(self.ocata.locations, combo)}
            yield extra, pending

    @staticmethod
    def _zero_first(ps: list[Pair], layout: list[tuple]):
        """Layouts when the first kept interval is ``[0,0]``: keep it, or
        absorb it into the second one."""
        (x1, y1) = ps[0]
        options = [(((y1, "<=", 0),), layout)]
        if len(ps) >= 2:
            (_, y2) = ps[1]
            options.append((((y1, "<=", 0),), [(x1, y2)] + layout[2:]))
        return options

    # -- exports ---------------------------------------------------------------

    def explore(self, cap: int = 10_000):
        """Breadth-first discovery of reachable locations (up to ``cap``)."""
        start = self.initial
        index = {start: 0}
        edges = []
        queue = deque([start])
        capped = False
        while queue:
            loc = queue.popleft()
            for letter in self.alphabet:
                for t in self.transitions(loc, letter):
                    if t.target not in index:
                        if len(index) >= cap:
                            capped = True
                            continue
                        index[t.target] = len(index)
                        queue.append(t.target)
                    edges.append((index[loc], t))
        return index, edges, capped

    def to_json(self, cap: int = 10_000) -> str:
        index, edges, capped = self.explore(cap)
        locations = sorted(index, key=index.get)
        doc = {
            "clocks": self.clock_count,
            "initial": 0,
            "capped": capped,
            "locations": [
                {"id": index[loc], "pairs": {n: [list(p) for p in ps] for n, ps in loc.slots if ps},
                 "accepting": self.is_accepting(loc)}
                for loc in locations
            ],
            "transitions": [
                {
                    "source": src,
                    "letter": t.letter,
                    "guard": [{"clock": c, "op": op, "const": "inf" if k is None else k} for c, op, k in t.guard],
                    "resets": sorted(t.resets),
                    "target": index[t.target],
                }
                for src, t in edges
                if t.target in index
            ],
        }
        return json.dumps(doc, indent=2)

    def to_dot(self, cap: int = 10_000) -> Iterator[str]:
        index, edges, _ = self.explore(cap)
        yield "digraph ta {"
        yield "  rankdir=LR;"
        yield '  init [shape=point, label=""];'
        for loc, k in sorted(index.items(), key=lambda kv: kv[1]):
            shape = "doublecircle" if self.is_accepting(loc) else "box"
            label = str(loc).replace('"', '\\"')
            yield f'  s{k} [shape={shape}, label="{label}"];'
        yield "  init -> s0;"
        for src, t in edges:
            if t.target in index:
                yield f'  s{src} -> s{index[t.target]} [label="{t.label()}"];'
        yield "}"


def _guard_key(g: ClockGuard):
    c, op, k = g
    return (c, op, -1 if k is None else k)


def ocata_to_ta(automaton: Ocata, clock_count: int, strict: bool = True) -> TimedAutomaton:
    return TimedAutomaton(automaton, clock_count, strict)


@dataclass(frozen=True)
class TaConfig:
    location: TaLocation
    valuation: tuple[Fraction, ...]

    def intervals(self) -> dict[str, list[str]]:
        """The OCATA configuration this configuration stands for."""
        out = {}
        for loc, ps in self.location.slots:
            if ps:
                v = self.valuation
                out[loc] = [f"[{format_rational(v[x])},{format_rational(v[y])}]" for x, y in ps]
        return out


@dataclass(frozen=True)
class TaResult:
    accepted: bool
    run: tuple[TaConfig, ...] = ()
    max_clocks: int = 0
    overflows: int = 0
    budget_binding: bool = False

    def __bool__(self):
        return self.accepted


def _search(automaton: "TimedAutomaton", word: TimedWord) -> TaResult:
    n = len(word)
    delays = word.delays()
    letters = word.letters
    start = TaConfig(automaton.initial, (Fraction(0),))
    stack = [(start, (start,))]
    visited = {(0, start)}
    most = 0
    overflows = 0
    while stack:
        config, path = stack.pop()
        depth = len(path) - 1
        most = max(most, config.location.clocks_used())
        if depth == n:
            if automaton.is_accepting(config.location):
                return TaResult(True, path, most, overflows)
            continue
        d = delays[depth]
        valuation = tuple(v + d for v in config.valuation)
        successors = []
        for group in automaton.groups(config.location, letters[depth]):
            enabled = [t for t in group.transitions if t.enabled(valuation)]
            if not enabled and any(_holds(g, valuation) for g in group.overflow):
                overflows += 1
            for t in enabled:
                nxt = TaConfig(t.target, t.apply(valuation))
                key = (depth + 1, nxt)
                if key in visited:
                    continue
                visited.add(key)
                successors.append(nxt)
        for nxt in reversed(successors):
            stack.append((nxt, path + (nxt,)))
    return TaResult(False, (), most, overflows)


def ta_accepts(automaton: "TimedAutomaton", word: TimedWord) -> TaResult:
    """Depth-first search for an accepting run with the forced delays of ``word``.

    When the search fails after dropping over-budget successors, it is
    repeated without a clock limit; if that accepts, the budget was too
    small (``budget_binding``), which raises in strict mode.
    """
    result = _search(automaton, word)
    if result.accepted or not result.overflows:
        return result
    unlimited = TimedAutomaton(automaton.ocata, None, strict=False)
    if not _search(unlimited, word).accepted:
        return result
    if automaton.strict:
        raise ClockBudgetExceeded(
            f"{automaton.clock_count} clocks are not enough to accept {word}"
        )
    return TaResult(False, (), result.max_clocks, result.overflows, budget_binding=True)


@dataclass(frozen=True)
class TaStats:
    clock_count: int
    locations_discovered: int
    capped: bool


def ta_stats(automaton: TimedAutomaton, cap: int = 10_000) -> TaStats:
    index, _, capped = automaton.explore(cap)
    return TaStats(automaton.clock_count, len(index), capped)


__all__ = [
    "TaLocation", "TaTransition", "ArcChoice", "TimedAutomaton", "TaConfig", "TaResult", "TaStats",
    "ClockBudgetExceeded", "ocata_to_ta", "ta_accepts", "ta_stats",
]
