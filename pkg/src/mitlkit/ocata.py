"""One-clock alternating timed automata under the interval semantics.

Transition formulas are trees over locations, clock constraints and the
reset binder ``x.``; they are normalised into arcs (one per disjunct of a
disjunctive normal form). Configurations map each location to a sorted
tuple of pairwise disjoint intervals. The transition system is
parametrised by an approximation function applied after every discrete
step.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence

from .core import ZERO, Interval, TimedWord, clock_copies, format_rational, rational

# -- transition formulas -----------------------------------------------------


class Gamma:
    """Base class of transition formulas."""

    def __and__(self, other: "Gamma") -> "Gamma":
        return GAnd(self, other)

    def __or__(self, other: "Gamma") -> "Gamma":
        return GOr(self, other)


@dataclass(frozen=True)
class GTrue(Gamma):
    def __str__(self):
        return "true"


@dataclass(frozen=True)
class GFalse(Gamma):
    def __str__(self):
        return "false"


@dataclass(frozen=True)
class GLoc(Gamma):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class GClock(Gamma):
    """Clock constraint ``x op c``; ``c is None`` stands for +inf.

    Besides the four comparison operators, ``==`` and ``!=`` are accepted
    and rewritten during normalisation.
    """

    op: str
    const: Optional[int]

    def __post_init__(self):
        if self.op not in ("<", "<=", ">", ">=", "==", "!="):
            raise ValueError(f"unknown clock operator {self.op!r}")
        if self.const is not None and (int(self.const) != self.const or self.const < 0):
            raise ValueError("clock constants are natural numbers or +inf")

    def __str__(self):
        c = "inf" if self.const is None else str(self.const)
        return f"x{self.op}{c}"


@dataclass(frozen=True)
class GAnd(Gamma):
    left: Gamma
    right: Gamma

    def __str__(self):
        return f"({self.left} & {self.right})"


@dataclass(frozen=True)
class GOr(Gamma):
    left: Gamma
    right: Gamma

    def __str__(self):
        return f"({self.left} | {self.right})"


@dataclass(frozen=True)
class GReset(Gamma):
    body: Gamma

    def __str__(self):
        return f"x.{self.body}"


def conj(*parts: Gamma) -> Gamma:
    if not parts:
        return GTrue()
    out = parts[0]
    for p in parts[1:]:
        out = GAnd(out, p)
    return out


def disj(*parts: Gamma) -> Gamma:
    if not parts:
        return GFalse()
    out = parts[0]
    for p in parts[1:]:
        out = GOr(out, p)
    return out


# -- arcs ---------------------------------------------------------------------

Constraint = tuple[str, Optional[int]]
Target = tuple[str, bool]


@dataclass(frozen=True)
class ArcBody:
    """One disjunct: target locations (with reset flag) and a guard."""

    targets: frozenset[Target]
    guard: tuple[Constraint, ...] = ()

    def holds_on(self, interval: Interval) -> bool:
        return all(interval.sat(op, c) for op, c in self.guard)

    def sorted_targets(self) -> list[Target]:
        return sorted(self.targets, key=lambda t: (t[0], t[1]))

    def __str__(self) -> str:
        parts = [("x." if r else "") + loc for loc, r in self.sorted_targets()]
        parts += [f"x{op}{'inf' if c is None else c}" for op, c in self.guard]
        return " & ".join(parts) if parts else "true"


@dataclass(frozen=True)
class Arc:
    source: str
    letter: str
    body: ArcBody

    @property
    def targets(self) -> frozenset[Target]:
        return self.body.targets

    @property
    def guard(self) -> tuple[Constraint, ...]:
        return self.body.guard


def _static(op: str, value: Fraction, c: Optional[int]) -> bool:
    return Interval.point(value).sat(op, c)


def _clock_literals(op: str, c: Optional[int]) -> list[frozenset]:
    """DNF of a single constraint on the running clock."""
    if op == "!=":
        return _clock_literals("<", c) + _clock_literals(">", c)
    if op == "==":
        lo, hi = _clock_literals(">=", c), _clock_literals("<=", c)
        return [a | b for a in lo for b in hi]
    if c is None:
        return [frozenset()] if op in ("<", "<=") else []
    if op == "<" and c == 0:
        return []
    if op == ">=" and c == 0:
        return [frozenset()]
    return [frozenset({("C", op, c)})]


def _dnf(g: Gamma, reset: bool) -> list[frozenset]:
    if isinstance(g, GTrue):
        return [frozenset()]
    if isinstance(g, GFalse):
        return []
    if isinstance(g, GLoc):
        return [frozenset({("L", g.name, reset)})]
    if isinstance(g, GClock):
        if reset:
            # x.(x op c) is the static test 0 op c
            if g.op == "!=":
                ok = g.const != 0
            elif g.op == "==":
                ok = g.const == 0
            else:
                ok = _static(g.op, Fraction(0), g.const)
            return [frozenset()] if ok else []
        return _clock_literals(g.op, g.const)
    if isinstance(g, GOr):
        return _dnf(g.left, reset) + _dnf(g.right, reset)
    if isinstance(g, GAnd):
        left = _dnf(g.left, reset)
        if not left:
            return []
        right = _dnf(g.right, reset)
        return [a | b for a in left for b in right]
    if isinstance(g, GReset):
        return _dnf(g.body, True)
    raise TypeError(f"not a transition formula: {g!r}")


def _tighten(guard: Iterable[Constraint]) -> Optional[frozenset]:
    """Keep the strongest lower and upper bound; ``None`` if no clock
    value ``v >= 0`` satisfies the conjunction."""
    lower: Optional[Constraint] = None
    upper: Optional[Constraint] = None
    for op, c in guard:
        if op in (">", ">="):
            if lower is None or c > lower[1] or (c == lower[1] and op == ">"):
                lower = (op, c)
        elif upper is None or c < upper[1] or (c == upper[1] and op == "<"):
            upper = (op, c)
    if lower is not None and upper is not None:
        lo, hi = lower[1], upper[1]
        if lo > hi or (lo == hi and (lower[0] == ">" or upper[0] == "<")):
            return None
    return frozenset(("C",) + b for b in (lower, upper) if b is not None)


_OP_ORDER = {"<": 0, "<=": 1, ">": 2, ">=": 3}


def normalize_dnf(g: Gamma) -> list[ArcBody]:
    """Rewrite ``g`` into arcs.

    Resets are pushed to the leaves, ``x.(x op c)`` is decided statically,
    ``!=`` becomes two disjuncts, guards keep their strongest lower and
    upper bound, and subsumed or unsatisfiable disjuncts are dropped.
    Order follows the formula, first occurrence wins.
    """
    disjuncts = []
    seen = set()
    for lits in _dnf(g, False):
        bounds = _tighten((lit[1], lit[2]) for lit in lits if lit[0] == "C")
        if bounds is None:
            continue
        lits = frozenset(lit for lit in lits if lit[0] == "L") | bounds
        if lits not in seen:
            seen.add(lits)
            disjuncts.append(lits)
    # absorption: a disjunct implied by a strictly weaker one is redundant
    kept = [d for d in disjuncts if not any(e < d for e in disjuncts)]
    bodies = []
    for lits in kept:
        targets = frozenset((lit[1], lit[2]) for lit in lits if lit[0] == "L")
        guard = tuple(
            sorted(((lit[1], lit[2]) for lit in lits if lit[0] == "C"), key=lambda x: (_OP_ORDER[x[0]], x[1]))
        )
        bodies.append(ArcBody(targets, guard))
    return bodies


# -- configurations -------------------------------------------------------------

State = tuple[str, Interval]


class OverlapError(ValueError):
    """Two distinct intervals at one location are not disjoint."""


@dataclass(frozen=True)
class Configuration:
    """Finite set of states whose intervals at a same location are disjoint.

    Stored as a sorted tuple of ``(location, intervals)`` with each
    interval tuple sorted; locations without intervals are omitted.
    """

    items: tuple[tuple[str, tuple[Interval, ...]], ...] = ()

    @classmethod
    def of(cls, states: Iterable[State]) -> "Configuration":
        """Build from states; identical states collapse, overlaps raise."""
        by_loc: dict[str, set[Interval]] = {}
        for loc, interval in states:
            by_loc.setdefault(loc, set()).add(interval)
        items = []
        for loc in sorted(by_loc):
            ivs = tuple(sorted(by_loc[loc], key=Interval.sort_key))
            for a, b in zip(ivs, ivs[1:]):
                if not a.lt(b):
                    raise OverlapError(f"{a} and {b} overlap at {loc}")
            items.append((loc, ivs))
        return cls(tuple(items))

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Iterable[Interval]]) -> "Configuration":
        return cls.of((loc, i) for loc, ivs in mapping.items() for i in ivs)

    @classmethod
    def initial(cls, location: str) -> "Configuration":
        return cls(((location, (ZERO,)),))

    def __getitem__(self, loc: str) -> tuple[Interval, ...]:
        for name, ivs in self.items:
            if name == loc:
                return ivs
        return ()

    def get(self, loc: str) -> tuple[Interval, ...]:
        return self[loc]

    @property
    def locations(self) -> tuple[str, ...]:
        return tuple(loc for loc, _ in self.items)

    def states(self) -> Iterator[State]:
        for loc, ivs in self.items:
            for i in ivs:
                yield loc, i

    def __len__(self) -> int:
        return sum(len(ivs) for _, ivs in self.items)

    def __bool__(self) -> bool:
        return bool(self.items)

    def elapse(self, t) -> "Configuration":
        t = rational(t)
        return Configuration(tuple((loc, tuple(i.shift(t) for i in ivs)) for loc, ivs in self.items))

    def replace(self, loc: str, intervals: Sequence[Interval]) -> "Configuration":
        mapping = {name: ivs for name, ivs in self.items}
        mapping[loc] = tuple(intervals)
        return Configuration.from_mapping(mapping)

    def clock_copies(self) -> int:
        return sum(clock_copies(ivs) for _, ivs in self.items)

    def to_json(self):
        return {loc: [str(i) for i in ivs] for loc, ivs in self.items}

    def __str__(self) -> str:
        parts = []
        for loc, i in self.states():
            parts.append(f"({loc},{format_rational(i.lo)})" if i.singular else f"({loc},{i})")
        return "{" + ", ".join(parts) + "}"

    def __repr__(self) -> str:
        return f"Configuration({self})"


EMPTY = Configuration()


def time_elapse(config: Configuration, t) -> Configuration:
    return config.elapse(t)


def config_clock_copies(config: Configuration) -> int:
    return config.clock_copies()


# -- automata ---------------------------------------------------------------------


@dataclass(frozen=True)
class Ocata:
    """One-clock alternating timed automaton with arcs kept per (location, letter)."""

    alphabet: tuple[str, ...]
    locations: tuple[str, ...]
    initial: str
    accepting: frozenset[str]
    table: Mapping[tuple[str, str], tuple[ArcBody, ...]] = field(hash=False, compare=False)
    tags: Mapping[str, object] = field(default_factory=dict, hash=False, compare=False, repr=False)

    def __post_init__(self):
        locs = set(self.locations)
        if self.initial not in locs:
            raise ValueError(f"initial location {self.initial!r} is not a location")
        if not self.accepting <= locs:
            raise ValueError("accepting locations must be locations")
        for (loc, letter), bodies in self.table.items():
            if loc not in locs or letter not in self.alphabet:
                raise ValueError(f"transition on unknown ({loc!r}, {letter!r})")
            for body in bodies:
                for target, _ in body.targets:
                    if target not in locs:
                        raise ValueError(f"arc from {loc!r} targets unknown location {target!r}")

    @classmethod
    def from_formulas(
        cls,
        alphabet: Iterable[str],
        locations: Iterable[str],
        initial: str,
        accepting: Iterable[str],
        delta: Mapping[tuple[str, str], Gamma],
        tags: Optional[Mapping[str, object]] = None,
    ) -> "Ocata":
        """Missing ``(location, letter)`` entries mean ``false``."""
        alphabet = tuple(sorted(set(alphabet)))
        table = {key: tuple(normalize_dnf(g)) for key, g in delta.items()}
        return cls(alphabet, tuple(locations), initial, frozenset(accepting), table, dict(tags or {}))

    def arcs(self, loc: str, letter: str) -> tuple[ArcBody, ...]:
        return self.table.get((loc, letter), ())

    def arc_list(self) -> list[Arc]:
        out = []
        for loc in self.locations:
            for letter in self.alphabet:
                out.extend(Arc(loc, letter, b) for b in self.arcs(loc, letter))
        return out

    def is_accepting(self, config: Configuration) -> bool:
        return all(loc in self.accepting for loc in config.locations)

    def to_json(self) -> str:
        arcs = []
        for arc in self.arc_list():
            arcs.append(
                {
                    "source": arc.source,
                    "letter": arc.letter,
                    "guard": [{"op": op, "const": "inf" if c is None else c} for op, c in arc.guard],
                    "targets": [{"loc": t, "reset": r} for t, r in arc.body.sorted_targets()],
                }
            )
        doc = {
            "alphabet": list(self.alphabet),
            "locations": list(self.locations),
            "initial": self.initial,
            "accepting": sorted(self.accepting),
            "arcs": arcs,
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Ocata":
        doc = json.loads(text)
        table: dict[tuple[str, str], list[ArcBody]] = {}
        for arc in doc["arcs"]:
            guard = tuple((g["op"], None if g["const"] == "inf" else int(g["const"])) for g in arc["guard"])
            targets = frozenset((t["loc"], bool(t["reset"])) for t in arc["targets"])
            table.setdefault((arc["source"], arc["letter"]), []).append(ArcBody(targets, guard))
        return cls(
            tuple(doc["alphabet"]),
            tuple(doc["locations"]),
            doc["initial"],
            frozenset(doc["accepting"]),
            {k: tuple(v) for k, v in table.items()},
        )

    def to_dot(self) -> Iterator[str]:
        """Yield DOT lines. Conjunctive arcs split at a junction point."""
        ids = {loc: f"q{k}" for k, loc in enumerate(self.locations)}
        yield "digraph ocata {"
        yield "  rankdir=LR;"
        yield '  init [shape=point, label=""];'
        for loc in self.locations:
            shape = "doublecircle" if loc in self.accepting else "circle"
            yield f'  {ids[loc]} [shape={shape}, label="{_dot_escape(loc)}"];'
        yield f"  init -> {ids[self.initial]};"
        for n, arc in enumerate(self.arc_list()):
            label = arc.letter
            if arc.guard:
                label += ", " + " & ".join(f"x{op}{'inf' if c is None else c}" for op, c in arc.guard)
            targets = arc.body.sorted_targets()
            if len(targets) == 1:
                t, r = targets[0]
                lab = label + (", x:=0" if r else "")
                yield f'  {ids[arc.source]} -> {ids[t]} [label="{_dot_escape(lab)}"];'
                continue
            junction = f"j{n}"
            yield f'  {junction} [shape=point, width=0.05, label=""];'
            yield f'  {ids[arc.source]} -> {junction} [arrowhead=none, label="{_dot_escape(label)}"];'
            for t, r in targets:
                extra = ' [label="x:=0"]' if r else ""
                yield f"  {junction} -> {ids[t]}{extra};"
        yield "}"


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def is_accepting(automaton: Ocata, config: Configuration) -> bool:
    return automaton.is_accepting(config)


# -- minimal models and successors -------------------------------------------------


def _candidates(automaton: Ocata, loc: str, letter: str, interval: Interval):
    """Minimal models as ``(arc index, frozenset of states)`` pairs."""
    found: list[tuple[int, frozenset]] = []
    seen = set()
    for k, body in enumerate(automaton.arcs(loc, letter)):
        if not body.holds_on(interval):
            continue
        model = frozenset((t, ZERO if r else interval) for t, r in body.targets)
        if model in seen:
            continue
        seen.add(model)
        found.append((k, model))
    return [(k, m) for k, m in found if not any(other < m for _, other in found)]


def minimal_models(automaton: Ocata, loc: str, letter: str, interval: Interval) -> list[Configuration]:
    """Minimal models of ``delta(loc, letter)`` with respect to ``interval``.

    One candidate per arc whose guard holds on the whole interval,
    restricted to the inclusion-minimal ones.
    """
    out = []
    for _, model in _candidates(automaton, loc, letter, interval):
        try:
            out.append(Configuration.of(model))
        except OverlapError:
            continue
    return out


ApproxFn = Callable[[Configuration], Sequence[Configuration]]


def _identity(config: Configuration) -> list[Configuration]:
    return [config]


@dataclass(frozen=True)
class Choice:
    """The arc fired by one state during a discrete step."""

    location: str
    interval: Interval
    arc: int


@dataclass(frozen=True)
class Firing:
    """One discrete step: the union of models and the approximated result."""

    merged: Configuration
    result: Configuration
    choices: tuple[Choice, ...]


def firings(automaton: Ocata, config: Configuration, letter: str, f: Optional[ApproxFn] = None) -> list[Firing]:
    """All discrete successors with the choices that produce them.

    Unions placing two distinct overlapping intervals on one location are
    discarded; identical states simply collapse.
    """
    f = f or _identity
    partial: dict[frozenset, tuple[Choice, ...]] = {frozenset(): ()}
    for loc, interval in config.states():
        models = _candidates(automaton, loc, letter, interval)
        if not models:
            return []
        nxt: dict[frozenset, tuple[Choice, ...]] = {}
        for states, choices in partial.items():
            for k, model in models:
                union = states | model
                if union in nxt or not _disjoint_per_location(union):
                    continue
                nxt[union] = choices + (Choice(loc, interval, k),)
        partial = nxt
        if not partial:
            return []
    out = []
    seen = set()
    for states, choices in partial.items():
        merged = Configuration.of(states)
        for result in f(merged):
            if (merged, result) in seen:
                continue
            seen.add((merged, result))
            out.append(Firing(merged, result, choices))
    return out


def _disjoint_per_location(states: frozenset) -> bool:
    by_loc: dict[str, list[Interval]] = {}
    for loc, i in states:
        by_loc.setdefault(loc, []).append(i)
    for ivs in by_loc.values():
        if len(ivs) > 1:
            ivs.sort(key=Interval.sort_key)
            if any(not a.lt(b) for a, b in zip(ivs, ivs[1:])):
                return False
    return True


def discrete_successors(
    automaton: Ocata, config: Configuration, letter: str, f: Optional[ApproxFn] = None
) -> list[Configuration]:
    """Distinct configurations reachable by one discrete ``letter`` step."""
    out = []
    seen = set()
    for firing in firings(automaton, config, letter, f):
        if firing.result not in seen:
            seen.add(firing.result)
            out.append(firing.result)
    return out


# -- runs -------------------------------------------------------------------------


@dataclass(frozen=True)
class Step:
    delay: Fraction
    letter: str
    elapsed: Configuration
    merged: Configuration
    result: Configuration
    choices: tuple[Choice, ...]


@dataclass(frozen=True)
class Run:
    start: Configuration
    steps: tuple[Step, ...]

    def configurations(self) -> list[Configuration]:
        """``C_0, C_1, ..., C_2n`` alternating elapse and discrete steps."""
        out = [self.start]
        for s in self.steps:
            out += [s.elapsed, s.result]
        return out

    @property
    def last(self) -> Configuration:
        return self.steps[-1].result if self.steps else self.start

    def max_clock_copies(self) -> int:
        return max(c.clock_copies() for c in self.configurations())

    def render(self) -> Iterator[str]:
        yield f"start  {self.start}"
        for k, s in enumerate(self.steps, 1):
            yield f"{k:>3}  wait {format_rational(s.delay)}: {s.elapsed}"
            yield f"     read {s.letter}: {s.merged}"
            if s.result != s.merged:
                yield f"     approx: {s.result}"


@dataclass(frozen=True)
class Blocking:
    """Deepest point reached by a failed search."""

    position: int
    configuration: Configuration
    reason: str
    trace: tuple[Step, ...]


@dataclass(frozen=True)
class AcceptResult:
    accepted: bool
    witness: Optional[Run] = None
    failure: Optional[Blocking] = None
    explored: int = 0

    def __bool__(self) -> bool:
        return self.accepted


def accepts_from(
    automaton: Ocata,
    start: Configuration,
    word: TimedWord,
    f: Optional[ApproxFn] = None,
    admissible: Optional[Callable[[Configuration], bool]] = None,
) -> AcceptResult:
    """Depth-first search for an accepting f-run from ``start``.

    ``admissible`` optionally prunes configurations (used to look for runs
    respecting extra copy bounds). Configurations already explored at the
    same depth are not explored again.
    """
    delays = word.delays()
    letters = word.letters
    n = len(word)
    if admissible is not None and not admissible(start):
        return AcceptResult(False, failure=Blocking(0, start, "start configuration not admissible", ()))
    stack: list[tuple[Configuration, tuple]] = [(start, ())]
    visited: set[tuple[int, Configuration]] = {(0, start)}
    deepest: Optional[Blocking] = None
    explored = 0
    while stack:
        config, path = stack.pop()
        depth = len(path)
        explored += 1
        if depth == n:
            if automaton.is_accepting(config):
                return AcceptResult(True, witness=Run(start, path), explored=explored)
            if deepest is None or depth >= deepest.position:
                deepest = Blocking(depth, config, "final configuration is not accepting", path)
            continue
        elapsed = config.elapse(delays[depth])
        fired = firings(automaton, elapsed, letters[depth], f)
        pushed = False
        # reversed so that the first successor is explored first
        for firing in reversed(fired):
            key = (depth + 1, firing.result)
            if key in visited:
                continue
            visited.add(key)
            if admissible is not None and not admissible(firing.result):
                continue
            step = Step(delays[depth], letters[depth], elapsed, firing.merged, firing.result, firing.choices)
            stack.append((firing.result, path + (step,)))
            pushed = True
        if not pushed and (deepest is None or depth + 1 > deepest.position):
            reason = "no transition can be fired" if not fired else "every successor was pruned"
            deepest = Blocking(depth + 1, elapsed, reason, path)
    return AcceptResult(False, failure=deepest, explored=explored)


def accepts(automaton: Ocata, word: TimedWord, f: Optional[ApproxFn] = None, **kwargs) -> AcceptResult:
    return accepts_from(automaton, Configuration.initial(automaton.initial), word, f, **kwargs)


def replay(automaton: Ocata, run: Run, word: TimedWord, f: Optional[ApproxFn] = None) -> bool:
    """Check that every step of ``run`` is a legal transition on ``word``."""
    if len(run.steps) != len(word):
        return False
    config = run.start
    for step, delay, letter in zip(run.steps, word.delays(), word.letters):
        if step.delay != delay or step.letter != letter:
            return False
        elapsed = config.elapse(delay)
        if elapsed != step.elapsed:
            return False
        options = firings(automaton, elapsed, letter, f)
        if not any(o.merged == step.merged and o.result == step.result for o in options):
            return False
        # the recorded choices must rebuild the merged configuration
        states = []
        for choice in step.choices:
            body = automaton.arcs(choice.location, letter)[choice.arc]
            if not body.holds_on(choice.interval):
                return False
            states += [(t, ZERO if r else choice.interval) for t, r in body.targets]
        if Configuration.of(states) != step.merged:
            return False
        config = step.result
    return True


__all__ = [
    "Gamma", "GTrue", "GFalse", "GLoc", "GClock", "GAnd", "GOr", "GReset", "conj", "disj",
    "ArcBody", "Arc", "normalize_dnf", "Configuration", "EMPTY", "OverlapError", "Ocata",
    "minimal_models", "firings", "discrete_successors", "time_elapse", "is_accepting",
    "accepts_from", "accepts", "replay", "config_clock_copies", "Run", "Step", "Choice",
    "Firing", "Blocking", "AcceptResult", "ApproxFn",
]
