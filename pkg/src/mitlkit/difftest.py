"""Randomised differential testing of the four membership oracles.

For a formula and a word the harness compares: direct evaluation, the
compiled OCATA under the identity approximation, the same automaton under
its bounded approximation, and (optionally) the timed automaton. Every
trial derives its own generator from the campaign seed and its index, so
any single trial can be replayed in isolation.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .approx import FK, Hull, Identity, RandomGrouping, k_star, m_bound, until_weight
from .core import Interval, TimedWord, clock_copies
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
    atoms,
    satisfies,
    to_text,
)
from .ocata import (
    Configuration,
    GAnd,
    GClock,
    GFalse,
    GLoc,
    GOr,
    GReset,
    GTrue,
    Gamma,
    Ocata,
    accepts,
    replay,
)
from .ta import ocata_to_ta, ta_accepts
from .translate import location_count, mitl_to_ocata

FAILURE_CLASSES = (
    "eval_vs_id",
    "prop1_violation",
    "id_vs_fstar",
    "fstar_vs_ta",
    "bound_violation",
    "until_cap_violation",
    "replay_failure",
    "budget_exceeded",
)


@dataclass(frozen=True)
class GenConfig:
    max_modalities: int = 3
    max_const: int = 3
    max_len: int = 5
    denominator: int = 4
    horizon: int = 6
    alphabet: tuple[str, ...] = ("a", "b")


def trial_rng(seed: int, index: int) -> random.Random:
    return random.Random(f"{seed}:{index}")


# -- generators ------------------------------------------------------------------


def _interval(rng: random.Random, max_const: int) -> Interval:
    lo = rng.randint(0, max(0, max_const - 1))
    if rng.random() < 0.2:
        return Interval(Fraction(lo), None, rng.random() < 0.8, False)
    hi = rng.randint(lo + 1, max(lo + 1, max_const))
    return Interval(Fraction(lo), Fraction(hi), rng.random() < 0.8, rng.random() < 0.8)


def _literal(rng: random.Random, alphabet: Sequence[str]) -> Formula:
    r = rng.random()
    if r < 0.4:
        return Atom(rng.choice(alphabet))
    if r < 0.75:
        return NegAtom(rng.choice(alphabet))
    if r < 0.92:
        return Top()
    return Bottom()


def _build(rng: random.Random, mods: int, cfg: GenConfig, depth: int = 0) -> Formula:
    if mods == 0:
        if depth < 3 and rng.random() < 0.25:
            op = rng.choice((And, Or))
            return op(_literal(rng, cfg.alphabet), _literal(rng, cfg.alphabet))
        return _literal(rng, cfg.alphabet)
    if rng.random() < 0.3:
        split = rng.randint(0, mods)
        op = rng.choice((And, Or))
        return op(_build(rng, split, cfg, depth + 1), _build(rng, mods - split, cfg, depth + 1))
    rest = mods - 1
    split = rng.randint(0, rest)
    left = _build(rng, split, cfg, depth + 1)
    right = _build(rng, rest - split, cfg, depth + 1)
    op = rng.choice((Until, Release))
    if split == 0 and rng.random() < 0.4:
        # eventually / globally shapes are the common ones
        left = Top() if op is Until else Bottom()
    return op(left, _interval(rng, cfg.max_const), right)


def gen_formula(
    rng: random.Random,
    max_modalities: int = 3,
    max_const: int = 3,
    alphabet: Sequence[str] = ("a", "b"),
) -> Formula:
    """Random NNF formula with at most ``max_modalities`` modalities."""
    cfg = GenConfig(max_modalities, max_const, alphabet=tuple(alphabet))
    return _build(rng, rng.randint(0, max_modalities), cfg)


def gen_word(
    rng: random.Random,
    max_len: int = 5,
    denominator: int = 4,
    horizon: int = 6,
    alphabet: Sequence[str] = ("a", "b"),
) -> TimedWord:
    """Random word with non-decreasing timestamps on the grid ``k/denominator``."""
    n = rng.randint(0, max_len)
    ticks = sorted(rng.randint(0, horizon * denominator) for _ in range(n))
    return TimedWord(tuple((rng.choice(alphabet), Fraction(k, denominator)) for k in ticks))


def _gamma(rng: random.Random, locations: Sequence[str], max_const: int, depth: int) -> Gamma:
    r = rng.random()
    if depth >= 2 or r < 0.45:
        leaf = rng.random()
        if leaf < 0.35:
            return GLoc(rng.choice(locations))
        if leaf < 0.6:
            return GReset(GLoc(rng.choice(locations)))
        if leaf < 0.85:
            return GClock(rng.choice(("<", "<=", ">", ">=")), rng.randint(0, max_const))
        return GTrue() if rng.random() < 0.7 else GFalse()
    left = _gamma(rng, locations, max_const, depth + 1)
    right = _gamma(rng, locations, max_const, depth + 1)
    return GAnd(left, right) if r < 0.75 else GOr(left, right)


def gen_ocata(
    rng: random.Random, max_locations: int = 4, max_const: int = 2, alphabet: Sequence[str] = ("a", "b")
) -> Ocata:
    """Random automaton whose transition formulas are small random trees."""
    n = rng.randint(1, max_locations)
    locations = [f"l{k}" for k in range(n)]
    delta = {}
    for loc in locations:
        for letter in alphabet:
            delta[(loc, letter)] = _gamma(rng, locations, max_const, 0)
    accepting = [loc for loc in locations if rng.random() < 0.5]
    return Ocata.from_formulas(alphabet, locations, locations[0], accepting, delta)


def gen_approx(rng: random.Random):
    """A random approximation function satisfying the covering contract."""
    r = rng.random()
    if r < 0.5:
        return RandomGrouping(rng.randrange(10**6), width=rng.randint(1, 3))
    if r < 0.8:
        return FK(rng.randint(1, 6))
    return Hull(None)


# -- trials ------------------------------------------------------------------------


@dataclass
class TrialReport:
    index: int
    formula: str
    word: str
    eval: bool
    id: bool
    fstar: bool
    ta: Optional[bool] = None
    bound_k: int = 0
    max_copies: int = 0
    until_capped: Optional[bool] = None
    ta_overflows: int = 0
    failures: list[str] = field(default_factory=list)
    witness: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def until_caps(automaton: Ocata) -> dict[str, int]:
    """Per Until location, the copy count ``4 ceil(inf/|I|) + 2``."""
    caps = {}
    for name, tag in automaton.tags.items():
        if getattr(tag, "kind", None) == "until":
            caps[name] = until_weight(tag.formula.interval)
    return caps


def run_trial(
    phi: Formula, word: TimedWord, with_ta: bool = False, index: int = 0, check_caps: bool = True
) -> TrialReport:
    """Compute all verdicts and classify any disagreement."""
    letters = set(word.letters) | set(GenConfig().alphabet) | atoms(phi)
    automaton = mitl_to_ocata(phi, letters)
    k = k_star(phi, location_count(phi))
    fstar = FK(k)
    direct = satisfies(word, phi)
    by_id = accepts(automaton, word, Identity())
    by_fstar = accepts(automaton, word, fstar)
    report = TrialReport(index, to_text(phi), str(word), direct, by_id.accepted, by_fstar.accepted, bound_k=k)
    failures = report.failures
    if direct != by_id.accepted:
        failures.append("eval_vs_id")
    if by_fstar.accepted and not by_id.accepted:
        failures.append("prop1_violation")
    elif by_id.accepted and not by_fstar.accepted:
        failures.append("id_vs_fstar")
    if by_fstar.witness is not None:
        report.max_copies = by_fstar.witness.max_clock_copies()
        if report.max_copies > k:
            failures.append("bound_violation")
        if not replay(automaton, by_fstar.witness, word, fstar):
            failures.append("replay_failure")
        if check_caps:
            caps = until_caps(automaton)

            def within(config: Configuration) -> bool:
                return all(config.clock_copies() <= k and _loc_copies(config, loc) <= cap for loc, cap in caps.items())

            report.until_capped = accepts(automaton, word, fstar, admissible=within).accepted
            if not report.until_capped:
                failures.append("until_cap_violation")
    if with_ta:
        machine = ocata_to_ta(automaton, m_bound(phi).M, strict=False)
        result = ta_accepts(machine, word)
        report.ta = result.accepted
        report.ta_overflows = result.overflows
        if result.accepted != by_fstar.accepted:
            failures.append("fstar_vs_ta")
        if result.budget_binding:
            failures.append("budget_exceeded")
    if failures:
        run = by_fstar.witness or by_id.witness
        if run is not None:
            report.witness = list(run.render())
        elif by_id.failure is not None:
            report.witness = [f"blocked at position {by_id.failure.position}: {by_id.failure.configuration}"]
    return report


def _loc_copies(config: Configuration, loc: str) -> int:
    return clock_copies(config[loc])


def trial(seed: int, index: int, cfg: GenConfig = GenConfig(), with_ta: bool = False) -> TrialReport:
    rng = trial_rng(seed, index)
    phi = gen_formula(rng, cfg.max_modalities, cfg.max_const, cfg.alphabet)
    word = gen_word(rng, cfg.max_len, cfg.denominator, cfg.horizon, cfg.alphabet)
    return run_trial(phi, word, with_ta=with_ta, index=index)


def _trial_star(args):
    return trial(*args)


def run_campaign(
    trials: int, seed: int, cfg: GenConfig = GenConfig(), ta_trials: int = 0, workers: int = 1
) -> list[TrialReport]:
    """Run ``trials`` trials; the TA oracle is enabled on the first ``ta_trials``."""
    jobs = [(seed, i, cfg, i < ta_trials) for i in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_trial_star, jobs, chunksize=8))
    return [trial(*job) for job in jobs]


def summarize(reports: Sequence[TrialReport]) -> dict:
    counts = Counter(f for r in reports for f in r.failures)
    return {
        "trials": len(reports),
        "ta_trials": sum(r.ta is not None for r in reports),
        "accepted": sum(r.eval for r in reports),
        "failed": sum(not r.ok for r in reports),
        "failures": {name: counts.get(name, 0) for name in FAILURE_CLASSES},
        "max_copies": max((r.max_copies for r in reports), default=0),
    }


# -- approximation soundness --------------------------------------------------------


@dataclass
class InclusionReport:
    index: int
    automaton: str
    approx: str
    word: str
    by_f: bool
    by_id: bool

    @property
    def violates(self) -> bool:
        return self.by_f and not self.by_id


def inclusion_trial(seed: int, index: int, max_len: int = 5) -> InclusionReport:
    """One random (automaton, approximation, word) triple."""
    rng = trial_rng(seed, index)
    automaton = gen_ocata(rng)
    f = gen_approx(rng)
    word = gen_word(rng, max_len, 4, 3, automaton.alphabet)
    by_f = accepts(automaton, word, f).accepted
    by_id = accepts(automaton, word, Identity()).accepted
    return InclusionReport(index, automaton.to_json(), f.name, str(word), by_f, by_id)


__all__ = [
    "GenConfig", "gen_formula", "gen_word", "gen_ocata", "gen_approx", "run_trial", "trial",
    "run_campaign", "summarize", "TrialReport", "FAILURE_CLASSES", "until_caps",
    "inclusion_trial", "InclusionReport", "trial_rng",
]
