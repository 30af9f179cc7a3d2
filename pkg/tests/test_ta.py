import json

import pytest
from hypothesis import given, settings

from conftest import PHI1, THETA1, THETA2
from mitlkit.approx import f_star, m_bound
from mitlkit.core import TimedWord
from mitlkit.mitl import parse
from mitlkit.ocata import accepts
from mitlkit.ta import ClockBudgetExceeded, TaLocation, TimedAutomaton, ocata_to_ta, ta_accepts, ta_stats
from mitlkit.translate import INIT, mitl_to_ocata
from strategies import formulas, words

AB = {"a", "b"}


def machine(text: str, clocks=None) -> TimedAutomaton:
    phi = parse(text)
    return ocata_to_ta(mitl_to_ocata(phi, AB), m_bound(phi).M if clocks is None else clocks)


def clocks_in_order(location: TaLocation) -> list[int]:
    seen = []
    for _, ps in location.slots:
        for pair in ps:
            for c in pair:
                if c not in seen:
                    seen.append(c)
    return seen


class TestConstruction:
    def test_initial_location(self):
        b = machine("T U[2,3] b")
        assert b.clock_count == 2
        assert b.initial == TaLocation(((INIT, ((0, 0),)), ("U@0", ())))
        assert b.initial.clocks_used() == 1

    def test_accepting_locations(self):
        b = machine(PHI1)
        only_release = TaLocation(((INIT, ()), ("R@0", ((0, 0),)), ("U@0.1.1", ())))
        with_until = TaLocation(((INIT, ()), ("R@0", ((0, 0),)), ("U@0.1.1", ((1, 2),))))
        assert b.is_accepting(only_release)
        assert not b.is_accepting(with_until)
        assert b.is_accepting(TaLocation(((INIT, ()), ("R@0", ()), ("U@0.1.1", ()))))

    def test_false_arc_has_no_successor(self):
        b = machine("a")
        assert b.transitions(b.initial, "b") == ()
        assert len(b.transitions(b.initial, "a")) == 1

    def test_stats_for_atom(self):
        s = ta_stats(machine("a"))
        assert s.clock_count == 2
        assert s.locations_discovered <= 3
        assert not s.capped

    def test_stats_cap(self):
        s = ta_stats(machine(PHI1), cap=2)
        assert s.capped and s.locations_discovered == 2

    def test_clock_count_is_the_bound(self):
        for text in ("a", PHI1, "T U[2,3] b", "(a U[0,2] b) & G[1,3] !a"):
            phi = parse(text)
            assert ta_stats(machine(text), cap=50).clock_count == m_bound(phi).M

    def test_canonical_clock_names(self):
        b = machine(PHI1)
        index, _, _ = b.explore(300)
        for loc in index:
            used = clocks_in_order(loc)
            assert used == list(range(len(used)))

    def test_expansion_is_deterministic(self):
        first = machine(PHI1).to_json(200)
        assert machine(PHI1).to_json(200) == first
        assert json.loads(first)["clocks"] == 7

    def test_dot(self):
        lines = list(machine("T U[2,3] b").to_dot(50))
        assert lines[0] == "digraph ta {" and lines[-1] == "}"
        assert lines == list(machine("T U[2,3] b").to_dot(50))


class TestAcceptance:
    def test_response_words(self):
        b = machine(PHI1)
        assert ta_accepts(b, TimedWord.parse(THETA1)).accepted
        assert ta_accepts(b, TimedWord.parse(THETA2)).accepted

    def test_pending_obligation(self):
        assert not ta_accepts(machine(PHI1), TimedWord.parse("(a,0.1)")).accepted

    def test_empty_word(self):
        assert not ta_accepts(machine("a"), TimedWord()).accepted
        b = machine(PHI1)
        assert ta_accepts(b, TimedWord()).accepted == b.is_accepting(b.initial)

    def test_run_denotes_intervals(self):
        result = ta_accepts(machine(PHI1), TimedWord.parse(THETA2))
        last = result.run[-1]
        assert set(last.intervals()) <= {"R@0"}

    def test_budget_exceeded(self):
        b = machine(PHI1, clocks=1)
        with pytest.raises(ClockBudgetExceeded):
            ta_accepts(b, TimedWord.parse(THETA1))
        loose = ocata_to_ta(b.ocata, 1, strict=False)
        result = ta_accepts(loose, TimedWord.parse(THETA1))
        assert not result.accepted and result.budget_binding

    def test_non_supported_shape(self):
        from mitlkit.ocata import GLoc, Ocata

        a = Ocata.from_formulas({"s"}, ["l0", "l1"], "l0", ["l1"], {("l0", "s"): GLoc("l1"), ("l1", "s"): GLoc("l1")})
        with pytest.raises(ValueError):
            ocata_to_ta(a, 2)

    @settings(max_examples=150, deadline=None)
    @given(formulas(max_leaves=4, with_not=False), words(max_len=5))
    def test_matches_bounded_semantics(self, phi, w):
        automaton = mitl_to_ocata(phi, AB)
        b = ocata_to_ta(automaton, m_bound(phi).M)
        result = ta_accepts(b, w)
        assert result.accepted == accepts(automaton, w, f_star(phi)).accepted
        for config in result.run:
            assert config.location.clocks_used() <= b.clock_count
            for _, ps in config.location.slots:
                for x, y in ps:
                    assert config.valuation[x] <= config.valuation[y]
