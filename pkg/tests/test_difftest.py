import json
from fractions import Fraction

from conftest import PHI1, PHI2, THETA1, iv
from mitlkit.approx import validate_approx
from mitlkit.core import TimedWord
from mitlkit.difftest import (
    FAILURE_CLASSES,
    GenConfig,
    gen_approx,
    gen_formula,
    gen_ocata,
    gen_word,
    inclusion_trial,
    run_campaign,
    run_trial,
    summarize,
    trial_rng,
)
from mitlkit.mitl import Release, Until, is_nnf, parse, size, to_text, walk
from mitlkit.ocata import Configuration


class TestGenerators:
    def test_no_modalities(self):
        for k in range(50):
            phi = gen_formula(trial_rng(1, k), max_modalities=0)
            assert size(phi) == 0

    def test_reproducible(self):
        assert gen_formula(trial_rng(3, 4)) == gen_formula(trial_rng(3, 4))
        assert gen_word(trial_rng(3, 4)) == gen_word(trial_rng(3, 4))

    def test_formula_limits(self):
        for k in range(200):
            phi = gen_formula(trial_rng(2, k), max_modalities=3, max_const=3)
            assert is_nnf(phi) and size(phi) <= 3
            assert parse(to_text(phi)) == phi
            for node in walk(phi):
                if isinstance(node, (Until, Release)):
                    i = node.interval
                    assert i.hi is None or (i.lo < i.hi <= 3)

    def test_empty_word(self):
        assert len(gen_word(trial_rng(0, 0), max_len=0)) == 0

    def test_word_grid(self):
        allowed = {Fraction(k, 2) for k in range(7)}
        for k in range(100):
            w = gen_word(trial_rng(5, k), max_len=6, denominator=2, horizon=3)
            assert set(w.times) <= allowed
            assert TimedWord.parse(str(w)) == w

    def test_random_approximations_are_valid(self):
        c = Configuration.from_mapping({"l0": [iv(0), iv("0.5"), iv(1, 2)], "l1": [iv(0), iv(3)]})
        for k in range(100):
            f = gen_approx(trial_rng(9, k))
            assert all(validate_approx(c, c2) for c2 in f(c))

    def test_random_automata(self):
        for k in range(20):
            a = gen_ocata(trial_rng(4, k))
            assert a.initial == "l0" and 1 <= len(a.locations) <= 4


class TestTrials:
    def test_response_accepted_everywhere(self):
        r = run_trial(parse(PHI1), TimedWord.parse(THETA1), with_ta=True)
        assert (r.eval, r.id, r.fstar, r.ta) == (True, True, True, True)
        assert r.ok and r.until_capped

    def test_pending_rejected_everywhere(self):
        r = run_trial(parse(PHI1), TimedWord.parse("(a,0.1)"), with_ta=True)
        assert (r.eval, r.id, r.fstar, r.ta) == (False, False, False, False)
        assert r.ok

    def test_other_letters(self):
        for text in ("(a,1)(a,2)", "(b,2.5)", "(a,0)(b,3.5)"):
            r = run_trial(parse(PHI2), TimedWord.parse(text), with_ta=True)
            assert r.ok and len({r.eval, r.id, r.fstar, r.ta}) == 1

    def test_report_json(self):
        r = run_trial(parse(PHI2), TimedWord.parse("(a,0)(b,2.5)"))
        doc = json.loads(r.to_json())
        assert doc["formula"] == "T U[2,3] b" and doc["eval"] is True and doc["failures"] == []

    def test_small_campaign(self):
        reports = run_campaign(40, seed=11, ta_trials=10)
        summary = summarize(reports)
        assert summary["trials"] == 40 and summary["ta_trials"] == 10
        assert set(summary["failures"]) == set(FAILURE_CLASSES)
        assert summary["failed"] == 0, [r.to_json() for r in reports if not r.ok]

    def test_campaign_is_deterministic(self):
        a = [r.to_json() for r in run_campaign(15, seed=3)]
        b = [r.to_json() for r in run_campaign(15, seed=3)]
        assert a == b

    def test_parallel_matches_serial(self):
        serial = [r.to_json() for r in run_campaign(16, seed=5, ta_trials=4)]
        parallel = [r.to_json() for r in run_campaign(16, seed=5, ta_trials=4, workers=2)]
        assert serial == parallel

    def test_inclusion_trials(self):
        reports = [inclusion_trial(13, k) for k in range(30)]
        assert not any(r.violates for r in reports)

    def test_config_defaults(self):
        cfg = GenConfig()
        assert (cfg.max_modalities, cfg.max_const, cfg.max_len, cfg.denominator, cfg.horizon) == (3, 3, 5, 4, 6)
