"""Command-line front end.

Verdict commands exit 0 when the verdict is true, 1 when it is false and
2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .approx import k_star, m_bound, parse_approx
from .core import TimedWord
from .difftest import GenConfig, run_campaign, summarize
from .mitl import MitlSyntaxError, atoms, eval as mitl_eval, parse, size, to_nnf, to_text, to_tree
from .ocata import accepts
from .ta import ClockBudgetExceeded, ocata_to_ta, ta_accepts, ta_stats
from .translate import location_count, mitl_to_ocata

EXIT_TRUE, EXIT_FALSE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _color(text: str, code: str) -> str:
    if os.environ.get("MITLKIT_COLOR", "1") == "0" or not sys.stdout.isatty():
        return text
    return f"\033[{code}m{text}\033[0m"


def _verdict(value: bool) -> int:
    print(_color("true", "32") if value else _color("false", "31"))
    return EXIT_TRUE if value else EXIT_FALSE


def _read(arg: str) -> str:
    """``@path`` reads a UTF-8 file, anything else is taken literally."""
    if arg.startswith("@"):
        return Path(arg[1:]).read_text(encoding="utf-8")
    return arg


def _formula(text: str, nnf: bool = True):
    phi = parse(_read(text).strip())
    return to_nnf(phi) if nnf else phi


def _word(text: str) -> TimedWord:
    try:
        return TimedWord.parse(_read(text))
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"bad timed word: {exc}") from None


def _letters(args, phi, word: Optional[TimedWord] = None) -> set[str]:
    letters = set(atoms(phi))
    if word is not None:
        letters |= set(word.letters)
    if getattr(args, "alphabet", None):
        letters |= {a for a in args.alphabet.split(",") if a}
    return letters or {"a"}


def _emit(lines, out: Optional[str]) -> None:
    text = lines if isinstance(lines, str) else "\n".join(lines)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


# -- subcommands -----------------------------------------------------------------


def cmd_parse(args) -> int:
    alphabet = args.alphabet.split(",") if args.alphabet else None
    print(to_tree(parse(_read(args.formula).strip(), alphabet)))
    return EXIT_TRUE


def cmd_nnf(args) -> int:
    print(to_text(_formula(args.formula)))
    return EXIT_TRUE


def cmd_eval(args) -> int:
    phi = _formula(args.formula, nnf=False)
    word = _word(args.word)
    if len(word) == 0:
        return _verdict(False)
    if not 1 <= args.pos <= len(word):
        raise UsageError(f"position {args.pos} outside 1..{len(word)}")
    return _verdict(mitl_eval(word, args.pos, phi))


def cmd_member(args) -> int:
    phi = _formula(args.formula)
    word = _word(args.word)
    automaton = mitl_to_ocata(phi, _letters(args, phi, word))
    if args.sem == "ta":
        machine = ocata_to_ta(automaton, m_bound(phi).M)
        result = ta_accepts(machine, word)
        code = _verdict(result.accepted)
        if args.witness and result.accepted:
            for k, config in enumerate(result.run):
                print(f"{k:>3}  {config.location}  {json.dumps(config.intervals())}")
        return code
    f = parse_approx(args.sem, phi)
    result = accepts(automaton, word, f)
    code = _verdict(result.accepted)
    if args.witness:
        if result.witness is not None:
            for line in result.witness.render():
                print(line)
        elif result.failure is not None:
            print(f"blocked after {result.failure.position} letter(s): {result.failure.reason}")
            print(f"  at {result.failure.configuration}")
    return code


def cmd_compile(args) -> int:
    phi = _formula(args.formula)
    automaton = mitl_to_ocata(phi, _letters(args, phi))
    _emit(automaton.to_json() if args.out == "json" else list(automaton.to_dot()), args.output)
    return EXIT_TRUE


def cmd_dot(args) -> int:
    phi = _formula(args.formula)
    automaton = mitl_to_ocata(phi, _letters(args, phi))
    if args.ta:
        machine = ocata_to_ta(automaton, m_bound(phi).M)
        _emit(list(machine.to_dot(args.cap)), args.output)
    else:
        _emit(list(automaton.to_dot()), args.output)
    return EXIT_TRUE


def cmd_bound(args) -> int:
    phi = _formula(args.formula)
    b = m_bound(phi)
    print(f"{b} K={k_star(phi, location_count(phi))}")
    return EXIT_TRUE


def cmd_ta(args) -> int:
    phi = _formula(args.formula)
    machine = ocata_to_ta(mitl_to_ocata(phi, _letters(args, phi)), m_bound(phi).M)
    if args.out == "json":
        _emit(machine.to_json(args.cap), args.output)
    elif args.out == "dot":
        _emit(list(machine.to_dot(args.cap)), args.output)
    else:
        s = ta_stats(machine, args.cap)
        print(f"clocks={s.clock_count} locations={s.locations_discovered} capped={str(s.capped).lower()}")
    return EXIT_TRUE


def cmd_stats(args) -> int:
    phi = _formula(args.formula)
    automaton = mitl_to_ocata(phi, _letters(args, phi))
    b = m_bound(phi)
    s = ta_stats(ocata_to_ta(automaton, b.M), args.cap)
    rows = [
        ("modalities", size(phi)),
        ("locations", len(automaton.locations)),
        ("arcs", len(automaton.arc_list())),
        ("M", b.M),
        ("M_inf", b.M_inf),
        ("M_1", b.M_one),
        ("K", k_star(phi, len(automaton.locations))),
        ("ta_clocks", s.clock_count),
        ("ta_locations", s.locations_discovered),
        ("ta_capped", str(s.capped).lower()),
    ]
    for name, value in rows:
        print(f"{name:<13}{value}")
    return EXIT_TRUE


def cmd_difftest(args) -> int:
    cfg = GenConfig(args.max_modalities, args.max_const, args.max_len, args.denominator, args.horizon)
    print(f"seed {args.seed}", file=sys.stderr)
    reports = run_campaign(args.trials, args.seed, cfg, ta_trials=args.ta_trials, workers=args.workers)
    if args.output:
        Path(args.output).write_text("".join(r.to_json() + "\n" for r in reports), encoding="utf-8")
    for r in reports:
        if not r.ok:
            print(r.to_json())
    summary = summarize(reports)
    print(json.dumps(summary, indent=2))
    return EXIT_TRUE if summary["failed"] == 0 else EXIT_FALSE


# -- argument parsing ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mitlkit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_text, formula=True, word=False):
        sp = sub.add_parser(name, help=help_text)
        if formula:
            sp.add_argument("formula", help="formula text, or @file")
        if word:
            sp.add_argument("word", help="timed word such as '(a,0.1)(b,2)', a JSON array, or @file")
        sp.set_defaults(func=func)
        return sp

    sp = add("parse", cmd_parse, "print the syntax tree")
    sp.add_argument("--alphabet", help="comma-separated letters; other atoms are rejected")
    add("nnf", cmd_nnf, "print the negative normal form")

    sp = add("eval", cmd_eval, "evaluate a formula on a timed word", word=True)
    sp.add_argument("--pos", type=int, default=1, help="1-based position (default 1)")

    sp = add("member", cmd_member, "membership through an automaton", word=True)
    sp.add_argument("--sem", default="fstar", help="id | fstar | fk:<k> | hull:<locs|all> | ta (default fstar)")
    sp.add_argument("--witness", action="store_true", help="print the accepting run or the blocking point")
    sp.add_argument("--alphabet", help="extra letters")

    for name, func, help_text in (
        ("compile", cmd_compile, "compile to an OCATA"),
        ("ta", cmd_ta, "build the timed automaton"),
    ):
        sp = add(name, func, help_text)
        sp.add_argument("--alphabet", help="extra letters")
        sp.add_argument("-o", "--output", help="write to a file instead of stdout")
        if name == "compile":
            sp.add_argument("--out", choices=("json", "dot"), default="json")
        else:
            sp.add_argument("--out", choices=("stats", "json", "dot"), default="stats")
            sp.add_argument("--cap", type=int, default=10_000, help="exploration cap on locations")

    sp = add("dot", cmd_dot, "DOT export of the OCATA (or of the timed automaton)")
    sp.add_argument("--ta", action="store_true")
    sp.add_argument("--cap", type=int, default=10_000)
    sp.add_argument("--alphabet", help="extra letters")
    sp.add_argument("-o", "--output")

    add("bound", cmd_bound, "print M, M_inf, M_1 and K")

    sp = add("stats", cmd_stats, "size, bounds and timed automaton statistics")
    sp.add_argument("--cap", type=int, default=10_000)
    sp.add_argument("--alphabet", help="extra letters")

    d = GenConfig()
    sp = add("difftest", cmd_difftest, "randomised cross-check of the oracles", formula=False)
    sp.add_argument("--trials", type=int, default=500)
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--ta-trials", type=int, default=100, help="trials also checked on the timed automaton")
    sp.add_argument("--max-modalities", type=int, default=d.max_modalities)
    sp.add_argument("--max-const", type=int, default=d.max_const)
    sp.add_argument("--max-len", type=int, default=d.max_len)
    sp.add_argument("--denominator", type=int, default=d.denominator)
    sp.add_argument("--horizon", type=int, default=d.horizon)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("-o", "--output", help="write every report as JSON lines")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_TRUE
    try:
        return args.func(args)
    except MitlSyntaxError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
    except ClockBudgetExceeded as exc:
        print(f"clock budget exceeded: {exc}", file=sys.stderr)
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
