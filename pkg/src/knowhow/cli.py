"""Command-line front-end.

Subcommands: ``check`` evaluates a formula at a history of a model file,
``prove`` verifies a derivation file, ``fuzz`` runs the random property
suites, ``examples`` replays the bundled claim lists, and ``validate`` runs
well-formedness and regularity checks on a model file.

Exit status: 0 for True/ok/clean, 1 for False/failing line/violations,
2 for usage or format errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from .checker import HorizonError, evaluate, witness
from .formula import FormulaSyntaxError, h_depth, parse, uses_empty_coalition, How
from .fixtures import FIXTURES, load_fixture, run_claims
from .harness import GenParams, lemma_suite, soundness_suite
from .proofkit import ProofFormatError, parse_derivation, verify
from .system import (
    InvalidHistoryError, ModelFormatError, check_regular, load_system,
    parse_history,
)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _cmd_check(args) -> int:
    ets = load_system(_read(args.system))
    h = parse_history(ets, args.history)
    f = parse(args.formula)
    horizon = args.horizon
    if horizon is None and uses_empty_coalition(f):
        horizon = h.length + h_depth(f) + 2  # never silently bounded; see report
    verdict = evaluate(ets, h, f, horizon)
    print(f"formula: {f}")
    print(f"history: {h}")
    print(f"verdict: {verdict.value}")
    if uses_empty_coalition(f):
        print(f"horizon: {verdict.horizon_used}")
        print(f"bounded: {'yes' if verdict.bounded else 'no'}")
    else:
        print("horizon: exact (no empty coalitions)")
    if verdict.counterexample is not None:
        print(f"counterexample: {verdict.counterexample}")
    if isinstance(f, How):
        found = witness(ets, h, f.coalition, f.sub, horizon)
        if found is None:
            print("witness: none")
        else:
            print(f"witness: {found.profile if found.profile.votes else '(empty profile)'}")
    return 0 if verdict.value else 1


def _cmd_prove(args) -> int:
    result = verify(parse_derivation(_read(args.proof)))
    print(result)
    return 0 if result.ok else 1


def _cmd_examples(args) -> int:
    ets = load_fixture(args.fixture)
    claims = FIXTURES[args.fixture][1]
    passed = 0
    for claim, results in run_claims(ets, claims):
        ok = all(r.passed for r in results)
        passed += ok
        detail = "; ".join(
            f"({r.history}) |- {r.formula} -> {r.verdict.value}" for r in results)
        print(f"{'PASS' if ok else 'FAIL'}  {claim.label}: {detail}")
    print(f"{passed}/{len(claims)} claims pass")
    return 0 if passed == len(claims) else 1


def _cmd_fuzz(args) -> int:
    params = GenParams(
        seed=args.seed, num_states=args.states, num_agents=args.agents,
        num_choices=args.choices, formula_depth=args.formula_depth,
        history_depth=args.depth,
        horizon=max(args.horizon, args.depth + args.formula_depth))
    sound = soundness_suite(params, num_systems=args.systems,
                            num_instances=args.instances)
    lemmas = lemma_suite(params, num_systems=max(1, args.systems // 2))
    if args.json:
        print(json.dumps({"soundness": sound.to_dict(), "lemmas": lemmas.to_dict()},
                         indent=2))
    else:
        for line in sound.to_lines() + lemmas.to_lines():
            print(line)
    clean = not (sound.violations or sound.guard_rejections or lemmas.failures)
    return 0 if clean else 1


def _cmd_validate(args) -> int:
    ets = load_system(_read(args.system), require_regular=False)
    print(f"agents: {len(ets.agents)}  states: {len(ets.states)}  "
          f"choices: {len(ets.choices)}  transitions: {len(ets.mechanism)}")
    violations = check_regular(ets)
    if violations:
        print(f"not regular: {len(violations)} state/profile pairs lack a successor")
        for w, profile in violations[:10]:
            print(f"  {w} [{profile}]")
        return 1
    print("regular: every state/profile pair has a successor")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="knowhow",
        description="Model checking and proof checking for coalition know-how "
                    "under perfect recall.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="evaluate a formula at a history")
    p.add_argument("--system", required=True, help="model file path")
    p.add_argument("--history", required=True,
                   help="history literal, e.g. 'w0 ; a=1,b=0 ; w4'")
    p.add_argument("--formula", required=True, help="formula text")
    p.add_argument("--horizon", type=int, default=None,
                   help="history length cap for empty-coalition modalities")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("prove", help="verify a derivation file")
    p.add_argument("proof", help="proof file path")
    p.set_defaults(func=_cmd_prove)

    p = sub.add_parser("fuzz", help="run the random property suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--systems", type=int, default=10)
    p.add_argument("--instances", type=int, default=5,
                   help="instances per axiom schema per system")
    p.add_argument("--depth", type=int, default=3, help="history depth")
    p.add_argument("--states", type=int, default=4)
    p.add_argument("--agents", type=int, default=2)
    p.add_argument("--choices", type=int, default=2)
    p.add_argument("--formula-depth", type=int, default=2)
    p.add_argument("--horizon", type=int, default=6)
    p.add_argument("--json", action="store_true",
                   help="machine-readable report")
    p.set_defaults(func=_cmd_fuzz)

    p = sub.add_parser("examples", help="replay a bundled claim list")
    p.add_argument("fixture", choices=sorted(FIXTURES))
    p.set_defaults(func=_cmd_examples)

    p = sub.add_parser("validate", help="well-formedness and regularity checks")
    p.add_argument("--system", required=True, help="model file path")
    p.set_defaults(func=_cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormulaSyntaxError, ModelFormatError, InvalidHistoryError,
            ProofFormatError, HorizonError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
