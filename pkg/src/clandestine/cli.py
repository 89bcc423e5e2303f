"""Command-line front end.

Exit codes: 0 success or true verdict, 1 negative verdict (formula false,
countermodel found, proof rejected, fuzz violations), 2 usage or parse
error, 3 game validation error, 4 internal limit (tautology atom cap).
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import nullcontext
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .checker import QueryError, holds, truth_set
from .formula import FormulaSyntaxError, parse_formula, print_formula
from .game import GameError, GameFormatError, GameParamsError, game_to_dict, load_game
from .harness import CountermodelBudget, FuzzParams, fuzz_soundness, search_countermodel
from .mutations import DESCRIPTIONS, mutation
from .proofs import AtomLimitError, ProofFormatError, check_proof, load_proof

OK, NEGATIVE, USAGE, INVALID, LIMIT = 0, 1, 2, 3, 4


class _Usage(Exception):
    pass


def _formula_arg(text: str):
    if text.startswith("@"):
        try:
            text = Path(text[1:]).read_text(encoding="utf-8")
        except OSError as exc:
            raise _Usage(f"cannot read formula file: {exc}") from exc
    return parse_formula(text)


def _emit(args, payload: dict, text: str) -> None:
    print(json.dumps(payload, indent=2) if args.json else text)


def _game(path: str):
    try:
        return load_game(path)
    except OSError as exc:
        raise _Usage(f"cannot read game file: {exc}") from exc


def cmd_validate(args) -> int:
    g = _game(args.game)
    _emit(args, {"valid": True, "agents": list(g.agents), "states": list(g.states),
                 "operations": list(g.operations), "closed_tuples": len(g.closed_mechanism)},
          f"valid: {len(g.states)} states, {len(g.agents)} agents, {len(g.operations)} "
          f"operations, {len(g.closed_mechanism)} mechanism tuples after closure")
    return OK


def cmd_check(args) -> int:
    g = _game(args.game)
    f = _formula_arg(args.formula)
    verdict = holds(g, args.state, f)
    _emit(args, {"state": args.state, "formula": print_formula(f), "holds": verdict},
          "true" if verdict else "false")
    return OK if verdict else NEGATIVE


def cmd_truthset(args) -> int:
    g = _game(args.game)
    f = _formula_arg(args.formula)
    ts = truth_set(g, f)
    states = [s for s in g.states if s in ts]
    _emit(args, {"formula": print_formula(f), "states": states}, "\n".join(states))
    return OK


def cmd_prove(args) -> int:
    try:
        proof = load_proof(args.proof)
    except OSError as exc:
        raise _Usage(f"cannot read proof file: {exc}") from exc
    v = check_proof(proof)
    _emit(args, {"accepted": v.ok, "line": v.line, "reason": v.reason or None,
                 "message": v.message or None, "lines": len(proof.lines),
                 "conclusion": print_formula(proof.conclusion)},
          f"{v}: {print_formula(proof.conclusion)}" if v.ok else str(v))
    return OK if v.ok else NEGATIVE


def _bounds(args, base):
    return replace(base, n_states=args.max_states, n_agents=args.max_agents,
                   n_ops=args.max_ops)


def cmd_fuzz(args) -> int:
    base = FuzzParams()
    params = replace(base, n_trials=args.trials, seed=args.seed, formula_depth=args.depth,
                     instances_per_axiom=args.instances,
                     game_params=_bounds(args, base.game_params))
    try:
        params.check()
    except ValueError as exc:
        raise _Usage(str(exc)) from exc
    with mutation(args.mutation) if args.mutation else nullcontext():
        report = fuzz_soundness(params)
    _emit(args, report.to_dict(), report.summary())
    return OK if report.ok else NEGATIVE


def cmd_countermodel(args) -> int:
    f = _formula_arg(args.formula)
    base = CountermodelBudget()
    budget = replace(base, n_games=args.games, game_params=_bounds(args, base.game_params))
    found = search_countermodel(f, budget, args.seed)
    if found is None:
        _emit(args, {"found": False, "formula": print_formula(f)},
              f"no countermodel in {args.games} games")
        return OK
    g, state = found
    _emit(args, {"found": True, "formula": print_formula(f), "state": state,
                 "game": game_to_dict(g)},
          f"fails at state {state} of:\n{json.dumps(game_to_dict(g), indent=2)}")
    return NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clandestine",
        description="Model checking, proof checking and soundness fuzzing for the "
                    "logic of distributed knowledge and clandestine power.")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=func)
        return p

    def size_flags(p):
        p.add_argument("--max-states", type=int, default=6)
        p.add_argument("--max-agents", type=int, default=3)
        p.add_argument("--max-ops", type=int, default=2)

    p = command("validate", cmd_validate, "validate a game file")
    p.add_argument("game")

    p = command("check", cmd_check, "evaluate a formula at a state")
    p.add_argument("game")
    p.add_argument("--state", required=True)
    p.add_argument("--formula", required=True, help="formula text, or @file")

    p = command("truthset", cmd_truthset, "list the states where a formula holds")
    p.add_argument("game")
    p.add_argument("--formula", required=True, help="formula text, or @file")

    p = command("prove", cmd_prove, "check a proof file")
    p.add_argument("proof")

    p = command("fuzz", cmd_fuzz, "randomized soundness test of the axioms and rules")
    p.add_argument("--trials", type=int, default=FuzzParams.n_trials)
    p.add_argument("--seed", type=int, default=FuzzParams.seed)
    p.add_argument("--depth", type=int, default=FuzzParams.formula_depth)
    p.add_argument("--instances", type=int, default=FuzzParams.instances_per_axiom,
                   help="instances of each axiom per game")
    p.add_argument("--mutation", choices=sorted(DESCRIPTIONS),
                   help="run against a deliberately broken checker")
    size_flags(p)

    p = command("countermodel", cmd_countermodel, "search random games for a countermodel")
    p.add_argument("--formula", required=True, help="formula text, or @file")
    p.add_argument("--games", type=int, default=CountermodelBudget.n_games)
    p.add_argument("--seed", type=int, default=0)
    size_flags(p)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else USAGE
    try:
        return args.func(args)
    except (_Usage, FormulaSyntaxError, ProofFormatError, GameFormatError, GameParamsError,
            QueryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except GameError as exc:
        print(f"invalid game: {exc}", file=sys.stderr)
        if args.json:
            print(json.dumps({"valid": False, "error": type(exc).__name__, "message": str(exc)}))
        return INVALID
    except AtomLimitError as exc:
        print(f"limit: {exc}", file=sys.stderr)
        return LIMIT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
