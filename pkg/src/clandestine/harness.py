"""Randomized soundness testing and countermodel search.

Every trial draws a game, instantiates each axiom schema with random
formulas and coalitions, and asks the model checker for a state that
falsifies the instance.  Any such state is a bug in the checker or in game
closure, since every axiom is valid.  Rule trials additionally confirm that
modus ponens and both necessitation rules preserve validity inside the drawn
game; those are diagnostics, reported apart from axiom violations.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Sequence

from .checker import find_counterexample
from .formula import (RESERVED_VAR, Can, Formula, Imp, Know, Neg, Var, agents_of,
                      print_formula, variables_of)
from .game import GameParams, ValidatedGame, random_game
from .proofs import (Axiom, AxiomName, Binding, Proof, ProofBuilder, check_proof,
                     instantiate_axiom)
from .rng import Stream, derive_seed

__all__ = [
    "FuzzParams", "FuzzReport", "CountermodelBudget", "DEFAULT_FUZZ",
    "random_formula", "instantiate_random_axiom", "fuzz_soundness",
    "search_countermodel", "random_hypothetical_proof", "draw_game",
]

DEFAULT_POOL = ("p", "q", "r", "s")


@dataclass(frozen=True)
class FuzzParams:
    """Fuzz budget.  Sizes and probabilities in ``game_params`` are upper
    bounds: each trial draws its own values uniformly below them."""

    n_trials: int = 500
    game_params: GameParams = GameParams(
        n_states=6, n_agents=3, n_ops=2, partition_coarseness=1.0, extra_edge_prob=1.0)
    formula_depth: int = 3
    variable_pool: tuple = DEFAULT_POOL
    seed: int = 0
    instances_per_axiom: int = 20
    rule_trials_per_game: int = 4

    def check(self) -> None:
        if self.n_trials < 1 or self.instances_per_axiom < 1 or self.rule_trials_per_game < 0:
            raise ValueError("trial counts must be positive")
        if not 0 <= self.formula_depth <= 6:
            raise ValueError("formula_depth must lie in [0, 6]")
        if not self.variable_pool:
            raise ValueError("variable_pool must be nonempty")
        self.game_params.check()


DEFAULT_FUZZ = FuzzParams()


# -- generators ------------------------------------------------------------

def _formula(rng: Stream, depth: int, pool: Sequence[str], agents: Sequence[str]) -> Formula:
    if depth <= 0:
        return Var(rng.choice(pool))
    kind = rng.below(5)
    if kind == 0:
        return Var(rng.choice(pool))
    if kind == 1:
        return Neg(_formula(rng, depth - 1, pool, agents))
    if kind == 2:
        return Imp(_formula(rng, depth - 1, pool, agents), _formula(rng, depth - 1, pool, agents))
    c = frozenset(rng.subset(agents))
    body = _formula(rng, depth - 1, pool, agents)
    return Know(c, body) if kind == 3 else Can(c, body)


def random_formula(depth: int, pool: Sequence[str], agents: Sequence[str], seed: int) -> Formula:
    """A random formula of depth at most ``depth``; coalitions may be empty."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    return _formula(Stream(seed, "formula"), depth, sorted(pool), sorted(agents))


def _axiom_binding(rng: Stream, name: AxiomName, agents: Sequence[str], depth: int,
                   pool: Sequence[str]) -> Binding:
    def phi() -> Formula:
        return _formula(rng, depth, pool, agents)

    def coal() -> frozenset:
        return frozenset(rng.subset(agents))

    if name is AxiomName.MONOTONICITY:
        big = coal()
        return Binding({"phi": phi()}, {"C": big, "C'": frozenset(rng.subset(sorted(big)))})
    if name is AxiomName.CIA:
        roles: dict[str, set] = {"C": set(), "I": set(), "A": set()}
        for a in agents:
            if rng.chance(0.4):
                roles["C"].add(a)
            else:
                if rng.chance(0.5):
                    roles["I"].add(a)
                if rng.chance(0.5):
                    roles["A"].add(a)
        return Binding({"phi": phi(), "psi": phi()},
                       {k: frozenset(v) for k, v in roles.items()})
    if name is AxiomName.DISTRIBUTIVITY:
        return Binding({"phi": phi(), "psi": phi()}, {"C": coal()})
    if name is AxiomName.NONTERMINATION:
        return Binding({}, {"C": coal()})
    if name is AxiomName.EMPTY_COALITION:
        return Binding({"phi": phi()}, {})
    return Binding({"phi": phi()}, {"C": coal()})


def instantiate_random_axiom(name, agents: Sequence[str], depth: int, pool: Sequence[str],
                             seed: int) -> Formula:
    """A random instance of axiom ``name`` whose side conditions hold by construction."""
    if not agents:
        raise ValueError("agents must be nonempty")
    name = AxiomName(name)
    rng = Stream(seed, "axiom", name.value)
    return instantiate_axiom(name, _axiom_binding(rng, name, sorted(agents), depth, sorted(pool)))


def draw_game(bounds: GameParams, rng: Stream, seed: int, **overrides) -> tuple[GameParams, ValidatedGame]:
    """Draw concrete game parameters below ``bounds`` and build the game."""
    drawn = dict(
        n_states=rng.between(1, bounds.n_states),
        n_agents=rng.between(1, bounds.n_agents),
        n_ops=rng.between(1, bounds.n_ops),
        partition_coarseness=rng.random() * bounds.partition_coarseness,
        extra_edge_prob=rng.random() * bounds.extra_edge_prob,
    )
    # overrides win, but every draw still happens so the stream stays aligned
    params = replace(bounds, **{**drawn, **overrides})
    return params, random_game(params, seed)


# -- soundness fuzzing -----------------------------------------------------

def _binding_dict(b: Binding) -> dict:
    return {"formulas": {k: print_formula(v) for k, v in sorted(b.formulas.items())},
            "coalitions": {k: sorted(v) for k, v in sorted(b.coalitions.items())}}


def _params_dict(p: GameParams) -> dict:
    d = asdict(p)
    d["agent_names"] = list(p.agent_names) if p.agent_names else None
    d["variables"] = list(p.variables)
    return d


@dataclass
class FuzzReport:
    params: dict
    trials: int = 0
    axiom_trials: dict = field(default_factory=lambda: {a.value: 0 for a in AxiomName})
    violations: list = field(default_factory=list)
    rule_checks: dict = field(default_factory=lambda: {"mp": 0, "neck": 0, "nech": 0})
    rule_anomalies: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self, elapsed: bool = True) -> dict:
        d = {
            "params": self.params,
            "trials": self.trials,
            "axiom_trials": self.axiom_trials,
            "violations": self.violations,
            "rule_checks": self.rule_checks,
            "rule_anomalies": self.rule_anomalies,
        }
        if elapsed:
            d["elapsed"] = round(self.elapsed, 3)
        return d

    def to_json(self, elapsed: bool = True) -> str:
        return json.dumps(self.to_dict(elapsed), indent=2, sort_keys=True)

    def summary(self) -> str:
        lines = [f"soundness fuzz: {self.trials} games, {sum(self.axiom_trials.values())} "
                 f"axiom instances, {len(self.violations)} violation(s)"]
        for name, n in self.axiom_trials.items():
            bad = sum(1 for v in self.violations if v["axiom"] == name)
            lines.append(f"  {name:<24} {n:>7} checked  {bad:>4} failed")
        rules = ", ".join(f"{k}={v}" for k, v in self.rule_checks.items())
        lines.append(f"  rule trials: {rules}; anomalies: {len(self.rule_anomalies)}")
        for v in self.violations[:5]:
            lines.append(f"  VIOLATION {v['axiom']} trial {v['trial']} state {v['state']}: "
                         f"{v['formula']}")
        lines.append(f"  elapsed {self.elapsed:.2f}s")
        return "\n".join(lines)


def fuzz_soundness(params: FuzzParams = DEFAULT_FUZZ) -> FuzzReport:
    """Check every axiom schema and inference rule on randomly drawn games."""
    params.check()
    started = time.perf_counter()
    report = FuzzReport(params={
        "n_trials": params.n_trials, "game_params": _params_dict(params.game_params),
        "formula_depth": params.formula_depth, "variable_pool": list(params.variable_pool),
        "seed": params.seed, "instances_per_axiom": params.instances_per_axiom,
        "rule_trials_per_game": params.rule_trials_per_game,
    })
    pool = sorted(params.variable_pool)
    for trial in range(params.n_trials):
        game_seed = derive_seed(params.seed, "game", trial)
        game_params, game = draw_game(params.game_params, Stream(params.seed, "size", trial),
                                      game_seed, variables=tuple(pool))
        agents = list(game.agents)
        report.trials += 1
        where = {"trial": trial, "game_seed": game_seed, "game_params": _params_dict(game_params)}

        for name in AxiomName:
            rng = Stream(params.seed, "axiom", trial, name.value)
            for i in range(params.instances_per_axiom):
                binding = _axiom_binding(rng, name, agents, params.formula_depth, pool)
                f = instantiate_axiom(name, binding)
                report.axiom_trials[name.value] += 1
                state = find_counterexample(game, f)
                if state is not None:
                    report.violations.append({
                        "axiom": name.value, "instance": i, "formula": print_formula(f),
                        "binding": _binding_dict(binding), "state": state, **where})

        rng = Stream(params.seed, "rules", trial)
        for i in range(params.rule_trials_per_game):
            _rule_trial(rng, game, agents, pool, params.formula_depth, report, {**where, "instance": i})

    report.elapsed = time.perf_counter() - started
    return report


def _rule_trial(rng: Stream, game: ValidatedGame, agents: list, pool: list, depth: int,
                report: FuzzReport, where: dict) -> None:
    name = AxiomName(rng.choice([a.value for a in AxiomName]))
    premise = instantiate_axiom(name, _axiom_binding(rng, name, agents, depth, pool))
    if find_counterexample(game, premise) is not None:
        return  # already an axiom violation; counted elsewhere
    other = _formula(rng, depth, pool, agents)
    c = frozenset(rng.subset(agents))
    actor = frozenset(rng.subset(agents)) or frozenset([rng.choice(agents)])
    conclusions = {
        "mp": Imp(Neg(premise), other),       # from premise and premise -> (premise | other)
        "neck": Know(c, premise),
        "nech": Can(actor, premise),
    }
    for rule, f in conclusions.items():
        report.rule_checks[rule] += 1
        state = find_counterexample(game, f)
        if state is not None:
            report.rule_anomalies.append({
                "rule": rule, "premise": print_formula(premise), "conclusion": print_formula(f),
                "state": state, **where})


# -- countermodels ---------------------------------------------------------

@dataclass(frozen=True)
class CountermodelBudget:
    """Like :class:`FuzzParams`, sizes in ``game_params`` are upper bounds."""

    n_games: int = 200
    game_params: GameParams = GameParams(
        n_states=6, n_agents=3, n_ops=2, partition_coarseness=1.0, extra_edge_prob=1.0)


def search_countermodel(f: Formula, budget: CountermodelBudget = CountermodelBudget(),
                        seed: int = 0) -> Optional[tuple[ValidatedGame, str]]:
    """Sample games until one falsifies ``f``; return ``(game, state)`` or ``None``.

    Sampled games always contain the agents and variables that ``f`` mentions.
    """
    named = sorted(agents_of(f))
    variables = tuple(sorted(variables_of(f) - {RESERVED_VAR})) or ("p",)
    bounds = budget.game_params
    for n in range(budget.n_games):
        rng = Stream(seed, "countermodel", n)
        extra = rng.between(0 if named else 1, max(bounds.n_agents - len(named), 1))
        fresh = [f"x{i}" for i in range(len(named) + extra) if f"x{i}" not in named][:extra]
        names = tuple(named + fresh)
        _, game = draw_game(bounds, rng, derive_seed(seed, "countermodel-game", n),
                            variables=variables, agent_names=names,
                            n_agents=len(names))
        state = find_counterexample(game, f)
        if state is not None:
            return game, state
    return None


# -- random proofs ---------------------------------------------------------

def random_hypothetical_proof(seed: int, agents: Sequence[str] = ("a", "b", "c"),
                              depth: int = 3, max_hypotheses: int = 3, steps: int = 10,
                              pool: Sequence[str] = ("p", "q", "r")) -> Proof:
    """A random proof mixing hypotheses, tautologies, axioms, modus ponens and
    necessitation on hypothesis-free lines; always accepted by ``check_proof``."""
    rng = Stream(seed, "proof")
    agents, pool = sorted(agents), sorted(pool)

    def formula() -> Formula:
        return _formula(rng, rng.between(0, depth), pool, agents)

    hyps: list[Formula] = [formula() for _ in range(rng.between(0, max_hypotheses))]
    if len(hyps) >= 2 and rng.chance(0.5):
        hyps[1] = Imp(hyps[0], formula())
    b = ProofBuilder(hyps)
    for k in range(1, len(hyps) + 1):
        b.hyp(k)
    for _ in range(steps):
        move = rng.below(5)
        if move == 0 or not b.lines:
            name = AxiomName(rng.choice([a.value for a in AxiomName]))
            binding = _axiom_binding(rng, name, agents, max(depth - 1, 0), pool)
            b.add(instantiate_axiom(name, binding), Axiom(name, binding))
        elif move == 1:
            # weaken an existing line: from A get B -> A
            i = rng.between(1, len(b.lines))
            b.by_taut(Imp(formula(), b.formula(i)), i)
        elif move == 2:
            pairs = [(i, j) for j in range(1, len(b.lines) + 1)
                     for i in range(1, len(b.lines) + 1)
                     if isinstance(b.formula(j), Imp) and b.formula(j).lhs == b.formula(i)]
            if pairs:
                b.mp(*rng.choice(pairs))
        else:
            pure = [i for i in range(1, len(b.lines) + 1) if b.pure[i - 1]]
            if pure:
                i = rng.choice(pure)
                if move == 3:
                    b.neck(i, rng.subset(agents))
                else:
                    b.nech(i, rng.subset(agents) or [rng.choice(agents)])
    proof = b.build()
    verdict = check_proof(proof)
    assert verdict.ok, verdict
    return proof
