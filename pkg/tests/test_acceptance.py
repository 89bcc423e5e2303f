"""The seven acceptance criteria, at their stated budgets and tolerances.

Each test records a PASS/FAIL line; conftest prints them in the terminal
summary.
"""

import time

import pytest

from clandestine import FIXTURES_DIR
from clandestine.checker import holds, holds_brute, truth_set
from clandestine.formula import FALSE, Can, Know, Var, parse_formula
from clandestine.game import GameParams, coalition_indist, load_game, random_game
from clandestine.harness import (DEFAULT_FUZZ, draw_game, fuzz_soundness, random_formula,
                                 random_hypothetical_proof)
from clandestine.lemmas import FIXTURES
from clandestine.mutations import MUTATIONS, mutation
from clandestine.proofs import (Hyp, NecK, Proof, ProofLine, check_proof, deduction_transform,
                                k_lift_transform, load_proof)
from clandestine.rng import Stream, derive_seed

from mutate import mutations

RESULTS: dict = {}
BOUNDS = GameParams(6, 3, 2, partition_coarseness=1.0, extra_edge_prob=1.0)
POOL = ("p", "q", "r", "s")


def record(number, title, ok, detail):
    RESULTS[number] = f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}"
    print(RESULTS[number])
    assert ok, RESULTS[number]


def queries(label, n, depth):
    """n random (game, state, formula) triples from games within BOUNDS."""
    for i in range(n):
        rng = Stream(0, label, i)
        _, g = draw_game(BOUNDS, rng, derive_seed(0, label, "game", i), variables=POOL)
        f = random_formula(depth, POOL, g.agents, derive_seed(0, label, "formula", i))
        yield g, rng.choice(g.states), f, rng


def test_1_crisis_game():
    t0 = time.perf_counter()
    g = load_game(FIXTURES_DIR / "cuban.json")
    checks = [
        truth_set(g, Var("m")) == {"w1", "v"},
        {w for w in g.states if holds_brute(g, w, Var("m"))} == {"w1", "v"},
    ]
    for state, text, expected in [("w1", "K{a} m", False), ("v", "K{a} m", True),
                                  ("w1", "H{a} (K{a} m | K{a} !m)", True)]:
        f = parse_formula(text)
        checks.append(holds(g, state, f) is expected and holds_brute(g, state, f) is expected)
    elapsed = time.perf_counter() - t0
    record(1, "crisis game reproduction", all(checks) and elapsed < 1.0,
           f"{sum(checks)}/{len(checks)} checks, {elapsed:.3f}s (limit 1s)")


def test_2_soundness_fuzz():
    report = fuzz_soundness(DEFAULT_FUZZ)
    again = fuzz_soundness(DEFAULT_FUZZ)
    same = report.to_json(elapsed=False) == again.to_json(elapsed=False)
    p = DEFAULT_FUZZ
    budget_ok = (p.n_trials == 500 and p.instances_per_axiom == 20 and p.formula_depth == 3
                 and (p.game_params.n_states, p.game_params.n_agents, p.game_params.n_ops) == (6, 3, 2))
    instances = sum(report.axiom_trials.values())
    record(2, "soundness fuzz", budget_ok and report.ok and same and instances == 500 * 20 * 8
           and report.elapsed < 300,
           f"{len(report.violations)} violations over {instances} instances, "
           f"deterministic={same}, {report.elapsed:.1f}s (limit 300s)")


def test_3_differential_oracle():
    t0 = time.perf_counter()
    disagreements = 0
    n = 0
    for g, w, f, _ in queries("differential", 10_000, 4):
        n += 1
        disagreements += holds(g, w, f) != holds_brute(g, w, f)
    elapsed = time.perf_counter() - t0
    record(3, "differential oracle", n == 10_000 and disagreements == 0 and elapsed < 300,
           f"{disagreements} disagreements in {n} queries, {elapsed:.1f}s (limit 300s)")


def test_4_semantic_spot_properties():
    failures = {"empty-coalition": 0, "nontermination": 0, "strategic-introspection": 0,
                "block-constancy": 0}
    for g, w, f, rng in queries("semantic", 1000, 3):
        c = frozenset(rng.subset(g.agents))
        failures["empty-coalition"] += holds(g, w, Can(frozenset(), f))
        failures["nontermination"] += holds(g, w, Can(c, FALSE))
        failures["strategic-introspection"] += (holds(g, w, Can(c, f))
                                                and not holds(g, w, Know(c, Can(c, f))))
        block = next(b for b in coalition_indist(g, c) if w in b)
        for modal in (Know(c, f), Can(c, f)):
            failures["block-constancy"] += len({holds(g, u, modal) for u in block}) != 1
    record(4, "semantic spot-properties", not any(failures.values()),
           ", ".join(f"{k}={v}" for k, v in failures.items()) + " failures in 1000 queries each")


def test_5_proof_corpus():
    t0 = time.perf_counter()
    accepted = rejected = transformed = 0
    for name in FIXTURES:
        proof = load_proof(FIXTURES_DIR / f"{name}.proof.json")
        accepted += check_proof(proof).ok
        rejected += sum(not check_proof(m).ok for m in mutations(proof, 100, seed=sum(map(ord, name))))
    for seed in range(200):
        proof = random_hypothetical_proof(seed, depth=3, max_hypotheses=3)
        outs = [deduction_transform(proof, phi) for phi in dict.fromkeys(proof.hypotheses)]
        outs.append(k_lift_transform(proof, {"a", "c"}))
        transformed += all(check_proof(o).ok for o in outs)
    elapsed = time.perf_counter() - t0
    record(5, "proof corpus", accepted == 4 and rejected == 400 and transformed == 200 and elapsed < 60,
           f"{accepted}/4 fixtures accepted, {rejected}/400 mutants rejected, "
           f"{transformed}/200 transformed proofs check, {elapsed:.1f}s (limit 60s)")


@pytest.mark.parametrize("name", sorted(MUTATIONS))
def test_6_harness_sensitivity(name):
    with mutation(name):
        report = fuzz_soundness(DEFAULT_FUZZ)
    by_axiom = sorted({v["axiom"] for v in report.violations})
    RESULTS.setdefault("6-parts", {})[name] = len(report.violations)
    parts = RESULTS["6-parts"]
    detail = ", ".join(f"{k}={v}" for k, v in sorted(parts.items()))
    ok = all(v >= 1 for v in parts.values())
    RESULTS[6] = (f"[{'PASS' if ok else 'FAIL'}] 6. harness sensitivity: violations per mutation "
                  f"({len(parts)}/{len(MUTATIONS)} run) {detail}")
    print(f"{name}: {len(report.violations)} violations ({', '.join(by_axiom)})")
    assert report.violations, f"mutation {name} went undetected"


def test_7_purity_gate():
    p = Var("p")
    proof = Proof((p,), (ProofLine(p, Hyp(1)), ProofLine(Know({"a"}, p), NecK(1, frozenset({"a"})))))
    v = check_proof(proof)
    record(7, "purity gate", not v.ok and v.reason == "impure-necessitation" and v.line == 2,
           f"verdict {v}")
