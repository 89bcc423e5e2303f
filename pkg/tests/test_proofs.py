import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from clandestine import FIXTURES_DIR
from clandestine.checker import find_counterexample
from clandestine.formula import FALSE, TRUE, Can, Imp, Know, Neg, Var, parse_formula, print_formula
from clandestine.game import GameParams, random_game
from clandestine.harness import random_hypothetical_proof
from clandestine.lemmas import FIXTURES, fixture_proofs, kkk
from clandestine.proofs import (MP, AtomLimitError, Axiom, AxiomName, Binding, BindingError, Hyp,
                                NecH, NecK, Proof, ProofFormatError, ProofLine,
                                SideConditionError, Taut, TransformError, check_proof,
                                deduction_transform, dump_proof, instantiate_axiom,
                                is_tautology, k_lift_transform, line_purity, load_proof,
                                proof_from_dict, proof_to_dict)

from conftest import formulas
from mutate import mutations
from oracles import truth_table

F = parse_formula
p, q = Var("p"), Var("q")


def test_instantiate_examples():
    assert instantiate_axiom("truth", Binding.of(C={"a"}, phi=p)) == F("K{a} p -> p")
    assert instantiate_axiom(AxiomName.EMPTY_COALITION, Binding.of(phi=p)) == F("!H{} p")
    with pytest.raises(SideConditionError):
        instantiate_axiom("cia", Binding.of(C={"a"}, I={"a"}, A=set(), phi=p, psi=q))


def test_instantiate_every_schema():
    b = {"C": {"a"}, "phi": p}
    assert instantiate_axiom("neg-introspection", Binding.of(**b)) == F("!K{a} p -> K{a} !K{a} p")
    assert instantiate_axiom("distributivity", Binding.of(**b, psi=q)) == \
        F("K{a} (p -> q) -> K{a} p -> K{a} q")
    assert instantiate_axiom("monotonicity", Binding.of(Cp={"a"}, C={"a", "b"}, phi=p)) == \
        F("K{a} p -> K{a,b} p")
    assert instantiate_axiom("strategic-introspection", Binding.of(**b)) == F("H{a} p -> K{a} H{a} p")
    assert instantiate_axiom("nontermination", Binding.of(C={"a"})) == Neg(Can({"a"}, FALSE))
    cia = instantiate_axiom("cia", Binding.of(C={"a"}, I={"b"}, A={"c"}, phi=p, psi=q))
    assert cia == F("K{a,b} K{b,c} (K{a} p -> K{a,b} q) -> H{a} p -> H{a,b} q")


def test_instantiate_errors():
    with pytest.raises(SideConditionError):
        instantiate_axiom("monotonicity", Binding.of(Cp={"a", "b"}, C={"a"}, phi=p))
    with pytest.raises(SideConditionError):
        instantiate_axiom("cia", Binding.of(C={"a"}, I=set(), A={"a"}, phi=p, psi=q))
    with pytest.raises(BindingError):
        instantiate_axiom("truth", Binding.of(phi=p))
    with pytest.raises(BindingError):
        instantiate_axiom("truth", Binding.of(C={"a"}, phi=p, psi=q))
    with pytest.raises(BindingError):
        instantiate_axiom("nonsense", Binding.of(phi=p))


@pytest.mark.parametrize("text, expected", [
    ("p -> p", True),
    ("K{a} p -> p", False),
    ("K{a} p | !K{a} p", True),
    ("true", True),
    ("false", False),
    ("(p -> q) -> (q -> r) -> p -> r", True),
    ("H{a} p -> H{a} q", False),
])
def test_tautology_examples(text, expected):
    assert is_tautology(F(text)) is expected


@given(formulas(max_leaves=10))
def test_tautology_matches_oracle(f):
    assert is_tautology(f) == truth_table(f)
    assert is_tautology(Imp(f, f))


def test_atom_limit():
    many = [Var(f"v{i}") for i in range(21)]
    f = many[0]
    for v in many[1:]:
        f = Imp(v, f)
    with pytest.raises(AtomLimitError):
        is_tautology(f)
    assert not is_tautology(Imp(many[1], Imp(many[2], many[0])))
    with pytest.raises(AtomLimitError):
        check_proof(Proof((), (ProofLine(f, Taut()),)))


def test_modus_ponens_from_hypotheses():
    proof = Proof((p, Imp(p, q)), (ProofLine(p, Hyp(1)), ProofLine(Imp(p, q), Hyp(2)),
                                    ProofLine(q, MP(1, 2))))
    v = check_proof(proof)
    assert v.ok and v.purity == (False, False, False)


def test_necessitation_over_hypothesis_rejected():
    proof = Proof((p,), (ProofLine(p, Hyp(1)), ProofLine(Know({"a"}, p), NecK(1, frozenset({"a"})))))
    v = check_proof(proof)
    assert not v.ok and v.line == 2 and v.reason == "impure-necessitation"


def test_nech_empty_coalition_rejected():
    proof = Proof((), (ProofLine(F("p -> p"), Taut()),
                       ProofLine(Can(frozenset(), F("p -> p")), NecH(1, frozenset()))))
    v = check_proof(proof)
    assert not v.ok and v.reason == "empty-coalition"


@pytest.mark.parametrize("lines, hyps, reason", [
    ((), (), "empty-proof"),
    ((ProofLine(p, Hyp(2)),), (p,), "bad-index"),
    ((ProofLine(q, Hyp(1)),), (p,), "hyp-mismatch"),
    ((ProofLine(p, Taut()),), (), "not-tautology"),
    ((ProofLine(F("K{a} p -> p"), Axiom(AxiomName.TRUTH, Binding.of(C={"b"}, phi=p))),), (), "axiom-mismatch"),
    ((ProofLine(F("K{a} p -> K{a} p"),
                Axiom(AxiomName.MONOTONICITY, Binding.of(Cp={"a", "b"}, C={"a"}, phi=p))),), (), "side-condition"),
    ((ProofLine(p, Axiom(AxiomName.TRUTH, Binding.of(phi=p))),), (), "binding"),
    ((ProofLine(p, Hyp(1)), ProofLine(q, MP(1, 1))), (p,), "mp-mismatch"),
    ((ProofLine(p, Hyp(1)), ProofLine(q, MP(1, 2))), (p,), "bad-index"),
    ((ProofLine(TRUE, Taut()), ProofLine(Know({"a"}, p), NecK(1, frozenset({"a"})))), (), "nec-mismatch"),
    ((ProofLine(TRUE, Taut()), ProofLine(Can({"a"}, TRUE), NecK(1, frozenset({"a"})))), (), "nec-mismatch"),
    ((ProofLine(TRUE, "taut"),), (), "unknown-rule"),
])
def test_rejection_reasons(lines, hyps, reason):
    assert check_proof(Proof(hyps, lines)).reason == reason


def test_fixture_corpus_accepts():
    for name, (make, statement) in FIXTURES.items():
        shipped = load_proof(FIXTURES_DIR / f"{name}.proof.json")
        assert check_proof(shipped).ok, name
        assert shipped.conclusion == F(statement)
        assert shipped.hypotheses == ()
        # the shipped file is exactly what the derivation builds
        assert shipped == make()
        assert json.loads(dump_proof(make())) == json.loads((FIXTURES_DIR / f"{name}.proof.json").read_text())


def test_kkk_side_condition():
    with pytest.raises(ValueError):
        kkk({"b"}, {"a", "b"}, p)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixture_mutations_reject(name):
    proof = fixture_proofs()[name]
    for m in mutations(proof, 100, seed=sum(map(ord, name))):
        assert not check_proof(m).ok


def test_proof_json_round_trip():
    for proof in fixture_proofs().values():
        assert proof_from_dict(json.loads(dump_proof(proof))) == proof
    proof = Proof((p, Imp(p, q)), (ProofLine(p, Hyp(1)), ProofLine(Imp(p, q), Hyp(2)),
                                    ProofLine(q, MP(1, 2))))
    assert proof_from_dict(proof_to_dict(proof)) == proof


@pytest.mark.parametrize("doc", [
    {"hypotheses": [], "lines": [{"formula": "p", "rule": "guess"}]},
    {"hypotheses": [], "lines": [{"formula": "p ->", "rule": "taut"}]},
    {"hypotheses": [], "lines": [{"formula": "p", "rule": "mp", "from": [1]}]},
    {"hypotheses": [], "lines": [{"formula": "p", "rule": "neck", "from": [1]}]},
    {"hypotheses": [], "lines": [{"formula": "p", "rule": "axiom", "axiom": {"name": "modus"}}]},
    {"hypotheses": [], "lines": [{"formula": "p", "rule": "hyp", "hyp_index": "1"}]},
    {"hypotheses": [], "lines": [], "extra": 1},
    {"lines": []},
    [],
])
def test_proof_format_errors(doc):
    with pytest.raises(ProofFormatError):
        proof_from_dict(doc)


def test_deduction_examples():
    one = Proof((p,), (ProofLine(p, Hyp(1)),))
    out = deduction_transform(one, p)
    assert out.hypotheses == () and out.conclusion == F("p -> p") and check_proof(out).ok

    two = Proof((p, Imp(p, q)), (ProofLine(p, Hyp(1)), ProofLine(Imp(p, q), Hyp(2)),
                                  ProofLine(q, MP(1, 2))))
    out = deduction_transform(two, p)
    assert out.hypotheses == (Imp(p, q),) and out.conclusion == F("p -> q") and check_proof(out).ok


def test_deduction_errors():
    one = Proof((p,), (ProofLine(p, Hyp(1)),))
    with pytest.raises(TransformError):
        deduction_transform(one, q)
    bad = Proof((p,), (ProofLine(q, Hyp(1)),))
    with pytest.raises(TransformError):
        deduction_transform(bad, p)


def test_k_lift_examples():
    theorem = fixture_proofs()["knowledge-over-or"]
    out = k_lift_transform(theorem, {"a"})
    assert out.hypotheses == () and out.conclusion == Know({"a"}, theorem.conclusion)
    assert check_proof(out).ok

    two = Proof((p, Imp(p, q)), (ProofLine(p, Hyp(1)), ProofLine(Imp(p, q), Hyp(2)),
                                  ProofLine(q, MP(1, 2))))
    out = k_lift_transform(two, {"a"})
    assert out.hypotheses == (Know({"a"}, p), Know({"a"}, Imp(p, q)))
    assert out.conclusion == Know({"a"}, q)
    assert check_proof(out).ok
    assert check_proof(k_lift_transform(two, set())).ok


@given(st.integers(0, 2**32))
def test_transformers_on_random_proofs(seed):
    proof = random_hypothetical_proof(seed)
    assert check_proof(proof).ok
    for phi in set(proof.hypotheses):
        out = deduction_transform(proof, phi)
        assert check_proof(out).ok
        assert out.conclusion == Imp(phi, proof.conclusion)
        assert phi not in out.hypotheses
    lifted = k_lift_transform(proof, {"b"})
    assert check_proof(lifted).ok
    assert lifted.conclusion == Know({"b"}, proof.conclusion)


@given(st.integers(0, 2**32))
def test_purity_invariant(seed):
    proof = random_hypothetical_proof(seed)
    purity = line_purity(proof)
    for n, line in enumerate(proof.lines):
        j = line.justification
        if isinstance(j, Hyp):
            assert not purity[n]
        if isinstance(j, (NecK, NecH)):
            assert purity[j.i - 1] and purity[n]
        if isinstance(j, MP):
            assert purity[n] == (purity[j.i - 1] and purity[j.j - 1])


@given(st.integers(0, 2**32), st.integers(0, 2**32))
def test_soundness_bridge(proof_seed, game_seed):
    proof = random_hypothetical_proof(proof_seed, max_hypotheses=0)
    g = random_game(GameParams(4, 3, 2, partition_coarseness=0.5, extra_edge_prob=0.5), game_seed)
    assert find_counterexample(g, proof.conclusion) is None


def test_fixture_theorems_valid_in_random_games():
    params = GameParams(5, 3, 2, partition_coarseness=0.5, extra_edge_prob=0.5)
    proofs = fixture_proofs().values()
    for seed in range(100):
        g = random_game(params, seed)
        for proof in proofs:
            assert find_counterexample(g, proof.conclusion) is None
