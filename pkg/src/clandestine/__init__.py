"""Distributed knowledge and clandestine power: formulas, games, a model
checker, a Hilbert-style proof checker and a soundness fuzz harness."""

from pathlib import Path

from .checker import (ModelChecker, QueryError, UnknownAgentError, UnknownStateError,
                      find_counterexample, holds, holds_brute, truth_set)
from .formula import (FALSE, TRUE, Can, Formula, FormulaSyntaxError, Imp, Know, Neg, Var,
                      coalition, conj, disj, modal_atoms, parse_formula, print_formula)
from .game import (AgentLimitError, ConcealmentError, GameDescription, GameError,
                   GameFormatError, GameParams, MechanismTuple, NonterminationError,
                   PartitionError, UndeclaredNameError, ValidatedGame, coalition_indist,
                   load_game, random_game, validate_game)
from .harness import (CountermodelBudget, FuzzParams, FuzzReport, fuzz_soundness,
                      instantiate_random_axiom, random_formula, search_countermodel)
from .proofs import (AtomLimitError, AxiomName, Binding, Proof, ProofBuilder, ProofLine,
                     SideConditionError, Verdict, check_proof, deduction_transform,
                     instantiate_axiom, is_tautology, k_lift_transform, load_proof)

__version__ = "0.1.0"

FIXTURES_DIR = Path(__file__).parent / "fixtures"
