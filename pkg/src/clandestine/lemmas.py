"""Hand-written derivations of four auxiliary theorems.

Each ``derive_*`` function appends a hypothesis-free derivation to a
:class:`ProofBuilder` and returns the index of its conclusion, so larger
derivations can reuse smaller ones.  :data:`FIXTURES` lists the instances
that ship as proof files.
"""

from __future__ import annotations

from .formula import TRUE, Can, Formula, Imp, Know, Neg, Var, coalition, disj
from .proofs import AxiomName as Ax
from .proofs import Proof, ProofBuilder

__all__ = [
    "derive_positive_introspection", "derive_kkk", "derive_k_neg_k", "derive_k_over_or",
    "positive_introspection", "kkk", "k_neg_k", "k_over_or", "FIXTURES", "fixture_proofs",
]


def derive_positive_introspection(b: ProofBuilder, c, phi: Formula) -> int:
    """``K{C} phi -> K{C} K{C} phi``."""
    c = coalition(c)
    k = Know(c, phi)
    nk = Neg(k)
    kk = Know(c, k)
    k_nk = Know(c, nk)
    k_n_k_nk = Know(c, Neg(k_nk))
    truth = b.axiom(Ax.TRUTH, C=c, phi=nk)                    # K¬k -> ¬k
    neg_in = b.axiom(Ax.NEG_INTROSPECTION, C=c, phi=nk)       # ¬K¬k -> K¬K¬k
    first = b.by_taut(Imp(k, k_n_k_nk), truth, neg_in)
    neg_in2 = b.axiom(Ax.NEG_INTROSPECTION, C=c, phi=phi)     # ¬k -> K¬k
    contra = b.by_taut(Imp(Neg(k_nk), k), neg_in2)
    nec = b.neck(contra, c)
    dist = b.axiom(Ax.DISTRIBUTIVITY, C=c, phi=Neg(k_nk), psi=k)
    second = b.mp(nec, dist)                                  # K¬K¬k -> Kk
    return b.by_taut(Imp(k, kk), first, second)


def derive_kkk(b: ProofBuilder, f, e, phi: Formula) -> int:
    """``K{F} K{E} K{F} phi -> H{F} phi`` for ``F`` not a subset of ``E``."""
    f, e = coalition(f), coalition(e)
    if f <= e:
        raise ValueError("needs F ⊄ E")
    active, informants, adversaries = f - e, f & e, e - f
    k_top = Know(active, TRUE)
    kf = Know(f, phi)
    cia = b.axiom(Ax.CIA, C=active, I=informants, A=adversaries, phi=TRUE, psi=phi)
    weak = b.taut(Imp(kf, Imp(k_top, kf)))
    step = b.mp(b.neck(weak, e), b.axiom(Ax.DISTRIBUTIVITY, C=e, phi=kf, psi=Imp(k_top, kf)))
    lifted = b.mp(b.neck(step, f), b.axiom(
        Ax.DISTRIBUTIVITY, C=f, phi=Know(e, kf), psi=Know(e, Imp(k_top, kf))))
    can_top = b.nech(b.taut(TRUE), active)
    goal = Imp(Know(f, Know(e, kf)), Can(f, phi))
    return b.by_taut(goal, lifted, cia, can_top)


def derive_k_neg_k(b: ProofBuilder, e, f, phi: Formula) -> int:
    """``K{E} !K{F} phi -> !H{F} phi`` for disjoint ``E`` and ``F``."""
    e, f = coalition(e), coalition(f)
    if e & f:
        raise ValueError("needs E ∩ F = ∅")
    fe = f | e
    kf = Know(f, phi)
    g = Imp(kf, Know(fe, Neg(TRUE)))
    cia = b.axiom(Ax.CIA, C=f, I=e, A=frozenset(), phi=phi, psi=Neg(TRUE))
    step = b.mp(b.neck(b.taut(Imp(Neg(kf), g)), e),
                b.axiom(Ax.DISTRIBUTIVITY, C=e, phi=Neg(kf), psi=g))       # K¬kf -> K g
    intro = derive_positive_introspection(b, e, g)                       # K g -> K K g
    mono = b.axiom(Ax.MONOTONICITY, Cp=e, C=fe, phi=Know(e, g))           # K_E K g -> K_FE K g
    lifted = b.by_taut(Imp(Know(e, Neg(kf)), Know(fe, Know(e, g))), step, intro, mono)
    nonterm = b.axiom(Ax.NONTERMINATION, C=fe)
    goal = Imp(Know(e, Neg(kf)), Neg(Can(f, phi)))
    return b.by_taut(goal, lifted, cia, nonterm)


def derive_k_over_or(b: ProofBuilder, e, f, phi: Formula, psi: Formula) -> int:
    """``K{F} (K{E} phi | psi) -> K{E} phi | K{F} psi`` for ``E`` a subset of ``F``."""
    e, f = coalition(e), coalition(f)
    if not e <= f:
        raise ValueError("needs E ⊆ F")
    ke = Know(e, phi)
    dist = b.axiom(Ax.DISTRIBUTIVITY, C=f, phi=Neg(ke), psi=psi)
    mono = b.axiom(Ax.MONOTONICITY, Cp=e, C=f, phi=Neg(ke))
    neg_in = b.axiom(Ax.NEG_INTROSPECTION, C=e, phi=phi)
    goal = Imp(Know(f, disj(ke, psi)), disj(ke, Know(f, psi)))
    return b.by_taut(goal, dist, mono, neg_in)


def _theorem(derive, *args) -> Proof:
    b = ProofBuilder()
    return b.build(derive(b, *args))


def positive_introspection(c, phi: Formula) -> Proof:
    return _theorem(derive_positive_introspection, c, phi)


def kkk(f, e, phi: Formula) -> Proof:
    return _theorem(derive_kkk, f, e, phi)


def k_neg_k(e, f, phi: Formula) -> Proof:
    return _theorem(derive_k_neg_k, e, f, phi)


def k_over_or(e, f, phi: Formula, psi: Formula) -> Proof:
    return _theorem(derive_k_over_or, e, f, phi, psi)


_p, _q = Var("p"), Var("q")

# file stem -> (proof, statement as it should read)
FIXTURES = {
    "positive-introspection": (lambda: positive_introspection({"a"}, _p), "K{a} p -> K{a} K{a} p"),
    "informed-power": (lambda: kkk({"a", "b"}, {"b"}, _p), "K{a,b} K{b} K{a,b} p -> H{a,b} p"),
    "known-inability": (lambda: k_neg_k({"a"}, {"b"}, _p), "K{a} !K{b} p -> !H{b} p"),
    "knowledge-over-or": (lambda: k_over_or({"a"}, {"a", "b"}, _p, _q),
               "K{a,b} (K{a} p | q) -> K{a} p | K{a,b} q"),
}


def fixture_proofs() -> dict[str, Proof]:
    return {name: make() for name, (make, _) in FIXTURES.items()}
