"""Hilbert-style proofs for the logic of clandestine power.

A :class:`Proof` is a list of hypotheses and a list of justified lines.
Lines are checked one at a time by :func:`check_proof`.  Each line also has a
*purity* flag: a line is pure when it does not depend on any hypothesis.
Both necessitation rules apply to pure lines only, so hypotheses can only
combine with theorems through modus ponens.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

from .formula import (FALSE, Can, Formula, FormulaSyntaxError, Imp, Know, Neg,
                      coalition, modal_atoms, parse_formula, print_formula)

__all__ = [
    "AxiomName", "Binding", "SCHEMAS", "Hyp", "Taut", "Axiom", "MP", "NecK", "NecH",
    "ProofLine", "Proof", "Verdict", "ProofBuilder",
    "SchemaError", "SideConditionError", "BindingError", "AtomLimitError",
    "ProofFormatError", "TransformError",
    "instantiate_axiom", "is_tautology", "check_proof", "line_purity",
    "deduction_transform", "k_lift_transform",
    "proof_from_dict", "proof_to_dict", "load_proof", "dump_proof",
    "ATOM_LIMIT",
]

ATOM_LIMIT = 20


class AxiomName(str, Enum):
    TRUTH = "truth"
    NEG_INTROSPECTION = "neg-introspection"
    DISTRIBUTIVITY = "distributivity"
    MONOTONICITY = "monotonicity"
    STRATEGIC_INTROSPECTION = "strategic-introspection"
    CIA = "cia"
    NONTERMINATION = "nontermination"
    EMPTY_COALITION = "empty-coalition"


# formula metavariables, coalition metavariables
SCHEMAS: dict[AxiomName, tuple[tuple[str, ...], tuple[str, ...]]] = {
    AxiomName.TRUTH: (("phi",), ("C",)),
    AxiomName.NEG_INTROSPECTION: (("phi",), ("C",)),
    AxiomName.DISTRIBUTIVITY: (("phi", "psi"), ("C",)),
    AxiomName.MONOTONICITY: (("phi",), ("C'", "C")),
    AxiomName.STRATEGIC_INTROSPECTION: (("phi",), ("C",)),
    AxiomName.CIA: (("phi", "psi"), ("C", "I", "A")),
    AxiomName.NONTERMINATION: ((), ("C",)),
    AxiomName.EMPTY_COALITION: (("phi",), ()),
}


class SchemaError(ValueError):
    pass


class SideConditionError(SchemaError):
    pass


class BindingError(SchemaError):
    pass


class AtomLimitError(ValueError):
    pass


class ProofFormatError(ValueError):
    pass


class TransformError(ValueError):
    pass


@dataclass(frozen=True)
class Binding:
    formulas: Mapping[str, Formula] = field(default_factory=dict)
    coalitions: Mapping[str, frozenset] = field(default_factory=dict)

    @classmethod
    def of(cls, **kw) -> "Binding":
        """``Binding.of(C={"a"}, phi=p)``; use ``Cp`` for the ``C'`` slot."""
        formulas, coalitions = {}, {}
        for k, v in kw.items():
            if k in ("phi", "psi"):
                formulas[k] = v
            else:
                coalitions["C'" if k == "Cp" else k] = coalition(v)
        return cls(formulas, coalitions)


def instantiate_axiom(name: Union[AxiomName, str], b: Binding) -> Formula:
    """The instance of axiom schema ``name`` under ``b``, side conditions enforced."""
    try:
        name = AxiomName(name)
    except ValueError:
        raise BindingError(f"unknown axiom {name!r}") from None
    fvars, cvars = SCHEMAS[name]
    if set(b.formulas) != set(fvars) or set(b.coalitions) != set(cvars):
        raise BindingError(
            f"{name.value} needs formulas {list(fvars)} and coalitions {list(cvars)}, got "
            f"{sorted(b.formulas)} and {sorted(b.coalitions)}")
    phi = b.formulas.get("phi")
    psi = b.formulas.get("psi")
    C = b.coalitions.get("C")

    if name is AxiomName.TRUTH:
        return Imp(Know(C, phi), phi)
    if name is AxiomName.NEG_INTROSPECTION:
        return Imp(Neg(Know(C, phi)), Know(C, Neg(Know(C, phi))))
    if name is AxiomName.DISTRIBUTIVITY:
        return Imp(Know(C, Imp(phi, psi)), Imp(Know(C, phi), Know(C, psi)))
    if name is AxiomName.MONOTONICITY:
        sub = b.coalitions["C'"]
        if not sub <= C:
            raise SideConditionError(
                f"monotonicity needs C' ⊆ C, got C'={sorted(sub)} C={sorted(C)}")
        return Imp(Know(sub, phi), Know(C, phi))
    if name is AxiomName.STRATEGIC_INTROSPECTION:
        return Imp(Can(C, phi), Know(C, Can(C, phi)))
    if name is AxiomName.CIA:
        I, A = b.coalitions["I"], b.coalitions["A"]
        if C & (I | A):
            raise SideConditionError(
                f"cia needs C disjoint from I ∪ A, shared agent(s) {sorted(C & (I | A))}")
        CI = C | I
        premise = Know(CI, Know(A | I, Imp(Know(C, phi), Know(CI, psi))))
        return Imp(premise, Imp(Can(C, phi), Can(CI, psi)))
    if name is AxiomName.NONTERMINATION:
        return Neg(Can(C, FALSE))
    return Neg(Can(frozenset(), phi))


def is_tautology(f: Formula) -> bool:
    """Truth-table check with modal subformulas treated as opaque atoms."""
    atoms = modal_atoms(f)
    k = len(atoms)
    if k > ATOM_LIMIT:
        raise AtomLimitError(f"{k} modal atoms exceed the truth-table limit of {ATOM_LIMIT}")
    # column i of the truth table, packed into one integer of 2**k bits
    rows = 1 << k
    full = (1 << rows) - 1
    columns = {}
    for i, atom in enumerate(atoms):
        block = (1 << (1 << i)) - 1
        pattern = block << (1 << i)
        period = 1 << (i + 1)
        col = 0
        for start in range(0, rows, period):
            col |= pattern << start
        columns[atom] = col & full

    def ev(g: Formula) -> int:
        if isinstance(g, Neg):
            return full & ~ev(g.body)
        if isinstance(g, Imp):
            return (full & ~ev(g.lhs)) | ev(g.rhs)
        return columns[g]

    return ev(f) == full


# -- proof objects ---------------------------------------------------------

@dataclass(frozen=True)
class Hyp:
    k: int


@dataclass(frozen=True)
class Taut:
    pass


@dataclass(frozen=True)
class Axiom:
    name: AxiomName
    binding: Binding


@dataclass(frozen=True)
class MP:
    """Modus ponens: line ``j`` must read ``line i -> this``."""
    i: int
    j: int


@dataclass(frozen=True)
class NecK:
    i: int
    coalition: frozenset


@dataclass(frozen=True)
class NecH:
    i: int
    coalition: frozenset


Justification = Union[Hyp, Taut, Axiom, MP, NecK, NecH]


@dataclass(frozen=True)
class ProofLine:
    formula: Formula
    justification: Justification


@dataclass(frozen=True)
class Proof:
    hypotheses: tuple
    lines: tuple

    def __post_init__(self):
        object.__setattr__(self, "hypotheses", tuple(self.hypotheses))
        object.__setattr__(self, "lines", tuple(self.lines))

    @property
    def conclusion(self) -> Formula:
        return self.lines[-1].formula


@dataclass(frozen=True)
class Verdict:
    ok: bool
    line: Optional[int] = None
    reason: str = ""
    message: str = ""
    purity: tuple = ()

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "accepted"
        where = f"line {self.line}: " if self.line else ""
        return f"rejected: {where}{self.reason}: {self.message}"


def check_proof(p: Proof) -> Verdict:
    """Accept ``p`` or report the first failing line.

    Raises :class:`AtomLimitError` when a ``taut`` line has too many atoms.
    """
    if not p.lines:
        return Verdict(False, None, "empty-proof", "a proof needs at least one line")
    purity: list[bool] = []

    def fail(n: int, reason: str, message: str) -> Verdict:
        return Verdict(False, n, reason, message, tuple(purity))

    def ref(n: int, i: int) -> bool:
        return isinstance(i, int) and 1 <= i < n

    for n, line in enumerate(p.lines, 1):
        f, j = line.formula, line.justification
        if isinstance(j, Hyp):
            if not (isinstance(j.k, int) and 1 <= j.k <= len(p.hypotheses)):
                return fail(n, "bad-index", f"no hypothesis {j.k}")
            if f != p.hypotheses[j.k - 1]:
                return fail(n, "hyp-mismatch", f"hypothesis {j.k} is not {print_formula(f)}")
            purity.append(False)
        elif isinstance(j, Taut):
            if not is_tautology(f):
                return fail(n, "not-tautology", f"{print_formula(f)} is not a tautology")
            purity.append(True)
        elif isinstance(j, Axiom):
            try:
                expected = instantiate_axiom(j.name, j.binding)
            except SideConditionError as exc:
                return fail(n, "side-condition", str(exc))
            except BindingError as exc:
                return fail(n, "binding", str(exc))
            if f != expected:
                return fail(n, "axiom-mismatch",
                            f"instance is {print_formula(expected)}, line has {print_formula(f)}")
            purity.append(True)
        elif isinstance(j, MP):
            if not (ref(n, j.i) and ref(n, j.j)):
                return fail(n, "bad-index", f"modus ponens cites lines {j.i}, {j.j}")
            if p.lines[j.j - 1].formula != Imp(p.lines[j.i - 1].formula, f):
                return fail(n, "mp-mismatch",
                            f"line {j.j} does not read: line {j.i} -> {print_formula(f)}")
            purity.append(purity[j.i - 1] and purity[j.j - 1])
        elif isinstance(j, (NecK, NecH)):
            if not ref(n, j.i):
                return fail(n, "bad-index", f"necessitation cites line {j.i}")
            if isinstance(j, NecH) and not j.coalition:
                return fail(n, "empty-coalition", "H-necessitation needs a nonempty coalition")
            modal = Know if isinstance(j, NecK) else Can
            if f != modal(j.coalition, p.lines[j.i - 1].formula):
                return fail(n, "nec-mismatch", f"line is not the necessitation of line {j.i}")
            if not purity[j.i - 1]:
                return fail(n, "impure-necessitation",
                            f"line {j.i} depends on a hypothesis; necessitation needs a theorem")
            purity.append(True)
        else:
            return fail(n, "unknown-rule", f"unknown justification {j!r}")
    return Verdict(True, purity=tuple(purity))


def line_purity(p: Proof) -> tuple:
    v = check_proof(p)
    if not v.ok:
        raise TransformError(f"proof does not check: {v}")
    return v.purity


# -- building proofs -------------------------------------------------------

class ProofBuilder:
    """Append-only proof assembly; every method returns a 1-based line index.

    A formula already proved is not proved again (unless the earlier line is
    tainted by a hypothesis and the new one is not).
    """

    def __init__(self, hypotheses: Sequence[Formula] = ()):
        self.hypotheses = tuple(hypotheses)
        self.lines: list[ProofLine] = []
        self.pure: list[bool] = []
        self._index: dict[Formula, int] = {}

    def formula(self, i: int) -> Formula:
        return self.lines[i - 1].formula

    def add(self, f: Formula, j: Justification) -> int:
        if isinstance(j, Hyp):
            pure = False
        elif isinstance(j, MP):
            pure = self.pure[j.i - 1] and self.pure[j.j - 1]
        else:
            pure = True
        seen = self._index.get(f)
        if seen is not None and (self.pure[seen - 1] or not pure):
            return seen
        self.lines.append(ProofLine(f, j))
        self.pure.append(pure)
        self._index[f] = len(self.lines)
        return len(self.lines)

    def hyp(self, k: int) -> int:
        return self.add(self.hypotheses[k - 1], Hyp(k))

    def taut(self, f: Formula) -> int:
        return self.add(f, Taut())

    def axiom(self, name: AxiomName, **kw) -> int:
        b = Binding.of(**kw)
        return self.add(instantiate_axiom(name, b), Axiom(AxiomName(name), b))

    def mp(self, i: int, j: int) -> int:
        imp = self.formula(j)
        if not (isinstance(imp, Imp) and imp.lhs == self.formula(i)):
            raise ValueError(f"line {j} is not an implication from line {i}")
        return self.add(imp.rhs, MP(i, j))

    def neck(self, i: int, c) -> int:
        c = coalition(c)
        return self.add(Know(c, self.formula(i)), NecK(i, c))

    def nech(self, i: int, c) -> int:
        c = coalition(c)
        return self.add(Can(c, self.formula(i)), NecH(i, c))

    def by_taut(self, conclusion: Formula, *premises: int) -> int:
        """Derive ``conclusion`` from ``premises`` through one tautology and modus ponens."""
        chain = conclusion
        for i in reversed(premises):
            chain = Imp(self.formula(i), chain)
        cur = self.taut(chain)
        for i in premises:
            cur = self.mp(i, cur)
        return cur

    def copy(self, lines: Sequence[ProofLine], hyp_map=None) -> dict[int, int]:
        """Replay ``lines`` here; returns old index -> new index."""
        where: dict[int, int] = {}
        for n, line in enumerate(lines, 1):
            where[n] = self.add(line.formula, _remap(line.justification, where, hyp_map))
        return where

    def build(self, goal: Optional[int] = None) -> Proof:
        """The proof whose last line is ``goal`` (default: the last line added)."""
        goal = len(self.lines) if goal is None else goal
        return Proof(self.hypotheses, tuple(self.lines[:goal]))


def _remap(j: Justification, where: Mapping[int, int], hyp_map=None) -> Justification:
    if isinstance(j, Hyp):
        if hyp_map is None:
            return j
        return Hyp(hyp_map[j.k])
    if isinstance(j, MP):
        return MP(where[j.i], where[j.j])
    if isinstance(j, NecK):
        return NecK(where[j.i], j.coalition)
    if isinstance(j, NecH):
        return NecH(where[j.i], j.coalition)
    return j


def deduction_transform(p: Proof, phi: Formula) -> Proof:
    """Turn a proof of ``psi`` from ``X, phi`` into a proof of ``phi -> psi`` from ``X``.

    Every occurrence of ``phi`` is dropped from the hypotheses.  Lines are
    rebuilt by the usual four cases: theorems and other hypotheses go through
    ``psi -> (phi -> psi)``, the ``phi`` line becomes the tautology
    ``phi -> phi``, and modus ponens through
    ``(phi -> a) -> ((phi -> (a -> b)) -> (phi -> b))``.
    """
    purity = line_purity(p)
    if phi not in p.hypotheses:
        raise TransformError(f"{print_formula(phi)} is not a hypothesis of the proof")
    rest = [h for h in p.hypotheses if h != phi]
    hyp_map = {k: rest.index(h) + 1 for k, h in enumerate(p.hypotheses, 1) if h != phi}
    b = ProofBuilder(rest)
    plain: dict[int, int] = {}
    lifted: dict[int, int] = {}
    for n, line in enumerate(p.lines, 1):
        psi, j = line.formula, line.justification
        target = Imp(phi, psi)
        if purity[n - 1]:
            plain[n] = b.add(psi, _remap(j, plain))
            lifted[n] = b.by_taut(target, plain[n])
        elif isinstance(j, Hyp):
            if psi == phi:
                lifted[n] = b.taut(target)
            else:
                lifted[n] = b.by_taut(target, b.hyp(hyp_map[j.k]))
        elif isinstance(j, MP):
            lifted[n] = b.by_taut(target, lifted[j.i], lifted[j.j])
        else:
            raise TransformError(f"line {n}: necessitation over a hypothesis-tainted line")
    return b.build(lifted[len(p.lines)])


def k_lift_transform(p: Proof, c) -> Proof:
    """From ``phi_1..phi_n |- psi`` build ``K{C} phi_1..K{C} phi_n |- K{C} psi``.

    Discharges the hypotheses with :func:`deduction_transform`, necessitates
    the resulting theorem, then peels one hypothesis at a time with
    distributivity and modus ponens.
    """
    c = coalition(c)
    line_purity(p)
    hyps = list(p.hypotheses)
    distinct = list(dict.fromkeys(hyps))
    q = p
    for h in reversed(distinct):
        q = deduction_transform(q, h)
    b = ProofBuilder([Know(c, h) for h in hyps])
    where = b.copy(q.lines)
    cur = b.neck(where[len(q.lines)], c)
    body = q.conclusion
    for h in distinct:
        rest = body.rhs
        step = b.mp(cur, b.axiom(AxiomName.DISTRIBUTIVITY, C=c, phi=h, psi=rest))
        cur = b.mp(b.hyp(hyps.index(h) + 1), step)
        body = rest
    return b.build(cur)


# -- JSON ------------------------------------------------------------------

_RULES = ("hyp", "taut", "axiom", "mp", "neck", "nech")


def _parse(text, where: str) -> Formula:
    if not isinstance(text, str):
        raise ProofFormatError(f"{where}: formula must be a string")
    try:
        return parse_formula(text)
    except FormulaSyntaxError as exc:
        raise ProofFormatError(f"{where}: {exc}") from exc


def _coalition_field(value, where: str) -> frozenset:
    if not isinstance(value, list) or not all(isinstance(a, str) for a in value):
        raise ProofFormatError(f"{where}: coalition must be an array of agent names")
    try:
        return coalition(value)
    except ValueError as exc:
        raise ProofFormatError(f"{where}: {exc}") from exc


def _indices(entry: Mapping, count: int, where: str) -> list[int]:
    idx = entry.get("from")
    if (not isinstance(idx, list) or len(idx) != count
            or not all(isinstance(i, int) and not isinstance(i, bool) for i in idx)):
        raise ProofFormatError(f"{where}: 'from' must list {count} line index(es)")
    return idx


def proof_from_dict(doc: Mapping) -> Proof:
    if not isinstance(doc, Mapping) or set(doc) - {"hypotheses", "lines"}:
        raise ProofFormatError("proof document needs keys 'hypotheses' and 'lines' only")
    hyps = doc.get("hypotheses", [])
    if not isinstance(hyps, list):
        raise ProofFormatError("'hypotheses' must be an array")
    hypotheses = [_parse(h, f"hypothesis {k}") for k, h in enumerate(hyps, 1)]
    raw = doc.get("lines")
    if not isinstance(raw, list) or not raw:
        raise ProofFormatError("'lines' must be a nonempty array")
    lines = []
    for n, entry in enumerate(raw, 1):
        where = f"line {n}"
        if not isinstance(entry, Mapping):
            raise ProofFormatError(f"{where}: must be an object")
        f = _parse(entry.get("formula"), where)
        rule = entry.get("rule")
        if rule not in _RULES:
            raise ProofFormatError(f"{where}: rule must be one of {list(_RULES)}")
        if rule == "hyp":
            k = entry.get("hyp_index")
            if not isinstance(k, int) or isinstance(k, bool):
                raise ProofFormatError(f"{where}: 'hyp_index' must be an integer")
            j: Justification = Hyp(k)
        elif rule == "taut":
            j = Taut()
        elif rule == "axiom":
            ax = entry.get("axiom")
            if not isinstance(ax, Mapping) or "name" not in ax:
                raise ProofFormatError(f"{where}: 'axiom' must be an object with a name")
            try:
                name = AxiomName(ax["name"])
            except ValueError:
                raise ProofFormatError(f"{where}: unknown axiom {ax['name']!r}") from None
            formulas = {k: _parse(v, f"{where} binding {k}")
                        for k, v in (ax.get("formulas") or {}).items()}
            coalitions = {k: _coalition_field(v, f"{where} binding {k}")
                          for k, v in (ax.get("coalitions") or {}).items()}
            j = Axiom(name, Binding(formulas, coalitions))
        elif rule == "mp":
            i, jj = _indices(entry, 2, where)
            j = MP(i, jj)
        else:
            (i,) = _indices(entry, 1, where)
            c = _coalition_field(entry.get("coalition"), where)
            j = NecK(i, c) if rule == "neck" else NecH(i, c)
        lines.append(ProofLine(f, j))
    return Proof(tuple(hypotheses), tuple(lines))


def proof_to_dict(p: Proof) -> dict:
    lines = []
    for line in p.lines:
        j = line.justification
        entry: dict = {"formula": print_formula(line.formula)}
        if isinstance(j, Hyp):
            entry.update(rule="hyp", hyp_index=j.k)
        elif isinstance(j, Taut):
            entry.update(rule="taut")
        elif isinstance(j, Axiom):
            entry.update(rule="axiom", axiom={
                "name": AxiomName(j.name).value,
                "formulas": {k: print_formula(v) for k, v in sorted(j.binding.formulas.items())},
                "coalitions": {k: sorted(v) for k, v in sorted(j.binding.coalitions.items())},
            })
        elif isinstance(j, MP):
            entry.update(rule="mp", **{"from": [j.i, j.j]})
        else:
            entry.update(rule="neck" if isinstance(j, NecK) else "nech",
                         coalition=sorted(j.coalition), **{"from": [j.i]})
        lines.append(entry)
    return {"hypotheses": [print_formula(h) for h in p.hypotheses], "lines": lines}


def load_proof(path: Union[str, Path]) -> Proof:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ProofFormatError(f"{path}: invalid JSON: {exc}") from exc
    return proof_from_dict(doc)


def dump_proof(p: Proof) -> str:
    return json.dumps(proof_to_dict(p), indent=2, ensure_ascii=False)
