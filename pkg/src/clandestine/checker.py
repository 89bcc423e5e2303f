"""Model checking formulas against validated clandestine games.

Two independent evaluators implement the same satisfaction relation:

* :func:`holds` computes the extension of every subformula as a bitmask over
  the states, using the fact that ``K{C}`` and ``H{C}`` are constant on the
  blocks of the coalition's partition.
* :func:`holds_brute` restates the clauses with literal nested loops over
  states, sub-coalitions and operations, and is used as a test oracle.
"""

from __future__ import annotations

from typing import Optional

from .formula import Can, Formula, Imp, Know, Neg, Var, agents_of
from .game import MechanismTuple, ValidatedGame, subsets

__all__ = [
    "ModelChecker", "QueryError", "UnknownStateError", "UnknownAgentError",
    "holds", "holds_brute", "truth_set", "find_counterexample", "extension",
]


class QueryError(ValueError):
    pass


class UnknownStateError(QueryError):
    pass


class UnknownAgentError(QueryError):
    pass


def _check_formula(game: ValidatedGame, f: Formula) -> None:
    unknown = agents_of(f) - set(game.agents)
    if unknown:
        raise UnknownAgentError(f"formula mentions unknown agent(s) {sorted(unknown)}")


def _check_state(game: ValidatedGame, state: str) -> None:
    if state not in game.state_index:
        raise UnknownStateError(f"unknown state {state!r}")


class ModelChecker:
    """Bitmask evaluator bound to one game.

    The per-modality steps are separate methods so that test mutants can
    swap exactly one semantic clause.
    """

    def __init__(self, game: ValidatedGame):
        self.game = game

    def extension(self, f: Formula) -> int:
        """Bitmask of the states where ``f`` holds."""
        # keyed by node identity; lives for this call only
        memo: dict[int, int] = {}
        return self._eval(f, memo)

    def _eval(self, f: Formula, memo: dict[int, int]) -> int:
        key = id(f)
        hit = memo.get(key)
        if hit is not None:
            return hit
        g = self.game
        if isinstance(f, Var):
            out = 0
            for s in g.valuation.get(f.name, ()):
                out |= 1 << g.state_index[s]
        elif isinstance(f, Neg):
            out = g.all_mask & ~self._eval(f.body, memo)
        elif isinstance(f, Imp):
            out = (g.all_mask & ~self._eval(f.lhs, memo)) | self._eval(f.rhs, memo)
        elif isinstance(f, Know):
            out = self.know_mask(g.coalition_mask(f.coalition), self._eval(f.body, memo))
        elif isinstance(f, Can):
            out = self.can_mask(g.coalition_mask(f.coalition), self._eval(f.body, memo))
        else:
            raise TypeError(f"not a formula: {f!r}")
        memo[key] = out
        return out

    def _full_blocks(self, cmask: int, body: int) -> int:
        _, masks = self.game.blocks(cmask)
        out = 0
        for b in masks:
            if b & ~body == 0:
                out |= b
        return out

    def know_mask(self, cmask: int, body: int) -> int:
        return self._full_blocks(cmask, body)

    def outcome_mask(self, cmask: int, body: int) -> int:
        """States ``u`` whose every ``C``-indistinguishable ``u'`` satisfies the body."""
        return self._full_blocks(cmask, body)

    def acting_coalitions(self, cmask: int) -> list[int]:
        """Nonempty sub-coalitions of ``cmask``."""
        subs = []
        sub = cmask
        while sub:
            subs.append(sub)
            sub = (sub - 1) & cmask
        return subs

    def can_mask(self, cmask: int, body: int) -> int:
        g = self.game
        good = self.outcome_mask(cmask, body)
        _, masks = g.blocks(cmask)
        actors = self.acting_coalitions(cmask)
        n_ops = len(g.operations)
        succ = g.successors
        out = 0
        for block in masks:
            members = [i for i in range(len(g.states)) if block >> i & 1]
            if any(all(succ.get((w, actor, op), 0) & ~good == 0 for w in members)
                   for actor in actors for op in range(n_ops)):
                out |= block
        return out


def extension(game: ValidatedGame, f: Formula) -> int:
    _check_formula(game, f)
    return ModelChecker(game).extension(f)


def holds(game: ValidatedGame, state: str, f: Formula) -> bool:
    """Whether ``f`` is satisfied at ``state``.

    Variables missing from the valuation are false everywhere.
    """
    _check_state(game, state)
    return bool(extension(game, f) >> game.state_index[state] & 1)


def truth_set(game: ValidatedGame, f: Formula) -> frozenset:
    return game.states_of(extension(game, f))


def find_counterexample(game: ValidatedGame, f: Formula) -> Optional[str]:
    """First state, in declared order, where ``f`` fails; ``None`` if ``f`` is valid."""
    ext = extension(game, f)
    for i, s in enumerate(game.states):
        if not ext >> i & 1:
            return s
    return None


# -- oracle ----------------------------------------------------------------

class _Frame:
    def __init__(self, game: ValidatedGame):
        self.states = game.states
        self.operations = game.operations
        self.valuation = game.valuation
        self.mechanism = game.closed_mechanism
        self.block_of = {a: {s: i for i, block in enumerate(blocks) for s in block}
                         for a, blocks in game.indist.items()}

    def indist(self, c, w: str, u: str) -> bool:
        return all(self.block_of[a][w] == self.block_of[a][u] for a in c)


def holds_brute(game: ValidatedGame, state: str, f: Formula) -> bool:
    """Oracle for :func:`holds`: a direct transcription of the satisfaction clauses."""
    _check_state(game, state)
    _check_formula(game, f)
    frame = _Frame(game)

    def sat(w: str, g: Formula) -> bool:
        if isinstance(g, Var):
            return w in frame.valuation.get(g.name, ())
        if isinstance(g, Neg):
            return not sat(w, g.body)
        if isinstance(g, Imp):
            return not sat(w, g.lhs) or sat(w, g.rhs)
        if isinstance(g, Know):
            return all(sat(u, g.body) for u in frame.states if frame.indist(g.coalition, w, u))
        if isinstance(g, Can):
            c = g.coalition
            goal = {u2 for u2 in frame.states if sat(u2, g.body)}
            for actor in subsets(c):
                if not actor:
                    continue
                for op in frame.operations:
                    ok = True
                    for w2 in frame.states:
                        if not frame.indist(c, w, w2):
                            continue
                        for u in frame.states:
                            if MechanismTuple(w2, actor, op, u) not in frame.mechanism:
                                continue
                            for u2 in frame.states:
                                if frame.indist(c, u, u2) and u2 not in goal:
                                    ok = False
                    if ok:
                        return True
            return False
        raise TypeError(f"not a formula: {g!r}")

    return sat(state, f)
