"""Clandestine games: description, validation, mechanism closure, generation."""

from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from .formula import RESERVED_VAR, is_identifier
from .rng import Stream

__all__ = [
    "MechanismTuple", "GameDescription", "ValidatedGame", "GameParams",
    "GameError", "GameFormatError", "PartitionError", "UndeclaredNameError",
    "ConcealmentError", "NonterminationError", "AgentLimitError", "GameParamsError",
    "coalition_indist", "close_mechanism", "validate_game", "random_game",
    "concealment_witness", "subsets", "game_from_dict", "game_to_dict",
    "load_game", "dump_game", "MAX_AGENTS", "WARN_AGENTS",
]

MAX_AGENTS = 16
WARN_AGENTS = 10
DEFAULT_VARIABLES = ("p", "q", "r", "s")


class GameError(Exception):
    pass


class GameFormatError(GameError):
    """The game document is malformed (keys, types, duplicate names)."""


class PartitionError(GameError):
    pass


class UndeclaredNameError(GameError):
    pass


class AgentLimitError(GameError):
    pass


class ConcealmentError(GameError):
    def __init__(self, tup: "MechanismTuple", complement: frozenset, agent: str):
        self.tuple = tup
        self.complement = complement
        self.agent = agent
        super().__init__(
            f"{tup} breaks concealment: complement {_set_text(complement)} "
            f"distinguishes {tup.source} from {tup.target} (agent {agent})")


class NonterminationError(GameError):
    def __init__(self, state: str, coalition: frozenset, op: str):
        self.key = (state, coalition, op)
        super().__init__(
            f"no outcome for ({state},{_set_text(coalition)},{op}): nontermination fails")


class GameParamsError(ValueError):
    pass


def _set_text(c: Iterable[str]) -> str:
    return "{" + ",".join(sorted(c)) + "}"


@dataclass(frozen=True)
class MechanismTuple:
    source: str
    coalition: frozenset
    op: str
    target: str

    def __post_init__(self):
        if not isinstance(self.coalition, frozenset):
            object.__setattr__(self, "coalition", frozenset(self.coalition))

    def __str__(self) -> str:
        return f"({self.source},{_set_text(self.coalition)},{self.op},{self.target})"


@dataclass(frozen=True)
class GameDescription:
    agents: tuple
    states: tuple
    indist: Mapping[str, tuple]
    operations: tuple
    mechanism: tuple
    implicit_self_loops: bool = True
    valuation: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "operations", tuple(self.operations))
        object.__setattr__(self, "mechanism", tuple(
            t if isinstance(t, MechanismTuple) else MechanismTuple(*t)
            for t in self.mechanism))
        object.__setattr__(self, "indist", {
            a: tuple(tuple(block) for block in blocks) for a, blocks in self.indist.items()})
        object.__setattr__(self, "valuation", {
            p: frozenset(states) for p, states in self.valuation.items()})


def subsets(agents: Iterable[str]) -> list[frozenset]:
    """All coalitions over ``agents``, by increasing size then lexicographically."""
    names = sorted(agents)
    return [frozenset(c) for k in range(len(names) + 1)
            for c in itertools.combinations(names, k)]


def concealment_witness(block_of: Mapping[str, Mapping[str, int]], agents: Iterable[str],
                        coalition: frozenset, source: str, target: str) -> Optional[str]:
    """First agent outside ``coalition`` that tells ``source`` from ``target``, if any."""
    for a in agents:
        if a not in coalition and block_of[a][source] != block_of[a][target]:
            return a
    return None


def _block_maps(indist: Mapping[str, Sequence[Sequence[str]]]) -> dict[str, dict[str, int]]:
    return {a: {s: i for i, block in enumerate(blocks) for s in block}
            for a, blocks in indist.items()}


def _group(states: Sequence[str], key) -> list[frozenset]:
    groups: dict = {}
    for s in states:
        groups.setdefault(key(s), []).append(s)
    return [frozenset(g) for g in groups.values()]


def coalition_indist(game: Union["ValidatedGame", GameDescription], c: Iterable[str]) -> list[frozenset]:
    """Partition of the states induced by distributed indistinguishability of ``c``.

    Blocks are listed in order of their first state.
    """
    c = frozenset(c)
    unknown = c - set(game.agents)
    if unknown:
        raise UndeclaredNameError(f"unknown agent(s) {_set_text(unknown)}")
    if isinstance(game, ValidatedGame):
        return list(game.partition(c))
    block_of = _block_maps(game.indist)
    members = [a for a in game.agents if a in c]
    return _group(game.states, lambda s: tuple(block_of[a][s] for a in members))


def close_mechanism(desc: GameDescription) -> frozenset:
    """Explicit tuples plus a self-loop for every (state, coalition, op) key without one."""
    explicit = frozenset(desc.mechanism)
    if not desc.implicit_self_loops:
        return explicit
    keyed = {(t.source, t.coalition, t.op) for t in explicit}
    loops = {MechanismTuple(w, c, op, w)
             for w in desc.states for c in subsets(desc.agents) for op in desc.operations
             if (w, c, op) not in keyed}
    return explicit | loops


def _check_structure(desc: GameDescription) -> None:
    for label, names in (("agent", desc.agents), ("state", desc.states),
                         ("operation", desc.operations)):
        for name in names:
            if not isinstance(name, str) or not name:
                raise GameFormatError(f"{label} names must be nonempty strings, got {name!r}")
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise GameFormatError(f"duplicate {label} name(s) {sorted(dupes)}")
    for a in desc.agents:
        if not is_identifier(a):
            raise GameFormatError(f"invalid agent name {a!r}")
    if len(desc.agents) > MAX_AGENTS:
        raise AgentLimitError(f"{len(desc.agents)} agents exceed the limit of {MAX_AGENTS}")
    if len(desc.agents) > WARN_AGENTS:
        warnings.warn(f"{len(desc.agents)} agents: validation enumerates "
                      f"{2 ** len(desc.agents)} coalitions", stacklevel=3)
    if not desc.states:
        raise GameFormatError("a game needs at least one state")
    if not desc.operations:
        raise GameFormatError("the set of operations must be nonempty")

    states = set(desc.states)
    agents = set(desc.agents)
    for a in desc.indist:
        if a not in agents:
            raise UndeclaredNameError(f"partition given for undeclared agent {a!r}")
    for a in desc.agents:
        if a not in desc.indist:
            raise PartitionError(f"agent {a!r} has no partition")
        seen: set[str] = set()
        for block in desc.indist[a]:
            if not block:
                raise PartitionError(f"agent {a!r} has an empty block")
            for s in block:
                if s not in states:
                    raise UndeclaredNameError(f"partition of {a!r} mentions undeclared state {s!r}")
                if s in seen:
                    raise PartitionError(f"state {s!r} appears twice in the partition of {a!r}")
                seen.add(s)
        missing = [s for s in desc.states if s not in seen]
        if missing:
            raise PartitionError(f"partition of {a!r} misses state(s) {missing}")

    ops = set(desc.operations)
    for t in desc.mechanism:
        for s in (t.source, t.target):
            if s not in states:
                raise UndeclaredNameError(f"{t} mentions undeclared state {s!r}")
        if t.op not in ops:
            raise UndeclaredNameError(f"{t} mentions undeclared operation {t.op!r}")
        extra = t.coalition - agents
        if extra:
            raise UndeclaredNameError(f"{t} mentions undeclared agent(s) {_set_text(extra)}")

    for p, ss in desc.valuation.items():
        if not is_identifier(p) or p in ("K", "H") or p == RESERVED_VAR:
            raise GameFormatError(f"invalid propositional variable {p!r}")
        for s in ss:
            if s not in states:
                raise UndeclaredNameError(f"valuation of {p!r} mentions undeclared state {s!r}")


def _tuple_order(desc: GameDescription):
    si = {s: i for i, s in enumerate(desc.states)}
    oi = {o: i for i, o in enumerate(desc.operations)}
    return lambda t: (si[t.source], len(t.coalition), sorted(t.coalition), oi[t.op], si[t.target])


def validate_game(desc: GameDescription) -> "ValidatedGame":
    """Check a description against the definition of a clandestine game.

    Raises the first problem found: structural errors, then concealment over
    the closed mechanism (explicit tuples first), then nontermination.
    """
    _check_structure(desc)
    closed = close_mechanism(desc)
    block_of = _block_maps(desc.indist)
    order = _tuple_order(desc)
    explicit = set(desc.mechanism)
    for t in sorted(closed, key=lambda t: (t not in explicit, order(t))):
        agent = concealment_witness(block_of, desc.agents, t.coalition, t.source, t.target)
        if agent is not None:
            raise ConcealmentError(t, frozenset(desc.agents) - t.coalition, agent)
    keyed = {(t.source, t.coalition, t.op) for t in closed}
    for w in desc.states:
        for c in subsets(desc.agents):
            for op in desc.operations:
                if (w, c, op) not in keyed:
                    raise NonterminationError(w, c, op)
    return ValidatedGame(desc, closed)


class ValidatedGame:
    """A game that passed :func:`validate_game`; treat as immutable.

    Besides the description fields it exposes ``closed_mechanism`` and a
    bitmask view (state ``i`` is bit ``i``) used by the fast checker.
    """

    def __init__(self, desc: GameDescription, closed: frozenset):
        self.description = desc
        self.agents: tuple = desc.agents
        self.states: tuple = desc.states
        self.operations: tuple = desc.operations
        self.indist = desc.indist
        self.mechanism: tuple = desc.mechanism
        self.implicit_self_loops: bool = desc.implicit_self_loops
        self.valuation = desc.valuation
        self.closed_mechanism: frozenset = closed

        self.state_index = {s: i for i, s in enumerate(self.states)}
        self.agent_index = {a: i for i, a in enumerate(self.agents)}
        self.all_mask = (1 << len(self.states)) - 1
        block_of = _block_maps(self.indist)
        # labels[a][i]: block id of state i in agent a's partition
        self.labels = [[block_of[a][s] for s in self.states] for a in self.agents]
        succ: dict[tuple[int, int, int], int] = {}
        op_index = {o: i for i, o in enumerate(self.operations)}
        for t in closed:
            key = (self.state_index[t.source], self.coalition_mask(t.coalition), op_index[t.op])
            succ[key] = succ.get(key, 0) | (1 << self.state_index[t.target])
        self.successors = succ
        self._blocks: dict[int, tuple[list[int], list[int]]] = {}

    def coalition_mask(self, c: Iterable[str]) -> int:
        m = 0
        for a in c:
            m |= 1 << self.agent_index[a]
        return m

    def blocks(self, cmask: int) -> tuple[list[int], list[int]]:
        """``(block id per state, block masks)`` for the coalition with mask ``cmask``."""
        cached = self._blocks.get(cmask)
        if cached is not None:
            return cached
        members = [i for i in range(len(self.agents)) if cmask >> i & 1]
        ids: dict[tuple, int] = {}
        block_id: list[int] = []
        masks: list[int] = []
        for s in range(len(self.states)):
            key = tuple(self.labels[a][s] for a in members)
            if key not in ids:
                ids[key] = len(masks)
                masks.append(0)
            block_id.append(ids[key])
            masks[ids[key]] |= 1 << s
        self._blocks[cmask] = (block_id, masks)
        return block_id, masks

    def partition(self, c: Iterable[str]) -> list[frozenset]:
        _, masks = self.blocks(self.coalition_mask(c))
        return [self.states_of(m) for m in masks]

    def states_of(self, mask: int) -> frozenset:
        return frozenset(s for i, s in enumerate(self.states) if mask >> i & 1)

    def to_dict(self) -> dict:
        return game_to_dict(self.description)

    def __eq__(self, other) -> bool:
        return (isinstance(other, ValidatedGame)
                and self.description == other.description
                and self.closed_mechanism == other.closed_mechanism)

    __hash__ = None

    def __repr__(self) -> str:
        return (f"ValidatedGame(states={len(self.states)}, agents={list(self.agents)}, "
                f"operations={list(self.operations)}, tuples={len(self.closed_mechanism)})")


# -- random generation -----------------------------------------------------

@dataclass(frozen=True)
class GameParams:
    n_states: int
    n_agents: int
    n_ops: int
    partition_coarseness: float = 0.5
    extra_edge_prob: float = 0.3
    agent_names: Optional[tuple] = None
    variables: tuple = DEFAULT_VARIABLES

    def check(self) -> None:
        if self.n_states < 1 or self.n_agents < 1 or self.n_ops < 1:
            raise GameParamsError("n_states, n_agents and n_ops must be at least 1")
        if self.n_agents > MAX_AGENTS:
            raise GameParamsError(f"n_agents must be at most {MAX_AGENTS}")
        for name in ("partition_coarseness", "extra_edge_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise GameParamsError(f"{name} must lie in [0, 1], got {v}")
        if self.agent_names is not None:
            if len(self.agent_names) != self.n_agents or len(set(self.agent_names)) != self.n_agents:
                raise GameParamsError("agent_names must list n_agents distinct names")


def _agent_names(n: int) -> tuple:
    letters = "abcdefghijklmnopqrstuvwxyz"
    return tuple(letters[i] if i < 26 else f"a{i}" for i in range(n))


def random_game(params: GameParams, seed: int) -> ValidatedGame:
    """Draw a valid clandestine game, deterministically from ``(params, seed)``.

    Each agent's partition comes from merging states one at a time into an
    earlier block with probability ``partition_coarseness``.  Every candidate
    tuple that passes the concealment test is kept with probability
    ``extra_edge_prob``; missing keys are closed with self-loops.
    """
    params.check()
    agents = tuple(params.agent_names) if params.agent_names else _agent_names(params.n_agents)
    states = tuple(f"s{i}" for i in range(params.n_states))
    ops = tuple(f"o{i}" for i in range(params.n_ops))

    indist = {}
    for a in agents:
        rng = Stream(seed, "partition", a)
        blocks: list[list[str]] = []
        for s in states:
            if blocks and rng.chance(params.partition_coarseness):
                rng.choice(blocks).append(s)
            else:
                blocks.append([s])
        indist[a] = blocks

    block_of = _block_maps(indist)
    rng = Stream(seed, "mechanism")
    mechanism = []
    for w in states:
        for c in subsets(agents):
            for op in ops:
                for u in states:
                    if (concealment_witness(block_of, agents, c, w, u) is None
                            and rng.chance(params.extra_edge_prob)):
                        mechanism.append(MechanismTuple(w, c, op, u))

    valuation = {}
    for p in params.variables:
        rng = Stream(seed, "valuation", p)
        valuation[p] = frozenset(rng.subset(states))

    desc = GameDescription(agents, states, indist, ops, tuple(mechanism), True, valuation)
    return validate_game(desc)


# -- JSON ------------------------------------------------------------------

GAME_KEYS = ("agents", "states", "indist", "operations", "mechanism",
             "implicit_self_loops", "valuation")


def _str_list(value, what: str) -> list:
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        raise GameFormatError(f"{what} must be an array of strings")
    return value


def game_from_dict(doc: Mapping) -> GameDescription:
    if not isinstance(doc, Mapping):
        raise GameFormatError("game document must be a JSON object")
    keys = set(doc)
    unknown = keys - set(GAME_KEYS)
    if unknown:
        raise GameFormatError(f"unknown key(s) {sorted(unknown)}")
    missing = [k for k in GAME_KEYS if k not in keys]
    if missing:
        raise GameFormatError(f"missing key(s) {missing}")

    indist = doc["indist"]
    if not isinstance(indist, Mapping):
        raise GameFormatError("indist must be an object")
    for a, blocks in indist.items():
        if not isinstance(blocks, list):
            raise GameFormatError(f"partition of {a!r} must be an array of arrays")
        for block in blocks:
            _str_list(block, f"blocks of {a!r}")
    mechanism = []
    if not isinstance(doc["mechanism"], list):
        raise GameFormatError("mechanism must be an array")
    for entry in doc["mechanism"]:
        if not isinstance(entry, Mapping) or set(entry) != {"from", "coalition", "op", "to"}:
            raise GameFormatError(
                f"mechanism entries need exactly keys from, coalition, op, to: {entry!r}")
        for k in ("from", "op", "to"):
            if not isinstance(entry[k], str):
                raise GameFormatError(f"mechanism field {k!r} must be a string")
        coal = _str_list(entry["coalition"], "mechanism coalition")
        mechanism.append(MechanismTuple(entry["from"], frozenset(coal), entry["op"], entry["to"]))
    if not isinstance(doc["implicit_self_loops"], bool):
        raise GameFormatError("implicit_self_loops must be a boolean")
    valuation = doc["valuation"]
    if not isinstance(valuation, Mapping):
        raise GameFormatError("valuation must be an object")
    for p, ss in valuation.items():
        _str_list(ss, f"valuation of {p!r}")

    return GameDescription(
        agents=tuple(_str_list(doc["agents"], "agents")),
        states=tuple(_str_list(doc["states"], "states")),
        indist={a: blocks for a, blocks in indist.items()},
        operations=tuple(_str_list(doc["operations"], "operations")),
        mechanism=tuple(mechanism),
        implicit_self_loops=doc["implicit_self_loops"],
        valuation={p: frozenset(ss) for p, ss in valuation.items()},
    )


def game_to_dict(game: Union[GameDescription, ValidatedGame]) -> dict:
    desc = game.description if isinstance(game, ValidatedGame) else game
    si = {s: i for i, s in enumerate(desc.states)}
    return {
        "agents": list(desc.agents),
        "states": list(desc.states),
        "indist": {a: [list(b) for b in desc.indist[a]] for a in desc.agents},
        "operations": list(desc.operations),
        "mechanism": [
            {"from": t.source, "coalition": sorted(t.coalition), "op": t.op, "to": t.target}
            for t in desc.mechanism],
        "implicit_self_loops": desc.implicit_self_loops,
        "valuation": {p: sorted(ss, key=si.__getitem__) for p, ss in sorted(desc.valuation.items())},
    }


def load_game(path: Union[str, Path]) -> ValidatedGame:
    """Read, parse and validate a game file."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise GameFormatError(f"{path}: invalid JSON: {exc}") from exc
    return validate_game(game_from_dict(doc))


def dump_game(game: Union[GameDescription, ValidatedGame]) -> str:
    return json.dumps(game_to_dict(game), indent=2)
