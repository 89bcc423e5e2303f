"""Deliberately broken semantics, used to show the fuzz harness has teeth.

Each entry of :data:`MUTATIONS` is a context manager that swaps one clause of
the checker (or the concealment test of game validation) and restores it on
exit.  Under every mutation the default fuzz budget reports violations.
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Callable, ContextManager, Iterator

from . import game as _game
from .checker import ModelChecker

__all__ = ["MUTATIONS", "mutation"]


_acting_coalitions = ModelChecker.acting_coalitions
_can_mask = ModelChecker.can_mask


def _existential_know(self, cmask, body):
    _, masks = self.game.blocks(cmask)
    out = 0
    for b in masks:
        if b & body:
            out |= b
    return out


def _with_empty_actor(self, cmask):
    return _acting_coalitions(self, cmask) + [0]


def _outcome_only(self, cmask, body):
    return body


def _empty_can_true(self, cmask, body):
    if cmask == 0:
        return self.game.all_mask
    return _can_mask(self, cmask, body)


def _no_concealment(*args):
    return None


_PATCHES: dict[str, tuple[object, str, Callable]] = {
    "existential-know": (ModelChecker, "know_mask", _existential_know),
    "empty-actor": (ModelChecker, "acting_coalitions", _with_empty_actor),
    "no-concealment": (_game, "concealment_witness", _no_concealment),
    "no-outcome-closure": (ModelChecker, "outcome_mask", _outcome_only),
    "empty-can-true": (ModelChecker, "can_mask", _empty_can_true),
}

DESCRIPTIONS = {
    "existential-know": "K{C} holds when the body holds somewhere in the C-block",
    "empty-actor": "H{C} may be witnessed by the empty sub-coalition",
    "no-concealment": "validation and generation skip the concealment test",
    "no-outcome-closure": "H{C} checks the body at outcomes u only, not at every u' ~C u",
    "empty-can-true": "H{} holds everywhere",
}


@contextmanager
def mutation(name: str) -> Iterator[None]:
    """Apply mutation ``name`` for the duration of the ``with`` block."""
    if name not in _PATCHES:
        raise KeyError(f"unknown mutation {name!r}; choose from {sorted(_PATCHES)}")
    owner, attr, replacement = _PATCHES[name]
    original = getattr(owner, attr)
    setattr(owner, attr, replacement)
    try:
        yield
    finally:
        setattr(owner, attr, original)


MUTATIONS: dict[str, Callable[[], ContextManager[None]]] = {
    name: (lambda name=name: mutation(name)) for name in _PATCHES}
