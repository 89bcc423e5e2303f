"""Seeded random streams shared by the generators.

Every stream is a Mersenne Twister (``random.Random``) seeded from a BLAKE2b
digest of the user seed plus a component label, so separate components never
share draws.  Only ``Random.random()`` is consumed: it is the one method whose
output Python promises to keep stable across releases, which keeps fuzz
reports reproducible bit-for-bit.
"""

from __future__ import annotations

import hashlib
import random
from typing import Sequence, TypeVar

T = TypeVar("T")

SEED_MASK = (1 << 64) - 1


def derive_seed(seed: int, *labels: object) -> int:
    payload = repr((seed & SEED_MASK,) + labels).encode()
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "big")


class Stream:
    def __init__(self, seed: int, *labels: object):
        self._r = random.Random(derive_seed(seed, *labels))

    def random(self) -> float:
        return self._r.random()

    def below(self, n: int) -> int:
        return min(int(self._r.random() * n), n - 1)

    def between(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]``."""
        return lo + self.below(hi - lo + 1)

    def chance(self, p: float) -> bool:
        return self._r.random() < p

    def choice(self, items: Sequence[T]) -> T:
        return items[self.below(len(items))]

    def subset(self, items: Sequence[T], p: float = 0.5) -> list[T]:
        return [x for x in items if self._r.random() < p]
