"""
Seed Streams
============

One master seed, many independent numpy Generators. Each stream is addressed
by a key path such as ("u", "element", 2) and derived through a SeedSequence
spawn key, so adding elements or modes never shifts the draws of the others.
"""

import zlib
from typing import Tuple, Union

import numpy as np

KeyPart = Union[int, str]


def _key_word(part: KeyPart) -> int:
    if isinstance(part, (int, np.integer)) and not isinstance(part, bool):
        if part < 0:
            raise ValueError(f"stream key parts must be non-negative, got {part}")
        return int(part)
    return zlib.crc32(str(part).encode("utf-8"))


class StreamFactory:
    """Keyed source of reproducible random streams"""

    def __init__(self, seed: int, prefix: Tuple[KeyPart, ...] = ()):
        if int(seed) < 0:
            raise ValueError(f"seed must be non-negative, got {seed}")
        self._seed = int(seed)
        self._prefix = tuple(prefix)

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def prefix(self) -> Tuple[KeyPart, ...]:
        return self._prefix

    def child(self, *key: KeyPart) -> "StreamFactory":
        """Factory whose streams all live under an extended key path."""
        return StreamFactory(self._seed, self._prefix + key)

    def generator(self, *key: KeyPart) -> np.random.Generator:
        spawn_key = tuple(_key_word(k) for k in self._prefix + key)
        sequence = np.random.SeedSequence(entropy=self._seed, spawn_key=spawn_key)
        return np.random.default_rng(sequence)

    def __repr__(self) -> str:
        return f"StreamFactory(seed={self._seed}, prefix={self._prefix!r})"
