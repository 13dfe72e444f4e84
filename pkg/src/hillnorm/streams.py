"""Counter-based, splittable random streams.

A :class:`RandomStream` is a value: a master seed plus a key path.  Children
are derived by appending tags to the key, so the numbers a consumer sees
depend only on *where* it sits in the key tree, never on call order or on
how work is scheduled across threads.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


def _tag_to_int(tag: int | str | float) -> int:
    if isinstance(tag, bool):
        raise TypeError("boolean tags are ambiguous")
    if isinstance(tag, int):
        if tag < 0:
            raise ValueError(f"integer tags must be non-negative, got {tag}")
        return tag
    if isinstance(tag, float):
        tag = repr(tag)
    return zlib.crc32(tag.encode("utf-8"))


@dataclass(frozen=True)
class RandomStream:
    """Keyed Philox stream.

    Parameters
    ----------
    seed : int
        Master seed (reduced modulo 2**64).
    key : tuple of int
        Spawn key; extended by :meth:`child`.
    """

    seed: int
    key: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "seed", int(self.seed) & _MASK64)

    def child(self, *tags: int | str | float) -> RandomStream:
        return RandomStream(self.seed, self.key + tuple(_tag_to_int(t) for t in tags))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.key)
        return np.random.Generator(np.random.Philox(seq))

    def uniforms(self, count: int) -> np.ndarray:
        """Uniforms on the open interval (0, 1), 53-bit resolution."""
        bits = self.generator().integers(0, 1 << 53, size=count, dtype=np.int64)
        return (bits + 0.5) * 2.0**-53

    def derive_seed(self) -> int:
        """A 64-bit seed for a fresh, independent stream tree."""
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.key)
        lo, hi = seq.generate_state(2, dtype=np.uint32)
        return int(lo) | (int(hi) << 32)
