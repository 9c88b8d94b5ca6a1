"""Deterministic random primitives.

Corpus sampling uses SplitMix64, a named 64-bit generator small enough to
re-implement in any language, so splits stay portable across implementations:

    state <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z <- state
    z <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2^64
    z <- (z XOR (z >> 27)) * 0x94D049BB133111EB mod 2^64
    output <- z XOR (z >> 31)

Numeric noise (factor initialization, text degradation) instead goes through
numpy's Philox counter-based generator, keyed explicitly so per-document
streams are independent of processing order.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 stream; deterministic and platform-independent."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n) by modulo reduction (bias < 2^-50 for n < 2^14)."""
        return self.next_u64() % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates using next_below, from the last index down."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]


def philox(seed: int, *names: str) -> np.random.Generator:
    """Generator keyed by an integer seed plus arbitrary string labels.

    The key is a 128-bit BLAKE2b digest of "seed|name|name...", so distinct
    labels give independent streams for the same seed.
    """
    tag = "|".join([str(seed), *names]).encode("utf-8")
    key = int.from_bytes(hashlib.blake2b(tag, digest_size=16).digest(), "big")
    return np.random.Generator(np.random.Philox(key=key))
