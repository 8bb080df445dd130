"""Deterministic randomness for experiments and ``--seed`` runs.

Trial ``j`` under seed ``s`` reads SHAKE-256("rfext" || s || j), with s and j
as 8-byte big-endian integers.  Every trial is independent of how the others
are scheduled, so results never depend on ordering or parallelism.
"""

from __future__ import annotations

import hashlib
import secrets

_DOMAIN = b"rfext"


def seeded_bits(seed: int, index: int, nbits: int) -> int:
    if nbits <= 0:
        return 0
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be nonnegative")
    xof = hashlib.shake_256(_DOMAIN + seed.to_bytes(8, "big") + index.to_bytes(8, "big"))
    nbytes = (nbits + 7) // 8
    return int.from_bytes(xof.digest(nbytes), "big") >> (8 * nbytes - nbits)


class BitSource:
    """Hands out fixed-width chunks of one random integer, high bits first."""

    def __init__(self, value: int, nbits: int):
        self._value = value
        self._left = nbits

    @classmethod
    def seeded(cls, seed: int, index: int, nbits: int) -> "BitSource":
        return cls(seeded_bits(seed, index, nbits), nbits)

    @classmethod
    def fresh(cls, nbits: int) -> "BitSource":
        return cls(secrets.randbits(nbits) if nbits > 0 else 0, nbits)

    def take(self, width: int) -> int:
        if width > self._left:
            raise ValueError("bit source exhausted")
        self._left -= width
        return (self._value >> self._left) & ((1 << width) - 1)
