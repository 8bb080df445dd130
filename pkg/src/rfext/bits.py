"""Fixed-length bit strings stored as Python ints.

Position 1 is the most significant (leftmost) bit, so ``substr(x, n, i, j)``
is the 1-indexed inclusive slice ``x_i x_{i+1} ... x_j`` of an ``n``-bit
string.  All packing is MSB-first with zero padding at the end.
"""

from __future__ import annotations

import binascii


def mask(length: int) -> int:
    return (1 << length) - 1


def check_length(value: int, length: int, what: str = "bit string") -> None:
    if length < 0 or value < 0 or value >> length:
        raise ValueError(f"{what} does not fit in {length} bits")


def substr(value: int, length: int, i: int, j: int) -> int:
    """Return bits ``i..j`` (1-indexed, inclusive) of an ``length``-bit string."""
    if j < i:
        return 0
    if i < 1 or j > length:
        raise IndexError(f"[{i}, {j}] outside a {length}-bit string")
    return (value >> (length - j)) & mask(j - i + 1)


def concat(*parts: tuple[int, int]) -> int:
    """Concatenate ``(value, length)`` pairs left to right."""
    out = 0
    for value, length in parts:
        check_length(value, length)
        out = (out << length) | value
    return out


def weight(value: int) -> int:
    return value.bit_count()


def parity(value: int) -> int:
    return value.bit_count() & 1


def bit_at(value: int, length: int, pos: int) -> int:
    return (value >> (length - pos)) & 1


def to_bitstring(value: int, length: int) -> str:
    check_length(value, length)
    return format(value, f"0{length}b") if length else ""


def from_bitstring(text: str) -> tuple[int, int]:
    cleaned = "".join(text.split())
    if cleaned and set(cleaned) - {"0", "1"}:
        raise ValueError("bit string may contain only 0 and 1")
    return (int(cleaned, 2) if cleaned else 0), len(cleaned)


def pack(value: int, length: int) -> bytes:
    """Pack MSB-first, zero-padding the last byte on the right."""
    check_length(value, length)
    nbytes = (length + 7) // 8
    pad = nbytes * 8 - length
    return (value << pad).to_bytes(nbytes, "big")


def unpack(data: bytes, length: int) -> int:
    nbytes = (length + 7) // 8
    if len(data) < nbytes:
        raise ValueError(f"need {nbytes} bytes for {length} bits, got {len(data)}")
    raw = int.from_bytes(data[:nbytes], "big")
    return raw >> (nbytes * 8 - length)


def to_hex(value: int, length: int) -> str:
    """Big-endian hex, ceil(length/4) digits, value right-aligned."""
    check_length(value, length)
    digits = (length + 3) // 4
    return format(value, f"0{digits}x") if digits else ""


def from_hex(text: str, length: int) -> int:
    text = text.strip().lower()
    if text.startswith("0x"):
        text = text[2:]
    try:
        binascii.unhexlify(text if len(text) % 2 == 0 else "0" + text)
    except binascii.Error as exc:
        raise ValueError(f"not a hex string: {text!r}") from exc
    value = int(text, 16) if text else 0
    check_length(value, length)
    return value
