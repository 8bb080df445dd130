"""Arithmetic in GF(2^k) with elements stored as k-bit strings.

Addition is exclusive-or in every supported basis.  Two bases are supported:

* ``standard``: bit 1 (most significant) is the coefficient of x^(k-1), the
  last bit is the constant coefficient.
* ``parity-split`` (even k only): the odd powers come first, then the even
  ones, i.e. (x^(k-1), x^(k-3), ..., x, x^(k-2), x^(k-4), ..., 1).  In this
  basis the top half of z equals the bottom half of z/x whenever the
  constant coefficient of z is 0.

Multiplication in the parity-split basis converts to the standard basis,
multiplies there and converts back.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import bits as _bits

__all__ = [
    "Basis",
    "FieldSpec",
    "FieldElement",
    "FieldMismatchError",
    "add",
    "mul",
    "inv",
    "div",
    "div_by_x",
    "change_basis",
    "eval_poly",
    "default_modulus",
    "is_irreducible",
]


class Basis(str, enum.Enum):
    STANDARD = "standard"
    PARITY_SPLIT = "parity-split"

    @property
    def tag(self) -> str:
        return "std" if self is Basis.STANDARD else "split"

    @classmethod
    def parse(cls, text: "str | Basis") -> "Basis":
        if isinstance(text, Basis):
            return text
        aliases = {"std": cls.STANDARD, "split": cls.PARITY_SPLIT}
        return aliases.get(text) or cls(text)


class FieldMismatchError(ValueError):
    """Operands belong to different fields or bases."""


# --- polynomials over GF(2), packed in ints (bit e = coefficient of x^e) ---


def clmul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_mod(a: int, m: int) -> int:
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def poly_divmod(a: int, m: int) -> tuple[int, int]:
    q = 0
    dm = m.bit_length()
    while a.bit_length() >= dm:
        shift = a.bit_length() - dm
        q |= 1 << shift
        a ^= m << shift
    return q, a


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def _mulmod(a: int, b: int, m: int) -> int:
    return poly_mod(clmul(a, b), m)


def _prime_factors(k: int) -> list[int]:
    out, p = [], 2
    while p * p <= k:
        if k % p == 0:
            out.append(p)
            while k % p == 0:
                k //= p
        p += 1
    if k > 1:
        out.append(k)
    return out


_SPREAD = [sum(((b >> j) & 1) << (2 * j) for j in range(8)) for b in range(256)]


def poly_square(a: int) -> int:
    out, shift = 0, 0
    while a:
        out |= _SPREAD[a & 0xFF] << shift
        a >>= 8
        shift += 16
    return out


def _reduce_sparse(a: int, modulus: int) -> int:
    """a mod modulus, fast when modulus - x^k has low degree."""
    k = modulus.bit_length() - 1
    tail = modulus ^ (1 << k)
    low = (1 << k) - 1
    while a >> k:
        a = (a & low) ^ clmul(a >> k, tail)
    return a


def is_irreducible(modulus: int) -> bool:
    """Irreducibility over GF(2): trial division up to degree 16, Rabin's test above."""
    k = modulus.bit_length() - 1
    if k < 1:
        return False
    if k == 1:
        return True
    if not modulus & 1:
        return False
    if k <= 16:
        for d in range(1, k // 2 + 1):
            for cand in range(1 << d, 1 << (d + 1)):
                if poly_mod(modulus, cand) == 0:
                    return False
        return True

    # cheap rejection: any irreducible factor of degree d divides x^(2^d) + x
    for d in range(1, min(6, k // 2) + 1):
        if poly_gcd(modulus, (1 << (1 << d)) | 0b10) != 1:
            return False
    # x^(2^j) mod f for every j <= k, by repeated squaring
    frob = [0b10]
    for _ in range(k):
        frob.append(_reduce_sparse(poly_square(frob[-1]), modulus))
    if frob[k] != 0b10:
        return False
    return all(poly_gcd(modulus, frob[k // q] ^ 0b10) == 1 for q in _prime_factors(k))


_MODULUS_TABLE = {
    1: 0b11,
    4: 0x13,  # x^4 + x + 1
    8: 0x11B,  # x^8 + x^4 + x^3 + x + 1
    16: 0x1002B,  # x^16 + x^5 + x^3 + x + 1
    32: (1 << 32) | 0x8D,  # x^32 + x^7 + x^3 + x^2 + 1
    64: (1 << 64) | 0x1B,  # x^64 + x^4 + x^3 + x + 1
    128: (1 << 128) | 0x87,  # x^128 + x^7 + x^2 + x + 1
}


@functools.lru_cache(maxsize=None)
def default_modulus(degree: int) -> int:
    """Pinned low-weight irreducible polynomial of the given degree.

    Degrees outside the fixed table get the first irreducible trinomial
    x^k + x^j + 1 (smallest j), else the first pentanomial in increasing
    order of its integer encoding.
    """
    if degree < 1:
        raise ValueError("field degree must be positive")
    if degree in _MODULUS_TABLE:
        return _MODULUS_TABLE[degree]
    top = 1 << degree
    # x^k + x^j + 1 and its reciprocal x^k + x^(k-j) + 1 are irreducible together
    for j in range(1, degree // 2 + 1):
        cand = top | (1 << j) | 1
        if is_irreducible(cand):
            return cand
    for a in range(3, degree):
        for b in range(2, a):
            for c in range(1, b):
                cand = top | (1 << a) | (1 << b) | (1 << c) | 1
                if is_irreducible(cand):
                    return cand
    raise ValueError(f"no low-weight irreducible polynomial of degree {degree}")


@functools.lru_cache(maxsize=None)
def _log_tables(degree: int, modulus: int) -> tuple[list[int], list[int]]:
    order = (1 << degree) - 1
    for g in range(2, 1 << degree):
        exp = [0] * (2 * order)
        x = 1
        for e in range(order):
            exp[e] = x
            x = _mulmod(x, g, modulus)
            if x == 1 and e < order - 1:
                break
        else:
            log = [0] * (1 << degree)
            for e in range(order):
                log[exp[e]] = e
                exp[e + order] = exp[e]
            return exp, log
    # degree 1: the only nonzero element is 1
    return [1, 1], [0, 0]


@functools.lru_cache(maxsize=None)
def _split_tables(degree: int) -> tuple[tuple[list[int], ...], tuple[list[int], ...]]:
    """Byte-chunked permutation tables (standard -> split, split -> standard)."""
    # split position p (1-indexed) holds the coefficient of this power of x
    half = degree // 2
    powers = [degree + 1 - 2 * p for p in range(1, half + 1)]
    powers += [2 * degree - 2 * p for p in range(half + 1, degree + 1)]
    split_bit_of_power = {e: degree - p for p, e in enumerate(powers, start=1)}

    def chunk_tables(src_to_dst: dict[int, int]) -> tuple[list[int], ...]:
        tables = []
        for c in range(0, degree, 8):
            table = [0] * 256
            for byte in range(256):
                out = 0
                for j in range(8):
                    if byte >> j & 1 and c + j < degree:
                        out |= 1 << src_to_dst[c + j]
                table[byte] = out
            tables.append(table)
        return tuple(tables)

    to_split = chunk_tables(split_bit_of_power)
    to_std = chunk_tables({v: k for k, v in split_bit_of_power.items()})
    return to_split, to_std


def _permute(value: int, tables: Sequence[list[int]]) -> int:
    out = 0
    for table in tables:
        out |= table[value & 0xFF]
        value >>= 8
    return out


@dataclass(frozen=True)
class FieldSpec:
    """GF(2^degree) modulo ``modulus`` with elements written in ``basis``."""

    degree: int
    modulus: int
    basis: Basis = Basis.STANDARD

    def __post_init__(self) -> None:
        object.__setattr__(self, "basis", Basis.parse(self.basis))
        if self.degree < 1:
            raise ValueError("field degree must be positive")
        if self.modulus.bit_length() != self.degree + 1:
            raise ValueError(f"modulus {self.modulus:#x} is not of degree {self.degree}")
        if self.basis is Basis.PARITY_SPLIT and self.degree % 2:
            raise ValueError("parity-split basis needs an even degree")
        if self.modulus != _MODULUS_TABLE.get(self.degree) and not _irreducible_cached(self.modulus):
            raise ValueError(f"modulus {self.modulus:#x} is reducible")

    @classmethod
    def of_degree(cls, degree: int, basis: "Basis | str" = Basis.STANDARD) -> "FieldSpec":
        return cls(degree, default_modulus(degree), Basis.parse(basis))

    def with_basis(self, basis: "Basis | str") -> "FieldSpec":
        return FieldSpec(self.degree, self.modulus, Basis.parse(basis))

    @property
    def order(self) -> int:
        return 1 << self.degree

    @property
    def key(self) -> tuple[int, str, str]:
        return (self.degree, format(self.modulus, "x"), self.basis.tag)

    # raw-bit conversions

    def to_standard(self, value: int) -> int:
        if self.basis is Basis.STANDARD:
            return value
        return _permute(value, _split_tables(self.degree)[1])

    def from_standard(self, value: int) -> int:
        if self.basis is Basis.STANDARD:
            return value
        return _permute(value, _split_tables(self.degree)[0])

    # raw-bit arithmetic (values in this spec's basis)

    def mul_raw(self, a: int, b: int) -> int:
        if self.basis is Basis.STANDARD:
            return self._mul_std(a, b)
        return self.from_standard(self._mul_std(self.to_standard(a), self.to_standard(b)))

    def inv_raw(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(2^k)")
        return self.from_standard(self._inv_std(self.to_standard(a)))

    def _mul_std(self, a: int, b: int) -> int:
        if not a or not b:
            return 0
        if self.degree <= 16:
            exp, log = _log_tables(self.degree, self.modulus)
            return exp[log[a] + log[b]]
        return _reduce_sparse(clmul(a, b), self.modulus)

    def _inv_std(self, a: int) -> int:
        if self.degree <= 16:
            exp, log = _log_tables(self.degree, self.modulus)
            order = self.order - 1
            return exp[(order - log[a]) % order]
        # extended Euclid on polynomials
        r0, r1, s0, s1 = self.modulus, a, 0, 1
        while r1:
            q, r = poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 ^ clmul(q, s1)
        return poly_mod(s0, self.modulus)

    # element constructors

    def element(self, value: int) -> "FieldElement":
        return FieldElement(value, self)

    def from_standard_poly(self, poly: int) -> "FieldElement":
        return FieldElement(self.from_standard(poly_mod(poly, self.modulus)), self)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    @property
    def one(self) -> "FieldElement":
        return self.from_standard_poly(1)

    @property
    def x(self) -> "FieldElement":
        """The element represented by the monomial x."""
        return self.from_standard_poly(0b10)

    def elements(self) -> Iterable["FieldElement"]:
        return (FieldElement(v, self) for v in range(self.order))

    def from_hex(self, text: str) -> "FieldElement":
        return FieldElement(_bits.from_hex(text, self.degree), self)

    def mul_table(self):
        """Full multiplication table as a numpy array (degree <= 12)."""
        if self.degree > 12:
            raise ValueError("multiplication table only for degree <= 12")
        return _mul_table(self)


@functools.lru_cache(maxsize=8)
def _mul_table(spec: FieldSpec):
    import numpy as np

    exp, log = _log_tables(spec.degree, spec.modulus)
    exp_a = np.array(exp, dtype=np.uint16)
    log_a = np.array(log, dtype=np.int64)
    idx = np.arange(spec.order)
    if spec.basis is Basis.STANDARD:
        to_std = from_std = idx
    else:
        to_std = np.array([spec.to_standard(v) for v in idx.tolist()], dtype=np.int64)
        from_std = np.array([spec.from_standard(v) for v in idx.tolist()], dtype=np.uint16)
    std = to_std
    table = exp_a[log_a[std][:, None] + log_a[std][None, :]]
    table[(std == 0)[:, None] | (std == 0)[None, :]] = 0
    table = np.asarray(from_std)[table].astype(np.uint16)
    table.setflags(write=False)
    return table


@functools.lru_cache(maxsize=None)
def _irreducible_cached(modulus: int) -> bool:
    return is_irreducible(modulus)


@dataclass(frozen=True, slots=True)
class FieldElement:
    bits: int
    spec: FieldSpec

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits >> self.spec.degree:
            raise ValueError(f"{self.bits:#x} is not a {self.spec.degree}-bit element")

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"expected FieldElement, got {type(other).__name__}")
        if other.spec != self.spec:
            raise FieldMismatchError(f"{self.spec.key} vs {other.spec.key}")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.bits ^ other.bits, self.spec)

    __sub__ = __add__

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.spec.mul_raw(self.bits, other.bits), self.spec)

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.spec.mul_raw(self.bits, self.spec.inv_raw(other.bits)), self.spec)

    def __pow__(self, e: int) -> "FieldElement":
        if e < 0:
            return self.inverse() ** -e
        result, base = self.spec.one, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __bool__(self) -> bool:
        return self.bits != 0

    def inverse(self) -> "FieldElement":
        return FieldElement(self.spec.inv_raw(self.bits), self.spec)

    def bitstring(self) -> str:
        return _bits.to_bitstring(self.bits, self.spec.degree)

    def hex(self) -> str:
        return _bits.to_hex(self.bits, self.spec.degree)

    def __repr__(self) -> str:
        return f"FieldElement(0b{self.bitstring()}, GF(2^{self.spec.degree}) {self.spec.basis.tag})"


def add(x: FieldElement, y: FieldElement) -> FieldElement:
    return x + y


def mul(x: FieldElement, y: FieldElement) -> FieldElement:
    return x * y


def inv(x: FieldElement) -> FieldElement:
    return x.inverse()


def div(x: FieldElement, y: FieldElement) -> FieldElement:
    return x / y


def div_by_x(z: FieldElement) -> FieldElement:
    return z / z.spec.x


def change_basis(x: FieldElement, target: "Basis | str") -> FieldElement:
    """Rewrite ``x`` in another basis of the same field; a pure bit permutation."""
    spec = x.spec.with_basis(target)
    return FieldElement(spec.from_standard(x.spec.to_standard(x.bits)), spec)


def eval_poly(coeffs: Sequence[FieldElement], point: FieldElement) -> FieldElement:
    """Horner evaluation; ``coeffs`` are listed highest degree first."""
    acc = point.spec.zero
    for c in coeffs:
        acc = acc * point + c
    return acc
