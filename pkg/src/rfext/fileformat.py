"""Binary helper-file format.

Layout (all integers big-endian)::

    magic      8 bytes  b"RFEXTv01"
    tag        1 byte   variant code in the low 7 bits, 0x80 = parity-split basis
    n, k, t    u16 each
    v, ell     u16 each
    code key   u8 length + ASCII (empty for errorless variants)
    s          k bits, MSB first, zero-padded to a byte
    i          seed field element, same packing
    sigma      v bits, same packing

The seed width follows from the header: n/2 (new), n - v (baseline) or
n'/2 (fuzzy).  Padding bits must be zero and trailing bytes are rejected.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Union

from . import bits as _bits
from .extractor import ExtractorParams, HelperString, Variant
from .fuzzy import FuzzyHelper, FuzzyParams
from .gf2k import Basis, FieldSpec
from .linearcode import code_from_key

MAGIC = b"RFEXTv01"
FUZZY_TAG = 16
SPLIT_FLAG = 0x80

VARIANT_TAGS = {
    Variant.NEW: 1,
    Variant.NEW_SHORT: 2,
    Variant.DKRS_PRE: 3,
    Variant.DKRS_POST: 4,
    Variant.DKRS_IMPROVED_PRE: 5,
    Variant.DKRS_IMPROVED_POST: 6,
}
_TAG_VARIANTS = {t: v for v, t in VARIANT_TAGS.items()}
_HEADER = struct.Struct(">8sB5H")


class FormatError(ValueError):
    pass


@dataclass(frozen=True)
class HelperFile:
    variant: Union[Variant, str]  # a Variant or "fuzzy"
    basis: Basis
    n: int
    k: int
    t: int
    v: int
    ell: int
    code_key: str
    s: int
    i: int
    sigma: int

    @property
    def is_fuzzy(self) -> bool:
        return self.variant == "fuzzy"

    @property
    def seed_width(self) -> int:
        if self.is_fuzzy:
            return (self.n - self.k) // 2
        if Variant(self.variant).is_dkrs:
            return self.n - self.v
        return self.n // 2

    def to_bytes(self) -> bytes:
        tag = FUZZY_TAG if self.is_fuzzy else VARIANT_TAGS[Variant(self.variant)]
        if self.basis is Basis.PARITY_SPLIT:
            tag |= SPLIT_FLAG
        key = self.code_key.encode("ascii")
        if len(key) > 255:
            raise FormatError("code key longer than 255 bytes")
        for x in (self.n, self.k, self.t, self.v, self.ell):
            if not 0 <= x < 1 << 16:
                raise FormatError("header field out of u16 range")
        return b"".join(
            [
                _HEADER.pack(MAGIC, tag, self.n, self.k, self.t, self.v, self.ell),
                bytes([len(key)]),
                key,
                _bits.pack(self.s, self.k),
                _bits.pack(self.i, self.seed_width),
                _bits.pack(self.sigma, self.v),
            ]
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "HelperFile":
        if len(data) < _HEADER.size + 1:
            raise FormatError("helper file truncated")
        magic, tag, n, k, t, v, ell = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise FormatError("bad magic; not a helper file")
        basis = Basis.PARITY_SPLIT if tag & SPLIT_FLAG else Basis.STANDARD
        code = tag & ~SPLIT_FLAG
        if code == FUZZY_TAG:
            variant: Union[Variant, str] = "fuzzy"
        elif code in _TAG_VARIANTS:
            variant = _TAG_VARIANTS[code]
        else:
            raise FormatError(f"unknown variant tag {tag:#04x}")
        pos = _HEADER.size
        klen = data[pos]
        pos += 1
        try:
            key = data[pos : pos + klen].decode("ascii")
        except UnicodeDecodeError as exc:
            raise FormatError("code key is not ASCII") from exc
        if len(key) != klen:
            raise FormatError("helper file truncated in code key")
        pos += klen
        partial = cls(variant, basis, n, k, t, v, ell, key, 0, 0, 0)
        values = []
        for width in (k, partial.seed_width, v):
            nbytes = (width + 7) // 8
            chunk = data[pos : pos + nbytes]
            if len(chunk) != nbytes:
                raise FormatError("helper file truncated")
            raw = int.from_bytes(chunk, "big")
            if raw & _bits.mask(nbytes * 8 - width):
                raise FormatError("nonzero padding bits")
            values.append(raw >> (nbytes * 8 - width))
            pos += nbytes
        if pos != len(data):
            raise FormatError(f"{len(data) - pos} trailing bytes after helper")
        if (variant == "fuzzy") != bool(key):
            raise FormatError("code key must be present exactly for fuzzy helpers")
        return cls(variant, basis, n, k, t, v, ell, key, *values)

    # conversions

    @classmethod
    def from_errorless(cls, params: ExtractorParams, helper: HelperString) -> "HelperFile":
        return cls(params.variant, params.basis, params.n, 0, 0, params.v, params.ell, "", 0, helper.i.bits, helper.sigma)

    @classmethod
    def from_fuzzy(cls, params: FuzzyParams, helper: FuzzyHelper) -> "HelperFile":
        return cls(
            "fuzzy", Basis.STANDARD, params.n, params.k, params.t, params.v, params.ell,
            params.code.key, helper.s, helper.i.bits, helper.sigma,
        )

    def errorless_params(self) -> ExtractorParams:
        if self.is_fuzzy:
            raise FormatError("fuzzy helper given where an errorless helper is expected")
        variant = Variant(self.variant)
        total = self.n if variant.is_dkrs else self.n // 2
        beta = total - (2 * self.v if variant.is_dkrs else self.v) - self.ell
        try:
            return ExtractorParams(self.n, self.v, self.ell, variant, beta, basis=self.basis)
        except ValueError as exc:
            raise FormatError(f"inconsistent header: {exc}") from exc

    def errorless_helper(self, params: ExtractorParams) -> HelperString:
        return HelperString(params.field.element(self.i), self.sigma, self.v)

    def fuzzy_params(self) -> FuzzyParams:
        if not self.is_fuzzy:
            raise FormatError("errorless helper given where a fuzzy helper is expected")
        try:
            code = code_from_key(self.code_key)
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
        if (code.n, code.k, code.t) != (self.n, self.k, self.t):
            raise FormatError("code key does not match header (n, k, t)")
        try:
            return FuzzyParams(code, self.v, self.ell, truncated=(self.n - self.k) % 2 == 1)
        except ValueError as exc:
            raise FormatError(f"inconsistent header: {exc}") from exc

    def fuzzy_helper(self, params: FuzzyParams) -> FuzzyHelper:
        field: FieldSpec = params.field
        return FuzzyHelper(self.s, self.k, field.element(self.i), self.sigma, self.v)
