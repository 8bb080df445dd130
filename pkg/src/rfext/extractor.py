"""Errorless robust extractors.

``gen``/``rep`` implement the pairwise-independent construction: split
w = a || b into halves, compute y = i*a + b in GF(2^(n/2)), publish the top
``v`` bits of y as the tag and keep the next ``ell`` bits as the key.

``dkrs_gen``/``dkrs_rep`` implement the baseline: a is the first n - v bits,
b the last v bits, z = i*a in GF(2^(n-v)), tag = top v bits of z xor b and
key = the following ``ell`` bits of z.

Parameter arithmetic is exact: the robustness and uniformity exponents are
rationals and every ceiling is taken once, after summing.
"""

from __future__ import annotations

import enum
import functools
import math
import secrets
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Union

from . import bits as _bits
from .gf2k import Basis, FieldElement, FieldSpec

__all__ = [
    "Variant",
    "ExtractorParams",
    "Infeasible",
    "HelperString",
    "ExtractedKey",
    "derive_params",
    "gen",
    "rep",
    "dkrs_gen",
    "dkrs_rep",
    "generate",
    "reproduce",
]

Rational = Union[int, Fraction]


class Variant(str, enum.Enum):
    NEW = "new"
    NEW_SHORT = "new-short"
    DKRS_PRE = "dkrs-pre"
    DKRS_POST = "dkrs-post"
    DKRS_IMPROVED_PRE = "dkrs-improved-pre"
    DKRS_IMPROVED_POST = "dkrs-improved-post"

    @property
    def is_dkrs(self) -> bool:
        return self.value.startswith("dkrs")


@dataclass(frozen=True)
class Infeasible:
    """Why a parameter request cannot be met."""

    constraint: str  # "uniformity" | "robustness"
    detail: str

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class ExtractorParams:
    n: int
    v: int
    ell: int
    variant: Variant = Variant.NEW
    beta: int = 0
    m: Optional[Rational] = None
    log2_inv_delta: Optional[Rational] = None
    log2_inv_eps: Optional[Rational] = None
    basis: Basis = Basis.STANDARD

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "basis", Basis.parse(self.basis))
        if self.n < 2 or self.n % 2:
            raise ValueError(f"n must be even and >= 2, got {self.n}; drop one bit of w first")
        if self.ell < 1:
            raise ValueError(f"key length ell must be >= 1, got {self.ell}")
        if self.v < 0 or self.beta < 0:
            raise ValueError("v and beta must be nonnegative")
        if self.variant.is_dkrs:
            if 2 * self.v + self.ell + self.beta != self.n:
                raise ValueError("baseline layout needs 2v + ell + beta = n")
        elif self.v + self.ell + self.beta != self.n // 2:
            raise ValueError("layout needs v + ell + beta = n/2")
        if self.basis is Basis.PARITY_SPLIT and self.field_degree % 2:
            raise ValueError(f"parity-split basis needs an even field degree, got {self.field_degree}")

    @property
    def field_degree(self) -> int:
        return self.n - self.v if self.variant.is_dkrs else self.n // 2

    @functools.cached_property
    def field(self) -> FieldSpec:
        return FieldSpec.of_degree(self.field_degree, self.basis)

    def with_basis(self, basis: "Basis | str") -> "ExtractorParams":
        return replace(self, basis=Basis.parse(basis))

    def robustness_bound(self) -> Optional[Fraction]:
        """2^(n - v - m) for the new construction (None without a claimed m)."""
        if self.m is None:
            return None
        return _pow2(self.n - self.v - Fraction(self.m))

    def report(self) -> dict[str, object]:
        return {
            "variant": self.variant.value,
            "n": self.n,
            "m": _fmt(self.m),
            "log2_inv_delta": _fmt(self.log2_inv_delta),
            "log2_inv_eps": _fmt(self.log2_inv_eps),
            "v": self.v,
            "ell": self.ell,
            "beta": self.beta,
            "field_degree": self.field_degree,
        }


def _fmt(x: Optional[Rational]) -> str:
    return "-" if x is None else str(x)


def _pow2(e: Fraction) -> Fraction:
    """2^e for integer e; raises for non-integer exponents."""
    e = Fraction(e)
    if e.denominator != 1:
        raise ValueError("exact power of two needs an integer exponent")
    return Fraction(2) ** int(e)


@dataclass(frozen=True)
class ExtractedKey:
    bits: int
    length: int

    def __post_init__(self) -> None:
        _bits.check_length(self.bits, self.length, "key")

    def hex(self) -> str:
        return _bits.to_hex(self.bits, self.length)

    def bitstring(self) -> str:
        return _bits.to_bitstring(self.bits, self.length)


@dataclass(frozen=True)
class HelperString:
    i: FieldElement
    sigma: int
    v: int

    def __post_init__(self) -> None:
        _bits.check_length(self.sigma, self.v, "sigma")


def derive_params(
    n: int,
    m: Rational,
    log2_inv_delta: Rational,
    log2_inv_eps: Rational = 0,
    variant: "Variant | str" = Variant.NEW,
    basis: "Basis | str" = Basis.STANDARD,
) -> "ExtractorParams | Infeasible":
    """Solve for (v, ell, beta) of a construction variant.

    Returns an :class:`Infeasible` (falsy) naming the violated constraint
    instead of raising, since infeasibility is an expected answer here.
    """
    variant = Variant(variant)
    if n < 2 or n % 2:
        raise ValueError(f"n must be even, got {n}")
    m, d, e = Fraction(m), Fraction(log2_inv_delta), Fraction(log2_inv_eps)
    if not 0 < m <= n:
        raise ValueError(f"need 0 < m <= n, got m={m}")
    if d < 0 or e < 0:
        raise ValueError("log2(1/delta) and log2(1/eps) must be nonnegative")
    half = n // 2
    beta = 0

    if variant is Variant.NEW:
        if m < half + 2 * e:
            return Infeasible("uniformity", f"m={m} < n/2 + 2 log 1/eps = {half + 2 * e}")
        v = math.ceil(n - m + d)
        ell = half - v
    elif variant is Variant.NEW_SHORT:
        v = math.ceil(n - m + d)
        beta = max(0, math.ceil(half + 2 * e - m))
        ell = half - v - beta
    elif variant is Variant.DKRS_PRE:
        v = math.ceil(n - m + max(d, 2 * e))
        ell = n - 2 * v
    elif variant is Variant.DKRS_POST:
        v = math.ceil(max((2 * n - m + d) / 3, n - m + 2 * e))
        ell = n - 2 * v
    elif variant is Variant.DKRS_IMPROVED_PRE:
        v = math.ceil(n - m + d)
        beta = max(0, math.ceil(2 * e - d))
        ell = n - 2 * v - beta
    else:
        v = math.ceil((2 * n - m + d) / 3)
        beta = max(0, math.ceil(2 * e - (2 * m - n + d) / 3))
        ell = n - 2 * v - beta

    if ell < 1:
        room = half - v if not variant.is_dkrs else n - 2 * v
        if room < 1:
            return Infeasible("robustness", f"tag length v={v} leaves no room for a key")
        return Infeasible("uniformity", f"shortening beta={beta} leaves no room for a key")
    return ExtractorParams(n, v, ell, variant, beta, m, d, e, Basis.parse(basis))


def _fresh_seed(field: FieldSpec) -> FieldElement:
    return field.element(secrets.randbits(field.degree))


def _check_seed(i: FieldElement, params: ExtractorParams) -> None:
    if i.spec != params.field:
        raise ValueError(f"seed lives in {i.spec.key}, params need {params.field.key}")


def evaluate(w: int, i: FieldElement, params: ExtractorParams) -> tuple[int, int]:
    """(tag, key) that seed ``i`` produces from ``w`` for the new construction."""
    half = params.n // 2
    a, b = w >> half, w & _bits.mask(half)
    y = params.field.mul_raw(i.bits, a) ^ b
    sigma = y >> (half - params.v)
    key = (y >> params.beta) & _bits.mask(params.ell)
    return sigma, key


def gen(
    w: int, params: ExtractorParams, i: Optional[FieldElement] = None
) -> tuple[ExtractedKey, HelperString]:
    if params.variant.is_dkrs:
        raise ValueError("gen implements the new construction; use dkrs_gen for the baseline")
    _bits.check_length(w, params.n, "w")
    if i is None:
        i = _fresh_seed(params.field)
    _check_seed(i, params)
    sigma, key = evaluate(w, i, params)
    return ExtractedKey(key, params.ell), HelperString(i, sigma, params.v)


def rep(w: int, helper: HelperString, params: ExtractorParams) -> Optional[ExtractedKey]:
    """Recompute the key, or None (reject) when the tag does not verify."""
    _bits.check_length(w, params.n, "w")
    _check_seed(helper.i, params)
    sigma, key = evaluate(w, helper.i, params)
    if sigma != helper.sigma:
        return None
    return ExtractedKey(key, params.ell)


def dkrs_evaluate(w: int, i: FieldElement, params: ExtractorParams) -> tuple[int, int]:
    v, deg = params.v, params.field_degree
    a, b = w >> v, w & _bits.mask(v)
    z = params.field.mul_raw(i.bits, a)
    sigma = (z >> (deg - v)) ^ b
    key = (z >> params.beta) & _bits.mask(params.ell)
    return sigma, key


def dkrs_gen(
    w: int, params: ExtractorParams, i: Optional[FieldElement] = None
) -> tuple[ExtractedKey, HelperString]:
    if not params.variant.is_dkrs:
        raise ValueError("dkrs_gen needs a dkrs-* variant")
    _bits.check_length(w, params.n, "w")
    if i is None:
        i = _fresh_seed(params.field)
    _check_seed(i, params)
    sigma, key = dkrs_evaluate(w, i, params)
    return ExtractedKey(key, params.ell), HelperString(i, sigma, params.v)


def dkrs_rep(w: int, helper: HelperString, params: ExtractorParams) -> Optional[ExtractedKey]:
    _bits.check_length(w, params.n, "w")
    _check_seed(helper.i, params)
    sigma, key = dkrs_evaluate(w, helper.i, params)
    if sigma != helper.sigma:
        return None
    return ExtractedKey(key, params.ell)


def generate(w: int, params: ExtractorParams, i: Optional[FieldElement] = None):
    """Dispatch to gen or dkrs_gen by variant."""
    return (dkrs_gen if params.variant.is_dkrs else gen)(w, params, i)


def reproduce(w: int, helper: HelperString, params: ExtractorParams) -> Optional[ExtractedKey]:
    return (dkrs_rep if params.variant.is_dkrs else rep)(w, helper, params)
