"""Robust fuzzy extractor for the binary Hamming metric.

Gen publishes the syndrome s = S.w, a seed i and a tag; the MAC key is the
complementary projection c = S_perp.w split into halves (a, b) over
GF(2^(n'/2)).  The tagged value is

    y = f_{s,i}(a) + b,   f_{s,i}(x) = x^(L+3) + x^2 (s_{L-1} x^(L-1) + ... + s_0) + i x

where s is zero-padded and cut into L = 2*ceil(k/n') field elements.  The
tag is the top v bits of y and the key the next ell bits.
"""

from __future__ import annotations

import functools
import math
import secrets
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional, Sequence

from . import bits as _bits
from .extractor import ExtractedKey, Infeasible, Rational
from .gf2k import FieldElement, FieldSpec
from .linearcode import DecodeFailure, LinearSketchSpec, decode_syndrome, srec, ss, ss_perp

__all__ = [
    "FuzzyParams",
    "FuzzyHelper",
    "hamming_ball_volume",
    "hamming_ball_log2",
    "ball_bounds",
    "derive_fuzzy_params",
    "make_fuzzy_params",
    "pad_and_split_sketch",
    "mac_poly_eval",
    "fuzzy_gen",
    "fuzzy_rep",
    "offsets_from_delta",
]


def hamming_ball_volume(n: int, t: int) -> int:
    if not 0 <= t <= n:
        raise ValueError(f"radius t={t} outside [0, {n}]")
    return sum(math.comb(n, j) for j in range(t + 1))


def hamming_ball_log2(n: int, t: int) -> float:
    return math.log2(hamming_ball_volume(n, t))


def ball_bounds(n: int, t: int) -> dict[str, object]:
    """The ball volume next to the two textbook upper bounds on it.

    Comparisons are done on integers: B <= (n+1)^t, and
    B * t^t * (n-t)^(n-t) <= n^n for the binary-entropy bound.
    """
    B = hamming_ball_volume(n, t)
    h = 0.0 if t in (0, n) else -(t / n) * math.log2(t / n) - (1 - t / n) * math.log2(1 - t / n)
    return {
        "log2_B": math.log2(B),
        "t_log2_n_plus_1": t * math.log2(n + 1),
        "n_H2": n * h,
        "within_t_log_bound": B <= (n + 1) ** t,
        "within_entropy_bound": B * t**t * (n - t) ** (n - t) <= n**n,
    }


def ceil_plus_log2(q: Rational, x: int) -> int:
    """Smallest integer v with v >= q + log2(x), decided exactly."""
    if x < 1:
        raise ValueError("log2 of a non-positive integer")
    q = Fraction(q)
    p, d = q.numerator, q.denominator
    target = x**d
    v = math.floor(q) + x.bit_length() - 2
    # 2^(v - q) >= x  <=>  2^(v*d - p) >= x^d
    while v * d - p < 0 or (1 << (v * d - p)) < target:
        v += 1
    while (v - 1) * d - p >= 0 and (1 << ((v - 1) * d - p)) >= target:
        v -= 1
    return v


@dataclass(frozen=True, eq=False)
class FuzzyParams:
    code: LinearSketchSpec = dc_field(repr=False)
    v: int = 0
    ell: int = 1
    truncated: bool = False
    m: Optional[Rational] = None
    log2_inv_delta: Optional[Rational] = None
    log2_inv_eps: Optional[Rational] = None

    def __post_init__(self) -> None:
        raw = self.code.n - self.code.k
        if raw % 2 and not self.truncated:
            raise ValueError(f"n - k = {raw} is odd; drop one bit of c (truncated=True)")
        if self.truncated and raw % 2 == 0:
            raise ValueError("truncation only applies when n - k is odd")
        if self.n_prime < 2:
            raise ValueError("n - k too small for the MAC field")
        if self.ell < 1 or self.v < 0 or self.v + self.ell > self.n_prime // 2:
            raise ValueError(f"need ell >= 1 and v + ell <= n'/2, got v={self.v}, ell={self.ell}")

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def k(self) -> int:
        return self.code.k

    @property
    def t(self) -> int:
        return self.code.t

    @property
    def n_prime(self) -> int:
        raw = self.code.n - self.code.k
        return raw - 1 if self.truncated else raw

    @property
    def half(self) -> int:
        return self.n_prime // 2

    @property
    def beta(self) -> int:
        return self.half - self.v - self.ell

    @property
    def L(self) -> int:
        return 2 * math.ceil(self.k / self.n_prime)

    @property
    def ball_volume(self) -> int:
        return hamming_ball_volume(self.n, self.t)

    @property
    def log2_B(self) -> float:
        return math.log2(self.ball_volume)

    @functools.cached_property
    def field(self) -> FieldSpec:
        return FieldSpec.of_degree(self.half)

    def report(self) -> dict[str, object]:
        return {
            "variant": "fuzzy",
            "code": self.code.key,
            "n": self.n,
            "k": self.k,
            "t": self.t,
            "n_prime": self.n_prime,
            "truncated": int(self.truncated),
            "m": "-" if self.m is None else str(self.m),
            "log2_inv_delta": "-" if self.log2_inv_delta is None else str(self.log2_inv_delta),
            "log2_inv_eps": "-" if self.log2_inv_eps is None else str(self.log2_inv_eps),
            "L": self.L,
            "log2_B": f"{self.log2_B:.6f}",
            "v": self.v,
            "ell": self.ell,
            "beta": self.beta,
        }


@dataclass(frozen=True)
class FuzzyHelper:
    s: int
    k: int
    i: FieldElement
    sigma: int
    v: int

    def __post_init__(self) -> None:
        _bits.check_length(self.s, self.k, "s")
        _bits.check_length(self.sigma, self.v, "sigma")


def make_fuzzy_params(code: LinearSketchSpec, v: int, ell: int, truncate: bool = False) -> FuzzyParams:
    """Explicit (v, ell) without the security solver; for harnesses and tiny codes."""
    return FuzzyParams(code, v, ell, truncated=truncate and (code.n - code.k) % 2 == 1)


def derive_fuzzy_params(
    code: LinearSketchSpec,
    m: Rational,
    log2_inv_delta: Rational,
    log2_inv_eps: Rational = 0,
    truncate: bool = False,
) -> "FuzzyParams | Infeasible":
    """Tag length from the robustness requirement, key length capped by the uniformity bound."""
    n, k = code.n, code.k
    m, d, e = Fraction(m), Fraction(log2_inv_delta), Fraction(log2_inv_eps)
    raw = n - k
    truncated = False
    if raw % 2:
        if not truncate:
            raise ValueError(f"n - k = {raw} is odd; drop one bit of c (truncate=True, or --truncate on the command line)")
        truncated, raw, m = True, raw - 1, m - 1
    if not 0 < m <= n:
        raise ValueError(f"need 0 < m <= n, got m={m}")
    half = raw // 2
    L = 2 * math.ceil(k / raw)
    ball = hamming_ball_volume(n, code.t)

    v = ceil_plus_log2(n - m + d, ball * (L + 2))
    beta = max(0, math.ceil(Fraction(n + k, 2) + 2 * e - m))
    ell_cap = -ceil_plus_log2(-(m - Fraction(n, 2) - k - d), ball * (L + 2))
    ell = min(half - v - beta, ell_cap)
    if ell < 1:
        if half - v < 1:
            return Infeasible("robustness", f"tag length v={v} >= n'/2={half}")
        return Infeasible("uniformity", f"key length {ell} after shortening beta={beta} and bound {ell_cap}")
    return FuzzyParams(code, v, ell, truncated, m, d, e)


def pad_and_split_sketch(
    s: int, k: int, n_prime: int, field: Optional[FieldSpec] = None
) -> list[FieldElement]:
    """Zero-pad s to L*n'/2 bits and cut it into [s_{L-1}, ..., s_0]."""
    if n_prime % 2:
        raise ValueError("n' must be even")
    _bits.check_length(s, k, "s")
    half = n_prime // 2
    field = field or FieldSpec.of_degree(half)
    L = 2 * math.ceil(k / n_prime)
    padded = s << (L * half - k)
    return [field.element(_bits.substr(padded, L * half, j * half + 1, (j + 1) * half)) for j in range(L)]


def mac_poly_eval(s_parts: Sequence[FieldElement], i: FieldElement, a: FieldElement) -> FieldElement:
    L = len(s_parts)
    inner = a.spec.zero
    for part in s_parts:
        inner = inner * a + part
    return a ** (L + 3) + a * a * inner + i * a


def _mac_raw(F: FieldSpec, parts: Sequence[int], i: int, a: int) -> int:
    mul = F.mul_raw
    inner = 0
    for part in parts:
        inner = mul(inner, a) ^ part
    lead = 1
    for _ in range(len(parts) + 3):
        lead = mul(lead, a)
    return lead ^ mul(mul(a, a), inner) ^ mul(i, a)


def _split_c(c: int, params: FuzzyParams) -> tuple[int, int]:
    if params.truncated:
        c >>= 1
    return c >> params.half, c & _bits.mask(params.half)


def _parts(s: int, params: FuzzyParams) -> list[int]:
    return [p.bits for p in pad_and_split_sketch(s, params.k, params.n_prime, params.field)]


def _tag_and_key(s: int, i: int, c: int, params: FuzzyParams) -> tuple[int, int]:
    a, b = _split_c(c, params)
    y = _mac_raw(params.field, _parts(s, params), i, a) ^ b
    return y >> (params.half - params.v), (y >> params.beta) & _bits.mask(params.ell)


def fuzzy_gen(
    w: int, params: FuzzyParams, i: Optional[FieldElement] = None
) -> tuple[ExtractedKey, FuzzyHelper]:
    _bits.check_length(w, params.n, "w")
    field = params.field
    if i is None:
        i = field.element(secrets.randbits(field.degree))
    if i.spec != field:
        raise ValueError(f"seed lives in {i.spec.key}, params need {field.key}")
    s = ss(params.code, w)
    sigma, key = _tag_and_key(s, i.bits, ss_perp(params.code, w), params)
    return ExtractedKey(key, params.ell), FuzzyHelper(s, params.k, i, sigma, params.v)


def fuzzy_rep(w_prime: int, helper: FuzzyHelper, params: FuzzyParams) -> Optional[ExtractedKey]:
    """Recover the key from a close reading, or None (reject)."""
    _bits.check_length(w_prime, params.n, "w'")
    code = params.code
    if helper.i.spec != params.field or helper.k != params.k or helper.v != params.v:
        raise ValueError("helper does not match the parameters")
    try:
        w_star = srec(code, w_prime, helper.s)
    except DecodeFailure:
        return None
    if _bits.weight(w_star ^ w_prime) > code.t or ss(code, w_star) != helper.s:
        return None
    sigma, key = _tag_and_key(helper.s, helper.i.bits, ss_perp(code, w_star), params)
    if sigma != helper.sigma:
        return None
    return ExtractedKey(key, params.ell)


def offsets_from_delta(
    delta: int, s: int, s_prime: int, params: FuzzyParams
) -> Optional[tuple[FieldElement, FieldElement]]:
    """Offsets (a' - a, b' - b) that replacing s by s' induces, given w' = w + delta.

    Needs only public data: Rep decodes the syndrome s + s' + S.delta, so the
    correction e, hence w* - w = delta + e, does not depend on w.  Returns
    None when Rep is certain to reject before computing a', b'.
    """
    code = params.code
    _bits.check_length(delta, params.n, "delta")
    try:
        e = decode_syndrome(code, s ^ s_prime ^ ss(code, delta))
    except DecodeFailure:
        return None
    shift = delta ^ e
    if _bits.weight(e) > code.t or s ^ ss(code, shift) != s_prime:
        return None
    da, db = _split_c(ss_perp(code, shift), params)
    field = params.field
    return field.element(da), field.element(db)
