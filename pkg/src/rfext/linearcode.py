"""Syndrome secure sketches from binary linear codes.

Matrices are tuples of row ints; in an ``n``-column row, column ``j``
(1-indexed from the left) is int bit ``n - j``.  A word ``w`` is an n-bit
int with the same convention, so ``S.w`` has bit ``r`` (1-indexed from the
left) equal to the parity of ``S[r-1] & w``.

For BCH codes the word is read as the polynomial whose x^e coefficient is
int bit ``e``; the sketch is ``w(x) mod g(x)``, which is linear with kernel
equal to the code.
"""

from __future__ import annotations

import enum
import functools
import hashlib
import math
import random
from dataclasses import dataclass, field
from typing import Sequence

from . import bits as _bits
from .gf2k import FieldSpec, clmul, poly_mod

__all__ = [
    "Decoder",
    "DecodeFailure",
    "LinearSketchSpec",
    "ss",
    "ss_perp",
    "reconstruct",
    "srec",
    "decode_syndrome",
    "build_complement",
    "make_code",
    "code_from_key",
    "gf2_rank",
    "min_distance",
]

EXHAUSTIVE_TABLE_LIMIT = 1 << 20


class Decoder(str, enum.Enum):
    EXHAUSTIVE = "exhaustive"
    ALGEBRAIC = "algebraic"


class DecodeFailure(Exception):
    """No error pattern of weight <= t explains the syndrome difference."""


def gf2_rank(rows: Sequence[int]) -> int:
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top not in basis:
                basis[top] = r
                break
            r ^= basis[top]
    return len(basis)


def _gf2_inverse(rows: Sequence[int], n: int) -> tuple[int, ...]:
    """Inverse of an n x n GF(2) matrix given as row ints."""
    a = list(rows)
    inv = [1 << (n - 1 - r) for r in range(n)]
    for col in range(n):
        bit = 1 << (n - 1 - col)
        pivot = next((r for r in range(col, n) if a[r] & bit), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        a[col], a[pivot] = a[pivot], a[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        for r in range(n):
            if r != col and a[r] & bit:
                a[r] ^= a[col]
                inv[r] ^= inv[col]
    return tuple(inv)


def _mat_vec(rows: Sequence[int], w: int) -> int:
    out = 0
    for r in rows:
        out = (out << 1) | ((r & w).bit_count() & 1)
    return out


def build_complement(S: Sequence[int], n: int) -> tuple[int, ...]:
    """Greedy unit-vector rows completing ``S`` to a full-rank n x n matrix."""
    if gf2_rank(S) != len(S):
        raise ValueError("S does not have full row rank")
    rows = list(S)
    out = []
    rank = len(rows)
    for j in range(1, n + 1):
        if rank == n:
            break
        e = 1 << (n - j)
        if gf2_rank(rows + [e]) > rank:
            rows.append(e)
            out.append(e)
            rank += 1
    return tuple(out)


@dataclass(frozen=True)
class _BCHData:
    field: FieldSpec
    alpha: int
    generator: int


@dataclass(frozen=True, eq=False)
class LinearSketchSpec:
    """An [n, n-k, 2t+1] code with sketch matrix S and its complement S_perp."""

    n: int
    k: int
    t: int
    S: tuple[int, ...]
    S_perp: tuple[int, ...]
    decoder: Decoder
    key: str = ""
    bch: _BCHData | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if len(self.S) != self.k or len(self.S_perp) != self.n - self.k:
            raise ValueError("matrix shapes do not match (n, k)")
        if any(r >> self.n for r in self.S + self.S_perp):
            raise ValueError(f"matrix rows wider than n={self.n}")
        if gf2_rank(self.S) != self.k:
            raise ValueError("S must have rank k")
        if gf2_rank(self.S + self.S_perp) != self.n:
            raise ValueError("stacked (S / S_perp) must have full rank n")

    @classmethod
    def from_matrix(
        cls, S: Sequence[int], n: int, t: int, key: str = "", decoder: Decoder = Decoder.EXHAUSTIVE
    ) -> "LinearSketchSpec":
        S = tuple(S)
        return cls(n, len(S), t, S, build_complement(S, n), Decoder(decoder), key)

    @functools.cached_property
    def stacked_inverse(self) -> tuple[int, ...]:
        return _gf2_inverse(self.S + self.S_perp, self.n)

    @functools.cached_property
    def coset_leaders(self) -> dict[int, int]:
        """syndrome -> unique error pattern of weight <= t."""
        size = sum(math.comb(self.n, j) for j in range(self.t + 1))
        if size > EXHAUSTIVE_TABLE_LIMIT:
            raise ValueError(f"coset-leader table of {size} entries is too large")
        table: dict[int, int] = {}
        for wt in range(self.t + 1):
            for pos in _combinations_masks(self.n, wt):
                syn = self.syndrome(pos)
                if syn in table:
                    raise ValueError("code does not correct t errors: two patterns share a syndrome")
                table[syn] = pos
        return table

    def syndrome(self, w: int) -> int:
        if self.bch is not None:
            return poly_mod(w, self.bch.generator)
        return _mat_vec(self.S, w)

    @property
    def n_prime(self) -> int:
        return self.n - self.k


def _combinations_masks(n: int, wt: int):
    from itertools import combinations

    for combo in combinations(range(n), wt):
        m = 0
        for c in combo:
            m |= 1 << c
        yield m


def ss(spec: LinearSketchSpec, w: int) -> int:
    _bits.check_length(w, spec.n, "w")
    return spec.syndrome(w)


def ss_perp(spec: LinearSketchSpec, w: int) -> int:
    _bits.check_length(w, spec.n, "w")
    return _mat_vec(spec.S_perp, w)


def reconstruct(spec: LinearSketchSpec, s: int, c: int) -> int:
    """The unique w with ss(w) = s and ss_perp(w) = c."""
    _bits.check_length(s, spec.k, "s")
    _bits.check_length(c, spec.n - spec.k, "c")
    return _mat_vec(spec.stacked_inverse, (s << (spec.n - spec.k)) | c)


def decode_syndrome(spec: LinearSketchSpec, syndrome: int) -> int:
    """Error pattern e with weight <= t and ss(e) = syndrome, or DecodeFailure."""
    if syndrome == 0:
        return 0
    if spec.decoder is Decoder.ALGEBRAIC:
        return _bch_decode(spec, syndrome)
    try:
        return spec.coset_leaders[syndrome]
    except KeyError:
        raise DecodeFailure(f"no error of weight <= {spec.t} has syndrome {syndrome:#x}") from None


def srec(spec: LinearSketchSpec, w_prime: int, s: int) -> int:
    _bits.check_length(w_prime, spec.n, "w'")
    _bits.check_length(s, spec.k, "s")
    return w_prime ^ decode_syndrome(spec, spec.syndrome(w_prime) ^ s)


# --- BCH codes ---


def _minimal_poly(F: FieldSpec, beta: int) -> int:
    conj = []
    x = beta
    while x not in conj:
        conj.append(x)
        x = F.mul_raw(x, x)
    # product of (X - c) with field coefficients; result lies in GF(2)[X]
    coeffs = [1]  # highest degree first
    for c in conj:
        nxt = coeffs + [0]
        for idx in range(1, len(nxt)):
            nxt[idx] ^= F.mul_raw(coeffs[idx - 1], c)
        coeffs = nxt
    out = 0
    for c in coeffs:
        if c not in (0, 1):
            raise AssertionError("minimal polynomial has non-binary coefficient")
        out = (out << 1) | c
    return out


def _primitive_element(F: FieldSpec) -> int:
    order = F.order - 1
    factors = [p for p in range(2, order + 1) if order % p == 0 and all(p % q for q in range(2, math.isqrt(p) + 1))]
    for g in range(2, F.order):
        if all(_pow_raw(F, g, order // p) != 1 for p in factors):
            return g
    return 1


def _pow_raw(F: FieldSpec, a: int, e: int) -> int:
    r = 1
    while e:
        if e & 1:
            r = F.mul_raw(r, a)
        a = F.mul_raw(a, a)
        e >>= 1
    return r


def bch_generator(n: int, t: int) -> tuple[int, FieldSpec, int]:
    r = (n + 1).bit_length() - 1
    if n != (1 << r) - 1 or r < 3:
        raise ValueError(f"narrow-sense primitive BCH needs n = 2^r - 1 >= 7, got {n}")
    F = FieldSpec.of_degree(r)
    alpha = _primitive_element(F)
    g, seen = 1, set()
    for j in range(1, 2 * t + 1):
        m = _minimal_poly(F, _pow_raw(F, alpha, j))
        if m not in seen:
            seen.add(m)
            g = clmul(g, m)
    return g, F, alpha


def _bch_decode(spec: LinearSketchSpec, remainder: int) -> int:
    data = spec.bch
    F, alpha, t, n = data.field, data.alpha, spec.t, spec.n
    powers = [_pow_raw(F, alpha, j) for j in range(2 * t + 1)]
    # power syndromes S_j = r(alpha^j); r shares them with the error since g(alpha^j) = 0
    synd = []
    for j in range(1, 2 * t + 1):
        if j % 2 == 0:
            half = synd[j // 2 - 1]
            synd.append(F.mul_raw(half, half))
            continue
        acc, p, rem, aj = 0, 1, remainder, powers[j]
        while rem:
            if rem & 1:
                acc ^= p
            p = F.mul_raw(p, aj)
            rem >>= 1
        synd.append(acc)
    if not any(synd):
        raise DecodeFailure("nonzero remainder with zero power syndromes")

    # Berlekamp-Massey; polynomials as coefficient lists, index = degree
    C, B = [1], [1]
    L, shift, b = 0, 1, 1
    for step in range(2 * t):
        d = synd[step]
        for i in range(1, L + 1):
            if i < len(C):
                d ^= F.mul_raw(C[i], synd[step - i])
        if d == 0:
            shift += 1
            continue
        coef = F.mul_raw(d, F.inv_raw(b))
        T = list(C)
        need = len(B) + shift
        if len(C) < need:
            C = C + [0] * (need - len(C))
        for i, bi in enumerate(B):
            C[i + shift] ^= F.mul_raw(coef, bi)
        if 2 * L <= step:
            L, B, b, shift = step + 1 - L, T, d, 1
        else:
            shift += 1
    while len(C) > 1 and C[-1] == 0:
        C.pop()
    if len(C) - 1 != L or L > t:
        raise DecodeFailure("error locator degree inconsistent")

    # Chien search: position e is in error iff C(alpha^-e) = 0
    err = 0
    found = 0
    inv_alpha = F.inv_raw(alpha)
    x = 1
    for e in range(n):
        acc = 0
        for coef in reversed(C):
            acc = F.mul_raw(acc, x) ^ coef
        if acc == 0:
            err |= 1 << e
            found += 1
        x = F.mul_raw(x, inv_alpha)
    if found != L or poly_mod(err, data.generator) != remainder:
        raise DecodeFailure("error locator has the wrong number of roots")
    return err


# --- code families ---


def _hamming(n: int, t: int) -> LinearSketchSpec:
    r = (n + 1).bit_length() - 1
    if n != (1 << r) - 1 or r < 2:
        raise ValueError(f"Hamming codes need n = 2^r - 1, got {n}")
    if t != 1:
        raise ValueError("Hamming codes correct exactly t = 1 error")
    # column j is the binary expansion of j, most significant bit in row 1
    rows = []
    for row in range(r):
        shift = r - 1 - row
        val = 0
        for j in range(1, n + 1):
            val = (val << 1) | ((j >> shift) & 1)
        rows.append(val)
    return LinearSketchSpec.from_matrix(rows, n, t, key=f"hamming-{n}-{t}")


def _bch(n: int, t: int) -> LinearSketchSpec:
    if t < 1:
        raise ValueError("BCH codes need t >= 1")
    g, F, alpha = bch_generator(n, t)
    k = g.bit_length() - 1
    if k >= n:
        raise ValueError(f"BCH({n}, t={t}) has no information bits")
    # column j (int bit n - j, polynomial x^(n-j)) is x^(n-j) mod g
    cols = [poly_mod(1 << e, g) for e in range(n)]
    rows = []
    for row in range(k):
        shift = k - 1 - row
        val = 0
        for e in range(n - 1, -1, -1):
            val = (val << 1) | ((cols[e] >> shift) & 1)
        rows.append(val)
    S = tuple(rows)
    return LinearSketchSpec(
        n, k, t, S, build_complement(S, n), Decoder.ALGEBRAIC, f"bch-{n}-{t}", _BCHData(F, alpha, g)
    )


def _ball(n: int, t: int) -> int:
    return sum(math.comb(n, j) for j in range(t + 1))


def _exhaustive_random(n: int, t: int, tries: int = 64) -> LinearSketchSpec:
    if n > 20:
        raise ValueError("exhaustive-random codes are limited to n <= 20")
    if t < 1:
        raise ValueError("need t >= 1")
    seed = int.from_bytes(hashlib.sha256(f"exhaustive-random-{n}-{t}".encode()).digest()[:8], "big")
    rng = random.Random(seed)
    k = max(1, math.ceil(math.log2(_ball(n, t))))
    while k < n:
        for _ in range(tries):
            S = [rng.getrandbits(n) for _ in range(k)]
            if gf2_rank(S) != k:
                continue
            if _min_distance_at_least(S, n, 2 * t + 1):
                return LinearSketchSpec.from_matrix(S, n, t, key=f"exhaustive-random-{n}-{t}")
        k += 1
    raise ValueError(f"no random code found for n={n}, t={t}")


def _kernel_basis(S: Sequence[int], n: int) -> list[int]:
    """Basis of {w : S w = 0} via reduced row echelon form."""
    rows = []
    pivots = []
    for r in S:
        for p, pr in zip(pivots, rows):
            if r >> (n - 1 - p) & 1:
                r ^= pr
        if r:
            p = n - r.bit_length()
            for idx, pr in enumerate(rows):
                if pr >> (n - 1 - p) & 1:
                    rows[idx] = pr ^ r
            rows.append(r)
            pivots.append(p)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        vec = 1 << (n - 1 - f)
        for p, pr in zip(pivots, rows):
            if pr >> (n - 1 - f) & 1:
                vec |= 1 << (n - 1 - p)
        basis.append(vec)
    return basis


def _min_distance_at_least(S: Sequence[int], n: int, d: int) -> bool:
    basis = _kernel_basis(S, n)
    # Gray-code walk over the kernel
    word = 0
    for step in range(1, 1 << len(basis)):
        word ^= basis[(step & -step).bit_length() - 1]
        if word.bit_count() < d:
            return False
    return True


def min_distance(spec: LinearSketchSpec) -> int:
    """Exact minimum distance by enumerating the kernel (n <= 24)."""
    if spec.n > 24:
        raise ValueError("exhaustive minimum distance limited to n <= 24")
    basis = _kernel_basis(spec.S, spec.n)
    best = spec.n + 1
    word = 0
    for step in range(1, 1 << len(basis)):
        word ^= basis[(step & -step).bit_length() - 1]
        best = min(best, word.bit_count())
    return best


_FAMILIES = {"hamming": _hamming, "bch": _bch, "exhaustive-random": _exhaustive_random}


@functools.lru_cache(maxsize=64)
def make_code(family: str, n: int, t: int) -> LinearSketchSpec:
    """Build a code from a named family with the smallest sketch length it allows."""
    try:
        builder = _FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown code family {family!r}; choose from {sorted(_FAMILIES)}") from None
    return builder(n, t)


def code_from_key(key: str) -> LinearSketchSpec:
    """Parse keys such as ``bch-255-8`` or ``exhaustive-random-12-1``."""
    try:
        family, n, t = key.rsplit("-", 2)
        return make_code(family, int(n), int(t))
    except ValueError as exc:
        raise ValueError(f"bad code key {key!r}: {exc}") from exc


def matrix_to_hex(rows: Sequence[int], n: int) -> list[str]:
    return [_bits.to_hex(r, n) for r in rows]


def matrix_from_hex(lines: Sequence[str], n: int) -> tuple[int, ...]:
    return tuple(_bits.from_hex(line, n) for line in lines)

