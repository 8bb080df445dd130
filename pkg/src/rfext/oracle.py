"""Exact reference computations on small instances.

Everything here works with integers and ``Fraction`` until a final
logarithm, and every exhaustive routine refuses work beyond a stated limit.
"""

from __future__ import annotations

import math
import random
from collections import defaultdict
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from ._cost import InstanceTooLarge, check_cost
from .adversary import FlatDistribution, Transcript, _layout, _tag_key_arrays
from .extractor import ExtractorParams
from .fuzzy import FuzzyHelper, FuzzyParams, _tag_and_key, fuzzy_rep
from .gf2k import FieldSpec
from .linearcode import LinearSketchSpec, ss, ss_perp

__all__ = [
    "InstanceTooLarge",
    "JointDistribution",
    "SpaceMismatch",
    "statistical_distance",
    "min_entropy",
    "guess_probability",
    "avg_guess_probability",
    "avg_cond_min_entropy",
    "check_sd_switch",
    "check_min_entropy_chain",
    "extractor_output_distance",
    "fuzzy_output_distance",
    "sketch_entropy_loss",
    "bad_set_count",
    "bad_set_histogram",
    "fuzzy_bad_set_count",
    "pairwise_collision_max",
    "mac_attainment_max",
    "mac_attainment_sampled",
    "leading_coefficient_check",
    "sd_within_pow2_half",
]


class SpaceMismatch(ValueError):
    pass


Outcome = tuple


class JointDistribution:
    """Finite distribution over tuples, with exact rational probabilities."""

    __slots__ = ("_p", "arity")

    def __init__(self, table: Mapping[Outcome, Fraction]):
        if not table:
            raise ValueError("empty distribution")
        probs: dict[Outcome, Fraction] = {}
        arity = None
        for outcome, p in table.items():
            outcome = outcome if isinstance(outcome, tuple) else (outcome,)
            if arity is None:
                arity = len(outcome)
            elif len(outcome) != arity:
                raise ValueError("outcomes must all have the same number of components")
            p = Fraction(p)
            if p < 0:
                raise ValueError("negative probability")
            if p:
                probs[outcome] = probs.get(outcome, Fraction(0)) + p
        if sum(probs.values()) != 1:
            raise ValueError("probabilities must sum to exactly 1")
        self._p = probs
        self.arity = arity

    @classmethod
    def from_counts(cls, counts: Mapping[Outcome, int]) -> "JointDistribution":
        total = sum(counts.values())
        return cls({o: Fraction(c, total) for o, c in counts.items()})

    @classmethod
    def uniform(cls, outcomes: Iterable[Hashable]) -> "JointDistribution":
        outcomes = list(outcomes)
        return cls({o if isinstance(o, tuple) else (o,): Fraction(1, len(outcomes)) for o in outcomes})

    @classmethod
    def point(cls, outcome: Hashable) -> "JointDistribution":
        return cls({outcome if isinstance(outcome, tuple) else (outcome,): Fraction(1)})

    def items(self):
        return self._p.items()

    def prob(self, outcome: Outcome) -> Fraction:
        return self._p.get(outcome, Fraction(0))

    def support(self) -> list[Outcome]:
        return list(self._p)

    def marginal(self, *components: int) -> "JointDistribution":
        out: dict[Outcome, Fraction] = defaultdict(Fraction)
        for o, p in self._p.items():
            out[tuple(o[c] for c in components)] += p
        return JointDistribution(out)

    def product(self, other: "JointDistribution") -> "JointDistribution":
        return JointDistribution({a + b: p * q for a, p in self.items() for b, q in other.items()})

    def __mul__(self, other: "JointDistribution") -> "JointDistribution":
        return self.product(other)

    def __len__(self) -> int:
        return len(self._p)


def statistical_distance(d1: JointDistribution, d2: JointDistribution) -> Fraction:
    if d1.arity != d2.arity:
        raise SpaceMismatch(f"outcome arity {d1.arity} vs {d2.arity}")
    keys = set(d1.support()) | set(d2.support())
    return sum((abs(d1.prob(o) - d2.prob(o)) for o in keys), Fraction(0)) / 2


def guess_probability(d: JointDistribution) -> Fraction:
    return max(p for _, p in d.items())


def min_entropy(d: JointDistribution) -> float:
    return -math.log2(guess_probability(d))


def avg_guess_probability(joint: JointDistribution, target: Sequence[int] = (0,)) -> Fraction:
    """E_e max_a Pr[A = a | E = e] = sum_e max_a Pr[A = a, E = e].

    ``target`` lists the components forming A; the rest form E.  Slices with
    Pr[E = e] = 0 never appear, since only outcomes with positive mass are stored.
    """
    target = tuple(target)
    rest = [c for c in range(joint.arity) if c not in target]
    best: dict[Outcome, Fraction] = {}
    for o, p in joint.items():
        e = tuple(o[c] for c in rest)
        if p > best.get(e, Fraction(0)):
            best[e] = p
    return sum(best.values(), Fraction(0))


def avg_cond_min_entropy(joint: JointDistribution, target: Sequence[int] = (0,)) -> float:
    return -math.log2(avg_guess_probability(joint, target))


def check_sd_switch(
    joint: JointDistribution, C: JointDistribution, D: JointDistribution
) -> tuple[Fraction, Fraction, bool]:
    """(alpha, SD((A,B), C x B), holds) for alpha = SD((A,B), C x D).

    A is the first ``C.arity`` components of ``joint`` and B the rest.
    """
    if C.arity + D.arity != joint.arity:
        raise SpaceMismatch("C and D do not split the joint outcome")
    alpha = statistical_distance(joint, C * D)
    B = joint.marginal(*range(C.arity, joint.arity))
    lhs = statistical_distance(joint, C * B)
    return alpha, lhs, lhs <= 2 * alpha


def check_min_entropy_chain(joint: JointDistribution, target: Sequence[int] = (0,)) -> tuple[Fraction, Fraction, bool]:
    """Exact form of H~(A|B) >= H((A,B)) - log|range(B)|.

    Compares the guessing probabilities: sum_b max_a Pr[a,b] <= |range(B)| * max Pr[a,b].
    """
    target = tuple(target)
    rest = [c for c in range(joint.arity) if c not in target]
    range_b = len(joint.marginal(*rest)) if rest else 1
    lhs = avg_guess_probability(joint, target)
    rhs = range_b * guess_probability(joint)
    return lhs, rhs, lhs <= rhs


def sd_within_pow2_half(sd: Fraction, exponent: Fraction) -> bool:
    """Exact test of sd <= 2^(exponent/2) for integer ``exponent``."""
    exponent = Fraction(exponent)
    if exponent.denominator != 1:
        raise ValueError("exponent must be an integer")
    return sd * sd <= Fraction(2) ** int(exponent)


# --- extractor output ---


def extractor_output_distance(
    params: ExtractorParams, W: FlatDistribution, limit: int = 1 << 26
) -> Fraction:
    """Exact SD((R, P), U_ell x P) with P = (i, sigma), i uniform and w from W."""
    F = params.field
    q = F.order
    check_cost(q * W.size, limit, "extractor output distance")
    T = F.mul_table().astype(np.int64)
    a, b = _layout(params, W.support_array())
    v, ell = params.v, params.ell
    cells = 1 << (v + ell)
    abs_sum = 0
    for i in range(q):
        sigma, key = _tag_key_arrays(params, T[i, a], b)
        joint = np.bincount((sigma << ell) | key, minlength=cells).reshape(1 << v, 1 << ell)
        marg = joint.sum(axis=1, keepdims=True)
        abs_sum += int(np.abs((joint << ell) - marg).sum())
    # Pr[R, P] = N / (q |W|) and Pr[P] 2^-ell = N_P / (q |W| 2^ell)
    return Fraction(abs_sum, 2 * q * W.size << ell)


def fuzzy_output_distance(params: FuzzyParams, W: FlatDistribution, limit: int = 1 << 22) -> Fraction:
    """Exact SD((R, P), U_ell x P) with P = (s, i, sigma)."""
    F = params.field
    check_cost(F.order * W.size, limit, "fuzzy output distance")
    code = params.code
    counts: dict[tuple[int, int, int], list[int]] = defaultdict(lambda: [0] * (1 << params.ell))
    for w in W.support():
        s, c = ss(code, w), ss_perp(code, w)
        for i in range(F.order):
            sigma, key = _tag_and_key(s, i, c, params)
            counts[(s, i, sigma)][key] += 1
    ell = params.ell
    abs_sum = 0
    for row in counts.values():
        total = sum(row)
        abs_sum += sum(abs((x << ell) - total) for x in row)
    return Fraction(abs_sum, 2 * F.order * W.size << ell)


def sketch_entropy_loss(code: LinearSketchSpec, W: FlatDistribution) -> tuple[float, float]:
    """(H~(W | SS(W)), H(W) - k), exactly tabulated."""
    members = W.support()
    joint = JointDistribution({(w, ss(code, w)): Fraction(1, len(members)) for w in members})
    return avg_cond_min_entropy(joint, (0,)), W.m - code.k


# --- Bad sets ---


def bad_set_count(params: ExtractorParams, tr: Transcript, limit: int = 1 << 16) -> int:
    """Number of w consistent with (i, sigma, R) that also verify (i', sigma')."""
    check_cost(1 << params.n, limit, "bad-set count")
    F = params.field
    n = params.n
    w = np.arange(1 << n, dtype=np.int64)
    a, b = _layout(params, w)
    T = F.mul_table().astype(np.int64) if F.degree <= 12 else None
    if T is None:
        raise InstanceTooLarge("bad-set count needs a field of degree <= 12")
    sigma, key = _tag_key_arrays(params, T[tr.i, a], b)
    sigma2, _ = _tag_key_arrays(params, T[tr.i_prime, a], b)
    return int(((sigma == tr.sigma) & (key == tr.R) & (sigma2 == tr.sigma_prime)).sum())


def bad_set_histogram(params: ExtractorParams, limit: int = 1 << 24) -> dict[int, int]:
    """count -> number of transcripts (i' != i) with that many bad w; all transcripts included."""
    F = params.field
    q = F.order
    v, ell = params.v, params.ell
    n_tr = q * (q - 1) << (2 * v + ell)
    check_cost(q * q << params.n, limit, "bad-set sweep")
    T = F.mul_table().astype(np.int64)
    a, b = _layout(params, np.arange(1 << params.n, dtype=np.int64))
    hist: dict[int, int] = defaultdict(int)
    cells = 1 << (2 * v + ell)
    for i in range(q):
        sigma, key = _tag_key_arrays(params, T[i, a], b)
        base = (((sigma << ell) | key) << v)
        for ip in range(q):
            if ip == i:
                continue
            sigma2, _ = _tag_key_arrays(params, T[ip, a], b)
            counts = np.bincount(base | sigma2, minlength=cells)
            for c, num in zip(*np.unique(counts, return_counts=True)):
                hist[int(c)] += int(num)
    assert sum(hist.values()) == n_tr
    return dict(hist)


def fuzzy_bad_set_count(
    params: FuzzyParams, tr: Transcript, delta: int, limit: int = 1 << 16
) -> int:
    """w with SS(w) = s, Gen producing (i, sigma, R), and Rep(w + delta, P') accepting."""
    check_cost(1 << params.n, limit, "fuzzy bad-set count")
    if tr.s is None or tr.s_prime is None:
        raise ValueError("fuzzy transcripts carry s and s'")
    F = params.field
    forged = FuzzyHelper(tr.s_prime, params.k, F.element(tr.i_prime), tr.sigma_prime, params.v)
    count = 0
    for w in range(1 << params.n):
        if ss(params.code, w) != tr.s:
            continue
        if _tag_and_key(tr.s, tr.i, ss_perp(params.code, w), params) != (tr.sigma, tr.R):
            continue
        if fuzzy_rep(w ^ delta, forged, params) is not None:
            count += 1
    return count


# --- hashing and MAC ---


def pairwise_collision_max(F: FieldSpec) -> Fraction:
    """max over (a,b) != (a',b') of Pr_i[i*a + b = i*a' + b'].

    The event depends only on the differences (da, db), so those are enumerated.
    """
    if F.degree > 8:
        raise InstanceTooLarge("pairwise collision check limited to degree <= 8")
    T = F.mul_table().astype(np.int64)  # T[i, da]
    q = F.order
    best = 0
    for da in range(q):
        hits = np.bincount(T[:, da], minlength=q)  # hits[db] = #{i : i*da = db}
        if da == 0:
            hits[0] = 0  # (da, db) = (0, 0) is the same input
        best = max(best, int(hits.max()))
    return Fraction(best, q)


def _power_columns(F: FieldSpec, top: int) -> np.ndarray:
    """P[j, x] = x^j for j = 0..top."""
    q = F.order
    T = F.mul_table().astype(np.int64)
    P = np.zeros((top + 1, q), dtype=np.int64)
    P[0] = F.one.bits
    for j in range(1, top + 1):
        P[j] = T[P[j - 1], np.arange(q)]
    return P


def _binomial_shift(F: FieldSpec, degree: int, delta: int) -> list[int]:
    """Coefficients (index = power) of (x + delta)^degree over GF(2)-characteristic."""
    coeffs = []
    for j in range(degree + 1):
        if math.comb(degree, j) & 1:
            c = F.one.bits
            for _ in range(degree - j):
                c = F.mul_raw(c, delta)
            coeffs.append(c)
        else:
            coeffs.append(0)
    return coeffs


def _max_attainment(values: np.ndarray, q: int) -> int:
    rows = values.shape[0]
    idx = (np.arange(rows, dtype=np.int64)[:, None] * q + values).ravel()
    return int(np.bincount(idx, minlength=rows * q).max())


def mac_attainment_max(F: FieldSpec, L: int, limit: int = 1 << 31) -> dict[str, int]:
    """Exhaustive max over all forgeries of #{x : g(x) = c} for g = f_{s,i}(x) - f_{s',i'}(x + da).

    Attainment counts ignore the constant term of g, and modulo constants
    the set of g is span{x, ..., x^(L+1)} minus 0 when da = 0 and
    A_da + span{x, ..., x^(L+1)} when da != 0, where
    A_da = x^(L+3) - (x + da)^(L+3).  Both sets are enumerated in full.
    Returns the maxima for the two cases.
    """
    q = F.order
    span_size = q ** (L + 1)
    check_cost(q * span_size * q, limit, f"MAC attainment over GF(2^{F.degree}), L={L}")
    T = F.mul_table().astype(np.int64)
    P = _power_columns(F, L + 3)
    # span{x..x^(L+1)} evaluated at every x: shape (q^(L+1), q)
    span = np.zeros((1, q), dtype=np.int64)
    for j in range(1, L + 2):
        span = (span[:, None, :] ^ T[:, P[j]][None, :, :]).reshape(-1, q)
    out = {"delta_zero": _max_attainment(span[1:], q)}
    worst = 0
    for da in range(1, q):
        shifted = _binomial_shift(F, L + 3, da)
        A = P[L + 3].copy()
        for j, c in enumerate(shifted):
            if c:
                A ^= T[c, P[j]]
        worst = max(worst, _max_attainment(span ^ A[None, :], q))
    out["delta_nonzero"] = worst
    return out


def mac_attainment_sampled(F: FieldSpec, L: int, samples: int, seed: int) -> int:
    """Max attainment over random literal forgeries (s, i, s', i', da), evaluated term by term."""
    from .fuzzy import mac_poly_eval

    rng = random.Random(seed)
    q = F.order
    xs = list(F.elements())
    worst = 0
    for _ in range(samples):
        while True:
            s = [F.element(rng.randrange(q)) for _ in range(L)]
            i = F.element(rng.randrange(q))
            s2 = [F.element(rng.randrange(q)) for _ in range(L)]
            i2 = F.element(rng.randrange(q))
            if (tuple(s), i) != (tuple(s2), i2):
                break
        da = F.element(rng.randrange(q))
        counts: dict[int, int] = defaultdict(int)
        for x in xs:
            counts[(mac_poly_eval(s, i, x) + mac_poly_eval(s2, i2, x + da)).bits] += 1
        worst = max(worst, max(counts.values()))
    return worst


def leading_coefficient_check(F: FieldSpec, L: int) -> bool:
    """For every da != 0 the x^(L+2) coefficient of x^(L+3) - (x+da)^(L+3) equals da."""
    for da in range(1, F.order):
        coeffs = _binomial_shift(F, L + 3, da)
        if coeffs[L + 2] != da or coeffs[L + 3] != F.one.bits:
            return False
    return True


def _affine_reps(F: FieldSpec, lam: int, mu: int) -> list[int]:
    """Coset representatives of GF(q) modulo the image of t -> lam*t^2 + mu*t."""
    q = F.order
    image = {F.mul_raw(lam, F.mul_raw(t, t)) ^ F.mul_raw(mu, t) for t in range(q)}
    reps, covered = [], set()
    for c in range(q):
        if c not in covered:
            reps.append(c)
            covered.update(c ^ y for y in image)
    return reps


def _monic_heads(F: FieldSpec, d: int) -> list[tuple[int, int]]:
    """Canonical (c_{d-1}, c_{d-2}) pairs for monic degree-d polynomials.

    Fiber sizes are unchanged by g -> g(lam*x + t)/lam^d.  For odd d the
    translation clears c_{d-1}.  For even d scaling brings c_{d-1} into {0, 1}
    and translation then moves c_{d-2} by C(d,2)*t^2 + c_{d-1}*t.
    """
    one = F.one.bits
    if d % 2:
        return [(0, c) for c in range(F.order)] if d >= 3 else [(0, 0)]
    lam = one if math.comb(d, 2) % 2 else 0
    heads = []
    for top in (0, one):
        for c in _affine_reps(F, lam, top) if d >= 3 else [0]:
            heads.append((top, c))
    return heads


def mac_attainment_reduced(F: FieldSpec, L: int, limit: int = 1 << 30) -> dict[str, int]:
    """Same maxima as :func:`mac_attainment_max`, enumerating one polynomial per affine class.

    Forgeries with da = 0 give every nonzero g of degree 1..L+1; with da != 0
    they give every g of degree exactly L+2 (up to a constant).  Dividing by
    the leading coefficient and substituting x -> lam*x + t preserve fiber
    sizes, so only the canonical monic polynomials from :func:`_monic_heads`
    are evaluated.  Coefficients of x^1..x^(d-3) are enumerated in full.
    """
    q = F.order
    T = F.mul_table().astype(np.int64)
    P = _power_columns(F, L + 2)
    cost = sum(len(_monic_heads(F, d)) * q ** max(d - 3, 0) * q for d in range(1, L + 3))
    check_cost(cost, limit, f"reduced MAC attainment over GF(2^{F.degree}), L={L}")

    def worst_for_degree(d: int) -> int:
        # free part: x^1..x^(d-4) in full, x^(d-3) looped to bound memory
        free = np.zeros((1, q), dtype=np.int64)
        for j in range(1, d - 3):
            free = (free[:, None, :] ^ T[:, P[j]][None, :, :]).reshape(-1, q)
        outer = [T[c, P[d - 3]] for c in range(q)] if d >= 4 else [np.zeros(q, dtype=np.int64)]
        best = 0
        for top, nxt in _monic_heads(F, d):
            head = P[d] ^ (T[top, P[d - 1]] if d >= 2 else 0) ^ (T[nxt, P[d - 2]] if d >= 3 else 0)
            for extra in outer:
                best = max(best, _max_attainment(free ^ (head ^ extra)[None, :], q))
        return best

    return {
        "delta_zero": max(worst_for_degree(d) for d in range(1, L + 2)),
        "delta_nonzero": worst_for_degree(L + 2),
    }
