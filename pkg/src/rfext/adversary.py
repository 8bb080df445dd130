"""Adversaries for the robustness game.

Three kinds:

* the seed-shift forger against the baseline: i' = i + i/x, and the tag is
  corrected by an estimate of [i*a/x]_1^v assembled from bits the view
  already reveals, with the remaining positions guessed;
* the same forger pointed at the new construction (where it should not help);
* an exhaustive optimal forger for tiny parameters.

The bit mapping behind the forger is derived from ``div_by_x`` applied to
each basis vector, so it follows whatever basis the field uses.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import NormalDist
from typing import Optional, Sequence, Union

import numpy as np

from . import bits as _bits
from ._cost import InstanceTooLarge, check_cost
from .extractor import ExtractedKey, ExtractorParams, HelperString, generate, reproduce
from .fuzzy import FuzzyHelper, FuzzyParams, fuzzy_gen, fuzzy_rep
from .rng import BitSource

__all__ = [
    "AttackNotApplicable",
    "AttackPlan",
    "AttackReport",
    "ExhaustiveAttackResult",
    "FlatDistribution",
    "InstanceTooLarge",
    "Transcript",
    "build_attack_plan",
    "dkrs_attack_forge",
    "exhaustive_attack_rate",
    "fuzzy_probe_experiment",
    "optimal_forgery_probability",
    "run_attack_experiment",
    "transplant_forge",
    "wilson_interval",
]


class AttackNotApplicable(ValueError):
    pass


# --- distributions ---


@dataclass(frozen=True)
class FlatDistribution:
    """Uniform over a support of size 2^m.

    The support is either every n-bit string whose ``zero_mask`` bits are
    clear, or an explicit list.
    """

    n: int
    zero_mask: int = 0
    members: Optional[tuple[int, ...]] = field(default=None, repr=False)
    label: str = "uniform"

    def __post_init__(self) -> None:
        _bits.check_length(self.zero_mask, self.n, "zero mask")
        if self.members is not None:
            size = len(self.members)
            if size == 0 or size & (size - 1):
                raise ValueError("explicit support size must be a power of two")
            if len(set(self.members)) != size:
                raise ValueError("explicit support has repeated members")
            for w in self.members:
                _bits.check_length(w, self.n, "support member")

    @classmethod
    def uniform(cls, n: int) -> "FlatDistribution":
        return cls(n)

    @classmethod
    def zero_positions(cls, n: int, positions: Sequence[int], label: str = "zero-bits") -> "FlatDistribution":
        mask = 0
        for p in positions:
            if not 1 <= p <= n:
                raise ValueError(f"position {p} outside 1..{n}")
            mask |= 1 << (n - p)
        return cls(n, mask, None, label)

    @classmethod
    def zero_top_of_b(cls, params: ExtractorParams, m: int) -> "FlatDistribution":
        """Top n - m bits of b are zero, everything else uniform."""
        n = params.n
        b_len = params.v if params.variant.is_dkrs else n // 2
        if not 0 <= n - m <= b_len:
            raise ValueError(f"n - m = {n - m} does not fit in b ({b_len} bits)")
        start = n - b_len + 1
        return cls.zero_positions(n, range(start, start + n - m), "zero-top-of-b")

    @classmethod
    def random_support(cls, n: int, m: int, seed: int) -> "FlatDistribution":
        if not 0 <= m <= n:
            raise ValueError("need 0 <= m <= n")
        picked = random.Random(seed).sample(range(1 << n), 1 << m)
        return cls(n, 0, tuple(picked), f"random-support-{seed}")

    @property
    def size(self) -> int:
        if self.members is not None:
            return len(self.members)
        return 1 << (self.n - _bits.weight(self.zero_mask))

    @property
    def m(self) -> int:
        return self.size.bit_length() - 1

    @property
    def bits_needed(self) -> int:
        return self.m if self.members is not None else self.n

    def sample(self, r: int) -> int:
        """Map ``bits_needed`` uniform bits to a uniform member."""
        if self.members is not None:
            return self.members[r]
        return r & ~self.zero_mask & _bits.mask(self.n)

    def contains(self, w: int) -> bool:
        if self.members is not None:
            return w in set(self.members)
        return 0 <= w < (1 << self.n) and not w & self.zero_mask

    def support_array(self) -> np.ndarray:
        if self.members is not None:
            return np.array(self.members, dtype=np.int64)
        free = np.arange(1 << self.n, dtype=np.int64)
        return free[(free & self.zero_mask) == 0]

    def support(self) -> list[int]:
        return self.support_array().tolist()


@dataclass(frozen=True)
class Transcript:
    i: int
    sigma: int
    R: int
    i_prime: int
    sigma_prime: int
    s: Optional[int] = None
    s_prime: Optional[int] = None

    def is_forgery(self) -> bool:
        return (self.i, self.sigma, self.s) != (self.i_prime, self.sigma_prime, self.s_prime)


# --- the seed-shift forger ---

Source = tuple[str, int]  # ("zero"|"sigma"|"R"|"guess", index)


@dataclass(frozen=True)
class AttackPlan:
    params: ExtractorParams
    m: int
    sources: tuple[Source, ...]
    guesses: int
    x_inv: int

    @property
    def delta(self) -> Fraction:
        """Success probability given that the constant coefficient of i*a is 0."""
        return Fraction(1, 1 << self.guesses)

    def tau(self, sigma: int, key: int, guess: int) -> int:
        v, ell = self.params.v, self.params.ell
        out = 0
        for kind, j in self.sources:
            if kind == "sigma":
                b = (sigma >> (v - j)) & 1
            elif kind == "R":
                b = (key >> (ell - j)) & 1
            elif kind == "guess":
                b = (guess >> (self.guesses - 1 - j)) & 1
            else:
                b = 0
            out = (out << 1) | b
        return out

    def tau_array(self, sigma: np.ndarray, key: np.ndarray, guess: int) -> np.ndarray:
        v, ell = self.params.v, self.params.ell
        out = np.zeros_like(sigma)
        for kind, j in self.sources:
            if kind == "sigma":
                b = (sigma >> (v - j)) & 1
            elif kind == "R":
                b = (key >> (ell - j)) & 1
            elif kind == "guess":
                b = (guess >> (self.guesses - 1 - j)) & 1
            else:
                b = 0
            out = (out << 1) | b
        return out

    def shift_seed(self, i: int) -> int:
        return i ^ self.params.field.mul_raw(i, self.x_inv)

    def forge(self, helper: HelperString, key: ExtractedKey, guess: int) -> HelperString:
        _bits.check_length(guess, self.guesses, "guess")
        field_ = self.params.field
        i_prime = field_.element(self.shift_seed(helper.i.bits))
        return HelperString(i_prime, helper.sigma ^ self.tau(helper.sigma, key.bits, guess), helper.v)


def _div_by_x_permutation(params: ExtractorParams) -> dict[int, int]:
    """target position p -> source position q with [z/x]_p = z_q whenever z has no constant term."""
    F = params.field
    K = F.degree
    x_inv = F.inv_raw(F.x.bits)
    pre: dict[int, int] = {}
    for q in range(1, K + 1):
        image = F.mul_raw(1 << (K - q), x_inv)
        if _bits.weight(image) == 1:
            pre[K - image.bit_length() + 1] = q
    return pre


def build_attack_plan(params: ExtractorParams, m: Optional[int] = None) -> AttackPlan:
    """Work out which tag-correction bits the view determines and which must be guessed.

    Against the baseline the view reveals z = i*a at positions 1..n-m (via
    sigma, since those bits of b are zero) and v+1..v+ell (via R).  Against
    the new construction only positions 1..n-m of y = i*a + b coincide
    with z.
    """
    m = params.m if m is None else m
    if m is None:
        raise ValueError("the forger needs the min-entropy m of the targeted distribution")
    m = int(m)
    n, v, ell = params.n, params.v, params.ell
    gap = n - m
    if not 0 <= gap <= v:
        raise AttackNotApplicable(f"n - m = {gap} must lie in [0, v = {v}]")
    if params.variant.is_dkrs and v < ell + gap:
        raise AttackNotApplicable(f"v = {v} < ell + (n - m) = {ell + gap}")
    known: dict[int, Source] = {q: ("sigma", q) for q in range(1, gap + 1)}
    if params.variant.is_dkrs:
        known.update({q: ("R", q - v) for q in range(v + 1, v + ell + 1)})
    pre = _div_by_x_permutation(params)
    sources: list[Source] = []
    guesses = 0
    for p in range(1, v + 1):
        q = pre.get(p)
        if q is None:
            sources.append(("zero", 0))
        elif q in known:
            sources.append(known[q])
        else:
            sources.append(("guess", guesses))
            guesses += 1
    F = params.field
    return AttackPlan(params, m, tuple(sources), guesses, F.inv_raw(F.x.bits))


_GuessInput = Union[int, BitSource, None]


def _guess_value(plan: AttackPlan, guess: _GuessInput) -> int:
    if guess is None:
        return BitSource.fresh(plan.guesses).take(plan.guesses)
    if isinstance(guess, BitSource):
        return guess.take(plan.guesses)
    return guess


def dkrs_attack_forge(
    P: HelperString, R: ExtractedKey, params: ExtractorParams, guess: _GuessInput = None, m: Optional[int] = None
) -> HelperString:
    if not params.variant.is_dkrs:
        raise AttackNotApplicable("this forger targets the baseline construction")
    plan = build_attack_plan(params, m)
    return plan.forge(P, R, _guess_value(plan, guess))


def transplant_forge(
    P: HelperString, R: ExtractedKey, params: ExtractorParams, guess: _GuessInput = None, m: Optional[int] = None
) -> HelperString:
    """The seed-shift forger aimed at the new construction."""
    if params.variant.is_dkrs:
        raise ValueError("use dkrs_attack_forge for the baseline")
    plan = build_attack_plan(params, m)
    return plan.forge(P, R, _guess_value(plan, guess))


# --- experiments ---

_Z99 = NormalDist().inv_cdf(0.995)


def wilson_interval(successes: int, trials: int, z: float = _Z99) -> tuple[float, float]:
    if trials < 1:
        raise ValueError("need at least one trial")
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass(frozen=True)
class AttackReport:
    label: str
    params: dict[str, object]
    distribution: str
    trials: int
    successes: int
    zero_seed_trials: int
    guesses: int
    bound_kind: str  # "lower": rate should reach target; "upper": rate should stay below it
    target: Fraction
    threshold: float

    @property
    def rate(self) -> float:
        return self.successes / self.trials

    @property
    def ci(self) -> tuple[float, float]:
        return wilson_interval(self.successes, self.trials)

    @property
    def passed(self) -> bool:
        if self.bound_kind == "lower":
            return self.rate >= self.threshold
        return self.rate <= self.threshold

    def fields(self) -> dict[str, object]:
        lo, hi = self.ci
        out: dict[str, object] = {"attack": self.label}
        out.update(self.params)
        out.update(
            {
                "distribution": self.distribution,
                "trials": self.trials,
                "successes": self.successes,
                "zero_seed_trials": self.zero_seed_trials,
                "guessed_bits": self.guesses,
                "rate": f"{self.rate:.6f}",
                "ci99_low": f"{lo:.6f}",
                "ci99_high": f"{hi:.6f}",
                "bound": self.bound_kind,
                "target": str(self.target),
                "threshold": f"{self.threshold:.6f}",
                "result": "PASS" if self.passed else "FAIL",
            }
        )
        return out

    def to_text(self) -> str:
        return "\n".join(f"{k}={v}" for k, v in self.fields().items())

    def csv_header(self) -> str:
        return ",".join(self.fields())

    def csv_row(self) -> str:
        return ",".join(str(v) for v in self.fields().values())


def run_attack_experiment(
    params: ExtractorParams, distribution: FlatDistribution, trials: int, seed: int
) -> AttackReport:
    """Monte Carlo of the seed-shift forger; trial j uses randomness (seed, j).

    A trial whose seed is i = 0 yields P' = P or a rejected forgery and is
    counted as a failure; such trials are reported separately.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if distribution.n != params.n:
        raise ValueError("distribution length differs from n")
    plan = build_attack_plan(params, distribution.m)
    F = params.field
    K = F.degree
    width = distribution.bits_needed + K + plan.guesses
    successes = zero_seed = 0
    for j in range(trials):
        src = BitSource.seeded(seed, j, width)
        w = distribution.sample(src.take(distribution.bits_needed))
        i = F.element(src.take(K))
        key, P = generate(w, params, i)
        forged = plan.forge(P, key, src.take(plan.guesses))
        if i.bits == 0:
            zero_seed += 1
        if forged == P:
            continue
        if reproduce(w, forged, params) is not None:
            successes += 1

    d = params.log2_inv_delta
    if params.variant.is_dkrs:
        delta = plan.delta if d is None else Fraction(1, 2) ** int(d)
        target = delta / 2
        p = float(target)
        threshold = p - 3 * math.sqrt(p * (1 - p) / trials)
        kind = "lower"
    else:
        target = Fraction(1, 2) ** int(d) if d is not None else params.robustness_bound()
        if target is None:
            raise ValueError("new-construction experiment needs log2_inv_delta or m in params")
        threshold = float(target)
        kind = "upper"
    report_params = params.report()
    report_params["basis"] = params.basis.tag
    return AttackReport(
        "seed-shift" if params.variant.is_dkrs else "seed-shift-transplant",
        report_params,
        distribution.label,
        trials,
        successes,
        zero_seed,
        plan.guesses,
        kind,
        target,
        threshold,
    )


@dataclass(frozen=True)
class ExhaustiveAttackResult:
    total: int  # (w, i != 0, guess) triples
    successes: int
    event: int  # constant coefficient of i*a is 0
    successes_in_event: int
    zero_seed_successes: int

    @property
    def rate(self) -> Fraction:
        return Fraction(self.successes, self.total)

    @property
    def success_iff_event(self) -> bool:
        return self.successes == self.event == self.successes_in_event


def _layout(params: ExtractorParams, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    split = params.v if params.variant.is_dkrs else params.n // 2
    return w >> split, w & _bits.mask(split)


def _tag_key_arrays(params: ExtractorParams, z: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    K, v = params.field_degree, params.v
    if params.variant.is_dkrs:
        return (z >> (K - v)) ^ b, (z >> params.beta) & _bits.mask(params.ell)
    y = z ^ b
    return y >> (K - v), (y >> params.beta) & _bits.mask(params.ell)


def exhaustive_attack_rate(
    params: ExtractorParams, distribution: FlatDistribution, limit: int = 1 << 26
) -> ExhaustiveAttackResult:
    """Run the forger over every (w, i != 0, guess); also tally the i = 0 successes."""
    plan = build_attack_plan(params, distribution.m)
    F = params.field
    q = F.order
    check_cost(q * distribution.size * (1 << plan.guesses), limit, "exhaustive attack")
    T = F.mul_table().astype(np.int64)
    const0 = np.array([F.to_standard(val) & 1 == 0 for val in range(q)])
    a, b = _layout(params, distribution.support_array())
    total = succ = event = both = zero_succ = 0
    for i in range(q):
        z = T[i, a]
        sigma, key = _tag_key_arrays(params, z, b)
        ip = plan.shift_seed(i)
        sigma_star, _ = _tag_key_arrays(params, T[ip, a], b)
        ev = const0[z]
        for g in range(1 << plan.guesses):
            tau = plan.tau_array(sigma, key, g)
            ok = sigma_star == (sigma ^ tau)
            if ip == i:
                ok &= tau != 0
            if i == 0:
                zero_succ += int(ok.sum())
                continue
            total += len(a)
            succ += int(ok.sum())
            event += int(ev.sum())
            both += int((ok & ev).sum())
    return ExhaustiveAttackResult(total, succ, event, both, zero_succ)


def optimal_forgery_probability(
    params: ExtractorParams, distribution: FlatDistribution, limit: int = 1 << 28
) -> Fraction:
    """Exact success probability of the best deterministic forger.

    For each view (i, sigma, R) the forger picks the (i' != i, sigma') that
    the largest number of consistent w accept.
    """
    F = params.field
    q = F.order
    S = distribution.size
    check_cost(q * q * S, limit, "optimal forger")
    T = F.mul_table().astype(np.int64)
    a, b = _layout(params, distribution.support_array())
    v, ell = params.v, params.ell
    tags_all, _ = _tag_key_arrays(params, T[:, a], b[None, :])  # (q, S): sigma' for every i'
    n_views = 1 << (v + ell)
    cells = n_views << v
    offsets = (np.arange(q, dtype=np.int64) * cells)[:, None]
    best_total = 0
    for i in range(q):
        sigma, key = _tag_key_arrays(params, T[i, a], b)
        view = (sigma << ell) | key
        idx = offsets + ((view << v)[None, :] | tags_all)
        counts = np.bincount(idx.ravel(), minlength=q * cells).reshape(q, n_views, 1 << v)
        per_seed = counts.max(axis=2)
        per_seed[i] = 0
        best_total += int(per_seed.max(axis=0).sum())
    return Fraction(best_total, q * S)


# --- fuzzy probes ---

FUZZY_STRATEGIES = ("flip-sketch", "shift-seed", "flip-sketch-guess-tag")


def fuzzy_probe_experiment(
    params: FuzzyParams, trials: int, seed: int, strategy: str = "flip-sketch"
) -> tuple[int, int]:
    """(successes, trials) for a simple modification of P = (s, i, sigma).

    The adversary keeps w' = w, so the only source of acceptance is the
    modified helper itself.
    """
    if strategy not in FUZZY_STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {FUZZY_STRATEGIES}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    F = params.field
    n, k, v = params.n, params.k, params.v
    pos_bits = max(1, (k - 1).bit_length())
    width = n + F.degree + pos_bits + v + 1
    successes = 0
    for j in range(trials):
        src = BitSource.seeded(seed, j, width)
        w = src.take(n)
        i = F.element(src.take(F.degree))
        _, P = fuzzy_gen(w, params, i)
        flip = 1 << (src.take(pos_bits) % k)
        guess = src.take(v)
        if strategy == "flip-sketch":
            forged = FuzzyHelper(P.s ^ flip, k, P.i, P.sigma, v)
        elif strategy == "shift-seed":
            forged = FuzzyHelper(P.s, k, F.element(P.i.bits ^ 1), P.sigma, v)
        else:
            forged = FuzzyHelper(P.s ^ flip, k, P.i, guess, v)
        if forged != P and fuzzy_rep(w, forged, params) is not None:
            successes += 1
    return successes, trials
