"""Property suites behind ``rfext verify``; one PASS/FAIL line per check."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional, TextIO

from . import bits as _bits
from . import oracle
from .adversary import FlatDistribution, exhaustive_attack_rate, optimal_forgery_probability, run_attack_experiment
from .extractor import ExtractorParams, derive_params
from .fuzzy import fuzzy_gen, fuzzy_rep, make_fuzzy_params, offsets_from_delta
from .gf2k import Basis, FieldSpec, div_by_x
from .linearcode import DecodeFailure, make_code, srec, ss, ss_perp


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}" + (f" ({self.detail})" if self.detail else "")


CheckGen = Iterator[Check]


def random_joint(rng: random.Random, rows: int, cols: int) -> oracle.JointDistribution:
    while True:
        weights = {(a, b): rng.randrange(10) for a in range(rows) for b in range(cols)}
        if sum(weights.values()):
            return oracle.JointDistribution.from_counts(weights)


def random_marginal(rng: random.Random, size: int) -> oracle.JointDistribution:
    while True:
        weights = {(a,): rng.randrange(10) for a in range(size)}
        if sum(weights.values()):
            return oracle.JointDistribution.from_counts(weights)


def flat_family(n: int, m: int, seed: int = 7) -> list[FlatDistribution]:
    """Flat sources with 2^m members: zeros in b, zeros in a, and a random support."""
    half = n // 2
    out = [FlatDistribution.random_support(n, m, seed)]
    if n - m <= half:
        out.append(FlatDistribution.zero_positions(n, range(half + 1, half + 1 + n - m), "zero-top-of-b"))
        out.append(FlatDistribution.zero_positions(n, range(1, n - m + 1), "zero-top-of-a"))
    return out


# --- suites ---


def suite_field(quick: bool, n: Optional[int]) -> CheckGen:
    rng = random.Random(1)
    for F in (FieldSpec.of_degree(4), FieldSpec(8, 0x11B), FieldSpec(8, 0x11D), FieldSpec.of_degree(8, Basis.PARITY_SPLIT)):
        ok = True
        for _ in range(300 if quick else 3000):
            a, b, c = (F.element(rng.randrange(F.order)) for _ in range(3))
            ok &= (a * b) * c == a * (b * c) and a * (b + c) == a * b + a * c and a * b == b * a
            if a:
                ok &= a * a.inverse() == F.one
        yield Check(f"field-axioms GF(2^{F.degree}) mod {F.modulus:#x} {F.basis.tag}", ok)
    F = FieldSpec.of_degree(8, Basis.PARITY_SPLIT)
    h = F.degree // 2
    ok = True
    for z in F.elements():
        if F.to_standard(z.bits) & 1:
            continue
        q = div_by_x(z).bits
        ok &= _bits.substr(q, 8, h + 1, 8) == _bits.substr(z.bits, 8, 1, h)
        ok &= _bits.bit_at(q, 8, 1) == 0
    yield Check("half-swap GF(2^8) parity-split", ok)


def suite_code(quick: bool, n: Optional[int]) -> CheckGen:
    rng = random.Random(2)
    for family, length, t in (("hamming", 7, 1), ("bch", 15, 2), ("bch", 255, 8)):
        code = make_code(family, length, t)
        bad = 0
        for _ in range(100 if quick else 1000):
            w = rng.getrandbits(length)
            e = 0
            for j in rng.sample(range(length), rng.randint(0, t)):
                e |= 1 << j
            bad += srec(code, w ^ e, ss(code, w)) != w
        yield Check(f"sketch-recovery {code.key}", bad == 0, f"k={code.k}, failures={bad}")


def suite_params(quick: bool, n: Optional[int]) -> CheckGen:
    new = derive_params(1024, 768, 64, 0, "new")
    post = derive_params(1024, 768, 64, 0, "dkrs-post")
    yield Check("key-length new=192 dkrs-post=128 ratio 3/2", new.ell == 192 and post.ell == 128 and Fraction(new.ell, post.ell) == Fraction(3, 2))
    pre = derive_params(1024, 768, 32, 64, "dkrs-pre")
    imp = derive_params(1024, 768, 32, 64, "dkrs-improved-pre")
    yield Check("improved-pre gain = 2 log(1/eps) - log(1/delta)", imp.ell - pre.ell == 2 * 64 - 32, f"{pre.ell} -> {imp.ell}")
    bad = derive_params(64, 30, 8, 0, "new")
    yield Check("infeasible request reported", not bad, getattr(bad, "constraint", ""))


def suite_uniformity(quick: bool, n: Optional[int]) -> CheckGen:
    for size in ([n] if n else [8, 10, 12]):
        worst = Fraction(0)
        ok = True
        count = 0
        for m in range(size // 2 + 2, size + 1):
            for v in range(0, size // 2):
                params = ExtractorParams(size, v, size // 2 - v)
                for W in flat_family(size, m):
                    sd = oracle.extractor_output_distance(params, W)
                    ok &= oracle.sd_within_pow2_half(sd, size // 2 - m)
                    worst = max(worst, sd)
                    count += 1
        yield Check(f"SD((R,P), U x P) <= 2^((n/2-m)/2) at n={size}", ok, f"{count} instances, max SD {float(worst):.4f}")


def suite_robustness(quick: bool, n: Optional[int]) -> CheckGen:
    for size in ([n] if n else [8, 10]):
        ok = True
        count = 0
        for m in range(1, size + 1):
            for v in range(0, size // 2):
                params = ExtractorParams(size, v, size // 2 - v)
                dists = [FlatDistribution.random_support(size, m, 5)]
                if size - m <= size // 2:
                    dists.append(FlatDistribution.zero_positions(size, range(size // 2 + 1, size // 2 + 1 + size - m)))
                for W in dists:
                    opt = optimal_forgery_probability(params, W)
                    ok &= opt <= Fraction(2) ** (size - v - m)
                    count += 1
        yield Check(f"optimal forgery <= 2^(n-v-m) at n={size}", ok, f"{count} instances")
    size = n if n and n <= 10 else 8
    for v in range(1, size // 2):
        hist = oracle.bad_set_histogram(ExtractorParams(size, v, size // 2 - v))
        yield Check(f"|Bad_tr| = 2^(n/2-v) for every transcript, n={size} v={v}", set(hist) == {1 << (size // 2 - v)}, str(hist))


def suite_attack(quick: bool, n: Optional[int]) -> CheckGen:
    p = derive_params(12, 12, 0, 0, "dkrs-post", Basis.PARITY_SPLIT)
    res = exhaustive_attack_rate(p, FlatDistribution.zero_top_of_b(p, 12))
    yield Check("delta-free attack at n=12: rate 1/2, success iff constant coefficient 0", res.rate == Fraction(1, 2) and res.success_iff_event, str(res.rate))
    trials = 20_000 if quick else 100_000
    p = derive_params(20, 18, 2, 0, "dkrs-post", Basis.PARITY_SPLIT)
    r = run_attack_experiment(p, FlatDistribution.zero_top_of_b(p, 18), trials, 1)
    yield Check("seed-shift attack on dkrs-post reaches delta/2", r.passed, f"rate {r.rate:.4f} vs {r.threshold:.4f}")
    p = derive_params(20, 18, 2, 0, "new", Basis.PARITY_SPLIT)
    r = run_attack_experiment(p, FlatDistribution.zero_top_of_b(p, 18), trials, 1)
    yield Check("same attack on the new construction stays <= delta", r.passed, f"rate {r.rate:.4f} vs {r.threshold:.4f}")


def suite_mac(quick: bool, n: Optional[int]) -> CheckGen:
    cases = [(4, 2), (4, 4)] + ([] if quick else [(6, 2)])
    for k, L in cases:
        F = FieldSpec.of_degree(k)
        res = oracle.mac_attainment_max(F, L)
        yield Check(f"MAC attainment <= L+2 over GF(2^{k}), L={L}", max(res.values()) <= L + 2, str(res))
        yield Check(f"MAC leading coefficient = da over GF(2^{k}), L={L}", oracle.leading_coefficient_check(F, L))
    F = FieldSpec.of_degree(6)
    res = oracle.mac_attainment_reduced(F, 4)
    yield Check("MAC attainment <= L+2 over GF(2^6), L=4 (affine classes)", max(res.values()) <= 6, str(res))
    worst = oracle.mac_attainment_sampled(F, 4, 200 if quick else 2000, 3)
    yield Check("literal MAC forgeries over GF(2^6), L=4 (sampled)", worst <= 6, f"max {worst}")


def suite_sketch(quick: bool, n: Optional[int]) -> CheckGen:
    code = make_code("hamming", 7, 1)
    for W in (FlatDistribution.uniform(7), FlatDistribution.random_support(7, 5, 1), FlatDistribution.zero_positions(7, [1, 2])):
        got, need = oracle.sketch_entropy_loss(code, W)
        yield Check(f"H~(W|SS(W)) >= m - k on [7,4,3], {W.label}", got >= need, f"{got:.3f} >= {need}")


def suite_fuzzy(quick: bool, n: Optional[int]) -> CheckGen:
    code = make_code("hamming", 7, 1)
    params = make_fuzzy_params(code, 1, 1)
    F = params.field
    fails = 0
    for w in range(128):
        for i in F.elements():
            R, P = fuzzy_gen(w, params, i)
            for e in [0] + [1 << j for j in range(7)]:
                fails += fuzzy_rep(w ^ e, P, params) != R
    yield Check("fuzzy correctness on [7,4,3], all w, errors, seeds", fails == 0, f"failures={fails}")
    mismatches = 0
    rng = random.Random(4)
    for _ in range(300 if quick else 3000):
        w, delta, s2 = rng.getrandbits(7), rng.getrandbits(7), rng.getrandbits(3)
        s = ss(code, w)
        pred = offsets_from_delta(delta, s, s2, params)
        w2 = w ^ delta
        try:
            w_star = srec(code, w2, s2)
            accept = _bits.weight(w_star ^ w2) <= code.t and ss(code, w_star) == s2
        except DecodeFailure:
            accept = False
        if pred is None:
            mismatches += accept
            continue
        c, c2 = ss_perp(code, w), ss_perp(code, w_star)
        half = params.half
        mismatches += (pred[0].bits, pred[1].bits) != ((c ^ c2) >> half, (c ^ c2) & _bits.mask(half))
    yield Check("offsets_from_delta matches direct simulation on [7,4,3]", mismatches == 0, f"mismatches={mismatches}")
    sd = oracle.fuzzy_output_distance(params, FlatDistribution.uniform(7))
    yield Check("fuzzy SD((R,P), U x P) <= 2^((n'/2-m+k)/2) on [7,4,3]", oracle.sd_within_pow2_half(sd, params.half - 7 + code.k), str(sd))


def suite_lemmas(quick: bool, n: Optional[int]) -> CheckGen:
    rng = random.Random(5)
    tables = 1000 if quick else 10_000
    ok1 = ok2 = True
    for _ in range(tables):
        rows, cols = rng.randint(1, 4), rng.randint(1, 4)
        joint = random_joint(rng, rows, cols)
        _, _, holds = oracle.check_sd_switch(joint, random_marginal(rng, rows), random_marginal(rng, cols))
        ok1 &= holds
        ok2 &= oracle.check_min_entropy_chain(joint, (0,))[2]
    yield Check(f"SD((A,B), C x B) <= 2 SD((A,B), C x D) on {tables} tables", ok1)
    yield Check(f"H~(A|B) >= H((A,B)) - log|B| on {tables} tables", ok2)
    for k in (4, 6, 8):
        got = oracle.pairwise_collision_max(FieldSpec.of_degree(k))
        yield Check(f"pairwise collision max = 2^-{k}", got == Fraction(1, 1 << k), str(got))


SUITES: dict[str, Callable[[bool, Optional[int]], CheckGen]] = {
    "field": suite_field,
    "code": suite_code,
    "params": suite_params,
    "uniformity": suite_uniformity,
    "robustness": suite_robustness,
    "attack": suite_attack,
    "mac": suite_mac,
    "sketch": suite_sketch,
    "fuzzy": suite_fuzzy,
    "lemmas": suite_lemmas,
}


def run_suites(names, n: Optional[int] = None, quick: bool = True, out: Optional[TextIO] = None) -> bool:
    all_ok = True
    for name in names:
        start = time.perf_counter()
        for check in SUITES[name](quick, n):
            all_ok &= check.passed
            if out is not None:
                print(check.line(), file=out, flush=True)
        if out is not None:
            print(f"# suite {name} done in {time.perf_counter() - start:.1f}s", file=out)
    return all_ok
