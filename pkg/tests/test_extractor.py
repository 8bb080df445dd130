import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import schoolbook as sb
from rfext.extractor import (
    ExtractorParams,
    HelperString,
    Infeasible,
    Variant,
    derive_params,
    dkrs_gen,
    dkrs_rep,
    gen,
    generate,
    rep,
    reproduce,
)
from rfext.gf2k import default_modulus


def new_params(n, v, ell=None, beta=0, basis="std"):
    ell = n // 2 - v - beta if ell is None else ell
    return ExtractorParams(n, v, ell, Variant.NEW if beta == 0 else Variant.NEW_SHORT, beta, basis=basis)


def dkrs_params(n, v, beta=0, variant=Variant.DKRS_POST):
    return ExtractorParams(n, v, n - 2 * v - beta, variant, beta)


def substr(value, length, i, j):
    return (value >> (length - j)) & ((1 << (j - i + 1)) - 1)


# --- parameter derivation ---


def test_derive_small_example():
    p = derive_params(64, 48, 8, 4, "new")
    assert (p.v, p.ell, p.beta) == (24, 8, 0)


def test_derive_three_halves_ratio():
    new = derive_params(1024, 768, 64, 0, "new")
    post = derive_params(1024, 768, 64, 0, "dkrs-post")
    assert new.ell == 192 and post.ell == 128
    assert Fraction(new.ell, post.ell) == Fraction(3, 2)


def test_derive_infeasible_uniformity():
    for d in (0, 1, 8):
        out = derive_params(64, 30, d, 0, "new")
        assert isinstance(out, Infeasible) and not out
        assert out.constraint == "uniformity"


def test_derive_infeasible_robustness():
    out = derive_params(64, 40, 30, 0, "new")
    assert isinstance(out, Infeasible) and out.constraint == "robustness"


def test_derive_dkrs_pre():
    p = derive_params(64, 48, 8, 0, "dkrs-pre")
    assert (p.v, p.ell) == (24, 16)


def test_derive_new_short():
    # v = 64 - 40 + 4 = 28 and beta = 32 + 12 - 40 = 4 leave no key bits
    out = derive_params(64, 40, 4, 6, "new-short")
    assert isinstance(out, Infeasible) and out.constraint == "uniformity"
    p = derive_params(128, 100, 8, 4, "new-short")
    assert (p.v, p.beta, p.ell) == (36, 0, 28)
    p = derive_params(128, 90, 4, 16, "new-short")
    assert (p.v, p.beta, p.ell) == (42, 6, 16)
    assert p.ell <= 2 * 90 - 128 - 4 - 2 * 16


def test_derive_rational_inputs_round_up():
    p = derive_params(64, Fraction(95, 2), Fraction(15, 2), 0, "new")
    assert p.v == 24  # ceil(64 - 47.5 + 7.5)
    p = derive_params(64, Fraction(96, 2), Fraction(1, 3), 0, "new")
    assert p.v == 17


@settings(max_examples=300, deadline=None)
@given(
    st.integers(4, 200).map(lambda x: 2 * x),
    st.fractions(0, 1),
    st.fractions(0, 40),
    st.fractions(0, 20),
    st.sampled_from(list(Variant)),
)
def test_derive_invariants(n, frac, d, e, variant):
    m = max(Fraction(1), frac * n)
    p = derive_params(n, m, d, e, variant)
    if isinstance(p, Infeasible):
        assert p.constraint in ("uniformity", "robustness")
        return
    assert p.ell >= 1 and p.v >= 0 and p.beta >= 0
    if variant is Variant.NEW:
        assert p.v >= n - m + d
        assert p.ell == n // 2 - p.v
        assert m >= n // 2 + 2 * e
    if variant is Variant.NEW_SHORT:
        assert p.v >= n - m + d
        assert p.ell <= 2 * m - n - d - 2 * e + 1
    if variant.is_dkrs:
        assert 2 * p.v + p.ell + p.beta == n
    else:
        assert p.v + p.ell + p.beta == n // 2


def test_params_validation():
    with pytest.raises(ValueError):
        ExtractorParams(9, 1, 2)
    with pytest.raises(ValueError):
        ExtractorParams(8, 4, 0)
    with pytest.raises(ValueError):
        ExtractorParams(8, 1, 2)  # v + ell + beta != n/2
    with pytest.raises(ValueError):
        ExtractorParams(14, 3, 4, basis="parity-split")  # odd field degree
    with pytest.raises(ValueError):
        derive_params(9, 5, 1)


# --- new construction ---


def test_gen_spec_example():
    p = new_params(8, 2)
    assert p.field.modulus == 0b10011 == default_modulus(4)
    w = (0b0010 << 4) | 0b0011
    i = p.field.element(0b0011)
    y = sb.gf_mul(0b0011, 0b0010, 0b10011) ^ 0b0011
    assert y == 0b0101
    key, helper = gen(w, p, i)
    assert helper.sigma == 0b01 and key.bits == 0b01
    assert (helper.sigma, key.bits) == (substr(y, 4, 1, 2), substr(y, 4, 3, 4))


def test_gen_zero_secret():
    p = new_params(16, 3)
    for s in range(256):
        key, helper = gen(0, p, p.field.element(s))
        assert key.bits == 0 and helper.sigma == 0


def test_gen_zero_seed_exposes_b():
    p = new_params(16, 3, beta=2)
    rng = random.Random(1)
    for _ in range(50):
        w = rng.getrandbits(16)
        b = w & 0xFF
        key, helper = gen(w, p, p.field.zero)
        assert helper.sigma == b >> 5
        assert key.bits == (b >> 2) & 0b111


@pytest.mark.parametrize("basis", ["std", "parity-split"])
def test_gen_matches_schoolbook(basis):
    p = new_params(12, 2, beta=1, basis=basis)
    F = p.field
    rng = random.Random(basis)
    for _ in range(300):
        w, s = rng.getrandbits(12), rng.getrandbits(6)
        key, helper = gen(w, p, F.element(s))
        a, b, i = w >> 6, w & 63, s
        if basis != "std":
            a, b, i = sb.split_to_std(a, 6), sb.split_to_std(b, 6), sb.split_to_std(i, 6)
        y = sb.gf_mul(i, a, F.modulus) ^ b
        if basis != "std":
            y = sb.std_to_split(y, 6)
        assert helper.sigma == substr(y, 6, 1, 2)
        assert key.bits == substr(y, 6, 3, 5)


def test_round_trip_exhaustive_n8():
    p = new_params(8, 2)
    for w in range(256):
        for s in range(16):
            key, helper = gen(w, p, p.field.element(s))
            assert rep(w, helper, p) == key


def test_round_trip_random_large():
    rng = random.Random(7)
    for variant in Variant:
        n = 128
        p = derive_params(n, 100, 8, 4, variant)
        for _ in range(1000 // 6):
            w = rng.getrandbits(n)
            key, helper = generate(w, p)
            assert reproduce(w, helper, p) == key
            assert key.length == p.ell


def test_flip_sigma_rejects():
    p = new_params(16, 4)
    rng = random.Random(3)
    for _ in range(100):
        w = rng.getrandbits(16)
        key, helper = gen(w, p, p.field.element(rng.getrandbits(8)))
        assert rep(w, helper, p) == key
        for j in range(p.v):
            bad = HelperString(helper.i, helper.sigma ^ (1 << j), p.v)
            assert rep(w, bad, p) is None


def test_wrong_field_seed_rejected():
    p = new_params(16, 4)
    q = new_params(16, 4, basis="parity-split")
    with pytest.raises(ValueError):
        gen(0, p, q.field.one)
    with pytest.raises(ValueError):
        gen(1 << 16, p)
    with pytest.raises(ValueError):
        dkrs_gen(0, p)
    with pytest.raises(ValueError):
        gen(0, dkrs_params(8, 2))


def test_pairwise_independence_gf16():
    p = new_params(8, 0)
    F = p.field
    hashes = {}
    for w in range(256):
        hashes[w] = [F.mul_raw(i, w >> 4) ^ (w & 15) for i in range(16)]
    for w1 in range(256):
        for w2 in range(w1 + 1, 256):
            coll = sum(x == y for x, y in zip(hashes[w1], hashes[w2]))
            assert coll <= 1


@pytest.mark.parametrize("v", [1, 2, 3])
def test_bad_set_count_small_exhaustive(v):
    # each transcript (i, y, i2 != i, sigma2) is consistent with 2^(n/2 - v) secrets
    p = new_params(8, v)
    F = p.field
    for i in range(16):
        by_y = {}
        for w in range(256):
            by_y.setdefault(F.mul_raw(i, w >> 4) ^ (w & 15), []).append(w)
        assert all(len(ws) == 16 for ws in by_y.values())
        for ws in by_y.values():
            for i2 in range(16):
                if i2 == i:
                    continue
                counts = [0] * (1 << v)
                for w in ws:
                    counts[(F.mul_raw(i2, w >> 4) ^ (w & 15)) >> (4 - v)] += 1
                assert counts == [2 ** (4 - v)] * (1 << v)


# --- baseline construction ---


def test_dkrs_zero_secret():
    p = dkrs_params(12, 3)
    for s in range(0, 512, 17):
        key, helper = dkrs_gen(0, p, p.field.element(s))
        assert key.bits == 0 and helper.sigma == 0


def test_dkrs_example_gf64():
    p = dkrs_params(8, 2)
    assert p.field_degree == 6
    M = p.field.modulus
    assert sb.is_irreducible_bruteforce(M)
    w, s = 0b10110111, 0b100101
    a, b = w >> 2, w & 3
    z = sb.gf_mul(s, a, M)
    key, helper = dkrs_gen(w, p, p.field.element(s))
    assert helper.sigma == substr(z, 6, 1, 2) ^ b
    assert key.bits == substr(z, 6, 3, 6)
    for w in range(256):
        for s in range(64):
            a, b = w >> 2, w & 3
            z = sb.gf_mul(s, a, M)
            key, helper = dkrs_gen(w, p, p.field.element(s))
            assert (helper.sigma, key.bits) == (substr(z, 6, 1, 2) ^ b, substr(z, 6, 3, 6))
            assert dkrs_rep(w, helper, p) == key


def test_dkrs_improved_shortening():
    p = dkrs_params(20, 5, beta=3, variant=Variant.DKRS_IMPROVED_POST)
    M = p.field.modulus
    rng = random.Random(11)
    for _ in range(200):
        w, s = rng.getrandbits(20), rng.getrandbits(15)
        z = sb.gf_mul(s, w >> 5, M)
        key, helper = dkrs_gen(w, p, p.field.element(s))
        assert key.bits == substr(z, 15, 6, 15 - 3)
        assert helper.sigma == substr(z, 15, 1, 5) ^ (w & 31)


def test_dkrs_flip_sigma_rejects():
    p = dkrs_params(16, 4)
    rng = random.Random(4)
    for _ in range(50):
        w = rng.getrandbits(16)
        key, helper = dkrs_gen(w, p)
        assert dkrs_rep(w, helper, p) == key
        bad = HelperString(helper.i, helper.sigma ^ 1, p.v)
        assert dkrs_rep(w, bad, p) is None


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 2**16 - 1), st.integers(0, 10))
def test_hypothesis_round_trip(w, s, v):
    p = new_params(32, v, beta=2)
    key, helper = gen(w, p, p.field.element(s))
    assert rep(w, helper, p) == key
    assert key.length == p.ell and helper.v == v


def test_report_fields():
    p = derive_params(64, 48, 8, 4, "new")
    r = p.report()
    assert r["v"] == 24 and r["ell"] == 8 and r["variant"] == "new"
    assert p.robustness_bound() == Fraction(1, 2**8)
