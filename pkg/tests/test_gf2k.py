import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import schoolbook as sb
from rfext.gf2k import (
    Basis,
    FieldElement,
    FieldMismatchError,
    FieldSpec,
    add,
    change_basis,
    default_modulus,
    div,
    div_by_x,
    eval_poly,
    inv,
    is_irreducible,
    mul,
)

GF16 = FieldSpec(4, 0b10011)


def e(v, F=GF16):
    return F.element(v)


# --- spec examples ---


def test_add_examples():
    x = e(0b1011)
    assert add(x, x) == GF16.zero
    assert add(x, GF16.zero) == x
    assert add(e(0b0011), e(0b0101)) == e(0b0110)


def test_mul_examples():
    x = e(0b1101)
    assert mul(x, GF16.one) == x
    assert mul(x, GF16.zero) == GF16.zero
    assert mul(e(0b0010), e(0b0011)) == e(0b0110)
    assert sb.gf_mul(0b0010, 0b0011, 0b10011) == 0b0110


def test_inverse_examples():
    assert inv(GF16.one) == GF16.one
    assert inv(e(0b0010)) == e(0b1001)
    assert sb.gf_inv(0b0010, 0b10011) == 0b1001
    with pytest.raises(ZeroDivisionError):
        inv(GF16.zero)
    with pytest.raises(ZeroDivisionError):
        div(GF16.one, GF16.zero)


def test_div_by_x_examples():
    assert div_by_x(GF16.x) == GF16.one
    # (x + 1) / x = 1 + x^-1 = 1 + (x^3 + 1) = x^3 under x^4 + x + 1
    oracle = sb.gf_mul(0b0011, sb.gf_inv(0b0010, 0b10011), 0b10011)
    assert oracle == 0b1000
    assert div_by_x(e(0b0011)) == e(oracle)


@pytest.mark.parametrize("modulus", [0x11B, 0x11D])
def test_div_by_x_round_trip_gf256(modulus):
    F = FieldSpec(8, modulus)
    for z in F.elements():
        assert div_by_x(z) * F.x == z


def test_change_basis_examples():
    F = FieldSpec.of_degree(4)
    for v in range(16):
        x = F.element(v)
        assert change_basis(change_basis(x, Basis.PARITY_SPLIT), Basis.STANDARD) == x
        c3, c2, c1, c0 = (v >> 3) & 1, (v >> 2) & 1, (v >> 1) & 1, v & 1
        assert change_basis(x, "parity-split").bits == (c3 << 3) | (c1 << 2) | (c2 << 1) | c0
    assert change_basis(F.zero, Basis.PARITY_SPLIT).bits == 0


def test_change_basis_odd_degree_rejected():
    with pytest.raises(ValueError):
        change_basis(FieldSpec.of_degree(5).one, Basis.PARITY_SPLIT)
    with pytest.raises(ValueError):
        FieldSpec.of_degree(7, Basis.PARITY_SPLIT)


def test_eval_poly_examples():
    assert eval_poly([], e(5)) == GF16.zero
    assert eval_poly([e(9)], e(5)) == e(9)
    assert eval_poly([GF16.one, e(0b0010)], e(0b0011)) == e(0b0001)


def test_spec_mismatch():
    other = FieldSpec(4, 0b11001)
    with pytest.raises(FieldMismatchError):
        e(1) + other.element(1)
    with pytest.raises(FieldMismatchError):
        e(1) * GF16.with_basis(Basis.PARITY_SPLIT).element(1)


def test_element_length_checked():
    with pytest.raises(ValueError):
        GF16.element(16)


# --- exhaustive agreement with the schoolbook oracle ---


@pytest.mark.parametrize("degree,modulus", [(4, 0b10011), (8, 0x11B), (8, 0x11D), (6, default_modulus(6))])
def test_mul_matches_schoolbook(degree, modulus):
    F = FieldSpec(degree, modulus)
    rng = random.Random(degree * modulus)
    pairs = [(a, b) for a in range(F.order) for b in range(F.order)] if degree <= 4 else [
        (rng.randrange(F.order), rng.randrange(F.order)) for _ in range(3000)
    ]
    for a, b in pairs:
        assert F.mul_raw(a, b) == sb.gf_mul(a, b, modulus)


@pytest.mark.parametrize("degree,modulus", [(4, 0b10011), (8, 0x11B), (8, 0x11D)])
def test_field_axioms_exhaustive(degree, modulus):
    F = FieldSpec(degree, modulus)
    T = F.mul_table()
    n = F.order
    # commutativity, identities, inverses
    assert (T == T.T).all()
    assert all(int(T[1 if F.basis is Basis.STANDARD else F.one.bits, a]) == a for a in range(n))
    for a in range(1, n):
        assert F.mul_raw(a, F.inv_raw(a)) == F.one.bits
    # associativity and distributivity over a full slice of triples
    rng = random.Random(degree)
    for _ in range(5000 if degree == 8 else 1):
        a, b, c = rng.randrange(n), rng.randrange(n), rng.randrange(n)
        assert T[T[a, b], c] == T[a, T[b, c]]
        assert T[a, b ^ c] == T[a, b] ^ T[a, c]
    if degree == 4:
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    assert T[T[a, b], c] == T[a, T[b, c]]
                    assert T[a, b ^ c] == T[a, b] ^ T[a, c]


@pytest.mark.parametrize("degree", [16, 32, 64])
def test_field_axioms_random_large(degree):
    F = FieldSpec.of_degree(degree)
    rng = random.Random(degree)
    for _ in range(10_000 if degree == 16 else 2_000):
        a, b, c = (F.element(rng.getrandbits(degree)) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a * b == b * a
        if a:
            assert a * a.inverse() == F.one
    for _ in range(50):
        a, b = rng.getrandbits(degree), rng.getrandbits(degree)
        assert F.mul_raw(a, b) == sb.gf_mul(a, b, F.modulus)


def test_inverse_exhaustive_gf256():
    F = FieldSpec(8, 0x11B)
    for x in F.elements():
        if x:
            assert x * inv(x) == F.one


# --- moduli ---


@pytest.mark.parametrize("degree", [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16])
def test_default_modulus_irreducible_bruteforce(degree):
    m = default_modulus(degree)
    assert m.bit_length() == degree + 1
    assert sb.is_irreducible_bruteforce(m)


def test_irreducibility_test_agrees_with_bruteforce():
    for m in range(1 << 4, 1 << 10):
        assert is_irreducible(m) == sb.is_irreducible_bruteforce(m), hex(m)


def test_large_moduli():
    for degree in (32, 64, 128, 96):
        assert is_irreducible(default_modulus(degree))
    # x^64 + 1 = (x + 1)^64 is reducible
    assert not is_irreducible((1 << 64) | 1)


def test_reducible_modulus_rejected():
    with pytest.raises(ValueError):
        FieldSpec(4, 0b10101)  # (x^2 + x + 1)^2
    with pytest.raises(ValueError):
        FieldSpec(4, 0b1011)  # wrong degree


# --- parity-split basis ---


@pytest.mark.parametrize("degree", [4, 6, 8])
def test_split_basis_is_the_documented_permutation(degree):
    F = FieldSpec.of_degree(degree)
    S = F.with_basis(Basis.PARITY_SPLIT)
    for v in range(F.order):
        assert S.from_standard(v) == sb.std_to_split(v, degree)
        assert S.to_standard(sb.std_to_split(v, degree)) == v


@pytest.mark.parametrize("degree", [4, 8])
@pytest.mark.parametrize("modulus_pick", [0, 1])
def test_half_swap_exhaustive(degree, modulus_pick):
    moduli = {4: [0b10011, 0b11001], 8: [0x11B, 0x11D]}
    F = FieldSpec(degree, moduli[degree][modulus_pick], Basis.PARITY_SPLIT)
    h = degree // 2
    for z in F.elements():
        if F.to_standard(z.bits) & 1:
            continue
        q = div_by_x(z).bits
        # bottom half of z/x equals top half of z
        assert q & ((1 << h) - 1) == z.bits >> h
        # first bit of z/x is 0 and positions 2..h come from z's second half
        assert q >> (degree - 1) == 0
        for p in range(2, h + 1):
            assert (q >> (degree - p)) & 1 == (z.bits >> (degree - (h + p - 1))) & 1


def test_mul_commutes_with_change_basis():
    F = FieldSpec(8, 0x11D)
    rng = random.Random(3)
    for _ in range(500):
        a, b = F.element(rng.randrange(256)), F.element(rng.randrange(256))
        lhs = change_basis(a * b, Basis.PARITY_SPLIT)
        rhs = change_basis(a, Basis.PARITY_SPLIT) * change_basis(b, Basis.PARITY_SPLIT)
        assert lhs == rhs


def test_add_is_xor_in_both_bases():
    for basis in Basis:
        F = FieldSpec.of_degree(8, basis)
        for a in range(0, 256, 7):
            for b in range(0, 256, 11):
                assert (F.element(a) + F.element(b)).bits == a ^ b


def test_hex_serialization():
    F = FieldSpec.of_degree(6)
    x = F.element(0b101101)
    assert x.hex() == "2d"
    assert F.from_hex("2d") == x
    assert F.key == (6, format(F.modulus, "x"), "std")
    assert FieldSpec.of_degree(5).element(0b10001).hex() == "11"


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(0, 2**64 - 1), st.integers(0, 2**64 - 1))
def test_hypothesis_distributive_gf64(a, b, c):
    F = FieldSpec.of_degree(64)
    A, B, C = F.element(a), F.element(b), F.element(c)
    assert A * (B + C) == A * B + A * C


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 2**32 - 1))
def test_hypothesis_division(a):
    F = FieldSpec.of_degree(32)
    x = F.element(a)
    assert (F.one / x) * x == F.one
    assert div_by_x(x) * F.x == x


def test_element_is_hashable_and_immutable():
    x = GF16.element(3)
    assert {x: 1}[GF16.element(3)] == 1
    with pytest.raises(Exception):
        x.bits = 4  # type: ignore[misc]
    assert isinstance(x, FieldElement)
