import itertools

import pytest

from atrahasis.errors import UsageError
from atrahasis.fields import (DEFAULT_REDUCTION_POLY, FieldSpec, binary_field,
                              decode_elements, encode_element,
                              poly_is_irreducible, prime_field)


def test_gf16_uses_standard_quartic(gf16):
    assert gf16.reduction_poly == 0x13  # z^4 + z + 1
    assert gf16.order == 16


def test_addition_is_xor_in_characteristic_two(gf16):
    z = gf16.element(2)
    zero = gf16.zero()
    for a in gf16.elements():
        assert (a + a).value == 0
    assert z + zero == z


def test_prime_addition():
    f = prime_field(127)
    assert (f.element(100) + f.element(50)).value == 23


def test_gf16_multiplication_reduces():
    gf16 = binary_field(4)
    z = gf16.element(2)
    z3 = gf16.element(8)
    # z^3 * z = z^4 = z + 1 under z^4 + z + 1
    assert (z3 * z).value == 0b0011


def test_multiplicative_identity_and_group_order(gf16):
    one = gf16.one()
    for a in gf16.elements():
        assert a * one == a
        if a.value != 0:
            assert (a ** 15).value == 1


def test_inverse_examples(gf16):
    assert gf16.one().inverse() == gf16.one()
    # z * b = 1 mod z^4+z+1 has b = z^3 + 1
    assert gf16.element(2).inverse().value == 0b1001
    f = prime_field(127)
    assert f.element(2).inverse().value == 64
    with pytest.raises(ZeroDivisionError):
        gf16.zero().inverse()


def test_pow_conventions(gf16):
    z = gf16.element(2)
    assert (z ** 4).value == 0b0011
    assert (gf16.zero() ** 0).value == 1  # empty product, even at 0
    assert z ** -3 == z ** 12  # exponent mod group order 15
    with pytest.raises(ZeroDivisionError):
        gf16.zero() ** -1


def test_enumerate_elements():
    gf4 = binary_field(2)
    assert [e.value for e in gf4.elements()] == [0, 1, 2, 3]
    gf2 = binary_field(1)
    assert [e.value for e in gf2.elements()] == [0, 1]
    gf16 = binary_field(4)
    values = [e.value for e in gf16.elements()]
    assert len(values) == 16 and len(set(values)) == 16
    assert values[0] == 0 and values == sorted(values)


@pytest.mark.parametrize("spec", [binary_field(1), binary_field(2),
                                  binary_field(3), binary_field(4)])
def test_field_axioms_exhaustive(spec):
    elems = list(range(spec.order))
    for a, b, c in itertools.product(elems, repeat=3):
        assert spec.add(a, b) == spec.add(b, a)
        assert spec.mul(a, b) == spec.mul(b, a)
        assert spec.add(spec.add(a, b), c) == spec.add(a, spec.add(b, c))
        assert spec.mul(spec.mul(a, b), c) == spec.mul(a, spec.mul(b, c))
        assert spec.mul(a, spec.add(b, c)) == spec.add(spec.mul(a, b), spec.mul(a, c))
    for a in elems:
        assert spec.add(a, spec.neg(a)) == 0
        if a:
            assert spec.mul(a, spec.inv(a)) == 1


def test_field_axioms_random_large(rng):
    for spec in (prime_field(127), binary_field(9)):
        for _ in range(300):
            a, b, c = (rng.randrange(spec.order) for _ in range(3))
            assert spec.mul(a, spec.add(b, c)) == spec.add(spec.mul(a, b),
                                                           spec.mul(a, c))
            assert spec.mul(spec.mul(a, b), c) == spec.mul(a, spec.mul(b, c))


@pytest.mark.parametrize("spec", [binary_field(4), binary_field(8),
                                  prime_field(127), prime_field(251)])
def test_inverse_roundtrip_exhaustive(spec):
    for a in range(1, spec.order):
        assert spec.mul(a, spec.inv(a)) == 1


def test_frobenius_gf16(gf16):
    sq = lambda a: gf16.mul(a, a)
    for a in range(16):
        for b in range(16):
            assert sq(gf16.add(a, b)) == gf16.add(sq(a), sq(b))


def test_builtin_polynomials_all_irreducible():
    for m in range(1, 17):
        spec = binary_field(m)  # construction verifies irreducibility
        assert spec.reduction_poly == DEFAULT_REDUCTION_POLY[m]
        assert poly_is_irreducible(spec.reduction_poly)


def test_bad_reduction_polynomials_rejected():
    with pytest.raises(UsageError):
        binary_field(4, 0b10101)  # z^4 + z^2 + 1 = (z^2+z+1)^2
    with pytest.raises(UsageError):
        binary_field(4, 0b1011)  # degree 3, not 4
    with pytest.raises(UsageError):
        prime_field(128)
    with pytest.raises(UsageError):
        FieldSpec("ternary")


def test_caller_supplied_polynomial():
    alt = binary_field(4, 0b11001)  # z^4 + z^3 + 1, also irreducible
    assert alt != binary_field(4)
    for a in range(1, 16):
        assert alt.mul(a, alt.inv(a)) == 1


def test_mismatched_spec_errors(gf16):
    other = prime_field(7)
    with pytest.raises(UsageError):
        gf16.element(3) + other.element(3)
    with pytest.raises(UsageError):
        gf16.element(3) * other.element(3)
    with pytest.raises(UsageError):
        gf16.element(77)


def test_spec_serialization_roundtrip(gf16):
    for spec in (gf16, prime_field(127), binary_field(9)):
        assert FieldSpec.from_dict(spec.to_dict()) == spec
    d = gf16.to_dict()
    assert d == {"kind": "binary-extension", "m": 4, "reduction_poly": "13",
                 "p": None}


def test_element_encoding_widths():
    cases = [
        (binary_field(4), 1, "little"),
        (binary_field(8), 1, "little"),
        (binary_field(9), 2, "little"),
        (prime_field(127), 1, "big"),
        (prime_field(257), 2, "big"),
    ]
    for spec, width, order in cases:
        assert spec.element_bytes == width
        buf = bytearray()
        v = spec.order - 1
        encode_element(spec, v, buf)
        assert len(buf) == width
        assert int.from_bytes(bytes(buf), order) == v
        assert decode_elements(spec, bytes(buf), 1) == [v]


def test_decode_elements_validates(gf16):
    with pytest.raises(UsageError):
        decode_elements(gf16, b"\x20", 1)  # 32 is not a canonical GF(16) value
    with pytest.raises(UsageError):
        decode_elements(gf16, b"\x01\x02", 1)  # wrong byte count
