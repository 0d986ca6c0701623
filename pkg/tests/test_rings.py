from fractions import Fraction

import pytest

from foamcalc.rings import RING_Q, RING_Z, NotInvertible, RingError, RingSpec, Scalar, ring_fp, ring_zmod


def test_ring_spec_strings_round_trip():
    for text in ["Q", "Z", "Fp:7", "Zmod:12"]:
        assert str(RingSpec.parse(text)) == text


def test_ring_spec_rejects_bad_specs():
    with pytest.raises(RingError):
        RingSpec.parse("Fp:6")
    with pytest.raises(RingError):
        RingSpec.parse("Zmod:1")
    with pytest.raises(RingError):
        RingSpec.parse("R")


def test_scalar_canonical_forms():
    assert Scalar.of(RING_Q, Fraction(2, 4)).value == Fraction(1, 2)
    assert Scalar.of(ring_fp(7), 10).value == 3
    assert Scalar.of(ring_zmod(12), -1).value == 11
    assert Scalar.of(RING_Z, 5).value == 5


def test_scalar_parse_and_str_round_trip():
    cases = [(RING_Q, "3/4"), (RING_Q, "-2"), (RING_Z, "-7"), (ring_fp(7), "5"), (ring_zmod(9), "8")]
    for ring, text in cases:
        assert str(Scalar.parse(ring, text)) == text


def test_units_and_inverses():
    assert Scalar.of(ring_fp(7), 5).inverse().value == 3  # 5*3 = 15 = 1 mod 7
    assert Scalar.of(RING_Q, Fraction(2)).inverse().value == Fraction(1, 2)
    assert Scalar.of(RING_Z, -1).inverse().value == -1
    assert not Scalar.of(RING_Z, 2).is_unit()
    assert not Scalar.of(ring_zmod(12), 4).is_unit()
    assert Scalar.of(ring_zmod(12), 7).is_unit()
    with pytest.raises(NotInvertible):
        Scalar.of(ring_zmod(12), 6).inverse()


def test_mixed_ring_arithmetic_rejected():
    with pytest.raises(RingError):
        Scalar.of(RING_Q, 1) + Scalar.of(RING_Z, 1)


def test_sort_key_prefers_nonnegative_then_magnitude():
    keys = [Scalar.of(RING_Q, v).sort_key() for v in (0, 1, 2, -1, -2)]
    assert keys == sorted(keys)
    six, minus_six = Scalar.of(RING_Q, 6), Scalar.of(RING_Q, -6)
    assert six.sort_key() < minus_six.sort_key()
