import pytest

from foamcalc.kgroups import (
    K0Class,
    k1_eq,
    k1_identity,
    k1_inv,
    k1_mul,
    k1_of,
    k1_project_quotient,
    k1_quot_eq,
    tau,
    tau_matrix,
)
from foamcalc.rings import RING_Q, RING_Z, RingError, ring_fp, ring_zmod

RINGS = [RING_Q, RING_Z, ring_fp(7), ring_zmod(12)]


def test_tau_small_ranks():
    assert tau(1, RING_Q).unit.value == -1
    assert tau(2, RING_Q).unit.value == 1
    assert tau(0, RING_Q).unit.value == 1


def test_tau_matches_block_swap_determinant():
    for ring in RINGS:
        for r in range(0, 7):
            assert tau(r, ring).unit == tau_matrix(r, ring).det()


def test_tau_squares_to_identity():
    for ring in RINGS:
        for r in range(0, 9):
            assert k1_eq(k1_mul(tau(r, ring), tau(r, ring)), k1_identity(ring))


def test_k1_group_operations():
    assert k1_mul(k1_of(RING_Q, 2), k1_of(RING_Q, 3)).unit.value == 6
    assert k1_inv(k1_of(ring_fp(7), 5)).unit.value == 3
    assert k1_eq(k1_of(RING_Z, -1), k1_of(RING_Z, -1))
    with pytest.raises(RingError):
        k1_mul(k1_of(RING_Q, 2), k1_of(RING_Z, 1))
    with pytest.raises(RingError):
        k1_of(RING_Z, 2)  # not a unit of Z


def test_quotient_projection_examples():
    assert k1_project_quotient(k1_of(RING_Q, -1)).unit_mod_sign.value == 1
    assert k1_project_quotient(k1_of(RING_Q, 6)).unit_mod_sign.value == 6
    assert k1_project_quotient(k1_of(RING_Q, -6)).unit_mod_sign.value == 6
    assert k1_project_quotient(k1_of(RING_Z, 1)).unit_mod_sign.value == 1
    assert k1_project_quotient(tau(1, RING_Q)).unit_mod_sign.value == 1


def test_quotient_is_homomorphism_with_sign_kernel():
    for ring in RINGS:
        units = [v for v in range(-6, 7) if v != 0]
        for a in units:
            for b in units:
                try:
                    ka, kb = k1_of(ring, a), k1_of(ring, b)
                except RingError:
                    continue
                lhs = k1_project_quotient(k1_mul(ka, kb))
                rhs_unit = k1_project_quotient(ka).unit_mod_sign * k1_project_quotient(kb).unit_mod_sign
                assert lhs == k1_project_quotient(k1_of(ring, rhs_unit.value))
        # kernel is exactly {1, -1} meeting the units
        ident = k1_project_quotient(k1_identity(ring))
        for v in range(-6, 7):
            try:
                cls = k1_of(ring, v)
            except RingError:
                continue
            in_kernel = k1_quot_eq(k1_project_quotient(cls), ident)
            is_sign = cls.unit.value in (k1_of(ring, 1).unit.value, k1_of(ring, -1).unit.value)
            assert in_kernel == is_sign


def test_k0_arithmetic():
    assert (K0Class(2) + K0Class(-2)).value == 0
    assert (-K0Class(3)).value == -3
