"""Canonical value types for the K-group invariants.

Over the supported rings every finitely generated projective module is free,
so the rank invariant lives in Z and the unit-group invariant in R^x (via the
determinant).  The quotient class identifies u with -u and stores the
canonical representative under the documented scalar ordering.
"""

from __future__ import annotations

from dataclasses import dataclass

from .matrix import Matrix, block_swap
from .rings import RingError, RingSpec, Scalar, one


@dataclass(frozen=True)
class K0Class:
    """A rank difference; may be negative."""

    value: int

    def __add__(self, other: "K0Class") -> "K0Class":
        return K0Class(self.value + other.value)

    def __neg__(self) -> "K0Class":
        return K0Class(-self.value)

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class K1Class:
    """A unit of the coefficient ring."""

    ring: RingSpec
    unit: Scalar

    def __post_init__(self) -> None:
        if self.unit.ring != self.ring:
            raise RingError("unit ring mismatch")
        if not self.unit.is_unit():
            raise RingError(f"{self.unit} is not a unit in {self.ring}")

    def __str__(self) -> str:
        return str(self.unit)


def k1_of(ring: RingSpec, raw) -> K1Class:
    return K1Class(ring, Scalar.of(ring, raw))


def k1_mul(a: K1Class, b: K1Class) -> K1Class:
    if a.ring != b.ring:
        raise RingError(f"mixed rings {a.ring} and {b.ring}")
    return K1Class(a.ring, a.unit * b.unit)


def k1_inv(a: K1Class) -> K1Class:
    return K1Class(a.ring, a.unit.inverse())


def k1_eq(a: K1Class, b: K1Class) -> bool:
    if a.ring != b.ring:
        raise RingError(f"mixed rings {a.ring} and {b.ring}")
    return a.unit == b.unit


def k1_identity(ring: RingSpec) -> K1Class:
    return K1Class(ring, one(ring))


def tau(rank: int, ring: RingSpec) -> K1Class:
    """Class of the block-swap automorphism of R^rank (+) R^rank.

    Equals (-1)^rank; the explicit 2*rank permutation matrix realizes it and
    the tests compare against its determinant.
    """
    if rank < 0:
        raise ValueError("rank must be >= 0")
    return k1_of(ring, -1 if rank % 2 else 1)


def tau_matrix(rank: int, ring: RingSpec) -> Matrix:
    """The 2*rank x 2*rank block-swap permutation matrix behind tau."""
    return block_swap(ring, rank, rank)


@dataclass(frozen=True)
class K1QuotClass:
    """A unit modulo {1, -1}, stored by its canonical representative.

    The representative is the sort_key-smaller of {u, -u}; over Q and Z that
    is the nonnegative one, over Fp and Z/n the smaller residue.
    """

    ring: RingSpec
    unit_mod_sign: Scalar

    def __str__(self) -> str:
        return str(self.unit_mod_sign)


def k1_project_quotient(a: K1Class) -> K1QuotClass:
    u, neg_u = a.unit, -a.unit
    rep = u if u.sort_key() <= neg_u.sort_key() else neg_u
    return K1QuotClass(a.ring, rep)


def k1_quot_mul(a: K1QuotClass, b: K1QuotClass) -> K1QuotClass:
    if a.ring != b.ring:
        raise RingError(f"mixed rings {a.ring} and {b.ring}")
    return k1_project_quotient(K1Class(a.ring, a.unit_mod_sign * b.unit_mod_sign))


def k1_quot_eq(a: K1QuotClass, b: K1QuotClass) -> bool:
    if a.ring != b.ring:
        raise RingError(f"mixed rings {a.ring} and {b.ring}")
    return a.unit_mod_sign == b.unit_mod_sign
