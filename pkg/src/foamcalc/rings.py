"""Exact scalar arithmetic over the supported coefficient rings.

Supported rings: the rationals Q, prime fields Fp, the integers Z, and
residue rings Z/n.  Every scalar is stored in a canonical form (reduced
fraction with positive denominator, residue in [0, n), arbitrary-precision
integer), so equality of scalars is equality of represented ring elements.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union


class RingError(ValueError):
    """Raised for invalid ring specifications or mixed-ring arithmetic."""


class NotInvertible(ZeroDivisionError):
    """Raised when inverting a scalar or matrix that is not a unit."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class RingSpec:
    """One of Q, Fp (p prime), Z, or Zmod n (n >= 2).

    The string forms are "Q", "Fp:7", "Z", "Zmod:12".
    """

    kind: str                # "Q" | "Fp" | "Z" | "Zmod"
    modulus: int | None = None

    def __post_init__(self) -> None:
        if self.kind in ("Q", "Z"):
            if self.modulus is not None:
                raise RingError(f"{self.kind} takes no modulus")
        elif self.kind == "Fp":
            if self.modulus is None or not _is_prime(self.modulus):
                raise RingError(f"Fp needs a prime modulus, got {self.modulus}")
        elif self.kind == "Zmod":
            if self.modulus is None or self.modulus < 2:
                raise RingError(f"Zmod needs modulus >= 2, got {self.modulus}")
        else:
            raise RingError(f"unknown ring kind {self.kind!r}")

    @property
    def is_field(self) -> bool:
        return self.kind in ("Q", "Fp")

    @property
    def is_modular(self) -> bool:
        return self.kind in ("Fp", "Zmod")

    def __str__(self) -> str:
        if self.modulus is None:
            return self.kind
        return f"{self.kind}:{self.modulus}"

    @staticmethod
    def parse(text: str) -> "RingSpec":
        text = text.strip()
        if text in ("Q", "Z"):
            return RingSpec(text)
        for prefix in ("Fp", "Zmod"):
            if text.startswith(prefix + ":"):
                try:
                    return RingSpec(prefix, int(text[len(prefix) + 1:]))
                except ValueError as exc:
                    raise RingError(f"bad ring spec {text!r}") from exc
        raise RingError(f"bad ring spec {text!r}")


RING_Q = RingSpec("Q")
RING_Z = RingSpec("Z")


def ring_fp(p: int) -> RingSpec:
    return RingSpec("Fp", p)


def ring_zmod(n: int) -> RingSpec:
    return RingSpec("Zmod", n)


@dataclass(frozen=True)
class Scalar:
    """An exact ring element in canonical form."""

    ring: RingSpec
    value: Union[Fraction, int]

    @staticmethod
    def of(ring: RingSpec, raw) -> "Scalar":
        """Build a scalar from an int, Fraction, or Scalar, canonicalizing."""
        if isinstance(raw, Scalar):
            if raw.ring != ring:
                raise RingError(f"scalar of {raw.ring} used in {ring}")
            return raw
        if ring.kind == "Q":
            return Scalar(ring, Fraction(raw))
        if ring.kind == "Z":
            if isinstance(raw, Fraction):
                if raw.denominator != 1:
                    raise RingError(f"{raw} is not an integer")
                raw = raw.numerator
            return Scalar(ring, int(raw))
        if isinstance(raw, Fraction):
            if raw.denominator == 1:
                raw = raw.numerator
            else:
                num = raw.numerator % ring.modulus
                den = raw.denominator % ring.modulus
                return Scalar.of(ring, num) / Scalar.of(ring, den)
        return Scalar(ring, int(raw) % ring.modulus)

    def _check(self, other: "Scalar") -> None:
        if self.ring != other.ring:
            raise RingError(f"mixed rings {self.ring} and {other.ring}")

    def __add__(self, other: "Scalar") -> "Scalar":
        self._check(other)
        return Scalar.of(self.ring, self.value + other.value)

    def __sub__(self, other: "Scalar") -> "Scalar":
        self._check(other)
        return Scalar.of(self.ring, self.value - other.value)

    def __mul__(self, other: "Scalar") -> "Scalar":
        self._check(other)
        return Scalar.of(self.ring, self.value * other.value)

    def __neg__(self) -> "Scalar":
        return Scalar.of(self.ring, -self.value)

    @property
    def is_zero(self) -> bool:
        return self.value == 0

    @property
    def is_one(self) -> bool:
        return self.value == 1

    def is_unit(self) -> bool:
        if self.ring.kind == "Q":
            return self.value != 0
        if self.ring.kind == "Z":
            return self.value in (1, -1)
        if self.ring.kind == "Fp":
            return self.value % self.ring.modulus != 0
        import math
        return math.gcd(self.value, self.ring.modulus) == 1

    def inverse(self) -> "Scalar":
        if not self.is_unit():
            raise NotInvertible(f"{self} is not a unit in {self.ring}")
        if self.ring.kind == "Q":
            return Scalar(self.ring, 1 / Fraction(self.value))
        if self.ring.kind == "Z":
            return self
        return Scalar(self.ring, pow(self.value, -1, self.ring.modulus))

    def __truediv__(self, other: "Scalar") -> "Scalar":
        return self * other.inverse()

    def sort_key(self) -> tuple:
        """Total order used to pick canonical coset representatives.

        For Q and Z, nonnegatives come first ordered by magnitude, then
        negatives; for Fp and Z/n, residues order naturally.  Documented and
        deterministic so that {u, -u} always has a unique minimum.
        """
        if self.ring.is_modular:
            return (0, self.value, 1)
        v = Fraction(self.value)
        if v >= 0:
            return (0, v.numerator, v.denominator)
        return (1, -v.numerator, v.denominator)

    def __str__(self) -> str:
        if self.ring.kind == "Q" and isinstance(self.value, Fraction):
            if self.value.denominator == 1:
                return str(self.value.numerator)
            return f"{self.value.numerator}/{self.value.denominator}"
        return str(self.value)

    @staticmethod
    def parse(ring: RingSpec, text: str) -> "Scalar":
        text = text.strip()
        try:
            if "/" in text:
                if ring.kind != "Q":
                    raise RingError(f"fraction {text!r} only valid over Q")
                num, den = text.split("/")
                return Scalar.of(ring, Fraction(int(num), int(den)))
            return Scalar.of(ring, int(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise RingError(f"bad scalar {text!r} over {ring}") from exc


def zero(ring: RingSpec) -> Scalar:
    return Scalar.of(ring, 0)


def one(ring: RingSpec) -> Scalar:
    return Scalar.of(ring, 1)
