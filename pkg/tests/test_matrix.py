import itertools
import random

import pytest

from foamcalc.matrix import (
    Matrix,
    block_direct_sum,
    block_swap,
    matrix_from_json,
    matrix_to_json,
    parse_matrix_literal,
)
from foamcalc.rings import RING_Q, RING_Z, NotInvertible, RingError, Scalar, ring_fp, ring_zmod

RINGS = [RING_Q, RING_Z, ring_fp(7), ring_zmod(12)]


def leibniz_det(m: Matrix) -> Scalar:
    """Permutation-expansion determinant, the independent oracle (n <= 5)."""
    n = m.rows
    total = Scalar.of(m.ring, 0)
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = Scalar.of(m.ring, sign)
        for i in range(n):
            term = term * m.entries[i][perm[i]]
        total = total + term
    return total


def random_matrix(rng, ring, n):
    return Matrix.build(ring, [[rng.randint(-4, 4) for _ in range(n)] for _ in range(n)])


def random_unit_det_matrix(rng, ring, n):
    """Product of elementary shears and a +-1 diagonal: always invertible."""
    m = Matrix.identity(ring, n)
    for _ in range(2 * n + 2):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        e = Matrix.identity(ring, n).to_lists()
        e[i][j] = Scalar.of(ring, rng.randint(-3, 3))
        m = m * Matrix(ring, n, n, tuple(tuple(r) for r in e))
    d = Matrix.identity(ring, n).to_lists()
    for i in range(n):
        d[i][i] = Scalar.of(ring, rng.choice([-1, 1]))
    return m * Matrix(ring, n, n, tuple(tuple(r) for r in d))


def test_det_trivial_examples():
    assert Matrix.build(RING_Q, [[2]]).det().value == 2
    assert Matrix.build(RING_Q, [[1, 1], [0, 1]]).det().value == 1
    assert Matrix.zeros(RING_Q, 0, 0).det().value == 1


def test_det_matches_leibniz_oracle():
    rng = random.Random(7)
    for ring in RINGS:
        for n in range(1, 5):
            for _ in range(8):
                m = random_matrix(rng, ring, n)
                assert m.det() == leibniz_det(m)


def test_det_multiplicative():
    rng = random.Random(11)
    for ring in RINGS:
        for n in range(1, 6):
            a = random_matrix(rng, ring, n)
            b = random_matrix(rng, ring, n)
            assert (a * b).det() == a.det() * b.det()


def test_det_rejects_non_square():
    with pytest.raises(RingError):
        Matrix.zeros(RING_Q, 2, 3).det()


def test_inverse_trivial_examples():
    m = Matrix.build(RING_Q, [[2]])
    assert m.inverse().entries[0][0].value == Scalar.parse(RING_Q, "1/2").value
    i3 = Matrix.identity(RING_Q, 3)
    assert i3.inverse() == i3
    shear = Matrix.build(RING_Q, [[1, 1], [0, 1]])
    assert shear.inverse() == Matrix.build(RING_Q, [[1, -1], [0, 1]])


def test_inverse_round_trip_all_rings():
    rng = random.Random(13)
    for ring in RINGS:
        for n in range(1, 6):
            m = random_unit_det_matrix(rng, ring, n)
            inv = m.inverse()
            ident = Matrix.identity(ring, n)
            assert m * inv == ident
            assert inv * m == ident


def test_inverse_zmod_with_zero_divisor_pivot():
    # det = 4 - 9 = -5 = 1 mod 6, but both first-column entries are zero divisors.
    m = Matrix.build(ring_zmod(6), [[2, 3], [3, 2]])
    assert m * m.inverse() == Matrix.identity(ring_zmod(6), 2)


def test_not_invertible_raises():
    with pytest.raises(NotInvertible):
        Matrix.build(RING_Z, [[2]]).inverse()
    with pytest.raises(NotInvertible):
        Matrix.build(RING_Q, [[1, 1], [1, 1]]).inverse()


def test_block_direct_sum():
    a = Matrix.build(RING_Q, [[2]])
    b = Matrix.build(RING_Q, [[3]])
    assert block_direct_sum(a, b) == Matrix.build(RING_Q, [[2, 0], [0, 3]])
    empty = Matrix.zeros(RING_Q, 0, 0)
    m = Matrix.build(RING_Q, [[1, 2], [3, 4]])
    assert block_direct_sum(empty, m) == m
    assert block_direct_sum(m, empty) == m
    assert block_direct_sum(Matrix.identity(RING_Q, 2), Matrix.identity(RING_Q, 3)) == Matrix.identity(RING_Q, 5)


def test_block_swap_acts_as_block_permutation():
    ring = RING_Q
    sw = block_swap(ring, 1, 2)
    v = Matrix.build(ring, [[10], [20], [30]])  # x1 = (10), x2 = (20,30)
    assert (sw * v) == Matrix.build(ring, [[20], [30], [10]])


def test_matrix_literal_and_json_round_trip():
    m = parse_matrix_literal(RING_Q, "[1,1/2;-3,4]")
    assert m.rows == 2 and m.entries[0][1].value == Scalar.parse(RING_Q, "1/2").value
    again = matrix_from_json(RING_Q, matrix_to_json(m))
    assert again == m
    z = Matrix.zeros(RING_Q, 0, 3)
    assert matrix_from_json(RING_Q, matrix_to_json(z)) == z
