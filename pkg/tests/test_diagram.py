import random

import pytest

from foamcalc.diagram import (
    DOWN,
    UP,
    CapT,
    CupT,
    DiagramError,
    ForkT,
    GateT,
    IdT,
    JoinT,
    SlicedDiagram,
    diagram_from_json,
    diagram_to_json,
    disjoint_union,
    evaluate,
    forget,
    gamma_bar,
    parse_diagram,
    planar_fB,
    planar_invariant,
    reflect_reverse,
    serialize_diagram,
    tau_prime,
    validate_diagram,
)
from foamcalc.foam import abstract_invariant, validate_abstract
from foamcalc.kgroups import k1_eq, k1_mul, k1_of, k1_project_quotient, tau
from foamcalc.matrix import Matrix, block_swap
from foamcalc.rings import RING_Q, RING_Z, ring_fp
from foamcalc.samples import random_diagram, random_gl_matrix

RINGS = [RING_Q, ring_fp(7), RING_Z]


def test_parse_compact_circle():
    d = parse_diagram("ring Q; cup_w 1@1; cap_e 1@1;")
    assert d.is_closed
    f = forget(d)
    assert len(f.circles) == 1 and f.circles[0].rank == 1
    assert f.circles[0].monodromy == Matrix.identity(RING_Q, 1)
    assert planar_invariant(d).unit.value == 1


def test_parse_gate_with_scalar_matrix():
    d = parse_diagram("ring Q\ncup_w 1@1\ngate 1 u [2]@1\ncap_e 1@1\n")
    gates = [t for sl in d.slices for _, t in sl if isinstance(t, GateT)]
    assert len(gates) == 1
    assert gates[0].matrix.entries[0][0].value == 2


def test_parse_reports_semantic_error_with_slice():
    with pytest.raises(DiagramError) as err:
        parse_diagram("ring Q\ncup_w 1@1\ncap_e 2@1\n")
    assert err.value.slice_index == 1


def test_validate_diagram_examples():
    ok = gamma_bar(Matrix.identity(RING_Q, 2))
    assert validate_diagram(ok) == []
    bad = SlicedDiagram(RING_Q, (), (((1, CupT(1, "w")),), ((1, ForkT(1, 1, UP, Matrix.identity(RING_Q, 2))),)))
    assert validate_diagram(bad)
    rank_zero = parse_diagram("ring Q; cup_w 0@1; cap_e 0@1;")
    assert validate_diagram(rank_zero) == []


def test_serialize_parse_round_trip():
    rng = random.Random(41)
    for ring in RINGS:
        for seed in range(6):
            d = random_diagram(ring, seed=seed + 100)
            text = serialize_diagram(d)
            assert parse_diagram(text) == d
            assert serialize_diagram(parse_diagram(text)) == text
            assert diagram_from_json(diagram_to_json(d)) == d


def test_cross_macro_desugars_to_join_fork():
    d = parse_diagram(
        "ring Q\ncup_w 1@1\ncup_w 2@2\ncross 1 2 u@1\ncross 2 1 u@1\ncap_e 2@2\ncap_e 1@1\n")
    kinds = [type(t).__name__ for sl in d.slices for _, t in sl]
    assert "JoinT" in kinds and "ForkT" in kinds
    f = forget(d)
    assert len(f.vertices) == 4  # two crossings, each a join-fork pair
    assert validate_abstract(f) == []


def test_tau_prime_clockwise_circle():
    for ring in RINGS:
        for r in range(0, 6):
            d = gamma_bar(Matrix.identity(ring, r))
            assert k1_eq(tau_prime(d), tau(r, ring))


def test_tau_prime_zigzag_insensitive():
    # a circle with a zigzag straightened vs not: equal tau' and invariant
    plain = gamma_bar(Matrix.identity(RING_Q, 1))
    zigzag = SlicedDiagram(RING_Q, (), (
        ((1, CupT(1, "w")),),
        ((2, CupT(1, "e")),),   # zigzag on the up strand
        ((1, CapT(1, "e")),),
        ((1, GateT(1, UP, Matrix.identity(RING_Q, 1))),),
        ((1, CapT(1, "e")),),
    ))
    assert validate_diagram(zigzag) == []
    assert k1_eq(tau_prime(plain), tau_prime(zigzag))
    assert k1_eq(planar_invariant(plain), planar_invariant(zigzag))


def hand_gamma_bar_invariant(a: Matrix):
    """Independent oracle for the circle invariant: assemble the four-point
    cut map by hand, then multiply the tau factors."""
    ring = a.ring
    n = a.rows
    ident = Matrix.identity(ring, n)
    zero = Matrix.zeros(ring, n, n)
    # points: q1 (level1 left, up), q2 (level1 right, down), q3, q4 (level2)
    fb = Matrix.from_blocks(ring, [
        [zero, ident, zero, zero],   # q1 <- q2 (cup_w flows right to left)
        [zero, zero, zero, ident],   # q2 <- q4 (down strand id)
        [a, zero, zero, zero],       # q3 <- q1 (gate)
        [zero, zero, ident, zero],   # q4 <- q3 (cap_e flows left to right)
    ], [n] * 4, [n] * 4)
    return fb.det() * tau(4 * n, ring).unit * tau(n, ring).unit  # tau' = tau(n)


def test_gamma_bar_invariant_matches_hand_oracle_and_det():
    rng = random.Random(43)
    for ring in RINGS:
        for n in range(0, 4):
            a = random_gl_matrix(rng, ring, n)
            d = gamma_bar(a)
            inv = planar_invariant(d)
            assert inv.unit == hand_gamma_bar_invariant(a)
            assert inv.unit == a.det()


def test_gamma_bar_trivial_examples():
    assert planar_invariant(gamma_bar(Matrix.identity(RING_Q, 1))).unit.value == 1
    assert planar_invariant(gamma_bar(Matrix.build(RING_Q, [[5]]))).unit.value == 5
    sw = block_swap(RING_Q, 1, 1)
    assert planar_invariant(gamma_bar(sw)).unit == tau(1, RING_Q).unit


def test_commutator_circle_is_trivial():
    rng = random.Random(47)
    x = random_gl_matrix(rng, RING_Q, 2)
    y = random_gl_matrix(rng, RING_Q, 2)
    comm = x * y * x.inverse() * y.inverse()
    assert planar_invariant(gamma_bar(comm)).unit.value == 1


def test_invariant_multiplicative_under_disjoint_union():
    for ring in RINGS:
        for seed in range(4):
            d1 = random_diagram(ring, seed=seed)
            d2 = random_diagram(ring, seed=seed + 50)
            u = disjoint_union(d1, d2)
            assert validate_diagram(u) == []
            assert planar_invariant(u).unit == \
                planar_invariant(d1).unit * planar_invariant(d2).unit


def test_identity_slice_refinement_invariance():
    for ring in RINGS:
        for seed in range(4):
            d = random_diagram(ring, seed=seed + 10)
            rng = random.Random(seed)
            slices = list(d.slices)
            slices.insert(rng.randint(0, len(slices)), ())
            refined = SlicedDiagram(ring, d.bottom, tuple(slices))
            assert validate_diagram(refined) == []
            assert planar_invariant(refined).unit == planar_invariant(d).unit


def test_forget_gamma_bar_is_circle():
    rng = random.Random(53)
    a = random_gl_matrix(rng, RING_Q, 2)
    f = forget(gamma_bar(a))
    assert len(f.circles) == 1 and not f.vertices
    assert f.circles[0].monodromy.det() == a.det()


def planar_theta(ring, iso_top, iso_bot):
    """cup, fork, join, cap: the theta foam drawn in the plane."""
    n = iso_top.rows
    return SlicedDiagram(ring, (), (
        ((1, CupT(n, "w")),),
        ((1, ForkT(1, n - 1, UP, iso_bot)),),
        ((1, JoinT(1, n - 1, UP, iso_top)),),
        ((1, CapT(n, "e")),),
    ))


def test_forget_planar_theta_structure():
    rng = random.Random(59)
    iso_top = random_gl_matrix(rng, RING_Q, 2)
    iso_bot = random_gl_matrix(rng, RING_Q, 2)
    d = planar_theta(RING_Q, iso_top, iso_bot)
    f = forget(d)
    assert validate_abstract(f) == []
    assert len(f.vertices) == 2 and len(f.edges) == 3 and not f.circles
    assert sorted(v.kind for v in f.vertices) == ["in", "out"]
    assert sorted(e.rank for e in f.edges) == [1, 1, 2]


def test_quotient_square_on_random_diagrams():
    for ring in RINGS:
        for seed in range(8):
            d = random_diagram(ring, seed=seed + 200)
            lhs = k1_project_quotient(planar_invariant(d))
            rhs = abstract_invariant(forget(d))
            assert lhs == rhs


def test_reflect_reverse_inverts_invariant():
    for ring in RINGS:
        for seed in range(4):
            d = random_diagram(ring, seed=seed + 300)
            rr = reflect_reverse(d)
            assert validate_diagram(rr) == []
            u = disjoint_union(d, rr)
            assert planar_invariant(u).unit.value == k1_of(ring, 1).unit.value
            assert reflect_reverse(rr) == d


def test_disjoint_union_with_empty_is_identity():
    d = random_diagram(RING_Q, seed=77)
    empty = SlicedDiagram(RING_Q, (), ())
    assert planar_invariant(disjoint_union(d, empty)).unit == planar_invariant(d).unit
    assert planar_invariant(disjoint_union(empty, d)).unit == planar_invariant(d).unit


def test_empty_diagram_invariant_is_one():
    empty = SlicedDiagram(RING_Q, (), ())
    assert planar_invariant(empty).unit.value == 1
    assert tau_prime(empty).unit.value == 1
