import random

import pytest

from foamcalc.foam import (
    BOTTOM,
    IN,
    OUT,
    THICK,
    THIN0,
    THIN1,
    TOP,
    AbstractFoam,
    Circle,
    Edge,
    EndPort,
    OpenEnd,
    StrongCut,
    Vertex,
    VertexPort,
    ZeroFoam,
    abstract_foam_from_json,
    abstract_foam_to_json,
    abstract_invariant,
    assemble_fB,
    boundary_delta,
    canonical_strong_cut,
    gamma0,
    refine_cut,
    validate_abstract,
)
from foamcalc.kgroups import k1_of, k1_project_quotient, tau
from foamcalc.matrix import Matrix, block_direct_sum
from foamcalc.rings import RING_Q, RING_Z, ring_fp
from foamcalc.samples import random_closed_foam, random_gl_matrix, random_open_cobordism

RINGS = [RING_Q, ring_fp(7), RING_Z]


def circle_foam(ring, rank, monodromy) -> AbstractFoam:
    return AbstractFoam(ring, (Circle(0, rank, monodromy),), (), (), ())


def theta_foam(ring, r_thin0=1, r_thin1=1, iso_in=None, iso_out=None,
               transports=None) -> AbstractFoam:
    """Two vertices joined by a thick edge and two thin edges."""
    r2 = r_thin0 + r_thin1
    iso_in = iso_in or Matrix.identity(ring, r2)
    iso_out = iso_out or Matrix.identity(ring, r2)
    t_thick, t0, t1 = transports or (Matrix.identity(ring, r2),
                                     Matrix.identity(ring, r_thin0),
                                     Matrix.identity(ring, r_thin1))
    vin = Vertex(0, IN, iso_in)
    vout = Vertex(1, OUT, iso_out)
    edges = (
        Edge(0, r2, VertexPort(0, THICK), VertexPort(1, THICK), t_thick),
        Edge(1, r_thin0, VertexPort(1, THIN0), VertexPort(0, THIN0), t0),
        Edge(2, r_thin1, VertexPort(1, THIN1), VertexPort(0, THIN1), t1),
    )
    return AbstractFoam(ring, (), (vin, vout), edges, ())


def test_validate_theta_ok():
    assert validate_abstract(theta_foam(RING_Q)) == []


def test_validate_reports_rank_mismatch():
    f = theta_foam(RING_Q)
    bad = AbstractFoam(RING_Q, (), f.vertices,
                       (f.edges[0], Edge(1, 2, f.edges[1].source, f.edges[1].target,
                                         Matrix.identity(RING_Q, 2)), f.edges[2]), ())
    assert any("RankMismatch" in msg for msg in validate_abstract(bad))


def test_validate_reports_singular_monodromy():
    f = circle_foam(RING_Q, 1, Matrix.build(RING_Q, [[0]]))
    assert any("NotInvertible" in msg for msg in validate_abstract(f))


def test_gamma0_examples():
    assert gamma0(ZeroFoam.of([(1, 2), (-1, 2)])).value == 0
    r0, r1, r2 = 3, 2, 1
    z = ZeroFoam.of([(1, r0), (-1, r0), (1, r1 + r2), (-1, r2)])
    assert gamma0(z).value == r1
    assert gamma0(ZeroFoam.of([(1, 1), (1, 3)])).value == 4


def interval_foam(ring, rank):
    ends = (OpenEnd(0, BOTTOM), OpenEnd(1, TOP))
    e = Edge(0, rank, EndPort(0), EndPort(1), Matrix.identity(ring, rank))
    return AbstractFoam(ring, (), (), (e,), ends)


def best_known_figure_cobordism(ring, r0=2, r1=1, r2=1):
    """Four bottom points flowing to one top point through one split vertex."""
    ends = (OpenEnd(0, BOTTOM), OpenEnd(1, BOTTOM), OpenEnd(2, BOTTOM),
            OpenEnd(3, BOTTOM), OpenEnd(4, TOP))
    v = Vertex(0, OUT, Matrix.identity(ring, r1 + r2))
    edges = (
        Edge(0, r0, EndPort(0), EndPort(1), Matrix.identity(ring, r0)),
        Edge(1, r1 + r2, EndPort(2), VertexPort(0, THICK), Matrix.identity(ring, r1 + r2)),
        Edge(2, r1, VertexPort(0, THIN0), EndPort(4), Matrix.identity(ring, r1)),
        Edge(3, r2, VertexPort(0, THIN1), EndPort(3), Matrix.identity(ring, r2)),
    )
    return AbstractFoam(ring, (), (v,), edges, ends)


def test_boundary_delta_trivial_interval():
    assert boundary_delta(interval_foam(RING_Q, 4)).value == 0


def test_boundary_delta_four_to_one_cobordism():
    f = best_known_figure_cobordism(RING_Q)
    assert validate_abstract(f) == []
    assert boundary_delta(f).value == 0


def test_boundary_delta_pair_creation_cup():
    ends = (OpenEnd(0, TOP), OpenEnd(1, TOP))
    e = Edge(0, 3, EndPort(0), EndPort(1), Matrix.identity(RING_Q, 3))
    f = AbstractFoam(RING_Q, (), (), (e,), ends)
    assert boundary_delta(f).value == 0


def test_boundary_delta_zero_on_random_cobordisms():
    rng = random.Random(5)
    for ring in RINGS:
        for _ in range(25):
            f = random_open_cobordism(rng, ring)
            assert validate_abstract(f) == []
            assert boundary_delta(f).value == 0


def test_canonical_cut_counts():
    assert canonical_strong_cut(circle_foam(RING_Q, 1, Matrix.identity(RING_Q, 1))) == \
        StrongCut.of({}, {0: 1})
    theta_cut = canonical_strong_cut(theta_foam(RING_Q))
    assert theta_cut == StrongCut.of({0: 1, 1: 1, 2: 1}, {})
    circles = AbstractFoam(RING_Q, tuple(Circle(i, 1, Matrix.identity(RING_Q, 1))
                                         for i in range(3)), (), (), ())
    assert canonical_strong_cut(circles) == StrongCut.of({}, {0: 1, 1: 1, 2: 1})


def test_fb_circle_one_point_is_monodromy():
    a = Matrix.build(RING_Q, [[2, 1], [1, 1]])
    fb = assemble_fB(circle_foam(RING_Q, 2, a))
    assert fb.matrix == a


def test_fb_circle_two_points_block_shape():
    a = Matrix.build(RING_Q, [[2, 1], [1, 1]])
    f = circle_foam(RING_Q, 2, a)
    cut = refine_cut(canonical_strong_cut(f), extra_circle={0: 1})
    fb = assemble_fB(f, cut)
    ident = Matrix.identity(RING_Q, 2)
    zero = Matrix.zeros(RING_Q, 2, 2)
    expected = Matrix.from_blocks(RING_Q, [[zero, a], [ident, zero]], [2, 2], [2, 2])
    assert fb.matrix == expected
    assert fb.total_rank == 4


def test_fb_theta_matches_hand_built_block_permutation():
    f = theta_foam(RING_Q, 1, 1)
    fb = assemble_fB(f)
    # hand-built: thick point feeds both thin points through iso_out^-1 = I,
    # thin points feed the thick point through iso_in = I
    expected = Matrix.build(RING_Q, [
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [1, 0, 0, 0],
        [0, 1, 0, 0],
    ])
    assert fb.matrix == expected
    assert fb.matrix.det() == tau(2, RING_Q).unit


def test_fb_unit_det_and_cut_refinement_scales_by_tau():
    rng = random.Random(23)
    for ring in RINGS:
        for _ in range(12):
            f = random_closed_foam(rng, ring)
            base = assemble_fB(f)
            d0 = base.matrix.det()
            assert d0.is_unit()
            extra_e = {e.id: rng.randint(0, 2) for e in f.edges}
            extra_c = {c.id: rng.randint(0, 2) for c in f.circles}
            cut = refine_cut(canonical_strong_cut(f), extra_e, extra_c)
            d1 = assemble_fB(f, cut).matrix.det()
            # expected scale: product of tau(rank) over every added point
            scale = k1_of(ring, 1).unit
            for e in f.edges:
                for _ in range(extra_e[e.id]):
                    scale = scale * tau(e.rank, ring).unit
            for c in f.circles:
                for _ in range(extra_c[c.id]):
                    scale = scale * tau(c.rank, ring).unit
            assert d1 == d0 * scale


def test_abstract_invariant_examples():
    rng = random.Random(3)
    a = random_gl_matrix(rng, RING_Q, 2)
    inv = abstract_invariant(circle_foam(RING_Q, 2, a))
    assert inv == k1_project_quotient(k1_of(RING_Q, a.det().value))

    # disjoint circles with inverse monodromies cancel
    f = AbstractFoam(RING_Q, (Circle(0, 2, a), Circle(1, 2, a.inverse())), (), (), ())
    assert abstract_invariant(f).unit_mod_sign.value == 1

    # commutator monodromy is trivial in the quotient
    x = random_gl_matrix(rng, RING_Q, 2)
    y = random_gl_matrix(rng, RING_Q, 2)
    comm = x * y * x.inverse() * y.inverse()
    assert abstract_invariant(circle_foam(RING_Q, 2, comm)).unit_mod_sign.value == 1


def test_abstract_invariant_disjoint_union_multiplies():
    rng = random.Random(17)
    for ring in RINGS:
        f1 = random_closed_foam(rng, ring)
        f2 = random_closed_foam(rng, ring)
        shift_c = max((c.id for c in f1.circles), default=-1) + 1
        shift_v = max((v.id for v in f1.vertices), default=-1) + 1
        shift_e = max((e.id for e in f1.edges), default=-1) + 1

        def shift_port(p):
            return VertexPort(p.vertex + shift_v, p.slot)

        union = AbstractFoam(
            ring,
            f1.circles + tuple(Circle(c.id + shift_c, c.rank, c.monodromy) for c in f2.circles),
            f1.vertices + tuple(Vertex(v.id + shift_v, v.kind, v.iso) for v in f2.vertices),
            f1.edges + tuple(Edge(e.id + shift_e, e.rank, shift_port(e.source),
                                  shift_port(e.target), e.transport) for e in f2.edges),
            (),
        )
        lhs = abstract_invariant(union)
        prod = k1_of(ring, abstract_invariant(f1).unit_mod_sign.value * abstract_invariant(f2).unit_mod_sign.value)
        assert lhs == k1_project_quotient(prod)


def test_foam_json_round_trip():
    rng = random.Random(9)
    for ring in RINGS:
        f = random_closed_foam(rng, ring)
        assert abstract_foam_from_json(abstract_foam_to_json(f)) == f
        g = random_open_cobordism(rng, ring)
        assert abstract_foam_from_json(abstract_foam_to_json(g)) == g
