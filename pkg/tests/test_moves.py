import random

import pytest

from foamcalc.diagram import (
    DOWN,
    UP,
    CapT,
    CupT,
    ForkT,
    GateT,
    JoinT,
    SlicedDiagram,
    disjoint_union,
    evaluate,
    forget,
    gamma_bar,
    planar_invariant,
    serialize_diagram,
)
from foamcalc.matrix import Matrix, block_swap
from foamcalc.moves import (
    InvariantViolated,
    Move,
    PreconditionFailed,
    apply_move,
    enumerate_moves,
    pearl_at,
)
from foamcalc.rings import RING_Q, ring_fp
from foamcalc.samples import random_diagram, random_gl_matrix

RING = RING_Q


def invariant_preserved(d, mv):
    before = planar_invariant(d).unit
    out = apply_move(d, mv)
    assert planar_invariant(out).unit == before
    return out


def test_r1_emits_block_swap_circle():
    rng = random.Random(1)
    a = random_gl_matrix(rng, RING, 2)
    d = gamma_bar(a)
    out = invariant_preserved(d, Move("R1", 1, 1, "insert"))
    # the compensating circle carries the rank-4 block swap
    found = [t for sl in out.slices for _, t in sl
             if isinstance(t, GateT) and t.rank == 4]
    assert found and found[0].matrix == block_swap(RING, 2, 2)
    back = invariant_preserved(out, Move("R1", 1, 1, "remove"))
    assert pearl_at(back, 1, 2) is not None


def test_sing_cap_mismatched_isos_leave_a_gate():
    rng = random.Random(2)
    phi = random_gl_matrix(rng, RING, 2)
    psi = random_gl_matrix(rng, RING, 2)
    d = SlicedDiagram(RING, (), (
        ((1, CupT(2, "w")),),
        ((1, ForkT(1, 1, UP, phi)),),
        ((1, JoinT(1, 1, UP, psi)),),
        ((1, CapT(2, "e")),),
    ))
    out = invariant_preserved(d, Move("SING_CAP", 1, 1, "cancel"))
    gates = [t for sl in out.slices for _, t in sl if isinstance(t, GateT)]
    assert gates and gates[0].matrix == psi * phi.inverse()


def test_sing_cap_matching_isos_cancel_cleanly():
    rng = random.Random(3)
    phi = random_gl_matrix(rng, RING, 2)
    d = gamma_bar(Matrix.identity(RING, 2))
    bub = apply_move(d, Move("SING_CUP", 1, 1, "insert", {"r1": 1, "iso": phi}))
    out = invariant_preserved(bub, Move("SING_CAP", 1, 1, "cancel"))
    assert out == d


def test_circle_merge_block_diagonal():
    rng = random.Random(4)
    f = random_gl_matrix(rng, RING, 1)
    g = random_gl_matrix(rng, RING, 2)
    d = disjoint_union(gamma_bar(f), gamma_bar(g))
    out = invariant_preserved(d, Move("CIRCLE_MERGE", 0, 1, "merge"))
    found = pearl_at(out, 0, 1)
    assert found is not None and found[1] == 3
    expected = Matrix.from_blocks(RING, [[f, None], [None, g]], [1, 2], [1, 2])
    assert found[2] == expected


def test_saddle_flips_fb_and_tau_prime_together():
    rng = random.Random(5)
    a = random_gl_matrix(rng, RING, 2)
    d = gamma_bar(a)
    sad = invariant_preserved(d, Move("SADDLE", 1, 1, "insert"))
    # the saddle inserts a cap and a cup, changing tau' by tau(rank)
    from foamcalc.diagram import tau_prime
    from foamcalc.kgroups import tau
    assert tau_prime(sad).unit == tau_prime(d).unit * tau(2, RING).unit
    invariant_preserved(sad, Move("SADDLE", 1, 1, "remove"))


def test_markov_stab_preserves_planar_invariant_exactly():
    rng = random.Random(6)
    for n in (1, 2):
        a = random_gl_matrix(rng, RING, n)
        d = gamma_bar(a)
        invariant_preserved(d, Move("MARKOV_STAB", 1, 1, "stabilize"))


def test_vertex_slide_moves_merge_below_split():
    rng = random.Random(7)
    phi = random_gl_matrix(rng, RING, 2)
    psi = random_gl_matrix(rng, RING, 2)
    d = SlicedDiagram(RING, (), (
        ((1, CupT(2, "w")),),
        ((2, CupT(1, "w")),),
        ((1, ForkT(1, 1, UP, phi)),),
        ((2, JoinT(1, 1, UP, psi)),),
        ((2, ForkT(1, 1, UP, psi)),),
        ((1, JoinT(1, 1, UP, phi)),),
        ((2, CapT(1, "e")),),
        ((1, CapT(2, "e")),),
    ))
    out = invariant_preserved(d, Move("VERTEX_SLIDE", 2, 1, "right"))
    assert isinstance(out.slices[2][0][1], JoinT)
    assert isinstance(out.slices[3][0][1], ForkT)


def test_enumerate_moves_deterministic_and_sound():
    d = random_diagram(RING, seed=11, max_strands=2, max_rank=2, max_ops=1,
                       max_components=1)
    moves = enumerate_moves(d, max_rank=1)
    assert moves == enumerate_moves(d, max_rank=1)
    keys = [m.key() for m in moves]
    assert keys == sorted(keys)
    before = planar_invariant(d).unit
    for mv in moves[:40]:
        out = apply_move(d, mv)
        assert planar_invariant(out).unit == before


def test_enumerate_includes_circle_death_only_for_identity_monodromy():
    ident = gamma_bar(Matrix.identity(RING, 2))
    nontrivial = gamma_bar(Matrix.build(RING, [[5]]))
    deaths = [m for m in enumerate_moves(ident, include_inserts=False)
              if m.move == "CIRCLE_DEATH"]
    assert deaths
    deaths2 = [m for m in enumerate_moves(nontrivial, include_inserts=False)
               if m.move == "CIRCLE_DEATH"]
    assert not deaths2


def test_enumerate_on_empty_diagram_offers_births_per_rank():
    empty = SlicedDiagram(RING, (), ())
    births = [m for m in enumerate_moves(empty, max_rank=3) if m.move == "CIRCLE_BIRTH"]
    ranks = sorted({m.params["rank"] for m in births})
    assert ranks == [0, 1, 2, 3]


def test_apply_move_precondition_failures_are_reported():
    d = gamma_bar(Matrix.build(RING, [[5]]))
    with pytest.raises(PreconditionFailed):
        apply_move(d, Move("CIRCLE_DEATH", 0, 1, "apply"))
    with pytest.raises(PreconditionFailed):
        apply_move(d, Move("R1", 9, 1, "remove"))


def test_verify_flag_passes_on_registered_moves():
    d = gamma_bar(Matrix.build(RING, [[5]]))
    apply_move(d, Move("ISOTOPY_ZIGZAG", 1, 1, "insert", {"side": "right"}), verify=True)


def test_cross_macro_counts_as_two_vertices_after_forget():
    d = random_diagram(RING, seed=13)
    f = forget(d)
    joins = [t for sl in d.slices for _, t in sl if isinstance(t, JoinT)]
    forks = [t for sl in d.slices for _, t in sl if isinstance(t, ForkT)]
    assert len(f.vertices) == len(joins) + len(forks)


def test_move_json_round_trip():
    rng = random.Random(17)
    m = Move("SING_CUP", 3, 2, "insert", {"r1": 1, "iso": random_gl_matrix(rng, RING, 2)})
    again = Move.from_json(RING, m.to_json())
    assert again == m


def test_vertex_slide_lowers_the_lowest_merge():
    rng = random.Random(23)
    phi = random_gl_matrix(rng, RING, 2)
    psi = random_gl_matrix(rng, RING, 2)
    d = SlicedDiagram(RING, (), (
        ((1, CupT(2, "w")),),
        ((2, CupT(1, "w")),),
        ((1, ForkT(1, 1, UP, phi)),),
        ((2, JoinT(1, 1, UP, psi)),),
        ((2, ForkT(1, 1, UP, psi)),),
        ((1, JoinT(1, 1, UP, phi)),),
        ((2, CapT(1, "e")),),
        ((1, CapT(2, "e")),),
    ))

    def lowest_merge(diagram):
        return min(k for k, sl in enumerate(diagram.slices)
                   for _, t in sl if isinstance(t, JoinT))

    out = apply_move(d, Move("VERTEX_SLIDE", 2, 1, "right"))
    assert lowest_merge(out) < lowest_merge(d)


def test_random_diagram_contract():
    from foamcalc.diagram import validate_diagram
    a = random_diagram(RING, seed=42)
    b = random_diagram(RING, seed=42)
    c = random_diagram(RING, seed=43)
    assert a == b
    assert a != c
    assert validate_diagram(a) == []
    assert a.is_closed
    small = random_diagram(RING, seed=5, max_strands=1, max_rank=1, max_ops=1,
                           max_components=1, max_zigzags=0)
    from foamcalc.diagram import evaluate as _ev
    assert all(r <= 1 for lv in _ev(small).levels for r, _ in lv)
