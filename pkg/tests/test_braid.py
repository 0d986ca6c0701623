import random

import pytest

from foamcalc.braid import (
    closure_unit,
    BraidFoamWord,
    Fork,
    Gate,
    Join,
    Swap,
    braid_close,
    markov_stabilize,
    top_ranks,
    validate_word,
    word_from_json,
    word_to_json,
)
from foamcalc.foam import abstract_invariant, assemble_fB, validate_abstract
from foamcalc.kgroups import k1_project_quotient, k1_of, tau
from foamcalc.matrix import Matrix, block_swap
from foamcalc.rings import RING_Q, RING_Z, ring_fp
from foamcalc.samples import random_braid_word, random_gl_matrix, random_matchings

RINGS = [RING_Q, ring_fp(7), RING_Z]


def test_empty_word_closes_to_circle():
    rng = random.Random(1)
    a = random_gl_matrix(rng, RING_Q, 3)
    w = BraidFoamWord.of(RING_Q, [3], [])
    f = braid_close(w, [a])
    assert len(f.circles) == 1 and not f.vertices and not f.edges
    assert f.circles[0].rank == 3
    assert f.circles[0].monodromy == a


def test_gate_word_closes_to_circle_with_composite_monodromy():
    rng = random.Random(2)
    a = random_gl_matrix(rng, RING_Q, 2)
    w = BraidFoamWord.of(RING_Q, [2], [Gate(1, a)])
    f = braid_close(w, [Matrix.identity(RING_Q, 2)])
    assert len(f.circles) == 1
    assert f.circles[0].monodromy == a


def test_fork_then_join_closes_to_theta_like_foam():
    ring = RING_Q
    iso_f = Matrix.identity(ring, 2)
    iso_j = Matrix.identity(ring, 2)
    w = BraidFoamWord.of(ring, [2], [Fork(1, 1, 1, iso_f), Join(1, iso_j)])
    f = braid_close(w, [Matrix.identity(ring, 2)])
    assert validate_abstract(f) == []
    assert len(f.vertices) == 2 and len(f.edges) == 3 and not f.circles
    kinds = sorted(v.kind for v in f.vertices)
    assert kinds == ["in", "out"]
    ranks = sorted(e.rank for e in f.edges)
    assert ranks == [1, 1, 2]
    # same invariant as the hand theta: det is +-1, so quotient class is 1
    assert abstract_invariant(f).unit_mod_sign.value == 1


def test_swap_word_net_transport_is_block_swap():
    ring = RING_Q
    w = BraidFoamWord.of(ring, [1, 2], [Swap(1), Swap(1)])
    assert top_ranks(w) == [1, 2]
    rng = random.Random(3)
    a = random_gl_matrix(rng, ring, 1)
    b = random_gl_matrix(rng, ring, 2)
    f = braid_close(w, [a, b])
    assert validate_abstract(f) == []
    # double crossing is net trivial: invariant = det(a) det(b) up to sign
    expected = k1_project_quotient(k1_of(ring, a.det().value * b.det().value))
    assert abstract_invariant(f) == expected


def test_validate_word_catches_bad_shapes():
    ring = RING_Q
    w = BraidFoamWord.of(ring, [1], [Join(1, Matrix.identity(ring, 2))])
    assert validate_word(w)
    w2 = BraidFoamWord.of(ring, [2], [Fork(1, 1, 2, Matrix.identity(ring, 3))])
    assert validate_word(w2)


def test_braid_close_requires_matched_ranks():
    ring = RING_Q
    w = BraidFoamWord.of(ring, [2], [Fork(1, 1, 1, Matrix.identity(ring, 2))])
    with pytest.raises(ValueError):
        braid_close(w, [Matrix.identity(ring, 1), Matrix.identity(ring, 1)])


def test_markov_stabilization_preserves_quotient_and_scales_det():
    rng = random.Random(29)
    for ring in RINGS:
        for _ in range(8):
            w = random_braid_word(rng, ring)
            matchings = random_matchings(rng, ring, w)
            f0 = braid_close(w, matchings)
            w1 = markov_stabilize(w)
            r_n = top_ranks(w)[-1]
            ext = matchings + [Matrix.identity(ring, r_n)]
            f1 = braid_close(w1, ext)
            assert abstract_invariant(f0) == abstract_invariant(f1)
            u0 = closure_unit(w, matchings)
            u1 = closure_unit(w1, ext)
            assert u1.unit == u0.unit * tau(r_n, ring).unit

            # the closure-cut unit matches the canonical-cut det up to sign
            assert k1_project_quotient(u0) == abstract_invariant(f0)
            assert k1_project_quotient(u1) == abstract_invariant(f1)

            # double stabilization agrees again in the quotient and in full
            w2 = markov_stabilize(w1)
            f2 = braid_close(w2, ext + [Matrix.identity(ring, r_n)])
            assert abstract_invariant(f0) == abstract_invariant(f2)
            u2 = closure_unit(w2, ext + [Matrix.identity(ring, r_n)])
            assert u2.unit == u0.unit


def test_word_json_round_trip():
    rng = random.Random(31)
    for ring in RINGS:
        w = random_braid_word(rng, ring)
        assert word_from_json(word_to_json(w)) == w
