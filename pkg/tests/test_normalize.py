import random

import pytest

from foamcalc.diagram import (
    SlicedDiagram,
    disjoint_union,
    gamma_bar,
    parse_diagram,
    planar_invariant,
)
from foamcalc.matrix import Matrix
from foamcalc.moves import Move
from foamcalc.normalize import (
    CertStep,
    MoveCertificate,
    certificate_from_json,
    certificate_to_json,
    check_certificate,
    diagram_digest,
    normal_target,
    normalize,
)
from foamcalc.rings import RING_Q, RING_Z, ring_fp
from foamcalc.samples import random_diagram, random_gl_matrix

RINGS = [RING_Q, ring_fp(7), RING_Z]


def test_normalize_empty_diagram():
    empty = SlicedDiagram(RING_Q, (), ())
    mono, cert = normalize(empty)
    assert mono.rows == 0 and len(cert) == 0
    assert cert.start == cert.end == diagram_digest(empty)


def test_normalize_gamma_bar_is_fixed_point():
    rng = random.Random(1)
    a = random_gl_matrix(rng, RING_Q, 3)
    mono, cert = normalize(gamma_bar(a))
    assert mono == a and len(cert) == 0


def test_normalize_theta_matches_direct_invariant():
    from foamcalc.diagram import CapT, CupT, ForkT, JoinT, UP
    rng = random.Random(2)
    iso_bot = random_gl_matrix(rng, RING_Q, 3)
    iso_top = random_gl_matrix(rng, RING_Q, 3)
    theta = SlicedDiagram(RING_Q, (), (
        ((1, CupT(3, "w")),),
        ((1, ForkT(1, 2, UP, iso_bot)),),
        ((1, JoinT(1, 2, UP, iso_top)),),
        ((1, CapT(3, "e")),),
    ))
    mono, cert = normalize(theta)
    assert mono.det() == planar_invariant(theta).unit
    ok, diags = check_certificate(theta, normal_target(RING_Q, mono), cert)
    assert ok, diags


def test_normalize_random_corpus_with_certificates():
    rng = random.Random(3)
    for ring in RINGS:
        for seed in range(12):
            d = random_diagram(ring, seed=seed + 900)
            mono, cert = normalize(d)
            assert mono.det() == planar_invariant(d).unit
            target = normal_target(ring, mono)
            ok, diags = check_certificate(d, target, cert)
            assert ok, diags


def test_certificate_round_trip_and_rejections():
    d = random_diagram(RING_Q, seed=77)
    mono, cert = normalize(d)
    target = normal_target(RING_Q, mono)
    again = certificate_from_json(RING_Q, certificate_to_json(cert))
    assert again == cert
    assert check_certificate(d, target, again)[0]

    if cert.steps:
        # single mutated step is rejected at that index
        i = len(cert.steps) // 2
        s = cert.steps[i]
        bad = CertStep(Move(s.move.move, s.move.slice + 5, s.move.pos,
                            s.move.direction, s.move.params), s.pre, s.post)
        steps = list(cert.steps)
        steps[i] = bad
        ok, diags = check_certificate(d, target, MoveCertificate(cert.start, cert.end,
                                                                 tuple(steps)))
        assert not ok and f"step {i}" in diags[0]


def test_certificate_between_mismatched_invariants_rejected():
    a = gamma_bar(Matrix.build(RING_Q, [[5]]))
    b = gamma_bar(Matrix.build(RING_Q, [[7]]))
    cert = MoveCertificate(diagram_digest(a), diagram_digest(b), ())
    ok, diags = check_certificate(a, b, cert)
    assert not ok


def test_normalize_compact_circle_example():
    d = parse_diagram("ring Q; cup_w 1@1; cap_e 1@1;")
    mono, cert = normalize(d)
    assert mono.rows == 0
    assert planar_invariant(d).unit.value == 1
