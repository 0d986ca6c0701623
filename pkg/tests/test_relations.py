import random

from foamcalc.diagram import planar_invariant
from foamcalc.normalize import check_certificate
from foamcalc.relations import (
    commutator_certificate,
    pants_certificate,
    tripod_certificate,
    tube_certificate,
)
from foamcalc.rings import RING_Q, RING_Z, ring_fp
from foamcalc.samples import random_gl_matrix

RINGS = [RING_Q, ring_fp(7), RING_Z]


def test_pants_realizes_the_product_relation():
    rng = random.Random(1)
    for ring in RINGS:
        a = random_gl_matrix(rng, ring, 2)
        b = random_gl_matrix(rng, ring, 2)
        union, product, cert = pants_certificate(a, b)
        ok, diags = check_certificate(union, product, cert)
        assert ok, diags
        assert planar_invariant(union).unit == planar_invariant(product).unit
        assert planar_invariant(product).unit == (a * b).det()


def test_tube_annihilates_inverse_pair():
    rng = random.Random(2)
    for ring in RINGS:
        a = random_gl_matrix(rng, ring, 2)
        union, empty, cert = tube_certificate(a)
        ok, diags = check_certificate(union, empty, cert)
        assert ok, diags
        assert planar_invariant(union).unit.value == planar_invariant(empty).unit.value


def test_tripod_realizes_direct_sum():
    rng = random.Random(3)
    for ring in RINGS:
        a1 = random_gl_matrix(rng, ring, 1)
        a3 = random_gl_matrix(rng, ring, 2)
        union, merged, cert = tripod_certificate(a1, a3)
        ok, diags = check_certificate(union, merged, cert)
        assert ok, diags
        assert planar_invariant(merged).unit == a1.det() * a3.det()


def test_commutator_is_null_cobordant():
    rng = random.Random(4)
    for ring in RINGS:
        x = random_gl_matrix(rng, ring, 2)
        y = random_gl_matrix(rng, ring, 2)
        circle, empty, cert = commutator_certificate(x, y)
        ok, diags = check_certificate(circle, empty, cert)
        assert ok, diags
        assert planar_invariant(circle).unit.value == \
            planar_invariant(empty).unit.value
