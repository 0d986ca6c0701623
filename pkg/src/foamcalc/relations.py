"""Certified move sequences for the defining unit-group relations.

Each builder returns (start diagram, end diagram, certificate): the pants
composition law, the annulus cancelling a circle against its inverse, the
commutator null-cobordism, and the circular-tripod direct-sum relation.
Every sequence runs forward through registered moves; the workhorses are a
circle-splitting script (pull one factor of the monodromy off onto its own
circle and float it free) and its merging counterpart (sink a circle into a
neighbour, absorb it as a transport, and fuse).
"""

from __future__ import annotations

from .diagram import SlicedDiagram, disjoint_union, gamma_bar
from .matrix import Matrix, block_direct_sum
from .moves import Move, apply_move
from .normalize import CertStep, MoveCertificate, diagram_digest
from .rings import RingError


def _record(d0: SlicedDiagram, moves) -> tuple:
    steps = []
    cur = d0
    for mv in moves:
        new = apply_move(cur, mv)
        steps.append(CertStep(mv, diagram_digest(cur), diagram_digest(new)))
        cur = new
    return cur, steps


def circle_split_moves(offset: int, alpha: Matrix, beta: Matrix) -> list:
    """Split the circle with monodromy alpha*beta at slices offset..offset+2
    into stacked circles with monodromies alpha, then beta."""
    moves = [
        Move("ISOTOPY_SLIDE", offset + 1, 1, "split",
             {"first": beta, "second": alpha}),
        Move("SPLIT_MONODROMY", offset + 1, 1, "split"),
        Move("ISOTOPY_SLIDE", offset + 1, 1, "unpad"),
        Move("CIRCLE_ACROSS_EDGE", offset + 1, 2, "right"),
    ]
    # bubble the remaining gate, then the cap, below the extruded circle
    for tile_slice in (offset + 4, offset + 5):
        for step in range(3):
            moves.append(Move("ISOTOPY_SLIDE", tile_slice - 1 - step, 1, "transpose"))
    return moves


def circle_merge_moves(offset: int) -> list:
    """Merge the stacked circles at slices offset..offset+2 (monodromy a)
    and offset+3..offset+5 (monodromy b) into one circle with monodromy
    a*b: sink the second circle into the first, absorb, fuse."""
    moves = []
    # bubble the upper circle's slices down past the cap, then past the gate
    for barrier in (offset + 2, offset + 1):
        src = offset + 3 if barrier == offset + 2 else offset + 2
        for i in range(3):
            moves.append(Move("ISOTOPY_SLIDE", src - 1 + i, 1, "transpose"))
    moves.append(Move("CIRCLE_ACROSS_EDGE", offset + 1, 1, "right"))
    moves.append(Move("SPLIT_MONODROMY", offset + 1, 2, "absorb"))
    moves.append(Move("ISOTOPY_SLIDE", offset + 1, 1, "fuse"))
    return moves


def pants_certificate(alpha: Matrix, beta: Matrix) -> tuple:
    """gamma_bar(alpha) |_| gamma_bar(beta) to gamma_bar(alpha*beta)."""
    if alpha.ring != beta.ring or alpha.rows != beta.rows:
        raise RingError("pants needs automorphisms of one module")
    union = disjoint_union(gamma_bar(alpha), gamma_bar(beta))
    product = gamma_bar(alpha * beta)
    final, steps = _record(union, circle_merge_moves(0))
    if final != product:
        raise AssertionError("circle merge script missed its target")
    return union, product, MoveCertificate(diagram_digest(union),
                                           diagram_digest(product), tuple(steps))


def tube_certificate(alpha: Matrix) -> tuple:
    """gamma_bar(alpha) |_| gamma_bar(alpha^-1) to the empty diagram."""
    union = disjoint_union(gamma_bar(alpha), gamma_bar(alpha.inverse()))
    moves = circle_merge_moves(0) + [Move("CIRCLE_DEATH", 0, 1, "apply")]
    final, steps = _record(union, moves)
    empty = SlicedDiagram(alpha.ring, (), ())
    if final != empty:
        raise AssertionError("annulus script missed the empty diagram")
    return union, empty, MoveCertificate(diagram_digest(union),
                                         diagram_digest(empty), tuple(steps))


def tripod_certificate(alpha1: Matrix, alpha3: Matrix) -> tuple:
    """Merge two circles into the circle decorated by the direct sum."""
    if alpha1.ring != alpha3.ring:
        raise RingError("tripod needs one coefficient ring")
    union = disjoint_union(gamma_bar(alpha1), gamma_bar(alpha3))
    merged = gamma_bar(block_direct_sum(alpha1, alpha3))
    final, steps = _record(union, [Move("CIRCLE_MERGE", 0, 1, "merge")])
    assert final == merged
    return union, merged, MoveCertificate(diagram_digest(union),
                                          diagram_digest(merged), tuple(steps))


def pearl_swap_moves(offset: int) -> list:
    """Transpositions exchanging the three-slice circles at offset and
    offset+3."""
    moves = []
    for i in range(3):
        src = offset + 3 + i
        for _ in range(3):
            moves.append(Move("ISOTOPY_SLIDE", src - 1, 1, "transpose"))
            src -= 1
    return moves


def commutator_certificate(x: Matrix, y: Matrix) -> tuple:
    """gamma_bar(x y x^-1 y^-1) to the empty diagram."""
    if x.ring != y.ring or x.rows != y.rows:
        raise RingError("commutator needs automorphisms of one module")
    ring = x.ring
    xi, yi = x.inverse(), y.inverse()
    d0 = gamma_bar(x * y * xi * yi)

    moves = []
    moves += circle_split_moves(0, x * y, xi * yi)   # [xy][x^-1 y^-1]
    moves += circle_split_moves(0, x, y)             # [x][y][x^-1 y^-1]
    moves += circle_split_moves(6, xi, yi)           # [x][y][x^-1][y^-1]
    moves += pearl_swap_moves(3)                     # [x][x^-1][y][y^-1]
    moves += circle_merge_moves(0)                   # [id][y][y^-1]
    moves.append(Move("CIRCLE_DEATH", 0, 1, "apply"))
    moves += circle_merge_moves(0)                   # [id]
    moves.append(Move("CIRCLE_DEATH", 0, 1, "apply"))

    empty = SlicedDiagram(ring, (), ())
    final, steps = _record(d0, moves)
    if final != empty:
        raise AssertionError("commutator reduction missed the empty diagram")
    return d0, empty, MoveCertificate(diagram_digest(d0),
                                      diagram_digest(empty), tuple(steps))
