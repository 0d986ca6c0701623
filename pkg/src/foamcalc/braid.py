"""Braid-like foam words: all strands upward, no critical points.

A word acts on a list of ranked strands by merging, splitting, gating, and
crossing; a crossing is the merge-then-split composite whose net transport is
the block swap.  Matched words close into abstract foams, and Markov
stabilization appends a crossing against a fresh copy of the last strand.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .foam import (
    IN,
    OUT,
    THICK,
    THIN0,
    THIN1,
    AbstractFoam,
    Circle,
    Edge,
    Vertex,
    VertexPort,
    require_valid,
)
from .matrix import Matrix, block_swap, matrix_from_json, matrix_to_json
from .rings import RingError, RingSpec


@dataclass(frozen=True)
class Join:
    pos: int           # 1-based strand position; consumes pos, pos+1
    iso: Matrix        # R^{r1} (+) R^{r2} -> R^{r1+r2}


@dataclass(frozen=True)
class Fork:
    pos: int
    r1: int            # left output rank
    r2: int            # right output rank
    iso: Matrix        # R^{r1} (+) R^{r2} -> R^{r1+r2}


@dataclass(frozen=True)
class Gate:
    pos: int
    matrix: Matrix


@dataclass(frozen=True)
class Swap:
    pos: int


Generator = Union[Join, Fork, Gate, Swap]


@dataclass(frozen=True)
class BraidFoamWord:
    ring: RingSpec
    bottom_ranks: tuple
    generators: tuple

    @staticmethod
    def of(ring: RingSpec, bottom_ranks: Sequence[int], generators: Sequence[Generator]) -> "BraidFoamWord":
        return BraidFoamWord(ring, tuple(bottom_ranks), tuple(generators))


def _expand_swaps(w: BraidFoamWord) -> list:
    """Replace each Swap by its defining merge-then-split pair."""
    ranks = list(w.bottom_ranks)
    out = []
    for g in w.generators:
        if isinstance(g, Swap):
            i = g.pos - 1
            if i < 0 or i + 1 >= len(ranks):
                raise ValueError(f"swap at {g.pos} out of range")
            r1, r2 = ranks[i], ranks[i + 1]
            out.append(Join(g.pos, Matrix.identity(w.ring, r1 + r2)))
            out.append(Fork(g.pos, r2, r1, block_swap(w.ring, r2, r1)))
            ranks[i:i + 2] = [r2, r1]
        else:
            out.append(g)
            ranks = _apply_ranks(ranks, g, w.ring, check=False)
    return out


def _apply_ranks(ranks: list, g: Generator, ring: RingSpec, check: bool = True) -> list:
    ranks = list(ranks)
    i = g.pos - 1
    if isinstance(g, Join):
        if i < 0 or i + 1 >= len(ranks):
            raise ValueError(f"join at {g.pos} out of range")
        r = ranks[i] + ranks[i + 1]
        if check and (g.iso.rows != r or g.iso.cols != r or not g.iso.det().is_unit()):
            raise ValueError(f"join at {g.pos}: bad iso")
        ranks[i:i + 2] = [r]
    elif isinstance(g, Fork):
        if i < 0 or i >= len(ranks):
            raise ValueError(f"fork at {g.pos} out of range")
        if ranks[i] != g.r1 + g.r2:
            raise ValueError(f"fork at {g.pos}: rank {ranks[i]} != {g.r1}+{g.r2}")
        if check and (g.iso.rows != ranks[i] or g.iso.cols != ranks[i] or not g.iso.det().is_unit()):
            raise ValueError(f"fork at {g.pos}: bad iso")
        ranks[i:i + 1] = [g.r1, g.r2]
    elif isinstance(g, Gate):
        if i < 0 or i >= len(ranks):
            raise ValueError(f"gate at {g.pos} out of range")
        if check and (g.matrix.rows != ranks[i] or g.matrix.cols != ranks[i]
                      or not g.matrix.det().is_unit()):
            raise ValueError(f"gate at {g.pos}: bad matrix")
    elif isinstance(g, Swap):
        if i < 0 or i + 1 >= len(ranks):
            raise ValueError(f"swap at {g.pos} out of range")
        ranks[i], ranks[i + 1] = ranks[i + 1], ranks[i]
    else:
        raise TypeError(f"unknown generator {g!r}")
    return ranks


def validate_word(w: BraidFoamWord) -> list:
    issues = []
    ranks = list(w.bottom_ranks)
    if any(r < 0 for r in ranks):
        issues.append("negative bottom rank")
    for k, g in enumerate(w.generators):
        try:
            ranks = _apply_ranks(ranks, g, w.ring)
        except (ValueError, RingError) as exc:
            issues.append(f"generator {k}: {exc}")
            return issues
    return issues


def top_ranks(w: BraidFoamWord) -> list:
    ranks = list(w.bottom_ranks)
    for g in w.generators:
        ranks = _apply_ranks(ranks, g, w.ring, check=False)
    return ranks


@dataclass
class _Strand:
    rank: int
    origin: object      # VertexPort or ('bottom', i)
    transport: Matrix


def braid_close(w: BraidFoamWord, matchings: Sequence[Matrix]) -> AbstractFoam:
    """Close a matched word into an abstract foam.

    Strand i's closure arc carries matchings[i], traversed from the top of
    the word back to its bottom.
    """
    issues = validate_word(w)
    if issues:
        raise ValueError("; ".join(issues))
    tops = top_ranks(w)
    if list(w.bottom_ranks) != tops:
        raise ValueError(f"word is not matched: bottom {list(w.bottom_ranks)} vs top {tops}")
    if len(matchings) != len(tops):
        raise ValueError("one matching per strand required")
    for i, (m, r) in enumerate(zip(matchings, tops)):
        if m.ring != w.ring or m.rows != r or m.cols != r or not m.det().is_unit():
            raise ValueError(f"matching {i}: need invertible {r}x{r} over {w.ring}")

    ring = w.ring
    strands = [_Strand(r, ("bottom", i), Matrix.identity(ring, r))
               for i, r in enumerate(w.bottom_ranks)]
    vertices = []
    # edges finalized during the sweep: origin -> (target port, transport)
    finalized = []
    pending_from_bottom = {}

    def finalize(s: _Strand, target: VertexPort) -> None:
        if isinstance(s.origin, VertexPort):
            finalized.append((s.origin, target, s.transport))
        else:
            pending_from_bottom[s.origin[1]] = (target, s.transport)

    next_vid = 0
    for g in _expand_swaps(w):
        i = g.pos - 1
        if isinstance(g, Join):
            v = Vertex(next_vid, IN, g.iso)
            next_vid += 1
            vertices.append(v)
            a, b = strands[i], strands[i + 1]
            finalize(a, VertexPort(v.id, THIN0))
            finalize(b, VertexPort(v.id, THIN1))
            strands[i:i + 2] = [_Strand(a.rank + b.rank, VertexPort(v.id, THICK),
                                        Matrix.identity(ring, a.rank + b.rank))]
        elif isinstance(g, Fork):
            v = Vertex(next_vid, OUT, g.iso)
            next_vid += 1
            vertices.append(v)
            s = strands[i]
            finalize(s, VertexPort(v.id, THICK))
            strands[i:i + 1] = [
                _Strand(g.r1, VertexPort(v.id, THIN0), Matrix.identity(ring, g.r1)),
                _Strand(g.r2, VertexPort(v.id, THIN1), Matrix.identity(ring, g.r2)),
            ]
        elif isinstance(g, Gate):
            s = strands[i]
            strands[i] = _Strand(s.rank, s.origin, g.matrix * s.transport)
        else:
            raise AssertionError("swaps were expanded")

    # Closure arcs identify top position j with bottom position j.  Bottom j
    # either continues into a finalized edge (pending) or is the origin of a
    # surviving top strand; following that map chases any path to a vertex
    # port or closes it into a circle.  The map is injective, so components
    # are chains ending at a vertex and pure cycles.
    survivor_at = {}   # bottom index -> top index of its untouched strand
    for j, s in enumerate(strands):
        if not isinstance(s.origin, VertexPort):
            survivor_at[s.origin[1]] = j

    edges = []
    circles = []
    next_eid = 0
    next_cid = 0

    for source, target, transport in finalized:
        edges.append(Edge(next_eid, transport.rows, source, target, transport))
        next_eid += 1

    for j, s in enumerate(strands):
        if not isinstance(s.origin, VertexPort):
            continue
        transport = matchings[j] * s.transport
        jj = j
        while jj not in pending_from_bottom:
            kk = survivor_at[jj]
            transport = matchings[kk] * strands[kk].transport * transport
            jj = kk
        target, pre = pending_from_bottom[jj]
        edges.append(Edge(next_eid, s.rank, s.origin, target, pre * transport))
        next_eid += 1

    visited = set()
    for i0 in sorted(survivor_at):
        if i0 in visited:
            continue
        trail = []
        j = i0
        while j in survivor_at and j not in visited:
            visited.add(j)
            trail.append(j)
            j = survivor_at[j]
        if j != i0:
            continue  # chain into a vertex path, already consumed above
        mono = Matrix.identity(ring, w.bottom_ranks[i0])
        j = i0
        while True:
            k = survivor_at[j]
            mono = matchings[k] * strands[k].transport * mono
            j = k
            if j == i0:
                break
        circles.append(Circle(next_cid, w.bottom_ranks[i0], mono))
        next_cid += 1

    out = AbstractFoam(ring, tuple(circles), tuple(vertices), tuple(edges), ())
    require_valid(out)
    return out


def closure_unit(w: BraidFoamWord, matchings: Sequence[Matrix]):
    """Unit-group class of the closure, cut at the closure points.

    The word acts on the direct sum of its strand modules by one constant-size
    automorphism (joins contribute their iso, forks the inverse iso, gates
    their matrix); composing with the matchings gives the closure's block
    automorphism, whose determinant is the full unit invariant.  It agrees
    with the canonical-cut determinant up to sign.
    """
    from .kgroups import K1Class
    issues = validate_word(w)
    if issues:
        raise ValueError("; ".join(issues))
    tops = top_ranks(w)
    if list(w.bottom_ranks) != tops:
        raise ValueError("word is not matched")
    ring = w.ring
    ranks = list(w.bottom_ranks)
    det = Matrix.identity(ring, 0).det()  # one
    for g in _expand_swaps(w):
        i = g.pos - 1
        if isinstance(g, Join):
            det = det * g.iso.det()
            ranks[i:i + 2] = [ranks[i] + ranks[i + 1]]
        elif isinstance(g, Fork):
            det = det * g.iso.det().inverse()
            ranks[i:i + 1] = [g.r1, g.r2]
        elif isinstance(g, Gate):
            det = det * g.matrix.det()
    for m in matchings:
        det = det * m.det()
    return K1Class(ring, det)


def markov_stabilize(w: BraidFoamWord) -> BraidFoamWord:
    """Append a crossing of the last strand against a fresh copy of itself.

    The closure of the result has the same quotient invariant; its full unit
    invariant scales by exactly tau(r) for r the last strand's rank.
    """
    tops = top_ranks(w)
    if not tops:
        raise ValueError("empty word cannot be stabilized")
    r = tops[-1]
    n = len(tops)
    return BraidFoamWord(w.ring, w.bottom_ranks + (r,), w.generators + (Swap(n),))


# -- serialization ------------------------------------------------------------

def word_to_json(w: BraidFoamWord) -> dict:
    gens = []
    for g in w.generators:
        if isinstance(g, Join):
            gens.append({"op": "join", "pos": g.pos, "iso": matrix_to_json(g.iso)})
        elif isinstance(g, Fork):
            gens.append({"op": "fork", "pos": g.pos, "r1": g.r1, "r2": g.r2,
                         "iso": matrix_to_json(g.iso)})
        elif isinstance(g, Gate):
            gens.append({"op": "gate", "pos": g.pos, "matrix": matrix_to_json(g.matrix)})
        else:
            gens.append({"op": "swap", "pos": g.pos})
    return {"kind": "braid_word", "ring": str(w.ring),
            "bottom_ranks": list(w.bottom_ranks), "generators": gens}


def word_from_json(obj: dict) -> BraidFoamWord:
    ring = RingSpec.parse(obj["ring"])
    gens = []
    for g in obj["generators"]:
        op = g["op"]
        if op == "join":
            gens.append(Join(g["pos"], matrix_from_json(ring, g["iso"])))
        elif op == "fork":
            gens.append(Fork(g["pos"], g["r1"], g["r2"], matrix_from_json(ring, g["iso"])))
        elif op == "gate":
            gens.append(Gate(g["pos"], matrix_from_json(ring, g["matrix"])))
        elif op == "swap":
            gens.append(Swap(g["pos"]))
        else:
            raise ValueError(f"unknown generator op {op!r}")
    return BraidFoamWord(ring, tuple(obj["bottom_ranks"]), tuple(gens))
