"""Registered elementary cobordism moves on sliced diagrams.

Every move is a local rewrite between diagram presentations of cobordant
foams; applying any registered move to a closed diagram preserves the planar
invariant exactly.  Moves that the source figures state only up to an extra
circle (the kink move and Markov stabilization) emit that circle explicitly
as part of the rewrite output, so nothing is discarded.

Pattern-matching moves require their pattern tiles to be the only explicit
tiles in the slices involved; the slide moves (pad/unpad, interchange, gate
bookkeeping) exist to bring patterns into that shape.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .diagram import (
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
    Tile,
    cross_slices,
    evaluate,
    flip,
    planar_invariant,
    tile_inputs,
    tile_outputs,
)
from .matrix import Matrix, block_direct_sum, block_swap, matrix_from_json, matrix_to_json
from .rings import RingSpec

MOVE_IDS = (
    "ISOTOPY_SLIDE", "ISOTOPY_ZIGZAG", "SING_CAP", "SING_CUP", "SING_SADDLE",
    "VERTEX_SLIDE", "VERTEX_ASSOC", "CIRCLE_BIRTH", "CIRCLE_DEATH", "SADDLE",
    "R1", "R2A", "R2B", "R3A", "R3B", "R4A", "R4B",
    "SPLIT_MONODROMY", "CIRCLE_ACROSS_EDGE", "CIRCLE_MERGE", "CIRCLE_REVERSE",
    "MARKOV_STAB",
)


class PreconditionFailed(ValueError):
    def __init__(self, move, reason: str):
        self.move = move
        super().__init__(f"{move.move} at (slice {move.slice}, pos {move.pos}, "
                         f"{move.direction}): {reason}")


class InvariantViolated(AssertionError):
    """A verified move changed the invariant: an implementation bug."""


@dataclass(frozen=True)
class Move:
    move: str
    slice: int
    pos: int
    direction: str = "apply"
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        params = {}
        for k, v in self.params.items():
            params[k] = matrix_to_json(v) if isinstance(v, Matrix) else v
        return {"move": self.move, "slice": self.slice, "pos": self.pos,
                "direction": self.direction, "params": params}

    @staticmethod
    def from_json(ring: RingSpec, obj: dict) -> "Move":
        params = {}
        for k, v in obj.get("params", {}).items():
            if isinstance(v, dict) and "entries" in v:
                params[k] = matrix_from_json(ring, v)
            else:
                params[k] = v
        return Move(obj["move"], obj["slice"], obj["pos"], obj.get("direction", "apply"),
                    params)

    def key(self):
        return (self.move, self.slice, self.pos, self.direction)


# -- slice surgery helpers -----------------------------------------------------


def _splice(d: SlicedDiagram, start: int, count: int, new_slices) -> SlicedDiagram:
    slices = list(d.slices)
    slices[start:start + count] = [tuple(s) for s in new_slices]
    out = SlicedDiagram(d.ring, d.bottom, tuple(slices))
    evaluate(out)
    return out


def _sole(d: SlicedDiagram, k: int):
    """The (pos, tile) of slice k when it holds exactly one explicit tile."""
    if 0 <= k < len(d.slices) and len(d.slices[k]) == 1:
        return d.slices[k][0]
    return None


def _need(cond: bool, m: Move, reason: str) -> None:
    if not cond:
        raise PreconditionFailed(m, reason)


def _state(d: SlicedDiagram, ev, lv: int):
    return ev.levels[lv]


def _strand_at(ev, lv: int, pos: int):
    if 1 <= pos <= len(ev.levels[lv]):
        return ev.levels[lv][pos - 1]
    return None


def _strand_passes(d: SlicedDiagram, ev, k: int, pos: int) -> bool:
    """True when slice k does not consume the strand at input position pos."""
    return all(pos not in pt.in_positions for pt in ev.placed[k])


def _implicit_out_pos(d: SlicedDiagram, ev, k: int, pos: int) -> int:
    for pt in ev.placed_ids[k]:
        if pt.in_positions == (pos,):
            return pt.out_positions[0]
    raise KeyError(pos)


def pearl_at(d: SlicedDiagram, k: int, pos: int):
    """Recognize a clockwise pearl cup/gate/cap (gate optional) at slice k.

    Returns (n_slices, rank, monodromy or None) or None.
    """
    first = _sole(d, k)
    if not first:
        return None
    p0, cup = first
    if not isinstance(cup, CupT) or cup.chir != "w" or p0 != pos:
        return None
    second = _sole(d, k + 1)
    if not second:
        return None
    p1, t1 = second
    if isinstance(t1, GateT) and t1.dir == UP and p1 == pos and t1.rank == cup.rank:
        third = _sole(d, k + 2)
        if not third:
            return None
        p2, t2 = third
        if isinstance(t2, CapT) and t2.chir == "e" and p2 == pos and t2.rank == cup.rank:
            return (3, cup.rank, t1.matrix)
        return None
    if isinstance(t1, CapT) and t1.chir == "e" and p1 == pos and t1.rank == cup.rank:
        return (2, cup.rank, None)
    return None


def pearl_slices(ring: RingSpec, pos: int, monodromy: Matrix):
    n = monodromy.rows
    return [((pos, CupT(n, "w")),),
            ((pos, GateT(n, UP, monodromy)),),
            ((pos, CapT(n, "e")),)]


# -- move handlers --------------------------------------------------------------

def _mv_isotopy_slide(d: SlicedDiagram, m: Move) -> SlicedDiagram:
    ev = evaluate(d)
    k, pos = m.slice, m.pos
    if m.direction == "pad":
        _need(0 <= k <= len(d.slices), m, "bad slice")
        slices = list(d.slices)
        slices.insert(k, ())
        return SlicedDiagram(d.ring, d.bottom, tuple(slices))
    if m.direction == "unpad":
        _need(0 <= k < len(d.slices) and not d.slices[k], m, "slice not empty")
        slices = list(d.slices)
        del slices[k]
        return SlicedDiagram(d.ring, d.bottom, tuple(slices))
    if m.direction in ("up", "down"):
        return _slide_tile(d, ev, m)
    if m.direction == "fuse":
        return _gate_fuse(d, ev, m)
    if m.direction == "split":
        return _gate_split(d, ev, m)
    if m.direction == "drop_identity":
        return _gate_drop(d, ev, m)
    if m.direction == "add_identity":
        return _gate_add(d, ev, m)
    if m.direction == "around_extremum":
        return _gate_around_extremum(d, ev, m)
    if m.direction == "transpose":
        return _transpose_slices(d, ev, m)
    raise PreconditionFailed(m, f"unknown slide variant {m.direction!r}")


def _transpose_slices(d: SlicedDiagram, ev, m: Move) -> SlicedDiagram:
    """Swap two whole adjacent slices with disjoint strand support."""
    k = m.slice
    _need(0 <= k < len(d.slices) - 1, m, "bad slice")
    upper = ev.placed[k + 1]
    lower = ev.placed[k]

    # relocate each upper tile to level-k coordinates
    new_upper = []
    for pt in upper:
        if pt.in_positions:
            try:
                new_pos = _implicit_in_pos(ev, k, pt.in_positions[0])
                for p in pt.in_positions[1:]:
                    _implicit_in_pos(ev, k, p)
            except KeyError:
                raise PreconditionFailed(m, "upper tile consumes the lower slice's output")
        else:
            for lp in lower:
                if lp.out_positions and lp.out_positions[0] < pt.pos <= lp.out_positions[-1]:
                    raise PreconditionFailed(m, "cup gap falls inside a lower tile")
            new_pos = _block_in_insertion(ev, k, pt.pos)
        new_upper.append((new_pos, pt.tile))

    def strand_shift(s: int) -> int:
        """Intermediate-level position of the level-k strand s."""
        delta = 0
        for np, t in new_upper:
            n_in = len(tile_inputs(t))
            n_out = len(tile_outputs(t))
            if n_in:
                if np + n_in - 1 < s:
                    delta += n_out - n_in
            elif np <= s:
                delta += n_out
        return s + delta

    def gap_shift(g: int) -> int:
        """Intermediate-level insertion point of the level-k gap g."""
        left = g - 1
        for np, t in new_upper:
            n_in = len(tile_inputs(t))
            n_out = len(tile_outputs(t))
            if n_in:
                if np + n_in - 1 <= g - 1:
                    left += n_out - n_in
            elif np <= g:
                left += n_out
        return left + 1

    new_lower = []
    for pt in lower:
        if pt.in_positions:
            new_lower.append((strand_shift(pt.in_positions[0]), pt.tile))
        else:
            new_lower.append((gap_shift(pt.pos), pt.tile))

    return _splice(d, k, 2, [tuple(sorted(new_upper, key=lambda x: x[0])),
                             tuple(sorted(new_lower, key=lambda x: x[0]))])


def _find_tile(d: SlicedDiagram, k: int, pos: int, m: Move):
    for i, (p, t) in enumerate(d.slices[k]):
        if p == pos:
            return i, t
    raise PreconditionFailed(m, "no tile at location")


def _implicit_in_pos(ev, k: int, out_pos: int) -> int:
    """Input position of the implicit strand producing out_pos at slice k."""
    for pt in ev.placed_ids[k]:
        if pt.out_positions == (out_pos,):
            return pt.in_positions[0]
    raise KeyError(out_pos)


def _block_out_insertion(ev, k: int, placed) -> int:
    """Leftmost level-(k+1) position of the tile's output block (or where it
    would sit for a cap)."""
    if placed.out_positions:
        return placed.out_positions[0]
    best = 1
    for pt in list(ev.placed[k]) + list(ev.placed_ids[k]):
        if pt is placed or not pt.out_positions:
            continue
        anchor = pt.in_positions[0] if pt.in_positions else pt.pos
        if anchor < placed.pos:
            best = max(best, pt.out_positions[-1] + 1)
    return best


def _block_in_insertion(ev, k: int, out_pos: int) -> int:
    """Insertion point at the input of slice k matching output insertion
    point out_pos (right of everything producing strands left of it)."""
    best = 1
    for pt in list(ev.placed[k]) + list(ev.placed_ids[k]):
        if any(op < out_pos for op in pt.out_positions):
            if pt.in_positions:
                best = max(best, max(pt.in_positions) + 1)
            else:
                best = max(best, pt.pos)
    return best


def _slide_tile(d: SlicedDiagram, ev, m: Move) -> SlicedDiagram:
    k, pos = m.slice, m.pos
    _need(0 <= k < len(d.slices), m, "bad slice")
    idx, tile = _find_tile(d, k, pos, m)
    placed = next(pt for pt in ev.placed[k] if pt.pos == pos and pt.tile == tile)
    n_in, n_out = len(placed.in_positions), len(placed.out_positions)

    if m.direction == "up":
        k2 = k + 1
        _need(k2 < len(d.slices), m, "no slice above")
        q = _block_out_insertion(ev, k, placed)
        span = set(placed.out_positions)
        for pt2 in ev.placed[k2]:
            touched = set(pt2.in_positions) if pt2.in_positions else {pt2.pos}
            if touched & span or (not span and q in touched) or \
                    (not pt2.in_positions and span and min(span) <= pt2.pos <= max(span)):
                raise PreconditionFailed(m, "destination slice touches the tile")
        width_change = n_in - n_out
        dest = [(p2 + width_change if p2 > q else p2, t2) for p2, t2 in d.slices[k2]]
        dest.append((q, tile))
        src = tuple(x for x in d.slices[k] if x != (pos, tile))
        return _splice(d, k, 2, [src, tuple(sorted(dest, key=lambda x: x[0]))])

    _need(m.direction == "down", m, f"unknown slide direction {m.direction!r}")
    k2 = k - 1
    _need(k2 >= 0, m, "no slice below")
    span = set(placed.in_positions)
    for pt2 in ev.placed[k2]:
        touched = set(pt2.out_positions) if pt2.out_positions else \
            {_block_out_insertion(ev, k2, pt2)}
        if touched & span:
            raise PreconditionFailed(m, "source slice below touches the tile")
    if span:
        for p in placed.in_positions:
            try:
                _implicit_in_pos(ev, k2, p)
            except KeyError:
                raise PreconditionFailed(m, "inputs are produced by explicit tiles below")
        new_pos = _implicit_in_pos(ev, k2, placed.in_positions[0])
    else:
        new_pos = _block_in_insertion(ev, k2, pos)
    width_change = n_out - n_in
    anchor = min(span) if span else pos
    src = tuple((p2 + width_change if p2 > anchor else p2, t2)
                for p2, t2 in d.slices[k] if (p2, t2) != (pos, tile))
    dest = tuple(sorted(list(d.slices[k2]) + [(new_pos, tile)], key=lambda x: x[0]))
    return _splice(d, k2, 2, [dest, src])


def _gate_fuse(d: SlicedDiagram, ev, m: Move) -> SlicedDiagram:
    k, pos = m.slice, m.pos
    first = _sole(d, k)
    second = _sole(d, k + 1)
    _need(first is not None and second is not None, m, "gates must sit alone")
    (p1, t1), (p2, t2) = first, second
    _need(isinstance(t1, GateT) and isinstance(t2, GateT), m, "not gates")
    _need(p1 == pos and p2 == pos and t1.dir == t2.dir and t1.rank == t2.rank, m,
          "gates not stacked on one strand")
    mat = t2.matrix * t1.matrix if t1.dir == UP else t1.matrix * t2.matrix
    return _splice(d, k, 2, [((pos, GateT(t1.rank, t1.dir, mat)),)])


def _gate_split(d: SlicedDiagram, ev, m: Move) -> SlicedDiagram:
    k, pos = m.slice, m.pos
    found = _sole(d, k)
    _need(found is not None, m, "gate must sit alone")
    p1, t1 = found
    _need(isinstance(t1, GateT) and p1 == pos, m, "no gate at location")
    first, second = m.params["first"], m.params["second"]
    if t1.dir == UP:
        _need(second * first == t1.matrix, m, "factors do not compose to the gate")
    else:
        _need(first * second == t1.matrix, m, "factors do not compose to the gate")
    return _splice(d, k, 1, [((pos, GateT(t1.rank, t1.dir, first)),),
                             ((pos, GateT(t1.rank, t1.dir, second)),)])


def _gate_drop(d: SlicedDiagram, ev, m: Move) -> SlicedDiagram:
    k, pos = m.slice, m.pos
    idx, tile = _find_tile(d, k, pos, m)
    _need(isinstance(tile, GateT), m, "not a gate")
    _need(tile.matrix == Matrix.identity(d.ring, tile.rank), m, "gate is not the identity")
    src = tuple(x for x in d.slices[k] if x != (pos, tile))
    return _splice(d, k, 1, [src])


def _gate_add(d: SlicedDiagram, ev, m: Move) -> SlicedDiagram:
    k, pos = m.slice, m.pos
    _need(0 <= k <= len(d.slices), m, "bad slice")
    strand = _strand_at(ev, k, pos)
    _need(strand is not None, m, "no strand at location")
    r, dd = strand
    slices = list(d.slices)
    slices.insert(k, ((pos, GateT(r, dd, Matrix.identity(d.ring, r))),))
    out = SlicedDiagram(d.ring, d.bottom, tuple(slices))
    evaluate(out)
    return out


def _gate_around_extremum(d: SlicedDiagram, ev, m: Move) -> SlicedDiagram:
    """Relocate a gate to the other leg of the adjacent cup or cap."""
    k, pos = m.slice, m.pos
    found = _sole(d, k)
    _need(found is not None, m, "gate must sit alone in its slice")
    p, g = found
    _need(isinstance(g, GateT) and p == pos, m, "no gate at location")

    above = _sole(d, k + 1) if k + 1 < len(d.slices) else None
    below = _sole(d, k - 1) if k - 1 >= 0 else None
    if above and isinstance(above[1], CapT):
        cap_pos, cap = above
        legs = (cap_pos, cap_pos + 1)
        _need(pos in legs and cap.rank == g.rank, m, "gate does not feed the cap")
        other = legs[0] if pos == legs[1] else legs[1]
        new_gate = GateT(g.rank, flip(g.dir), g.matrix)
        return _splice(d, k, 1, [((other, new_gate),)])
    if below and isinstance(below[1], CupT):
        cup_pos, cup = below
        legs = (cup_pos, cup_pos + 1)
        _need(pos in legs and cup.rank == g.rank, m, "gate is not above the cup")
        other = legs[0] if pos == legs[1] else legs[1]
        new_gate = GateT(g.rank, flip(g.dir), g.matrix)
        return _splice(d, k, 1, [((other, new_gate),)])
    raise PreconditionFailed(m, "no adjacent cup or cap on this strand")


def _mv_zigzag(d: SlicedDiagram, m: Move) -> SlicedDiagram:
    ev = evaluate(d)
    k, pos = m.slice, m.pos
    if m.direction == "insert":
        side = m.params.get("side", "right")
        _need(0 <= k <= len(d.slices), m, "bad slice")
        lv = k
        strand = _strand_at(ev, lv, pos)
        _need(strand is not None, m, "no strand at location")
        r, dd = strand
        zz = _zigzag_pattern(r, dd, pos, side)
        slices = list(d.slices)
        slices[k:k] = zz
        return _splice(SlicedDiagram(d.ring, d.bottom, tuple(slices)), k, len(zz), zz)
    _need(m.direction == "remove", m, f"unknown direction {m.direction!r}")
    first, second = _sole(d, k), _sole(d, k + 1)
    _need(first is not None and second is not None, m, "zigzag tiles must sit alone")
    (p1, t1), (p2, t2) = first, second
    _need(isinstance(t1, CupT) and isinstance(t2, CapT) and t1.rank == t2.rank, m,
          "pattern is not cup-then-cap")
    r = t1.rank
    ok = ((t1.chir, t2.chir) == ("e", "e") and p2 == p1 - 1) or \
         ((t1.chir, t2.chir) == ("w", "w") and p2 == p1 + 1) or \
         ((t1.chir, t2.chir) == ("w", "w") and p2 == p1 - 1) or \
         ((t1.chir, t2.chir) == ("e", "e") and p2 == p1 + 1)
    _need(ok, m, "cup and cap do not share exactly one leg")
    _need(p1 == pos, m, "location does not name the cup")
    return _splice(d, k, 2, [])


def _zigzag_pattern(r: int, dd: str, p: int, side: str):
    if dd == UP:
        if side == "right":
            return [((p + 1, CupT(r, "e")),), ((p, CapT(r, "e")),)]
        return [((p, CupT(r, "w")),), ((p + 1, CapT(r, "w")),)]
    if side == "right":
        return [((p + 1, CupT(r, "w")),), ((p, CapT(r, "w")),)]
    return [((p, CupT(r, "e")),), ((p + 1, CapT(r, "e")),)]


def _mv_sing_cap(d: SlicedDiagram, m: Move) -> SlicedDiagram:
    k, pos = m.slice, m.pos
    first, second = _sole(d, k), _sole(d, k + 1)
    _need(first is not None and second is not None, m, "bubble tiles must sit alone")
    (p1, fork), (p2, join) = first, second
    _need(isinstance(fork, ForkT) and isinstance(join, JoinT), m, "pattern is not fork-then-join")
    _need(p1 == pos and p2 == pos, m, "fork and join are not aligned")
    _need(fork.dir == join.dir and (fork.r1, fork.r2) == (join.r1, join.r2), m,
          "fork and join do not cancel")
    r = fork.r1 + fork.r2
    if fork.dir == UP:
        net = join.iso * fork.iso.inverse()
    else:
        net = fork.iso * join.iso.inverse()
    if net == Matrix.identity(d.ring, r):
        return _splice(d, k, 2, [])
    return _splice(d, k, 2, [((pos, GateT(r, fork.dir, net)),)])


def _mv_sing_cup(d: SlicedDiagram, m: Move) -> SlicedDiagram:
    _need(m.direction == "insert", m, f"unknown direction {m.direction!r}")
    ev = evaluate(d)
    k, pos = m.slice, m.pos
    strand = _strand_at(ev, k, pos)
    _need(strand is not None, m, "no strand at location")
    r, dd = strand
    r1 = m.params.get("r1", 0)
    iso = m.params.get("iso", Matrix.identity(d.ring, r))
    _need(0 <= r1 <= r, m, "bad split rank")
    new = [((pos, ForkT(r1, r - r1, dd, iso)),), ((pos, JoinT(r1, r - r1, dd, iso)),)]
    slices = list(d.slices)
    slices[k:k] = new
    return _splice(SlicedDiagram(d.ring, d.bottom, tuple(slices)), k, 2, new)


def _mv_sing_saddle(d: SlicedDiagram, m: Move) -> SlicedDiagram:
    k, pos = m.slice, m.pos
    if m.direction == "insert":
        ev = evaluate(d)
        a = _strand_at(ev, k, pos)
        b = _strand_at(ev, k, pos + 1)
        _need(a is not None and b is not None, m, "need two strands")
        _need(a[1] == b[1], m, "strands must share a direction")
        iso = m.params.get("iso", Matrix.identity(d.ring, a[0] + b[0]))
        new = [((pos, JoinT(a[0], b[0], a[1], iso)),),
               ((pos, ForkT(a[0], b[0], a[1], iso)),)]
        slices = list(d.slices)
        slices[k:k] = new
        return _splice(SlicedDiagram(d.ring, d.bottom, tuple(slices)), k, 2, new)
    _need(m.direction == "cancel", m, f"unknown direction {m.direction!r}")
    first, second = _sole(d, k), _sole(d, k + 1)
    _need(first is not None and second is not None, m, "saddle tiles must sit alone")
    (p1, join), (p2, fork) = first, second
    _need(isinstance(join, JoinT) and isinstance(fork, ForkT), m, "pattern is not join-then-fork")
    _need(p1 == pos and p2 == pos, m, "join and fork are not aligned")
    _need(join.dir == fork.dir and (join.r1, join.r2) == (fork.r1, fork.r2), m,
          "ranks do not match")
    r1, r2 = join.r1, join.r2
    if join.dir == UP:
        net = fork.iso.inverse() * join.iso
    else:
        net = join.iso.inverse() * fork.iso
    blocks = _block_diagonal_parts(net, r1, r2)
    _need(blocks is not None, m, "net map does not split")
    a, b = blocks
    out = []
    if a != Matrix.identity(d.ring, r1):
        out.append((pos, GateT(r1, join.dir, a)))
    if b != Matrix.identity(d.ring, r2):
        out.append((pos + 1, GateT(r2, join.dir, b)))
    return _splice(d, k, 2, [tuple(out)] if out else [])


def _block_diagonal_parts(m: Matrix, r1: int, r2: int):
    zero = m.ring and None
    for i in range(r1):
        for j in range(r1, r1 + r2):
            if not m.entries[i][j].is_zero or not m.entries[j][i].is_zero:
                return None
    a = Matrix(m.ring, r1, r1, tuple(tuple(m.entries[i][j] for j in range(r1))
                                     for i in range(r1)))
    b = Matrix(m.ring, r2, r2, tuple(tuple(m.entries[r1 + i][r1 + j] for j in range(r2))
                                     for i in range(r2)))
    return a, b


def _mv_vertex_slide(d: SlicedDiagram, m: Move) -> SlicedDiagram:
    """Move a merge below the split feeding one of its inputs."""
    k, pos = m.slice, m.pos
    first, second = _sole(d, k), _sole(d, k + 1)
    _need(first is not None and second is not None, m, "vertex tiles must sit alone")
    (pf, fork), (pj, join) = first, second
    _need(isinstance(fork, ForkT) and isinstance(join, JoinT), m, "pattern is not fork-then-join")
    _need(fork.dir == UP and join.dir == UP, m, "only upward vertices slide")
    ring = d.ring
    a, b = fork.r1, fork.r2
    if m.direction == "right":
        # fork at p produces (a@p, b@p+1); join at p+1 merges (b, c)
        _need(pf == pos and pj == pos + 1, m, "tiles not in the shared-leg shape")
        _need(join.r1 == b, m, "shared leg rank mismatch")
        c = join.r2
        n_l = block_direct_sum(Matrix.identity(ring, a), join.iso) * \
            block_direct_sum(fork.iso.inverse(), Matrix.identity(ring, c))
        new_join = JoinT(a + b, c, UP, Matrix.identity(ring, a + b + c))
        new_fork = ForkT(a, b + c, UP, n_l.inverse())
        return _splice(d, k, 2, [((pos, new_join),), ((pos, new_fork),)])
    _need(m.direction == "left", m, f"unknown direction {m.direction!r}")
    # fork at p+1 produces (a@p+1, b@p+2); join at p merges (c, a)
    _need(pf == pos + 1 and pj == pos, m, "tiles not in the shared-leg shape")
    _need(join.r2 == a, m, "shared leg rank mismatch")
    c = join.r1
    n_l = block_direct_sum(join.iso, Matrix.identity(ring, b)) * \
        block_direct_sum(Matrix.identity(ring, c), fork.iso.inverse())
    new_join = JoinT(c, a + b, UP, Matrix.identity(ring, c + a + b))
    new_fork = ForkT(c + a, b, UP, n_l.inverse())
    return _splice(d, k, 2, [((pos, new_join),), ((pos, new_fork),)])


def _mv_vertex_assoc(d: SlicedDiagram, m: Move) -> SlicedDiagram:
    k, pos = m.slice, m.pos
    first, second = _sole(d, k), _sole(d, k + 1)
    _need(first is not None and second is not None, m, "vertex tiles must sit alone")
    ring = d.ring
    if m.direction == "fork_left_to_right":
        (p1, f1), (p2, f2) = first, second
        _need(isinstance(f1, ForkT) and isinstance(f2, ForkT), m, "pattern is not fork-fork")
        _need(f1.dir == UP and f2.dir == UP, m, "only upward vertices")
        _need(p1 == pos and p2 == pos, m, "second fork must split the left output")
        a, b, c = f2.r1, f2.r2, f1.r2
        _need(f1.r1 == a + b, m, "rank bookkeeping mismatch")
        psi1 = f1.iso * block_direct_sum(f2.iso, Matrix.identity(ring, c))
        new1 = ForkT(a, b + c, UP, psi1)
        new2 = ForkT(b, c, UP, Matrix.identity(ring, b + c))
        return _splice(d, k, 2, [((pos, new1),), ((pos + 1, new2),)])
    if m.direction == "fork_right_to_left":
        (p1, f1), (p2, f2) = first, second
        _need(isinstance(f1, ForkT) and isinstance(f2, ForkT), m, "pattern is not fork-fork")
        _need(f1.dir == UP and f2.dir == UP, m, "only upward vertices")
        _need(p1 == pos and p2 == pos + 1, m, "second fork must split the right output")
        a, b, c = f1.r1, f2.r1, f2.r2
        _need(f1.r2 == b + c, m, "rank bookkeeping mismatch")
        phi1 = f1.iso * block_direct_sum(Matrix.identity(ring, a), f2.iso)
        new1 = ForkT(a + b, c, UP, phi1)
        new2 = ForkT(a, b, UP, Matrix.identity(ring, a + b))
        return _splice(d, k, 2, [((pos, new1),), ((pos, new2),)])
    if m.direction in ("join_left_to_right", "join_right_to_left"):
        (p1, j1), (p2, j2) = first, second
        _need(isinstance(j1, JoinT) and isinstance(j2, JoinT), m, "pattern is not join-join")
        _need(j1.dir == UP and j2.dir == UP, m, "only upward vertices")
        if m.direction == "join_left_to_right":
            # j1 merges (a,b) at pos; j2 merges (a+b, c) at pos
            _need(p1 == pos and p2 == pos, m, "joins not nested left")
            a, b = j1.r1, j1.r2
            _need(j2.r1 == a + b, m, "rank bookkeeping mismatch")
            c = j2.r2
            total = j2.iso * block_direct_sum(j1.iso, Matrix.identity(ring, c))
            new1 = JoinT(b, c, UP, Matrix.identity(ring, b + c))
            new2 = JoinT(a, b + c, UP, total)
            return _splice(d, k, 2, [((pos + 1, new1),), ((pos, new2),)])
        # j1 merges (b,c) at pos+1; j2 merges (a, b+c) at pos
        _need(p1 == pos + 1 and p2 == pos, m, "joins not nested right")
        b, c = j1.r1, j1.r2
        a = j2.r1
        _need(j2.r2 == b + c, m, "rank bookkeeping mismatch")
        total = j2.iso * block_direct_sum(Matrix.identity(ring, a), j1.iso)
        new1 = JoinT(a, b, UP, Matrix.identity(ring, a + b))
        new2 = JoinT(a + b, c, UP, total)
        return _splice(d, k, 2, [((pos, new1),), ((pos, new2),)])
    raise PreconditionFailed(m, f"unknown direction {m.direction!r}")


def _mv_circle_birth(d: SlicedDiagram, m: Move) -> SlicedDiagram:
    ev = evaluate(d)
    k, pos = m.slice, m.pos
    _need(0 <= k <= len(d.slices), m, "bad slice")
    rank = m.params.get("rank", 1)
    orientation = m.params.get("orientation", "cw")
    width = len(ev.levels[k]) if k < len(ev.levels) else len(ev.levels[-1])
    _need(1 <= pos <= width + 1, m, "bad position")
    if orientation == "cw":
        new = [((pos, CupT(rank, "w")),), ((pos, CapT(rank, "e")),)]
    else:
        new = [((pos, CupT(rank, "e")),), ((pos, CapT(rank, "w")),)]
    slices = list(d.slices)
    slices[k:k] = new
    return _splice(SlicedDiagram(d.ring, d.bottom, tuple(slices)), k, 2, new)


def _mv_circle_death(d: SlicedDiagram, m: Move) -> SlicedDiagram:
    k, pos = m.slice, m.pos
    first = _sole(d, k)
    _need(first is not None, m, "circle tiles must sit alone")
    p1, cup = first
    _need(isinstance(cup, CupT) and p1 == pos, m, "no cup at location")
    second = _sole(d, k + 1)
    _need(second is not None, m, "circle tiles must sit alone")
    p2, t2 = second
    if isinstance(t2, GateT):
        _need(t2.matrix == Matrix.identity(d.ring, t2.rank), m,
              "monodromy is not the identity")
        _need(t2.rank == cup.rank and p2 == pos, m, "gate not on the circle")
        third = _sole(d, k + 2)
        _need(third is not None, m, "circle tiles must sit alone")
        p3, cap = third
        count = 3
    else:
        p3, cap = p2, t2
        count = 2
    _need(isinstance(cap, CapT) and p3 == pos and cap.rank == cup.rank, m,
          "no matching cap above the cup")
    _need({("w", "e"), ("e", "w")} >= {(cup.chir, cap.chir)}, m,
          "cup and cap chirality do not close a circle")
    return _splice(d, k, count, [])


def _mv_saddle(d: SlicedDiagram, m: Move) -> SlicedDiagram:
    k, pos = m.slice, m.pos
    if m.direction == "insert":
        ev = evaluate(d)
        a = _strand_at(ev, k, pos)
        b = _strand_at(ev, k, pos + 1)
        _need(a is not None and b is not None, m, "need two strands")
        _need(a[0] == b[0], m, "ranks must match")
        r = a[0]
        if (a[1], b[1]) == (UP, DOWN):
            new = [((pos, CapT(r, "e")),), ((pos, CupT(r, "w")),)]
        elif (a[1], b[1]) == (DOWN, UP):
            new = [((pos, CapT(r, "w")),), ((pos, CupT(r, "e")),)]
        else:
            raise PreconditionFailed(m, "strands must be antiparallel")
        slices = list(d.slices)
        slices[k:k] = new
        return _splice(SlicedDiagram(d.ring, d.bottom, tuple(slices)), k, 2, new)
    _need(m.direction == "remove", m, f"unknown direction {m.direction!r}")
    first, second = _sole(d, k), _sole(d, k + 1)
    _need(first is not None and second is not None, m, "saddle tiles must sit alone")
    (p1, cap), (p2, cup) = first, second
    _need(isinstance(cap, CapT) and isinstance(cup, CupT), m, "pattern is not cap-then-cup")
    _need(p1 == pos and p2 == pos and cap.rank == cup.rank, m, "tiles not aligned")
    _need((cap.chir, cup.chir) in (("e", "w"), ("w", "e")), m,
          "chirality does not restore the strands")
    return _splice(d, k, 2, [])


def _kink_slices(ring: RingSpec, r: int, pos: int):
    sw = block_swap(ring, r, r)
    return [
        ((pos + 1, CupT(r, "w")),),
        ((pos, JoinT(r, r, UP, Matrix.identity(ring, 2 * r))),),
        ((pos, ForkT(r, r, UP, sw)),),
        ((pos + 1, CapT(r, "e")),),
    ]


def _mv_r1(d: SlicedDiagram, m: Move) -> SlicedDiagram:
    k, pos = m.slice, m.pos
    if m.direction == "insert":
        ev = evaluate(d)
        strand = _strand_at(ev, k, pos)
        _need(strand is not None, m, "no strand at location")
        r, dd = strand
        _need(dd == UP, m, "kinks insert on upward strands")
        new = _kink_slices(d.ring, r, pos) + pearl_slices(d.ring, pos + 1,
                                                          block_swap(d.ring, r, r))
        slices = list(d.slices)
        slices[k:k] = new
        return _splice(SlicedDiagram(d.ring, d.bottom, tuple(slices)), k, len(new), new)
    _need(m.direction == "remove", m, f"unknown direction {m.direction!r}")
    tiles = [_sole(d, k + i) for i in range(4)]
    _need(all(t is not None for t in tiles), m, "kink tiles must sit alone")
    (pc, cup), (pj, join), (pf, fork), (pp, cap) = tiles
    r = cup.rank if isinstance(cup, CupT) else -1
    ok = (isinstance(cup, CupT) and cup.chir == "w" and pc == pos + 1
          and isinstance(join, JoinT) and join.dir == UP and pj == pos
          and (join.r1, join.r2) == (r, r)
          and join.iso == Matrix.identity(d.ring, 2 * r)
          and isinstance(fork, ForkT) and fork.dir == UP and pf == pos
          and (fork.r1, fork.r2) == (r, r)
          and fork.iso == block_swap(d.ring, r, r)
          and isinstance(cap, CapT) and cap.chir == "e" and pp == pos + 1
          and cap.rank == r)
    _need(ok, m, "pattern is not the standard kink")
    return _splice(d, k, 4, pearl_slices(d.ring, pos + 1, block_swap(d.ring, r, r)))


def _mv_r2a(d: SlicedDiagram, m: Move) -> SlicedDiagram:
    k, pos = m.slice, m.pos
    if m.direction == "insert":
        ev = evaluate(d)
        a = _strand_at(ev, k, pos)
        b = _strand_at(ev, k, pos + 1)
        _need(a is not None and b is not None, m, "need two strands")
        _need(a[1] == b[1] == UP, m, "strands must point up")
        new = cross_slices(d.ring, pos, a[0], b[0], UP) + \
            cross_slices(d.ring, pos, b[0], a[0], UP)
        slices = list(d.slices)
        slices[k:k] = new
        return _splice(SlicedDiagram(d.ring, d.bottom, tuple(slices)), k, len(new), new)
    _need(m.direction == "remove", m, f"unknown direction {m.direction!r}")
    tiles = [_sole(d, k + i) for i in range(4)]
    _need(all(t is not None for t in tiles), m, "crossing tiles must sit alone")
    (p1, j1), (p2, f1), (p3, j2), (p4, f2) = tiles
    ok = all(p == pos for p in (p1, p2, p3, p4)) \
        and isinstance(j1, JoinT) and isinstance(f1, ForkT) \
        and isinstance(j2, JoinT) and isinstance(f2, ForkT)
    _need(ok, m, "pattern is not a double crossing")
    r1, r2 = j1.r1, j1.r2
    expect = cross_slices(d.ring, pos, r1, r2, UP) + cross_slices(d.ring, pos, r2, r1, UP)
    got = [d.slices[k + i] for i in range(4)]
    _need(got == [tuple(s) for s in expect], m, "crossing isos are not the standard ones")
    return _splice(d, k, 4, [])


def _r2b_slices(ring: RingSpec, pos: int, r1: int, r2: int):
    return [
        ((pos + 1, CupT(r2, "w")),),
        ((pos, JoinT(r1, r2, UP, Matrix.identity(ring, r1 + r2))),),
        ((pos, ForkT(r1, r2, UP, Matrix.identity(ring, r1 + r2))),),
        ((pos + 1, CapT(r2, "e")),),
    ]


def _mv_r2b(d: SlicedDiagram, m: Move) -> SlicedDiagram:
    k, pos = m.slice, m.pos
    if m.direction == "insert":
        ev = evaluate(d)
        a = _strand_at(ev, k, pos)
        b = _strand_at(ev, k, pos + 1)
        _need(a is not None and b is not None, m, "need two strands")
        _need(a[1] == UP and b[1] == DOWN, m, "strands must be up then down")
        new = _r2b_slices(d.ring, pos, a[0], b[0])
        slices = list(d.slices)
        slices[k:k] = new
        return _splice(SlicedDiagram(d.ring, d.bottom, tuple(slices)), k, len(new), new)
    _need(m.direction == "remove", m, f"unknown direction {m.direction!r}")
    tiles = [_sole(d, k + i) for i in range(4)]
    _need(all(t is not None for t in tiles), m, "pattern tiles must sit alone")
    (pc, cup), (pj, join), (pf, fork), (pp, cap) = tiles
    ok = isinstance(cup, CupT) and isinstance(join, JoinT) and \
        isinstance(fork, ForkT) and isinstance(cap, CapT)
    _need(ok, m, "pattern is not the antiparallel double crossing")
    r1, r2 = join.r1, join.r2
    expect = _r2b_slices(d.ring, pos, r1, r2)
    got = [d.slices[k + i] for i in range(4)]
    _need(got == [tuple(s) for s in expect], m, "tiles are not the standard pattern")
    return _splice(d, k, 4, [])


def _mv_r3a(d: SlicedDiagram, m: Move) -> SlicedDiagram:
    k, pos = m.slice, m.pos
    tiles = [_sole(d, k + i) for i in range(6)]
    _need(all(t is not None for t in tiles), m, "crossing tiles must sit alone")
    ev = evaluate(d)
    state = ev.levels[k]
    _need(len(state) >= pos + 2, m, "need three strands")
    (a, da), (b, db), (c, dc) = state[pos - 1], state[pos], state[pos + 1]
    _need(da == db == dc == UP, m, "strands must point up")
    if m.direction == "left_to_right":
        expect = cross_slices(d.ring, pos, a, b, UP) + \
            cross_slices(d.ring, pos + 1, a, c, UP) + \
            cross_slices(d.ring, pos, b, c, UP)
        replacement = cross_slices(d.ring, pos + 1, b, c, UP) + \
            cross_slices(d.ring, pos, a, c, UP) + \
            cross_slices(d.ring, pos + 1, a, b, UP)
    else:
        _need(m.direction == "right_to_left", m, f"unknown direction {m.direction!r}")
        expect = cross_slices(d.ring, pos + 1, b, c, UP) + \
            cross_slices(d.ring, pos, a, c, UP) + \
            cross_slices(d.ring, pos + 1, a, b, UP)
        replacement = cross_slices(d.ring, pos, a, b, UP) + \
            cross_slices(d.ring, pos + 1, a, c, UP) + \
            cross_slices(d.ring, pos, b, c, UP)
    got = [d.slices[k + i] for i in range(6)]
    _need(got == [tuple(s) for s in expect], m, "pattern is not the braid relation")
    return _splice(d, k, 6, replacement)


def _mv_r3b(d: SlicedDiagram, m: Move) -> SlicedDiagram:
    """Macro: carry an antiparallel rectangle through a crossing.

    Realized as a composite of the primitive rewrites: remove the rectangle
    on one side of the crossing and insert it on the other side.
    """
    k, pos = m.slice, m.pos
    if m.direction == "up":
        step1 = _mv_r2b(d, Move("R2B", k, pos, "remove"))
        ev = evaluate(step1)
        _need(k + 1 < len(step1.slices), m, "no crossing above the rectangle")
        target = k + 2
        _need(target <= len(step1.slices), m, "no room above the crossing")
        return _mv_r2b(step1, Move("R2B", target, m.params.get("target_pos", pos), "insert"))
    _need(m.direction == "down", m, f"unknown direction {m.direction!r}")
    step1 = _mv_r2b(d, Move("R2B", k, pos, "remove"))
    target = k - 2
    _need(target >= 0, m, "no room below the crossing")
    return _mv_r2b(step1, Move("R2B", target, m.params.get("target_pos", pos), "insert"))


def _mv_r4(d: SlicedDiagram, m: Move, variant: str) -> SlicedDiagram:
    k, pos = m.slice, m.pos
    ring = d.ring
    if m.direction == "forward":
        tiles = [_sole(d, k + i) for i in range(3)]
        _need(all(t is not None for t in tiles), m, "pattern tiles must sit alone")
        if variant == "a":
            (p1, j), (p2, f), (p3, fork) = tiles
            _need(isinstance(j, JoinT) and isinstance(f, ForkT) and isinstance(fork, ForkT),
                  m, "pattern is not crossing-then-fork")
            _need(fork.dir == UP, m, "vertex must point up")
            r3, r12 = j.r1, j.r2
            _need([tuple(s) for s in cross_slices(ring, pos, r3, r12, UP)] ==
                  [d.slices[k], d.slices[k + 1]], m, "not the standard crossing")
            _need(p3 == pos and fork.r1 + fork.r2 == r12, m, "fork does not split the crossed strand")
            r1, r2 = fork.r1, fork.r2
            replacement = [((pos + 1, ForkT(r1, r2, UP, fork.iso)),)] + \
                cross_slices(ring, pos, r3, r1, UP) + \
                cross_slices(ring, pos + 1, r3, r2, UP)
            return _splice(d, k, 3, replacement)
        (p1, j), (p2, f), (p3, fork) = tiles
        _need(isinstance(j, JoinT) and isinstance(f, ForkT) and isinstance(fork, ForkT),
              m, "pattern is not crossing-then-fork")
        _need(fork.dir == UP, m, "vertex must point up")
        r12, r3 = j.r1, j.r2
        _need([tuple(s) for s in cross_slices(ring, pos, r12, r3, UP)] ==
              [d.slices[k], d.slices[k + 1]], m, "not the standard crossing")
        _need(p3 == pos + 1 and fork.r1 + fork.r2 == r12, m,
              "fork does not split the crossed strand")
        r1, r2 = fork.r1, fork.r2
        replacement = [((pos, ForkT(r1, r2, UP, fork.iso)),)] + \
            cross_slices(ring, pos + 1, r2, r3, UP) + \
            cross_slices(ring, pos, r1, r3, UP)
        return _splice(d, k, 3, replacement)
    _need(m.direction == "backward", m, f"unknown direction {m.direction!r}")
    tiles = [_sole(d, k + i) for i in range(5)]
    _need(all(t is not None for t in tiles), m, "pattern tiles must sit alone")
    (pf, fork) = tiles[0]
    _need(isinstance(fork, ForkT) and fork.dir == UP, m, "pattern must start with a fork")
    r1, r2 = fork.r1, fork.r2
    ev = evaluate(d)
    state = ev.levels[k]
    if variant == "a":
        _need(pf == pos + 1, m, "fork position mismatch")
        r3 = state[pos - 1][0]
        expect = [((pos + 1, ForkT(r1, r2, UP, fork.iso)),)] + \
            cross_slices(ring, pos, r3, r1, UP) + cross_slices(ring, pos + 1, r3, r2, UP)
        replacement = cross_slices(ring, pos, r3, r1 + r2, UP) + \
            [((pos, ForkT(r1, r2, UP, fork.iso)),)]
    else:
        _need(pf == pos, m, "fork position mismatch")
        r3 = state[pos + 1][0] if len(state) > pos + 1 else None
        _need(r3 is not None, m, "no strand to cross")
        expect = [((pos, ForkT(r1, r2, UP, fork.iso)),)] + \
            cross_slices(ring, pos + 1, r2, r3, UP) + cross_slices(ring, pos, r1, r3, UP)
        replacement = cross_slices(ring, pos, r1 + r2, r3, UP) + \
            [((pos + 1, ForkT(r1, r2, UP, fork.iso)),)]
    got = [d.slices[k + i] for i in range(5)]
    _need(got == [tuple(s) for s in expect], m, "pattern does not match")
    return _splice(d, k, 5, replacement)


def _mv_split_monodromy(d: SlicedDiagram, m: Move) -> SlicedDiagram:
    k, pos = m.slice, m.pos
    if m.direction == "split":
        ev = evaluate(d)
        idx, tile = _find_tile(d, k, pos, m)
        _need(isinstance(tile, GateT), m, "no gate at location")
        placed = next(pt for pt in ev.placed[k] if pt.pos == pos and pt.tile == tile)
        q = placed.out_positions[0]
        src = tuple(x for x in d.slices[k] if x != (pos, tile))
        new = [src] + pearl_slices(d.ring, q + 1, tile.matrix)
        return _splice(d, k, 1, new)
    _need(m.direction == "absorb", m, f"unknown direction {m.direction!r}")
    found = pearl_at(d, k, pos)
    _need(found is not None and found[2] is not None, m, "no pearl at location")
    n_slices, rank, mono = found
    ev = evaluate(d)
    _need(pos >= 2, m, "no strand to the left of the pearl")
    target = pos - 1
    strand = _strand_at(ev, k, target)
    _need(strand is not None and strand[0] == rank, m, "left strand rank mismatch")
    r, dd = strand
    gate = GateT(r, dd, mono)
    return _splice(d, k, n_slices, [((target, gate),)])


def _mv_circle_across_edge(d: SlicedDiagram, m: Move) -> SlicedDiagram:
    k, pos = m.slice, m.pos
    found = pearl_at(d, k, pos)
    _need(found is not None, m, "no pearl at location")
    n_slices, rank, mono = found
    ev = evaluate(d)
    if m.direction == "right":
        _need(_strand_at(ev, k, pos) is not None, m, "no strand to the right")
        new_pos = pos + 1
    else:
        _need(m.direction == "left", m, f"unknown direction {m.direction!r}")
        _need(pos >= 2 and _strand_at(ev, k, pos - 1) is not None, m,
              "no strand to the left")
        new_pos = pos - 1
    new = [tuple((new_pos, t) for _, t in d.slices[k + i]) for i in range(n_slices)]
    return _splice(d, k, n_slices, new)


def _mv_circle_merge(d: SlicedDiagram, m: Move) -> SlicedDiagram:
    k, pos = m.slice, m.pos
    if m.direction == "merge":
        first = pearl_at(d, k, pos)
        _need(first is not None and first[2] is not None, m, "no pearl at location")
        n1, r1, a = first
        second = pearl_at(d, k + n1, pos)
        _need(second is not None and second[2] is not None, m, "no second pearl above")
        n2, r2, b = second
        return _splice(d, k, n1 + n2, pearl_slices(d.ring, pos, block_direct_sum(a, b)))
    _need(m.direction == "split", m, f"unknown direction {m.direction!r}")
    found = pearl_at(d, k, pos)
    _need(found is not None and found[2] is not None, m, "no pearl at location")
    n_slices, rank, mono = found
    r1 = m.params["r1"]
    _need(0 <= r1 <= rank, m, "bad split rank")
    parts = _block_diagonal_parts(mono, r1, rank - r1)
    _need(parts is not None, m, "monodromy does not split")
    a, b = parts
    return _splice(d, k, n_slices, pearl_slices(d.ring, pos, a) +
                   pearl_slices(d.ring, pos, b))


def _mv_circle_reverse(d: SlicedDiagram, m: Move) -> SlicedDiagram:
    k, pos = m.slice, m.pos
    tiles = [_sole(d, k + i) for i in range(3)]
    _need(all(t is not None for t in tiles), m, "circle tiles must sit alone")
    (p1, cup), (p2, gate), (p3, cap) = tiles
    ok = isinstance(cup, CupT) and isinstance(gate, GateT) and isinstance(cap, CapT) \
        and p1 == p2 == p3 == pos and cup.rank == gate.rank == cap.rank
    _need(ok, m, "pattern is not a decorated circle")
    if (cup.chir, gate.dir, cap.chir) == ("w", UP, "e"):
        new = [((pos, CupT(cup.rank, "e")),),
               ((pos, GateT(gate.rank, DOWN, gate.matrix)),),
               ((pos, CapT(cap.rank, "w")),)]
    elif (cup.chir, gate.dir, cap.chir) == ("e", DOWN, "w"):
        new = [((pos, CupT(cup.rank, "w")),),
               ((pos, GateT(gate.rank, UP, gate.matrix)),),
               ((pos, CapT(cap.rank, "e")),)]
    else:
        raise PreconditionFailed(m, "pattern is not an oriented decorated circle")
    return _splice(d, k, 3, new)


def _mv_markov(d: SlicedDiagram, m: Move) -> SlicedDiagram:
    _need(m.direction == "stabilize", m, f"unknown direction {m.direction!r}")
    ev = evaluate(d)
    k, pos = m.slice, m.pos
    strand = _strand_at(ev, k, pos)
    _need(strand is not None, m, "no strand at location")
    r, dd = strand
    _need(dd == UP, m, "stabilization targets an upward strand")
    new = _kink_slices(d.ring, r, pos) + pearl_slices(d.ring, pos + 1,
                                                      block_swap(d.ring, r, r))
    slices = list(d.slices)
    slices[k:k] = new
    return _splice(SlicedDiagram(d.ring, d.bottom, tuple(slices)), k, len(new), new)


_HANDLERS: dict = {
    "ISOTOPY_SLIDE": _mv_isotopy_slide,
    "ISOTOPY_ZIGZAG": _mv_zigzag,
    "SING_CAP": _mv_sing_cap,
    "SING_CUP": _mv_sing_cup,
    "SING_SADDLE": _mv_sing_saddle,
    "VERTEX_SLIDE": _mv_vertex_slide,
    "VERTEX_ASSOC": _mv_vertex_assoc,
    "CIRCLE_BIRTH": _mv_circle_birth,
    "CIRCLE_DEATH": _mv_circle_death,
    "SADDLE": _mv_saddle,
    "R1": _mv_r1,
    "R2A": _mv_r2a,
    "R2B": _mv_r2b,
    "R3A": _mv_r3a,
    "R3B": _mv_r3b,
    "R4A": lambda d, m: _mv_r4(d, m, "a"),
    "R4B": lambda d, m: _mv_r4(d, m, "b"),
    "SPLIT_MONODROMY": _mv_split_monodromy,
    "CIRCLE_ACROSS_EDGE": _mv_circle_across_edge,
    "CIRCLE_MERGE": _mv_circle_merge,
    "CIRCLE_REVERSE": _mv_circle_reverse,
    "MARKOV_STAB": _mv_markov,
}


def apply_move(d: SlicedDiagram, m: Move, verify: bool = False) -> SlicedDiagram:
    """Apply one registered move; optionally recheck invariant preservation."""
    if m.move not in _HANDLERS:
        raise PreconditionFailed(m, "unknown move id")
    before = planar_invariant(d).unit if (verify and d.is_closed) else None
    try:
        out = _HANDLERS[m.move](d, m)
    except DiagramError as exc:
        raise PreconditionFailed(m, f"result would be malformed: {exc}")
    except (IndexError, KeyError, StopIteration) as exc:
        raise PreconditionFailed(m, f"location does not resolve: {exc!r}")
    if before is not None and out.is_closed:
        after = planar_invariant(out).unit
        if after != before:
            raise InvariantViolated(
                f"{m.move} changed the invariant from {before} to {after}")
    return out


def enumerate_moves(d: SlicedDiagram, max_rank: int = 2,
                    include_inserts: bool = True) -> list:
    """All moves whose preconditions match d, ordered by (id, location)."""
    ev = evaluate(d)
    found = []

    def try_move(m: Move) -> None:
        try:
            _HANDLERS[m.move](d, m)
        except (PreconditionFailed, DiagramError, KeyError, StopIteration):
            return
        found.append(m)

    n = len(d.slices)
    for k in range(n):
        width = len(ev.levels[k])
        for pos in range(1, width + 2):
            for mid, direction in (("ISOTOPY_SLIDE", "up"), ("ISOTOPY_SLIDE", "down"),
                                   ("ISOTOPY_SLIDE", "fuse"),
                                   ("ISOTOPY_SLIDE", "drop_identity"),
                                   ("ISOTOPY_SLIDE", "around_extremum"),
                                   ("ISOTOPY_ZIGZAG", "remove"),
                                   ("SING_CAP", "cancel"), ("SING_SADDLE", "cancel"),
                                   ("VERTEX_SLIDE", "right"), ("VERTEX_SLIDE", "left"),
                                   ("VERTEX_ASSOC", "fork_left_to_right"),
                                   ("VERTEX_ASSOC", "join_left_to_right"),
                                   ("CIRCLE_DEATH", "apply"), ("SADDLE", "remove"),
                                   ("R1", "remove"), ("R2A", "remove"), ("R2B", "remove"),
                                   ("R3A", "left_to_right"), ("R3A", "right_to_left"),
                                   ("R4A", "forward"), ("R4B", "forward"),
                                   ("SPLIT_MONODROMY", "split"),
                                   ("SPLIT_MONODROMY", "absorb"),
                                   ("CIRCLE_ACROSS_EDGE", "left"),
                                   ("CIRCLE_ACROSS_EDGE", "right"),
                                   ("CIRCLE_MERGE", "merge"),
                                   ("CIRCLE_REVERSE", "apply")):
                try_move(Move(mid, k, pos, direction))
    for k in range(n):
        if not d.slices[k]:
            try_move(Move("ISOTOPY_SLIDE", k, 1, "unpad"))
    if include_inserts:
        for k in range(n + 1):
            width = len(ev.levels[k]) if k < len(ev.levels) else 0
            for rank in range(0, max_rank + 1):
                for pos in range(1, width + 2):
                    try_move(Move("CIRCLE_BIRTH", k, pos, "insert", {"rank": rank}))
            for pos in range(1, width + 1):
                for side in ("left", "right"):
                    try_move(Move("ISOTOPY_ZIGZAG", k, pos, "insert", {"side": side}))
                try_move(Move("SADDLE", k, pos, "insert"))
                try_move(Move("SING_CUP", k, pos, "insert"))
                try_move(Move("SING_SADDLE", k, pos, "insert"))
                try_move(Move("R1", k, pos, "insert"))
                try_move(Move("R2A", k, pos, "insert"))
                try_move(Move("R2B", k, pos, "insert"))
                try_move(Move("MARKOV_STAB", k, pos, "stabilize"))
    return sorted(found, key=lambda m: m.key())
