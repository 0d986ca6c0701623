"""Planar 1-foams as bottom-to-top slice diagrams, with a text DSL.

Each slice is a row of tiles applied in parallel to the incoming strand
state; strands not consumed by a tile continue implicitly.  Cup and cap
chirality is named by the arc traversal direction: the E variants run from
the left endpoint to the right one, the W variants the other way.  A cup_e
therefore creates a (down, up) pair, a cap_e consumes an (up, down) pair,
and a clockwise circle reads cup_w, then cap_e.

The crossing tile is a macro: parsing ``cross r1 r2 d`` emits the defining
merge with identity iso followed by the split with the block-swap iso, so
stored diagrams never contain crossings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

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
)
from .kgroups import K1Class, k1_identity, tau
from .matrix import Matrix, block_swap, matrix_from_json, matrix_to_json, parse_matrix_literal
from .rings import RingError, RingSpec

UP, DOWN = "u", "v"


class DiagramError(ValueError):
    """Parse or semantic error; carries the offending slice when known."""

    def __init__(self, message: str, slice_index: Optional[int] = None,
                 line: Optional[int] = None, col: Optional[int] = None):
        self.slice_index = slice_index
        self.line = line
        self.col = col
        where = []
        if slice_index is not None:
            where.append(f"slice {slice_index}")
        if line is not None:
            where.append(f"line {line}")
        if col is not None:
            where.append(f"col {col}")
        super().__init__((f"[{', '.join(where)}] " if where else "") + message)


def flip(d: str) -> str:
    return DOWN if d == UP else UP


@dataclass(frozen=True)
class IdT:
    rank: int
    dir: str


@dataclass(frozen=True)
class GateT:
    rank: int
    dir: str
    matrix: Matrix


@dataclass(frozen=True)
class CupT:
    rank: int
    chir: str  # "e" | "w"


@dataclass(frozen=True)
class CapT:
    rank: int
    chir: str


@dataclass(frozen=True)
class JoinT:
    r1: int
    r2: int
    dir: str
    iso: Matrix  # R^{r1} (+) R^{r2} -> R^{r1+r2}


@dataclass(frozen=True)
class ForkT:
    r1: int
    r2: int
    dir: str
    iso: Matrix


Tile = Union[IdT, GateT, CupT, CapT, JoinT, ForkT]


def tile_inputs(t: Tile) -> tuple:
    if isinstance(t, (IdT, GateT)):
        return ((t.rank, t.dir),)
    if isinstance(t, CupT):
        return ()
    if isinstance(t, CapT):
        return ((t.rank, UP), (t.rank, DOWN)) if t.chir == "e" else ((t.rank, DOWN), (t.rank, UP))
    if isinstance(t, JoinT):
        return ((t.r1, t.dir), (t.r2, t.dir))
    if isinstance(t, ForkT):
        return ((t.r1 + t.r2, t.dir),)
    raise TypeError(t)


def tile_outputs(t: Tile) -> tuple:
    if isinstance(t, (IdT, GateT)):
        return ((t.rank, t.dir),)
    if isinstance(t, CupT):
        return ((t.rank, DOWN), (t.rank, UP)) if t.chir == "e" else ((t.rank, UP), (t.rank, DOWN))
    if isinstance(t, CapT):
        return ()
    if isinstance(t, JoinT):
        return ((t.r1 + t.r2, t.dir),)
    if isinstance(t, ForkT):
        return ((t.r1, t.dir), (t.r2, t.dir))
    raise TypeError(t)


@dataclass(frozen=True)
class SlicedDiagram:
    ring: RingSpec
    bottom: tuple                 # strand state: tuple of (rank, dir)
    slices: tuple                 # tuple of slices; a slice is a tuple of (pos, Tile)

    @property
    def is_closed(self) -> bool:
        return not self.bottom and not self.top

    @property
    def top(self) -> tuple:
        return evaluate(self).levels[-1]


@dataclass(frozen=True)
class PlacedTile:
    tile: Tile
    pos: int            # leftmost input position (1-based); insertion point for cups
    in_positions: tuple  # positions in the incoming state
    out_positions: tuple  # positions in the outgoing state


@dataclass(frozen=True)
class Evaluation:
    levels: tuple        # states between slices; levels[0] = bottom
    placed: tuple        # per slice, tuple of PlacedTile for explicit tiles
    placed_ids: tuple    # per slice, tuple of PlacedTile for implicit id strands


def evaluate(d: SlicedDiagram) -> Evaluation:
    """Type-check the diagram and compute all intermediate strand states."""
    state = tuple(d.bottom)
    levels = [state]
    placed_all = []
    placed_ids_all = []
    for k, sl in enumerate(d.slices):
        tiles = sorted(sl, key=lambda pt: pt[0])
        if [p for p, _ in tiles] != [p for p, _ in sl]:
            raise DiagramError("tiles not in increasing position order", slice_index=k)
        out = []
        placed = []
        placed_ids = []
        cursor = 1  # next unconsumed input position
        width = len(state)

        def pass_through(upto: int):
            nonlocal cursor
            while cursor < upto:
                if cursor > width:
                    raise DiagramError(f"position {upto} beyond strand count {width}",
                                       slice_index=k)
                r, dd = state[cursor - 1]
                out.append((r, dd))
                placed_ids.append(PlacedTile(IdT(r, dd), cursor, (cursor,), (len(out),)))
                cursor += 1

        last_pos = 0
        for pos, t in tiles:
            if pos <= last_pos:
                raise DiagramError(f"overlapping tiles at position {pos}", slice_index=k)
            pass_through(pos)
            ins = tile_inputs(t)
            in_positions = tuple(range(pos, pos + len(ins)))
            for off, (r, dd) in enumerate(ins):
                ip = pos + off
                if ip > width:
                    raise DiagramError(f"tile needs strand {ip}, state has {width}",
                                       slice_index=k)
                got = state[ip - 1]
                if got != (r, dd):
                    raise DiagramError(
                        f"strand {ip} is rank {got[0]} dir {got[1]}, tile wants rank {r} dir {dd}",
                        slice_index=k)
            outs = tile_outputs(t)
            out_positions = tuple(range(len(out) + 1, len(out) + 1 + len(outs)))
            out.extend(outs)
            placed.append(PlacedTile(t, pos, in_positions, out_positions))
            cursor = pos + len(ins)
            last_pos = pos + max(len(ins) - 1, 0)
        pass_through(width + 1)
        _check_tile_matrices(d.ring, k, tiles)
        state = tuple(out)
        levels.append(state)
        placed_all.append(tuple(placed))
        placed_ids_all.append(tuple(placed_ids))
    return Evaluation(tuple(levels), tuple(placed_all), tuple(placed_ids_all))


def _check_tile_matrices(ring: RingSpec, k: int, tiles) -> None:
    for pos, t in tiles:
        if isinstance(t, GateT):
            m, r = t.matrix, t.rank
        elif isinstance(t, (JoinT, ForkT)):
            m, r = t.iso, t.r1 + t.r2
        else:
            continue
        if m.ring != ring:
            raise DiagramError(f"tile at {pos}: matrix ring {m.ring} != {ring}", slice_index=k)
        if m.rows != r or m.cols != r:
            raise DiagramError(f"tile at {pos}: matrix is {m.rows}x{m.cols}, expected {r}x{r}",
                               slice_index=k)
        if not m.det().is_unit():
            raise DiagramError(f"tile at {pos}: NotInvertible", slice_index=k)


def validate_diagram(d: SlicedDiagram) -> list:
    try:
        evaluate(d)
    except DiagramError as exc:
        return [str(exc)]
    except (RingError, ValueError) as exc:
        return [str(exc)]
    return []


def require_closed_valid(d: SlicedDiagram) -> Evaluation:
    ev = evaluate(d)
    if ev.levels[0] or ev.levels[-1]:
        raise DiagramError("diagram is open; invariant needs empty bottom and top")
    return ev


# -- tau' and the planar invariant --------------------------------------------

def tau_prime(d: SlicedDiagram) -> K1Class:
    """Product of cup/cap contributions; E variants carry tau(rank)."""
    ev = require_closed_valid(d)
    out = k1_identity(d.ring)
    for sl in ev.placed:
        for pt in sl:
            if isinstance(pt.tile, (CupT, CapT)) and pt.tile.chir == "e":
                out = K1Class(d.ring, out.unit * tau(pt.tile.rank, d.ring).unit)
    return out


def _components(d: SlicedDiagram, ev: Evaluation):
    """Interval and tripod components of the slice-boundary cut.

    Points are (level, position) for every strand at every inter-slice level.
    Yields (sources, targets, matrix) with matrix mapping the direct sum of
    source fibers to the direct sum of target fibers.
    """
    ident = lambda r: Matrix.identity(d.ring, r)
    for k, sl in enumerate(d.slices):
        lo, hi = k, k + 1
        for pt in list(ev.placed[k]) + list(ev.placed_ids[k]):
            t = pt.tile
            if isinstance(t, (IdT, GateT)):
                m = t.matrix if isinstance(t, GateT) else ident(t.rank)
                a, b = (lo, pt.in_positions[0]), (hi, pt.out_positions[0])
                if t.dir == UP:
                    yield (a,), (b,), m
                else:
                    yield (b,), (a,), m
            elif isinstance(t, CupT):
                l_ = (hi, pt.out_positions[0])
                r_ = (hi, pt.out_positions[1])
                if t.chir == "e":   # (down, up): flows left point -> right point
                    yield (l_,), (r_,), ident(t.rank)
                else:
                    yield (r_,), (l_,), ident(t.rank)
            elif isinstance(t, CapT):
                l_ = (lo, pt.in_positions[0])
                r_ = (lo, pt.in_positions[1])
                if t.chir == "e":   # (up, down): flows left -> right
                    yield (l_,), (r_,), ident(t.rank)
                else:
                    yield (r_,), (l_,), ident(t.rank)
            elif isinstance(t, JoinT):
                thin = ((lo, pt.in_positions[0]), (lo, pt.in_positions[1]))
                thick = ((hi, pt.out_positions[0]),)
                if t.dir == UP:
                    yield thin, thick, t.iso
                else:
                    yield thick, thin, t.iso.inverse()
            elif isinstance(t, ForkT):
                thick = ((lo, pt.in_positions[0]),)
                thin = ((hi, pt.out_positions[0]), (hi, pt.out_positions[1]))
                if t.dir == UP:
                    yield thick, thin, t.iso.inverse()
                else:
                    yield thin, thick, t.iso


def planar_fB(d: SlicedDiagram) -> Matrix:
    """Block automorphism for the cut at all slice-boundary strand points."""
    ev = require_closed_valid(d)
    points = []
    offset = {}
    for lv in range(1, len(ev.levels) - 1):
        for i, (r, _) in enumerate(ev.levels[lv], start=1):
            offset[(lv, i)] = len(points)
            points.append(r)
    n = len(points)
    blocks = [[None] * n for _ in range(n)]
    for sources, targets, m in _components(d, ev):
        row_sizes = [points[offset[p]] for p in targets]
        col_sizes = [points[offset[p]] for p in sources]
        r0 = 0
        for ti, tp in enumerate(targets):
            c0 = 0
            rs = row_sizes[ti]
            for si, sp in enumerate(sources):
                cs = col_sizes[si]
                sub = Matrix(d.ring, rs, cs,
                             tuple(tuple(m.entries[r0 + i][c0 + j] for j in range(cs))
                                   for i in range(rs)))
                bi, bj = offset[tp], offset[sp]
                blocks[bi][bj] = sub if blocks[bi][bj] is None else blocks[bi][bj] + sub
                c0 += cs
            r0 += rs
    return Matrix.from_blocks(d.ring, blocks, points, points)


def planar_invariant(d: SlicedDiagram) -> K1Class:
    """det(f_B) * tau(total cut rank) * tau'(d) for a closed diagram."""
    ev = require_closed_valid(d)
    fb = planar_fB(d)
    total = sum(r for lv in range(1, len(ev.levels) - 1) for r, _ in ev.levels[lv])
    unit = fb.det() * tau(total, d.ring).unit * tau_prime(d).unit
    return K1Class(d.ring, unit)


def gamma_bar(a: Matrix) -> SlicedDiagram:
    """Clockwise circle with monodromy a: cup, gate, cap."""
    if not a.is_square:
        raise RingError("monodromy must be square")
    if not a.det().is_unit():
        from .rings import NotInvertible
        raise NotInvertible(f"monodromy determinant {a.det()} is not a unit")
    n = a.rows
    return SlicedDiagram(a.ring, (), (
        ((1, CupT(n, "w")),),
        ((1, GateT(n, UP, a)),),
        ((1, CapT(n, "e")),),
    ))


# -- structural maps ----------------------------------------------------------

def forget(d: SlicedDiagram) -> AbstractFoam:
    """The underlying abstract foam: same vertices, transports, circles."""
    ev = require_closed_valid(d)

    vertices = []
    arc_out = {}       # point -> (target point, matrix) for interval arcs
    port_source = {}   # point -> VertexPort emitting an edge there
    port_target = {}   # point -> VertexPort absorbing an edge there
    vid = 0
    for k, sl in enumerate(d.slices):
        for pt in list(ev.placed[k]) + list(ev.placed_ids[k]):
            t = pt.tile
            lo, hi = k, k + 1
            if isinstance(t, (IdT, GateT, CupT, CapT)):
                (srcs, tgts, m), = list(_components_single(d, pt, lo, hi))
                arc_out[srcs[0]] = (tgts[0], m)
            elif isinstance(t, JoinT):
                kind = IN if t.dir == UP else OUT
                v = Vertex(vid, kind, t.iso)
                vertices.append(v)
                a = (lo, pt.in_positions[0])
                b = (lo, pt.in_positions[1])
                c = (hi, pt.out_positions[0])
                if t.dir == UP:
                    port_target[a] = VertexPort(vid, THIN0)
                    port_target[b] = VertexPort(vid, THIN1)
                    port_source[c] = VertexPort(vid, THICK)
                else:
                    port_source[a] = VertexPort(vid, THIN0)
                    port_source[b] = VertexPort(vid, THIN1)
                    port_target[c] = VertexPort(vid, THICK)
                vid += 1
            elif isinstance(t, ForkT):
                kind = OUT if t.dir == UP else IN
                v = Vertex(vid, kind, t.iso)
                vertices.append(v)
                c = (lo, pt.in_positions[0])
                a = (hi, pt.out_positions[0])
                b = (hi, pt.out_positions[1])
                if t.dir == UP:
                    port_target[c] = VertexPort(vid, THICK)
                    port_source[a] = VertexPort(vid, THIN0)
                    port_source[b] = VertexPort(vid, THIN1)
                else:
                    port_source[c] = VertexPort(vid, THICK)
                    port_target[a] = VertexPort(vid, THIN0)
                    port_target[b] = VertexPort(vid, THIN1)
                vid += 1

    edges = []
    circles = []
    eid = 0
    cid = 0
    consumed = set()

    # edges: walk from every vertex source port to the next vertex port
    for point, port in sorted(port_source.items()):
        rank = _point_rank(ev, point)
        m = Matrix.identity(d.ring, rank)
        cur = point
        while cur in arc_out:
            consumed.add(cur)
            cur, step = arc_out[cur][0], arc_out[cur][1]
            m = step * m
        edges.append(Edge(eid, rank, port, port_target[cur], m))
        eid += 1

    # leftover arcs form vertexless circles; base at the smallest point
    for start in sorted(arc_out):
        if start in consumed:
            continue
        loop = [start]
        cur, m = arc_out[start]
        consumed.add(start)
        while cur != start:
            consumed.add(cur)
            nxt, step = arc_out[cur]
            m = step * m
            loop.append(cur)
            cur = nxt
        base = min(loop)
        # recompose monodromy starting from the canonical base point
        mono = Matrix.identity(d.ring, _point_rank(ev, base))
        cur = base
        while True:
            nxt, step = arc_out[cur]
            mono = step * mono
            cur = nxt
            if cur == base:
                break
        circles.append(Circle(cid, _point_rank(ev, base), mono))
        cid += 1

    return AbstractFoam(d.ring, tuple(circles), tuple(vertices), tuple(edges), ())


def _point_rank(ev: Evaluation, point) -> int:
    lv, i = point
    return ev.levels[lv][i - 1][0]


def _components_single(d: SlicedDiagram, pt: PlacedTile, lo: int, hi: int):
    t = pt.tile
    ident = lambda r: Matrix.identity(d.ring, r)
    if isinstance(t, (IdT, GateT)):
        m = t.matrix if isinstance(t, GateT) else ident(t.rank)
        a, b = (lo, pt.in_positions[0]), (hi, pt.out_positions[0])
        yield ((a,), (b,), m) if t.dir == UP else ((b,), (a,), m)
    elif isinstance(t, CupT):
        l_, r_ = (hi, pt.out_positions[0]), (hi, pt.out_positions[1])
        yield ((l_,), (r_,), ident(t.rank)) if t.chir == "e" else ((r_,), (l_,), ident(t.rank))
    elif isinstance(t, CapT):
        l_, r_ = (lo, pt.in_positions[0]), (lo, pt.in_positions[1])
        yield ((l_,), (r_,), ident(t.rank)) if t.chir == "e" else ((r_,), (l_,), ident(t.rank))
    else:
        raise TypeError(t)


def reflect_reverse(d: SlicedDiagram) -> SlicedDiagram:
    """Mirror about a vertical axis and reverse every strand orientation."""
    ev = evaluate(d)
    new_bottom = tuple((r, flip(dd)) for r, dd in reversed(ev.levels[0]))
    new_slices = []
    for k, sl in enumerate(d.slices):
        width = len(ev.levels[k])
        out = []
        for pos, t in sl:
            n_in = len(tile_inputs(t))
            if n_in:
                new_pos = width - pos - n_in + 2
            else:
                new_pos = width - pos + 2
            out.append((new_pos, _mirror_tile(t)))
        new_slices.append(tuple(sorted(out, key=lambda x: x[0])))
    return SlicedDiagram(d.ring, new_bottom, tuple(new_slices))


def _mirror_tile(t: Tile) -> Tile:
    if isinstance(t, IdT):
        return IdT(t.rank, flip(t.dir))
    if isinstance(t, GateT):
        return GateT(t.rank, flip(t.dir), t.matrix.inverse())
    if isinstance(t, (CupT, CapT)):
        return t
    if isinstance(t, JoinT):
        return JoinT(t.r2, t.r1, flip(t.dir), t.iso * block_swap(t.iso.ring, t.r2, t.r1))
    if isinstance(t, ForkT):
        return ForkT(t.r2, t.r1, flip(t.dir), t.iso * block_swap(t.iso.ring, t.r2, t.r1))
    raise TypeError(t)


def disjoint_union(d1: SlicedDiagram, d2: SlicedDiagram) -> SlicedDiagram:
    """Place d2 to the right of d1, in slice normal form.

    The second diagram's slices run after the first's (the two orders are
    isotopic by the interchange law); its strands pass implicitly through
    d1's slices and its tiles shift right past d1's surviving strands.
    """
    if d1.ring != d2.ring:
        raise RingError(f"mixed rings {d1.ring} and {d2.ring}")
    w1_top = len(evaluate(d1).levels[-1])
    shifted = tuple(tuple((pos + w1_top, t) for pos, t in sl) for sl in d2.slices)
    return SlicedDiagram(d1.ring, d1.bottom + d2.bottom, d1.slices + shifted)


# -- DSL ---------------------------------------------------------------------

def _split_top_level(text: str, sep: str) -> list:
    parts = []
    depth = 0
    cur = []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _parse_tile(ring: RingSpec, text: str, k: int) -> tuple:
    text = text.strip()
    if "@" not in text:
        raise DiagramError(f"tile {text!r} missing @pos", slice_index=k)
    body, _, pos_text = text.rpartition("@")
    try:
        pos = int(pos_text)
    except ValueError:
        raise DiagramError(f"bad position {pos_text!r}", slice_index=k)
    body = body.strip()
    head = body.split(None, 1)[0] if body else ""
    rest = body[len(head):].strip()

    toks = []
    depth = 0
    cur = ""
    for ch in rest:
        if ch == "[":
            depth += 1
        if ch == "]":
            depth -= 1
        if ch.isspace() and depth == 0:
            if cur:
                toks.append(cur)
                cur = ""
        else:
            cur += ch
    if cur:
        toks.append(cur)

    def dirtok(s):
        if s not in (UP, DOWN):
            raise DiagramError(f"bad direction {s!r}", slice_index=k)
        return s

    try:
        if head == "id":
            return pos, IdT(int(toks[0]), dirtok(toks[1]))
        if head == "gate":
            return pos, GateT(int(toks[0]), dirtok(toks[1]), parse_matrix_literal(ring, toks[2]))
        if head in ("cup_e", "cup_w"):
            return pos, CupT(int(toks[0]), head[-1])
        if head in ("cap_e", "cap_w"):
            return pos, CapT(int(toks[0]), head[-1])
        if head == "join":
            return pos, JoinT(int(toks[0]), int(toks[1]), dirtok(toks[2]),
                              parse_matrix_literal(ring, toks[3]))
        if head == "fork":
            return pos, ForkT(int(toks[0]), int(toks[1]), dirtok(toks[2]),
                              parse_matrix_literal(ring, toks[3]))
        if head == "cross":
            return pos, ("cross", int(toks[0]), int(toks[1]), dirtok(toks[2]))
    except (IndexError, ValueError, RingError) as exc:
        raise DiagramError(f"bad tile {body!r}: {exc}", slice_index=k)
    raise DiagramError(f"unknown tile {head!r}", slice_index=k)


def cross_slices(ring: RingSpec, pos: int, r1: int, r2: int, d: str) -> list:
    """The two slices a crossing macro expands to."""
    total = r1 + r2
    join = JoinT(r1, r2, d, Matrix.identity(ring, total))
    fork = ForkT(r2, r1, d, block_swap(ring, r2, r1))
    return [((pos, join),), ((pos, fork),)]


def parse_diagram(text: str) -> SlicedDiagram:
    raw_lines = text.splitlines()
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(raw_lines)
             if ln.strip() and not ln.strip().startswith("#")]
    if not lines:
        raise DiagramError("empty input")
    # single-line compact form: semicolons separate the header and slices
    if len(lines) == 1 and _split_top_level(lines[0][1], ";")[0].strip().startswith("ring") \
            and len(_split_top_level(lines[0][1], ";")) > 1:
        pieces = [p.strip() for p in _split_top_level(lines[0][1], ";")]
        header, slice_texts = pieces[0], [p for p in pieces[1:] if p]
        unit_lines = [(1, header)] + [(1, s) for s in slice_texts]
        return _parse_lines(unit_lines, one_tile_per_line=True)
    return _parse_lines(lines, one_tile_per_line=False)


def _parse_lines(lines, one_tile_per_line: bool) -> SlicedDiagram:
    lineno, header = lines[0]
    if not header.startswith("ring"):
        raise DiagramError("first line must be 'ring <spec>'", line=lineno)
    try:
        ring = RingSpec.parse(header[4:].strip())
    except RingError as exc:
        raise DiagramError(str(exc), line=lineno)
    bottom = ()
    body = lines[1:]
    if body and body[0][1].startswith("bottom"):
        lineno_b, bline = body[0]
        rest = bline[6:].strip()
        strands = []
        if rest:
            for part in rest.split(","):
                try:
                    r_text, d_text = part.split()
                    if d_text not in (UP, DOWN):
                        raise ValueError(f"bad direction {d_text!r}")
                    strands.append((int(r_text), d_text))
                except ValueError as exc:
                    raise DiagramError(f"bad bottom entry {part!r}: {exc}", line=lineno_b)
        bottom = tuple(strands)
        body = body[1:]
    slices = []
    for k, (lineno, ln) in enumerate(body):
        if ln == ";":
            slices.append(())
            continue
        tile_texts = [ln] if one_tile_per_line else \
            [t.strip() for t in _split_top_level(ln, ";") if t.strip()]
        tiles = []
        pending_cross = []
        for tt in tile_texts:
            parsed = _parse_tile(ring, tt, k)
            if isinstance(parsed[1], tuple) and parsed[1][0] == "cross":
                pending_cross.append(parsed)
            else:
                tiles.append(parsed)
        if pending_cross:
            if tiles or len(pending_cross) > 1:
                raise DiagramError("a crossing must be the only tile in its slice",
                                   slice_index=k)
            pos, (_, r1, r2, dd) = pending_cross[0]
            slices.extend(cross_slices(ring, pos, r1, r2, dd))
        else:
            slices.append(tuple(sorted(tiles, key=lambda x: x[0])))
    d = SlicedDiagram(ring, bottom, tuple(slices))
    evaluate(d)  # semantic validation
    return d


def _tile_text(t: Tile) -> str:
    if isinstance(t, IdT):
        return f"id {t.rank} {t.dir}"
    if isinstance(t, GateT):
        return f"gate {t.rank} {t.dir} {t.matrix}"
    if isinstance(t, CupT):
        return f"cup_{t.chir} {t.rank}"
    if isinstance(t, CapT):
        return f"cap_{t.chir} {t.rank}"
    if isinstance(t, JoinT):
        return f"join {t.r1} {t.r2} {t.dir} {t.iso}"
    if isinstance(t, ForkT):
        return f"fork {t.r1} {t.r2} {t.dir} {t.iso}"
    raise TypeError(t)


def serialize_diagram(d: SlicedDiagram) -> str:
    lines = [f"ring {d.ring}"]
    if d.bottom:
        lines.append("bottom " + ", ".join(f"{r} {dd}" for r, dd in d.bottom))
    for sl in d.slices:
        if not sl:
            lines.append(";")
        else:
            lines.append("; ".join(f"{_tile_text(t)}@{pos}" for pos, t in sl))
    return "\n".join(lines) + "\n"


# -- JSON mirror ---------------------------------------------------------------

def _tile_to_json(t: Tile) -> dict:
    if isinstance(t, IdT):
        return {"tile": "id", "rank": t.rank, "dir": t.dir}
    if isinstance(t, GateT):
        return {"tile": "gate", "rank": t.rank, "dir": t.dir,
                "matrix": matrix_to_json(t.matrix)}
    if isinstance(t, CupT):
        return {"tile": f"cup_{t.chir}", "rank": t.rank}
    if isinstance(t, CapT):
        return {"tile": f"cap_{t.chir}", "rank": t.rank}
    if isinstance(t, JoinT):
        return {"tile": "join", "r1": t.r1, "r2": t.r2, "dir": t.dir,
                "iso": matrix_to_json(t.iso)}
    if isinstance(t, ForkT):
        return {"tile": "fork", "r1": t.r1, "r2": t.r2, "dir": t.dir,
                "iso": matrix_to_json(t.iso)}
    raise TypeError(t)


def _tile_from_json(ring: RingSpec, obj: dict) -> Tile:
    name = obj["tile"]
    if name == "id":
        return IdT(obj["rank"], obj["dir"])
    if name == "gate":
        return GateT(obj["rank"], obj["dir"], matrix_from_json(ring, obj["matrix"]))
    if name.startswith("cup_"):
        return CupT(obj["rank"], name[-1])
    if name.startswith("cap_"):
        return CapT(obj["rank"], name[-1])
    if name == "join":
        return JoinT(obj["r1"], obj["r2"], obj["dir"], matrix_from_json(ring, obj["iso"]))
    if name == "fork":
        return ForkT(obj["r1"], obj["r2"], obj["dir"], matrix_from_json(ring, obj["iso"]))
    raise DiagramError(f"unknown tile kind {name!r}")


def diagram_to_json(d: SlicedDiagram) -> dict:
    return {
        "kind": "diagram",
        "ring": str(d.ring),
        "bottom": [[r, dd] for r, dd in d.bottom],
        "slices": [[{"pos": pos, **_tile_to_json(t)} for pos, t in sl] for sl in d.slices],
    }


def diagram_from_json(obj: dict) -> SlicedDiagram:
    ring = RingSpec.parse(obj["ring"])
    bottom = tuple((r, dd) for r, dd in obj.get("bottom", []))
    slices = tuple(tuple((it["pos"], _tile_from_json(ring, it)) for it in sl)
                   for sl in obj["slices"])
    d = SlicedDiagram(ring, bottom, slices)
    evaluate(d)
    return d
