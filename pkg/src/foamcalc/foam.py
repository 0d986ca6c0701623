"""Abstract (non-embedded) decorated 0-foams and 1-foams.

A closed decorated 1-foam is an oriented trivalent graph: every vertex either
merges two thin edges into a thick one (an ``in`` vertex) or splits a thick
edge into two thin ones (an ``out`` vertex), with an invertible direct-sum
isomorphism fixed at the vertex.  Edges carry an invertible transport matrix
stored along their orientation; vertexless circles carry a monodromy matrix.

A strong cut marks at least one point on every edge and circle.  Cutting
there leaves only intervals and tripods, whose maps assemble into one block
automorphism whose determinant class (up to sign) is the foam invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence, Union

from .kgroups import K0Class, K1Class, K1QuotClass, k1_project_quotient
from .matrix import Matrix, block_direct_sum, direct_sum
from .rings import RingError, RingSpec, Scalar

THIN0, THIN1, THICK = "thin0", "thin1", "thick"
IN, OUT = "in", "out"
BOTTOM, TOP = "bottom", "top"


@dataclass(frozen=True)
class VertexPort:
    vertex: int
    slot: str  # thin0 | thin1 | thick


@dataclass(frozen=True)
class EndPort:
    end: int


Port = Union[VertexPort, EndPort]


@dataclass(frozen=True)
class Vertex:
    id: int
    kind: str  # in | out
    iso: Matrix  # maps R^{r1} (+) R^{r3} -> R^{r2}, thin0 block first


@dataclass(frozen=True)
class Edge:
    id: int
    rank: int
    source: Port
    target: Port
    transport: Matrix  # square of size rank, stored along the orientation


@dataclass(frozen=True)
class Circle:
    id: int
    rank: int
    monodromy: Matrix


@dataclass(frozen=True)
class OpenEnd:
    id: int
    side: str  # bottom | top


@dataclass(frozen=True)
class ZeroFoam:
    """A finite set of signed, ranked points."""

    points: tuple  # of (sign, rank, label) with sign in {+1, -1}

    @staticmethod
    def of(points: Iterable[tuple]) -> "ZeroFoam":
        out = []
        for p in points:
            sign, rank = p[0], p[1]
            label = p[2] if len(p) > 2 else None
            if sign not in (1, -1):
                raise ValueError(f"bad sign {sign}")
            if rank < 0:
                raise ValueError(f"bad rank {rank}")
            out.append((sign, rank, label))
        return ZeroFoam(tuple(out))


@dataclass(frozen=True)
class AbstractFoam:
    ring: RingSpec
    circles: tuple = ()
    vertices: tuple = ()
    edges: tuple = ()
    open_ends: tuple = ()

    @property
    def is_closed(self) -> bool:
        return not self.open_ends

    def vertex(self, vid: int) -> Vertex:
        return next(v for v in self.vertices if v.id == vid)

    def edge_at(self, port: Port, role: str) -> Optional[Edge]:
        """The edge whose source ('source') or target ('target') is port."""
        for e in self.edges:
            if getattr(e, role) == port:
                return e
        return None


def foam(ring: RingSpec, circles=(), vertices=(), edges=(), open_ends=()) -> AbstractFoam:
    return AbstractFoam(ring, tuple(circles), tuple(vertices), tuple(edges), tuple(open_ends))


# -- validation -------------------------------------------------------------

def _vertex_port_roles(kind: str) -> dict:
    """Slot -> 'target' if edges must point into the slot, else 'source'."""
    if kind == IN:
        return {THIN0: "target", THIN1: "target", THICK: "source"}
    return {THIN0: "source", THIN1: "source", THICK: "target"}


def validate_abstract(f: AbstractFoam) -> list:
    """Return a list of human-readable violations; empty means valid."""
    issues = []

    def check_matrix(m: Matrix, rank: int, where: str) -> None:
        if m.ring != f.ring:
            issues.append(f"{where}: ring mismatch ({m.ring} vs {f.ring})")
            return
        if m.rows != rank or m.cols != rank:
            issues.append(f"{where}: expected {rank}x{rank}, got {m.rows}x{m.cols}")
            return
        if not m.det().is_unit():
            issues.append(f"{where}: NotInvertible (det {m.det()})")

    for c in f.circles:
        if c.rank < 0:
            issues.append(f"circle {c.id}: negative rank")
        check_matrix(c.monodromy, c.rank, f"circle {c.id} monodromy")

    seen_ids = set()
    for e in f.edges:
        if e.id in seen_ids:
            issues.append(f"edge {e.id}: duplicate id")
        seen_ids.add(e.id)
        if e.rank < 0:
            issues.append(f"edge {e.id}: negative rank")
        check_matrix(e.transport, e.rank, f"edge {e.id} transport")

    # port incidence must be a perfect matching with the right directions
    used = {}
    for e in f.edges:
        for role in ("source", "target"):
            port = getattr(e, role)
            key = (port, )
            if key in used:
                issues.append(f"edge {e.id}: port {port} already used by edge {used[key]}")
            used[key] = e.id

    end_ids = {o.id: o for o in f.open_ends}
    for e in f.edges:
        for role in ("source", "target"):
            port = getattr(e, role)
            if isinstance(port, EndPort) and port.end not in end_ids:
                issues.append(f"edge {e.id}: unknown open end {port.end}")

    for o in f.open_ends:
        hits = [(e, role) for e in f.edges for role in ("source", "target")
                if getattr(e, role) == EndPort(o.id)]
        if len(hits) != 1:
            issues.append(f"open end {o.id}: used {len(hits)} times, expected 1")

    for v in f.vertices:
        if v.kind not in (IN, OUT):
            issues.append(f"vertex {v.id}: bad kind {v.kind}")
            continue
        roles = _vertex_port_roles(v.kind)
        ranks = {}
        ok = True
        for slot, role in roles.items():
            port = VertexPort(v.id, slot)
            e = f.edge_at(port, role)
            wrong = f.edge_at(port, "source" if role == "target" else "target")
            if e is None:
                if wrong is not None:
                    issues.append(f"vertex {v.id} slot {slot}: edge {wrong.id} points the wrong way")
                else:
                    issues.append(f"vertex {v.id} slot {slot}: no edge attached")
                ok = False
                continue
            ranks[slot] = e.rank
        if not ok:
            continue
        if ranks[THICK] != ranks[THIN0] + ranks[THIN1]:
            issues.append(
                f"vertex {v.id}: RankMismatch {ranks[THICK]} != {ranks[THIN0]} + {ranks[THIN1]}")
            continue
        check_matrix(v.iso, ranks[THICK], f"vertex {v.id} iso")

    return issues


def require_valid(f: AbstractFoam) -> None:
    issues = validate_abstract(f)
    if issues:
        raise ValueError("invalid foam: " + "; ".join(issues))


# -- K0 ----------------------------------------------------------------------

def gamma0(z: ZeroFoam) -> K0Class:
    """Signed rank sum of a 0-foam."""
    return K0Class(sum(sign * rank for sign, rank, _ in z.points))


def boundary_zero_foams(f: AbstractFoam) -> tuple:
    """The (bottom, top) 0-foams cut out by the open ends.

    A bottom point is positive when its edge leaves it upward (the end is the
    edge's source); a top point is positive when its edge arrives (target).
    """
    bottom, top = [], []
    for o in f.open_ends:
        port = EndPort(o.id)
        src = f.edge_at(port, "source")
        tgt = f.edge_at(port, "target")
        if src is not None:
            sign, rank = (1, src.rank) if o.side == BOTTOM else (-1, src.rank)
        elif tgt is not None:
            sign, rank = (-1, tgt.rank) if o.side == BOTTOM else (1, tgt.rank)
        else:
            raise ValueError(f"open end {o.id} unused")
        (bottom if o.side == BOTTOM else top).append((sign, rank, None))
    return ZeroFoam(tuple(bottom)), ZeroFoam(tuple(top))


def boundary_delta(f: AbstractFoam) -> K0Class:
    """gamma0(top) - gamma0(bottom); zero on every valid decorated cobordism."""
    require_valid(f)
    bot, top = boundary_zero_foams(f)
    return gamma0(top) + (-gamma0(bot))


# -- strong cuts and the block automorphism ----------------------------------

@dataclass(frozen=True)
class StrongCut:
    """Number of cut points on each edge and circle (at least one each)."""

    edge_points: tuple   # of (edge_id, count >= 1), sorted by edge id
    circle_points: tuple  # of (circle_id, count >= 1), sorted by circle id

    @staticmethod
    def of(edge_points: dict, circle_points: dict) -> "StrongCut":
        return StrongCut(tuple(sorted(edge_points.items())),
                         tuple(sorted(circle_points.items())))


def canonical_strong_cut(f: AbstractFoam) -> StrongCut:
    """One midpoint per edge plus one base point per vertexless circle."""
    return StrongCut.of({e.id: 1 for e in f.edges}, {c.id: 1 for c in f.circles})


def refine_cut(cut: StrongCut, extra_edge: dict = None, extra_circle: dict = None) -> StrongCut:
    ep = dict(cut.edge_points)
    cp = dict(cut.circle_points)
    for k, n in (extra_edge or {}).items():
        ep[k] = ep.get(k, 0) + n
    for k, n in (extra_circle or {}).items():
        cp[k] = cp.get(k, 0) + n
    return StrongCut.of(ep, cp)


@dataclass(frozen=True)
class FBAssembly:
    cut_points: tuple  # of (location tag, rank) in block order
    total_rank: int
    matrix: Matrix


def _check_strong(f: AbstractFoam, cut: StrongCut) -> None:
    ep, cp = dict(cut.edge_points), dict(cut.circle_points)
    for e in f.edges:
        if ep.get(e.id, 0) < 1:
            raise ValueError(f"cut misses edge {e.id}: not a strong cut")
    for c in f.circles:
        if cp.get(c.id, 0) < 1:
            raise ValueError(f"cut misses circle {c.id}: not a strong cut")
    for eid in ep:
        if not any(e.id == eid for e in f.edges):
            raise ValueError(f"cut names unknown edge {eid}")
    for cid in cp:
        if not any(c.id == cid for c in f.circles):
            raise ValueError(f"cut names unknown circle {cid}")


def assemble_fB(f: AbstractFoam, cut: StrongCut = None) -> FBAssembly:
    """Assemble the block automorphism of the cut module.

    Interval components contribute their transport along the orientation;
    tripod components contribute the vertex isomorphism composed with the
    adjacent edge-piece transports (the full edge transport rides on the
    piece next to the edge's target).  Traversal against the orientation
    uses the exact inverse.
    """
    require_valid(f)
    if not f.is_closed:
        raise ValueError("fB is defined for closed foams only")
    if cut is None:
        cut = canonical_strong_cut(f)
    _check_strong(f, cut)

    ep, cp = dict(cut.edge_points), dict(cut.circle_points)

    points = []          # (tag, rank) in block order
    offset = {}          # tag -> block index
    for e in f.edges:
        for i in range(ep[e.id]):
            offset[("e", e.id, i)] = len(points)
            points.append((("e", e.id, i), e.rank))
    for c in f.circles:
        for i in range(cp[c.id]):
            offset[("c", c.id, i)] = len(points)
            points.append((("c", c.id, i), c.rank))

    n_blocks = len(points)
    blocks = [[None] * n_blocks for _ in range(n_blocks)]

    def put(target_tag, source_tag, m: Matrix) -> None:
        i, j = offset[target_tag], offset[source_tag]
        blocks[i][j] = m if blocks[i][j] is None else blocks[i][j] + m

    # interval components interior to an edge (identity transports; the full
    # transport is carried by the last piece, handled at the target side)
    for e in f.edges:
        k = ep[e.id]
        for i in range(k - 1):
            put(("e", e.id, i + 1), ("e", e.id, i), Matrix.identity(f.ring, e.rank))

    # circles: identity intervals except the closing one, which carries the
    # monodromy
    for c in f.circles:
        k = cp[c.id]
        for i in range(k - 1):
            put(("c", c.id, i + 1), ("c", c.id, i), Matrix.identity(f.ring, c.rank))
        put(("c", c.id, 0), ("c", c.id, k - 1), c.monodromy)

    # tripods: one per vertex; legs are the adjacent edge pieces
    def leg_into(port: Port) -> tuple:
        """Cut point and transport for the edge piece flowing into port."""
        e = f.edge_at(port, "target")
        tag = ("e", e.id, ep[e.id] - 1)
        return tag, e.transport

    def leg_out_of(port: Port) -> tuple:
        """Cut point and transport for the edge piece flowing out of port."""
        e = f.edge_at(port, "source")
        tag = ("e", e.id, 0)
        return tag, Matrix.identity(f.ring, e.rank)

    for v in f.vertices:
        if v.kind == IN:
            t0, a0 = leg_into(VertexPort(v.id, THIN0))
            t1, a1 = leg_into(VertexPort(v.id, THIN1))
            tt, _ = leg_out_of(VertexPort(v.id, THICK))
            m = v.iso * block_direct_sum(a0, a1)
            r0, r1 = a0.rows, a1.rows
            put(tt, t0, Matrix(f.ring, m.rows, r0,
                               tuple(tuple(row[:r0]) for row in m.entries)))
            put(tt, t1, Matrix(f.ring, m.rows, r1,
                               tuple(tuple(row[r0:]) for row in m.entries)))
        else:
            tt, at = leg_into(VertexPort(v.id, THICK))
            t0, _ = leg_out_of(VertexPort(v.id, THIN0))
            t1, _ = leg_out_of(VertexPort(v.id, THIN1))
            e0 = f.edge_at(VertexPort(v.id, THIN0), "source")
            m = v.iso.inverse() * at
            r0 = e0.rank
            put(t0, tt, Matrix(f.ring, r0, m.cols, m.entries[:r0]))
            put(t1, tt, Matrix(f.ring, m.rows - r0, m.cols, m.entries[r0:]))

    total = sum(r for _, r in points)
    sizes = [r for _, r in points]
    fb = Matrix.from_blocks(f.ring, blocks, sizes, sizes)
    if not fb.det().is_unit():
        raise ValueError("assembled block map is not an automorphism")
    return FBAssembly(tuple(points), total, fb)


def abstract_invariant(f: AbstractFoam) -> K1QuotClass:
    """det of the cut automorphism modulo sign; independent of the cut."""
    fb = assemble_fB(f)
    return k1_project_quotient(K1Class(f.ring, fb.matrix.det()))


# -- serialization ------------------------------------------------------------

def _port_to_json(p: Port) -> dict:
    if isinstance(p, VertexPort):
        return {"vertex": p.vertex, "slot": p.slot}
    return {"end": p.end}


def _port_from_json(obj: dict) -> Port:
    if "vertex" in obj:
        return VertexPort(obj["vertex"], obj["slot"])
    return EndPort(obj["end"])


def abstract_foam_to_json(f: AbstractFoam) -> dict:
    from .matrix import matrix_to_json
    return {
        "kind": "abstract_foam",
        "ring": str(f.ring),
        "circles": [{"id": c.id, "rank": c.rank, "monodromy": matrix_to_json(c.monodromy)}
                    for c in sorted(f.circles, key=lambda c: c.id)],
        "vertices": [{"id": v.id, "vertex_kind": v.kind, "iso": matrix_to_json(v.iso)}
                     for v in sorted(f.vertices, key=lambda v: v.id)],
        "edges": [{"id": e.id, "rank": e.rank, "source": _port_to_json(e.source),
                   "target": _port_to_json(e.target), "transport": matrix_to_json(e.transport)}
                  for e in sorted(f.edges, key=lambda e: e.id)],
        "open_ends": [{"id": o.id, "side": o.side}
                      for o in sorted(f.open_ends, key=lambda o: o.id)],
    }


def abstract_foam_from_json(obj: dict) -> AbstractFoam:
    from .matrix import matrix_from_json
    ring = RingSpec.parse(obj["ring"])
    circles = tuple(Circle(c["id"], c["rank"], matrix_from_json(ring, c["monodromy"]))
                    for c in obj.get("circles", []))
    vertices = tuple(Vertex(v["id"], v["vertex_kind"], matrix_from_json(ring, v["iso"]))
                     for v in obj.get("vertices", []))
    edges = tuple(Edge(e["id"], e["rank"], _port_from_json(e["source"]),
                       _port_from_json(e["target"]), matrix_from_json(ring, e["transport"]))
                  for e in obj.get("edges", []))
    ends = tuple(OpenEnd(o["id"], o["side"]) for o in obj.get("open_ends", []))
    return AbstractFoam(ring, circles, vertices, edges, ends)


def zero_foam_to_json(z: ZeroFoam) -> dict:
    return {"kind": "zero_foam",
            "points": [{"sign": s, "rank": r, "label": lbl} for s, r, lbl in z.points]}


def zero_foam_from_json(obj: dict) -> ZeroFoam:
    return ZeroFoam.of([(p["sign"], p["rank"], p.get("label")) for p in obj["points"]])
