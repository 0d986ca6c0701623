"""Deterministic random corpora: matrices, words, foams, cobordisms.

Everything is driven by a caller-supplied random.Random so that corpora are
reproducible from a seed.
"""

from __future__ import annotations

import random
from typing import Optional

from .braid import BraidFoamWord, Fork, Gate, Join, Swap, braid_close, top_ranks
from .foam import (
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
    Vertex,
    VertexPort,
    ZeroFoam,
)
from .matrix import Matrix, block_swap
from .rings import RingSpec, Scalar


def random_unit_matrix(rng: random.Random, ring: RingSpec, n: int) -> Matrix:
    """Random invertible matrix: shears times a +-1 diagonal."""
    m = Matrix.identity(ring, n)
    for _ in range(2 * n + 2):
        i, j = rng.randrange(n) if n else 0, rng.randrange(n) if n else 0
        if n == 0 or i == j:
            continue
        rows = Matrix.identity(ring, n).to_lists()
        rows[i][j] = Scalar.of(ring, rng.randint(-3, 3))
        m = m * Matrix(ring, n, n, tuple(tuple(r) for r in rows))
    if n:
        rows = Matrix.identity(ring, n).to_lists()
        for i in range(n):
            rows[i][i] = Scalar.of(ring, rng.choice([-1, 1]))
        m = m * Matrix(ring, n, n, tuple(tuple(r) for r in rows))
    return m


def random_gl_matrix(rng: random.Random, ring: RingSpec, n: int) -> Matrix:
    """Random invertible matrix with an arbitrary unit determinant."""
    m = random_unit_matrix(rng, ring, n)
    if n == 0:
        return m
    rows = Matrix.identity(ring, n).to_lists()
    if ring.kind == "Q":
        u = Scalar.of(ring, rng.choice([1, 2, 3, 5, -2, -3]))
    elif ring.kind == "Z":
        u = Scalar.of(ring, rng.choice([1, -1]))
    else:
        units = [v for v in range(1, ring.modulus)
                 if Scalar.of(ring, v).is_unit()]
        u = Scalar.of(ring, rng.choice(units))
    rows[0][0] = u
    return m * Matrix(ring, n, n, tuple(tuple(r) for r in rows))


def random_zero_foam(rng: random.Random, max_points: int = 6, max_rank: int = 4) -> ZeroFoam:
    pts = [(rng.choice([1, -1]), rng.randint(0, max_rank), None)
           for _ in range(rng.randint(0, max_points))]
    return ZeroFoam.of(pts)


def random_braid_word(rng: random.Random, ring: RingSpec, n_strands: int = 3,
                      n_ops: int = 6, max_rank: int = 3) -> BraidFoamWord:
    """A random matched word: ends with the same rank list it starts with."""
    bottom = [rng.randint(0, max_rank) for _ in range(n_strands)]
    if not any(bottom):
        bottom[rng.randrange(n_strands)] = 1
    ranks = list(bottom)
    gens = []
    forks_owed = []  # (pos, r1, r2) joins to undo so the word re-matches
    for _ in range(n_ops):
        choices = ["gate"]
        if len(ranks) >= 2:
            choices += ["swap_pair", "join_fork"]
        op = rng.choice(choices)
        if op == "gate":
            i = rng.randrange(len(ranks))
            gens.append(Gate(i + 1, random_gl_matrix(rng, ring, ranks[i])))
        elif op == "swap_pair":
            i = rng.randrange(len(ranks) - 1)
            gens.append(Swap(i + 1))
            gens.append(Swap(i + 1))
        else:
            i = rng.randrange(len(ranks) - 1)
            r1, r2 = ranks[i], ranks[i + 1]
            gens.append(Join(i + 1, random_unit_matrix(rng, ring, r1 + r2)))
            gens.append(Fork(i + 1, r1, r2, random_unit_matrix(rng, ring, r1 + r2)))
    return BraidFoamWord.of(ring, bottom, gens)


def random_matchings(rng: random.Random, ring: RingSpec, word: BraidFoamWord) -> list:
    return [random_gl_matrix(rng, ring, r) for r in top_ranks(word)]


def random_closed_foam(rng: random.Random, ring: RingSpec, n_strands: int = 3,
                       n_ops: int = 5, max_rank: int = 3, extra_circles: int = 2) -> AbstractFoam:
    w = random_braid_word(rng, ring, n_strands, n_ops, max_rank)
    f = braid_close(w, random_matchings(rng, ring, w))
    circles = list(f.circles)
    next_cid = max((c.id for c in circles), default=-1) + 1
    for _ in range(rng.randint(0, extra_circles)):
        r = rng.randint(0, max_rank)
        circles.append(Circle(next_cid, r, random_gl_matrix(rng, ring, r)))
        next_cid += 1
    return AbstractFoam(ring, tuple(circles), f.vertices, f.edges, ())


def random_open_cobordism(rng: random.Random, ring: RingSpec, n_bottom: int = 3,
                          n_ops: int = 8, max_rank: int = 3) -> AbstractFoam:
    """A random decorated cobordism built from vertices, cups, caps, gates.

    Stubs are dangling half-edges crossing the build frontier, flowing up
    (source fixed below) or down (target fixed below); every composition step
    keeps the foam valid, and the leftover stubs become top boundary points.
    """
    edges = {}       # eid -> [rank, source, target, transport]
    vertices = []
    open_ends = []
    stubs = []       # (eid, 'up'|'down', rank)
    next_eid = 0
    next_vid = 0
    next_oid = 0

    def new_edge(rank, source, target):
        nonlocal next_eid
        edges[next_eid] = [rank, source, target, Matrix.identity(ring, rank)]
        next_eid += 1
        return next_eid - 1

    for _ in range(n_bottom):
        r = rng.randint(0, max_rank)
        o = OpenEnd(next_oid, BOTTOM)
        next_oid += 1
        open_ends.append(o)
        if rng.random() < 0.5:
            eid = new_edge(r, EndPort(o.id), None)
            stubs.append((eid, "up", r))
        else:
            eid = new_edge(r, None, EndPort(o.id))
            stubs.append((eid, "down", r))

    def up_stubs():
        return [s for s in stubs if s[1] == "up"]

    def down_stubs():
        return [s for s in stubs if s[1] == "down"]

    def add_vertex(kind, iso):
        nonlocal next_vid
        vertices.append(Vertex(next_vid, kind, iso))
        next_vid += 1
        return next_vid - 1

    for _ in range(n_ops):
        ops = ["cup", "gate"]
        if len(up_stubs()) >= 2:
            ops.append("in_merge")
        if up_stubs():
            ops.append("out_split")
        if len(down_stubs()) >= 2:
            ops.append("out_merge_down")
        if down_stubs():
            ops.append("in_split_down")
        if any(u[2] == d[2] for u in up_stubs() for d in down_stubs()):
            ops += ["cap", "cap"]
        op = rng.choice(ops)
        if op == "gate":
            if not stubs:
                continue
            eid, d, r = rng.choice(stubs)
            a = random_gl_matrix(rng, ring, r)
            t = edges[eid][3]
            edges[eid][3] = (a * t) if d == "up" else (t * a)
        elif op == "cup":
            r = rng.randint(0, max_rank)
            eid = new_edge(r, None, None)
            stubs.append((eid, "down", r))
            stubs.append((eid, "up", r))
        elif op == "cap":
            pairs = [(u, d) for u in up_stubs() for d in down_stubs() if u[2] == d[2]]
            u, d = rng.choice(pairs)
            stubs.remove(u)
            stubs.remove(d)
            if u[0] == d[0]:
                # both ends of one cup edge close up: a vertexless circle
                rank, _, _, t = edges.pop(u[0])
                edges[("circle", u[0])] = [rank, "circle", "circle", t]
            else:
                ru, rd = edges.pop(u[0]), edges.pop(d[0])
                merged = next_eid
                next_eid += 1
                edges[merged] = [ru[0], ru[1], rd[2], rd[3] * ru[3]]
                # surviving stubs of the spliced cup edges follow the new id
                stubs = [(merged, sd, sr) if se in (u[0], d[0]) else (se, sd, sr)
                         for se, sd, sr in stubs]
        elif op == "in_merge":
            a, b = rng.sample(up_stubs(), 2)
            stubs.remove(a)
            stubs.remove(b)
            vid = add_vertex(IN, random_unit_matrix(rng, ring, a[2] + b[2]))
            edges[a[0]][2] = VertexPort(vid, THIN0)
            edges[b[0]][2] = VertexPort(vid, THIN1)
            eid = new_edge(a[2] + b[2], VertexPort(vid, THICK), None)
            stubs.append((eid, "up", a[2] + b[2]))
        elif op == "out_split":
            s = rng.choice(up_stubs())
            stubs.remove(s)
            r1 = rng.randint(0, s[2])
            vid = add_vertex(OUT, random_unit_matrix(rng, ring, s[2]))
            edges[s[0]][2] = VertexPort(vid, THICK)
            e1 = new_edge(r1, VertexPort(vid, THIN0), None)
            e2 = new_edge(s[2] - r1, VertexPort(vid, THIN1), None)
            stubs.append((e1, "up", r1))
            stubs.append((e2, "up", s[2] - r1))
        elif op == "out_merge_down":
            a, b = rng.sample(down_stubs(), 2)
            stubs.remove(a)
            stubs.remove(b)
            vid = add_vertex(OUT, random_unit_matrix(rng, ring, a[2] + b[2]))
            edges[a[0]][1] = VertexPort(vid, THIN0)
            edges[b[0]][1] = VertexPort(vid, THIN1)
            eid = new_edge(a[2] + b[2], None, VertexPort(vid, THICK))
            stubs.append((eid, "down", a[2] + b[2]))
        elif op == "in_split_down":
            s = rng.choice(down_stubs())
            stubs.remove(s)
            r1 = rng.randint(0, s[2])
            vid = add_vertex(IN, random_unit_matrix(rng, ring, s[2]))
            edges[s[0]][1] = VertexPort(vid, THICK)
            e1 = new_edge(r1, None, VertexPort(vid, THIN0))
            e2 = new_edge(s[2] - r1, None, VertexPort(vid, THIN1))
            stubs.append((e1, "down", r1))
            stubs.append((e2, "down", s[2] - r1))

    for eid, d, r in stubs:
        o = OpenEnd(next_oid, TOP)
        next_oid += 1
        open_ends.append(o)
        if d == "up":
            edges[eid][2] = EndPort(o.id)
        else:
            edges[eid][1] = EndPort(o.id)

    circle_list = []
    edge_list = []
    ei = 0
    ci = 0
    for key, (rank, src, tgt, t) in edges.items():
        if src == "circle":
            circle_list.append(Circle(ci, rank, t))
            ci += 1
        else:
            edge_list.append(Edge(ei, rank, src, tgt, t))
            ei += 1
    return AbstractFoam(ring, tuple(circle_list), tuple(vertices), tuple(edge_list),
                        tuple(open_ends))


# -- random closed sliced diagrams --------------------------------------------

def _zigzag_slices(rng, rank, d, p):
    from .diagram import DOWN, UP, CapT, CupT
    side = rng.choice(["left", "right"])
    if d == UP:
        if side == "right":
            return [((p + 1, CupT(rank, "e")),), ((p, CapT(rank, "e")),)]
        return [((p, CupT(rank, "w")),), ((p + 1, CapT(rank, "w")),)]
    if side == "right":
        return [((p + 1, CupT(rank, "w")),), ((p, CapT(rank, "w")),)]
    return [((p, CupT(rank, "e")),), ((p + 1, CapT(rank, "e")),)]


def _braid_closure_component(rng, ring, max_strands, max_rank, n_ops):
    from .diagram import DOWN, UP, CapT, CupT, ForkT, GateT, JoinT, cross_slices
    k = rng.randint(1, max_strands)
    ranks = [rng.randint(0, max_rank) for _ in range(k)]
    slices = [((i + 1, CupT(ranks[i], "w")),) for i in range(k)]
    for _ in range(n_ops):
        op = rng.choice(["gate_up", "gate_down", "cross_pair", "bubble", "down_bubble"])
        if op == "gate_up":
            p = rng.randrange(k)
            slices.append(((p + 1, GateT(ranks[p], UP, random_gl_matrix(rng, ring, ranks[p]))),))
        elif op == "gate_down":
            p = rng.randrange(k)
            rank = ranks[k - 1 - p]
            slices.append(((k + 1 + p, GateT(rank, DOWN, random_gl_matrix(rng, ring, rank))),))
        elif op == "cross_pair" and k >= 2:
            p = rng.randrange(k - 1)
            slices.extend(cross_slices(ring, p + 1, ranks[p], ranks[p + 1], UP))
            slices.extend(cross_slices(ring, p + 1, ranks[p + 1], ranks[p], UP))
        elif op == "bubble":
            p = rng.randrange(k)
            r = ranks[p]
            r1 = rng.randint(0, r)
            iso1 = random_unit_matrix(rng, ring, r)
            iso2 = random_unit_matrix(rng, ring, r)
            slices.append(((p + 1, ForkT(r1, r - r1, UP, iso1)),))
            slices.append(((p + 1, JoinT(r1, r - r1, UP, iso2)),))
        elif op == "down_bubble":
            p = rng.randrange(k)
            r = ranks[k - 1 - p]
            r1 = rng.randint(0, r)
            iso1 = random_unit_matrix(rng, ring, r)
            iso2 = random_unit_matrix(rng, ring, r)
            slices.append(((k + 1 + p, ForkT(r1, r - r1, DOWN, iso1)),))
            slices.append(((k + 1 + p, JoinT(r1, r - r1, DOWN, iso2)),))
    for i in reversed(range(k)):
        slices.append(((i + 1, CapT(ranks[i], "e")),))
    return slices


def _pearl_component(rng, ring, max_rank):
    from .diagram import UP, CapT, CupT, GateT
    r = rng.randint(0, max_rank)
    a = random_gl_matrix(rng, ring, r)
    return [((1, CupT(r, "w")),), ((1, GateT(r, UP, a)),), ((1, CapT(r, "e")),)]


def random_diagram(ring: RingSpec, seed: int, max_strands: int = 3, max_rank: int = 3,
                   max_ops: int = 3, max_components: int = 2, max_zigzags: int = 2):
    """Deterministic-by-seed valid closed diagram within the given bounds."""
    from .diagram import SlicedDiagram, disjoint_union, evaluate

    rng = random.Random(seed)
    parts = []
    for _ in range(rng.randint(1, max_components)):
        if rng.random() < 0.25:
            slices = _pearl_component(rng, ring, max_rank)
        else:
            slices = _braid_closure_component(rng, ring, max_strands, max_rank,
                                              rng.randint(0, max_ops))
        parts.append(SlicedDiagram(ring, (), tuple(slices)))
    d = parts[0]
    for p in parts[1:]:
        d = disjoint_union(d, p)

    for _ in range(rng.randint(0, max_zigzags)):
        ev = evaluate(d)
        levels = [(lv, i) for lv in range(1, len(ev.levels) - 1)
                  for i in range(1, len(ev.levels[lv]) + 1)]
        if not levels:
            break
        lv, i = rng.choice(levels)
        rank, dd = ev.levels[lv][i - 1]
        zz = _zigzag_slices(rng, rank, dd, i)
        slices = list(d.slices)
        slices[lv:lv] = zz
        d = SlicedDiagram(ring, d.bottom, tuple(slices))
    evaluate(d)
    return d
