"""Built-in acceptance suites, exact arithmetic, desk scale.

Each suite returns a SuiteResult with the checks it ran; any failed
assertion surfaces as an exception carrying the offending case.  The CLI
`selftest` command and the acceptance tests both run these functions.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

from .braid import BraidFoamWord, braid_close, closure_unit, markov_stabilize, top_ranks
from .diagram import (
    DOWN,
    UP,
    CapT,
    CupT,
    ForkT,
    GateT,
    JoinT,
    SlicedDiagram,
    cross_slices,
    disjoint_union,
    evaluate,
    forget,
    gamma_bar,
    planar_invariant,
    tau_prime,
)
from .foam import (
    ZeroFoam,
    abstract_invariant,
    assemble_fB,
    boundary_delta,
    canonical_strong_cut,
    gamma0,
    refine_cut,
    validate_abstract,
)
from .kgroups import K1Class, k1_eq, k1_project_quotient, tau
from .matrix import Matrix, block_swap
from .moves import Move, apply_move, pearl_at
from .normalize import CertStep, MoveCertificate, check_certificate, diagram_digest, normal_target, normalize
from .relations import (
    commutator_certificate,
    pants_certificate,
    tripod_certificate,
    tube_certificate,
)
from .rings import RING_Q, RING_Z, RingSpec, ring_fp
from .samples import (
    random_braid_word,
    random_closed_foam,
    random_diagram,
    random_gl_matrix,
    random_matchings,
    random_open_cobordism,
    random_zero_foam,
)

DEFAULT_RINGS = (RING_Q, ring_fp(7), RING_Z)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checks: int
    seconds: float
    detail: str = ""

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return f"{status}  {self.name}: {self.checks} checks in {self.seconds:.2f}s{extra}"


def _run(name, fn) -> SuiteResult:
    t0 = time.time()
    try:
        checks, detail = fn()
        return SuiteResult(name, True, checks, time.time() - t0, detail)
    except Exception as exc:  # surfaced per suite so selftest can report all
        return SuiteResult(name, False, 0, time.time() - t0,
                           f"{type(exc).__name__}: {exc}")


def suite_k0(seed: int = 0, n: int = 500, rings=DEFAULT_RINGS) -> SuiteResult:
    def body():
        checks = 0
        r0, r1, r2 = 3, 2, 1
        top = ZeroFoam.of([(1, r1)])
        bottom = ZeroFoam.of([(1, r0), (-1, r0), (1, r1 + r2), (-1, r2)])
        assert gamma0(top).value == gamma0(bottom).value == r1
        checks += 1
        rng = random.Random(seed)
        per_ring = max(1, -(-n // len(rings)))
        for ring in rings:
            for _ in range(per_ring):
                f = random_open_cobordism(rng, ring)
                assert validate_abstract(f) == []
                assert boundary_delta(f).value == 0
                checks += 1
        return checks, ""
    return _run("k0-cobordism", body)


def suite_fb_cut_independence(seed: int = 1, n: int = 300, rings=DEFAULT_RINGS) -> SuiteResult:
    def body():
        checks = 0
        rng = random.Random(seed)
        per_ring = max(1, n // len(rings))
        for ring in rings:
            for _ in range(per_ring):
                f = random_closed_foam(rng, ring)
                base = assemble_fB(f)
                d0 = base.matrix.det()
                assert d0.is_unit()
                extra_e = {e.id: rng.randint(0, 2) for e in f.edges}
                extra_c = {c.id: rng.randint(0, 2) for c in f.circles}
                cut = refine_cut(canonical_strong_cut(f), extra_e, extra_c)
                d1 = assemble_fB(f, cut).matrix.det()
                scale = d0 - d0  # zero; rebuilt below as a product of taus
                scale = tau(0, ring).unit
                for e in f.edges:
                    for _ in range(extra_e[e.id]):
                        scale = scale * tau(e.rank, ring).unit
                for c in f.circles:
                    for _ in range(extra_c[c.id]):
                        scale = scale * tau(c.rank, ring).unit
                assert d1 == d0 * scale
                checks += 1
        return checks, ""
    return _run("fb-cut-independence", body)


# -- move soundness -----------------------------------------------------------

def _strand_spots(d, want_dir=None, want_pair=None):
    ev = evaluate(d)
    spots = []
    for lv in range(len(ev.levels)):
        state = ev.levels[lv]
        for i, (r, dd) in enumerate(state, start=1):
            if want_pair is None:
                if want_dir is None or dd == want_dir:
                    spots.append((lv, i, r, dd))
            else:
                if i < len(state):
                    r2, dd2 = state[i]
                    if (dd, dd2) == want_pair:
                        spots.append((lv, i, r, r2))
    return spots


def _splice_raw(d, k, new_slices):
    slices = list(d.slices)
    slices[k:k] = [tuple(s) for s in new_slices]
    out = SlicedDiagram(d.ring, d.bottom, tuple(slices))
    evaluate(out)
    return out


def _move_cases(ring, rng):
    """Yield (move_id, diagram, move) cases; builders that fail to fit the
    random host are skipped."""

    def collect():
        d = random_diagram(ring, seed=rng.randrange(10 ** 6), max_strands=2,
                           max_rank=2, max_ops=1, max_components=1, max_zigzags=1)
        cases = []

        def add(builder):
            try:
                cases.extend(builder(d))
            except Exception:
                pass

        add(lambda d: _cases_strand(ring, rng, d))
        add(lambda d: _cases_antiparallel(ring, rng, d))
        add(lambda d: _cases_parallel(ring, rng, d))
        add(lambda d: _cases_assoc(ring, rng, d))
        add(lambda d: _cases_circles(ring, rng, d))
        add(lambda d: _cases_slides(ring, rng, d))
        add(lambda d: _cases_braid(ring, rng))
        return cases

    while True:
        for case in collect():
            yield case


def _cases_strand(ring, rng, d):
    out = []
    spots = _strand_spots(d, want_dir=UP)
    if not spots:
        return out
    lv, pos, r, _ = rng.choice(spots)
    out.append(("R1", d, Move("R1", lv, pos, "insert")))
    kinked = apply_move(d, Move("R1", lv, pos, "insert"))
    out.append(("R1", kinked, Move("R1", lv, pos, "remove")))
    out.append(("MARKOV_STAB", d, Move("MARKOV_STAB", lv, pos, "stabilize")))
    side = rng.choice(["left", "right"])
    zz = Move("ISOTOPY_ZIGZAG", lv, pos, "insert", {"side": side})
    out.append(("ISOTOPY_ZIGZAG", d, zz))
    zigged = apply_move(d, zz)
    cup_pos = pos + 1 if side == "right" else pos
    out.append(("ISOTOPY_ZIGZAG", zigged, Move("ISOTOPY_ZIGZAG", lv, cup_pos, "remove")))
    out.append(("ISOTOPY_SLIDE", d, Move("ISOTOPY_SLIDE", lv, pos, "add_identity")))
    gated = apply_move(d, Move("ISOTOPY_SLIDE", lv, pos, "add_identity"))
    out.append(("ISOTOPY_SLIDE", gated, Move("ISOTOPY_SLIDE", lv, pos, "drop_identity")))
    a = random_gl_matrix(rng, ring, r)
    split_mv = Move("ISOTOPY_SLIDE", lv, pos, "split", {"first": a, "second": a.inverse()})
    out.append(("ISOTOPY_SLIDE", gated, split_mv))
    out.append(("ISOTOPY_SLIDE", apply_move(gated, split_mv),
                Move("ISOTOPY_SLIDE", lv, pos, "fuse")))
    r1 = rng.randint(0, r)
    iso = random_gl_matrix(rng, ring, r)
    cup_mv = Move("SING_CUP", lv, pos, "insert", {"r1": r1, "iso": iso})
    out.append(("SING_CUP", d, cup_mv))
    out.append(("SING_CAP", apply_move(d, cup_mv), Move("SING_CAP", lv, pos, "cancel")))
    psi = random_gl_matrix(rng, ring, r)
    mism = _splice_raw(d, lv, [((pos, ForkT(r1, r - r1, UP, iso)),),
                               ((pos, JoinT(r1, r - r1, UP, psi)),)])
    out.append(("SING_CAP", mism, Move("SING_CAP", lv, pos, "cancel")))
    return out


def _cases_antiparallel(ring, rng, d):
    out = []
    ud = _strand_spots(d, want_pair=(UP, DOWN))
    if not ud:
        return out
    lv, pos, r1, r2 = rng.choice(ud)
    if r1 == r2:
        out.append(("SADDLE", d, Move("SADDLE", lv, pos, "insert")))
        sad = apply_move(d, Move("SADDLE", lv, pos, "insert"))
        out.append(("SADDLE", sad, Move("SADDLE", lv, pos, "remove")))
    out.append(("R2B", d, Move("R2B", lv, pos, "insert")))
    rect = apply_move(d, Move("R2B", lv, pos, "insert"))
    out.append(("R2B", rect, Move("R2B", lv, pos, "remove")))
    return out


def _cases_parallel(ring, rng, d):
    out = []
    uu = _strand_spots(d, want_pair=(UP, UP))
    if not uu:
        return out
    lv, pos, r1, r2 = rng.choice(uu)
    out.append(("R2A", d, Move("R2A", lv, pos, "insert")))
    dbl = apply_move(d, Move("R2A", lv, pos, "insert"))
    out.append(("R2A", dbl, Move("R2A", lv, pos, "remove")))
    iso = random_gl_matrix(rng, ring, r1 + r2)
    out.append(("SING_SADDLE", d, Move("SING_SADDLE", lv, pos, "insert", {"iso": iso})))
    ins = apply_move(d, Move("SING_SADDLE", lv, pos, "insert", {"iso": iso}))
    out.append(("SING_SADDLE", ins, Move("SING_SADDLE", lv, pos, "cancel")))
    aa = rng.randint(0, r1)
    bb = r1 - aa
    phi = random_gl_matrix(rng, ring, r1)
    psi = random_gl_matrix(rng, ring, bb + r2)
    vs = _splice_raw(d, lv, [((pos, ForkT(aa, bb, UP, phi)),),
                             ((pos + 1, JoinT(bb, r2, UP, psi)),)])
    out.append(("VERTEX_SLIDE", vs, Move("VERTEX_SLIDE", lv, pos, "right")))
    cc = rng.randint(0, r2)
    dd2 = r2 - cc
    phi2 = random_gl_matrix(rng, ring, r2)
    psi2 = random_gl_matrix(rng, ring, r1 + cc)
    vs2 = _splice_raw(d, lv, [((pos + 1, ForkT(cc, dd2, UP, phi2)),),
                              ((pos, JoinT(r1, cc, UP, psi2)),)])
    out.append(("VERTEX_SLIDE", vs2, Move("VERTEX_SLIDE", lv, pos, "left")))
    return out


def _cases_assoc(ring, rng, d):
    out = []
    spots = _strand_spots(d, want_dir=UP)
    if not spots:
        return out
    lv, pos, r, _ = rng.choice(spots)
    cc = rng.randint(0, r)
    ab = r - cc
    aa = rng.randint(0, ab)
    bb = ab - aa
    f1 = random_gl_matrix(rng, ring, r)
    f2 = random_gl_matrix(rng, ring, ab)
    j2 = random_gl_matrix(rng, ring, ab)
    j1 = random_gl_matrix(rng, ring, r)
    va = _splice_raw(d, lv, [
        ((pos, ForkT(ab, cc, UP, f1)),),
        ((pos, ForkT(aa, bb, UP, f2)),),
        ((pos, JoinT(aa, bb, UP, j2)),),
        ((pos, JoinT(ab, cc, UP, j1)),),
    ])
    out.append(("VERTEX_ASSOC", va, Move("VERTEX_ASSOC", lv, pos, "fork_left_to_right")))
    out.append(("VERTEX_ASSOC", va, Move("VERTEX_ASSOC", lv + 2, pos, "join_left_to_right")))
    vb = _splice_raw(d, lv, [
        ((pos, ForkT(aa, bb + cc, UP, f1)),),
        ((pos + 1, ForkT(bb, cc, UP, random_gl_matrix(rng, ring, bb + cc))),),
        ((pos + 1, JoinT(bb, cc, UP, random_gl_matrix(rng, ring, bb + cc))),),
        ((pos, JoinT(aa, bb + cc, UP, j1)),),
    ])
    out.append(("VERTEX_ASSOC", vb, Move("VERTEX_ASSOC", lv, pos, "fork_right_to_left")))
    out.append(("VERTEX_ASSOC", vb, Move("VERTEX_ASSOC", lv + 2, pos, "join_right_to_left")))
    return out


def _cases_circles(ring, rng, d):
    out = []
    lv = rng.randrange(len(d.slices) + 1)
    width = len(evaluate(d).levels[lv])
    pos = rng.randint(1, width + 1)
    rr = rng.randint(0, 3)
    out.append(("CIRCLE_BIRTH", d, Move("CIRCLE_BIRTH", lv, pos, "insert",
                                        {"rank": rr, "orientation": rng.choice(["cw", "ccw"])})))
    born = apply_move(d, Move("CIRCLE_BIRTH", lv, pos, "insert", {"rank": rr}))
    out.append(("CIRCLE_DEATH", born, Move("CIRCLE_DEATH", lv, pos, "apply")))

    a1 = random_gl_matrix(rng, ring, rng.randint(1, 2))
    a2 = random_gl_matrix(rng, ring, rng.randint(0, 2))
    pearls = disjoint_union(disjoint_union(gamma_bar(a1), gamma_bar(a2)), d)
    out.append(("CIRCLE_MERGE", pearls, Move("CIRCLE_MERGE", 0, 1, "merge")))
    merged = apply_move(pearls, Move("CIRCLE_MERGE", 0, 1, "merge"))
    out.append(("CIRCLE_MERGE", merged, Move("CIRCLE_MERGE", 0, 1, "split", {"r1": a1.rows})))
    out.append(("CIRCLE_REVERSE", pearls, Move("CIRCLE_REVERSE", 0, 1, "apply")))
    rev = apply_move(pearls, Move("CIRCLE_REVERSE", 0, 1, "apply"))
    out.append(("CIRCLE_REVERSE", rev, Move("CIRCLE_REVERSE", 0, 1, "apply")))

    out.append(("SPLIT_MONODROMY", pearls, Move("SPLIT_MONODROMY", 1, 1, "split")))
    ext = apply_move(pearls, Move("SPLIT_MONODROMY", 1, 1, "split"))
    out.append(("ISOTOPY_SLIDE", ext, Move("ISOTOPY_SLIDE", 1, 1, "unpad")))
    ext = apply_move(ext, Move("ISOTOPY_SLIDE", 1, 1, "unpad"))
    out.append(("SPLIT_MONODROMY", ext, Move("SPLIT_MONODROMY", 1, 2, "absorb")))
    out.append(("CIRCLE_ACROSS_EDGE", ext, Move("CIRCLE_ACROSS_EDGE", 1, 2, "right")))
    moved = apply_move(ext, Move("CIRCLE_ACROSS_EDGE", 1, 2, "right"))
    out.append(("CIRCLE_ACROSS_EDGE", moved, Move("CIRCLE_ACROSS_EDGE", 1, 3, "left")))

    host = disjoint_union(gamma_bar(a1), d)
    out.append(("ISOTOPY_SLIDE", host, Move("ISOTOPY_SLIDE", 1, 1, "around_extremum")))
    return out


def _cases_slides(ring, rng, d):
    out = []
    for k in range(len(d.slices)):
        done = False
        for p, _t in d.slices[k]:
            for direction in ("up", "down"):
                try:
                    apply_move(d, Move("ISOTOPY_SLIDE", k, p, direction))
                except Exception:
                    continue
                out.append(("ISOTOPY_SLIDE", d, Move("ISOTOPY_SLIDE", k, p, direction)))
                done = True
                break
            if done:
                break
        if done:
            break
    for k in range(len(d.slices) - 1):
        try:
            apply_move(d, Move("ISOTOPY_SLIDE", k, 1, "transpose"))
        except Exception:
            continue
        out.append(("ISOTOPY_SLIDE", d, Move("ISOTOPY_SLIDE", k, 1, "transpose")))
        break
    out.append(("ISOTOPY_SLIDE", d, Move("ISOTOPY_SLIDE", rng.randrange(len(d.slices) + 1), 1, "pad")))
    return out


def _cases_braid(ring, rng):
    return list(_braid_move_cases(ring, rng))


def _braid_move_cases(ring, rng):
    """R3A, R3B, R4A, R4B contexts built over three closure strands."""
    ranks = [rng.randint(0, 2), rng.randint(0, 2), rng.randint(0, 2)]
    a, b, c = ranks
    base_slices = [((i + 1, CupT(ranks[i], "w")),) for i in range(3)]
    closing = [((i + 1, CapT(ranks[i], "e")),) for i in reversed(range(3))]

    lhs = cross_slices(ring, 1, a, b, UP) + cross_slices(ring, 2, a, c, UP) + \
        cross_slices(ring, 1, b, c, UP)
    rhs_restore = cross_slices(ring, 1, c, b, UP) + cross_slices(ring, 2, c, a, UP) + \
        cross_slices(ring, 1, b, a, UP)
    d = SlicedDiagram(ring, (), tuple(base_slices + lhs + rhs_restore + closing))
    evaluate(d)
    yield "R3A", d, Move("R3A", 3, 1, "left_to_right")
    moved = apply_move(d, Move("R3A", 3, 1, "left_to_right"))
    yield "R3A", moved, Move("R3A", 3, 1, "right_to_left")

    # R4A: crossing then a fork on the crossed strand
    r3, r12 = a, b
    if r12 >= 0:
        r1 = rng.randint(0, r12)
        r2 = r12 - r1
        phi = random_gl_matrix(rng, ring, r12)
        seq = cross_slices(ring, 1, r3, r12, UP) + [((1, ForkT(r1, r2, UP, phi)),)] + \
            [((1, JoinT(r1, r2, UP, phi)),)] + cross_slices(ring, 1, r12, r3, UP)
        d4 = SlicedDiagram(ring, (), tuple(
            [((1, CupT(r3, "w")),), ((2, CupT(r12, "w")),)] + seq +
            [((2, CapT(r12, "e")),), ((1, CapT(r3, "e")),)]))
        evaluate(d4)
        yield "R4A", d4, Move("R4A", 2, 1, "forward")
        fwd = apply_move(d4, Move("R4A", 2, 1, "forward"))
        yield "R4A", fwd, Move("R4A", 2, 1, "backward")

        seqb = cross_slices(ring, 1, r12, r3, UP) + [((2, ForkT(r1, r2, UP, phi)),)] + \
            [((2, JoinT(r1, r2, UP, phi)),)] + cross_slices(ring, 1, r3, r12, UP)
        d4b = SlicedDiagram(ring, (), tuple(
            [((1, CupT(r12, "w")),), ((2, CupT(r3, "w")),)] + seqb +
            [((2, CapT(r3, "e")),), ((1, CapT(r12, "e")),)]))
        evaluate(d4b)
        yield "R4B", d4b, Move("R4B", 2, 1, "forward")
        fwdb = apply_move(d4b, Move("R4B", 2, 1, "forward"))
        yield "R4B", fwdb, Move("R4B", 2, 1, "backward")

    # R3B macro: an antiparallel rectangle carried past a crossing
    ra, rb = rng.randint(0, 2), rng.randint(0, 2)
    rect_host = SlicedDiagram(ring, (), tuple(
        [((1, CupT(ra, "w")),), ((2, CupT(rb, "w")),)] +
        cross_slices(ring, 1, ra, rb, UP) + cross_slices(ring, 1, rb, ra, UP) +
        [((2, CapT(rb, "e")),), ((1, CapT(ra, "e")),)]))
    rect = apply_move(rect_host, Move("R2B", 2, 2, "insert"))
    yield "R3B", rect, Move("R3B", 2, 2, "up", {"target_pos": 2})


def suite_move_soundness(seed: int = 2, per_move: int = 100,
                         ring: RingSpec = RING_Q) -> SuiteResult:
    def body():
        rng = random.Random(seed)
        counts = {mid: 0 for mid in set(_ALL_MOVE_IDS)}
        gen = _move_cases(ring, rng)
        guard = 0
        while min(counts.values()) < per_move:
            guard += 1
            if guard > per_move * 4000:
                raise AssertionError(f"could not reach {per_move} cases: {counts}")
            mid, d, mv = next(gen)
            if counts[mid] >= per_move:
                continue
            before = planar_invariant(d).unit
            out = apply_move(d, mv)
            after = planar_invariant(out).unit
            assert after == before, (mid, mv)
            counts[mid] += 1
        total = sum(counts.values())
        return total, f"min per move {min(counts.values())}"
    return _run("move-soundness", body)


_ALL_MOVE_IDS = (
    "ISOTOPY_SLIDE", "ISOTOPY_ZIGZAG", "SING_CAP", "SING_CUP", "SING_SADDLE",
    "VERTEX_SLIDE", "VERTEX_ASSOC", "CIRCLE_BIRTH", "CIRCLE_DEATH", "SADDLE",
    "R1", "R2A", "R2B", "R3A", "R3B", "R4A", "R4B",
    "SPLIT_MONODROMY", "CIRCLE_ACROSS_EDGE", "CIRCLE_MERGE", "CIRCLE_REVERSE",
    "MARKOV_STAB",
)


def suite_gamma_section(seed: int = 3, n: int = 100, rings=(RING_Q, ring_fp(7))) -> SuiteResult:
    def body():
        checks = 0
        rng = random.Random(seed)
        for ring in rings:
            for _ in range(n):
                sz = rng.randint(0, 4)
                a = random_gl_matrix(rng, ring, sz)
                inv = planar_invariant(gamma_bar(a))
                assert inv.unit == a.det()
                checks += 1
        return checks, ""
    return _run("gamma-section", body)


def _normalize_corpus(ring, seed, n, max_slices=15):
    out = []
    counter = 0
    while len(out) < n:
        d = random_diagram(ring, seed=seed + counter, max_strands=2, max_rank=2,
                           max_ops=2, max_components=2, max_zigzags=2)
        counter += 1
        if len(d.slices) <= max_slices:
            out.append(d)
    return out


def suite_normalize(seed: int = 4, n: int = 200, rings=DEFAULT_RINGS) -> SuiteResult:
    def body():
        rng = random.Random(seed)
        checks = 0
        mutations = 0
        per_ring = max(1, n // len(rings))
        for ring in rings:
            corpus = _normalize_corpus(ring, seed * 1000, per_ring)
            for d in corpus:
                mono, cert = normalize(d)
                assert mono.det() == planar_invariant(d).unit
                target = normal_target(ring, mono)
                ok, diags = check_certificate(d, target, cert)
                assert ok, diags
                checks += 1
                if mutations < 100 and cert.steps:
                    i = rng.randrange(len(cert.steps))
                    s = cert.steps[i]
                    bad = Move(s.move.move, s.move.slice + 11, s.move.pos,
                               s.move.direction, s.move.params)
                    steps = list(cert.steps)
                    steps[i] = CertStep(bad, s.pre, s.post)
                    ok2, _ = check_certificate(
                        d, target, MoveCertificate(cert.start, cert.end, tuple(steps)))
                    assert not ok2
                    mutations += 1
        assert mutations >= 100
        return checks, f"{mutations} mutations rejected"
    return _run("normalize-oracle", body)


def suite_quotient_square(seed: int = 5, n: int = 200, rings=DEFAULT_RINGS) -> SuiteResult:
    def body():
        checks = 0
        rng = random.Random(seed)
        per_ring = max(1, n // len(rings))
        for ring in rings:
            corpus = _normalize_corpus(ring, seed * 2000, per_ring)
            for d in corpus:
                lhs = k1_project_quotient(planar_invariant(d))
                rhs = abstract_invariant(forget(d))
                assert lhs == rhs
                checks += 1
            for _ in range(10):
                w = random_braid_word(rng, ring)
                matchings = random_matchings(rng, ring, w)
                f0 = braid_close(w, matchings)
                w1 = markov_stabilize(w)
                r_n = top_ranks(w)[-1]
                ext = matchings + [Matrix.identity(ring, r_n)]
                f1 = braid_close(w1, ext)
                assert abstract_invariant(f0) == abstract_invariant(f1)
                u0, u1 = closure_unit(w, matchings), closure_unit(w1, ext)
                assert u1.unit == u0.unit * tau(r_n, ring).unit
                checks += 1
        return checks, ""
    return _run("quotient-square", body)


def suite_relations(seed: int = 6, rings=DEFAULT_RINGS) -> SuiteResult:
    def body():
        checks = 0
        rng = random.Random(seed)
        for ring in rings:
            a = random_gl_matrix(rng, ring, 2)
            b = random_gl_matrix(rng, ring, 2)
            c = random_gl_matrix(rng, ring, 1)
            for d0, d1, cert in (pants_certificate(a, b), tube_certificate(a),
                                 tripod_certificate(a, c), commutator_certificate(a, b)):
                ok, diags = check_certificate(d0, d1, cert)
                assert ok, diags
                assert planar_invariant(d0).unit == planar_invariant(d1).unit
                checks += 1
        return checks, ""
    return _run("defining-relations", body)


def suite_tau_prime(seed: int = 7, n_zigzags: int = 50, rings=DEFAULT_RINGS) -> SuiteResult:
    def body():
        checks = 0
        rng = random.Random(seed)
        for ring in rings:
            for r in range(0, 6):
                d = gamma_bar(Matrix.identity(ring, r))
                assert k1_eq(tau_prime(d), tau(r, ring))
                checks += 1
        ring = rings[0]
        d = random_diagram(ring, seed=seed)
        base = planar_invariant(d).unit
        inserted = []
        for _ in range(n_zigzags):
            if inserted and rng.random() < 0.4:
                k, pos = inserted.pop()
                d = apply_move(d, Move("ISOTOPY_ZIGZAG", k, pos, "remove"))
                inserted = [(k2 - 2 if k2 > k else k2, p) for k2, p in inserted]
            else:
                ev = evaluate(d)
                spots = [(lv, i) for lv in range(1, len(ev.levels) - 1)
                         for i in range(1, len(ev.levels[lv]) + 1)]
                if not spots:
                    continue
                lv, i = rng.choice(spots)
                side = rng.choice(["left", "right"])
                d2 = apply_move(d, Move("ISOTOPY_ZIGZAG", lv, i, "insert", {"side": side}))
                cup_pos = i + 1 if side == "right" else i
                inserted = [(k + 2 if k >= lv else k, p) for k, p in inserted]
                inserted.append((lv, cup_pos))
                d = d2
            assert planar_invariant(d).unit == base
            checks += 1
        return checks, ""
    return _run("tau-prime-pinning", body)


ALL_SUITES = {
    "k0": suite_k0,
    "fb": suite_fb_cut_independence,
    "moves": suite_move_soundness,
    "gamma": suite_gamma_section,
    "normalize": suite_normalize,
    "quotient": suite_quotient_square,
    "relations": suite_relations,
    "tauprime": suite_tau_prime,
}


def run_suites(names=None, ring: RingSpec = None, quick: bool = False) -> list:
    """Run the selected suites, optionally over one ring only."""
    results = []
    for key, fn in ALL_SUITES.items():
        if names and key not in names:
            continue
        kwargs = {}
        if ring is not None:
            if key == "moves":
                kwargs["ring"] = ring
            else:
                kwargs["rings"] = (ring,)
        if quick:
            if key == "moves":
                kwargs["per_move"] = 10
            elif key in ("k0", "fb", "normalize", "quotient"):
                kwargs["n"] = 40
        results.append(fn(**kwargs))
    return results
