"""Certified normalization of closed diagrams to a single decorated circle.

The strategy: remove straightenable zigzags and dead circles, cancel vertex
pairs, split every transport off onto its own clockwise circle, sort the
remaining tiles into columns by repeated interchange slides, and merge the
circles into one.  Every step is a registered move, recorded in a hash-
chained certificate.

Termination measure (lexicographic): number of non-circle tiles, number of
gates away from circle position, number of inversions in the column order of
independent tiles, total slice count.  Every pattern move drops one of the
first two, every sort swap drops the third, padding is transient, and a
global step budget guards against regressions.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .diagram import (
    DOWN,
    UP,
    CapT,
    CupT,
    DiagramError,
    ForkT,
    GateT,
    JoinT,
    SlicedDiagram,
    evaluate,
    planar_invariant,
    serialize_diagram,
)
from .matrix import Matrix
from .moves import Move, PreconditionFailed, apply_move, pearl_at
from .rings import RingSpec
from .samples import random_diagram  # re-exported corpus generator

__all__ = [
    "MoveCertificate", "NormalizeError", "certificate_from_json",
    "certificate_to_json", "check_certificate", "diagram_digest", "normalize",
    "random_diagram",
]


class NormalizeError(RuntimeError):
    """The rewriting engine could not reach the circle normal form."""


def diagram_digest(d: SlicedDiagram) -> str:
    return hashlib.sha256(serialize_diagram(d).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class CertStep:
    move: Move
    pre: str
    post: str


@dataclass(frozen=True)
class MoveCertificate:
    start: str
    end: str
    steps: tuple

    def __len__(self) -> int:
        return len(self.steps)


def certificate_to_json(cert: MoveCertificate) -> dict:
    return {"start": cert.start, "end": cert.end,
            "steps": [{**s.move.to_json(), "pre": s.pre, "post": s.post}
                      for s in cert.steps]}


def certificate_from_json(ring: RingSpec, obj: dict) -> MoveCertificate:
    steps = tuple(CertStep(Move.from_json(ring, s), s["pre"], s["post"])
                  for s in obj["steps"])
    return MoveCertificate(obj["start"], obj["end"], steps)


def check_certificate(d0: SlicedDiagram, d1: SlicedDiagram,
                      cert: MoveCertificate) -> tuple:
    """Replay a certificate; returns (accepted, diagnostics)."""
    diags = []
    cur = d0
    digest = diagram_digest(cur)
    if cert.start != digest:
        return False, [f"start digest mismatch: {cert.start} != {digest}"]
    for i, step in enumerate(cert.steps):
        if step.pre != digest:
            return False, [f"step {i}: pre digest mismatch"]
        try:
            cur = apply_move(cur, step.move)
        except (PreconditionFailed, DiagramError) as exc:
            return False, [f"step {i}: move does not re-apply: {exc}"]
        digest = diagram_digest(cur)
        if step.post != digest:
            return False, [f"step {i}: post digest mismatch"]
    if cert.end != digest:
        return False, ["end digest mismatch"]
    if diagram_digest(d1) != digest:
        return False, ["endpoint is not the claimed diagram"]
    if d0.is_closed and d1.is_closed:
        i0 = planar_invariant(d0).unit
        i1 = planar_invariant(d1).unit
        if i0 != i1:
            return False, [f"endpoint invariants differ: {i0} vs {i1}"]
    return True, diags


class _Engine:
    def __init__(self, d: SlicedDiagram, budget: int):
        self.d = d
        self.steps = []
        self.budget = budget

    def do(self, move: Move) -> bool:
        try:
            new = apply_move(self.d, move)
        except (PreconditionFailed, DiagramError):
            return False
        if len(self.steps) >= self.budget:
            raise NormalizeError(f"step budget {self.budget} exhausted")
        pre = diagram_digest(self.d)
        post = diagram_digest(new)
        self.steps.append(CertStep(move, pre, post))
        self.d = new
        return True

    def can(self, d: SlicedDiagram, move: Move):
        try:
            return apply_move(d, move)
        except (PreconditionFailed, DiagramError):
            return None

    # -- scanning ---------------------------------------------------------

    def sole(self, k):
        if 0 <= k < len(self.d.slices) and len(self.d.slices[k]) == 1:
            return self.d.slices[k][0]
        return None

    def try_patterns(self) -> bool:
        d = self.d
        n = len(d.slices)
        for k in range(n):
            if not d.slices[k]:
                if self.do(Move("ISOTOPY_SLIDE", k, 1, "unpad")):
                    return True
        for k in range(n - 1):
            a, b = self.sole(k), self.sole(k + 1)
            if not a or not b:
                continue
            (pa, ta), (pb, tb) = a, b
            if isinstance(ta, CupT) and isinstance(tb, CapT):
                if self.do(Move("ISOTOPY_ZIGZAG", k, pa, "remove")):
                    return True
                if self.do(Move("CIRCLE_DEATH", k, pa, "apply")):
                    return True
            if isinstance(ta, CupT) and isinstance(tb, GateT):
                if self.do(Move("CIRCLE_DEATH", k, pa, "apply")):
                    return True
            if isinstance(ta, ForkT) and isinstance(tb, JoinT):
                # a fork-join pair that is the middle of a double crossing
                # must be removed as the crossing pair, not cancelled alone
                if self.do(Move("R2A", k - 1, pa, "remove")):
                    return True
                if (ta.r1, ta.r2, ta.dir) == (tb.r1, tb.r2, tb.dir) and pa == pb:
                    if self.do(Move("SING_CAP", k, pa, "cancel")):
                        return True
                if pa == pb and ta.dir == tb.dir == UP and \
                        self._align_then(k, pa, "SING_CAP"):
                    return True
                if self.do(Move("VERTEX_SLIDE", k, min(pa, pb), "right")) or \
                        self.do(Move("VERTEX_SLIDE", k, min(pa, pb), "left")):
                    return True
            if isinstance(ta, JoinT) and isinstance(tb, ForkT):
                if self.do(Move("R2A", k, pa, "remove")):
                    return True
                if self.do(Move("SING_SADDLE", k, pa, "cancel")):
                    return True
                if pa == pb and ta.dir == tb.dir == UP and \
                        self._align_then(k, pa, "SING_SADDLE"):
                    return True
        return self._scan_gates()

    def _align_then(self, k: int, pos: int, cancel_kind: str) -> bool:
        """Re-associate a neighboring vertex pair so that the pair at
        (k, k+1) cancels, then cancel it; both moves or neither."""
        cancel = Move(cancel_kind, k, pos, "cancel")
        candidates = []
        for direction in ("fork_right_to_left", "fork_left_to_right"):
            for p in (pos, pos + 1, max(pos - 1, 1)):
                candidates.append(Move("VERTEX_ASSOC", k + 1, p, direction))
        for direction in ("join_right_to_left", "join_left_to_right"):
            for p in (pos, pos + 1, max(pos - 1, 1)):
                candidates.append(Move("VERTEX_ASSOC", k - 1, p, direction))
        for assoc in candidates:
            if assoc.slice < 0:
                continue
            mid = self.can(self.d, assoc)
            if mid is None:
                continue
            shifted = cancel if assoc.slice > k else Move(cancel_kind, k, pos, "cancel")
            if self.can(mid, shifted) is None:
                continue
            assert self.do(assoc)
            assert self.do(shifted)
            return True
        return False

    def _scan_gates(self) -> bool:
        n = len(self.d.slices)
        for k in range(n):
            found = self.sole(k)
            if not found:
                continue
            pos, t = found
            if isinstance(t, GateT) and pearl_at(self.d, k - 1, pos) is None:
                if self.do(Move("SPLIT_MONODROMY", k, pos, "split")):
                    return True
            if isinstance(t, CupT) and t.chir == "e":
                if self.do(Move("CIRCLE_REVERSE", k, pos, "apply")):
                    return True
        return False

    # -- column sorting ----------------------------------------------------
    #
    # Units are whole circles (their 2-3 slices) or single tiles; adjacent
    # units whose strand columns are disjoint and out of left-to-right order
    # are swapped by bubbling the upper unit's slices down, two interchange
    # slides per step, validated on a scratch copy before being recorded.

    def _unit_at(self, k: int):
        """(start, n_slices, bottom_footprint, top_footprint) of the unit at
        slice k; footprints are [lo, hi] intervals at the unit's boundary
        levels, with hi = lo - 1 for a bare insertion point."""
        found = self.sole(k)
        if not found:
            return None
        pos, tile = found
        pearl = pearl_at(self.d, k, pos)
        if pearl is not None:
            return (k, pearl[0], (pos, pos - 1), (pos, pos - 1))
        ev = evaluate(self.d)
        pt = next(iter(ev.placed[k]))
        bottom = (pt.in_positions[0], pt.in_positions[-1]) if pt.in_positions \
            else (pt.pos, pt.pos - 1)
        if pt.out_positions:
            top = (pt.out_positions[0], pt.out_positions[-1])
        else:
            from .moves import _block_out_insertion
            q = _block_out_insertion(ev, k, pt)
            top = (q, q - 1)
        return (k, 1, bottom, top)

    def _swap_adjacent_moves(self, d: SlicedDiagram, k: int):
        """Moves swapping solo slices k and k+1, or None."""
        if not (0 <= k < len(d.slices) - 1) or len(d.slices[k]) != 1 \
                or len(d.slices[k + 1]) != 1:
            return None
        b_pos = d.slices[k + 1][0][0]
        mv1 = Move("ISOTOPY_SLIDE", k + 1, b_pos, "down")
        mid = self.can(d, mv1)
        if mid is None:
            return None
        orig = d.slices[k][0]  # position is unchanged by the arriving tile
        if orig not in mid.slices[k]:
            return None
        mv2 = Move("ISOTOPY_SLIDE", k, orig[0], "up")
        end = self.can(mid, mv2)
        if end is None or end == d:
            return None
        return [mv1, mv2]

    def _unit_swap_moves(self, lower, upper):
        """Move list bubbling the upper unit below the lower one, or None."""
        lk, ln = lower[0], lower[1]
        uk, un = upper[0], upper[1]
        d = self.d
        moves = []
        for i in range(un):
            src = uk + i
            for _ in range(ln):
                step = self._swap_adjacent_moves(d, src - 1)
                if step is None:
                    return None
                for mv in step:
                    d = apply_move(d, mv)
                moves.extend(step)
                src -= 1
        return moves

    def try_sort_swap(self) -> bool:
        k = 0
        n = len(self.d.slices)
        while k < n:
            lower = self._unit_at(k)
            if lower is None:
                k += 1
                continue
            uk = k + lower[1]
            upper = self._unit_at(uk)
            if upper is None:
                k += 1
                continue
            l_top = lower[3]
            u_bot = upper[2]
            both_empty = l_top[1] < l_top[0] and u_bot[1] < u_bot[0]
            inverted = (u_bot[0] < l_top[0]) if both_empty else (u_bot[1] < l_top[0])
            if inverted:
                moves = self._unit_swap_moves(lower, upper)
                if moves is not None:
                    for mv in moves:
                        assert self.do(mv)
                    return True
            k += 1
        return False

    def try_pearl_extract(self) -> bool:
        """Hop a boxed-in circle rightward across the strand beside it."""
        for k in range(len(self.d.slices)):
            found = self.sole(k)
            if not found:
                continue
            pos, tile = found
            if pearl_at(self.d, k, pos) is not None:
                if self.do(Move("CIRCLE_ACROSS_EDGE", k, pos, "right")):
                    return True
        return False

    # -- circle merging ----------------------------------------------------

    def only_pearls(self) -> bool:
        k = 0
        while k < len(self.d.slices):
            if not self.d.slices[k]:
                return False
            found = pearl_at(self.d, k, 1)
            if found is None:
                return False
            k += found[0]
        return True

    def merge_pearls(self) -> Matrix:
        while True:
            first = pearl_at(self.d, 0, 1)
            if first is None:
                if not self.d.slices:
                    return Matrix.zeros(self.d.ring, 0, 0)
                raise NormalizeError("leftover tiles after merging")
            n1, r1, mono1 = first
            if mono1 is None:
                # a bare trivial circle: remove it
                if not self.do(Move("CIRCLE_DEATH", 0, 1, "apply")):
                    raise NormalizeError("trivial circle refused to die")
                continue
            if len(self.d.slices) == n1:
                return mono1
            second = pearl_at(self.d, n1, 1)
            if second is None:
                raise NormalizeError("non-circle tiles above the first circle")
            if second[2] is None:
                if not self.do(Move("CIRCLE_DEATH", n1, 1, "apply")):
                    raise NormalizeError("trivial circle refused to die")
                continue
            if not self.do(Move("CIRCLE_MERGE", 0, 1, "merge")):
                raise NormalizeError("circle merge failed")


def normalize(d: SlicedDiagram, budget: int = None) -> tuple:
    """Rewrite a closed diagram to a single clockwise circle.

    Returns (monodromy matrix, certificate); the empty diagram yields the
    0x0 matrix.  det(monodromy) equals the planar invariant exactly.
    """
    ev = evaluate(d)
    if ev.levels[0] or ev.levels[-1]:
        raise DiagramError("normalize needs a closed diagram")
    n_tiles = sum(len(sl) for sl in d.slices)
    if budget is None:
        budget = 400 + 80 * n_tiles
    eng = _Engine(d, budget)
    idle = 0
    while True:
        if eng.try_patterns():
            idle = 0
            continue
        if eng.only_pearls():
            break
        if eng.try_sort_swap():
            idle += 1
            if idle > budget:
                raise NormalizeError("sorting made no progress")
            continue
        if eng.try_pearl_extract():
            continue
        raise NormalizeError(
            "no applicable move; diagram is outside the supported class")
    mono = eng.merge_pearls()
    cert = MoveCertificate(diagram_digest(d), diagram_digest(eng.d),
                           tuple(eng.steps))
    return mono, cert


def normal_target(ring: RingSpec, mono: Matrix) -> SlicedDiagram:
    """The diagram normalize ends at: a circle for nonzero rank, else empty."""
    from .diagram import gamma_bar
    if mono.rows == 0:
        return SlicedDiagram(ring, (), ())
    return gamma_bar(mono)
