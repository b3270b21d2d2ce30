"""Reduction of a graph structure to one with incompressible tori and maximal pieces.

The pipeline runs five stages and repeats them until nothing changes:

A. absorb solid tori into their neighbours (or explain why that fails),
B. collapse finite chains of T^2 x I pieces into single gluings,
C. fold half-lines of T^2 x I (product rays, T^2 x [0, oo) pieces) into an end
   of the adjacent piece,
D. settle K^2 x~ I pieces, merging them when one of their two fibrations
   matches the neighbour,
E. remove tori across which the fibrations match.

Bad inputs are not decomposed; the run stops with a :class:`Diagnosis` naming
the failed hypothesis.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable

from .graph import (
    GraphStructure,
    PeriodicRay,
    TorusEdge,
    is_t2xi,
    validate,
)
from .orbifold import (
    BaseOrbifold,
    boundary_to_end,
    cap_with_cone,
    disk,
    merge_bases,
    moebius_band,
)
from .seifert import (
    FIBER,
    K2XI_FIBERS,
    SECTION,
    T2XI_TRANSPORT,
    FiberedPiece,
    K2IPiece,
    Mat2,
    SolidTorusPiece,
    ThinType,
    classify_piece,
    fiber_intersection,
    fibrations_match,
    merge_across,
    merge_loop,
)

# K2xI basis -> basis in which the disk-with-two-cones fibration has fiber (0, 1).
_K2XI_F2_BASIS = Mat2(0, 1, -1, 0)


class MoveKind(Enum):
    ABSORB_SOLID_TORUS = "AbsorbSolidTorus"
    MERGE_T2XI_CHAIN = "MergeT2xIChain"
    COLLAPSE_RAY = "CollapseRay"
    RESOLVE_K2XI = "ResolveK2xI"
    MERGE_MATCHING_TORUS = "MergeMatchingTorus"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Move:
    kind: MoveKind
    affected: tuple[str, ...]
    result: tuple[str, ...]
    alpha: int | None = None  # core multiplicity, AbsorbSolidTorus only

    def __str__(self):
        return (f"MOVE {self.kind} affected={','.join(self.affected)} "
                f"result={','.join(self.result)}")


class DiagnosisKind(Enum):
    EXHAUSTION_BY_SOLID_TORI = "ExhaustionBySolidTori"
    PLAIN_R3_LIKE = "PlainR3Like"
    S1XR2_LIKE = "S1xR2Like"
    CLOSED_SEIFERT = "ClosedSeifert"
    CLOSED_NON_SEIFERT = "ClosedNonSeifert"
    REDUCIBLE_WITNESS = "ReducibleWitness"
    # A solid torus is absorbed into a piece that itself becomes a solid torus;
    # its meridian depends on Seifert invariants the model does not record.
    AMBIGUOUS_SOLID_TORUS = "AmbiguousSolidTorus"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Diagnosis:
    kind: DiagnosisKind
    witnesses: tuple[str, ...]
    message: str

    def __str__(self):
        return f"DIAGNOSIS {self.kind} witnesses={','.join(self.witnesses)}: {self.message}"


@dataclass
class ReductionOutcome:
    reduced: GraphStructure | None = None
    trace: list[Move] = field(default_factory=list)
    diagnosis: Diagnosis | None = None

    @property
    def ok(self) -> bool:
        return self.diagnosis is None


class InvalidStructure(ValueError):
    pass


class UnsupportedStructure(NotImplementedError):
    """Configurations of non-product rays the engine does not rewrite."""


class Policy:
    """Move-selection policy: the order in which simultaneous candidates are taken.

    ``seed=None`` takes candidates smallest id first; any integer seed gives a
    reproducible shuffled order.
    """

    def __init__(self, seed: int | None = None):
        self.seed = seed
        self._rng = random.Random(seed) if seed is not None else None

    def order(self, items: Iterable) -> list:
        items = sorted(items, key=str)
        if self._rng is not None:
            self._rng.shuffle(items)
        return items

    def __repr__(self):
        return f"Policy(seed={self.seed})"


def _as_policy(policy) -> Policy:
    if isinstance(policy, Policy):
        return policy
    return Policy(policy)


class _Stop(Exception):
    def __init__(self, diagnosis: Diagnosis):
        super().__init__(str(diagnosis))
        self.diagnosis = diagnosis


@dataclass
class _Walk:
    pieces: list
    edges: list
    mats: list
    reversing: bool
    terminal: tuple  # ("piece", endpoint) | ("ray", ray id) | ("cycle", None)

    def composite(self) -> Mat2:
        out = Mat2(1, 0, 0, 1)
        for m in self.mats:
            out = m @ out
        return out


class _State:
    """Mutable working copy of a graph structure.

    Slots are renamed to globally unique keys so pieces can be merged without
    clashes; :meth:`to_graph` renumbers them positionally again.
    """

    def __init__(self, g: GraphStructure, policy: Policy, trace: list,
                 observer: Callable | None = None):
        self.policy = policy
        self.trace = trace
        self.observer = observer
        self.pieces = {}
        rename = {}
        for pid, piece in g.pieces.items():
            new_slots = tuple((pid, s) for s in piece.slots)
            rename.update({(pid, s): (pid, (pid, s)) for s in piece.slots})
            self.pieces[pid] = _with_slots(piece, new_slots)
        self.edges = {}
        self.rays = {}
        self.owner = {}
        self.incidence = {pid: set() for pid in self.pieces}
        for e in g.edges.values():
            self._add_edge(TorusEdge(e.id, rename[e.a], rename[e.b], e.matrix,
                                     e.base_reversing))
        for r in g.rays.values():
            self._add_ray(PeriodicRay(r.id, rename[r.attach], r.period, r.entry))
        self._counter = 0

    # bookkeeping -------------------------------------------------------

    def _add_edge(self, e: TorusEdge):
        self.edges[e.id] = e
        self.owner[e.a] = ("edge", e.id)
        self.owner[e.b] = ("edge", e.id)
        self.incidence[e.a[0]].add(e.id)
        self.incidence[e.b[0]].add(e.id)

    def _remove_edge(self, eid: str) -> TorusEdge:
        e = self.edges.pop(eid)
        for ep in (e.a, e.b):
            self.owner.pop(ep, None)
            self.incidence[ep[0]].discard(eid)
        return e

    def _add_ray(self, r: PeriodicRay):
        self.rays[r.id] = r
        self.owner[r.attach] = ("ray", r.id)
        self.incidence[r.attach[0]].add(r.id)

    def _remove_ray(self, rid: str) -> PeriodicRay:
        r = self.rays.pop(rid)
        self.owner.pop(r.attach, None)
        self.incidence[r.attach[0]].discard(rid)
        return r

    def _remove_piece(self, pid: str):
        del self.pieces[pid]
        leftover = self.incidence.pop(pid)
        assert not leftover, (pid, leftover)

    def _repoint(self, endpoint, new_pid: str):
        """Move whatever is glued at ``endpoint`` so it refers to ``new_pid``."""
        kind, ident = self.owner[endpoint]
        new_ep = (new_pid, endpoint[1])
        if kind == "edge":
            e = self._remove_edge(ident)
            a = new_ep if e.a == endpoint else e.a
            b = new_ep if e.b == endpoint else e.b
            self._add_edge(TorusEdge(e.id, a, b, e.matrix, e.base_reversing))
        else:
            r = self._remove_ray(ident)
            self._add_ray(PeriodicRay(r.id, new_ep, r.period, r.entry))

    def _fresh_piece_id(self, stem: str) -> str:
        while True:
            self._counter += 1
            pid = f"{stem}~{self._counter}"
            if pid not in self.pieces and pid not in self.edges and pid not in self.rays:
                return pid

    def _record(self, move: Move):
        self.trace.append(move)
        if self.observer is not None:
            self.observer(move, self)

    def kind(self, pid: str) -> ThinType:
        return classify_piece(self.pieces[pid])

    def other_slot(self, pid: str, slot):
        a, b = self.pieces[pid].slots
        return b if slot == a else a

    def _t2xi(self, pid: str) -> bool:
        return is_t2xi(self.pieces[pid])

    def walk(self, ep) -> _Walk:
        """Follow the gluing at ``ep`` outward through T^2 x I pieces."""
        start = ep[0]
        pieces, edges, mats, rev = [], [], [], False
        cur = ep
        while True:
            kind, ident = self.owner[cur]
            if kind == "ray":
                return _Walk(pieces, edges, mats, rev, ("ray", ident))
            e = self.edges[ident]
            (q, qs), m = e.oriented_from(cur)
            edges.append(ident)
            mats.append(m)
            rev ^= e.base_reversing
            if not self._t2xi(q):
                return _Walk(pieces, edges, mats, rev, ("piece", (q, qs)))
            if q == start:
                return _Walk(pieces, edges, mats, rev, ("cycle", (q, qs)))
            pieces.append(q)
            mats.append(T2XI_TRANSPORT)
            cur = (q, self.other_slot(q, qs))

    def to_graph(self) -> GraphStructure:
        pieces, pos = {}, {}
        for pid, piece in self.pieces.items():
            for i, s in enumerate(piece.slots):
                pos[(pid, s)] = (pid, i)
            pieces[pid] = _with_slots(piece, tuple(range(len(piece.slots))))
        edges = {eid: TorusEdge(eid, pos[e.a], pos[e.b], e.matrix, e.base_reversing)
                 for eid, e in self.edges.items()}
        rays = {rid: PeriodicRay(rid, pos[r.attach], r.period, r.entry)
                for rid, r in self.rays.items()}
        return GraphStructure(pieces, edges, rays)

    # stage A -----------------------------------------------------------

    def stage_a(self):
        solid = [pid for pid, p in self.pieces.items() if isinstance(p, SolidTorusPiece)]
        work = deque(self.policy.order(solid))
        blocked = {}  # solid torus -> neighbour, fiber bounds a meridian disk
        while work:
            vid = work.popleft()
            v = self.pieces.get(vid)
            if not isinstance(v, SolidTorusPiece):
                continue
            blocked.pop(vid, None)
            outcome = self._absorb_one(vid, v)
            if outcome == "blocked":
                kind, ident = self.owner[(vid, v.slots[0])]
                blocked[vid] = self.edges[ident].oriented_from((vid, v.slots[0]))[0][0]
            elif outcome is not None:
                work.appendleft(outcome[0])
                for wid in outcome[1:]:
                    # a neighbour changed; blocked solid tori next to it get another look
                    for b in [b for b, w in blocked.items() if w == wid]:
                        work.append(b)
        if blocked:
            vid = min(blocked, key=str)
            wid = blocked[vid]
            raise _Stop(Diagnosis(
                DiagnosisKind.REDUCIBLE_WITNESS, (vid, wid),
                f"the fiber of piece {wid} bounds a meridian disk of solid torus {vid}; "
                f"an admissible arc gives an essential 2-sphere, so the input is not "
                f"irreducible"))

    def _absorb_one(self, vid: str, v: SolidTorusPiece):
        """Try to get rid of solid torus ``vid``.

        Returns None if nothing happened, "blocked" if the fiber of the
        neighbour bounds a meridian disk, or a tuple (id to revisit, changed
        neighbours...) after a rewrite.
        """
        ep = (vid, v.slots[0])
        kind, ident = self.owner[ep]
        if kind == "ray":
            ray = self.rays[ident]
            if ray.is_product:
                raise _Stop(Diagnosis(
                    DiagnosisKind.EXHAUSTION_BY_SOLID_TORI, (vid, ident),
                    f"solid torus {vid} followed by the T^2 x I half-line {ident}: the "
                    f"manifold is exhausted by solid tori"))
            self._unroll(ident)
            return (vid,)
        e = self.edges[ident]
        (wid, wslot), to_w = e.oriented_from(ep)
        w = self.pieces[wid]
        meridian_w = to_w @ v.meridian  # meridian in W's coordinates
        if isinstance(w, SolidTorusPiece):
            if fibrations_match(to_w, v.meridian, w.meridian):
                raise _Stop(Diagnosis(
                    DiagnosisKind.REDUCIBLE_WITNESS, (vid, wid),
                    f"solid tori {vid} and {wid} are glued meridian to meridian "
                    f"(S^2 x S^1): closed and reducible"))
            raise _Stop(Diagnosis(
                DiagnosisKind.CLOSED_SEIFERT, (vid, wid),
                f"solid tori {vid} and {wid} glued to each other form a closed lens "
                f"space, not an open manifold"))
        if isinstance(w, K2IPiece):
            alpha = abs(meridian_w[0])
            if alpha:
                base = cap_with_cone(moebius_band(), 0, alpha)
            else:
                alpha = abs((_K2XI_F2_BASIS @ meridian_w)[0])
                base = cap_with_cone(disk(2, 2), 0, alpha)
            self._remove_edge(ident)
            self._remove_piece(vid)
            self.pieces[wid] = FiberedPiece(base, ())
            self._record(Move(MoveKind.ABSORB_SOLID_TORUS, (vid, wid), (wid,), alpha))
            return (wid,)
        wtype = classify_piece(w)
        if wtype is ThinType.T2XI:
            out_slot = self.other_slot(wid, wslot)
            new_v = SolidTorusPiece(T2XI_TRANSPORT @ meridian_w, (out_slot,))
            self._remove_edge(ident)
            self.incidence[vid] = set()
            self.pieces[vid] = new_v
            self._repoint((wid, out_slot), vid)
            self._remove_piece(wid)
            self._record(Move(MoveKind.MERGE_T2XI_CHAIN, (wid, vid), (vid,)))
            return (vid,)
        if wtype is ThinType.T2XR_PLUS:
            raise _Stop(Diagnosis(
                DiagnosisKind.S1XR2_LIKE, (vid, wid),
                f"solid torus {vid} glued to the T^2 x [0, oo) piece {wid}: the "
                f"manifold is S^1 x R^2-like"))
        alpha = abs(meridian_w[0])
        if alpha == 0:
            return "blocked"
        i = w.slot_index(wslot)
        base = cap_with_cone(w.base, i, alpha)
        capped = FiberedPiece(base, w.slots[:i] + w.slots[i + 1:])
        if capped.is_ambiguous_solid_torus:
            if base.boundary_count == 0:
                raise _Stop(Diagnosis(
                    DiagnosisKind.S1XR2_LIKE, (vid, wid),
                    f"filling piece {wid} with solid torus {vid} leaves a fibration "
                    f"over a plane with at most one cone point: S^1 x R^2"))
            raise _Stop(Diagnosis(
                DiagnosisKind.AMBIGUOUS_SOLID_TORUS, (vid, wid),
                f"filling piece {wid} with solid torus {vid} yields a solid torus whose "
                f"meridian depends on unrecorded Seifert invariants"))
        self._remove_edge(ident)
        self._remove_piece(vid)
        self.pieces[wid] = capped
        self._record(Move(MoveKind.ABSORB_SOLID_TORUS, (vid, wid), (wid,), alpha))
        return (wid, wid)

    def _unroll(self, rid: str):
        """Materialise the first period piece of a non-product ray as a core piece."""
        ray = self._remove_ray(rid)
        piece, _ = ray.period[0]
        qid = self._fresh_piece_id(rid)
        slots = ((qid, 0), (qid, 1))
        self.pieces[qid] = FiberedPiece(piece.base, slots)
        self.incidence[qid] = set()
        self._add_edge(TorusEdge(self._fresh_piece_id(rid), ray.attach, slots[0],
                                 ray.entry_matrix))
        rotated = ray.period[1:] + ray.period[:1]
        self._add_ray(PeriodicRay(rid, slots[1], rotated))

    # stage B -----------------------------------------------------------

    def stage_b(self):
        t2 = [pid for pid in self.pieces if self._t2xi(pid)]
        for tid in self.policy.order(t2):
            if tid not in self.pieces or not self._t2xi(tid):
                continue
            s0, s1 = self.pieces[tid].slots
            right = self.walk((tid, s1))
            if right.terminal[0] == "cycle":
                self._cycle_diagnosis(tid, right)
            left = self.walk((tid, s0))
            chain = list(reversed(left.pieces)) + [tid] + right.pieces
            chain_edges = list(reversed(left.edges)) + right.edges
            composite = right.composite() @ T2XI_TRANSPORT @ left.composite().inverse()
            rev = left.reversing ^ right.reversing
            lt, rt = left.terminal, right.terminal
            if self._is_product_ray(lt) or self._is_product_ray(rt):
                continue  # a half-line; stage C takes it
            if lt[0] == "ray" and rt[0] == "ray":
                raise UnsupportedStructure(
                    f"T^2 x I chain {chain} joins two non-product rays")
            if lt[0] == "ray":
                lt, rt = rt, lt
                composite = composite.inverse()
                chain_edges.reverse()
            for eid in chain_edges:
                self._remove_edge(eid)
            for pid in chain:
                self._remove_piece(pid)
            y1 = lt[1]
            if rt[0] == "ray":
                ray = self._remove_ray(rt[1])
                self._add_ray(PeriodicRay(ray.id, y1, ray.period,
                                          ray.entry_matrix @ composite))
                result = ray.id
            else:
                result = chain_edges[0]
                self._add_edge(TorusEdge(result, y1, rt[1], composite, rev))
            self._record(Move(MoveKind.MERGE_T2XI_CHAIN,
                              tuple(chain) + tuple(chain_edges), (result,)))

    def _is_product_ray(self, terminal) -> bool:
        return terminal[0] == "ray" and self.rays[terminal[1]].is_product

    def _cycle_diagnosis(self, tid: str, walk: _Walk):
        monodromy = T2XI_TRANSPORT @ walk.composite()
        trace = monodromy.a + monodromy.d
        ids = tuple(sorted([tid] + walk.pieces))
        if abs(trace) <= 2:
            raise _Stop(Diagnosis(
                DiagnosisKind.CLOSED_SEIFERT, ids,
                f"the whole structure is a cycle of T^2 x I pieces: a closed torus "
                f"bundle with monodromy trace {trace}, which is Seifert fibered"))
        raise _Stop(Diagnosis(
            DiagnosisKind.CLOSED_NON_SEIFERT, ids,
            f"the whole structure is a cycle of T^2 x I pieces: a closed Sol torus "
            f"bundle (monodromy trace {trace})"))

    # stage C -----------------------------------------------------------

    def stage_c(self):
        sources = [("ray", rid) for rid, r in self.rays.items() if r.is_product]
        sources += [("piece", pid) for pid in self.pieces
                    if self.kind(pid) is ThinType.T2XR_PLUS]
        for src in self.policy.order(sources):
            kind, ident = src
            if kind == "ray":
                if ident not in self.rays:
                    continue
                ep = self.rays[ident].attach
                if self._t2xi(ep[0]):
                    w = self.walk((ep[0], self.other_slot(*ep)))
                    w.pieces.insert(0, ep[0])
                else:
                    w = _Walk([], [], [], False, ("piece", ep))
            else:
                if ident not in self.pieces or self.kind(ident) is not ThinType.T2XR_PLUS:
                    continue
                w = self.walk((ident, self.pieces[ident].slots[0]))
            self._collapse_half_line(src, w)

    def _collapse_half_line(self, src, w: _Walk):
        term_kind, term = w.terminal
        if term_kind == "ray" and not self.rays[term].is_product:
            raise UnsupportedStructure(
                f"T^2 x I half-line {src[1]} runs into the non-product ray {term}")
        affected = [src[1]] + w.pieces + w.edges
        # rays go first: they may hang off pieces of the walk
        if src[0] == "ray":
            self._remove_ray(src[1])
        if term_kind == "ray":
            self._remove_ray(term)
        for eid in w.edges:
            self._remove_edge(eid)
        for pid in w.pieces:
            self._remove_piece(pid)
        if src[0] == "piece":
            self._remove_piece(src[1])
        if term_kind == "ray":
            other = term
        elif self.kind(term[0]) is ThinType.T2XR_PLUS:
            other = term[0]
            self._remove_piece(other)
        else:
            zid, zslot = term
            z = self.pieces[zid]
            if isinstance(z, SolidTorusPiece):
                raise _Stop(Diagnosis(
                    DiagnosisKind.EXHAUSTION_BY_SOLID_TORI, (src[1], zid),
                    f"half-line {src[1]} ends on solid torus {zid}"))
            if isinstance(z, K2IPiece):
                self.pieces[zid] = FiberedPiece(boundary_to_end(moebius_band(), 0), ())
            else:
                i = z.slot_index(zslot)
                self.pieces[zid] = FiberedPiece(boundary_to_end(z.base, i),
                                                z.slots[:i] + z.slots[i + 1:])
            self._record(Move(MoveKind.COLLAPSE_RAY, tuple(affected) + (zid,), (zid,)))
            return
        # both sides are half-lines: the whole manifold is T^2 x R
        new_id = self._fresh_piece_id(str(src[1]))
        self.pieces[new_id] = FiberedPiece(BaseOrbifold(True, 0, 0, 2), ())
        self.incidence[new_id] = set()
        self._record(Move(MoveKind.COLLAPSE_RAY, tuple(affected) + (other,), (new_id,)))

    # stage D -----------------------------------------------------------

    def _normalize_fibered_k2xi(self):
        for pid, piece in list(self.pieces.items()):
            if not isinstance(piece, FiberedPiece) or piece.base.is_closed \
                    or piece.is_ambiguous_solid_torus or self.kind(pid) is not ThinType.K2XI:
                continue
            if piece.base.orientable:  # disk with cones {2, 2}: its fiber is F2
                slot = piece.slots[0]
                kind, ident = self.owner[(pid, slot)]
                if kind == "edge":
                    e = self._remove_edge(ident)
                    m = e.matrix
                    m = _K2XI_F2_BASIS.inverse() @ m if e.b == (pid, slot) \
                        else m @ _K2XI_F2_BASIS
                    self._add_edge(TorusEdge(e.id, e.a, e.b, m, e.base_reversing))
                else:
                    r = self._remove_ray(ident)
                    self._add_ray(PeriodicRay(r.id, r.attach, r.period,
                                              r.entry_matrix @ _K2XI_F2_BASIS))
            self.pieces[pid] = K2IPiece(None, piece.slots)

    def stage_d(self):
        self._normalize_fibered_k2xi()
        k2 = [pid for pid, p in self.pieces.items() if isinstance(p, K2IPiece)]
        for xid in self.policy.order(k2):
            x = self.pieces.get(xid)
            if not isinstance(x, K2IPiece):
                continue
            xep = (xid, x.slots[0])
            kind, ident = self.owner[xep]
            if kind == "ray":
                self.pieces[xid] = K2IPiece("F1", x.slots)
                continue
            e = self.edges[ident]
            (yid, yslot), to_y = e.oriented_from(xep)
            y = self.pieces[yid]
            to_x = to_y.inverse()
            if isinstance(y, K2IPiece):
                seifert = any(fibrations_match(to_x, fa, fb)
                              for fa in K2XI_FIBERS.values() for fb in K2XI_FIBERS.values())
                kind_ = (DiagnosisKind.CLOSED_SEIFERT if seifert
                         else DiagnosisKind.CLOSED_NON_SEIFERT)
                raise _Stop(Diagnosis(
                    kind_, tuple(sorted((xid, yid))),
                    f"two K^2 x~ I pieces {xid}, {yid} glued together form a closed "
                    f"manifold"))
            if not isinstance(y, FiberedPiece) or classify_piece(y) is not ThinType.THICK:
                raise InvalidStructure(
                    f"K2xI piece {xid} is adjacent to the thin piece {yid} after stages A-C")
            i = y.slot_index(yslot)
            if fibrations_match(to_x, FIBER, FIBER):
                cap = moebius_band()
            elif fibrations_match(to_x, FIBER, SECTION):
                cap = disk(2, 2)
            else:
                if x.fibration != "F1":
                    self.pieces[xid] = K2IPiece("F1", x.slots)
                continue
            self._remove_edge(ident)
            self._remove_piece(xid)
            self.pieces[yid] = FiberedPiece(merge_bases(y.base, i, cap, 0),
                                            y.slots[:i] + y.slots[i + 1:])
            self._record(Move(MoveKind.RESOLVE_K2XI, (xid, yid), (yid,)))

    # stage E -----------------------------------------------------------

    def _thick(self, pid: str) -> bool:
        p = self.pieces[pid]
        return isinstance(p, FiberedPiece) and not p.base.is_closed \
            and not p.is_ambiguous_solid_torus and classify_piece(p) is ThinType.THICK

    def stage_e(self):
        cands = [eid for eid, e in self.edges.items()
                 if fiber_intersection(e.matrix) == 0
                 and self._thick(e.a[0]) and self._thick(e.b[0])]
        for eid in self.policy.order(cands):
            if eid not in self.edges:
                continue
            e = self._remove_edge(eid)
            (pid, s), (qid, t) = e.a, e.b
            if pid == qid:
                self.pieces[pid] = merge_loop(self.pieces[pid], s, t, e.matrix,
                                              e.base_reversing)
                self._record(Move(MoveKind.MERGE_MATCHING_TORUS, (eid, pid), (pid,)))
                continue
            p, q = self.pieces[pid], self.pieces[qid]
            merged = merge_across(p, s, q, t, e.matrix, e.base_reversing)
            if e.base_reversing:
                # q's base orientation is flipped to agree with p's
                self._flip_orientation(qid)
            keep, gone = pid, qid
            if len(self.incidence[qid]) > len(self.incidence[pid]):
                keep, gone = qid, pid
            self.pieces[keep] = merged
            for ident in list(self.incidence[gone]):
                if ident in self.rays:
                    self._repoint(self.rays[ident].attach, keep)
                    continue
                for ep in (self.edges[ident].a, self.edges[ident].b):
                    if ep[0] == gone and self.owner.get(ep) == ("edge", ident):
                        self._repoint(ep, keep)
            self._remove_piece(gone)
            self._record(Move(MoveKind.MERGE_MATCHING_TORUS, (eid, pid, qid), (keep,)))

    def _flip_orientation(self, pid: str):
        for ident in list(self.incidence[pid]):
            e = self.edges.get(ident)
            if e is None or e.is_loop:
                continue
            self._remove_edge(ident)
            self._add_edge(TorusEdge(e.id, e.a, e.b, e.matrix, not e.base_reversing))


def _with_slots(piece, slots):
    if isinstance(piece, FiberedPiece):
        return FiberedPiece(piece.base, slots)
    if isinstance(piece, SolidTorusPiece):
        return SolidTorusPiece(piece.meridian, slots)
    return K2IPiece(piece.fibration, slots)


def _checked_state(g: GraphStructure, policy, trace, observer=None) -> _State:
    problems = validate(g)
    if problems:
        raise InvalidStructure("; ".join(problems))
    return _State(g, _as_policy(policy), trace if trace is not None else [], observer)


def _run_stages(g, stages, policy, trace):
    state = _checked_state(g, policy, trace)
    try:
        for stage in stages:
            stage(state)
    except _Stop as stop:
        return stop.diagnosis
    return state.to_graph()


def stage_a_absorb_solid_tori(g: GraphStructure, policy=None,
                              trace: list | None = None) -> GraphStructure | Diagnosis:
    return _run_stages(g, [_State.stage_a], policy, trace)


def stage_b_collapse_t2xi(g: GraphStructure, policy=None,
                          trace: list | None = None) -> GraphStructure | Diagnosis:
    return _run_stages(g, [_State.stage_b], policy, trace)


def stage_c_collapse_rays(g: GraphStructure, policy=None,
                          trace: list | None = None) -> GraphStructure | Diagnosis:
    return _run_stages(g, [_State.stage_c], policy, trace)


def stage_d_resolve_k2xi(g: GraphStructure, policy=None,
                         trace: list | None = None) -> GraphStructure | Diagnosis:
    return _run_stages(g, [_State.stage_d], policy, trace)


def stage_e_merge_matching(g: GraphStructure, policy=None,
                           trace: list | None = None) -> GraphStructure | Diagnosis:
    return _run_stages(g, [_State.stage_e], policy, trace)


_PIPELINE = (_State.stage_a, _State.stage_b, _State.stage_c, _State.stage_d,
             _State.stage_e)


def reduce(g: GraphStructure, policy=None, observer: Callable | None = None
           ) -> ReductionOutcome:
    """Run the full pipeline to a global fixpoint.

    ``policy`` is a :class:`Policy`, a seed, or None (smallest id first).
    ``observer(move, state)`` is called after every move; ``state.to_graph()``
    gives the structure at that point.

    >>> from graphmfd.orbifold import BaseOrbifold
    >>> g = GraphStructure.build({"X": FiberedPiece(BaseOrbifold(True, 2))})
    >>> reduce(g).trace
    []
    """
    trace: list[Move] = []
    state = _checked_state(g, policy, trace, observer)
    try:
        while True:
            before = len(trace)
            for stage in _PIPELINE:
                stage(state)
            if len(trace) == before:
                break
    except _Stop as stop:
        return ReductionOutcome(None, trace, stop.diagnosis)
    return ReductionOutcome(state.to_graph(), trace, None)


def is_reduced(g: GraphStructure) -> bool:
    """Combinatorial incompressibility plus maximality of the pieces."""
    kinds = {}
    for pid, piece in g.pieces.items():
        if isinstance(piece, SolidTorusPiece):
            return False
        if isinstance(piece, FiberedPiece) and piece.is_ambiguous_solid_torus:
            return False
        kinds[pid] = classify_piece(piece)
        if kinds[pid] in (ThinType.T2XI, ThinType.T2XR_PLUS):
            return False
    if any(r.is_product for r in g.rays.values()):
        return False
    for e in g.edges.values():
        ka, kb = kinds[e.a[0]], kinds[e.b[0]]
        if ka is ThinType.THICK and kb is ThinType.THICK:
            if fibrations_match(e.matrix):
                return False
        elif ka is ThinType.K2XI or kb is ThinType.K2XI:
            if ka is kb:
                return False
            m = e.matrix if kb is ThinType.K2XI else e.matrix.inverse()
            # the fibered neighbour's fiber must avoid both K2xI fibers
            if any(fibrations_match(m, FIBER, f) for f in K2XI_FIBERS.values()):
                return False
    return True
