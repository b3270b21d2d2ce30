"""Decorated graphs of Seifert pieces glued along tori.

Infinite locally finite structures are represented by a finite core plus
eventually periodic rays: a ray hangs off one boundary slot of a core piece
and repeats its period of two-boundary pieces forever.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping

from .orbifold import euler_char_compactified
from .seifert import (
    FiberedPiece,
    K2IPiece,
    Mat2,
    Piece,
    PieceError,
    SolidTorusPiece,
    ThinType,
    classify_piece,
)

Endpoint = tuple  # (piece id, slot name)


@dataclass(frozen=True)
class TorusEdge:
    """A gluing torus; ``matrix`` maps coordinates at ``a`` to coordinates at ``b``."""

    id: str
    a: Endpoint
    b: Endpoint
    matrix: Mat2
    base_reversing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(self.a))
        object.__setattr__(self, "b", tuple(self.b))
        object.__setattr__(self, "matrix", Mat2(*self.matrix))

    @property
    def is_loop(self) -> bool:
        return self.a[0] == self.b[0]

    def oriented_from(self, endpoint: Endpoint) -> tuple[Endpoint, Mat2]:
        """Other endpoint and the matrix read from ``endpoint`` towards it."""
        if endpoint == self.a:
            return self.b, self.matrix
        if endpoint == self.b:
            return self.a, self.matrix.inverse()
        raise KeyError(f"{endpoint} is not an endpoint of edge {self.id}")


@dataclass(frozen=True)
class PeriodicRay:
    """Half-line of pieces attached at ``attach``.

    ``period[i] = (piece, matrix)``: ``matrix`` glues the previous torus
    (slot 1 of the previous piece, or the attach slot) to slot 0 of ``piece``.
    The gluing into the very first piece is ``entry`` when given, otherwise
    the first period matrix.
    """

    id: str
    attach: Endpoint
    period: tuple
    entry: Mat2 | None = None

    def __post_init__(self):
        object.__setattr__(self, "attach", tuple(self.attach))
        object.__setattr__(self, "period",
                           tuple((p, Mat2(*m)) for p, m in self.period))
        if self.entry is not None:
            object.__setattr__(self, "entry", Mat2(*self.entry))

    @property
    def entry_matrix(self) -> Mat2:
        return self.entry if self.entry is not None else self.period[0][1]

    @property
    def is_product(self) -> bool:
        """True when every period piece is a T^2 x I."""
        try:
            return all(classify_piece(p) is ThinType.T2XI for p, _ in self.period)
        except PieceError:
            return False


@dataclass(frozen=True)
class GraphStructure:
    pieces: Mapping[str, Piece] = field(default_factory=dict)
    edges: Mapping[str, TorusEdge] = field(default_factory=dict)
    rays: Mapping[str, PeriodicRay] = field(default_factory=dict)

    @classmethod
    def build(cls, pieces=(), edges=(), rays=()) -> GraphStructure:
        """Convenience constructor from (id, piece) pairs and edge/ray lists."""
        pieces = dict(pieces.items() if isinstance(pieces, Mapping) else pieces)
        return cls(pieces, {e.id: e for e in edges}, {r.id: r for r in rays})

    def attachments(self) -> Iterator[tuple[Endpoint, str, str]]:
        """Yield (endpoint, 'edge'|'ray', id) for every used slot."""
        for e in self.edges.values():
            yield e.a, "edge", e.id
            yield e.b, "edge", e.id
        for r in self.rays.values():
            yield r.attach, "ray", r.id

    def slot_map(self) -> dict:
        return {ep: (kind, ident) for ep, kind, ident in self.attachments()}

    def incident(self) -> dict[str, list]:
        """Piece id -> list of edges and rays touching it (loops listed twice)."""
        out = defaultdict(list)
        for e in self.edges.values():
            out[e.a[0]].append(e)
            out[e.b[0]].append(e)
        for r in self.rays.values():
            out[r.attach[0]].append(r)
        return out


def validate(g: GraphStructure) -> list[str]:
    """Return a list of violations; empty means the structure is valid."""
    problems = []
    for pid, piece in g.pieces.items():
        if isinstance(piece, FiberedPiece) and piece.is_ambiguous_solid_torus:
            problems.append(
                f"piece {pid}: ambiguous solid torus encoding (fibered over a disk or "
                f"plane with at most one cone point; give it as a solid torus)")
    used = {}

    def claim(endpoint, owner):
        pid, slot = endpoint
        piece = g.pieces.get(pid)
        if piece is None:
            problems.append(f"{owner}: unknown piece {pid!r}")
            return
        if slot not in piece.slots:
            problems.append(f"{owner}: piece {pid} has no slot {slot!r}")
            return
        if endpoint in used:
            problems.append(f"{owner}: slot {pid}:{slot} already used by {used[endpoint]}")
            return
        used[endpoint] = owner

    for e in g.edges.values():
        if e.matrix.det != -1:
            problems.append(f"edge {e.id}: orientation convention violated, "
                            f"determinant {e.matrix.det} (must be -1)")
        if e.a == e.b:
            problems.append(f"edge {e.id}: both ends on the same slot")
        claim(e.a, f"edge {e.id}")
        claim(e.b, f"edge {e.id}")
    for r in g.rays.values():
        claim(r.attach, f"ray {r.id}")
        if not r.period:
            problems.append(f"ray {r.id}: empty period")
        for k, (p, m) in enumerate(r.period):
            if not isinstance(p, FiberedPiece) or p.base.boundary_count != 2 \
                    or p.base.end_count != 0:
                problems.append(f"ray {r.id}: period piece {k} must be fibered with "
                                f"two boundary tori and no ends")
            if m.det != -1:
                problems.append(f"ray {r.id}: period matrix {k} has determinant "
                                f"{m.det} (must be -1)")
        if r.entry is not None and r.entry.det != -1:
            problems.append(f"ray {r.id}: entry matrix has determinant {r.entry.det}")

    for pid, piece in g.pieces.items():
        for slot in piece.slots:
            if (pid, slot) not in used:
                problems.append(f"piece {pid}: slot {slot!r} is not glued to anything "
                                f"(the manifold must have empty boundary)")

    if g.pieces and not _connected(g):
        problems.append("graph is not connected")
    if not g.pieces:
        problems.append("structure has no pieces")
    return problems


def _connected(g: GraphStructure) -> bool:
    adj = defaultdict(set)
    for e in g.edges.values():
        adj[e.a[0]].add(e.b[0])
        adj[e.b[0]].add(e.a[0])
    start = next(iter(g.pieces))
    seen, stack = {start}, [start]
    while stack:
        for nxt in adj[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen >= g.pieces.keys()


def is_t2xi(piece: Piece) -> bool:
    return isinstance(piece, FiberedPiece) and not piece.is_ambiguous_solid_torus \
        and not piece.base.is_closed and classify_piece(piece) is ThinType.T2XI


@dataclass(frozen=True)
class T2xIComponent:
    """A connected component of the T^2 x I subgraph.

    ``shape`` is "path", "cycle" or "ray" (a path with a product ray hanging
    off one of its outer slots).
    """

    pieces: tuple[str, ...]
    edges: tuple[str, ...]
    shape: str


def dual_subgraph_t2xi(g: GraphStructure) -> list[T2xIComponent]:
    """Components of the subgraph spanned by T^2 x I pieces, in piece order."""
    members = {pid for pid, p in g.pieces.items() if is_t2xi(p)}
    slot_map = g.slot_map()
    adj = defaultdict(list)
    for e in g.edges.values():
        if e.a[0] in members and e.b[0] in members:
            adj[e.a[0]].append(e.id)
            adj[e.b[0]].append(e.id)
    out, seen = [], set()
    for pid in sorted(members):
        if pid in seen:
            continue
        comp_p, comp_e, stack = [], set(), [pid]
        seen.add(pid)
        while stack:
            cur = stack.pop()
            comp_p.append(cur)
            for eid in adj[cur]:
                comp_e.add(eid)
                e = g.edges[eid]
                for nxt in (e.a[0], e.b[0]):
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
        # a path of k T2xI pieces uses k-1 internal edges; a cycle uses k
        if len(comp_e) == len(comp_p):
            shape = "cycle"
        else:
            shape = "path"
            for q in comp_p:
                for slot in g.pieces[q].slots:
                    kind, ident = slot_map.get((q, slot), (None, None))
                    if kind == "ray" and g.rays[ident].is_product:
                        shape = "ray"
        out.append(T2xIComponent(tuple(sorted(comp_p)), tuple(sorted(comp_e)), shape))
    return out


def ends(g: GraphStructure) -> int:
    total = len(g.rays)
    for piece in g.pieces.values():
        if isinstance(piece, FiberedPiece):
            total += piece.base.end_count
    return total


def piece_chi_sum(g: GraphStructure) -> Fraction:
    """Sum of compactified orbifold Euler characteristics over fibered core pieces.

    Solid tori, K2xI pieces and rays contribute zero.
    """
    total = Fraction(0)
    for piece in g.pieces.values():
        if isinstance(piece, FiberedPiece):
            total += euler_char_compactified(piece.base)
    return total


__all__ = [
    "GraphStructure", "TorusEdge", "PeriodicRay", "T2xIComponent", "validate",
    "dual_subgraph_t2xi", "ends", "piece_chi_sum", "is_t2xi",
    "FiberedPiece", "SolidTorusPiece", "K2IPiece",
]
