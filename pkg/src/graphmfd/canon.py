"""Canonical signatures of decorated graph structures.

Vertices are the core pieces plus one vertex per ray; they are decorated by
piece type and base data.  Torus edges are decorated by the intersection
number of the two fiber classes; ray attachments by a marker.  Full gluing
matrices are deliberately left out: they are only defined up to changes of
section, which the model does not normalise.  Equal signatures therefore mean
isomorphic decorated graphs, not necessarily diffeomorphic manifolds.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass

from .graph import GraphStructure
from .seifert import FiberedPiece, K2IPiece, SolidTorusPiece, fiber_intersection

_RAY_ATTACH = -1


@dataclass(frozen=True)
class Signature:
    data: bytes

    def hex(self) -> str:
        return self.data.hex()

    def __str__(self):
        return self.hex()


@dataclass(frozen=True)
class Isomorphism:
    pieces: dict
    edges: dict
    rays: dict

    def inverse(self) -> Isomorphism:
        return Isomorphism(*({v: k for k, v in m.items()}
                             for m in (self.pieces, self.edges, self.rays)))

    def then(self, other: Isomorphism) -> Isomorphism:
        return Isomorphism(*({k: m2[v] for k, v in m1.items()} for m1, m2 in
                             ((self.pieces, other.pieces), (self.edges, other.edges),
                              (self.rays, other.rays))))


def piece_label(piece) -> tuple:
    if isinstance(piece, FiberedPiece):
        b = piece.base
        return ("fibered", int(b.orientable), b.genus, b.boundary_count, b.end_count,
                list(b.cone_orders))
    if isinstance(piece, SolidTorusPiece):
        return ("solidtorus",)
    if isinstance(piece, K2IPiece):
        return ("k2xi", piece.fibration or "")
    raise TypeError(f"not a piece: {piece!r}")


def _primitive_period(items: list) -> list:
    n = len(items)
    for k in range(1, n + 1):
        if n % k == 0 and items[:k] * (n // k) == items:
            return items[:k]
    return items


def ray_label(ray) -> tuple:
    period = [[list(piece_label(p)), fiber_intersection(m)] for p, m in ray.period]
    return ("ray", _primitive_period(period), fiber_intersection(ray.entry_matrix))


class _Decorated:
    """Vertex labels, loop multisets and parallel-edge multisets of a structure."""

    def __init__(self, g: GraphStructure):
        self.vertices = [("p", pid) for pid in g.pieces] + [("r", rid) for rid in g.rays]
        loops = defaultdict(list)
        between = defaultdict(list)
        self.edge_key = {}
        for e in g.edges.values():
            u, v = ("p", e.a[0]), ("p", e.b[0])
            fi = fiber_intersection(e.matrix)
            if u == v:
                loops[u].append(fi)
                self.edge_key[e.id] = (u, u, fi)
            else:
                between[frozenset((u, v))].append(fi)
                self.edge_key[e.id] = (u, v, fi)
        for r in g.rays.values():
            u, v = ("p", r.attach[0]), ("r", r.id)
            between[frozenset((u, v))].append(_RAY_ATTACH)
        self.label = {}
        for pid, piece in g.pieces.items():
            v = ("p", pid)
            self.label[v] = list(piece_label(piece)) + [sorted(loops[v])]
        for rid, ray in g.rays.items():
            self.label[("r", rid)] = list(ray_label(ray)) + [[]]
        self.adj = defaultdict(dict)
        for pair, labels in between.items():
            u, v = tuple(pair)
            self.adj[u][v] = tuple(sorted(labels))
            self.adj[v][u] = tuple(sorted(labels))

    def _key(self, label):
        return json.dumps(label, separators=(",", ":"))

    def initial_colors(self) -> dict:
        keys = {v: self._key(self.label[v]) for v in self.vertices}
        ranks = {k: i for i, k in enumerate(sorted(set(keys.values())))}
        return {v: ranks[keys[v]] for v in self.vertices}

    def refine(self, colors: dict) -> dict:
        while True:
            sig = {v: (colors[v], tuple(sorted((colors[u], lab)
                                               for u, lab in self.adj[v].items())))
                   for v in self.vertices}
            ranks = {s: i for i, s in enumerate(sorted(set(sig.values())))}
            new = {v: ranks[sig[v]] for v in self.vertices}
            if len(ranks) == len(set(colors.values())):
                return new
            colors = new

    def certificate(self, order: list) -> tuple:
        index = {v: i for i, v in enumerate(order)}
        edges = []
        for u in order:
            for v, lab in self.adj[u].items():
                if index[u] < index[v]:
                    edges.append([index[u], index[v], list(lab)])
        edges.sort()
        return json.dumps([[self.label[v] for v in order], edges], separators=(",", ":"))

    def twins(self, u, v) -> bool:
        if self.label[u] != self.label[v]:
            return False
        nu = {w: lab for w, lab in self.adj[u].items() if w != v}
        nv = {w: lab for w, lab in self.adj[v].items() if w != u}
        return nu == nv and self.adj[u].get(v) == self.adj[v].get(u)


def _individualize(colors: dict, v) -> dict:
    return {w: 2 * c + (0 if w == v else 1) for w, c in colors.items()}


def canonical_order(g: GraphStructure) -> tuple[list, str]:
    """Canonical vertex order and the certificate it produces."""
    d = _Decorated(g)
    best = [None, None]
    automorphisms = []

    def search(colors, prefix):
        colors = d.refine(colors)
        cells = defaultdict(list)
        for v, c in colors.items():
            cells[c].append(v)
        target = next((cells[c] for c in sorted(cells) if len(cells[c]) > 1), None)
        if target is None:
            order = sorted(d.vertices, key=colors.get)
            cert = d.certificate(order)
            if best[0] is None or cert < best[0]:
                best[0], best[1] = cert, order
            elif cert == best[0]:
                automorphisms.append(dict(zip(best[1], order)))
            return
        explored = []
        for v in sorted(target, key=str):
            if any(d.twins(v, w) for w in explored):
                continue
            if any(all(a[p] == p for p in prefix) and a.get(w) == v
                   for a in automorphisms for w in explored):
                continue
            explored.append(v)
            search(_individualize(colors, v), prefix + [v])

    search(d.initial_colors(), [])
    return best[1], best[0]


def signature(g: GraphStructure) -> Signature:
    _, cert = canonical_order(g)
    return Signature(cert.encode())


def find_isomorphism(g1: GraphStructure, g2: GraphStructure) -> Isomorphism | None:
    """A decoration-preserving bijection of pieces, edges and rays, or None."""
    if (len(g1.pieces), len(g1.edges), len(g1.rays)) != \
            (len(g2.pieces), len(g2.edges), len(g2.rays)):
        return None
    order1, cert1 = canonical_order(g1)
    order2, cert2 = canonical_order(g2)
    if cert1 != cert2:
        return None
    vmap = dict(zip(order1, order2))
    pieces = {v[1]: w[1] for v, w in vmap.items() if v[0] == "p"}
    rays = {v[1]: w[1] for v, w in vmap.items() if v[0] == "r"}
    d1, d2 = _Decorated(g1), _Decorated(g2)
    buckets = defaultdict(list)
    for eid in sorted(g2.edges, key=str):
        u, v, fi = d2.edge_key[eid]
        buckets[(frozenset((u, v)), fi)].append(eid)
    edges = {}
    for eid in sorted(g1.edges, key=str):
        u, v, fi = d1.edge_key[eid]
        edges[eid] = buckets[(frozenset((vmap[u], vmap[v])), fi)].pop(0)
    return Isomorphism(pieces, edges, rays)


def isomorphic(g1: GraphStructure, g2: GraphStructure) -> bool:
    return find_isomorphism(g1, g2) is not None
