"""Seeded random graph structures for testing the reduction engine.

Instances are built around thick "hub" pieces.  Connections hang off the hubs:
hub-to-hub gluings, solid tori, K2xI pieces, T^2 x [0, oo) pieces and product
rays, any of them possibly separated from the hub by a chain of T^2 x I
pieces.  Gluings are chosen so that every move kind of the engine shows up,
and hubs get enough cone points to stay thick after all their solid tori are
filled in.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .graph import GraphStructure, PeriodicRay, TorusEdge, validate
from .orbifold import BaseOrbifold, annulus, euler_char_compactified
from .seifert import T2XI_TRANSPORT, FiberedPiece, K2IPiece, Mat2, SolidTorusPiece

MAX_PIECES = 1_000_000


@dataclass
class _Link:
    kind: str  # hub | solid | k2xi | halfline | ray
    hub: int
    other: int | None = None
    chain: int = 0
    slots: list = field(default_factory=list)


def _elementary(rng: random.Random) -> Mat2:
    k = rng.choice([-2, -1, 1, 2])
    return Mat2(1, k, 0, 1) if rng.random() < 0.5 else Mat2(1, 0, k, 1)


def random_gluing(rng: random.Random, fiber_image=None) -> Mat2:
    """Random determinant -1 matrix.

    ``fiber_image`` constrains where (0, 1) goes: "fiber" (up to sign),
    "section" (up to sign), "generic" (neither), or None for no constraint.
    """
    while True:
        m = Mat2(1, 0, 0, -1)
        for _ in range(rng.randint(1, 3)):
            m = _elementary(rng) @ m if rng.random() < 0.5 else m @ _elementary(rng)
        s = rng.choice([1, -1])
        if fiber_image == "fiber":
            return Mat2(s, 0, rng.randint(-3, 3), -s)
        if fiber_image == "section":
            return Mat2(rng.randint(-3, 3), s, s, 0)
        if fiber_image == "generic" and (m.b == 0 or m.d == 0):
            continue
        return m


def _thick_base(rng: random.Random, boundary: int, solid: int, ends: int) -> BaseOrbifold:
    """A base that stays hyperbolic after its ``solid`` slots are plainly capped."""
    if rng.random() < 0.8:
        orientable, genus = True, rng.choice([0, 0, 0, 1])
    else:
        orientable, genus = False, rng.choice([1, 2])
    cones = []
    while True:
        worst = BaseOrbifold(orientable, genus, boundary - solid, ends, tuple(cones))
        if euler_char_compactified(worst) < 0:
            break
        cones.append(rng.randint(2, 7))
    return BaseOrbifold(orientable, genus, boundary, ends, tuple(cones))


def gen(seed: int, pieces: int, rays: int = 0, chain_heavy: bool = False,
        bad_rate: float = 0.0) -> GraphStructure:
    """Random valid graph structure with exactly ``pieces`` core pieces.

    ``rays`` product rays are attached.  ``bad_rate`` is the probability that a
    solid torus is glued with its meridian along the hub fiber, which makes the
    instance fail reduction with a diagnosis.
    """
    if not 1 <= pieces <= MAX_PIECES:
        raise ValueError(f"pieces must be between 1 and {MAX_PIECES}, got {pieces}")
    if rays < 0:
        raise ValueError(f"rays must be nonnegative, got {rays}")
    if not 0 <= bad_rate <= 1:
        raise ValueError(f"bad_rate must be a probability, got {bad_rate}")
    rng = random.Random(seed)
    n_hubs = max(1, round(pieces * (0.15 if chain_heavy else 0.4)))
    links = [_Link("hub", i, rng.randrange(i)) for i in range(1, n_hubs)]
    for _ in range(rng.randint(0, n_hubs // 3)):
        u = rng.randrange(n_hubs)
        links.append(_Link("hub", u, rng.randrange(n_hubs)))
    for _ in range(rays):
        links.append(_Link("ray", rng.randrange(n_hubs)))
    weights = ({"chain": 0.7, "solid": 0.12, "k2xi": 0.12, "halfline": 0.06}
               if chain_heavy else
               {"chain": 0.3, "solid": 0.3, "k2xi": 0.3, "halfline": 0.1})
    budget = pieces - n_hubs
    while budget > 0:
        action = rng.choices(list(weights), list(weights.values()))[0]
        if action == "chain":
            if not links:
                continue
            rng.choice(links).chain += 1
        else:
            links.append(_Link(action, rng.randrange(n_hubs)))
        budget -= 1
    return _assemble(rng, n_hubs, links, bad_rate)


def _assemble(rng: random.Random, n_hubs: int, links: list[_Link],
              bad_rate: float) -> GraphStructure:
    degree = [0] * n_hubs
    solid = [0] * n_hubs
    for link in links:
        link.slots.append(degree[link.hub])
        degree[link.hub] += 1
        if link.kind == "hub":
            link.slots.append(degree[link.other])
            degree[link.other] += 1
        if link.kind == "solid":
            solid[link.hub] += 1
    pieces, edges, rays = {}, [], []
    for h in range(n_hubs):
        ends = 1 if rng.random() < 0.1 else 0
        pieces[f"Y{h}"] = FiberedPiece(_thick_base(rng, degree[h], solid[h], ends))
    counters = {"T": 0, "V": 0, "K": 0, "P": 0, "e": 0, "r": 0}

    def fresh(prefix):
        counters[prefix] += 1
        return f"{prefix}{counters[prefix]}"

    def glue(a, b, m):
        eid = fresh("e")
        rev = rng.random() < 0.2
        if rng.random() < 0.5:
            edges.append(TorusEdge(eid, a, b, m, rev))
        else:
            edges.append(TorusEdge(eid, b, a, m.inverse(), rev))

    for link in links:
        start = (f"Y{link.hub}", link.slots[0])
        # lay the T^2 x I chain, tracking hub coordinates -> current coordinates
        cur, partial = start, Mat2(1, 0, 0, 1)
        for _ in range(link.chain):
            tid = fresh("T")
            pieces[tid] = FiberedPiece(annulus())
            m = random_gluing(rng)
            glue(cur, (tid, 0), m)
            partial = T2XI_TRANSPORT @ m @ partial
            cur = (tid, 1)
        if link.kind == "ray":
            rid = fresh("r")
            period = tuple((FiberedPiece(annulus()), random_gluing(rng))
                           for _ in range(rng.randint(1, 2)))
            rays.append(PeriodicRay(rid, cur, period))
            continue
        if link.kind == "hub":
            want = "fiber" if rng.random() < 0.35 else "generic"
            target = (f"Y{link.other}", link.slots[1])
        elif link.kind == "solid":
            vid = fresh("V")
            target = (vid, 0)
            want = None
        elif link.kind == "k2xi":
            kid = fresh("K")
            pieces[kid] = K2IPiece()
            target = (kid, 0)
            want = rng.choice(["fiber", "section", "generic"])
        else:
            pid = fresh("P")
            pieces[pid] = FiberedPiece(BaseOrbifold(True, 0, 1, 1))
            target = (pid, 0)
            want = None
        composite = random_gluing(rng, want)
        last = composite @ partial.inverse()
        glue(cur, target, last)
        if link.kind == "solid":
            if rng.random() < bad_rate:
                pulled = (0, 1)
            else:
                alpha = rng.choice([1, 1, 1, 2, 2, 3, 5])
                pulled = (alpha * rng.choice([1, -1]), _coprime(rng, alpha))
            pieces[vid] = SolidTorusPiece(composite @ pulled)
    g = GraphStructure.build(pieces, edges, rays)
    problems = validate(g)
    assert not problems, problems
    return g


def _coprime(rng: random.Random, alpha: int) -> int:
    while True:
        q = rng.randint(-6, 6)
        if Fraction(q, alpha).denominator == alpha or alpha == 1:
            return q
