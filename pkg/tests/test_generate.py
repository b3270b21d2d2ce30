from collections import Counter

import pytest

from graphmfd.generate import gen
from graphmfd.graph import validate
from graphmfd.gsf import serialize
from graphmfd.reduce import MoveKind, reduce
from graphmfd.seifert import FiberedPiece, SolidTorusPiece


def test_deterministic():
    assert serialize(gen(7, 5)) == serialize(gen(7, 5))
    assert serialize(gen(7, 5)) != serialize(gen(8, 5))


def test_single_piece_is_closed_or_ended():
    g = gen(1, 1)
    (piece,) = g.pieces.values()
    assert isinstance(piece, FiberedPiece)
    assert piece.base.boundary_count == 0
    assert validate(g) == []


@pytest.mark.parametrize("seed, pieces, rays", [(2, 10, 0), (3, 30, 2), (4, 200, 5)])
def test_valid_with_exact_piece_count(seed, pieces, rays):
    g = gen(seed, pieces, rays)
    assert validate(g) == []
    assert len(g.pieces) == pieces
    assert len(g.rays) == rays


def test_chain_heavy_is_mostly_t2xi():
    g = gen(5, 400, chain_heavy=True)
    counts = Counter(p.base.boundary_count == 2 and not p.base.cone_orders
                     for p in g.pieces.values() if isinstance(p, FiberedPiece))
    assert counts[True] > len(g.pieces) / 2


def test_bad_rate_produces_diagnoses():
    outcomes = [reduce(gen(s, 6, bad_rate=1.0)) for s in range(30)]
    with_solid = [o for s, o in enumerate(outcomes)
                  if any(isinstance(p, SolidTorusPiece) for p in gen(s, 6).pieces.values())]
    assert with_solid and any(not o.ok for o in with_solid)


@pytest.mark.parametrize("kwargs", [dict(pieces=0), dict(pieces=3, rays=-1),
                                    dict(pieces=3, bad_rate=2.0)])
def test_infeasible_parameters(kwargs):
    with pytest.raises(ValueError):
        gen(0, **kwargs)


def test_every_move_kind_occurs():
    seen = Counter()
    for seed in range(1000):
        out = reduce(gen(seed, 1 + seed % 30, rays=seed % 3))
        seen.update(m.kind for m in out.trace)
    assert set(seen) == set(MoveKind)
