from fractions import Fraction

import pytest

from graphmfd.graph import GraphStructure, PeriodicRay, TorusEdge, validate
from graphmfd.orbifold import BaseOrbifold, annulus, disk, moebius_band
from graphmfd.reduce import (
    Diagnosis,
    DiagnosisKind,
    InvalidStructure,
    MoveKind,
    Policy,
    is_reduced,
    reduce,
    stage_a_absorb_solid_tori,
    stage_b_collapse_t2xi,
    stage_c_collapse_rays,
    stage_d_resolve_k2xi,
    stage_e_merge_matching,
)
from graphmfd.seifert import FiberedPiece, K2IPiece, Mat2, SolidTorusPiece

FLIP = Mat2(1, 0, 0, -1)
SWAP = Mat2(0, 1, 1, 0)


def thick(b=1, ends=0, cones=(2, 3, 7)):
    return FiberedPiece(BaseOrbifold(True, 0, b, ends, cones))


def t2xi():
    return FiberedPiece(annulus())


def bases(g):
    return sorted((p.base for p in g.pieces.values()), key=repr)


def kinds(trace):
    return [m.kind for m in trace]


# stage A ---------------------------------------------------------------

def test_absorb_plain_disk():
    g = GraphStructure.build({"X": thick(), "V": SolidTorusPiece((1, 0))},
                             [TorusEdge("e", ("X", 0), ("V", 0), FLIP)])
    trace = []
    out = stage_a_absorb_solid_tori(g, trace=trace)
    assert bases(out) == [BaseOrbifold(True, 0, 0, 0, (2, 3, 7))]
    assert kinds(trace) == [MoveKind.ABSORB_SOLID_TORUS]
    assert trace[0].alpha == 1


def test_absorb_adds_cone_for_multiplicity():
    g = GraphStructure.build({"X": thick(2), "V": SolidTorusPiece((3, 1)),
                              "Y": thick()},
                             [TorusEdge("e", ("X", 0), ("V", 0), FLIP),
                              TorusEdge("f", ("X", 1), ("Y", 0), SWAP)])
    out = stage_a_absorb_solid_tori(g)
    assert out.pieces["X"].base.cone_orders == (2, 3, 3, 7)


def test_absorb_through_t2xi_chain():
    # the meridian is carried across the T^2 x I by the transport matrix
    g = GraphStructure.build({"X": thick(), "T": t2xi(), "V": SolidTorusPiece((2, 1))},
                             [TorusEdge("e1", ("X", 0), ("T", 0), FLIP),
                              TorusEdge("e2", ("T", 1), ("V", 0), FLIP)])
    out = reduce(g)
    assert out.ok
    assert bases(out.reduced) == [BaseOrbifold(True, 0, 0, 0, (2, 2, 3, 7))]


def test_two_solid_tori():
    g = GraphStructure.build({"V1": SolidTorusPiece((1, 0)), "V2": SolidTorusPiece((1, 0))},
                             [TorusEdge("e", ("V1", 0), ("V2", 0), SWAP)])
    d = stage_a_absorb_solid_tori(g)
    assert isinstance(d, Diagnosis) and d.kind is DiagnosisKind.CLOSED_SEIFERT
    g2 = GraphStructure.build({"V1": SolidTorusPiece((1, 0)), "V2": SolidTorusPiece((1, 0))},
                              [TorusEdge("e", ("V1", 0), ("V2", 0), FLIP)])
    assert stage_a_absorb_solid_tori(g2).kind is DiagnosisKind.REDUCIBLE_WITNESS


def test_no_solid_tori_is_fixpoint():
    g = GraphStructure.build({"X": thick(), "Y": thick()},
                             [TorusEdge("e", ("X", 0), ("Y", 0), SWAP)])
    trace = []
    assert stage_a_absorb_solid_tori(g, trace=trace) == g
    assert trace == []


def test_meridian_along_fiber_of_half_infinite_annulus():
    g = GraphStructure.build({"P": FiberedPiece(BaseOrbifold(True, 0, 1, 1)),
                              "V": SolidTorusPiece((0, 1))},
                             [TorusEdge("e", ("P", 0), ("V", 0), FLIP)])
    out = reduce(g)
    assert not out.ok
    assert out.diagnosis.kind is DiagnosisKind.S1XR2_LIKE


def test_meridian_along_fiber_of_thick_piece_is_reducible():
    g = GraphStructure.build({"X": thick(), "V": SolidTorusPiece((0, 1))},
                             [TorusEdge("e", ("X", 0), ("V", 0), FLIP)])
    assert reduce(g).diagnosis.kind is DiagnosisKind.REDUCIBLE_WITNESS


# stage B ---------------------------------------------------------------

def test_chain_collapses_to_composite():
    m1, m2 = SWAP, Mat2(2, 1, 1, 0)
    g = GraphStructure.build({"X": thick(), "T": t2xi(), "Y": thick()},
                             [TorusEdge("e1", ("X", 0), ("T", 0), m1),
                              TorusEdge("e2", ("T", 1), ("Y", 0), m2)])
    out = stage_b_collapse_t2xi(g)
    (e,) = out.edges.values()
    assert e.matrix == m2 @ Mat2(1, 0, 0, -1) @ m1
    assert e.matrix.det == -1
    assert set(out.pieces) == {"X", "Y"}


def test_t2xi_on_two_slots_of_one_piece_becomes_loop():
    g = GraphStructure.build({"X": thick(2), "T": t2xi()},
                             [TorusEdge("e1", ("X", 0), ("T", 0), SWAP),
                              TorusEdge("e2", ("T", 1), ("X", 1), SWAP)])
    out = stage_b_collapse_t2xi(g)
    (e,) = out.edges.values()
    assert e.is_loop and set(out.pieces) == {"X"}


@pytest.mark.parametrize("second, kind", [
    (FLIP, DiagnosisKind.CLOSED_NON_SEIFERT),  # monodromy trace 3
    (SWAP, DiagnosisKind.CLOSED_SEIFERT),
])
def test_t2xi_cycle(second, kind):
    g = GraphStructure.build({"T1": t2xi(), "T2": t2xi()},
                             [TorusEdge("e1", ("T1", 1), ("T2", 0), Mat2(2, 1, -1, -1)),
                              TorusEdge("e2", ("T2", 1), ("T1", 0), second)])
    assert stage_b_collapse_t2xi(g).kind is kind


# stage C ---------------------------------------------------------------

def test_product_ray_becomes_end():
    ray = PeriodicRay("r", ("X", 0), ((t2xi(), FLIP),))
    g = GraphStructure.build({"X": thick()}, [], [ray])
    out = stage_c_collapse_rays(g)
    assert bases(out) == [BaseOrbifold(True, 0, 0, 1, (2, 3, 7))]
    assert out.rays == {}


def test_half_infinite_annulus_becomes_end():
    g = GraphStructure.build({"X": thick(2), "P": FiberedPiece(BaseOrbifold(True, 0, 1, 1)),
                              "Y": thick()},
                             [TorusEdge("e", ("X", 0), ("P", 0), SWAP),
                              TorusEdge("f", ("X", 1), ("Y", 0), SWAP)])
    out = stage_c_collapse_rays(g)
    assert out.pieces["X"].base == BaseOrbifold(True, 0, 1, 1, (2, 3, 7))


def test_no_rays_is_fixpoint():
    g = GraphStructure.build({"X": thick(0, 1)})
    assert stage_c_collapse_rays(g) == g


def test_two_half_lines_make_t2xr():
    g = GraphStructure.build({"P": FiberedPiece(BaseOrbifold(True, 0, 1, 1)),
                              "Q": FiberedPiece(BaseOrbifold(True, 0, 1, 1))},
                             [TorusEdge("e", ("P", 0), ("Q", 0), SWAP)])
    out = reduce(g)
    assert out.ok and bases(out.reduced) == [BaseOrbifold(True, 0, 0, 2)]


# stage D ---------------------------------------------------------------

@pytest.mark.parametrize("matrix, expected", [
    (Mat2(1, 0, 3, -1), BaseOrbifold(False, 1, 0, 0, (2, 3, 7))),   # F1
    (Mat2(0, 1, 1, 0), BaseOrbifold(True, 0, 0, 0, (2, 2, 2, 3, 7))),  # F2
])
def test_k2xi_merges_with_matching_fibration(matrix, expected):
    g = GraphStructure.build({"X": thick(), "K": K2IPiece()},
                             [TorusEdge("e", ("X", 0), ("K", 0), matrix)])
    trace = []
    out = stage_d_resolve_k2xi(g, trace=trace)
    assert bases(out) == [expected]
    assert kinds(trace) == [MoveKind.RESOLVE_K2XI]


def test_k2xi_without_match_is_decorated():
    # the fiber of X goes to (1, 2), which is neither K2xI fiber
    g = GraphStructure.build({"X": thick(), "K": K2IPiece()},
                             [TorusEdge("e", ("X", 0), ("K", 0), Mat2(0, 1, 1, 2))])
    out = stage_d_resolve_k2xi(g)
    assert out.pieces["K"] == K2IPiece("F1")
    assert len(out.edges) == 1


def test_fibered_k2xi_is_normalised():
    g = GraphStructure.build({"X": thick(), "K": FiberedPiece(moebius_band())},
                             [TorusEdge("e", ("X", 0), ("K", 0), FLIP)])
    out = reduce(g)
    assert bases(out.reduced) == [BaseOrbifold(False, 1, 0, 0, (2, 3, 7))]
    g2 = GraphStructure.build({"X": thick(), "K": FiberedPiece(disk(2, 2))},
                              [TorusEdge("e", ("X", 0), ("K", 0), FLIP)])
    assert bases(reduce(g2).reduced) == [BaseOrbifold(True, 0, 0, 0, (2, 2, 2, 3, 7))]


# stage E ---------------------------------------------------------------

def test_matching_edge_merges_pieces():
    pants = thick(3, cones=())
    g = GraphStructure.build({"X": pants, "Y": pants},
                             [TorusEdge("e", ("X", 0), ("Y", 0), FLIP),
                              TorusEdge("f", ("X", 1), ("Y", 1), SWAP),
                              TorusEdge("h", ("X", 2), ("Y", 2), SWAP)])
    out = stage_e_merge_matching(g)
    assert len(out.pieces) == 1
    (p,) = out.pieces.values()
    assert p.base == BaseOrbifold(True, 0, 4)
    assert all(e.is_loop for e in out.edges.values())


def test_matching_loop_adds_handle():
    g = GraphStructure.build({"X": thick(3, cones=()), "Y": thick()},
                             [TorusEdge("e", ("X", 0), ("X", 1), FLIP),
                              TorusEdge("f", ("X", 2), ("Y", 0), SWAP)])
    out = stage_e_merge_matching(g)
    assert out.pieces["X"].base == BaseOrbifold(True, 1, 1)


def test_reversing_loop_adds_crosscaps():
    g = GraphStructure.build({"X": thick(3, cones=()), "Y": thick()},
                             [TorusEdge("e", ("X", 0), ("X", 1), FLIP, True),
                              TorusEdge("f", ("X", 2), ("Y", 0), SWAP)])
    assert stage_e_merge_matching(g).pieces["X"].base == BaseOrbifold(False, 2, 1)


def test_nonmatching_is_fixpoint():
    g = GraphStructure.build({"X": thick(), "Y": thick()},
                             [TorusEdge("e", ("X", 0), ("Y", 0), SWAP)])
    assert stage_e_merge_matching(g) == g


# pipeline --------------------------------------------------------------

def test_single_piece_has_empty_trace():
    g = GraphStructure.build({"X": FiberedPiece(BaseOrbifold(True, 2))})
    out = reduce(g)
    assert out.ok and out.trace == [] and out.reduced == g


def test_chain_with_matching_ends_merges_completely():
    g = GraphStructure.build({"X": thick(), "T": t2xi(), "Y": thick()},
                             [TorusEdge("e1", ("X", 0), ("T", 0), FLIP),
                              TorusEdge("e2", ("T", 1), ("Y", 0), FLIP)])
    out = reduce(g)
    assert kinds(out.trace) == [MoveKind.MERGE_T2XI_CHAIN, MoveKind.MERGE_MATCHING_TORUS]
    assert bases(out.reduced) == [BaseOrbifold(True, 0, 0, 0, (2, 2, 3, 3, 7, 7))]


def test_invalid_input_raises():
    g = GraphStructure.build({"X": thick(2)})
    with pytest.raises(InvalidStructure):
        reduce(g)


def test_policies_are_reproducible():
    assert Policy(3).order(range(10)) == Policy(3).order(range(10))
    assert Policy().order(["b", "a", "c"]) == ["a", "b", "c"]


def test_is_reduced():
    good = GraphStructure.build({"X": thick(), "Y": thick()},
                                [TorusEdge("e", ("X", 0), ("Y", 0), SWAP)])
    assert is_reduced(good)
    matching = GraphStructure.build({"X": thick(), "Y": thick()},
                                    [TorusEdge("e", ("X", 0), ("Y", 0), FLIP)])
    assert not is_reduced(matching)
    solid = GraphStructure.build({"X": thick(), "V": SolidTorusPiece((1, 0))},
                                 [TorusEdge("e", ("X", 0), ("V", 0), FLIP)])
    assert not is_reduced(solid)
    k2 = GraphStructure.build({"X": thick(), "K": K2IPiece()},
                              [TorusEdge("e", ("X", 0), ("K", 0), SWAP)])
    assert not is_reduced(k2)
    assert is_reduced(reduce(k2).reduced)


def test_trace_lines():
    g = GraphStructure.build({"X": thick(), "V": SolidTorusPiece((1, 0))},
                             [TorusEdge("e", ("X", 0), ("V", 0), FLIP)])
    (move,) = reduce(g).trace
    assert str(move) == "MOVE AbsorbSolidTorus affected=V,X result=X"


def test_observer_sees_every_move():
    seen = []
    g = GraphStructure.build({"X": thick(), "T": t2xi(), "V": SolidTorusPiece((3, 1))},
                             [TorusEdge("e1", ("X", 0), ("T", 0), FLIP),
                              TorusEdge("e2", ("T", 1), ("V", 0), FLIP)])
    out = reduce(g, observer=lambda move, state: seen.append(
        (move.kind, validate(state.to_graph()))))
    assert [k for k, _ in seen] == kinds(out.trace)
    assert all(problems == [] for _, problems in seen)
