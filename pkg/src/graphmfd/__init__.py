"""Graph structures on 3-manifolds: Seifert pieces glued along tori.

The library models a graph structure as a decorated graph, reduces it to one
whose tori are incompressible and whose pieces are maximal, and computes a
canonical signature so that reductions under different move orders can be
compared.
"""
from .canon import Isomorphism, Signature, find_isomorphism, isomorphic, signature
from .generate import gen
from .graph import (
    GraphStructure,
    PeriodicRay,
    TorusEdge,
    dual_subgraph_t2xi,
    ends,
    piece_chi_sum,
    validate,
)
from .gsf import ParseError, load, parse, serialize
from .orbifold import (
    BaseOrbifold,
    OrbifoldError,
    ThinBaseKind,
    classify_base,
    euler_char_compactified,
)
from .reduce import (
    Diagnosis,
    DiagnosisKind,
    InvalidStructure,
    Move,
    MoveKind,
    Policy,
    ReductionOutcome,
    UnsupportedStructure,
    is_reduced,
    reduce,
    stage_a_absorb_solid_tori,
    stage_b_collapse_t2xi,
    stage_c_collapse_rays,
    stage_d_resolve_k2xi,
    stage_e_merge_matching,
)
from .seifert import (
    FiberedPiece,
    K2IPiece,
    Mat2,
    PieceError,
    SolidTorusPiece,
    ThinType,
    classify_piece,
    extend_over_solid_torus,
    fiber_intersection,
    fibrations_match,
)

__version__ = "0.1.0"
