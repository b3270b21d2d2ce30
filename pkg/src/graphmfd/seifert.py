"""Pieces of a graph structure and their fibration-level semantics.

Every boundary torus of a piece carries integer coordinates (section, fiber);
on a fibered piece the fiber class is (0, 1).  A gluing matrix maps the
coordinates on one side of a torus to the coordinates on the other side and
always has determinant -1, since gluings of oriented pieces reverse the
boundary orientation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from math import gcd
from typing import NamedTuple, Union

from .orbifold import (
    BaseOrbifold,
    ThinBaseKind,
    cap_with_cone,
    classify_base,
    merge_bases,
    self_merge,
)


class Mat2(NamedTuple):
    """Integer 2x2 matrix [[a, b], [c, d]] acting on column vectors."""

    a: int
    b: int
    c: int
    d: int

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other):
        if isinstance(other, Mat2):
            return Mat2(self.a * other.a + self.b * other.c,
                        self.a * other.b + self.b * other.d,
                        self.c * other.a + self.d * other.c,
                        self.c * other.b + self.d * other.d)
        x, y = other
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def inverse(self) -> Mat2:
        det = self.det
        if det not in (1, -1):
            raise ValueError(f"matrix {tuple(self)} is not invertible over the integers")
        return Mat2(self.d * det, -self.b * det, -self.c * det, self.a * det)

    def __str__(self):
        return ",".join(map(str, self))


IDENTITY = Mat2(1, 0, 0, 1)
# Coordinate transport across a T^2 x I piece, from either boundary torus to
# the other.  Fixes the section, reverses the fiber; an involution.
T2XI_TRANSPORT = Mat2(1, 0, 0, -1)

FIBER = (0, 1)
SECTION = (1, 0)


def wedge(u, v) -> int:
    """Algebraic intersection number of two slopes on a torus."""
    return u[0] * v[1] - u[1] * v[0]


def is_primitive(v) -> bool:
    return gcd(abs(v[0]), abs(v[1])) == 1


def fibrations_match(matrix: Mat2, fiber_a=FIBER, fiber_b=FIBER) -> bool:
    image = matrix @ fiber_a
    return image == tuple(fiber_b) or image == (-fiber_b[0], -fiber_b[1])


def fiber_intersection(matrix: Mat2) -> int:
    return abs(wedge(matrix @ FIBER, FIBER))


class ThinType(Enum):
    SOLID_TORUS = "SolidTorus"
    T2XI = "T2xI"
    K2XI = "K2xI"
    S1XR2 = "S1xR2"
    T2XR = "T2xR"
    K2XR = "K2xR"
    T2XR_PLUS = "T2xRPlus"
    THICK = "Thick"
    # Not part of the thin/thick dichotomy: a piece with no boundary and no ends.
    CLOSED = "Closed"

    def __str__(self):
        return self.value


_THIN_TYPE_OF_BASE = {
    ThinBaseKind.DISK_LEQ_ONE_CONE: ThinType.SOLID_TORUS,
    ThinBaseKind.FINITE_ANNULUS: ThinType.T2XI,
    ThinBaseKind.PLANE_LEQ_ONE_CONE: ThinType.S1XR2,
    ThinBaseKind.BI_INFINITE_ANNULUS: ThinType.T2XR,
    ThinBaseKind.PLANE_TWO_CONES_2: ThinType.K2XR,
    ThinBaseKind.OPEN_MOEBIUS: ThinType.K2XR,
    ThinBaseKind.HALF_INFINITE_ANNULUS: ThinType.T2XR_PLUS,
    ThinBaseKind.MOEBIUS: ThinType.K2XI,
    ThinBaseKind.DISK_TWO_CONES_2: ThinType.K2XI,
    ThinBaseKind.NOT_THIN: ThinType.THICK,
}


class PieceError(ValueError):
    pass


def _default_slots(n):
    return tuple(range(n))


@dataclass(frozen=True)
class FiberedPiece:
    """A Seifert fibered piece over a base orbifold.

    ``slots`` names the boundary tori in order; by default 0..b-1.
    """

    base: BaseOrbifold
    slots: tuple = None

    def __post_init__(self):
        slots = self.slots
        if slots is None:
            slots = _default_slots(self.base.boundary_count)
        slots = tuple(slots)
        if len(slots) != self.base.boundary_count:
            raise PieceError(
                f"{len(slots)} slot names for {self.base.boundary_count} boundary circles")
        if len(set(slots)) != len(slots):
            raise PieceError(f"duplicate slot names {slots}")
        object.__setattr__(self, "slots", slots)

    def slot_index(self, slot) -> int:
        try:
            return self.slots.index(slot)
        except ValueError:
            raise PieceError(f"no boundary slot {slot!r}") from None

    @property
    def is_ambiguous_solid_torus(self) -> bool:
        """Disk or plane with at most one cone point: the meridian is not recorded."""
        b = self.base
        return (b.orientable and b.genus == 0 and b.boundary_count + b.end_count == 1
                and len(b.cone_orders) <= 1)


@dataclass(frozen=True)
class SolidTorusPiece:
    meridian: tuple[int, int]
    slots: tuple = (0,)

    def __post_init__(self):
        m = tuple(int(x) for x in self.meridian)
        if len(m) != 2 or not is_primitive(m):
            raise PieceError(f"meridian {self.meridian} is not a primitive integer pair")
        object.__setattr__(self, "meridian", m)
        if len(tuple(self.slots)) != 1:
            raise PieceError("a solid torus has exactly one boundary slot")
        object.__setattr__(self, "slots", tuple(self.slots))


@dataclass(frozen=True)
class K2IPiece:
    """Twisted I-bundle over the Klein bottle.

    In its boundary basis the fibration over the Moebius band has fiber (0, 1)
    and the fibration over the disk with two order-2 cone points has fiber
    (1, 0).  ``fibration`` records an explicit choice ("F1"/"F2") once made.
    """

    fibration: str | None = None
    slots: tuple = field(default=(0,))

    def __post_init__(self):
        if self.fibration not in (None, "F1", "F2"):
            raise PieceError(f"unknown fibration {self.fibration!r}")
        if len(tuple(self.slots)) != 1:
            raise PieceError("a K2xI piece has exactly one boundary slot")
        object.__setattr__(self, "slots", tuple(self.slots))


Piece = Union[FiberedPiece, SolidTorusPiece, K2IPiece]

K2XI_FIBERS = {"F1": FIBER, "F2": SECTION}


def classify_piece(piece: Piece) -> ThinType:
    if isinstance(piece, SolidTorusPiece):
        return ThinType.SOLID_TORUS
    if isinstance(piece, K2IPiece):
        return ThinType.K2XI
    if piece.is_ambiguous_solid_torus:
        raise PieceError(
            "ambiguous solid torus encoding: a fibered piece over a disk or plane with "
            "at most one cone point must be given as a solid torus with a meridian")
    if piece.base.is_closed:
        return ThinType.CLOSED
    return _THIN_TYPE_OF_BASE[classify_base(piece.base)]


def filling_multiplicity(matrix: Mat2, meridian) -> int:
    """Multiplicity of the core of a solid torus glued onto a fibered slot.

    ``matrix`` maps the fibered side's coordinates to the solid torus basis.
    Zero means the fiber bounds a meridian disk.
    """
    m = matrix.inverse() @ meridian
    return abs(m[0])


def extend_over_solid_torus(piece: FiberedPiece, slot, v: SolidTorusPiece,
                            matrix: Mat2) -> FiberedPiece | None:
    """Extend the fibration of ``piece`` over a solid torus glued at ``slot``.

    Returns None when the fiber bounds a meridian disk of ``v``.
    """
    alpha = filling_multiplicity(matrix, v.meridian)
    if alpha == 0:
        return None
    i = piece.slot_index(slot)
    return FiberedPiece(cap_with_cone(piece.base, i, alpha),
                        piece.slots[:i] + piece.slots[i + 1:])


def merge_across(a: FiberedPiece, slot_a, b: FiberedPiece, slot_b, matrix: Mat2,
                 base_reversing: bool = False) -> FiberedPiece:
    """Remove a torus with matching fibrations between two distinct pieces.

    Remaining slots keep their names (a's first, then b's); the two pieces
    must therefore use disjoint slot names.
    """
    if not fibrations_match(matrix):
        raise PieceError(f"fibrations do not match across matrix {tuple(matrix)}")
    i, j = a.slot_index(slot_a), b.slot_index(slot_b)
    slots = a.slots[:i] + a.slots[i + 1:] + b.slots[:j] + b.slots[j + 1:]
    return FiberedPiece(merge_bases(a.base, i, b.base, j, base_reversing), slots)


def merge_loop(piece: FiberedPiece, slot_a, slot_b, matrix: Mat2,
               base_reversing: bool = False) -> FiberedPiece:
    """Remove a torus with matching fibrations whose two sides lie on one piece."""
    if not fibrations_match(matrix):
        raise PieceError(f"fibrations do not match across matrix {tuple(matrix)}")
    i, j = piece.slot_index(slot_a), piece.slot_index(slot_b)
    slots = tuple(s for s in piece.slots if s not in (slot_a, slot_b))
    return FiberedPiece(self_merge(piece.base, i, j, base_reversing), slots)
