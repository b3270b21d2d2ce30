"""Exact arithmetic on finite-type, locally orientable 2-orbifolds.

A base orbifold is stored by its combinatorial type only: orientability,
genus (handles, or crosscaps when nonorientable), compact boundary circles,
ends (punctures), and the multiset of cone orders.  Boundary circles carry no
identity at this level; gluing slots are tracked by the pieces that sit on
top of a base.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction


class OrbifoldError(ValueError):
    pass


@dataclass(frozen=True)
class BaseOrbifold:
    orientable: bool = True
    genus: int = 0
    boundary_count: int = 0
    end_count: int = 0
    cone_orders: tuple[int, ...] = field(default=())

    def __post_init__(self):
        for name in ("genus", "boundary_count", "end_count"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                raise OrbifoldError(f"{name} must be a nonnegative integer, got {value!r}")
        if not self.orientable and self.genus < 1:
            raise OrbifoldError("a nonorientable surface needs at least one crosscap")
        cones = tuple(sorted(int(q) for q in self.cone_orders))
        if any(q < 2 for q in cones):
            raise OrbifoldError(f"cone orders must be >= 2, got {cones}")
        object.__setattr__(self, "cone_orders", cones)

    @property
    def is_closed(self) -> bool:
        return self.boundary_count == 0 and self.end_count == 0

    @property
    def crosscaps(self) -> int:
        """Genus measured in crosscaps (one handle counts as two)."""
        return self.genus if not self.orientable else 2 * self.genus

    def surface_euler_char(self) -> int:
        holes = self.boundary_count + self.end_count
        if self.orientable:
            return 2 - 2 * self.genus - holes
        return 2 - self.genus - holes

    def describe(self) -> str:
        kind = "orientable" if self.orientable else "nonorientable"
        cones = ",".join(map(str, self.cone_orders)) or "none"
        return (f"{kind} genus={self.genus} boundary={self.boundary_count} "
                f"ends={self.end_count} cones={cones}")


def disk(*cones: int) -> BaseOrbifold:
    return BaseOrbifold(True, 0, 1, 0, cones)


def annulus(*cones: int) -> BaseOrbifold:
    return BaseOrbifold(True, 0, 2, 0, cones)


def moebius_band() -> BaseOrbifold:
    return BaseOrbifold(False, 1, 1, 0)


def euler_char_compactified(o: BaseOrbifold) -> Fraction:
    """Orbifold Euler characteristic of the compactification.

    Ends are counted as boundary circles of the compactified surface, and each
    cone point of order q subtracts 1 - 1/q.
    """
    chi = Fraction(o.surface_euler_char())
    for q in o.cone_orders:
        chi -= 1 - Fraction(1, q)
    return chi


class ThinBaseKind(Enum):
    DISK_LEQ_ONE_CONE = "DiskLeqOneCone"
    PLANE_LEQ_ONE_CONE = "PlaneLeqOneCone"
    DISK_TWO_CONES_2 = "DiskTwoCones2"
    PLANE_TWO_CONES_2 = "PlaneTwoCones2"
    MOEBIUS = "Moebius"
    OPEN_MOEBIUS = "OpenMoebius"
    FINITE_ANNULUS = "FiniteAnnulus"
    HALF_INFINITE_ANNULUS = "HalfInfiniteAnnulus"
    BI_INFINITE_ANNULUS = "BiInfiniteAnnulus"
    NOT_THIN = "NotThin"

    def __str__(self):
        return self.value


def classify_base(o: BaseOrbifold) -> ThinBaseKind:
    """Sort a nonclosed base into one of the nine thin kinds, or NOT_THIN."""
    if o.is_closed:
        raise OrbifoldError("thinness is only defined for nonclosed bases")
    b, e, cones = o.boundary_count, o.end_count, o.cone_orders
    if o.orientable and o.genus == 0:
        if b + e == 1:
            if len(cones) <= 1:
                return (ThinBaseKind.DISK_LEQ_ONE_CONE if b
                        else ThinBaseKind.PLANE_LEQ_ONE_CONE)
            if cones == (2, 2):
                return (ThinBaseKind.DISK_TWO_CONES_2 if b
                        else ThinBaseKind.PLANE_TWO_CONES_2)
        elif b + e == 2 and not cones:
            return {
                2: ThinBaseKind.FINITE_ANNULUS,
                1: ThinBaseKind.HALF_INFINITE_ANNULUS,
                0: ThinBaseKind.BI_INFINITE_ANNULUS,
            }[b]
    elif not o.orientable and o.genus == 1 and b + e == 1 and not cones:
        return ThinBaseKind.MOEBIUS if b else ThinBaseKind.OPEN_MOEBIUS
    return ThinBaseKind.NOT_THIN


def _check_slot(o: BaseOrbifold, slot: int) -> None:
    if not 0 <= slot < o.boundary_count:
        raise OrbifoldError(
            f"boundary slot {slot} out of range for {o.boundary_count} boundary circles")


def cap_with_cone(o: BaseOrbifold, slot: int, alpha: int) -> BaseOrbifold:
    """Fill one boundary circle with a disk carrying a cone point of order alpha.

    alpha == 1 caps with a plain disk.
    """
    _check_slot(o, slot)
    if alpha < 1:
        raise OrbifoldError(f"cone parameter must be >= 1, got {alpha}")
    cones = o.cone_orders + ((alpha,) if alpha >= 2 else ())
    return replace(o, boundary_count=o.boundary_count - 1, cone_orders=cones)


def boundary_to_end(o: BaseOrbifold, slot: int) -> BaseOrbifold:
    _check_slot(o, slot)
    return replace(o, boundary_count=o.boundary_count - 1, end_count=o.end_count + 1)


def merge_bases(o1: BaseOrbifold, slot1: int, o2: BaseOrbifold, slot2: int,
                base_reversing: bool = False) -> BaseOrbifold:
    """Glue two distinct bases along one boundary circle each.

    Gluing two different surfaces along a circle cannot create a one-sided
    loop, so base_reversing does not affect the result here; it only matters
    for self_merge.  Graph-level callers account for it by re-orienting the
    absorbed piece.
    """
    _check_slot(o1, slot1)
    _check_slot(o2, slot2)
    if o1.orientable and o2.orientable:
        orientable, genus = True, o1.genus + o2.genus
    else:
        orientable, genus = False, o1.crosscaps + o2.crosscaps
    return BaseOrbifold(
        orientable, genus,
        o1.boundary_count + o2.boundary_count - 2,
        o1.end_count + o2.end_count,
        o1.cone_orders + o2.cone_orders,
    )


def self_merge(o: BaseOrbifold, slot_a: int, slot_b: int,
               base_reversing: bool = False) -> BaseOrbifold:
    """Glue two boundary circles of the same base to each other.

    Without reversal an orientable base gains a handle; with reversal (or on a
    nonorientable base) the result gains two crosscaps.
    """
    _check_slot(o, slot_a)
    _check_slot(o, slot_b)
    if slot_a == slot_b:
        raise OrbifoldError("cannot glue a boundary circle to itself")
    if o.orientable and not base_reversing:
        orientable, genus = True, o.genus + 1
    else:
        orientable, genus = False, o.crosscaps + 2
    return replace(o, orientable=orientable, genus=genus,
                   boundary_count=o.boundary_count - 2)
