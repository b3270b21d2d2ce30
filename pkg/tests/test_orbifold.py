from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from graphmfd.orbifold import (
    BaseOrbifold,
    OrbifoldError,
    ThinBaseKind,
    annulus,
    boundary_to_end,
    cap_with_cone,
    classify_base,
    disk,
    euler_char_compactified,
    merge_bases,
    moebius_band,
    self_merge,
)

from oracles import chi_by_formula

bases = st.builds(
    lambda orientable, genus, b, e, cones: BaseOrbifold(
        orientable, genus if orientable else genus + 1, b, e, tuple(cones)),
    st.booleans(), st.integers(0, 3), st.integers(0, 4), st.integers(0, 3),
    st.lists(st.integers(2, 9), max_size=4),
)


@pytest.mark.parametrize("base, chi", [
    (disk(), 1),
    (BaseOrbifold(True, 0, 0, 1, (2, 2)), 0),
    (BaseOrbifold(True, 2), -2),
    (disk(2, 3, 7), Fraction(-43, 42)),
    (moebius_band(), 0),
])
def test_euler_characteristic_examples(base, chi):
    assert euler_char_compactified(base) == chi


@given(bases)
def test_euler_characteristic_matches_formula(o):
    assert euler_char_compactified(o) == chi_by_formula(
        o.orientable, o.genus, o.boundary_count, o.end_count, o.cone_orders)


def test_cone_orders_are_sorted_and_validated():
    assert BaseOrbifold(True, 0, 1, 0, (7, 2, 3)).cone_orders == (2, 3, 7)
    with pytest.raises(OrbifoldError):
        BaseOrbifold(True, 0, 1, 0, (1,))
    with pytest.raises(OrbifoldError):
        BaseOrbifold(False, 0)
    with pytest.raises(OrbifoldError):
        BaseOrbifold(True, -1)


@pytest.mark.parametrize("base, kind", [
    (annulus(), ThinBaseKind.FINITE_ANNULUS),
    (moebius_band(), ThinBaseKind.MOEBIUS),
    (BaseOrbifold(True, 1, 1), ThinBaseKind.NOT_THIN),
    (BaseOrbifold(True, 0, 0, 1, (2, 2)), ThinBaseKind.PLANE_TWO_CONES_2),
    (disk(5), ThinBaseKind.DISK_LEQ_ONE_CONE),
    (disk(2, 3), ThinBaseKind.NOT_THIN),
    (BaseOrbifold(True, 0, 1, 1), ThinBaseKind.HALF_INFINITE_ANNULUS),
    (BaseOrbifold(True, 0, 0, 2), ThinBaseKind.BI_INFINITE_ANNULUS),
    (BaseOrbifold(False, 1, 0, 1), ThinBaseKind.OPEN_MOEBIUS),
])
def test_classify_base_examples(base, kind):
    assert classify_base(base) is kind


def test_classify_base_rejects_closed():
    with pytest.raises(OrbifoldError):
        classify_base(BaseOrbifold(True, 0, 0, 0, (2, 3, 5)))


def test_cap_with_cone():
    assert cap_with_cone(annulus(), 0, 1) == disk()
    capped = cap_with_cone(annulus(), 0, 3)
    assert capped == disk(3)
    assert euler_char_compactified(capped) == euler_char_compactified(annulus()) + Fraction(1, 3)
    assert cap_with_cone(disk(), 0, 1).is_closed
    with pytest.raises(OrbifoldError):
        cap_with_cone(disk(), 1, 2)
    with pytest.raises(OrbifoldError):
        cap_with_cone(disk(), 0, 0)


def test_boundary_to_end():
    assert classify_base(boundary_to_end(annulus(), 0)) is ThinBaseKind.HALF_INFINITE_ANNULUS
    assert classify_base(boundary_to_end(disk(), 0)) is ThinBaseKind.PLANE_LEQ_ONE_CONE
    assert classify_base(boundary_to_end(moebius_band(), 0)) is ThinBaseKind.OPEN_MOEBIUS


def test_merge_examples():
    sphere = merge_bases(disk(), 0, disk(), 0)
    assert sphere == BaseOrbifold(True, 0, 0, 0)
    assert euler_char_compactified(sphere) == 2
    assert merge_bases(annulus(), 0, annulus(), 0) == annulus()
    assert self_merge(annulus(), 0, 1) == BaseOrbifold(True, 1, 0, 0)
    assert self_merge(annulus(), 0, 1, base_reversing=True) == BaseOrbifold(False, 2, 0, 0)
    pants = BaseOrbifold(True, 0, 3)
    assert merge_bases(pants, 0, pants, 2) == BaseOrbifold(True, 0, 4)
    assert self_merge(pants, 0, 1) == BaseOrbifold(True, 1, 1)


def test_merge_with_nonorientable_counts_crosscaps():
    torus_with_hole = BaseOrbifold(True, 1, 1)
    assert merge_bases(torus_with_hole, 0, moebius_band(), 0) == BaseOrbifold(False, 3, 0)


@given(bases, bases, st.booleans())
def test_merge_conserves_euler_characteristic(o1, o2, rev):
    if not (o1.boundary_count and o2.boundary_count):
        return
    merged = merge_bases(o1, 0, o2, o2.boundary_count - 1, rev)
    assert euler_char_compactified(merged) == \
        euler_char_compactified(o1) + euler_char_compactified(o2)
    assert merged.end_count == o1.end_count + o2.end_count


@given(bases, st.booleans())
def test_self_merge_conserves_euler_characteristic(o, rev):
    if o.boundary_count < 2:
        return
    merged = self_merge(o, 0, 1, rev)
    assert euler_char_compactified(merged) == euler_char_compactified(o)
    assert merged.orientable == (o.orientable and not rev)
