"""
Thin and thick pieces
=====================

A Seifert piece is thin when its fundamental group is virtually abelian.  That
depends only on the base orbifold: there are nine thin nonclosed bases, and
everything else has negative orbifold Euler characteristic.
"""
import itertools

from graphmfd.orbifold import BaseOrbifold, ThinBaseKind, classify_base, euler_char_compactified
from graphmfd.seifert import FiberedPiece, ThinType, classify_piece

# walk through the small bases and sort them
thin = {}
for orientable, genus in [(True, 0), (True, 1), (False, 1)]:
    for b, e in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]:
        for cones in [(), (3,), (2, 2), (2, 3)]:
            o = BaseOrbifold(orientable, genus, b, e, cones)
            kind = classify_base(o)
            if kind is not ThinBaseKind.NOT_THIN:
                thin.setdefault(kind, o)

for kind, o in thin.items():
    print(f"{kind.value:20s} {o.describe():55s} chi = {euler_char_compactified(o)}")

# the piece types they give (a disk with one cone is a solid torus and must be
# entered as a SolidTorusPiece, so it is skipped here)
print()
for kind, o in thin.items():
    piece = FiberedPiece(o)
    if not piece.is_ambiguous_solid_torus:
        print(f"{kind.value:20s} -> {classify_piece(piece)}")

# a thick example: the (2,3,7) disk
o = BaseOrbifold(True, 0, 1, 0, (2, 3, 7))
print()
print(o.describe(), "->", classify_base(o), "chi =", euler_char_compactified(o))
assert classify_piece(FiberedPiece(o)) is ThinType.THICK
