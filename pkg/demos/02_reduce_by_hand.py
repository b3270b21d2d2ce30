"""
Reducing a small graph structure
================================

A thick piece carries a solid torus behind a T^2 x I, a K^2 x~ I leaf and a
product ray.  Each of these disappears in the reduction: the solid torus is
absorbed as an exceptional fiber, the ray becomes an end, and the K^2 x~ I is
merged through the fibration that matches.
"""
from graphmfd import gsf, reduce, signature

text = """
piece X orientable genus=0 boundary=3 ends=0 cones=3
piece T orientable genus=0 boundary=2 ends=0 cones=none
solidtorus V meridian=2,1
k2xi K
edge e1 X:0 T:0 matrix=1,0,0,-1
edge e2 T:1 V:0 matrix=1,0,0,-1
edge e3 X:1 K:0 matrix=1,0,1,-1
ray r attach=X:2 period=1
  piece orientable genus=0 boundary=2 ends=0 cones=none matrix=0,1,1,0
"""
g = gsf.parse(text)

out = reduce(g)
for move in out.trace:
    print(move)

print()
print(gsf.serialize(out.reduced))

# a different move order lands on the same structure
for seed in range(5):
    other = reduce(g, policy=seed)
    assert signature(other.reduced) == signature(out.reduced)
print("five random move orders agree")
