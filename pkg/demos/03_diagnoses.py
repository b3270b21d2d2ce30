"""
When reduction fails
====================

The engine does not decompose inputs that violate its hypotheses.  It stops
and says which hypothesis failed.
"""
from graphmfd import gsf, reduce

cases = {
    "solid torus over a half-infinite annulus, meridian along the fiber": """
piece P orientable genus=0 boundary=1 ends=1 cones=none
solidtorus V meridian=0,-1
edge e P:0 V:0 matrix=1,0,0,-1
""",
    "two T^2 x I pieces closed up with an Anosov gluing": """
piece T1 orientable genus=0 boundary=2 ends=0 cones=none
piece T2 orientable genus=0 boundary=2 ends=0 cones=none
edge e1 T1:1 T2:0 matrix=2,1,-1,-1
edge e2 T2:1 T1:0 matrix=1,0,0,-1
""",
    "two solid tori": """
solidtorus V1 meridian=1,0
solidtorus V2 meridian=1,0
edge e V1:0 V2:0 matrix=0,1,1,0
""",
}

for title, text in cases.items():
    out = reduce(gsf.parse(text))
    print(title)
    print("   ", out.diagnosis)
