"""One-inclusion graphs, orientations and the prediction they induce.

Run: python3 demos/02_orientations.py
"""

from oiglab import BitVector, build_bounded_ones_class, build_indicator_class
from oiglab.concept_class import project, vc_dimension
from oiglab.oig import (
    ClosureRule,
    FlowRule,
    build_graph,
    closure_orientation,
    max_out_degree,
    orient_min_max_outdegree,
    predict,
)

# The indicator class seen through three points is a star around the zero function.
host = build_indicator_class(4)
star = build_graph(project(host, BitVector.from_str("1110")))
closure = closure_orientation(star, BitVector.zeros(3))
print("closure orientation of the star:")
for line in closure.listing():
    print("  " + line)

# The learner trained on points 1 and 2 (both labeled 0) asks about point 3.
# The only disputed edge is {000, 001}; its head decides the label.
train = BitVector.from_str("1100")
print("closure prediction at point 3:", predict(ClosureRule(host), train, host, 3))

# The flow orienter finds the smallest possible maximum out-degree; it never exceeds the VC dimension.
for m, d in ((6, 1), (6, 2), (5, 3)):
    cls = build_bounded_ones_class(m, d)
    o = orient_min_max_outdegree(build_graph(cls))
    print(f"at most {d} ones on {m} points: VC dim {vc_dimension(cls)}, optimal max out-degree {max_out_degree(o)}")

print("flow prediction at point 3:", predict(FlowRule(host), train, host, 3))
