"""
From a weighted graph back to a graph
=====================================

Round the vertex weights to n parts, round the edge weights to a degree grid,
pick loop degrees with distinct row sums, then glue circulant and
wrap-around biregular blocks. Color refinement recovers exactly the planned
classes.
"""

from fractions import Fraction as F

from homdist import WeightedGraph
from homdist.inversion import invert, plan_inversion, inversion_bound, verify_inversion
from homdist.refinement import color_refine

h = WeightedGraph((F(1, 2), F(1, 3), F(1, 6)),
                  ((F(1, 2), F(1, 4), 0),
                   (F(1, 4), 0, F(9, 10)),
                   (0, F(9, 10), F(1, 3))))

for n in (6, 12, 24):
    plan = plan_inversion(h, n)
    g, _ = invert(h, n)
    out = verify_inversion(h, n)
    print(f"n={n}: class sizes {plan.sizes}, {g.n} vertices, {g.num_edges} edges, "
          f"{color_refine(g).num_colors} colors")
    print("   degrees\n", plan.M)
    print(f"   achieved {float(out['achieved']):.4f} <= bound {float(inversion_bound(h.n, n)):.4f}")
