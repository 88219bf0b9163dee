"""
Color distance versus tree distance on a three-part graph
=========================================================

Three parts of size n: parts 1 and 2 are completely joined, part 3 is
joined to the others by (n-1)- and (n-2)-regular bipartite graphs. Its
quotient stays at cut distance 16/135 from the triangle's quotient for every
n, while the tree distance to K_3 shrinks as n grows.
"""

from fractions import Fraction

from homdist import color_distance, complete_graph, quotient, tree_dist_cutnorm
from homdist.generators import three_part_graph
from homdist.distances import SolverOptions

k3 = complete_graph(3)
print("quotient of K_3:", quotient(k3))

# quotient of the three-part graph: one class per part
q = quotient(three_part_graph(10))
print("class sizes:", q.alpha)
for row in q.beta:
    print("  ", " ".join(str(b) for b in row))

# the overlay polytope against a one-vertex quotient is a single point,
# so the exact inner maximization gives the distance itself
rep = color_distance(three_part_graph(10), k3)
print("color distance:", rep.exact_value, f"(bound={rep.bound})",
      ">= 2/27:", rep.exact_value >= Fraction(2, 27))

opts = SolverOptions(restarts=2, polish_iters=60)
for n in (5, 10, 20, 40):
    t = tree_dist_cutnorm(three_part_graph(n), k3, opts)
    print(f"n={n:3d}  tree distance (cut) <= {t.value:.4f}  color distance = 16/135 = {16 / 135:.4f}")
