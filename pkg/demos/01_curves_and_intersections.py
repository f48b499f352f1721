# Curves on a torus, as normal coordinates and as slopes.
from curvelab.curves import intersection_number, slope_class
from curvelab.graphs import CURVE, farey_distance, farey_path, neighbors
from curvelab.surfaces import make_surface

torus = make_surface(1, 0)

# a slope p/q becomes a weight vector on the one-vertex triangulation
a = slope_class(torus, 1, 0)
b = slope_class(torus, 5, 3)
print("weights of 1/0:", a.weights)
print("weights of 5/3:", b.weights)

# on the closed torus the intersection number is a determinant
print("i(1/0, 5/3) =", intersection_number(a, b))

# adjacency means intersecting once, so the curve graph is the Farey graph
print("some neighbours of 1/0:", sorted(c.slope for c in neighbors(a, CURVE, 6))[:6])

for s, t in [((1, 0), (5, 3)), ((0, 1), (5, 3)), ((1, 0), (13, 8))]:
    print(f"d({s}, {t}) = {farey_distance(s, t)} via {farey_path(s, t)}")
