# Two conjugate pushes whose axes sit far apart after the points are filled in.
from curvelab.dynamics import independence_test, project_axis, quasi_axis, separation_growth
from curvelab.experiments import shipped_curve, shipped_loop
from curvelab.mcg import anosov, point_push

surface, gamma = shipped_loop()
psi, phi = point_push(surface, gamma), anosov(surface)
x = shipped_curve("horizontal", 2)

axis = quasi_axis(psi, x, 8)
print(f"axis of psi: K = {axis.K}, L = {axis.L}, projects to slope {project_axis(axis)}")

# the Anosov map drags that slope further and further in the Farey graph
for k, d in separation_growth(phi, x, 6):
    print(f"k = {k}: projected separation {d}")

for B in (2, 3, 4):
    k = next(k for k in range(7) if independence_test(axis, axis.translate(phi ** k), B).verdict == "Independent")
    print(f"B = {B}: first independent conjugate at k = {k}")
