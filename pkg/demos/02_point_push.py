# Pushing a marked point around a filling loop, and watching the orbit run away.
from curvelab.dynamics import translation_estimate
from curvelab.experiments import shipped_curve, shipped_loop
from curvelab.graphs import SURVIVING
from curvelab.mcg import act, is_filling, point_push

surface, gamma = shipped_loop()
print("loop", gamma.letters, "based at", gamma.base, "filling:", is_filling(surface, gamma))

psi = point_push(surface, gamma)
print("action on homology:", psi.shadow)  # trivial, the push is invisible once the points are filled

x = shipped_curve("horizontal", 2)
y = x
for n in range(1, 4):
    y = act(psi, y)
    print(f"psi^{n} x has weight {sum(y.weights)}")

est = translation_estimate(psi, SURVIVING, x, n_max=10)
print("orbit distances:", [d for _, d in est.samples])
print(f"translation length in [{est.lower}, {est.upper}], verdict {est.verdict}")
