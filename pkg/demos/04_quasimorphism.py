# Counting a segment in the orbit graph of <psi, phi^k psi phi^-k>.
from curvelab.experiments import independent_spec
from curvelab.qm import defect_estimate, homogenize, qm_value, sample_pairs, scl_lower_bound

spec = independent_spec(3)
print("edge costs:", {f: str(c) for f, c in spec.costs})
print("w =", spec.w, "sigma =", spec.sigma)

for g in ["", "a", "aa", "aaa", "b", "ab", "abAB", "A"]:
    print(f"h({g or 'e'}) = {qm_value(spec, g)}")

D = defect_estimate(spec, sample_pairs(1000, 4, seed=0))
print("sampled defect:", D)

hom = homogenize(spec, "a", defect=D)
print(hom.to_csv())
print("scl(a) >=", scl_lower_bound(spec, "a", D), "(estimate, the defect is sampled)")
