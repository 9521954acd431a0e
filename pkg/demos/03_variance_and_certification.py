"""Variance functions and equivalence-theorem certificates.

Run:  python demos/03_variance_and_certification.py
"""

from fractions import Fraction

from pairdesign import (
    DepthDesign,
    ModelSpec,
    SingularDesignError,
    kw_certify,
    variance_profile,
    variance_uniform,
)

rule = "_" * 64

# A design is D-optimal exactly when its variance function stays below the
# parameter count p at every depth, touching p on its own support.
spec = ModelSpec(5, 5)
design = DepthDesign({2: Fraction(2, 3), 4: Fraction(1, 3)}, spec)
profile = variance_profile(design)
print(f"K=S=5, weights 2/3 on depth 2 and 1/3 on depth 4, p = {spec.n_params}")
print("depth:", list(profile.values))
print("V(d): ", [str(Fraction(v)) for v in profile.values.values()])
print("V/p:  ", [round(float(v) / spec.n_params, 3) for v in profile.values.values()])

report = kw_certify(design)
print("\n" + report.to_text())

print(rule)

# Uniform single-depth designs have a fully closed-form variance function.
print("\nvariance of uniform single-depth designs, K=S=5:")
print("V(d, design on d') with rows d' and columns d:")
for dd in (1, 2, 3):
    row = [str(variance_uniform(d, dd, spec)) for d in range(1, 6)]
    print(f"  d'={dd}: {row}")
print("the diagonal is always exactly p")

print(rule)

# A design can be plainly suboptimal, or worse, not identifiable at all.
print("\npoint mass on depth 2 (suboptimal but identifiable):")
report = kw_certify(DepthDesign.point_mass(spec, 2))
print(report.to_text())

print("\npoint mass on depth S (singular):")
try:
    kw_certify(DepthDesign.point_mass(spec, 5))
except SingularDesignError as exc:
    print(f"  raises SingularDesignError: {exc}")
