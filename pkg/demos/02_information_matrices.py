"""Closed-form block informations versus the brute-force oracle.

Run:  python demos/02_information_matrices.py
"""

from fractions import Fraction

import numpy as np

from pairdesign import (
    DepthDesign,
    ExplicitDesign,
    ModelSpec,
    count_pairs,
    enumerate_orbit,
    h_values,
    info_matrix_exact,
    is_identifiable,
    log_det,
    mix_h,
)

rule = "_" * 64

spec = ModelSpec(4, 4)
print(f"K={spec.n_attributes}, S={spec.strength}, p={spec.n_params}")
print("\nblock informations of the uniform designs per depth (exact fractions):")
print("d      h1      h2      h3      h4")
for depth in range(spec.strength + 1):
    values = [str(Fraction(h)) for h in h_values(spec, depth).values]
    print("{:<4d}{:>8s}{:>8s}{:>8s}{:>8s}".format(depth, *values))
print("depth S kills h2 and h4; depth 0 carries nothing at all")

print(rule)

# The brute-force oracle accumulates outer products over the whole orbit and
# lands exactly on the closed form, with zero off-diagonal entries.
depth = 2
n = count_pairs(spec, depth)
design = ExplicitDesign(
    tuple((pair, Fraction(1, n)) for pair in enumerate_orbit(spec, depth)), spec
)
dense = info_matrix_exact(design)
print(f"\nbrute force over all {n} depth-{depth} pairs:")
print("diagonal (exact):", [str(dense.exact_entry(a, a)) for a in (0, 4, 10, 14)])
off = dense.exact_num.copy()
np.fill_diagonal(off, 0)
print("largest off-diagonal entry:", int(abs(off).max()))

print(rule)

# Mixtures of depths mix the h values linearly.
weights = {1: Fraction(4, 15), 2: Fraction(2, 5), 3: Fraction(4, 15), 4: Fraction(1, 15)}
blend = DepthDesign(weights, spec)
info = mix_h(blend)
print("\nmixing all four depths with weights", {d: str(w) for d, w in weights.items()})
print("gives equal information in every block:", [str(Fraction(h)) for h in info.values])
print(f"log det = {log_det(info):.6f}")

print(rule)

print("\nidentifiability by support:")
for candidate in ({1: Fraction(1)}, {4: Fraction(1)}, {2: Fraction(1, 2), 4: Fraction(1, 2)}):
    design = DepthDesign(candidate, spec)
    label = ", ".join(f"d={d}: {w}" for d, w in candidate.items())
    print(f"  {{{label}}} -> identifiable: {is_identifiable(design)}")
