"""Tour of the model space: profiles, regression rows, and depth orbits.

Run:  python demos/01_model_and_design_region.py
"""

from pairdesign import (
    ComparisonPair,
    ModelSpec,
    Profile,
    count_pairs,
    enumerate_orbit,
    param_dims,
    regression_vector,
)

rule = "_" * 64

print("Parameter blocks grow binomially with the attribute count K:")
print("K    p1   p2   p3   p4    p")
for k in (4, 5, 6, 8, 12):
    print("{:<4d} {:>4d} {:>4d} {:>4d} {:>4d} {:>5d}".format(k, *param_dims(k)))

print(rule)

# A partial profile shows S of the K attributes; hidden ones carry level 0.
spec = ModelSpec(5, 4)
shown = Profile.from_text("1,-1,0,1,1")
print(f"\nprofile {shown.to_text()}  (strength {shown.strength}, active {shown.active})")

f = regression_vector(shown, spec)
print(f"regression row has length p = {spec.n_params}:")
print(f.tolist())
print("every product touching the hidden attribute is 0")

print(rule)

# Pairs share the shown attributes; the comparison depth counts disagreements.
pair = ComparisonPair.from_text("1,-1,0,1,1|1,1,0,1,-1")
print(f"\npair {pair.to_text()} has comparison depth {pair.depth}")

print(rule)

# The design region splits into orbits by depth: 2^S C(K,S) C(S,d) pairs each.
print(f"\norbit sizes for K={spec.n_attributes}, S={spec.strength}:")
total = 0
for depth in range(spec.strength + 1):
    n = count_pairs(spec, depth)
    total += n
    print(f"  depth {depth}: {n:>5d} ordered pairs")
print(f"  total:   {total:>5d}")

first_three = [p.to_text() for _, p in zip(range(3), enumerate_orbit(spec, 1))]
print("\nfirst three depth-1 pairs in enumeration order:")
for text in first_three:
    print(" ", text)
