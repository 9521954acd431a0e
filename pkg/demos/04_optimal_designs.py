"""Optimal comparison depths, per block and for the whole parameter vector.

Run:  python demos/04_optimal_designs.py
"""

from fractions import Fraction

from pairdesign import (
    ModelSpec,
    conjectured_design,
    kw_certify,
    optimal_depth_first_order,
    optimal_depth_main,
    optimal_depth_second_order,
    optimal_depth_third_order,
    optimize_full,
)

rule = "_" * 64

print("Best depths per parameter block (ties listed in full):")
print("S    mains     two-way    three-way  four-way")
for s in range(4, 13):
    print(
        "{:<4d} {:<9s} {:<10s} {:<10s} {:<10s}".format(
            s,
            str(sorted(optimal_depth_main(s))),
            str(sorted(optimal_depth_first_order(s))),
            str(sorted(optimal_depth_second_order(s))),
            str(sorted(optimal_depth_third_order(s))),
        )
    )
print("no single depth serves every block, so the full vector needs a mixture")

print(rule)

print("\nD-optimal depth weightings for full profiles (computed, then certified):")
for s in range(4, 13):
    result = optimize_full(ModelSpec(s, s))
    weights = ", ".join(
        f"d={d}: {Fraction(result.design.weights[d])}" for d in result.support
    )
    print(
        f"S={s:<3d} support={str(result.support):<14s} {weights}"
        f"   certified={result.certified}"
    )

print(rule)

print("\nthe two-depth rule d* = floor((S+1)/3), w(d*) = d1*/(S+1) reproduces them:")
for s in (5, 8, 12):
    spec = ModelSpec(s, s)
    rule_design = conjectured_design(spec)
    report = kw_certify(rule_design)
    weights = {d: str(w) for d, w in rule_design.weights.items()}
    print(f"S={s}: {weights} -> {report.verdict}, max excess {float(report.max_excess):.1e}")

print(rule)

print("\npartial profiles (S < K) are optimized the same way:")
for k, s in [(6, 4), (8, 5), (12, 4)]:
    result = optimize_full(ModelSpec(k, s))
    weights = {d: str(Fraction(result.design.weights[d])) for d in result.support}
    print(f"K={k:<3d} S={s}: support {result.support}, weights {weights}, "
          f"certified={result.certified}")
