"""Variance functions and the D-optimality certificate.

For an invariant design with block informations h1..h4 the normalized
prediction variance of a pair depends on the pair only through its comparison
depth:

    V(d) = 4d ( 1/h1 + (S-d)/h2 + (3S^2 - 6dS + 4d^2 - 3S + 2) / (6 h3)
                + (S-d)(2d^2 - 2Sd + S^2 - 3S + 4) / (6 h4) )

By the Kiefer-Wolfowitz equivalence theorem a design is D-optimal exactly when
V(d) <= p for every depth, with equality at every depth it actually weights.
The certificate below reports the worst excess max_d V(d) - p; with rational
weights the whole check runs in exact arithmetic, so a verdict of "optimal"
at tol 0 is a proof, not an approximation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .design_space import (
    ComparisonPair,
    DepthDesign,
    ExplicitDesign,
    ModelSpec,
    Weight,
    enumerate_orbit,
    realize_design,
    regression_vector,
)
from .information import (
    BlockInfo,
    DenseInfo,
    SingularDesignError,
    _check_spec,
    h_values,
    info_matrix_exact,
    mix_h,
)

__all__ = [
    "CertificationReport",
    "VarianceProfile",
    "kw_certify",
    "variance_exact",
    "variance_from_blocks",
    "variance_profile",
    "variance_sweep_max_deviation",
    "variance_uniform",
]

DEFAULT_CERTIFY_TOL = 1e-6

_ARGMAX_TOL = 1e-9


def _raise_singular(info: BlockInfo) -> None:
    zeros = info.zero_blocks
    raise SingularDesignError(
        "not identifiable: " + "=".join(zeros) + "=0", zeros
    )


def variance_from_blocks(info: BlockInfo, depth: int) -> Weight:
    """V(depth) for a design with the given block informations.

    Exact when the h values are exact.  Depth 0 is the degenerate identical
    pair and evaluates to 0 by convention.
    """
    s = info.spec.strength
    d = int(depth)
    if not 0 <= d <= s:
        raise ValueError(f"depth must lie in 0..{s}, got {depth}")
    if d == 0:
        return 0
    if info.is_singular:
        _raise_singular(info)
    h1, h2, h3, h4 = info.values
    q3 = 3 * s * s - 6 * d * s + 4 * d * d - 3 * s + 2
    q4 = 2 * d * d - 2 * s * d + s * s - 3 * s + 4
    return (4 * d) * (
        1 / h1 + (s - d) / h2 + q3 / (6 * h3) + (s - d) * q4 / (6 * h4)
    )


@dataclass(frozen=True)
class VarianceProfile:
    """Variance function of an invariant design, tabulated over depths 1..S."""

    values: dict[int, Weight]
    p: int
    max_value: Weight = field(init=False)
    argmax_depths: frozenset[int] = field(init=False)

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError("empty variance profile")
        top = max(self.values.values())
        argmax = frozenset(
            d for d, v in self.values.items() if abs(float(v - top)) <= _ARGMAX_TOL
        )
        object.__setattr__(self, "max_value", top)
        object.__setattr__(self, "argmax_depths", argmax)

    def normalized(self) -> dict[int, float]:
        """V(d)/p per depth, as floats."""
        return {d: float(v) / self.p for d, v in self.values.items()}


def variance_profile(
    design: DepthDesign, spec: ModelSpec | None = None
) -> VarianceProfile:
    """Evaluate the variance function of an invariant design at every depth."""
    spec = _check_spec(design, spec)
    info = mix_h(design, spec)
    if info.is_singular:
        _raise_singular(info)
    values = {d: variance_from_blocks(info, d) for d in spec.depths}
    return VarianceProfile(values=values, p=spec.n_params)


def variance_uniform(depth: int, design_depth: int, spec: ModelSpec) -> Fraction:
    """Variance at one depth under the uniform design on a single depth.

    Closed form in the block sizes alone:

        V(d) = (d/d') ( p1 + p2 (S-d)/(S-d')
                        + p3 q3(d)/q3(d') + p4 (S-d) q4(d) / ((S-d') q4(d')) )

    with q3, q4 the cubic and quartic depth factors of the h values.  This is
    an independent route to the same number as ``variance_profile`` of a point
    mass and is always exact.
    """
    s = spec.strength
    d, dd = int(depth), int(design_depth)
    for name, value in (("depth", d), ("design depth", dd)):
        if not 1 <= value <= s:
            raise ValueError(f"{name} must lie in 1..{s}, got {value}")
    base = h_values(spec, dd)
    if base.is_singular:
        _raise_singular(base)
    p1, p2, p3, p4 = spec.block_dims

    def q3(x: int) -> int:
        return 3 * s * s - 6 * x * s + 4 * x * x - 3 * s + 2

    def q4(x: int) -> int:
        return 2 * x * x - 2 * s * x + s * s - 3 * s + 4

    return Fraction(d, dd) * (
        p1
        + p2 * Fraction(s - d, s - dd)
        + p3 * Fraction(q3(d), q3(dd))
        + p4 * Fraction((s - d) * q4(d), (s - dd) * q4(dd))
    )


def variance_exact(
    pair: ComparisonPair,
    design: ExplicitDesign,
    info: DenseInfo | None = None,
) -> float:
    """(f(i)-f(j))^T M^{-1} (f(i)-f(j)) via a dense solve on the oracle matrix.

    Pass a precomputed ``info`` when sweeping many pairs of one design.
    """
    if info is None:
        info = info_matrix_exact(design)
    diff = (
        regression_vector(pair.first, design.spec)
        - regression_vector(pair.second, design.spec)
    ).astype(float)
    try:
        solution = np.linalg.solve(info.entries, diff)
    except np.linalg.LinAlgError as exc:
        raise SingularDesignError("oracle information matrix is singular") from exc
    return float(diff @ solution)


def variance_sweep_max_deviation(
    design: DepthDesign, explicit: ExplicitDesign | None = None
) -> float:
    """Max |oracle variance - closed form| over every pair of every depth.

    Exhausts the whole design region of the spec, not just the design's
    support, using one factorization of the oracle matrix.  Subject to the
    oracle gate, so intended for small attribute counts.
    """
    spec = design.spec
    if explicit is None:
        explicit = realize_design(design)
    dense = info_matrix_exact(explicit)
    closed = variance_profile(design)
    worst = 0.0
    for depth in spec.depths:
        pairs = list(enumerate_orbit(spec, depth))
        diffs = np.array(
            [
                regression_vector(p.first, spec) - regression_vector(p.second, spec)
                for p in pairs
            ],
            dtype=float,
        )
        solved = np.linalg.solve(dense.entries, diffs.T)
        oracle_values = np.einsum("ij,ji->i", diffs, solved)
        worst = max(worst, float(np.max(np.abs(oracle_values - float(closed.values[depth])))))
    return worst


@dataclass(frozen=True)
class CertificationReport:
    """Outcome of the equivalence-theorem check for one invariant design."""

    spec: ModelSpec
    weights: dict[int, Weight]
    profile: VarianceProfile
    tol: float
    max_excess: Weight
    optimal: bool
    support_ok: bool

    @property
    def p(self) -> int:
        return self.profile.p

    @property
    def verdict(self) -> str:
        return "optimal" if self.optimal else "not optimal"

    def to_dict(self) -> dict:
        return {
            "K": self.spec.n_attributes,
            "S": self.spec.strength,
            "weights": {str(d): float(w) for d, w in self.weights.items()},
            "V_by_depth": {str(d): float(v) for d, v in self.profile.values.items()},
            "p": self.p,
            "max_excess": float(self.max_excess),
            "tol": self.tol,
            "verdict": self.verdict,
            "support_ok": self.support_ok,
        }

    def to_text(self) -> str:
        """Human-readable block: normalized variances with supported depths starred."""
        support = {d for d, w in self.weights.items() if w > 0}
        normalized = self.profile.normalized()
        header = "depth " + "".join(f"{d:>9d}" for d in sorted(normalized))
        row = "V/p   " + "".join(
            f"{normalized[d]:>8.3f}{'*' if d in support else ' '}"
            for d in sorted(normalized)
        )
        lines = [
            f"K={self.spec.n_attributes} S={self.spec.strength} p={self.p}",
            header,
            row,
            f"max excess: {float(self.max_excess):.3e} (tol {self.tol:g} relative to p)",
            f"verdict: {self.verdict}"
            + ("" if self.support_ok else " (support condition violated)"),
        ]
        return "\n".join(lines)


def kw_certify(
    design: DepthDesign,
    spec: ModelSpec | None = None,
    tol: float = DEFAULT_CERTIFY_TOL,
) -> CertificationReport:
    """Certify D-optimality of an invariant design.

    Optimal means max_d V(d) - p <= tol * p over all depths 1..S.  The report
    also flags the support condition: every weighted depth must sit within
    tol * p of p itself.  Singular designs raise SingularDesignError, they are
    neither optimal nor suboptimal.
    """
    spec = _check_spec(design, spec)
    profile = variance_profile(design, spec)
    p = spec.n_params
    max_excess = max(v - p for v in profile.values.values())
    optimal = float(max_excess) <= tol * p
    support_ok = all(
        abs(float(profile.values[d] - p)) <= tol * p for d in design.support
    )
    return CertificationReport(
        spec=spec,
        weights=dict(design.weights),
        profile=profile,
        tol=tol,
        max_excess=max_excess,
        optimal=optimal,
        support_ok=support_ok,
    )
