"""Optimal comparison depths per parameter block and D-optimal depth weightings.

Each parameter block is served best by specific depths: the argmax of its
block information over d = 1..S (ties are returned in full).  For the whole
parameter vector the objective log det M = sum_r p_r ln h_r(w) is concave in
the depth weights, and is maximized by vertex-direction ascent (step toward
the depth whose variance exceeds p the most, with exact line search on the
one-dimensional section), followed by pruning of negligible weights and a
damped Newton polish on the surviving support.  Whenever the polished weights
sit on small rationals the design is re-certified in exact arithmetic and
returned with exact weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from .design_space import DepthDesign, ModelSpec
from .equivalence import variance_profile
from .information import SingularDesignError, h_numerators, h_values, log_det, mix_h

__all__ = [
    "OptimResult",
    "conjectured_design",
    "optimal_depth_first_order",
    "optimal_depth_main",
    "optimal_depth_second_order",
    "optimal_depth_third_order",
    "optimize_full",
]

_PRUNE_EPS = 1e-8
_LINE_SEARCH_XTOL = 1e-12
_SNAP_DENOMINATOR = 10**4
_NEWTON_GRAD_TOL = 1e-11
_POLISH_PERIOD = 10
_MAX_SUPPORT = 4


def _strength_of(spec: ModelSpec | int) -> int:
    return spec.strength if isinstance(spec, ModelSpec) else int(spec)


def _argmax_depths(strength: int, block: int) -> set[int]:
    values = [h_numerators(strength, d)[block] for d in range(1, strength + 1)]
    top = max(values)
    return {d for d, v in zip(range(1, strength + 1), values) if v == top}


def optimal_depth_main(spec: ModelSpec | int) -> set[int]:
    """Depths maximizing the main-effects information: always {S}."""
    strength = _strength_of(spec)
    if strength < 1:
        raise ValueError(f"strength must be at least 1, got {strength}")
    return _argmax_depths(strength, 0)


def optimal_depth_first_order(spec: ModelSpec | int) -> set[int]:
    """Depths maximizing the two-way block: S/2, or both nearest when S is odd."""
    strength = _strength_of(spec)
    if strength < 2:
        raise ValueError(
            f"two-way products need at least 2 shown attributes, got strength {strength}"
        )
    return _argmax_depths(strength, 1)


def optimal_depth_second_order(spec: ModelSpec | int) -> set[int]:
    """Depths maximizing the three-way block: {1, 3} for S=3, {S} for S >= 4."""
    strength = _strength_of(spec)
    if strength < 3:
        raise ValueError(
            f"three-way products need at least 3 shown attributes, got strength {strength}"
        )
    return _argmax_depths(strength, 2)


def optimal_depth_third_order(spec: ModelSpec | int) -> set[int]:
    """Depths maximizing the four-way block, symmetric under d <-> S-d.

    The full argmax set is returned; its minimum is the conventional single
    reported depth.
    """
    strength = _strength_of(spec)
    if strength < 4:
        raise ValueError(
            f"four-way products need at least 4 shown attributes, got strength {strength}"
        )
    return _argmax_depths(strength, 3)


def conjectured_design(spec: ModelSpec) -> DepthDesign:
    """Two-depth rational design: d* = floor((S+1)/3), d1* = S+1-d*, w(d*) = d1*/(S+1).

    Defined for strength 5 and up; the strength-4 optimum needs all four
    depths, with weights 4/15, 2/5, 4/15, 1/15 on depths 1..4.
    """
    s = spec.strength
    if s < 5:
        raise ValueError(
            "no two-depth rule below strength 5; the strength-4 optimum mixes "
            "all four depths with weights 4/15, 2/5, 4/15, 1/15"
        )
    d_low = (s + 1) // 3
    d_high = s + 1 - d_low
    return DepthDesign(
        {d_low: Fraction(d_high, s + 1), d_high: Fraction(d_low, s + 1)}, spec
    )


@dataclass(frozen=True)
class OptimResult:
    """Outcome of one D-optimality run over the depth simplex."""

    design: DepthDesign
    log_det: float
    kw_excess: float
    iterations: int
    support: tuple[int, ...]
    certified: bool
    tol: float

    def to_dict(self) -> dict:
        record = {
            "K": self.design.spec.n_attributes,
            "S": self.design.spec.strength,
            "support": list(self.support),
            "weights": [float(self.design.weights[d]) for d in self.support],
            "logdet": self.log_det,
            "kw_excess": self.kw_excess,
            "certified": self.certified,
        }
        if self.design.is_exact:
            record["weights_exact"] = [
                str(Fraction(self.design.weights[d])) for d in self.support
            ]
        return record


def _h_matrix(spec: ModelSpec) -> np.ndarray:
    """Block informations h_r(d) as a 4 x S float matrix, columns d = 1..S."""
    s = spec.strength
    matrix = np.empty((4, s))
    for j, depth in enumerate(range(1, s + 1)):
        matrix[:, j] = [float(h) for h in h_values(spec, depth).values]
    return matrix


def _phi(h: np.ndarray, p_blocks: np.ndarray) -> float:
    if np.any(h <= 0):
        return -np.inf
    return float(p_blocks @ np.log(h))


def _variances(h: np.ndarray, h_matrix: np.ndarray, p_blocks: np.ndarray) -> np.ndarray:
    """V(d) for every depth: the gradient of phi over the simplex."""
    return (p_blocks / h) @ h_matrix


def _line_search(h: np.ndarray, h_target: np.ndarray, p_blocks: np.ndarray) -> float:
    """Maximize phi((1-a) h + a h_target) over a in [0, 1]; the section is concave."""

    def slope(a: float) -> float:
        mix = (1.0 - a) * h + a * h_target
        return float(p_blocks @ ((h_target - h) / mix))

    if slope(0.0) <= 0.0:
        return 0.0
    if np.all(h_target > 0):
        if slope(1.0) >= 0.0:
            return 1.0
        upper = 1.0
    else:
        upper = 1.0 - 1e-12
        if slope(upper) >= 0.0:
            return upper
    return float(brentq(slope, 0.0, upper, xtol=_LINE_SEARCH_XTOL))


def _newton_on_support(
    h_matrix: np.ndarray, p_blocks: np.ndarray, weights: np.ndarray
) -> np.ndarray | None:
    """Damped Newton polish of phi on the current support.

    Weights pushed against zero are dropped from the support (active set);
    returns the polished weight vector, or None when the iterate went
    singular.
    """
    w = weights.copy()
    for _ in range(200):
        support = np.flatnonzero(w > 0)
        if len(support) <= 1:
            return w
        h = h_matrix @ w
        if np.any(h <= 0):
            return None
        variances = _variances(h, h_matrix, p_blocks)
        anchor = support[-1]
        free = support[:-1]
        grad = variances[free] - variances[anchor]
        if np.max(np.abs(grad)) <= _NEWTON_GRAD_TOL:
            return w
        columns = h_matrix[:, free] - h_matrix[:, anchor][:, None]
        curvature = p_blocks / h**2
        hessian = columns.T @ (columns * curvature[:, None])
        try:
            step = np.linalg.solve(hessian, grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hessian, grad, rcond=None)[0]
        direction = np.zeros_like(w)
        direction[free] = step
        direction[anchor] = -step.sum()
        # largest simplex-feasible step, then backtrack until phi improves
        limit = 1.0
        for idx in support:
            if direction[idx] < 0:
                limit = min(limit, w[idx] / -direction[idx])
        phi_now = _phi(h, p_blocks)
        scale = limit
        accepted = False
        while scale > 1e-14:
            trial = w + scale * direction
            trial[trial < 1e-17] = 0.0
            trial /= trial.sum()
            if _phi(h_matrix @ trial, p_blocks) >= phi_now - 1e-13:
                accepted = True
                break
            scale /= 2.0
        if not accepted:
            return w
        w = trial
    return w


def _snap_to_exact(spec: ModelSpec, weights: np.ndarray) -> DepthDesign | None:
    """Try to read the float weights as small rationals and certify them exactly.

    Returns the exact design only when the exact variance check passes with
    zero slack: V(d) <= p for every depth and V(d) = p on the support.
    """
    p = spec.n_params
    exact: dict[int, Fraction] = {}
    for j, weight in enumerate(weights):
        if weight <= 0:
            continue
        candidate = Fraction(float(weight)).limit_denominator(_SNAP_DENOMINATOR)
        if candidate <= 0 or abs(float(candidate) - float(weight)) > 1e-6:
            return None
        exact[j + 1] = candidate
    if not exact:
        return None
    total = sum(exact.values())
    if total != 1:
        # absorb the float residue into the heaviest depth (ties: smallest depth)
        heaviest = min(exact, key=lambda d: (-exact[d], d))
        exact[heaviest] += 1 - total
        if exact[heaviest] <= 0:
            return None
    try:
        design = DepthDesign(exact, spec)
        profile = variance_profile(design)
    except (ValueError, SingularDesignError):
        return None
    if any(v > p for v in profile.values.values()):
        return None
    if any(profile.values[d] != p for d in design.support):
        return None
    return design


def _result_from_design(
    spec: ModelSpec,
    design: DepthDesign,
    iterations: int,
    tol: float,
    polished: bool = True,
) -> OptimResult:
    info = mix_h(design)
    profile = variance_profile(design)
    excess = float(max(v - spec.n_params for v in profile.values.values()))
    certified = polished and excess <= tol * spec.n_params
    result = OptimResult(
        design=design,
        log_det=log_det(info),
        kw_excess=excess,
        iterations=iterations,
        support=design.support,
        certified=certified,
        tol=tol,
    )
    if certified:
        # the bound holds for true optima; an unpruned iterate could carry
        # dust on extra depths, which is why only polished designs certify
        assert len(result.support) <= _MAX_SUPPORT, (
            f"certified design on {len(result.support)} depths; "
            "at most four can satisfy the support condition"
        )
    return result


def _design_from_floats(spec: ModelSpec, weights: np.ndarray) -> DepthDesign:
    kept = {
        j + 1: float(weight) for j, weight in enumerate(weights) if weight > 0
    }
    total = sum(kept.values())
    return DepthDesign({d: w / total for d, w in kept.items()}, spec)


def _polish(
    spec: ModelSpec, h_matrix: np.ndarray, p_blocks: np.ndarray,
    weights: np.ndarray, tol: float,
) -> DepthDesign | None:
    """Prune, Newton-polish, and return a design only if it certifies at tol."""
    p = spec.n_params
    pruned = np.where(weights > _PRUNE_EPS, weights, 0.0)
    if pruned.sum() <= 0:
        return None
    pruned /= pruned.sum()
    polished = _newton_on_support(h_matrix, p_blocks, pruned)
    if polished is None:
        return None
    exact = _snap_to_exact(spec, polished)
    if exact is not None:
        return exact
    h = h_matrix @ polished
    if np.any(h <= 0):
        return None
    excess = float(np.max(_variances(h, h_matrix, p_blocks)) - p)
    if excess <= tol * p:
        return _design_from_floats(spec, polished)
    return None


def optimize_full(
    spec: ModelSpec, *, tol: float = 1e-9, max_iter: int = 5000
) -> OptimResult:
    """Maximize log det over depth weightings and certify the result.

    Starts uniform on depths 1..S-1 (depth S alone would start on a singular
    boundary), ascends toward the worst-variance depth with exact line search,
    and periodically prunes and polishes.  On success the result carries a
    design whose equivalence-theorem excess is at most tol * p, with exact
    rational weights whenever the optimum sits on small fractions.  If the
    iteration budget runs out the best iterate is returned with
    ``certified=False`` and its true excess, never a silent wrong answer.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    s, p = spec.strength, spec.n_params
    h_matrix = _h_matrix(spec)
    p_blocks = np.array(spec.block_dims, dtype=float)
    w = np.zeros(s)
    w[: s - 1] = 1.0 / (s - 1)
    best_w = w.copy()
    best_phi = _phi(h_matrix @ w, p_blocks)
    iterations = 0
    while iterations < max_iter:
        h = h_matrix @ w
        variances = _variances(h, h_matrix, p_blocks)
        excess = float(np.max(variances) - p)
        if excess <= tol * p or iterations % _POLISH_PERIOD == 0:
            candidate = _polish(spec, h_matrix, p_blocks, w, tol)
            if candidate is not None:
                return _result_from_design(spec, candidate, iterations, tol)
        target = int(np.argmax(variances))
        alpha = _line_search(h, h_matrix[:, target], p_blocks)
        if alpha > 0.0:
            w *= 1.0 - alpha
            w[target] += alpha
        iterations += 1
        phi_now = _phi(h_matrix @ w, p_blocks)
        if phi_now > best_phi:
            best_phi = phi_now
            best_w = w.copy()
    candidate = _polish(spec, h_matrix, p_blocks, best_w, tol)
    if candidate is not None:
        return _result_from_design(spec, candidate, iterations, tol)
    return _result_from_design(
        spec, _design_from_floats(spec, best_w), iterations, tol, polished=False
    )
