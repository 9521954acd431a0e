"""Information matrices: closed-form block diagonals and the brute-force oracle.

The uniform design on the depth-d orbit has the block-diagonal information
matrix diag(h1 Id_p1, h2 Id_p2, h3 Id_p3, h4 Id_p4) with

    h1(d) = 4d / K
    h2(d) = 8d(S-d) / (K(K-1))
    h3(d) = 4d(3S^2 - 6Sd + 4d^2 - 3S + 2) / (K(K-1)(K-2))
    h4(d) = 16d(S-d)(2d^2 - 2Sd + S^2 - 3S + 4) / (K(K-1)(K-2)(K-3))

and mixing depth designs mixes the h values linearly.  The closed form is what
the optimizer runs on; the dense oracle accumulates
sum_x w_x (f(i)-f(j))(f(i)-f(j))^T over explicit pairs and exists to verify
the closed form, never to replace it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .design_space import (
    DepthDesign,
    ExplicitDesign,
    ModelSpec,
    Weight,
    _regression_matrix,
)

__all__ = [
    "BlockInfo",
    "DenseInfo",
    "SingularDesignError",
    "h_numerators",
    "h_values",
    "info_matrix_exact",
    "is_identifiable",
    "log_det",
    "mix_h",
]

_MAX_ORACLE_PARAMS = 500
_MAX_ORACLE_PAIRS = 10_000_000
_MAX_EXACT_DENOMINATOR = 10**12
_ORACLE_CHUNK = 1 << 16


class SingularDesignError(Exception):
    """The design gives zero information to at least one parameter block."""

    def __init__(self, message: str, zero_blocks: tuple[str, ...] = ()):
        super().__init__(message)
        self.zero_blocks = tuple(zero_blocks)


def h_numerators(strength: int, depth: int) -> tuple[int, int, int, int]:
    """K-independent numerators of the four block informations at one depth.

    Useful on its own for depth comparisons: the attribute count only scales
    each block by a positive constant, so argmax questions reduce to these
    integers.
    """
    s, d = int(strength), int(depth)
    if not 0 <= d <= s:
        raise ValueError(f"depth must lie in 0..{s}, got {d}")
    return (
        4 * d,
        8 * d * (s - d),
        4 * d * (3 * s * s - 6 * s * d + 4 * d * d - 3 * s + 2),
        16 * d * (s - d) * (2 * d * d - 2 * s * d + s * s - 3 * s + 4),
    )


@dataclass(frozen=True)
class BlockInfo:
    """Per-block information values of an invariant design.

    Represents the p x p matrix diag(h1 Id_p1, ..., h4 Id_p4).  Values are
    exact fractions whenever the inputs were; they only turn into floats when
    float weights enter a mixture.
    """

    h1: Weight
    h2: Weight
    h3: Weight
    h4: Weight
    spec: ModelSpec

    @property
    def values(self) -> tuple[Weight, Weight, Weight, Weight]:
        return (self.h1, self.h2, self.h3, self.h4)

    @property
    def zero_blocks(self) -> tuple[str, ...]:
        return tuple(
            name for name, h in zip(("h1", "h2", "h3", "h4"), self.values) if h <= 0
        )

    @property
    def is_singular(self) -> bool:
        return any(h <= 0 for h in self.values)

    def as_matrix(self) -> np.ndarray:
        """The represented p x p matrix, as floats."""
        diag = np.repeat([float(h) for h in self.values], self.spec.block_dims)
        return np.diag(diag)

    def to_dict(self) -> dict:
        """Serializable record with the h values as exact fraction strings."""
        record = {"K": self.spec.n_attributes, "S": self.spec.strength}
        for name, h in zip(("h1", "h2", "h3", "h4"), self.values):
            record[name] = _fraction_string(h)
        return record


def _fraction_string(value: Weight) -> str:
    if isinstance(value, (int, Fraction)):
        return str(Fraction(value))
    return repr(float(value))


def h_values(spec: ModelSpec, depth: int) -> BlockInfo:
    """Exact block informations of the uniform design on one depth orbit."""
    k = spec.n_attributes
    nums = h_numerators(spec.strength, depth)
    dens = (k, k * (k - 1), k * (k - 1) * (k - 2), k * (k - 1) * (k - 2) * (k - 3))
    return BlockInfo(*(Fraction(n, m) for n, m in zip(nums, dens)), spec=spec)


def _check_spec(design, spec: ModelSpec | None) -> ModelSpec:
    if spec is None:
        return design.spec
    if spec != design.spec:
        raise ValueError(
            f"specification mismatch: design has K={design.spec.n_attributes} "
            f"S={design.spec.strength}, got K={spec.n_attributes} S={spec.strength}"
        )
    return spec


def mix_h(design: DepthDesign, spec: ModelSpec | None = None) -> BlockInfo:
    """Block informations of a depth mixture: h_r = sum_d w_d h_r(d)."""
    spec = _check_spec(design, spec)
    totals: list[Weight] = [0, 0, 0, 0]
    for depth, weight in design.weights.items():
        for r, h in enumerate(h_values(spec, depth).values):
            totals[r] = totals[r] + weight * h
    return BlockInfo(*totals, spec=spec)


def log_det(info: BlockInfo) -> float:
    """log det of the block information matrix, sum_r p_r ln h_r.

    Raises SingularDesignError when any block gets zero information, naming
    the dead blocks; a singular design is "not identifiable", which is a
    different verdict from "not optimal".
    """
    if info.is_singular:
        zeros = info.zero_blocks
        raise SingularDesignError(
            "singular information matrix: " + "=".join(zeros) + "=0", zeros
        )
    return float(
        sum(p * math.log(float(h)) for p, h in zip(info.spec.block_dims, info.values))
    )


def is_identifiable(design: DepthDesign, spec: ModelSpec | None = None) -> bool:
    """True when the mixed information matrix is nonsingular (all h_r > 0)."""
    return not mix_h(design, spec).is_singular


@dataclass(frozen=True)
class DenseInfo:
    """Dense p x p information matrix from the brute-force oracle.

    ``entries`` is always the float view.  When the accumulation ran in exact
    integer arithmetic, ``exact_num``/``exact_den`` hold the matrix as
    exact_num / exact_den and ``exact_entry`` recovers exact fractions.
    """

    entries: np.ndarray
    spec: ModelSpec
    exact_num: np.ndarray | None = None
    exact_den: int | None = None

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=float)
        if entries.shape != (self.spec.n_params, self.spec.n_params):
            raise ValueError(
                f"expected a {self.spec.n_params} x {self.spec.n_params} matrix, "
                f"got shape {entries.shape}"
            )
        if np.max(np.abs(entries - entries.T), initial=0.0) > 1e-12:
            raise ValueError("information matrix is not symmetric")
        object.__setattr__(self, "entries", entries)

    @property
    def is_exact(self) -> bool:
        return self.exact_num is not None

    def exact_entry(self, row: int, col: int) -> Fraction:
        if self.exact_num is None or self.exact_den is None:
            raise ValueError("matrix was accumulated in floating point")
        return Fraction(int(self.exact_num[row, col]), self.exact_den)

    def to_text(self) -> str:
        """Row-major, tab-separated dense text form."""
        return "\n".join(
            "\t".join(repr(v) for v in row) for row in self.entries.tolist()
        )


def info_matrix_exact(design: ExplicitDesign) -> DenseInfo:
    """Brute-force information matrix sum_x w_x (f(i)-f(j))(f(i)-f(j))^T.

    Runs in exact integer arithmetic over the least common weight denominator
    whenever every weight is rational (and the common denominator stays
    moderate); otherwise accumulates in float64.  Refuses problems past the
    oracle gate (p <= 500, <= 1e7 pairs) instead of degrading silently.
    """
    spec = design.spec
    if spec.n_params > _MAX_ORACLE_PARAMS:
        raise ValueError(
            f"oracle gate: p={spec.n_params} exceeds {_MAX_ORACLE_PARAMS}; "
            "use the closed-form block information instead"
        )
    if len(design.entries) > _MAX_ORACLE_PAIRS:
        raise ValueError(
            f"oracle gate: {len(design.entries)} pairs exceed {_MAX_ORACLE_PAIRS}"
        )
    weights = [w for _, w in design.entries]
    exact = all(isinstance(w, (int, Fraction)) for w in weights)
    counts = None
    denominator = None
    if exact:
        fractions = [Fraction(w) for w in weights]
        denominator = math.lcm(*(f.denominator for f in fractions)) if fractions else 1
        if denominator <= _MAX_EXACT_DENOMINATOR:
            counts = np.array(
                [f.numerator * (denominator // f.denominator) for f in fractions],
                dtype=np.int64,
            )
    k, p = spec.n_attributes, spec.n_params
    if counts is not None:
        total = np.zeros((p, p), dtype=np.int64)
    else:
        total = np.zeros((p, p), dtype=float)
        float_weights = np.array([float(w) for w in weights])
    for start in range(0, len(design.entries), _ORACLE_CHUNK):
        chunk = design.entries[start : start + _ORACLE_CHUNK]
        firsts = np.array([pair.first.levels for pair, _ in chunk], dtype=np.int64)
        seconds = np.array([pair.second.levels for pair, _ in chunk], dtype=np.int64)
        diffs = _regression_matrix(firsts, k) - _regression_matrix(seconds, k)
        if counts is not None:
            total += diffs.T @ (diffs * counts[start : start + len(chunk), None])
        else:
            weighted = diffs * float_weights[start : start + len(chunk), None]
            total += diffs.T @ weighted
    if counts is not None:
        return DenseInfo(
            entries=total / denominator,
            spec=spec,
            exact_num=total,
            exact_den=denominator,
        )
    return DenseInfo(entries=(total + total.T) / 2.0, spec=spec)
