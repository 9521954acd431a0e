"""Profiles, comparison pairs, and the depth-orbit structure of the design region.

A paired comparison presents two alternatives ("profiles") described by K
two-level attributes coded -1/+1.  In a partial profile only S of the K
attributes are shown; hidden attributes are coded 0, and both alternatives of
a pair always show the same S attributes.  Ordered pairs that differ in
exactly d of the shown attributes form one orbit of the symmetry group
(attribute permutations plus per-attribute sign flips applied to both
profiles), and every design that is invariant under that group is a mixture
of uniform designs on these orbits, so it is fully described by a weight per
comparison depth.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np

__all__ = [
    "ComparisonPair",
    "DepthDesign",
    "ExplicitDesign",
    "InvalidPairError",
    "ModelSpec",
    "Profile",
    "Weight",
    "comparison_depth",
    "count_pairs",
    "enumerate_orbit",
    "param_dims",
    "realize_design",
    "regression_vector",
]

Weight = Fraction | float | int

_WEIGHT_SUM_TOL = 1e-12


class InvalidPairError(ValueError):
    """Two profiles that cannot be compared (different shown attributes)."""


def param_dims(n_attributes: int) -> tuple[int, int, int, int, int]:
    """Parameter-block sizes (p1, p2, p3, p4, p) for K two-level attributes.

    Main effects plus all two-, three- and four-way product terms give block
    sizes C(K,1), C(K,2), C(K,3), C(K,4); p is their sum.
    """
    if n_attributes < 4:
        raise ValueError(
            f"need at least 4 attributes, got {n_attributes}: four-way product "
            "terms require four distinct attributes, and with them a profile "
            "strength of at least 4"
        )
    dims = tuple(math.comb(n_attributes, r) for r in (1, 2, 3, 4))
    return (*dims, sum(dims))


@dataclass(frozen=True)
class ModelSpec:
    """Dimensions of one design problem: K two-level attributes, S of them shown.

    Strength S >= 4 is required so that four-way products of shown attributes
    can be told apart from zero at all.
    """

    n_attributes: int
    strength: int
    block_dims: tuple[int, int, int, int] = field(init=False, repr=False, compare=False)
    n_params: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        dims = param_dims(self.n_attributes)
        if not 4 <= self.strength <= self.n_attributes:
            raise ValueError(
                f"profile strength must satisfy 4 <= S <= K, "
                f"got S={self.strength}, K={self.n_attributes}"
            )
        object.__setattr__(self, "block_dims", dims[:4])
        object.__setattr__(self, "n_params", dims[4])

    @property
    def depths(self) -> range:
        """Comparison depths 1..S an informative pair can have."""
        return range(1, self.strength + 1)


@dataclass(frozen=True)
class Profile:
    """One alternative: a level in {-1, +1} per shown attribute, 0 per hidden one."""

    levels: tuple[int, ...]

    def __post_init__(self) -> None:
        levels = tuple(int(v) for v in self.levels)
        if any(v not in (-1, 0, 1) for v in levels):
            raise ValueError(f"levels must be -1, 0 or +1, got {self.levels!r}")
        object.__setattr__(self, "levels", levels)

    @property
    def strength(self) -> int:
        """Number of shown (non-zero) attributes."""
        return sum(1 for v in self.levels if v != 0)

    @property
    def active(self) -> tuple[int, ...]:
        """Indices of the shown attributes."""
        return tuple(i for i, v in enumerate(self.levels) if v != 0)

    @classmethod
    def from_text(cls, text: str) -> "Profile":
        """Parse the comma-separated form, e.g. ``"1,-1,0,1,1"``."""
        try:
            return cls(tuple(int(part) for part in text.split(",")))
        except ValueError as exc:
            raise ValueError(f"cannot parse profile from {text!r}") from exc

    def to_text(self) -> str:
        return ",".join(str(v) for v in self.levels)


def comparison_depth(first: Profile, second: Profile) -> int:
    """Number of shown attributes in which two comparable profiles differ."""
    if len(first.levels) != len(second.levels):
        raise InvalidPairError(
            f"profiles have {len(first.levels)} and {len(second.levels)} attributes"
        )
    if first.active != second.active:
        raise InvalidPairError("profiles do not show the same attributes")
    return sum(1 for a, b in zip(first.levels, second.levels) if a != b)


@dataclass(frozen=True)
class ComparisonPair:
    """Ordered pair of profiles showing the same attributes.

    The comparison depth (count of shown attributes with different levels) is
    computed on construction; building a pair from profiles with different
    shown attributes raises InvalidPairError.
    """

    first: Profile
    second: Profile
    depth: int = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "depth", comparison_depth(self.first, self.second))

    @classmethod
    def from_text(cls, text: str) -> "ComparisonPair":
        """Parse the ``"i|j"`` form with comma-separated levels on each side."""
        parts = text.split("|")
        if len(parts) != 2:
            raise ValueError(f"expected exactly one '|' in {text!r}")
        return cls(Profile.from_text(parts[0]), Profile.from_text(parts[1]))

    def to_text(self) -> str:
        return f"{self.first.to_text()}|{self.second.to_text()}"


def _dims_of(spec) -> tuple[int, int]:
    """Accept a ModelSpec or a bare (K, S) pair.

    The bare form exists for enumeration and counting of toy spaces below the
    model's identifiability threshold (S < 4), where no ModelSpec can be built.
    """
    if isinstance(spec, ModelSpec):
        return spec.n_attributes, spec.strength
    k, s = (int(v) for v in spec)
    if not 1 <= s <= k:
        raise ValueError(f"need 1 <= S <= K, got S={s}, K={k}")
    return k, s


def count_pairs(spec: ModelSpec | tuple[int, int], depth: int) -> int:
    """Number of ordered pairs at one comparison depth: 2^S C(K,S) C(S,d)."""
    k, s = _dims_of(spec)
    if not 0 <= depth <= s:
        raise ValueError(f"depth must lie in 0..{s}, got {depth}")
    return 2**s * math.comb(k, s) * math.comb(s, depth)


def enumerate_orbit(
    spec: ModelSpec | tuple[int, int], depth: int
) -> Iterator[ComparisonPair]:
    """Yield every ordered pair of the given comparison depth exactly once.

    The stream is deterministic: attribute subsets, then first-profile levels,
    then flipped positions, each in lexicographic order.  Nothing is
    materialized, so large spaces can be consumed incrementally.
    """
    k, s = _dims_of(spec)
    if not 0 <= depth <= s:
        raise ValueError(f"depth must lie in 0..{s}, got {depth}")
    for support in itertools.combinations(range(k), s):
        for levels in itertools.product((-1, 1), repeat=s):
            base = [0] * k
            for pos, value in zip(support, levels):
                base[pos] = value
            first = Profile(tuple(base))
            for flips in itertools.combinations(range(s), depth):
                other = list(base)
                for index in flips:
                    other[support[index]] = -other[support[index]]
                yield ComparisonPair(first, Profile(tuple(other)))


@dataclass(frozen=True)
class DepthDesign:
    """Invariant design: one probability weight per comparison depth 1..S."""

    weights: dict[int, Weight]
    spec: ModelSpec

    def __post_init__(self) -> None:
        cleaned: dict[int, Weight] = {}
        for depth, weight in sorted(self.weights.items()):
            depth = int(depth)
            if depth == 0:
                raise ValueError("depth 0 carries no information and cannot be weighted")
            if not 1 <= depth <= self.spec.strength:
                raise ValueError(
                    f"depth must lie in 1..{self.spec.strength}, got {depth}"
                )
            if weight < 0:
                raise ValueError(f"negative weight {weight} at depth {depth}")
            cleaned[depth] = weight
        total = sum(cleaned.values())
        if abs(float(total) - 1.0) > _WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {float(total)!r}, not 1")
        object.__setattr__(self, "weights", cleaned)

    @classmethod
    def point_mass(cls, spec: ModelSpec, depth: int) -> "DepthDesign":
        """The uniform design on a single comparison depth."""
        return cls({depth: Fraction(1)}, spec)

    @property
    def support(self) -> tuple[int, ...]:
        """Depths carrying positive weight, ascending."""
        return tuple(d for d, w in self.weights.items() if w > 0)

    @property
    def is_exact(self) -> bool:
        """True when every weight is an exact rational."""
        return all(isinstance(w, (int, Fraction)) for w in self.weights.values())


@dataclass(frozen=True)
class ExplicitDesign:
    """Design as weighted ordered pairs over one problem's design region."""

    entries: tuple[tuple[ComparisonPair, Weight], ...]
    spec: ModelSpec

    def __post_init__(self) -> None:
        entries = tuple((pair, weight) for pair, weight in self.entries)
        k, s = self.spec.n_attributes, self.spec.strength
        total = 0.0
        for pair, weight in entries:
            if len(pair.first.levels) != k:
                raise ValueError(
                    f"pair {pair.to_text()} has {len(pair.first.levels)} attributes, "
                    f"spec has {k}"
                )
            if pair.first.strength != s:
                raise ValueError(
                    f"pair {pair.to_text()} has strength {pair.first.strength}, "
                    f"spec has {s}"
                )
            if weight < 0:
                raise ValueError(f"negative weight {weight}")
            total += float(weight)
        if abs(total - 1.0) > max(_WEIGHT_SUM_TOL, 1e-15 * len(entries)):
            raise ValueError(f"weights sum to {total!r}, not 1")
        object.__setattr__(self, "entries", entries)


def realize_design(design: DepthDesign) -> ExplicitDesign:
    """Spell an invariant design out as explicit pairs.

    Each supported depth contributes its whole orbit with per-pair weight
    w_d / N_d; exact weights stay exact.
    """
    entries: list[tuple[ComparisonPair, Weight]] = []
    for depth in design.support:
        weight = design.weights[depth]
        n_pairs = count_pairs(design.spec, depth)
        if isinstance(weight, (int, Fraction)):
            row_weight: Weight = Fraction(weight) / n_pairs
        else:
            row_weight = weight / n_pairs
        entries.extend((pair, row_weight) for pair in enumerate_orbit(design.spec, depth))
    return ExplicitDesign(tuple(entries), design.spec)


@lru_cache(maxsize=None)
def _combo_indices(n_attributes: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Lexicographic index tuples for the two-, three- and four-way blocks."""
    return tuple(
        np.array(
            list(itertools.combinations(range(n_attributes), r)), dtype=np.intp
        ).reshape(-1, r)
        for r in (2, 3, 4)
    )


def _regression_matrix(levels: np.ndarray, n_attributes: int) -> np.ndarray:
    """Model rows for a batch of level rows; blocks ordered mains, pairs, triples, quads."""
    blocks = [levels]
    for idx in _combo_indices(n_attributes):
        blocks.append(levels[:, idx].prod(axis=2))
    return np.concatenate(blocks, axis=1)


def regression_vector(profile: Profile, spec: ModelSpec) -> np.ndarray:
    """Model row f(i): the K levels, then all two-, three- and four-way products.

    Index tuples are sorted lexicographically within each block and the blocks
    are concatenated in order of interaction order, so the layout is
    byte-reproducible.  Entries are -1, 0 or +1 (no zeros for full profiles).
    """
    if len(profile.levels) != spec.n_attributes:
        raise ValueError(
            f"profile has {len(profile.levels)} attributes, spec has {spec.n_attributes}"
        )
    if profile.strength != spec.strength:
        raise ValueError(
            f"profile has strength {profile.strength}, spec has {spec.strength}"
        )
    levels = np.array([profile.levels], dtype=np.int64)
    return _regression_matrix(levels, spec.n_attributes)[0]
