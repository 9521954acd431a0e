"""Closed-form block informations against the brute-force oracle."""

from fractions import Fraction

import numpy as np
import pytest

from pairdesign import (
    BlockInfo,
    DepthDesign,
    ExplicitDesign,
    ModelSpec,
    SingularDesignError,
    count_pairs,
    enumerate_orbit,
    h_numerators,
    h_values,
    info_matrix_exact,
    is_identifiable,
    log_det,
    mix_h,
)

from conftest import reference_uniform_info


def uniform_orbit_design(spec, depth, exact=True):
    n = count_pairs(spec, depth)
    weight = Fraction(1, n) if exact else 1.0 / n
    return ExplicitDesign(
        tuple((pair, weight) for pair in enumerate_orbit(spec, depth)), spec
    )


class TestHValues:
    def test_depth_zero(self, spec44):
        assert h_values(spec44, 0).values == (0, 0, 0, 0)

    def test_depth_one(self, spec44):
        assert h_values(spec44, 1).values == (1, 2, 3, 4)

    def test_depth_two(self, spec44):
        assert h_values(spec44, 2).values == (2, Fraction(8, 3), 2, 0)

    def test_depth_full(self, spec44):
        hv = h_values(spec44, 4)
        assert hv.values == (4, 0, 4, 0)
        assert hv.is_singular
        assert hv.zero_blocks == ("h2", "h4")

    def test_out_of_range(self, spec44):
        with pytest.raises(ValueError):
            h_values(spec44, 5)

    @pytest.mark.parametrize("s", range(1, 13))
    def test_depth_symmetry(self, s):
        for d in range(s + 1):
            n_here = h_numerators(s, d)
            n_mirror = h_numerators(s, s - d)
            assert n_here[1] == n_mirror[1]
            assert n_here[3] == n_mirror[3]

    def test_to_dict_fraction_strings(self, spec44):
        record = h_values(spec44, 2).to_dict()
        assert record == {"K": 4, "S": 4, "h1": "2", "h2": "8/3", "h3": "2", "h4": "0"}


class TestReferenceOracle:
    """Independent accumulation (conftest) against both library routes."""

    @pytest.mark.parametrize("k,s", [(4, 4), (5, 4)])
    def test_uniform_orbits_match_everywhere(self, k, s):
        spec = ModelSpec(k, s)
        for depth in range(s + 1):
            reference = reference_uniform_info(k, s, depth)
            hv = h_values(spec, depth)
            expected_diag = []
            for h, dim in zip(hv.values, spec.block_dims):
                expected_diag.extend([h] * dim)
            dense = info_matrix_exact(uniform_orbit_design(spec, depth))
            for a in range(spec.n_params):
                for b in range(spec.n_params):
                    want = expected_diag[a] if a == b else 0
                    assert reference[a][b] == want, (depth, a, b)
                    assert dense.exact_entry(a, b) == want, (depth, a, b)


class TestInfoMatrixExact:
    def test_single_pair_rank_one(self, spec44):
        from pairdesign import ComparisonPair, Profile, regression_vector

        pair = ComparisonPair(Profile((1, 1, 1, 1)), Profile((-1, 1, 1, 1)))
        design = ExplicitDesign(((pair, Fraction(1)),), spec44)
        dense = info_matrix_exact(design)
        diff = (
            regression_vector(pair.first, spec44)
            - regression_vector(pair.second, spec44)
        ).astype(float)
        assert np.linalg.matrix_rank(dense.entries) == 1
        assert dense.entries.trace() == pytest.approx(float(diff @ diff))
        np.testing.assert_allclose(dense.entries, np.outer(diff, diff))

    def test_uniform_orbit_equals_blocks(self, spec44):
        dense = info_matrix_exact(uniform_orbit_design(spec44, 2))
        np.testing.assert_allclose(dense.entries, h_values(spec44, 2).as_matrix())
        off = dense.exact_num.copy()
        np.fill_diagonal(off, 0)
        assert np.all(off == 0)

    def test_half_and_half_orbits(self, spec44):
        entries = []
        for depth in (1, 3):
            n = count_pairs(spec44, depth)
            entries.extend(
                (pair, Fraction(1, 2 * n)) for pair in enumerate_orbit(spec44, depth)
            )
        dense = info_matrix_exact(ExplicitDesign(tuple(entries), spec44))
        blended = mix_h(DepthDesign({1: Fraction(1, 2), 3: Fraction(1, 2)}, spec44))
        np.testing.assert_allclose(dense.entries, blended.as_matrix())

    def test_linearity(self, spec44):
        a = info_matrix_exact(uniform_orbit_design(spec44, 1)).entries
        b = info_matrix_exact(uniform_orbit_design(spec44, 3)).entries
        entries = []
        for depth, share in ((1, Fraction(1, 4)), (3, Fraction(3, 4))):
            n = count_pairs(spec44, depth)
            entries.extend(
                (pair, share / n) for pair in enumerate_orbit(spec44, depth)
            )
        mixed = info_matrix_exact(ExplicitDesign(tuple(entries), spec44)).entries
        np.testing.assert_allclose(mixed, 0.25 * a + 0.75 * b)

    def test_float_path(self, spec44):
        dense = info_matrix_exact(uniform_orbit_design(spec44, 2, exact=False))
        assert not dense.is_exact
        assert np.max(np.abs(dense.entries - h_values(spec44, 2).as_matrix())) <= 1e-12

    def test_trace_identity(self, spec55):
        dense = info_matrix_exact(uniform_orbit_design(spec55, 3))
        hv = h_values(spec55, 3)
        expected = sum(p * h for p, h in zip(spec55.block_dims, hv.values))
        assert Fraction(int(dense.exact_num.trace()), dense.exact_den) == expected

    def test_oracle_gate_on_params(self):
        from pairdesign import ComparisonPair, Profile

        spec = ModelSpec(12, 12)  # p = 793 > 500
        pair = ComparisonPair(Profile((1,) * 12), Profile((-1,) * 12))
        design = ExplicitDesign(((pair, 1.0),), spec)
        with pytest.raises(ValueError, match="oracle gate"):
            info_matrix_exact(design)

    def test_nonnegative_definite(self, spec54):
        dense = info_matrix_exact(uniform_orbit_design(spec54, 2))
        assert np.linalg.eigvalsh(dense.entries).min() >= -1e-9

    def test_to_text_round_trips(self, spec44):
        dense = info_matrix_exact(uniform_orbit_design(spec44, 1))
        parsed = np.array(
            [[float(v) for v in line.split("\t")] for line in dense.to_text().splitlines()]
        )
        np.testing.assert_array_equal(parsed, dense.entries)


class TestMixH:
    def test_point_mass(self, spec44):
        for depth in range(1, 5):
            design = DepthDesign.point_mass(spec44, depth)
            assert mix_h(design).values == h_values(spec44, depth).values

    def test_known_equal_blend(self, spec44):
        design = DepthDesign(
            {1: Fraction(4, 15), 2: Fraction(2, 5), 3: Fraction(4, 15), 4: Fraction(1, 15)},
            spec44,
        )
        assert mix_h(design).values == (Fraction(32, 15),) * 4

    def test_blend_matches_oracle(self, spec44):
        weights = {
            1: Fraction(4, 15),
            2: Fraction(2, 5),
            3: Fraction(4, 15),
            4: Fraction(1, 15),
        }
        entries = []
        for depth, share in weights.items():
            n = count_pairs(spec44, depth)
            entries.extend((pair, share / n) for pair in enumerate_orbit(spec44, depth))
        assert len(entries) == 240
        dense = info_matrix_exact(ExplicitDesign(tuple(entries), spec44))
        blended = mix_h(DepthDesign(weights, spec44))
        expected_diag = []
        for h, dim in zip(blended.values, spec44.block_dims):
            expected_diag.extend([h] * dim)
        for a in range(spec44.n_params):
            assert dense.exact_entry(a, a) == expected_diag[a]

    def test_k5_blend_positive_and_matches_oracle(self, spec55):
        weights = {2: Fraction(2, 3), 4: Fraction(1, 3)}
        blended = mix_h(DepthDesign(weights, spec55))
        assert all(h > 0 for h in blended.values)
        entries = []
        for depth, share in weights.items():
            n = count_pairs(spec55, depth)
            entries.extend((pair, share / n) for pair in enumerate_orbit(spec55, depth))
        dense = info_matrix_exact(ExplicitDesign(tuple(entries), spec55))
        np.testing.assert_allclose(dense.entries, blended.as_matrix(), atol=1e-12)

    def test_spec_mismatch(self, spec44, spec54):
        design = DepthDesign.point_mass(spec44, 1)
        with pytest.raises(ValueError, match="mismatch"):
            mix_h(design, spec54)


class TestLogDet:
    def test_identity(self, spec44):
        assert log_det(BlockInfo(1, 1, 1, 1, spec44)) == 0.0

    def test_point_mass_full_depth_singular(self, spec44):
        info = mix_h(DepthDesign.point_mass(spec44, 4))
        with pytest.raises(SingularDesignError) as err:
            log_det(info)
        assert err.value.zero_blocks == ("h2", "h4")

    def test_point_mass_depth_one(self, spec44):
        import math

        info = mix_h(DepthDesign.point_mass(spec44, 1))
        expected = 4 * math.log(1) + 6 * math.log(2) + 4 * math.log(3) + math.log(4)
        assert log_det(info) == pytest.approx(expected, abs=1e-12)


class TestIdentifiability:
    def test_depth_one_yes(self, spec44):
        assert is_identifiable(DepthDesign.point_mass(spec44, 1))

    def test_depth_full_no(self, spec44):
        assert not is_identifiable(DepthDesign.point_mass(spec44, 4))

    def test_two_dead_quartic_depths(self, spec44):
        # h4 vanishes at both d=2 and d=4 when S=4
        design = DepthDesign({2: 0.5, 4: 0.5}, spec44)
        assert not is_identifiable(design)
