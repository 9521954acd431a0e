"""Variance functions, trace identities and the optimality certificate."""

from fractions import Fraction

import numpy as np
import pytest

from pairdesign import (
    DepthDesign,
    ModelSpec,
    SingularDesignError,
    enumerate_orbit,
    h_values,
    kw_certify,
    mix_h,
    realize_design,
    variance_exact,
    variance_from_blocks,
    variance_profile,
    variance_sweep_max_deviation,
    variance_uniform,
)
from pairdesign.information import info_matrix_exact


def four_depth_optimum(spec44):
    return DepthDesign(
        {1: Fraction(4, 15), 2: Fraction(2, 5), 3: Fraction(4, 15), 4: Fraction(1, 15)},
        spec44,
    )


class TestVarianceProfile:
    def test_constant_fifteen(self, spec44):
        profile = variance_profile(four_depth_optimum(spec44))
        assert profile.values == {1: 15, 2: 15, 3: 15, 4: 15}
        assert profile.argmax_depths == frozenset({1, 2, 3, 4})

    def test_k5_two_depth_row(self, spec55):
        design = DepthDesign({2: Fraction(2, 3), 4: Fraction(1, 3)}, spec55)
        profile = variance_profile(design)
        normalized = [round(float(v) / 30, 3) for _, v in sorted(profile.values.items())]
        assert normalized == [0.938, 1.0, 0.938, 1.0, 0.938]
        assert profile.values[2] == 30
        assert profile.values[4] == 30

    def test_k8_two_depth_row(self):
        spec = ModelSpec(8, 8)
        design = DepthDesign({3: Fraction(2, 3), 6: Fraction(1, 3)}, spec)
        profile = variance_profile(design)
        normalized = [
            round(float(v) / spec.n_params, 3) for _, v in sorted(profile.values.items())
        ]
        assert normalized == [0.759, 0.998, 1.0, 0.954, 0.954, 1.0, 0.998, 0.759]

    def test_singular_raises(self, spec44):
        with pytest.raises(SingularDesignError):
            variance_profile(DepthDesign.point_mass(spec44, 4))

    def test_trace_identity_random(self):
        rng = np.random.default_rng(20240907)
        for _ in range(100):
            k = int(rng.integers(4, 13))
            s = int(rng.integers(4, k + 1))
            spec = ModelSpec(k, s)
            raw = rng.dirichlet(np.ones(s))
            weights = {d + 1: float(w) for d, w in enumerate(raw)}
            design = DepthDesign(weights, spec)
            profile = variance_profile(design)
            total = sum(
                float(w) * float(profile.values[d]) for d, w in design.weights.items()
            )
            assert abs(total - spec.n_params) <= 1e-9

    def test_depth_zero_constant(self, spec44):
        info = mix_h(four_depth_optimum(spec44))
        assert variance_from_blocks(info, 0) == 0


class TestVarianceUniform:
    @pytest.mark.parametrize("k,s", [(4, 4), (5, 5), (6, 5), (8, 8)])
    def test_own_depth_gives_p(self, k, s):
        spec = ModelSpec(k, s)
        for d in range(1, s + 1):
            if h_values(spec, d).is_singular:
                continue
            assert variance_uniform(d, d, spec) == spec.n_params

    def test_matches_point_mass_profile(self):
        for k in (5, 6, 7, 8):
            spec = ModelSpec(k, k)
            for dd in range(1, k + 1):
                try:
                    profile = variance_profile(DepthDesign.point_mass(spec, dd))
                except SingularDesignError:
                    with pytest.raises(SingularDesignError):
                        variance_uniform(1, dd, spec)
                    continue
                for d in range(1, k + 1):
                    assert variance_uniform(d, dd, spec) == profile.values[d]

    def test_extrapolation_example(self, spec55):
        profile = variance_profile(DepthDesign.point_mass(spec55, 1))
        assert variance_uniform(5, 1, spec55) == profile.values[5]

    def test_dead_quartic_depth_single(self, spec44):
        # 2 d'^2 - 2 S d' + S^2 - 3S + 4 = 0 at S=4, d'=2
        with pytest.raises(SingularDesignError):
            variance_uniform(1, 2, spec44)

    def test_range_validation(self, spec44):
        with pytest.raises(ValueError):
            variance_uniform(0, 1, spec44)
        with pytest.raises(ValueError):
            variance_uniform(1, 5, spec44)


class TestVarianceExact:
    def test_depth_zero_pair(self, spec44):
        from pairdesign import ComparisonPair, Profile

        design = realize_design(four_depth_optimum(spec44))
        info = info_matrix_exact(design)
        profile = Profile((1, -1, 1, 1))
        pair = ComparisonPair(profile, profile)
        assert variance_exact(pair, design, info) == 0.0

    def test_optimum_gives_fifteen_everywhere(self, spec44):
        design = realize_design(four_depth_optimum(spec44))
        info = info_matrix_exact(design)
        for depth in range(1, 5):
            for pair in enumerate_orbit(spec44, depth):
                assert variance_exact(pair, design, info) == pytest.approx(15, abs=1e-10)

    def test_depends_only_on_depth(self, spec54):
        design = realize_design(
            DepthDesign({1: Fraction(1, 2), 3: Fraction(1, 2)}, spec54)
        )
        info = info_matrix_exact(design)
        closed = variance_profile(DepthDesign({1: Fraction(1, 2), 3: Fraction(1, 2)}, spec54))
        for depth in range(1, 5):
            values = [
                variance_exact(pair, design, info)
                for pair in enumerate_orbit(spec54, depth)
            ]
            assert max(values) - min(values) <= 1e-10
            assert values[0] == pytest.approx(float(closed.values[depth]), abs=1e-10)

    def test_singular_matrix_raises(self, spec44):
        design = realize_design(DepthDesign({4: Fraction(1)}, spec44))
        pair = next(enumerate_orbit(spec44, 1))
        with pytest.raises(SingularDesignError):
            variance_exact(pair, design)

    def test_sweep_helper_tight(self, spec54):
        design = DepthDesign({1: Fraction(1, 4), 2: Fraction(3, 4)}, spec54)
        assert variance_sweep_max_deviation(design) <= 1e-10


class TestQuarticShape:
    @pytest.mark.parametrize("k,s", [(4, 4), (5, 5), (8, 6), (12, 12)])
    def test_leading_coefficient_negative(self, k, s):
        spec = ModelSpec(k, s)
        weights = {1: Fraction(1, 2), min(3, s - 1): Fraction(1, 2)}
        design = DepthDesign(weights, spec)
        info = mix_h(design)
        depths = np.arange(0, 5)
        values = np.array([float(variance_from_blocks(info, int(d))) for d in depths])
        fitted = np.polyfit(depths, values, 4)
        assert fitted[0] < 0
        # exact fourth finite difference gives 4! times the leading coefficient
        exact = [variance_from_blocks(info, d) for d in range(5)]
        lead = (
            exact[4] - 4 * exact[3] + 6 * exact[2] - 4 * exact[1] + exact[0]
        ) / 24
        assert lead < 0
        assert lead == -Fraction(4, 3) / info.h4


class TestKWCertify:
    def test_four_depth_optimum(self, spec44):
        report = kw_certify(four_depth_optimum(spec44))
        assert report.optimal
        assert report.support_ok
        assert float(report.max_excess) <= 1e-10
        assert report.verdict == "optimal"

    def test_point_mass_not_optimal(self, spec55):
        report = kw_certify(DepthDesign.point_mass(spec55, 2))
        assert not report.optimal
        assert float(report.profile.values[4]) > spec55.n_params

    @pytest.mark.parametrize("s", range(5, 13))
    def test_two_depth_rule_certifies(self, s):
        from pairdesign import conjectured_design

        spec = ModelSpec(s, s)
        report = kw_certify(conjectured_design(spec), tol=1e-6)
        assert report.optimal
        assert report.support_ok

    def test_singular_raises_not_suboptimal(self, spec44):
        with pytest.raises(SingularDesignError, match="not identifiable"):
            kw_certify(DepthDesign.point_mass(spec44, 4))

    def test_report_serialization(self, spec44):
        report = kw_certify(four_depth_optimum(spec44))
        record = report.to_dict()
        assert record["K"] == 4 and record["S"] == 4 and record["p"] == 15
        assert record["verdict"] == "optimal"
        assert set(record["V_by_depth"]) == {"1", "2", "3", "4"}
        text = report.to_text()
        assert "verdict: optimal" in text
        assert "1.000*" in text

    def test_support_condition_flag(self, spec55):
        report = kw_certify(DepthDesign({1: 0.5, 2: 0.5}, spec55))
        assert not report.optimal
        assert not report.support_ok
