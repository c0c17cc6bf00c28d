"""Tail function, model validation, and region-probability tests."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tandemfuse.gaussian import (
    GaussianModel,
    XyxThresholds,
    YxThresholds,
    llr,
    q_inv,
    q_tail,
    tail_prob,
    xyx_joint_probs,
)

from oracles import joint_probs_by_quadrature, q_reference

INF = math.inf


class TestQTail:
    def test_symmetry_point(self):
        assert q_tail(0.0) == 0.5

    def test_degenerate_tails(self):
        assert q_tail(INF) == 0.0
        assert q_tail(-INF) == 1.0

    def test_quantile_of_02(self):
        # 0.8416 is the 80% quantile to four decimals
        assert abs(q_tail(0.8416) - 0.200) < 1e-4
        assert abs(q_tail(0.8416) - q_reference(0.8416)) < 1e-14

    @pytest.mark.parametrize("z", [-8.0, -3.1, -0.7, 0.0, 0.3, 1.9, 5.5, 8.0])
    def test_matches_high_precision_reference(self, z):
        assert q_tail(z) == pytest.approx(q_reference(z), rel=1e-14, abs=1e-300)

    @given(st.floats(min_value=-8.0, max_value=8.0))
    def test_reflection(self, z):
        assert abs(q_tail(-z) - (1.0 - q_tail(z))) <= 1e-15

    def test_strictly_decreasing(self):
        # strict where increments clear the ulp near 1 (z >= -7); weakly
        # decreasing across the whole clamped range
        zs = np.linspace(-7.0, 8.0, 4001)
        assert np.all(np.diff(q_tail(zs)) < 0)
        wide = np.linspace(-40.0, 40.0, 4001)
        assert np.all(np.diff(q_tail(wide)) <= 0)

    def test_clamp_region_is_exact(self):
        assert q_tail(38.5) == 0.0
        assert q_tail(-38.5) == 1.0
        arr = q_tail(np.array([-1e9, -39.0, 39.0, 1e9, INF, -INF]))
        assert arr.tolist() == [1.0, 1.0, 0.0, 0.0, 0.0, 1.0]

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            q_tail(float("nan"))

    def test_inverse_roundtrip(self):
        for p in (1e-12, 0.01, 0.2, 0.5, 0.9, 1 - 1e-9):
            assert q_tail(q_inv(p)) == pytest.approx(p, rel=1e-12)


class TestGaussianModel:
    @pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, INF])
    def test_rejects_nonpositive_or_nonfinite_scale(self, bad):
        with pytest.raises(ValueError):
            GaussianModel(sigma_x=bad, sigma_y=1.0)
        with pytest.raises(ValueError):
            GaussianModel(sigma_x=1.0, sigma_y=bad)

    def test_swap_is_involutive(self):
        m = GaussianModel(0.7, 2.3)
        assert m.swapped().swapped() == m

    def test_role_symmetry_bit_identical(self):
        m = GaussianModel(0.8, 1.7)
        swapped = m.swapped()
        for t in (-1.0, 0.2, 0.5, 3.0):
            for hyp in (0, 1):
                assert tail_prob(m, t, hyp, "x") == tail_prob(swapped, t, hyp, "y")
                assert tail_prob(m, t, hyp, "y") == tail_prob(swapped, t, hyp, "x")


class TestTailProb:
    def test_cut_at_mean_gives_half(self):
        m = GaussianModel(1.0, 1.0)
        assert tail_prob(m, 0.0, 0, "x") == 0.5
        assert tail_prob(m, 1.0, 1, "x") == 0.5

    def test_midpoint_value(self):
        m = GaussianModel(1.0, 1.0)
        assert tail_prob(m, 0.5, 0, "x") == pytest.approx(q_reference(0.5), rel=1e-14)

    def test_degenerate_thresholds(self):
        m = GaussianModel(2.0, 0.5)
        for hyp in (0, 1):
            for sensor in ("x", "y"):
                assert tail_prob(m, -INF, hyp, sensor) == 1.0
                assert tail_prob(m, INF, hyp, sensor) == 0.0

    def test_bad_hypothesis(self):
        with pytest.raises(ValueError):
            tail_prob(GaussianModel(1, 1), 0.0, 2, "x")


class TestLlr:
    def test_equiprobable_point(self):
        assert llr(GaussianModel(1, 1), 0.5, "x") == 0.0

    def test_direct_value(self):
        assert llr(GaussianModel(1, 1), 1.5, "x") == 1.0
        assert llr(GaussianModel(2, 1), 1.5, "x") == 0.25

    @given(
        st.floats(min_value=-50, max_value=50),
        st.floats(min_value=-50, max_value=50),
        st.floats(min_value=0.1, max_value=10),
    )
    def test_monotone_in_observation(self, a, b, sigma):
        m = GaussianModel(sigma, 1.0)
        lo, hi = min(a, b), max(a, b)
        assert llr(m, lo, "x") <= llr(m, hi, "x")

    def test_rejects_nonfinite_observation(self):
        with pytest.raises(ValueError):
            llr(GaussianModel(1, 1), INF, "x")


def _ordered_table(rng, spread=1.5):
    """Random thresholds satisfying the ordering convention."""
    t1 = float(rng.uniform(-spread, 1 + spread))
    t20, t21 = np.sort(rng.uniform(-spread, 1 + spread, 2))[::-1]
    c00, c10 = np.sort(rng.uniform(-spread, 1 + spread, 2))[::-1]
    e0 = float(rng.uniform(0, spread))
    e1 = float(rng.uniform(0, e0 + (c00 - c10)))
    return XyxThresholds(
        t_u=t1,
        t_v=(float(t20), float(t21)),
        t_w=((float(c00), float(c00 + e0)), (float(c10), float(c10 + e1))),
    )


class TestOrderingConvention:
    def test_yx_violation_named(self):
        with pytest.raises(ValueError, match=r"t_w\[1\] <= t_w\[0\]"):
            YxThresholds(t_v=0.5, t_w=(0.1, 0.9))

    def test_xyx_violations_named(self):
        with pytest.raises(ValueError, match=r"t_v\[1\] <= t_v\[0\]"):
            XyxThresholds(t_u=0.5, t_v=(0.1, 0.9), t_w=((0.5, 0.5), (0.5, 0.5)))
        with pytest.raises(ValueError, match=r"t_w\[1\]\[0\] <= t_w\[0\]\[0\]"):
            XyxThresholds(t_u=0.5, t_v=(0.9, 0.1), t_w=((0.2, 0.5), (0.4, 0.5)))
        with pytest.raises(ValueError, match=r"t_w\[0\]\[0\] <= t_w\[0\]\[1\]"):
            XyxThresholds(t_u=0.5, t_v=(0.9, 0.1), t_w=((0.7, 0.5), (0.1, 0.2)))

    def test_equalities_allowed(self):
        XyxThresholds(t_u=0.5, t_v=(0.5, 0.5), t_w=((0.5, 0.5), (0.5, 0.5)))

    def test_nan_rejected(self):
        with pytest.raises(ValueError, match="NaN"):
            YxThresholds(t_v=math.nan, t_w=(0.5, 0.4))


class TestXyxJointProbs:
    def test_first_bit_always_one(self):
        # t_u = -inf makes R_{u=1} the whole line
        m = GaussianModel(1.3, 1.0)
        thr = XyxThresholds(t_u=-INF, t_v=(0.7, 0.3), t_w=((0.6, 0.9), (0.1, 0.4)))
        for hyp in (0, 1):
            joint = xyx_joint_probs(m, thr, hyp)
            for v in (0, 1):
                want = tail_prob(m, thr.t_w[v][1], hyp, "x")
                assert joint[1, v, 1] == pytest.approx(want, abs=1e-15)
                assert joint[1, v, 0] == 0.0
                assert joint[0, v, 0] == 0.0

    def test_normalization_identity(self):
        m = GaussianModel(1.0, 1.0)
        thr = XyxThresholds(t_u=0.5, t_v=(0.5, 0.5), t_w=((0.5, 0.5), (0.5, 0.5)))
        for hyp in (0, 1):
            joint = xyx_joint_probs(m, thr, hyp)
            for v in (0, 1):
                assert joint[:, v, :].sum() == pytest.approx(1.0, abs=1e-12)

    def test_normalization_on_random_tables(self):
        rng = np.random.default_rng(2024)
        m = GaussianModel(0.8, 1.4)
        for _ in range(200):
            thr = _ordered_table(rng)
            for hyp in (0, 1):
                joint = xyx_joint_probs(m, thr, hyp)
                assert np.all(joint >= 0.0) and np.all(joint <= 1.0)
                for v in (0, 1):
                    assert joint[:, v, :].sum() == pytest.approx(1.0, abs=1e-12)

    def test_matches_interval_quadrature(self):
        rng = np.random.default_rng(7)
        m = GaussianModel(1.1, 0.9)
        for _ in range(15):
            thr = _ordered_table(rng)
            for hyp in (0, 1):
                got = xyx_joint_probs(m, thr, hyp)
                want = joint_probs_by_quadrature(m, thr, hyp)
                np.testing.assert_allclose(got, want, atol=1e-9)

    def test_degenerate_threshold_continuity(self):
        m = GaussianModel(1.0, 1.0)
        previous = None
        for big in (5.0, 10.0, 20.0, 50.0, 1e6):
            thr = XyxThresholds(t_u=0.5, t_v=(0.6, 0.4), t_w=((big, big), (0.2, 0.3)))
            joint = xyx_joint_probs(m, thr, 0)
            assert not np.any(np.isnan(joint))
            mass_v0_fire = joint[1, 0, :].sum()
            if previous is not None:
                assert mass_v0_fire <= previous + 1e-15
            previous = mass_v0_fire
        assert previous == 0.0  # limit reached exactly in the clamp region

    def test_all_infinite_combinations_nan_free(self):
        m = GaussianModel(1.0, 2.0)
        for t_u in (-INF, 0.5, INF):
            for cut in (-INF, INF):
                thr = XyxThresholds(t_u=t_u, t_v=(0.5, 0.5), t_w=((cut, cut), (cut, cut)))
                for hyp in (0, 1):
                    joint = xyx_joint_probs(m, thr, hyp)
                    assert not np.any(np.isnan(joint))
                    for v in (0, 1):
                        assert joint[:, v, :].sum() == pytest.approx(1.0, abs=1e-12)
