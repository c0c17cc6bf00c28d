"""Multi-step memoryless interaction and K-sensor generalizations."""

import math

import numpy as np
import pytest
from scipy import special

from tandemfuse.asymptotic import maximize_kl_xyx, maximize_kl_yx
from tandemfuse.extensions import (
    MifDesign,
    MultiSensorModel,
    VecYxThresholds,
    XVecYxThresholds,
    _mif_kl_fast,
    lift_mif_design,
    mif_kl,
    mif_kl_max,
    mif_kl_search,
    multisensor_evaluate,
    multisensor_kl_max,
)
from tandemfuse.fixed_sample import evaluate_xyx, evaluate_yx
from tandemfuse.gaussian import GaussianModel, XyxThresholds, YxThresholds, q_tail
from tandemfuse.montecarlo import (
    estimate_mif_kl,
    random_mif_design,
    random_vecyx_thresholds,
    random_xvecyx_thresholds,
    simulate_fixed,
)

INF = math.inf


def _mif3(t_u, tv0, tv1):
    return MifDesign(3, ((t_u,), (tv0, tv1), (0.5, 0.5)))


class TestMifDesign:
    def test_rejects_even_or_small_step_counts(self):
        with pytest.raises(ValueError):
            MifDesign(4, ((0.5,), (0.5, 0.5), (0.5, 0.5), (0.5, 0.5)))
        with pytest.raises(ValueError):
            MifDesign(1, ((0.5,),))

    def test_rejects_wrong_table_shapes(self):
        with pytest.raises(ValueError):
            MifDesign(3, ((0.5, 0.5), (0.5, 0.5), (0.5, 0.5)))
        with pytest.raises(ValueError):
            MifDesign(3, ((0.5,), (0.5,), (0.5, 0.5)))

    def test_desk_scale_cap(self):
        steps = ((0.5,),) + tuple((0.5, 0.5) for _ in range(8))
        design = MifDesign(9, steps)
        with pytest.raises(ValueError, match="desk-scale"):
            mif_kl(GaussianModel(1, 1), design)

    def test_lift_preserves_value(self):
        m = GaussianModel(1.0, 1.0)
        design = _mif3(0.3, 0.8, 0.1)
        lifted = lift_mif_design(design)
        assert lifted.n_steps == 5
        assert _mif_kl_fast(m, lifted) == pytest.approx(_mif_kl_fast(m, design), abs=1e-14)


class TestMifKl:
    def test_three_steps_at_interactive_optimum(self):
        m = GaussianModel(1.0, 1.0)
        design, k_xyx = maximize_kl_xyx(m)
        mif = _mif3(design.t_u, design.t_v[0], design.t_v[1])
        assert mif_kl(m, mif) == pytest.approx(k_xyx, abs=1e-8)

    def test_mute_y_keeps_only_continuous_term(self):
        for sx in (0.5, 1.0):
            m = GaussianModel(sx, 1.0)
            design = MifDesign(5, ((0.3,), (INF, -INF), (0.1, 0.9), (INF, INF), (0.5, 0.5)))
            assert mif_kl(m, design) == pytest.approx(0.5 / sx**2, abs=1e-10)

    def test_fast_path_matches_quadrature(self):
        m = GaussianModel(0.9, 1.2)
        rng = np.random.default_rng(77)
        for n in (3, 5, 7):
            for _ in range(3):
                design = random_mif_design(rng, m, n)
                assert _mif_kl_fast(m, design) == pytest.approx(mif_kl(m, design), abs=1e-9)

    def test_matches_monte_carlo_loglikelihood_mean(self):
        m = GaussianModel(1.0, 1.0)
        rng = np.random.default_rng(909)
        design = random_mif_design(rng, m, 5)
        analytic = mif_kl(m, design)
        est = estimate_mif_kl(m, design, trials=400_000, seed=4242)
        assert abs(analytic - est.value) <= est.half_width

    def test_three_step_simulation_matches_interactive_evaluation(self):
        # a 3-step exchange is the interactive process whose final cut
        # ignores the first bit, so its simulated rates must bracket that
        # analytic operating point
        m = GaussianModel(1.0, 1.1)
        t1, (b0, b1), (c0, c1) = 0.4, (0.7, 0.2), (1.0, -0.1)
        design = MifDesign(3, ((t1,), (b0, b1), (c0, c1)))
        thr = XyxThresholds(t_u=t1, t_v=(b0, b1), t_w=((c0, c0), (c1, c1)))
        pt = evaluate_xyx(m, thr)
        pf_hat, pd_hat = simulate_fixed(m, "mif", design, 10**6, seed=616)
        assert abs(pt.pf - pf_hat.value) <= pf_hat.half_width
        assert abs(pt.pd - pd_hat.value) <= pd_hat.half_width


class TestMifSearch:
    def test_three_steps_equal_one_way(self):
        m = GaussianModel(1.0, 1.0)
        k_yx = maximize_kl_yx(m).k_total
        assert abs(mif_kl_max(m, 3) - k_yx) <= 1e-6

    def test_frozen_degenerate_x_steps_match_three_step_search(self):
        m = GaussianModel(1.0, 1.0)
        v3, _, _ = mif_kl_search(m, 3)
        v5, _, _ = mif_kl_search(m, 5, cut_candidates=(-INF, INF))
        assert abs(v5 - v3) <= 1e-9

    def test_budget_is_monotone_and_capped(self):
        m = GaussianModel(1.0, 1.0)
        k_yx = maximize_kl_yx(m).k_total
        v3, d3, _ = mif_kl_search(m, 3)
        v5, d5, _ = mif_kl_search(m, 5, extra_starts=(lift_mif_design(d3),))
        v7, _, _ = mif_kl_search(
            m, 7, cut_candidates=(-INF, INF), extra_starts=(lift_mif_design(d5),)
        )
        assert v3 <= v5 + 1e-9 and v5 <= v7 + 1e-9
        for v in (v3, v5, v7):
            assert v <= k_yx + 1e-6

    def test_invalid_step_count(self):
        with pytest.raises(ValueError):
            mif_kl_search(GaussianModel(1, 1), 4)


class TestMultisensorEvaluate:
    def test_one_sensor_reduces_to_yx_bit_identical(self):
        m1 = MultiSensorModel(1.3, (0.8,))
        m = GaussianModel(1.3, 0.8)
        thr = VecYxThresholds((0.4,), (0.9, 0.1))
        got = multisensor_evaluate(m1, "vecyx", thr)
        want = evaluate_yx(m, YxThresholds(0.4, (0.9, 0.1)))
        assert got.pf == want.pf and got.pd == want.pd

    def test_one_sensor_reduces_to_xyx_bit_identical(self):
        m1 = MultiSensorModel(1.1, (0.9,))
        m = GaussianModel(1.1, 0.9)
        thr = XVecYxThresholds(t_u=0.6, t_v=((0.75, 0.2),), t_w=((0.7, 1.3), (-0.4, 0.1)))
        got = multisensor_evaluate(m1, "xvecyx", thr)
        want = evaluate_xyx(
            m, XyxThresholds(t_u=0.6, t_v=(0.75, 0.2), t_w=((0.7, 1.3), (-0.4, 0.1)))
        )
        assert got.pf == want.pf and got.pd == want.pd

    def test_mute_peripherals_leave_single_sensor_x(self):
        m2 = MultiSensorModel(1.0, (1.0, 1.5))
        cut = 0.8
        thr = VecYxThresholds((INF, INF), (cut, -INF, -INF, -INF))
        pt = multisensor_evaluate(m2, "vecyx", thr)
        assert pt.pf == pytest.approx(q_tail(cut), abs=1e-15)
        assert pt.pd == pytest.approx(q_tail(cut - 1), abs=1e-15)

    def test_two_sensor_monte_carlo_agreement(self):
        m2 = MultiSensorModel(1.0, (0.9, 1.4))
        rng = np.random.default_rng(33)
        thr = random_xvecyx_thresholds(rng, m2)
        pt = multisensor_evaluate(m2, "xvecyx", thr)
        pf_hat, pd_hat = simulate_fixed(m2, "xvecyx", thr, 10**6, seed=55)
        assert abs(pt.pf - pf_hat.value) <= pf_hat.half_width
        assert abs(pt.pd - pd_hat.value) <= pd_hat.half_width
        thr_v = random_vecyx_thresholds(rng, m2)
        pt = multisensor_evaluate(m2, "vecyx", thr_v)
        pf_hat, pd_hat = simulate_fixed(m2, "vecyx", thr_v, 10**6, seed=56)
        assert abs(pt.pf - pf_hat.value) <= pf_hat.half_width
        assert abs(pt.pd - pd_hat.value) <= pd_hat.half_width

    def test_shape_mismatch_rejected(self):
        m2 = MultiSensorModel(1.0, (1.0, 1.0))
        thr = VecYxThresholds((0.4,), (0.9, 0.1))
        with pytest.raises(ValueError):
            multisensor_evaluate(m2, "vecyx", thr)

    def test_sensor_cap(self):
        m4 = MultiSensorModel(1.0, (1.0, 1.0, 1.0, 1.0))
        thr = VecYxThresholds((0.5,) * 4, (0.5,) * 16)
        with pytest.raises(ValueError, match="desk-scale"):
            multisensor_evaluate(m4, "vecyx", thr)


class TestMultisensorKlMax:
    def test_single_sensor_matches_two_sensor_module(self):
        m1 = MultiSensorModel(1.0, (1.0,))
        res = multisensor_kl_max(m1)
        want = maximize_kl_yx(GaussianModel(1.0, 1.0))
        assert res.k_vecyx == pytest.approx(want.k_total, abs=1e-9)
        assert abs(res.k_xvecyx - want.k_total) <= 1e-6
        assert res.vec_thresholds[0] == pytest.approx(want.t_star, abs=1e-6)

    def test_identical_sensors_share_the_optimal_cut(self):
        res = multisensor_kl_max(MultiSensorModel(1.0, (1.3, 1.3)))
        assert res.vec_thresholds[0] == pytest.approx(res.vec_thresholds[1], abs=1e-9)

    def test_two_sensor_no_gain(self):
        res = multisensor_kl_max(MultiSensorModel(1.0, (1.0, 1.0)))
        assert abs(res.k_xvecyx - res.k_vecyx) <= 1e-6

    def test_separability_of_one_way_value(self):
        model = MultiSensorModel(0.8, (0.9, 1.5))
        res = multisensor_kl_max(model)
        total = 0.5 / model.sigma_x**2
        for s in model.sigma_ys:
            ts = np.arange(-3 * s, 3 * s + 1, 1e-4)
            prof = special.rel_entr(q_tail(ts / s), q_tail((ts - 1) / s)) + special.rel_entr(
                1 - q_tail(ts / s), 1 - q_tail((ts - 1) / s)
            )
            total += float(prof.max())
        assert res.k_vecyx == pytest.approx(total, abs=1e-7)
