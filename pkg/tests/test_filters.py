import warnings
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given

from stochso3.errors import SingularityError
from stochso3.filters import (
    EPS_GUARD,
    FILTERS,
    FilterGains,
    FilterState,
    QuatFilterState,
    attitude_error,
    det_filter_step,
    det_rates,
    initial_state,
    ito_filter_step,
    ito_filter_step_quat,
    ito_rates,
    ito_rates_quat,
    lyapunov_v,
    strat_filter_step,
    strat_filter_step_quat,
    strat_rates,
    strat_rates_quat,
)
from stochso3.harness import generate_measurements, run_filter
from stochso3.quaternion import rotation_to_quat
from stochso3.scenario import preset
from stochso3.so3 import angle_axis_to_rotation, exp_so3, rodriguez_to_rotation
from strategies import random_rotation, seeds

E1 = np.array([1.0, 0, 0])
GAINS = FilterGains()
MATRIX_STEPS = (det_filter_step, ito_filter_step, strat_filter_step)


def reference_laws(r_y, r_hat, b_hat, s_hat, omega_m, g, strat=False):
    """Update laws written with explicit 3x3 matrices, as in the listings."""
    rt = r_y.T @ r_hat
    pa = 0.5 * (rt - rt.T)
    ups = np.array([pa[2, 1], pa[0, 2], pa[1, 0]])
    d = 0.25 * np.trace(np.eye(3) - rt)
    d_ups = np.column_stack([ups, ups, ups])
    w = (g.k1 / g.epsilon) * (2 - d) / (1 - d) * ups + g.k2 * d_ups @ s_hat
    b_dot = g.gamma1 * d * ups - g.gamma1 * g.kb * b_hat
    if not strat:
        s_dot = g.k1 * g.gamma2 * d * d_ups.T @ ups - g.gamma2 * g.ksigma * s_hat
        return omega_m - b_hat - w, b_dot, s_dot
    half = 0.5 * np.diag(ups) / (1 - d)
    s_dot = g.gamma2 * d * (g.k1 * d_ups.T + half) @ ups - g.gamma2 * g.ksigma * s_hat
    return omega_m - b_hat - half @ s_hat - w, b_dot, s_dot


def e1_state(**kw):
    return FilterState(rodriguez_to_rotation(E1), **kw), np.eye(3)


class TestGains:
    def test_defaults(self):
        g = FilterGains()
        assert (g.gamma1, g.gamma2, g.k1, g.k2, g.kb, g.ksigma, g.epsilon) == (1, 1, 0.5, 0.5, 0.5, 0.5, 0.5)

    def test_defaults_do_not_warn(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            FilterGains()

    @pytest.mark.parametrize("kw", [{"gamma1": 0.5}, {"gamma2": 0.9}, {"k1": 0.2}, {"k2": 0.1}])
    def test_outside_stability_conditions_warns(self, kw):
        with pytest.warns(UserWarning):
            FilterGains(**kw)

    @pytest.mark.parametrize("name", ["gamma1", "k1", "kb", "ksigma", "epsilon"])
    def test_nonpositive_rejected(self, name):
        with pytest.raises(ValueError):
            FilterGains(**{name: 0.0})


class TestAttitudeError:
    def test_zero_error(self, rng):
        r = random_rotation(rng)
        rt, ups, d = attitude_error(r, r)
        np.testing.assert_allclose(rt, np.eye(3), atol=1e-15)
        np.testing.assert_allclose(ups, 0, atol=1e-15)
        assert d == pytest.approx(0, abs=1e-15)

    def test_e1(self, rng):
        r_y = random_rotation(rng)
        _, ups, d = attitude_error(r_y, r_y @ rodriguez_to_rotation(E1))
        np.testing.assert_allclose(ups, E1, atol=1e-12)
        assert d == pytest.approx(0.5, abs=1e-12)

    def test_left_invariance(self, rng):
        for _ in range(100):
            a, b, s = random_rotation(rng), random_rotation(rng), random_rotation(rng)
            assert attitude_error(s @ a, s @ b)[2] == pytest.approx(attitude_error(a, b)[2], abs=1e-12)


class TestHandEvaluated:
    def test_det(self):
        state, r_y = e1_state()
        rate, b_dot, s_dot = det_rates(state, np.zeros(3), r_y, GAINS)
        np.testing.assert_allclose(-rate, [0.5, 0, 0], atol=1e-12)
        np.testing.assert_allclose(b_dot, E1, atol=1e-12)
        np.testing.assert_array_equal(s_dot, np.zeros(3))

    def test_ito(self):
        state, r_y = e1_state()
        rate, b_dot, s_dot = ito_rates(state, np.zeros(3), r_y, GAINS)
        np.testing.assert_allclose(-rate, [3, 0, 0], atol=1e-12)
        np.testing.assert_allclose(b_dot, [0.5, 0, 0], atol=1e-12)
        np.testing.assert_allclose(s_dot, [0.25, 0.25, 0.25], atol=1e-12)

    def test_strat(self):
        state, r_y = e1_state()
        rate, b_dot, s_dot = strat_rates(state, np.zeros(3), r_y, GAINS)
        np.testing.assert_allclose(-rate, [3, 0, 0], atol=1e-12)
        np.testing.assert_allclose(b_dot, [0.5, 0, 0], atol=1e-12)
        np.testing.assert_allclose(s_dot, [0.75, 0.25, 0.25], atol=1e-12)

    @pytest.mark.parametrize("strat", [False, True])
    @given(seeds)
    def test_against_reference_laws(self, strat, seed):
        rng = np.random.default_rng(seed)
        r_y = random_rotation(rng)
        r_hat = r_y @ exp_so3(rng.normal(size=3), rng.uniform(0, 1))
        b, s, om = rng.normal(size=3), rng.uniform(0, 1, 3), rng.normal(size=3)
        g = FilterGains(gamma1=1 + rng.uniform(), gamma2=1.5, k1=0.6, k2=0.3, kb=0.2, ksigma=0.7, epsilon=0.4)
        fn = strat_rates if strat else ito_rates
        got = fn(FilterState(r_hat, b, s), om, r_y, g)
        want = reference_laws(r_y, r_hat, b, s, om, g, strat)
        for x, y in zip(got, want):
            np.testing.assert_allclose(x, y, atol=1e-12)


class TestZeroError:
    @pytest.mark.parametrize("rates", [ito_rates, strat_rates])
    def test_leakage_only(self, rates, rng):
        r = random_rotation(rng)
        b, s, om = rng.normal(size=3), rng.uniform(0, 1, 3), rng.normal(size=3)
        rate, b_dot, s_dot = rates(FilterState(r, b, s), om, r, GAINS)
        np.testing.assert_allclose(rate, om - b, atol=1e-15)
        np.testing.assert_allclose(b_dot, -GAINS.gamma1 * GAINS.kb * b, atol=1e-15)
        np.testing.assert_allclose(s_dot, -GAINS.gamma2 * GAINS.ksigma * s, atol=1e-15)

    @pytest.mark.parametrize("rates", [ito_rates_quat, strat_rates_quat])
    def test_leakage_only_quat(self, rates, rng):
        q = rotation_to_quat(random_rotation(rng))
        b, s, om = rng.normal(size=3), rng.uniform(0, 1, 3), rng.normal(size=3)
        rate, b_dot, s_dot = rates(QuatFilterState(q, b, s), om, q, GAINS)
        np.testing.assert_allclose(rate, om - b, atol=1e-15)
        np.testing.assert_allclose(b_dot, -0.5 * b, atol=1e-15)
        np.testing.assert_allclose(s_dot, -0.5 * s, atol=1e-15)

    @pytest.mark.parametrize("step", MATRIX_STEPS)
    def test_correction_vanishes(self, step, rng):
        r = random_rotation(rng)
        b = rng.normal(size=3)
        out = step(FilterState(r, b), b, r, GAINS, 1e-3)
        np.testing.assert_allclose(out.r_hat, r, atol=1e-15)

    def test_det_fixed_point(self, rng):
        r = random_rotation(rng)
        b = rng.normal(size=3)
        out = det_filter_step(FilterState(r, b), b, r, GAINS, 1e-3)
        np.testing.assert_allclose(out.r_hat, r, atol=1e-15)
        np.testing.assert_array_equal(out.b_hat, b)
        np.testing.assert_array_equal(out.sigma_hat, np.zeros(3))


class TestQuaternionForms:
    @pytest.mark.parametrize("pair", [(ito_rates, ito_rates_quat), (strat_rates, strat_rates_quat)])
    @given(seeds)
    def test_rates_match_matrix_form(self, pair, seed):
        mat, quat = pair
        rng = np.random.default_rng(seed)
        r_y = random_rotation(rng)
        r_hat = r_y @ exp_so3(rng.normal(size=3), rng.uniform(0, 1))
        b, s, om = rng.normal(size=3), rng.uniform(0, 1, 3), rng.normal(size=3)
        got = quat(QuatFilterState(rotation_to_quat(r_hat), b, s), om, rotation_to_quat(r_y), GAINS)
        want = mat(FilterState(r_hat, b, s), om, r_y, GAINS)
        for x, y in zip(got, want):
            np.testing.assert_allclose(x, y, atol=1e-9)

    @pytest.mark.parametrize("rates", [ito_rates_quat, strat_rates_quat])
    def test_sign_invariance(self, rates, rng):
        for _ in range(50):
            q_hat, q_y = rotation_to_quat(random_rotation(rng)), rotation_to_quat(random_rotation(rng))
            b, s, om = rng.normal(size=3), rng.uniform(0, 1, 3), rng.normal(size=3)
            ref = rates(QuatFilterState(q_hat, b, s), om, q_y, GAINS)
            for qh, qy in ((-q_hat, q_y), (q_hat, -q_y), (-q_hat, -q_y)):
                got = rates(QuatFilterState(qh, b, s), om, qy, GAINS)
                for x, y in zip(got, ref):
                    np.testing.assert_allclose(x, y, atol=1e-12)

    def test_short_run_equivalence(self):
        sc = replace(preset("paper-sV"), grid=replace(preset("paper-sV").grid, t_end=2.0))
        meas = generate_measurements(sc, 0)
        for a, b in (("ito", "ito-quat"), ("strat", "strat-quat")):
            ra, rb = run_filter(sc, a, meas).r_hat, run_filter(sc, b, meas).r_hat
            assert np.linalg.norm(ra - rb, axis=(1, 2)).max() < 1e-6

    def test_stratonovich_sigma_differs(self):
        sc = replace(preset("paper-sV"), grid=replace(preset("paper-sV").grid, t_end=1.0))
        meas = generate_measurements(sc, 0)
        si = run_filter(sc, "ito-quat", meas).sigma_hat[-1]
        ss = run_filter(sc, "strat-quat", meas).sigma_hat[-1]
        assert np.linalg.norm(ss - si) > 1e-3


class TestNearHalfTurn:
    R_HAT0 = angle_axis_to_rotation(np.deg2rad(179.9), np.array([1.0, 5, 3]) / np.sqrt(35))

    @pytest.mark.parametrize("step", [ito_filter_step, strat_filter_step])
    def test_strict_mode_raises(self, step):
        with pytest.raises(SingularityError):
            step(FilterState(self.R_HAT0), np.zeros(3), np.eye(3), GAINS, 1e-3, saturate=False)

    @pytest.mark.parametrize("step", [ito_filter_step_quat, strat_filter_step_quat])
    def test_strict_mode_raises_quat(self, step):
        q = rotation_to_quat(self.R_HAT0)
        with pytest.raises(SingularityError):
            step(QuatFilterState(q), np.zeros(3), np.array([1.0, 0, 0, 0]), GAINS, 1e-3, saturate=False)

    def test_saturated_gain(self):
        rate, _, _ = ito_rates(FilterState(self.R_HAT0), np.zeros(3), np.eye(3), GAINS)
        _, ups, d = attitude_error(np.eye(3), self.R_HAT0)
        # (2 - d) / max(1 - d, guard)
        np.testing.assert_allclose(-rate, (2 - d) / EPS_GUARD * ups, rtol=1e-12)
        assert np.all(np.isfinite(rate))

    def test_exact_half_turn_saturates_to_zero_correction(self):
        r = angle_axis_to_rotation(np.pi, np.array([0.0, 0, 1]))
        rate, _, _ = ito_rates(FilterState(r), np.zeros(3), np.eye(3), GAINS)
        np.testing.assert_allclose(rate, 0, atol=1e-9)


class TestOrthonormality:
    @pytest.mark.parametrize("filter_id", sorted(FILTERS))
    def test_estimate_stays_on_so3(self, filter_id):
        sc = preset("paper-sV")
        sc = replace(sc, grid=replace(sc.grid, t_end=3.0))
        r = run_filter(sc, filter_id, generate_measurements(sc, 1)).r_hat
        drift = np.linalg.norm(np.swapaxes(r, 1, 2) @ r - np.eye(3), axis=(1, 2))
        assert drift.max() < 1e-9

    def test_initial_state(self):
        r = random_rotation(np.random.default_rng(0))
        s = initial_state("ito-quat", r)
        assert isinstance(s, QuatFilterState)
        np.testing.assert_allclose(s.rotation(), r, atol=1e-12)
        assert isinstance(initial_state("det", r), FilterState)


class TestLyapunov:
    def test_examples(self):
        z = np.zeros(3)
        assert lyapunov_v(z, z, z, GAINS) == 0.0
        assert lyapunov_v(E1, z, z, GAINS) == pytest.approx(0.25)
        assert lyapunov_v(E1, z, z, GAINS, form="deterministic") == pytest.approx(0.5)

    def test_bias_and_sigma_terms(self):
        g = FilterGains(gamma1=2.0, gamma2=4.0)
        z = np.zeros(3)
        assert lyapunov_v(z, np.ones(3), z, g) == pytest.approx(3 / 4)
        assert lyapunov_v(z, z, np.ones(3), g) == pytest.approx(3 / 8)
        assert lyapunov_v(z, np.ones(3), np.ones(3), g, form="deterministic") == pytest.approx(3 / 4)

    def test_unknown_form(self):
        with pytest.raises(ValueError):
            lyapunov_v(E1, E1, E1, GAINS, form="quadratic")


def _det_bias_run(angle_deg):
    sc = replace(preset("bias-only"), initial_angle_deg=angle_deg)
    tr = run_filter(sc, "det", generate_measurements(sc, 0))
    b_err = sc.noise.gyro_bias - tr.b_hat
    return tr, b_err, sc.gains


def test_det_error_decreases_noise_free():
    # passive filter from the 179.9 deg start with exact measurements and no bias
    sc = preset("noise-free")
    err = run_filter(sc, "det", generate_measurements(sc, 0)).err_dist
    assert np.diff(err).max() <= 1e-9


@pytest.mark.parametrize("angle_deg", [30.0, 90.0, 179.9])
def test_det_scaled_potential_decreases(angle_deg):
    # d||R~||_I/dt = Upsilon^T (b~ - W) / 2, so 2||R~||_I + |b~|^2 / (2 gamma1)
    # has derivative -k1 |Upsilon|^2 under b_hat_dot = gamma1 Upsilon
    tr, b_err, g = _det_bias_run(angle_deg)
    v = 2 * tr.err_dist + np.einsum("ij,ij->i", b_err, b_err) / (2 * g.gamma1)
    assert np.diff(v).max() <= 1e-9


def test_det_converges_from_quarter_turn():
    tr, b_err, _ = _det_bias_run(90.0)
    assert tr.err_dist[-1] < 1e-3
    assert np.abs(b_err[-1]).max() < 0.05
