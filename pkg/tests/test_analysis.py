"""Analysis-toolkit tests: phase conversion, fringe fitting, gain extraction."""

import math

import numpy as np
import pytest

from su11sim.analysis import (
    distance_to_phase,
    extract_gains,
    fit_fringe_points,
    fit_result_from_points,
    period,
    visibility,
)
from su11sim.errors import DataError, InconsistentMeasurementWarning
from su11sim.interferometer import InterferometerConfig, mean_output_approx, visibility_background


class TestPeriod:
    def test_air_gap_period(self):
        assert period(400.0, 1.5385e-5) == pytest.approx(52.0, abs=0.1)

    def test_inverse_proportionality(self):
        assert period(400.0, 2 * 1.5385e-5) == pytest.approx(period(400.0, 1.5385e-5) / 2, rel=1e-12)

    def test_linearity_in_wavelength(self):
        assert period(800.0, 1.5385e-5) == pytest.approx(2 * period(400.0, 1.5385e-5), rel=1e-12)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            period(0.0, 1e-5)
        with pytest.raises(ValueError):
            period(400.0, -1e-5)


class TestDistanceToPhase:
    def test_full_period_is_pi(self):
        assert distance_to_phase(52.0, 52.0) == pytest.approx(math.pi, abs=1e-12)

    def test_zero_distance(self):
        assert distance_to_phase(0.0, 52.0, phi0=0.7) == 0.7

    def test_half_period(self):
        assert distance_to_phase(26.0, 52.0) == pytest.approx(math.pi / 2, rel=1e-12)

    def test_rejects_bad_period(self):
        with pytest.raises(ValueError):
            distance_to_phase(1.0, 0.0)


class TestVisibility:
    def test_no_background(self):
        assert visibility(100.0, 0.0) == 1.0

    def test_half(self):
        assert visibility(10.0, 5.0) == 0.5

    def test_round_trip_through_background(self):
        cfg = InterferometerConfig.with_photon_number(
            2.1, 5.2, 4.5, mu=0.97, eta=0.77, visibility=0.97
        )
        amp = cfg.eta * cfg.mu * 4.5 * math.exp(2 * cfg.r2_abs)
        bg = visibility_background(cfg, 4.5)
        assert visibility(amp, bg) == pytest.approx(0.97, rel=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            visibility(0.0, 1.0)
        with pytest.raises(ValueError):
            visibility(1.0, -1.0)


class TestExtractGains:
    def test_symmetric_case(self):
        r1, nu = extract_gains(3.0, 3.0, 1.7)
        assert r1 == pytest.approx(1.7, rel=1e-12)
        assert nu == pytest.approx(3.0 / math.sinh(1.7) ** 2, rel=1e-12)

    def test_low_gain_case(self):
        # moderate second-crystal gain: 80 photons from the second crystal alone
        r1, nu = extract_gains(4.8, 80.0, 3.9)
        assert r1 == pytest.approx(2.499650, abs=1e-5)
        assert nu == pytest.approx(0.131223, abs=1e-5)
        assert (round(r1, 2), round(nu, 2)) == (2.5, 0.13)

    def test_high_gain_case(self):
        # strong second-crystal gain: 2437 photons from the second crystal alone
        r1, nu = extract_gains(4.8, 2437.0, 5.2)
        assert r1 == pytest.approx(2.100121, abs=1e-5)
        assert nu == pytest.approx(0.296674, abs=1e-5)

    def test_forward_inverse_round_trip(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            r1, r2 = rng.uniform(0.5, 3.0, 2)
            nu = rng.uniform(0.05, 1.0)
            n = nu * math.sinh(r1) ** 2
            n2 = n * math.sinh(r2) ** 2 / math.sinh(r1) ** 2
            r1_hat, nu_hat = extract_gains(n, n2, r2)
            assert r1_hat == pytest.approx(r1, abs=1e-10)
            assert nu_hat == pytest.approx(nu, abs=1e-10)

    def test_inconsistent_nu_warns(self):
        with pytest.warns(InconsistentMeasurementWarning):
            extract_gains(10.0, 10.0, 0.5)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            extract_gains(0.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            extract_gains(1.0, 1.0, 0.0)


def synth_points(a, b, phi0, phis):
    return a * np.sin(phis - phi0) ** 2 + b


class TestFringeFit:
    def test_noiseless_round_trip(self):
        phis = np.linspace(0.0, math.pi, 60)
        y = synth_points(8000.0, 100.0, 0.3, phis)
        p, errs, rnorm, _ = fit_fringe_points(phis, y)
        assert p[0] == pytest.approx(8000.0, rel=1e-6)
        assert p[1] == pytest.approx(100.0, rel=1e-6)
        assert p[2] == pytest.approx(0.3, abs=1e-6)
        assert rnorm <= 1e-5

    def test_recovers_r2_from_high_gain_model(self):
        # synthetic moderate- and strong-gain fringes from the high-gain model
        for r2 in (3.9, 5.2):
            cfg = InterferometerConfig(r1=2.5, r2_abs=r2, mu=0.97, eta=0.77)
            phis = np.linspace(0.0, math.pi, 40)
            y = mean_output_approx(cfg, phis, 4.8, 250.0)
            res = fit_result_from_points(phis, y, None, 0.77, 0.97, 4.8)
            assert res.r2_abs == pytest.approx(r2, abs=0.05)
            assert res.r2_abs == pytest.approx(r2, abs=1e-9)

    def test_pi_shift_invariance(self):
        phis = np.linspace(0.0, math.pi, 25)
        y = synth_points(500.0, 20.0, -0.2, phis)
        p0, _, _, _ = fit_fringe_points(phis, y)
        p1, _, _, _ = fit_fringe_points(phis + 3 * math.pi, y)
        assert p1[0] == pytest.approx(p0[0], rel=1e-9)
        assert p1[1] == pytest.approx(p0[1], rel=1e-9)

    def test_weighted_noisy_coverage(self):
        # calibrated errors: over 200 trials each parameter stays within
        # 2 sigma at least 90% of the time and within 3 sigma 95% of the time
        rng = np.random.default_rng(1)
        phis = np.linspace(0.0, math.pi, 30)
        truth = np.array([5000.0, 300.0, 0.15])
        sigma = np.full(phis.size, 40.0)
        hits2 = np.zeros(3)
        hits3_all = 0
        for _ in range(200):
            y = synth_points(*truth, phis) + rng.normal(0.0, sigma)
            p, errs, _, _ = fit_fringe_points(phis, y, sigma)
            pull = np.abs(p - truth) / errs
            hits2 += pull <= 2.0
            hits3_all += int(np.all(pull <= 3.0))
        assert np.all(hits2 >= 0.90 * 200)
        assert hits3_all >= 0.95 * 200

    def test_unweighted_errors_scale_with_residuals(self):
        rng = np.random.default_rng(2)
        phis = np.linspace(0.0, math.pi, 50)
        y = synth_points(1000.0, 50.0, 0.0, phis) + rng.normal(0.0, 10.0, phis.size)
        _, errs, _, _ = fit_fringe_points(phis, y)
        assert 0.5 < errs[0] < 50.0

    def test_preconditions(self):
        with pytest.raises(DataError):
            fit_fringe_points(np.array([0.0, 0.5, 1.0, 1.5]), np.array([1.0, 2.0, 3.0, 4.0]))
        phis = np.linspace(0.0, 1.0, 10)  # span < pi/2
        with pytest.raises(DataError):
            fit_fringe_points(phis, synth_points(10.0, 1.0, 0.0, phis))
        phis = np.linspace(0.0, math.pi, 10)
        with pytest.raises(DataError):
            fit_fringe_points(phis, np.full(10, 3.0))

    def test_negative_amplitude_normalized(self):
        # data shaped like a cos^2 fringe still yields A > 0 with shifted phi0
        phis = np.linspace(0.0, math.pi, 30)
        y = 100.0 * np.cos(phis) ** 2 + 5.0
        p, _, _, _ = fit_fringe_points(phis, y)
        assert p[0] == pytest.approx(100.0, rel=1e-6)
        assert p[1] == pytest.approx(5.0, rel=1e-4)
        assert abs(p[2]) == pytest.approx(math.pi / 2, abs=1e-6)
