import numpy as np
import pytest

from wiwi.analysis import WindowError, drift_fit, stationary_sigma, step_estimate
from wiwi.twcp import TwcpSample, TwcpSeries

C = 299792458.0


def _series(epochs, t_d, t_c=None):
    t_c = np.zeros_like(epochs) if t_c is None else t_c
    samples = [
        TwcpSample(
            epoch=float(e),
            phi_A=0.0,
            phi_B=0.0,
            t_A=float(d - c),
            t_B=float(d + c),
            t_c=float(c),
            t_d=float(d),
            l_d_var=float((d - t_d[0]) * C),
        )
        for e, d, c in zip(epochs, t_d, t_c)
    ]
    return TwcpSeries(samples=samples)


class TestStationarySigma:
    def test_known_white_noise(self):
        rng = np.random.default_rng(0)
        epochs = np.arange(0.0, 100.0, 0.1)
        noise = rng.normal(0.0, 2.2e-12, epochs.size)
        sigma = stationary_sigma(_series(epochs, 1e-9 + noise), (0.0, 100.0))
        # 1000 samples: the sample std sits within the chi-square 99% band
        n = epochs.size
        lo = 2.2e-12 * np.sqrt((n - 1 - 3.3 * np.sqrt(2 * (n - 1))) / (n - 1))
        hi = 2.2e-12 * np.sqrt((n - 1 + 3.3 * np.sqrt(2 * (n - 1))) / (n - 1))
        assert lo < sigma < hi

    def test_mean_removed(self):
        epochs = np.arange(0.0, 10.0, 0.1)
        sigma = stationary_sigma(_series(epochs, np.full(epochs.size, 5e-9)), (0.0, 10.0))
        assert sigma == 0.0

    def test_too_few_samples_names_window(self):
        epochs = np.arange(0.0, 1.0, 0.1)
        with pytest.raises(WindowError, match=r"\[0.0, 0.5\]"):
            stationary_sigma(_series(epochs, np.zeros(epochs.size)), (0.0, 0.5))

    def test_empty_window(self):
        epochs = np.arange(0.0, 1.0, 0.1)
        with pytest.raises(WindowError):
            stationary_sigma(_series(epochs, np.zeros(epochs.size)), (50.0, 60.0))


class TestStepEstimate:
    def _step_series(self, step, noise_sigma=0.0, seed=0):
        epochs = np.arange(0.0, 60.0, 0.05)
        t_d = np.where(epochs >= 30.0, step, 0.0)
        if noise_sigma:
            t_d = t_d + np.random.default_rng(seed).normal(0.0, noise_sigma, epochs.size)
        return _series(epochs, t_d)

    def test_clean_step_exact(self):
        step = 5e-3 / C  # 5 mm of range as propagation time
        report = step_estimate(self._step_series(step), 30.0, guard=2.0, window=10.0)
        assert report.delta_t_d == pytest.approx(step, rel=1e-12)
        assert report.delta_l == pytest.approx(5e-3, rel=1e-12)
        assert report.pre_n > 190
        assert report.post_n > 190

    def test_noisy_step_within_sub_mm(self):
        step = 1e-3 / C
        report = step_estimate(
            self._step_series(step, noise_sigma=2.2e-12, seed=3), 30.0, guard=2.0, window=15.0
        )
        assert report.delta_l == pytest.approx(1e-3, abs=3e-4)
        assert report.pre_std == pytest.approx(2.2e-12, rel=0.25)

    def test_guard_excludes_ramp(self):
        # linear 2 s ramp between the levels; the guard keeps it out
        epochs = np.arange(0.0, 60.0, 0.05)
        step = 5e-3 / C
        t_d = np.interp(epochs, [29.0, 31.0], [0.0, step])
        report = step_estimate(_series(epochs, t_d), 30.0, guard=2.0, window=10.0)
        assert report.delta_t_d == pytest.approx(step, rel=1e-12)

    def test_window_outside_series(self):
        series = self._step_series(0.0)
        with pytest.raises(WindowError, match="outside"):
            step_estimate(series, 5.0, guard=2.0, window=15.0)


class TestDriftFit:
    def test_recovers_slope_and_intercept(self):
        epochs = np.arange(0.0, 100.0, 0.1)
        t_c = 3e-9 + 2.8e-12 * epochs
        slope, intercept = drift_fit(_series(epochs, np.zeros(epochs.size), t_c))
        assert slope == pytest.approx(2.8e-12, rel=1e-9)
        assert intercept == pytest.approx(3e-9, rel=1e-9)

    def test_detrended_residual_small(self):
        rng = np.random.default_rng(1)
        epochs = np.arange(0.0, 100.0, 0.1)
        t_c = 1e-9 + 5e-12 * epochs + rng.normal(0.0, 1e-13, epochs.size)
        series = _series(epochs, np.zeros(epochs.size), t_c)
        slope, intercept = drift_fit(series)
        resid = t_c - (slope * epochs + intercept)
        assert np.std(resid) < 2e-13

    def test_needs_two_samples(self):
        with pytest.raises(WindowError):
            drift_fit(_series(np.array([0.0]), np.array([0.0])))
