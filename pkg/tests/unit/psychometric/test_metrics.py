"""
Unit tests for curve metrics
"""

import numpy as np
import pytest

from acoustic_psnr.exceptions import LevelNotReachedError, UsageError
from acoustic_psnr.psychometric import (
    CurvePoint,
    LogisticFit,
    PsychometricCurve,
    empirical_crossing,
    metrics_empirical,
    metrics_from_fit,
    smoothed_rates,
    summarize_curve,
)


def exact_points(fit: LogisticFit, snr_values, n: int = 1000):
    return [CurvePoint(float(x), n, int(round(fit.p(x) * n))) for x in snr_values]


class TestMetricsFromFit:
    """Test cases for metrics_from_fit"""

    def test_closed_form(self):
        """Test the interval bounds are the fitted crossings"""
        fit = LogisticFit(x0=-8.0, k=0.5, v=2.0)
        metrics = metrics_from_fit(fit, 0.05, 0.95)
        assert metrics.snr_50 == pytest.approx(fit.snr_50)
        assert metrics.snr_lo == pytest.approx(fit.snr_at(0.05))
        assert metrics.interval_width == pytest.approx(fit.snr_at(0.95) - fit.snr_at(0.05))
        assert metrics.source == "fit"

    def test_configurable_levels(self):
        """Test other detection levels are honoured"""
        fit = LogisticFit(x0=0.0, k=1.0, v=1.0)
        metrics = metrics_from_fit(fit, 0.25, 0.75)
        assert metrics.snr_lo == pytest.approx(-np.log(3.0))
        assert metrics.snr_hi == pytest.approx(np.log(3.0))

    @pytest.mark.parametrize("levels", [(0.0, 0.9), (0.5, 0.5), (0.9, 0.1)])
    def test_bad_levels(self, levels):
        """Test levels must be ordered inside (0, 1)"""
        with pytest.raises(UsageError):
            metrics_from_fit(LogisticFit(0.0, 1.0, 1.0), *levels)


class TestEmpirical:
    """Test cases for the empirical metrics"""

    def test_agrees_with_fit_on_exact_rates(self):
        """Test empirical snr_50 is within 0.5 dB of the generating curve"""
        fit = LogisticFit(x0=-8.0, k=0.5, v=2.0)
        metrics = metrics_empirical(exact_points(fit, np.arange(-30.0, 11.0)))
        assert metrics.snr_50 == pytest.approx(fit.snr_50, abs=0.5)
        assert metrics.infl_50 == pytest.approx(fit.infl_50, rel=0.15)
        assert metrics.unavailable == []

    def test_step_crossing(self):
        """Test a step is located within one bin"""
        points = [CurvePoint(float(x), 10, 0 if x < 0 else 10) for x in range(-5, 6)]
        assert -1.0 <= empirical_crossing(points, 0.5) <= 0.0

    def test_unreached_levels(self):
        """Test levels the rates never cross are reported, or raised when strict"""
        points = [CurvePoint(float(x), 10, d) for x, d in zip(range(5), [2, 3, 5, 7, 8])]
        metrics = metrics_empirical(points, 0.05, 0.95)
        assert metrics.snr_lo is None and metrics.snr_hi is None
        assert metrics.unavailable == [0.05, 0.95]
        assert metrics.interval_width is None
        with pytest.raises(LevelNotReachedError):
            metrics_empirical(points, 0.05, 0.95, strict=True)

    def test_snr_50_required(self):
        """Test a curve that never reaches 0.5 has no empirical metrics"""
        points = [CurvePoint(float(x), 10, 1) for x in range(5)]
        with pytest.raises(LevelNotReachedError) as info:
            metrics_empirical(points)
        assert info.value.level == 0.5

    def test_isotonic_smoothing(self):
        """Test non-monotone rates are pooled into a non-decreasing sequence"""
        points = [CurvePoint(float(x), 10, d) for x, d in zip(range(5), [1, 4, 2, 8, 9])]
        snr, rates = smoothed_rates(points)
        np.testing.assert_array_equal(snr, [0, 1, 2, 3, 4])
        assert np.all(np.diff(rates) >= 0.0)
        np.testing.assert_allclose(rates[1:3], [0.3, 0.3])


class TestSummarizeCurve:
    """Test cases for summarize_curve"""

    def test_attaches_both_variants(self):
        """Test fit and empirical metrics are attached"""
        fit = LogisticFit(x0=-8.0, k=0.5, v=2.0)
        curve = PsychometricCurve(exact_points(fit, np.arange(-30.0, 11.0)), fit=fit)
        summarize_curve(curve)
        assert curve.metrics["fit"].source == "fit"
        assert curve.metrics["empirical"].source == "empirical"

    def test_requires_fit(self):
        """Test an unfitted curve is refused"""
        with pytest.raises(UsageError):
            summarize_curve(PsychometricCurve([CurvePoint(0.0, 1, 1)]))


if __name__ == "__main__":
    pytest.main([__file__])
