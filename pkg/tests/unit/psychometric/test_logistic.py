"""
Unit tests for the generalised logistic
"""

import math

import numpy as np
import pytest

from acoustic_psnr.exceptions import UsageError
from acoustic_psnr.psychometric import (
    LogisticFit,
    logistic_p,
    logistic_slope,
    slope_at_half,
    snr_at_probability,
)


class TestLogisticP:
    """Test cases for logistic_p"""

    def test_matches_direct_formula(self):
        """Test the log-space evaluation against the textbook expression"""
        expected = (1.0 + math.exp(-0.48 * (0.0 + 10.1))) ** -1.6
        assert logistic_p(0.0, -10.1, 0.48, 1.6) == pytest.approx(expected, abs=1e-12)

    def test_v1_is_half_at_x0(self):
        """Test the symmetric curve passes 0.5 at its inflection"""
        assert logistic_p(-8.0, -8.0, 0.5, 1.0) == pytest.approx(0.5)

    def test_tails_saturate(self):
        """Test extreme SNRs give 0 and 1 without overflow"""
        values = logistic_p(np.array([-1e4, 1e4]), 0.0, 1.0, 2.0)
        np.testing.assert_allclose(values, [0.0, 1.0])
        assert np.all(np.isfinite(values))

    def test_monotone(self):
        """Test p is non-decreasing in snr"""
        values = logistic_p(np.linspace(-40, 20, 200), -8.0, 0.5, 2.0)
        assert np.all(np.diff(values) >= 0.0)

    def test_invalid_shape(self):
        """Test non-positive k or v are refused"""
        with pytest.raises(UsageError):
            logistic_p(0.0, 0.0, 0.0, 1.0)
        with pytest.raises(UsageError):
            LogisticFit(x0=0.0, k=1.0, v=-1.0)


class TestSnrAtProbability:
    """Test cases for the closed-form inverse"""

    def test_round_trip(self):
        """Test snr_at_probability inverts logistic_p on random parameters"""
        rng = np.random.default_rng(0)
        for _ in range(1000):
            x0 = rng.uniform(-20.0, 10.0)
            k = rng.uniform(0.1, 2.0)
            v = rng.uniform(0.3, 3.0)
            p = rng.uniform(0.01, 0.99)
            snr = snr_at_probability(p, x0, k, v)
            assert logistic_p(snr, x0, k, v) == pytest.approx(p, abs=1e-9)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5, float("nan")])
    def test_probability_out_of_range(self, p):
        """Test levels outside the open unit interval are refused"""
        with pytest.raises(UsageError):
            snr_at_probability(p, 0.0, 1.0, 1.0)


class TestSlope:
    """Test cases for logistic_slope / slope_at_half"""

    def test_slope_at_half_closed_form(self):
        """Test the closed form agrees with the derivative at snr_50"""
        fit = LogisticFit(x0=-8.0, k=0.5, v=2.0)
        assert slope_at_half(fit.k, fit.v) == pytest.approx(
            logistic_slope(fit.snr_50, fit.x0, fit.k, fit.v), rel=1e-10
        )

    def test_infl_50_finite_difference(self):
        """Test infl_50 matches a central difference with h = 1e-5"""
        fit = LogisticFit(x0=-10.1, k=0.48, v=1.6)
        h = 1e-5
        numeric = (fit.p(fit.snr_50 + h) - fit.p(fit.snr_50 - h)) / (2.0 * h)
        assert fit.infl_50 == pytest.approx(numeric, rel=1e-6)

    def test_symmetric_slope(self):
        """Test v = 1 gives k / 4 at the midpoint"""
        assert slope_at_half(0.4, 1.0) == pytest.approx(0.1)


class TestLogisticFit:
    """Test cases for LogisticFit helpers"""

    def test_shifted(self):
        """Test shifting x0 moves every crossing by the same amount"""
        fit = LogisticFit(x0=-8.0, k=0.5, v=2.0)
        assert fit.shifted(1.5).snr_at(0.9) == pytest.approx(fit.snr_at(0.9) + 1.5)

    def test_to_dict(self):
        """Test the dict form carries the parameters"""
        assert LogisticFit(-1.0, 0.5, 1.0).to_dict() == {"x0": -1.0, "k": 0.5, "v": 1.0, "nll": None}


if __name__ == "__main__":
    pytest.main([__file__])
