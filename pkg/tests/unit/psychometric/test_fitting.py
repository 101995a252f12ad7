"""
Unit tests for maximum-likelihood fitting and the bootstrap
"""

import numpy as np
import pandas as pd
import pytest

from acoustic_psnr.exceptions import BootstrapError, CurveNotIdentifiableError
from acoustic_psnr.psychometric import (
    CurvePoint,
    LogisticFit,
    bootstrap_ci,
    fit_mle,
    negative_log_likelihood,
    simulate_curve,
)

SNR_GRID = np.arange(-30.0, 11.0, 1.0)
GENERATOR = LogisticFit(x0=-8.0, k=0.5, v=2.0)


@pytest.fixture(scope="module")
def simulated():
    return simulate_curve(GENERATOR, SNR_GRID, n_trials=1000, seed=11)


class TestFitMle:
    """Test cases for fit_mle"""

    def test_recovers_snr_50(self, simulated):
        """Test snr_50 of the fit is within 0.3 dB of the generator's"""
        fit = fit_mle(simulated)
        assert fit.snr_50 == pytest.approx(GENERATOR.snr_50, abs=0.3)
        assert fit.nll is not None and np.isfinite(fit.nll)

    def test_fit_beats_generator_likelihood(self, simulated):
        """Test the optimum is at least as likely as the true parameters"""
        fit = fit_mle(simulated)
        snr, n, s = simulated.snr, simulated.n_trials, simulated.n_detected
        true_theta = np.array([GENERATOR.x0, np.log(GENERATOR.k), np.log(GENERATOR.v)])
        assert fit.nll <= negative_log_likelihood(true_theta, snr, n, s) + 1e-6

    def test_symmetric_generator_curve_distance(self):
        """Test a v = 1 generator is reproduced within 0.01 everywhere"""
        generator = LogisticFit(x0=-8.0, k=0.5, v=1.0)
        fit = fit_mle(simulate_curve(generator, SNR_GRID, n_trials=1000, seed=4))
        deviation = np.max(np.abs(fit.p(SNR_GRID) - generator.p(SNR_GRID)))
        assert deviation < 0.01

    def test_step_data(self):
        """Test perfectly separable data puts snr_50 at the step"""
        points = [CurvePoint(float(x), 100, 0 if x <= -11 else 100) for x in SNR_GRID]
        fit = fit_mle(points)
        assert fit.snr_50 == pytest.approx(-10.5, abs=0.5)
        assert fit.k > 1.0

    def test_too_few_bins(self):
        """Test fewer than three distinct SNRs cannot be fitted"""
        points = [CurvePoint(0.0, 10, 3), CurvePoint(1.0, 10, 7)]
        with pytest.raises(CurveNotIdentifiableError):
            fit_mle(points)

    @pytest.mark.parametrize("detected", [0, 50])
    def test_flat_rates(self, detected):
        """Test all-zero and all-one rates are not identifiable"""
        points = [CurvePoint(float(x), 50, detected) for x in range(5)]
        with pytest.raises(CurveNotIdentifiableError):
            fit_mle(points)

    def test_shift_invariance(self, simulated):
        """Test adding c dB to every bin shifts x0 by c and leaves k, v alone"""
        shift = 5.0
        moved = [CurvePoint(p.snr + shift, p.n_trials, p.n_detected) for p in simulated.points]
        base, shifted = fit_mle(simulated), fit_mle(moved)
        assert shifted.x0 == pytest.approx(base.x0 + shift, abs=1e-3)
        assert shifted.k == pytest.approx(base.k, rel=1e-3)
        assert shifted.v == pytest.approx(base.v, rel=1e-3)

    @pytest.mark.parametrize("index", [0, 1, 2])
    @pytest.mark.parametrize("factor", [0.99, 1.01])
    def test_optimum_is_local_minimum(self, simulated, index, factor):
        """Test a 1% change of any parameter does not lower the likelihood cost"""
        fit = fit_mle(simulated)
        snr, n, s = simulated.snr, simulated.n_trials, simulated.n_detected
        params = [fit.x0, fit.k, fit.v]
        params[index] *= factor
        theta = np.array([params[0], np.log(params[1]), np.log(params[2])])
        assert negative_log_likelihood(theta, snr, n, s) >= fit.nll - 1e-9


class TestBootstrap:
    """Test cases for bootstrap_ci"""

    @pytest.fixture(scope="class")
    def small_curve(self):
        return simulate_curve(GENERATOR, SNR_GRID[::2], n_trials=200, seed=2)

    def test_intervals_bracket_fit(self, small_curve):
        """Test the percentile intervals contain the full-data estimate"""
        fit = fit_mle(small_curve)
        result = bootstrap_ci(small_curve, n_boot=50, seed=1, fit=fit)
        lo, hi = result.intervals["snr_50"]
        assert lo <= fit.snr_50 <= hi
        assert set(result.intervals) >= {"x0", "k", "v", "snr_50", "infl_50", "snr_lo", "snr_hi"}
        assert result.width("snr_50") > 0.0
        assert result.n_boot == 50

    def test_seed_reproducible_across_threads(self, small_curve):
        """Test results depend on the seed only, not on the worker count"""
        fit = fit_mle(small_curve)
        a = bootstrap_ci(small_curve, n_boot=20, seed=3, fit=fit, n_jobs=1)
        b = bootstrap_ci(small_curve, n_boot=20, seed=3, fit=fit, n_jobs=2)
        pd.testing.assert_frame_equal(a.samples, b.samples)
        assert a.intervals == b.intervals

    def test_invalid_n_boot(self, small_curve):
        """Test zero replicates are refused"""
        with pytest.raises(BootstrapError):
            bootstrap_ci(small_curve, n_boot=0)

    def test_to_dict(self, small_curve):
        """Test the serialisable summary"""
        summary = bootstrap_ci(small_curve, n_boot=10, seed=0).to_dict()
        assert summary["n_boot"] == 10
        assert len(summary["intervals"]["snr_50"]) == 2

    def test_single_replicate(self, small_curve):
        """Test one replicate gives a zero-width interval"""
        result = bootstrap_ci(small_curve, n_boot=1, seed=4)
        lo, hi = result.intervals["snr_50"]
        assert lo == hi
        assert result.width("snr_50") == 0.0

    def test_large_bins_narrow_interval(self):
        """Test 100,000 trials per bin pin snr_50 to within 0.1 dB"""
        curve = simulate_curve(GENERATOR, SNR_GRID, n_trials=100_000, seed=9)
        result = bootstrap_ci(curve, n_boot=100, seed=5)
        assert result.width("snr_50") < 0.1

    @pytest.mark.slow
    def test_coverage(self):
        """Test the 95% snr_50 interval covers the truth in at least 88% of replications"""
        covered = 0
        replications = 200
        for r in range(replications):
            curve = simulate_curve(GENERATOR, SNR_GRID, n_trials=200, seed=1000 + r)
            lo, hi = bootstrap_ci(curve, n_boot=100, seed=r).intervals["snr_50"]
            covered += lo <= GENERATOR.snr_50 <= hi
        assert covered / replications >= 0.88


if __name__ == "__main__":
    pytest.main([__file__])
