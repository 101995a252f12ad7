"""
Unit tests for the synthetic call and noise generators
"""

import numpy as np
import pytest
from pydantic import ValidationError

from acoustic_psnr.corpus import CallSpec, NoiseSpec, call_pool, gen_call, gen_noise, noise_pool
from acoustic_psnr.dsp import band_level, fractile_levels
from acoustic_psnr.exceptions import InvalidSpecError
from acoustic_psnr.mixing import passes_gate


class TestGenCall:
    """Test cases for gen_call"""

    def test_default_call(self):
        """Test the default call is a 0.66 s peak-normalised clip that passes the gate"""
        clip = gen_call()
        assert len(clip) == 5280
        assert np.max(np.abs(clip.samples)) == pytest.approx(1.0)
        assert passes_gate(clip)

    def test_seeded(self):
        """Test the same spec renders the same samples"""
        spec = CallSpec(seed=4)
        np.testing.assert_array_equal(gen_call(spec).samples, gen_call(spec).samples)

    def test_out_of_band_rejection(self):
        """Test call energy below the band sits at least 30 dB under the in-band level"""
        for seed in range(3):
            clip = gen_call(CallSpec(seed=seed))
            assert band_level(clip) - band_level(clip, 50.0, 350.0) >= 30.0

    def test_too_long(self):
        """Test calls that overrun the clip are refused"""
        with pytest.raises(ValidationError):
            CallSpec(pulse_count=10, pulse_duration_s=0.05, inter_pulse_s=0.05)

    def test_sweep_outside_band(self):
        """Test sweep frequencies must stay inside the call band"""
        with pytest.raises(ValidationError):
            CallSpec(f_start=5000.0)


class TestGenNoise:
    """Test cases for gen_noise"""

    @pytest.mark.parametrize("kind", ["rain", "wind", "biophony"])
    def test_calibrated_intensity(self, kind):
        """Test the band level is 20 log10(intensity)"""
        clip = gen_noise(NoiseSpec(kind=kind, intensity=0.25, seed=1))
        assert band_level(clip) == pytest.approx(20.0 * np.log10(0.25), abs=1e-6)

    def test_wind_is_stationary(self):
        """Test wind emerges by less than 6 dB"""
        for seed in range(3):
            clip = gen_noise(NoiseSpec(kind="wind", seed=seed))
            assert fractile_levels(clip).emergence < 6.0

    def test_rain_is_impulsive(self):
        """Test rain clicks emerge by more than 10 dB"""
        for seed in range(3):
            clip = gen_noise(NoiseSpec(kind="rain", rate_hz=100.0, seed=seed))
            assert fractile_levels(clip).emergence > 10.0

    def test_biophony_band(self):
        """Test at least 80% of biophony band energy lies above 1 kHz"""
        for seed in range(3):
            clip = gen_noise(NoiseSpec(kind="biophony", seed=seed))
            share = 10.0 ** ((band_level(clip, 1000.0, 4000.0) - band_level(clip)) / 10.0)
            assert share >= 0.8

    @pytest.mark.parametrize("kind", ["wind", "biophony"])
    def test_pure_noise_fails_gate(self, kind):
        """Test call-free wind and biophony clips never pass the emergence gate"""
        for seed in range(5):
            assert not passes_gate(gen_noise(NoiseSpec(kind=kind, seed=seed)))

    def test_too_short(self):
        """Test noise shorter than a model clip is refused"""
        with pytest.raises(InvalidSpecError):
            gen_noise(duration_s=0.5)

    def test_longer_duration(self):
        """Test longer noise is rendered at the requested length"""
        assert len(gen_noise(NoiseSpec(seed=2), duration_s=1.0)) == 8000

    def test_burst_bounds(self):
        """Test burst count bounds must be ordered"""
        with pytest.raises(ValidationError):
            NoiseSpec(kind="biophony", min_bursts=4, max_bursts=2)


class TestPools:
    """Test cases for call_pool / noise_pool"""

    def test_keys_and_determinism(self):
        """Test pools are keyed by index and reproducible"""
        a, b = call_pool(3, seed=5), call_pool(3, seed=5)
        assert list(a) == ["call0000", "call0001", "call0002"]
        for key in a:
            np.testing.assert_array_equal(a[key].samples, b[key].samples)

    def test_noise_kinds_cycle(self):
        """Test noise kinds are dealt round-robin"""
        assert list(noise_pool(4, seed=1)) == ["rain0000", "wind0001", "biophony0002", "rain0003"]


if __name__ == "__main__":
    pytest.main([__file__])
