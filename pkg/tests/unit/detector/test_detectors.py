"""
Unit tests for the Detector implementations
"""

import numpy as np
import pytest
from scipy.special import expit

from acoustic_psnr.detector import (
    CnnDetector,
    ConstantDetector,
    DetectorModel,
    EnergyDetector,
    Score,
    energy_detector,
    infer,
    init_model,
)
from acoustic_psnr.dsp import AudioClip, prepare_model_input
from tests.conftest import pulse_train, white_noise


class TestScore:
    """Test cases for Score"""

    def test_decision_is_strict(self):
        """Test exactly 0.5 is not a detection"""
        assert Score(0.5).decision is False
        assert Score(0.5000001).decision is True


class TestConstantDetector:
    """Test cases for ConstantDetector"""

    def test_constant_probability(self, noise_clip, tone_1k):
        """Test every clip gets the configured probability"""
        detector = ConstantDetector(0.7)
        assert [s.probability for s in detector.score_many([noise_clip, tone_1k])] == [0.7, 0.7]
        assert detector.describe() == {"name": "constant", "probability": 0.7}


class TestEnergyDetector:
    """Test cases for EnergyDetector"""

    def test_pulse_train_detected(self):
        """Test a gated call-band pulse train scores near one"""
        assert EnergyDetector(10.0).score(pulse_train()).probability > 0.99

    def test_stationary_noise_rejected(self, noise_clip):
        """Test stationary noise emerges by only a few dB"""
        detector = EnergyDetector(10.0)
        assert detector.emergence(noise_clip) < 6.0
        assert detector.score(noise_clip).decision is False

    def test_probability_is_logistic_of_margin(self):
        """Test the probability is logistic(emergence - threshold)"""
        clip = pulse_train(off_gain=10 ** (-12 / 20))
        detector = EnergyDetector(threshold_db=8.0)
        margin = detector.emergence(clip) - 8.0
        assert detector.score(clip).probability == pytest.approx(1.0 / (1.0 + np.exp(-margin)))

    def test_factory_default_threshold(self):
        """Test the factory builds a 10 dB detector by default"""
        assert energy_detector().threshold_db == 10.0
        assert energy_detector(12.0).threshold_db == 12.0

    def test_describe(self):
        """Test the description carries the threshold"""
        assert EnergyDetector(12.5).describe() == {"name": "energy", "threshold_db": 12.5}


class TestCnnDetector:
    """Test cases for CnnDetector"""

    def test_batched_matches_single(self):
        """Test batched scoring equals clip-by-clip scoring"""
        detector = CnnDetector(init_model(seed=1), batch_size=2)
        clips = [white_noise(seed) for seed in range(3)] + [pulse_train()]
        batched = [s.probability for s in detector.score_many(clips)]
        single = [detector.score(clip).probability for clip in clips]
        np.testing.assert_allclose(batched, single, rtol=1e-6)

    def test_probabilities_in_unit_interval(self, tone_1k):
        """Test probabilities are valid and inference is repeatable"""
        model = init_model(seed=2)
        score = infer(model, prepare_model_input(tone_1k))
        assert 0.0 <= score.probability <= 1.0
        assert infer(model, prepare_model_input(tone_1k)) == score

    def test_zero_weights_give_one_half(self, noise_clip):
        """Test an all-zero model outputs exactly 0.5"""
        score = infer(DetectorModel.zeros(), prepare_model_input(noise_clip))
        assert score.probability == 0.5
        assert score.decision is False

    def test_output_bias_sets_probability(self, tone_1k):
        """Test an output bias of 10 over zero weights gives sigmoid(10)"""
        model = DetectorModel.zeros()
        model.params["fc2.bias"][:] = 10.0
        score = infer(model, prepare_model_input(tone_1k))
        assert score.probability == pytest.approx(expit(10.0), rel=1e-6)

    def test_gain_invariance(self):
        """Test scaling the waveform does not change the probability"""
        model = init_model(seed=3)
        clip = pulse_train()
        quieter = AudioClip(clip.samples * 0.25, clip.sample_rate)
        assert infer(model, prepare_model_input(quieter)) == infer(model, prepare_model_input(clip))

    def test_describe(self):
        """Test the description carries the parameter count"""
        assert CnnDetector(init_model()).describe()["n_parameters"] == 48993


if __name__ == "__main__":
    pytest.main([__file__])
