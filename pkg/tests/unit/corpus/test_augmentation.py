"""
Unit tests for targeted SNR augmentation
"""

import pytest

from acoustic_psnr.corpus import (
    TRAINING_CONFIGURATIONS,
    LabeledClip,
    build_train_augm,
    gen_call,
    select_augm_range_from_curve,
)
from acoustic_psnr.exceptions import EmptyClipSetError, UsageError
from acoustic_psnr.psychometric import CurvePoint, LogisticFit, PsychometricCurve
from tests.conftest import white_noise


@pytest.fixture(scope="module")
def clips():
    positives = [LabeledClip(gen_call(), True, "s0", "train") for _ in range(10)]
    negatives = [LabeledClip(white_noise(i), False, "s1", "train") for i in range(4)]
    return positives, negatives


class TestBuildTrainAugm:
    """Test cases for build_train_augm"""

    def test_count_and_window(self, clips):
        """Test 20% of the positives are added with SNRs inside the window"""
        augmented = build_train_augm(*clips, snr_range=(-16.0, -6.0), seed=3)
        assert len(augmented) == 2
        for item in augmented:
            assert item.label is True
            assert -16.0 <= item.generator_spec["snr"] <= -6.0
            assert item.generator_spec["augm"] is True

    def test_seeded(self, clips):
        """Test the same seed picks the same pairs and SNRs"""
        a = build_train_augm(*clips, snr_range=(0.0, 10.0), fraction=0.5, seed=1)
        b = build_train_augm(*clips, snr_range=(0.0, 10.0), fraction=0.5, seed=1)
        assert [x.generator_spec for x in a] == [y.generator_spec for y in b]

    def test_degenerate_window(self, clips):
        """Test lo == hi fixes every SNR"""
        augmented = build_train_augm(*clips, snr_range=(-5.0, -5.0), fraction=0.3)
        assert {item.generator_spec["snr"] for item in augmented} == {-5.0}

    def test_reversed_window(self, clips):
        """Test a reversed window is refused"""
        with pytest.raises(UsageError):
            build_train_augm(*clips, snr_range=(5.0, -5.0))

    def test_no_gate_passing_call(self, clips):
        """Test stationary positives cannot be used as calls"""
        _, negatives = clips
        noisy = [LabeledClip(white_noise(9), True, "s0", "train")]
        with pytest.raises(EmptyClipSetError):
            build_train_augm(noisy, negatives, snr_range=(0.0, 1.0))

    def test_no_negatives(self, clips):
        """Test there must be noise to mix over"""
        positives, _ = clips
        with pytest.raises(EmptyClipSetError):
            build_train_augm(positives, [], snr_range=(0.0, 1.0))


class TestSelectRange:
    """Test cases for select_augm_range_from_curve"""

    FIT = LogisticFit(x0=-11.0, k=0.5, v=1.0)

    def test_transition(self):
        """Test the transition window is centred on snr_50"""
        lo, hi = select_augm_range_from_curve(self.FIT, "transition")
        assert (lo, hi) == pytest.approx((-16.0, -6.0))

    def test_high_and_low(self):
        """Test the high window starts at p = 0.99 and the low one ends at p = 0.01"""
        lo, hi = select_augm_range_from_curve(self.FIT, "high", width_db=5.0)
        assert lo == pytest.approx(self.FIT.snr_at(0.99)) and hi == pytest.approx(lo + 5.0)
        lo, hi = select_augm_range_from_curve(self.FIT, "low")
        assert hi == pytest.approx(self.FIT.snr_at(0.01)) and lo == pytest.approx(hi - 10.0)

    def test_curve_without_fit(self):
        """Test an unfitted curve is refused"""
        curve = PsychometricCurve([CurvePoint(0.0, 1, 1)])
        with pytest.raises(UsageError):
            select_augm_range_from_curve(curve, "transition")

    def test_unknown_mode(self):
        """Test only the three window modes exist"""
        with pytest.raises(UsageError):
            select_augm_range_from_curve(self.FIT, "middle")

    def test_named_configurations(self):
        """Test the preset training configurations"""
        assert TRAINING_CONFIGURATIONS["conf0"].snr_range is None
        assert TRAINING_CONFIGURATIONS["conf2"].snr_range == (-16.0, -6.0)
        assert TRAINING_CONFIGURATIONS["conf3"].mode == "low"


if __name__ == "__main__":
    pytest.main([__file__])
