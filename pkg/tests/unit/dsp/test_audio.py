"""
Unit tests for AudioClip and WAV I/O
"""

import numpy as np
import pytest
import soundfile as sf

from acoustic_psnr.dsp import AudioClip, read_wav, write_wav
from acoustic_psnr.exceptions import DataError, EmptyClipError


class TestAudioClip:
    """Test cases for AudioClip"""

    def test_samples_are_read_only(self, tone_1k):
        """Test clips are immutable"""
        with pytest.raises(ValueError):
            tone_1k.samples[0] = 1.0

    def test_rejects_multichannel(self):
        """Test 2-D sample arrays are refused"""
        with pytest.raises(DataError):
            AudioClip(np.zeros((2, 10)), 8000)

    def test_rejects_bad_rate(self):
        """Test a non-positive sample rate is refused"""
        with pytest.raises(DataError):
            AudioClip(np.zeros(10), 0)

    def test_fit_length(self):
        """Test cutting and zero padding"""
        clip = AudioClip(np.arange(5.0), 8000)
        np.testing.assert_array_equal(clip.fit_length(3).samples, [0, 1, 2])
        np.testing.assert_array_equal(clip.fit_length(7).samples, [0, 1, 2, 3, 4, 0, 0])

    def test_empty(self):
        """Test require_non_empty on an empty clip"""
        with pytest.raises(EmptyClipError):
            AudioClip(np.zeros(0), 8000).require_non_empty()


class TestWavIO:
    """Test cases for read_wav / write_wav"""

    def test_float_is_lossless(self, tmp_path, noise_clip):
        """Test 32-bit float files keep samples to float32 precision"""
        clip = noise_clip.scaled(0.1)
        back = read_wav(write_wav(tmp_path / "a.wav", clip))
        assert back.sample_rate == clip.sample_rate
        np.testing.assert_allclose(back.samples, clip.samples, atol=1e-7)

    def test_pcm16_maps_to_unit_range(self, tmp_path, tone_1k):
        """Test PCM16 files read back within one quantisation step"""
        clip = tone_1k.scaled(0.5)
        back = read_wav(write_wav(tmp_path / "b.wav", clip, subtype="PCM_16"))
        np.testing.assert_allclose(back.samples, clip.samples, atol=1.0 / 32768)

    def test_first_channel_kept(self, tmp_path):
        """Test multichannel files keep channel 0"""
        data = np.stack([np.full(100, 0.25), np.full(100, -0.5)], axis=1)
        sf.write(str(tmp_path / "stereo.wav"), data, 8000, subtype="FLOAT")
        np.testing.assert_allclose(read_wav(tmp_path / "stereo.wav").samples, 0.25)

    def test_invalid_file(self, tmp_path):
        """Test garbage bytes raise DataError"""
        path = tmp_path / "bad.wav"
        path.write_bytes(b"not a wav file")
        with pytest.raises(DataError):
            read_wav(path)


if __name__ == "__main__":
    pytest.main([__file__])
