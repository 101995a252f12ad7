"""
Unit tests for the CNN passes, checked against a nested-loop reference
"""

import numpy as np
import pytest

from acoustic_psnr.detector import DetectorModel, init_model, layer_shapes, min_input_frames
from acoustic_psnr.detector.cnn import bce_with_logits, forward, sigmoid
from acoustic_psnr.detector.model import ARCHITECTURE, POOLED_TIME_BINS
from acoustic_psnr.detector.training import gradient_check, loss_and_gradients
from acoustic_psnr.exceptions import ClipTooShortError, UsageError


def _conv_reference(x, weight, bias, stride, padding):
    n, c, h, w = x.shape
    out_ch, _, k, _ = weight.shape
    xp = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    h_out = (h + 2 * padding - k) // stride + 1
    w_out = (w + 2 * padding - k) // stride + 1
    out = np.zeros((n, out_ch, h_out, w_out))
    for b in range(n):
        for o in range(out_ch):
            for i in range(h_out):
                for j in range(w_out):
                    window = xp[b, :, i * stride : i * stride + k, j * stride : j * stride + k]
                    out[b, o, i, j] = np.sum(window * weight[o]) + bias[o]
    return out


def _maxpool_reference(x):
    n, c, h, w = x.shape
    out = np.zeros((n, c, h // 2, w // 2))
    for i in range(h // 2):
        for j in range(w // 2):
            out[:, :, i, j] = x[:, :, 2 * i : 2 * i + 2, 2 * j : 2 * j + 2].max(axis=(2, 3))
    return out


def _adaptive_reference(x, bins):
    length = x.shape[-1]
    out = np.zeros(x.shape[:-1] + (bins,))
    for b in range(bins):
        start = (b * length) // bins
        end = int(np.ceil((b + 1) * length / bins))
        out[..., b] = x[..., start:end].mean(axis=-1)
    return out


def reference_logits(params, x):
    """Direct loop evaluation of the network in inference mode"""
    h = x
    for layer in ARCHITECTURE:
        if layer.kind != "conv":
            continue
        h = _conv_reference(
            h, params[f"{layer.name}.weight"], params[f"{layer.name}.bias"], layer.stride, layer.padding
        )
        h = _maxpool_reference(np.maximum(h, 0.0))
    flat = _adaptive_reference(h, POOLED_TIME_BINS).reshape(len(x), -1)
    hidden = np.maximum(flat @ params["fc1.weight"].T + params["fc1.bias"], 0.0)
    return (hidden @ params["fc2.weight"].T + params["fc2.bias"])[:, 0]


class TestShapes:
    """Test cases for layer bookkeeping"""

    @pytest.mark.parametrize("frames", [29, 50, 100, 273])
    def test_flatten_is_224(self, frames):
        """Test the flattened feature size does not depend on the frame count"""
        shapes = dict(layer_shapes(frames))
        assert shapes["flatten"] == (224,)
        assert shapes["fc1"] == (32,)
        assert shapes["fc2"] == (1,)

    def test_min_input_frames(self):
        """Test 29 frames is the smallest input the conv stack accepts"""
        assert min_input_frames() == 29
        forward(init_model().params, np.zeros((1, 1, 40, 29)))
        with pytest.raises(ClipTooShortError):
            forward(init_model().params, np.zeros((1, 1, 40, 28)))

    def test_wrong_band_count(self):
        """Test inputs must have 40 mel bands"""
        with pytest.raises(UsageError):
            forward(init_model().params, np.zeros((1, 1, 32, 60)))

    def test_training_needs_rng(self):
        """Test dropout cannot run without a generator"""
        with pytest.raises(UsageError):
            forward(init_model().params, np.zeros((1, 1, 40, 60)), training=True)


class TestForward:
    """Test cases for the forward pass"""

    def test_matches_nested_loop_reference(self):
        """Test logits match a direct loop evaluation to 1e-5"""
        model = init_model(seed=3)
        params = model.as_float64()
        x = np.random.default_rng(0).normal(-40.0, 15.0, size=(2, 1, 40, 100)) / 40.0
        logits, _ = forward(params, x)
        np.testing.assert_allclose(logits, reference_logits(params, x), atol=1e-5, rtol=1e-5)

    def test_inference_is_deterministic(self):
        """Test two inference passes give identical logits"""
        params = init_model(seed=1).params
        x = np.random.default_rng(1).normal(size=(3, 1, 40, 60))
        np.testing.assert_array_equal(forward(params, x)[0], forward(params, x)[0])

    def test_dropout_changes_training_pass(self):
        """Test the training pass is stochastic but seeded"""
        params = init_model(seed=1).as_float64()
        x = np.random.default_rng(1).normal(size=(2, 1, 40, 60))
        a = forward(params, x, training=True, rng=np.random.default_rng(5))[0]
        b = forward(params, x, training=True, rng=np.random.default_rng(5))[0]
        c = forward(params, x, training=False)[0]
        np.testing.assert_array_equal(a, b)
        assert not np.allclose(a, c)


class TestBackward:
    """Test cases for gradients"""

    @pytest.fixture
    def batch(self):
        x = np.random.default_rng(2).normal(size=(2, 1, 40, 40))
        return x, np.array([1.0, 0.0])

    def test_gradient_check(self, batch):
        """Test analytic gradients agree with central differences"""
        x, y = batch
        assert gradient_check(init_model(seed=4), x, y, h=1e-5, fraction=0.003) < 1e-3

    def test_gradient_check_catches_wrong_gradient(self, batch):
        """Test doubling one layer's gradient is detected"""
        x, y = batch

        def double_conv2(grads):
            grads = dict(grads)
            grads["conv2.weight"] = 2.0 * grads["conv2.weight"]
            return grads

        error = gradient_check(
            init_model(seed=4), x, y, h=1e-5, fraction=0.003, gradient_hook=double_conv2
        )
        assert error > 0.1

    def test_zero_model_bias_gradient(self):
        """Test the output bias gradient of an all-zero model is 0.5 - y"""
        x = np.random.default_rng(3).normal(size=(1, 1, 40, 40))
        for label in (0.0, 1.0):
            _, grads = loss_and_gradients(DetectorModel.zeros().as_float64(), x, np.array([label]))
            assert grads["fc2.bias"][0] == pytest.approx(0.5 - label)

    def test_too_many_clips(self):
        """Test the gradient check is limited to small batches"""
        with pytest.raises(UsageError):
            gradient_check(init_model(), np.zeros((5, 1, 40, 40)), [True] * 5)


class TestLoss:
    """Test cases for the cross-entropy"""

    def test_value_and_gradient(self):
        """Test BCE at zero logits is ln 2 with gradient (0.5 - y) / N"""
        loss, grad = bce_with_logits(np.zeros(2), np.array([1.0, 0.0]))
        assert loss == pytest.approx(np.log(2.0))
        np.testing.assert_allclose(grad, [-0.25, 0.25])

    def test_stable_for_large_logits(self):
        """Test extreme logits stay finite"""
        loss, grad = bce_with_logits(np.array([800.0, -800.0]), np.array([1.0, 0.0]))
        assert np.isfinite(loss) and loss == pytest.approx(0.0)
        assert np.all(np.isfinite(grad))
        assert sigmoid(np.array([-800.0]))[0] == 0.0


if __name__ == "__main__":
    pytest.main([__file__])
