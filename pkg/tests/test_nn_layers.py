import numpy as np
import pytest

from preictal.errors import DataError
from preictal.nn import (BatchNorm, Conv1d, Dense, Dropout, FeedForward,
                         LayerNorm, Lstm, MultiHeadAttention, Relu,
                         RepeatVector, Sequential, TakeLast,
                         TransformerEncoderLayer, make_rng, mse_loss)

FD_STEP = 1e-5
TOLERANCE = 1e-4


def max_rel_grad_error(layer, x, training=True, step=FD_STEP, n_probe=30):
    """Central finite differences vs the layer's backward pass."""
    probe_rng = np.random.default_rng(99)
    out = layer.forward(x, training=training)
    gout = probe_rng.normal(size=out.shape)
    layer.zero_grads()
    dx = layer.backward(gout)

    def objective():
        return float(np.sum(layer.forward(x, training=training) * gout))

    def check(array, grads):
        flat, gflat = array.reshape(-1), grads.reshape(-1)
        idx = probe_rng.choice(flat.size, size=min(n_probe, flat.size), replace=False)
        worst = 0.0
        for i in idx:
            orig = flat[i]
            flat[i] = orig + step
            hi = objective()
            flat[i] = orig - step
            lo = objective()
            flat[i] = orig
            fd = (hi - lo) / (2 * step)
            denom = max(abs(gflat[i]), abs(fd), 1e-6)
            worst = max(worst, abs(gflat[i] - fd) / denom)
        return worst

    worst = check(x, dx)
    for _, param, grad in layer.named_params():
        worst = max(worst, check(param, grad))
    return worst


DATA = np.random.default_rng(5)

LAYER_CASES = [
    ("dense", lambda rng: Dense(5, 7, rng), (4, 5)),
    ("conv_d1", lambda rng: Conv1d(3, 5, rng, dilation=1), (2, 9, 3)),
    ("conv_d2", lambda rng: Conv1d(3, 5, rng, dilation=2), (2, 9, 3)),
    ("conv_d4", lambda rng: Conv1d(3, 5, rng, dilation=4), (2, 9, 3)),
    ("lstm_3steps", lambda rng: Lstm(4, 6, rng), (3, 3, 4)),
    ("attention", lambda rng: MultiHeadAttention(8, rng, heads=4), (2, 5, 8)),
    ("batchnorm", lambda rng: BatchNorm(6), (5, 4, 6)),
    ("layernorm", lambda rng: LayerNorm(6), (5, 4, 6)),
    ("feedforward", lambda rng: FeedForward(6, rng), (3, 4, 6)),
]


@pytest.mark.parametrize("name,make,shape", LAYER_CASES, ids=[c[0] for c in LAYER_CASES])
def test_gradients_match_finite_differences(name, make, shape):
    layer = make(make_rng(0))
    x = DATA.normal(size=shape)
    assert max_rel_grad_error(layer, x) < TOLERANCE


def test_transformer_block_gradients():
    # deeper composite: optimal FD step is coarser (roundoff dominates at 1e-5)
    layer = TransformerEncoderLayer(8, make_rng(0), dropout=0.0)
    x = DATA.normal(size=(2, 5, 8))
    assert max_rel_grad_error(layer, x, step=1e-4) < TOLERANCE


def test_zero_output_grad_gives_zero_param_grads():
    layer = Dense(6, 4, make_rng(1))
    x = DATA.normal(size=(3, 6))
    layer.forward(x, training=True)
    layer.zero_grads()
    layer.backward(np.zeros((3, 4)))
    for _, _, grad in layer.named_params():
        assert np.all(grad == 0.0)


def test_identity_dense_passthrough():
    layer = Dense(5, 5, make_rng(0))
    layer.params["w"][...] = np.eye(5)
    layer.params["b"][...] = 0.0
    x = DATA.normal(size=(4, 5))
    assert np.array_equal(layer.forward(x), x)


def test_dropout_inference_passthrough():
    layer = Dropout(0.2, rng=make_rng(3))
    x = DATA.normal(size=(8, 10))
    assert layer.forward(x, training=False) is x


def test_dropout_train_scaling_preserves_mean():
    layer = Dropout(0.25, rng=make_rng(4))
    x = np.ones((200, 200))
    out = layer.forward(x, training=True)
    kept = out[out != 0]
    np.testing.assert_allclose(kept, 1 / 0.75)
    assert abs(out.mean() - 1.0) < 0.02


def test_attention_rows_sum_to_one():
    layer = MultiHeadAttention(8, make_rng(5), heads=4)
    layer.forward(DATA.normal(size=(3, 6, 8)), training=False)
    sums = layer.last_attention.sum(axis=-1)
    np.testing.assert_allclose(sums, 1.0, atol=1e-12)


def test_attention_dim_must_divide():
    with pytest.raises(DataError, match="divisible"):
        MultiHeadAttention(10, make_rng(0), heads=4)


@pytest.mark.parametrize("dilation", [1, 2, 4])
def test_conv_same_padding_preserves_steps(dilation):
    layer = Conv1d(3, 4, make_rng(6), dilation=dilation)
    for steps in (5, 9, 32):
        out = layer.forward(DATA.normal(size=(2, steps, 3)))
        assert out.shape == (2, steps, 4)


def test_shape_mismatch_reports_both_shapes():
    layer = Dense(5, 7, make_rng(7))
    with pytest.raises(DataError, match=r"\(\.\.\., 5\).*\(4, 6\)"):
        layer.forward(np.zeros((4, 6)))


def test_backward_before_forward_rejected():
    layer = Lstm(3, 4, make_rng(9))
    with pytest.raises(DataError, match="before forward"):
        layer.backward(np.zeros((2, 5, 4)))


def test_batchnorm_running_stats_only_update_in_training():
    layer = BatchNorm(4)
    x = DATA.normal(2.0, 3.0, size=(64, 4))
    before = layer.buffers["running_mean"].copy()
    layer.forward(x, training=False)
    assert np.array_equal(layer.buffers["running_mean"], before)
    layer.forward(x, training=True)
    assert not np.array_equal(layer.buffers["running_mean"], before)


def test_batchnorm_train_normalizes_batch():
    layer = BatchNorm(4)
    x = DATA.normal(5.0, 2.0, size=(256, 4))
    out = layer.forward(x, training=True)
    np.testing.assert_allclose(out.mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(out.std(axis=0), 1.0, atol=1e-3)


def test_repeat_and_takelast_are_adjoint_shapes():
    rep = RepeatVector(6)
    last = TakeLast()
    x = DATA.normal(size=(3, 5))
    seq = rep.forward(x)
    assert seq.shape == (3, 6, 5)
    assert np.array_equal(last.forward(seq), x)


def test_mse_loss_values():
    zero, _ = mse_loss(np.ones((2, 2)), np.ones((2, 2)))
    assert zero == 0.0
    one, _ = mse_loss(np.ones(4), np.zeros(4))
    assert one == 1.0
    val, grad = mse_loss(np.array([1.0, 2.0]), np.array([0.0, 0.0]))
    assert val == 2.5
    np.testing.assert_allclose(grad, [1.0, 2.0])


def test_mse_loss_shape_mismatch():
    with pytest.raises(DataError, match="mismatch"):
        mse_loss(np.zeros(3), np.zeros(4))


def test_no_nan_inf_through_deep_stack():
    rng = make_rng(8)
    model = Sequential([
        Dense(6, 8, rng), Relu(), LayerNorm(8),
        TransformerEncoderLayer(8, rng, dropout=0.2),
        Lstm(8, 5, rng), BatchNorm(5), TakeLast(), RepeatVector(4),
        Lstm(5, 6, rng),
    ])
    x = DATA.normal(size=(4, 4, 6)) * 100.0
    out = model.forward(x, training=True)
    assert np.all(np.isfinite(out))
