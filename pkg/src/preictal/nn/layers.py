"""Dense-tensor layers with hand-written reverse-mode gradients.

Everything is float64 and batch-first: sequence tensors are
(batch, steps, features).  Each layer caches what its backward pass needs
during a training-mode forward; backward returns the input gradient and
accumulates parameter gradients in .grads.  Gradients are validated against
central finite differences in the test suite.
"""
from __future__ import annotations

import numpy as np
from scipy.special import expit as sigmoid

from ..errors import DataError


def glorot(rng: np.random.Generator, n_in: int, n_out: int, shape: tuple[int, ...]) -> np.ndarray:
    limit = np.sqrt(6.0 / (n_in + n_out))
    return rng.uniform(-limit, limit, size=shape)


def orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def _shape_error(layer: "Layer", expected: str, got: tuple[int, ...]):
    raise DataError(f"{type(layer).__name__}: expected input shaped {expected}, got {got}")


class Layer:
    def __init__(self):
        self.params: dict[str, np.ndarray] = {}
        self.grads: dict[str, np.ndarray] = {}
        self.buffers: dict[str, np.ndarray] = {}
        self.children: list[tuple[str, "Layer"]] = []

    def __getattr__(self, name):
        # saved activations live in single-underscore attributes; reaching for
        # one that does not exist means backward ran before forward
        if name.startswith("_") and not name.startswith("__"):
            raise DataError(f"{type(self).__name__}.backward called before forward")
        raise AttributeError(name)

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def named_params(self, prefix: str = ""):
        """(name, param, grad) triples for every trainable array, depth-first."""
        for k in self.params:
            yield prefix + k, self.params[k], self.grads[k]
        for child_name, child in self.children:
            yield from child.named_params(f"{prefix}{child_name}.")

    def named_arrays(self, prefix: str = ""):
        """(name, array) for every parameter and buffer; serialization order."""
        for k in self.params:
            yield prefix + k, self.params[k]
        for k in self.buffers:
            yield prefix + k, self.buffers[k]
        for child_name, child in self.children:
            yield from child.named_arrays(f"{prefix}{child_name}.")

    def zero_grads(self):
        for k in self.grads:
            self.grads[k][...] = 0.0
        for _, child in self.children:
            child.zero_grads()

    def _register(self, name: str, value: np.ndarray):
        self.params[name] = value
        self.grads[name] = np.zeros_like(value)


class Sequential(Layer):
    def __init__(self, layers: list[Layer]):
        super().__init__()
        self.layers = layers
        self.children = [(str(i), l) for i, l in enumerate(layers)]

    def forward(self, x, training=False):
        for layer in self.layers:
            x = layer.forward(x, training=training)
        return x

    def backward(self, grad):
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad


class Dense(Layer):
    """Affine map on the last axis."""

    def __init__(self, n_in: int, n_out: int, rng: np.random.Generator):
        super().__init__()
        self.n_in, self.n_out = n_in, n_out
        self._register("w", glorot(rng, n_in, n_out, (n_in, n_out)))
        self._register("b", np.zeros(n_out))

    def forward(self, x, training=False):
        if x.shape[-1] != self.n_in:
            _shape_error(self, f"(..., {self.n_in})", x.shape)
        self._x = x
        return x @ self.params["w"] + self.params["b"]

    def backward(self, grad):
        x2 = self._x.reshape(-1, self.n_in)
        g2 = grad.reshape(-1, self.n_out)
        self.grads["w"] += x2.T @ g2
        self.grads["b"] += g2.sum(axis=0)
        return grad @ self.params["w"].T


class Relu(Layer):
    def forward(self, x, training=False):
        self._mask = x > 0
        return np.where(self._mask, x, 0.0)

    def backward(self, grad):
        return np.where(self._mask, grad, 0.0)


class Dropout(Layer):
    """Inverted-scaling dropout: inference is an exact pass-through."""

    def __init__(self, p: float = 0.2, rng: np.random.Generator | None = None):
        super().__init__()
        if not 0 <= p < 1:
            raise DataError(f"dropout rate must be in [0, 1), got {p}")
        self.p = p
        self.rng = rng or np.random.default_rng(0)

    def forward(self, x, training=False):
        if not training or self.p == 0:
            self._mask = None
            return x
        self._mask = (self.rng.random(x.shape) >= self.p) / (1.0 - self.p)
        return x * self._mask

    def backward(self, grad):
        return grad if self._mask is None else grad * self._mask


class Conv1d(Layer):
    """Dilated 1-d convolution over the time axis with zero same-padding;
    output length equals input length for any dilation."""

    def __init__(self, in_ch: int, out_ch: int, rng: np.random.Generator,
                 kernel: int = 3, dilation: int = 1):
        super().__init__()
        if kernel % 2 != 1:
            raise DataError("same-padding requires an odd kernel size")
        self.in_ch, self.out_ch = in_ch, out_ch
        self.kernel, self.dilation = kernel, dilation
        self._register("w", glorot(rng, kernel * in_ch, out_ch, (kernel, in_ch, out_ch)))
        self._register("b", np.zeros(out_ch))

    def forward(self, x, training=False):
        if x.ndim != 3 or x.shape[-1] != self.in_ch:
            _shape_error(self, f"(batch, steps, {self.in_ch})", x.shape)
        b, t, _ = x.shape
        pad = self.dilation * (self.kernel - 1) // 2
        xp = np.pad(x, ((0, 0), (pad, pad), (0, 0)))
        self._xp_shape, self._t, self._pad = xp.shape, t, pad
        windows = np.stack([xp[:, k * self.dilation:k * self.dilation + t, :]
                            for k in range(self.kernel)], axis=2)  # (b, t, kernel, in)
        self._windows = windows
        out = windows.reshape(b, t, -1) @ self.params["w"].reshape(-1, self.out_ch)
        return out + self.params["b"]

    def backward(self, grad):
        b, t = grad.shape[0], self._t
        g2 = grad.reshape(-1, self.out_ch)
        win2 = self._windows.reshape(-1, self.kernel * self.in_ch)
        self.grads["w"] += (win2.T @ g2).reshape(self.kernel, self.in_ch, self.out_ch)
        self.grads["b"] += g2.sum(axis=0)
        dxp = np.zeros(self._xp_shape)
        for k in range(self.kernel):
            dxp[:, k * self.dilation:k * self.dilation + t, :] += grad @ self.params["w"][k].T
        return dxp[:, self._pad:self._pad + t, :]


class Lstm(Layer):
    """LSTM over the full sequence (gates i, f, g, o); returns all hidden states."""

    def __init__(self, n_in: int, n_hidden: int, rng: np.random.Generator):
        super().__init__()
        self.n_in, self.n_hidden = n_in, n_hidden
        w = np.empty((n_in + n_hidden, 4 * n_hidden))
        w[:n_in] = glorot(rng, n_in, n_hidden, (n_in, 4 * n_hidden))
        for gate in range(4):   # orthogonal recurrent blocks train much faster
            w[n_in:, gate * n_hidden:(gate + 1) * n_hidden] = orthogonal(rng, n_hidden)
        self._register("w", w)
        b = np.zeros(4 * n_hidden)
        b[n_hidden:2 * n_hidden] = 1.0   # forget-gate bias keeps early gradients alive
        self._register("b", b)

    def forward(self, x, training=False):
        if x.ndim != 3 or x.shape[-1] != self.n_in:
            _shape_error(self, f"(batch, steps, {self.n_in})", x.shape)
        b, t, _ = x.shape
        nh = self.n_hidden
        h = np.zeros((b, nh))
        c = np.zeros((b, nh))
        self._cache = []
        out = np.empty((b, t, nh))
        for step in range(t):
            zin = np.concatenate([x[:, step, :], h], axis=1)
            z = zin @ self.params["w"] + self.params["b"]
            gi = sigmoid(z[:, :nh])
            gf = sigmoid(z[:, nh:2 * nh])
            gg = np.tanh(z[:, 2 * nh:3 * nh])
            go = sigmoid(z[:, 3 * nh:])
            c_new = gf * c + gi * gg
            tc = np.tanh(c_new)
            h = go * tc
            out[:, step, :] = h
            self._cache.append((zin, gi, gf, gg, go, c, c_new, tc))
            c = c_new
        return out

    def backward(self, grad):
        b, t, nh = grad.shape
        dw = self.grads["w"]
        db = self.grads["b"]
        dh_next = np.zeros((b, nh))
        dc_next = np.zeros((b, nh))
        dx = np.empty((b, t, self.n_in))
        for step in range(t - 1, -1, -1):
            zin, gi, gf, gg, go, c_prev, c_new, tc = self._cache[step]
            dh = grad[:, step, :] + dh_next
            dgo = dh * tc
            dc = dh * go * (1.0 - tc * tc) + dc_next
            dgi = dc * gg
            dgf = dc * c_prev
            dgg = dc * gi
            dz = np.concatenate([
                dgi * gi * (1 - gi),
                dgf * gf * (1 - gf),
                dgg * (1 - gg * gg),
                dgo * go * (1 - go),
            ], axis=1)
            dw += zin.T @ dz
            db += dz.sum(axis=0)
            dzin = dz @ self.params["w"].T
            dx[:, step, :] = dzin[:, :self.n_in]
            dh_next = dzin[:, self.n_in:]
            dc_next = dc * gf
        return dx


def softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = x - x.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=axis, keepdims=True)


class MultiHeadAttention(Layer):
    """Bidirectional self-attention; head_dim * heads must equal dim."""

    def __init__(self, dim: int, rng: np.random.Generator, heads: int = 4):
        super().__init__()
        if dim % heads != 0:
            raise DataError(f"attention dim {dim} not divisible by heads {heads}")
        self.dim, self.heads, self.head_dim = dim, heads, dim // heads
        for name in ("wq", "wk", "wv", "wo"):
            self._register(name, glorot(rng, dim, dim, (dim, dim)))
        for name in ("bq", "bk", "bv", "bo"):
            self._register(name, np.zeros(dim))

    def _split(self, x):
        b, t, _ = x.shape
        return x.reshape(b, t, self.heads, self.head_dim).transpose(0, 2, 1, 3)

    def _merge(self, x):
        b, h, t, d = x.shape
        return x.transpose(0, 2, 1, 3).reshape(b, t, h * d)

    def forward(self, x, training=False):
        if x.ndim != 3 or x.shape[-1] != self.dim:
            _shape_error(self, f"(batch, steps, {self.dim})", x.shape)
        p = self.params
        q = self._split(x @ p["wq"] + p["bq"])
        k = self._split(x @ p["wk"] + p["bk"])
        v = self._split(x @ p["wv"] + p["bv"])
        scores = q @ k.transpose(0, 1, 3, 2) / np.sqrt(self.head_dim)
        attn = softmax(scores, axis=-1)
        ctx = self._merge(attn @ v)
        self._cache = (x, q, k, v, attn, ctx)
        return ctx @ p["wo"] + p["bo"]

    @property
    def last_attention(self) -> np.ndarray:
        """(batch, heads, steps, steps) softmax weights from the last forward."""
        return self._cache[4]

    def backward(self, grad):
        x, q, k, v, attn, ctx = self._cache
        p, g = self.params, self.grads
        b, t, _ = x.shape

        g["wo"] += ctx.reshape(-1, self.dim).T @ grad.reshape(-1, self.dim)
        g["bo"] += grad.reshape(-1, self.dim).sum(axis=0)
        dctx = self._split(grad @ p["wo"].T)

        dattn = dctx @ v.transpose(0, 1, 3, 2)
        dv = attn.transpose(0, 1, 3, 2) @ dctx
        dscores = attn * (dattn - (dattn * attn).sum(axis=-1, keepdims=True))
        dscores /= np.sqrt(self.head_dim)
        dq = dscores @ k
        dk = dscores.transpose(0, 1, 3, 2) @ q

        dx = np.zeros_like(x)
        x2 = x.reshape(-1, self.dim)
        for name_w, name_b, d in (("wq", "bq", dq), ("wk", "bk", dk), ("wv", "bv", dv)):
            d2 = self._merge(d).reshape(-1, self.dim)
            g[name_w] += x2.T @ d2
            g[name_b] += d2.sum(axis=0)
            dx += (d2 @ p[name_w].T).reshape(x.shape)
        return dx


class BatchNorm(Layer):
    """Normalizes each feature over all leading axes; running statistics are
    updated only in training mode (momentum 0.9) and used at inference."""

    def __init__(self, dim: int, momentum: float = 0.9, eps: float = 1e-5):
        super().__init__()
        self.dim, self.momentum, self.eps = dim, momentum, eps
        self._register("gamma", np.ones(dim))
        self._register("beta", np.zeros(dim))
        self.buffers["running_mean"] = np.zeros(dim)
        self.buffers["running_var"] = np.ones(dim)

    def forward(self, x, training=False):
        if x.shape[-1] != self.dim:
            _shape_error(self, f"(..., {self.dim})", x.shape)
        flat = x.reshape(-1, self.dim)
        if training:
            mean = flat.mean(axis=0)
            var = flat.var(axis=0)
            m = self.momentum
            self.buffers["running_mean"][...] = m * self.buffers["running_mean"] + (1 - m) * mean
            self.buffers["running_var"][...] = m * self.buffers["running_var"] + (1 - m) * var
        else:
            mean = self.buffers["running_mean"]
            var = self.buffers["running_var"]
        ivar = 1.0 / np.sqrt(var + self.eps)
        xhat = (flat - mean) * ivar
        self._cache = (xhat, ivar, training, x.shape)
        return (self.params["gamma"] * xhat + self.params["beta"]).reshape(x.shape)

    def backward(self, grad):
        xhat, ivar, training, shape = self._cache
        g2 = grad.reshape(-1, self.dim)
        self.grads["gamma"] += (g2 * xhat).sum(axis=0)
        self.grads["beta"] += g2.sum(axis=0)
        dxhat = g2 * self.params["gamma"]
        if not training:
            return (dxhat * ivar).reshape(shape)
        n = g2.shape[0]
        dx = (ivar / n) * (n * dxhat - dxhat.sum(axis=0)
                           - xhat * (dxhat * xhat).sum(axis=0))
        return dx.reshape(shape)


class LayerNorm(Layer):
    def __init__(self, dim: int, eps: float = 1e-5):
        super().__init__()
        self.dim, self.eps = dim, eps
        self._register("gamma", np.ones(dim))
        self._register("beta", np.zeros(dim))

    def forward(self, x, training=False):
        if x.shape[-1] != self.dim:
            _shape_error(self, f"(..., {self.dim})", x.shape)
        mean = x.mean(axis=-1, keepdims=True)
        var = x.var(axis=-1, keepdims=True)
        ivar = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - mean) * ivar
        self._cache = (xhat, ivar)
        return self.params["gamma"] * xhat + self.params["beta"]

    def backward(self, grad):
        xhat, ivar = self._cache
        self.grads["gamma"] += (grad * xhat).reshape(-1, self.dim).sum(axis=0)
        self.grads["beta"] += grad.reshape(-1, self.dim).sum(axis=0)
        dxhat = grad * self.params["gamma"]
        d = self.dim
        return (ivar / d) * (d * dxhat - dxhat.sum(axis=-1, keepdims=True)
                             - xhat * (dxhat * xhat).sum(axis=-1, keepdims=True))


class FeedForward(Layer):
    """Dense(dim -> inner) + rectifier + Dense(inner -> dim); inner defaults to 2*dim."""

    def __init__(self, dim: int, rng: np.random.Generator, inner: int | None = None):
        super().__init__()
        inner = inner if inner is not None else 2 * dim
        self.net = Sequential([Dense(dim, inner, rng), Relu(), Dense(inner, dim, rng)])
        self.children = [("net", self.net)]

    def forward(self, x, training=False):
        return self.net.forward(x, training=training)

    def backward(self, grad):
        return self.net.backward(grad)


class TakeLast(Layer):
    """(batch, steps, features) -> (batch, features): the last step."""

    def forward(self, x, training=False):
        self._shape = x.shape
        return x[:, -1, :]

    def backward(self, grad):
        dx = np.zeros(self._shape)
        dx[:, -1, :] = grad
        return dx


class MeanPoolTime(Layer):
    """(batch, steps, features) -> (batch, features): mean over steps."""

    def forward(self, x, training=False):
        self._shape = x.shape
        return x.mean(axis=1)

    def backward(self, grad):
        b, t, f = self._shape
        return np.broadcast_to(grad[:, None, :] / t, self._shape).copy()


class RepeatVector(Layer):
    """(batch, features) -> (batch, steps, features)."""

    def __init__(self, steps: int):
        super().__init__()
        self.steps = steps

    def forward(self, x, training=False):
        return np.broadcast_to(x[:, None, :], (x.shape[0], self.steps, x.shape[1])).copy()

    def backward(self, grad):
        return grad.sum(axis=1)


class TransformerEncoderLayer(Layer):
    """Post-norm encoder block: x -> LN(x + DO(MHA(x))) -> LN(. + DO(FF(.)))."""

    def __init__(self, dim: int, rng: np.random.Generator, heads: int = 4,
                 inner: int | None = None, dropout: float = 0.2):
        super().__init__()
        self.attn = MultiHeadAttention(dim, rng, heads=heads)
        self.drop1 = Dropout(dropout, rng=_child_rng(rng))
        self.norm1 = LayerNorm(dim)
        self.ff = FeedForward(dim, rng, inner=inner)
        self.drop2 = Dropout(dropout, rng=_child_rng(rng))
        self.norm2 = LayerNorm(dim)
        self.children = [("attn", self.attn), ("drop1", self.drop1), ("norm1", self.norm1),
                         ("ff", self.ff), ("drop2", self.drop2), ("norm2", self.norm2)]

    def forward(self, x, training=False):
        a = self.drop1.forward(self.attn.forward(x, training), training)
        h = self.norm1.forward(x + a, training)
        f = self.drop2.forward(self.ff.forward(h, training), training)
        return self.norm2.forward(h + f, training)

    def backward(self, grad):
        dh = self.norm2.backward(grad)
        dh = dh + self.ff.backward(self.drop2.backward(dh))
        dx = self.norm1.backward(dh)
        return dx + self.attn.backward(self.drop1.backward(dx))


def _child_rng(rng: np.random.Generator) -> np.random.Generator:
    """Independent child stream so dropout masks don't perturb init draws."""
    return np.random.default_rng(rng.integers(0, 2 ** 63 - 1))
