"""Fixed-weight generator runtime: GGW1 weights files, forward evaluation,
reverse-mode gradients with respect to the latent input, and the Adam rule.

Layers operate on float64 arrays; images flow channels-last (H, W, C).
The transposed convolution follows the scatter rule
``out[i*s + a - p, j*s + b - p, oc] += sum_ic in[i, j, ic] * W[a, b, oc, ic]``
with ``p = (K - s) // 2`` and out-of-range targets dropped, so the output
side is always the input side times the stride. Every layer implements the
exact vector-Jacobian product of its forward map; gradients of the
measurement loss ``L(z) = ||A flatten((G(z)+1)/2) - y||^2`` are accumulated
layer by layer back to the latent vector.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

LATENT_DIM = 100
GGW_MAGIC = b"GGW1"
GGW_FORMAT_VERSION = 1


class GgwFormatError(ValueError):
    """Malformed GGW1 weights file."""


class GgwMagicError(GgwFormatError):
    """File does not start with the GGW1 magic."""


class GgwLengthError(GgwFormatError):
    """Tensor payload shorter or longer than the header declares."""


class GgwShapeError(GgwFormatError):
    """Layer shapes do not chain, or tensors disagree with layer params."""


class NumericError(ArithmeticError):
    """Non-finite values produced inside the network."""


# ---------------------------------------------------------------------------
# Layers
# ---------------------------------------------------------------------------


@dataclass
class Dense:
    weight: np.ndarray  # (in, out)
    bias: np.ndarray  # (out,)
    kind = "dense"

    def params(self):
        return {"in": int(self.weight.shape[0]), "out": int(self.weight.shape[1])}

    def tensors(self):
        return [self.weight, self.bias]

    def out_shape(self, in_shape):
        if len(in_shape) != 1 or in_shape[0] != self.weight.shape[0]:
            raise GgwShapeError(
                f"dense expects a vector of length {self.weight.shape[0]}, got {in_shape}"
            )
        return (self.weight.shape[1],)

    def forward(self, x):
        return x @ self.weight + self.bias

    def vjp(self, upstream, x, y):
        return upstream @ self.weight.T


@dataclass
class Reshape:
    shape: tuple
    kind = "reshape"

    def params(self):
        return {"shape": list(self.shape)}

    def tensors(self):
        return []

    def out_shape(self, in_shape):
        if int(np.prod(in_shape)) != int(np.prod(self.shape)):
            raise GgwShapeError(f"cannot reshape {in_shape} to {self.shape}")
        return tuple(self.shape)

    def forward(self, x):
        return x.reshape(self.shape)

    def vjp(self, upstream, x, y):
        return upstream.reshape(x.shape)


def _scatter_windows(in_len, out_len, offset, stride):
    """Input index range whose targets offset + stride*i land inside [0, out_len)."""
    i_min = max(0, -(offset // stride))  # ceil(-offset / stride)
    i_max = min(in_len - 1, (out_len - 1 - offset) // stride)
    if i_min > i_max:
        return None
    target = slice(offset + i_min * stride, offset + i_max * stride + 1, stride)
    return slice(i_min, i_max + 1), target


@dataclass
class ConvTranspose2d:
    weight: np.ndarray  # (K, K, out_ch, in_ch)
    stride: int
    kind = "conv2d_transpose"

    def __post_init__(self):
        k = self.weight.shape[0]
        if not 1 <= self.stride <= k:
            raise GgwShapeError(f"conv2d_transpose needs K >= s >= 1, got K={k} s={self.stride}")

    def params(self):
        k, _, out_ch, in_ch = self.weight.shape
        return {"in_ch": int(in_ch), "out_ch": int(out_ch), "kernel": int(k), "stride": int(self.stride)}

    def tensors(self):
        return [self.weight]

    def out_shape(self, in_shape):
        if len(in_shape) != 3 or in_shape[2] != self.weight.shape[3]:
            raise GgwShapeError(
                f"conv2d_transpose expects (H, W, {self.weight.shape[3]}), got {in_shape}"
            )
        return (in_shape[0] * self.stride, in_shape[1] * self.stride, self.weight.shape[2])

    def forward(self, x):
        h, w, in_ch = x.shape
        k, s = self.weight.shape[0], self.stride
        pad = (k - s) // 2
        out = np.zeros((h * s, w * s, self.weight.shape[2]))
        flat = x.reshape(h * w, in_ch)
        for a in range(k):
            rows = _scatter_windows(h, h * s, a - pad, s)
            if rows is None:
                continue
            for b in range(k):
                cols = _scatter_windows(w, w * s, b - pad, s)
                if cols is None:
                    continue
                contrib = (flat @ self.weight[a, b].T).reshape(h, w, -1)
                out[rows[1], cols[1]] += contrib[rows[0], cols[0]]
        return out

    def vjp(self, upstream, x, y):
        # Adjoint of the scatter: gather the same windows through W.
        h, w, in_ch = x.shape
        k, s = self.weight.shape[0], self.stride
        pad = (k - s) // 2
        grad = np.zeros_like(x)
        for a in range(k):
            rows = _scatter_windows(h, h * s, a - pad, s)
            if rows is None:
                continue
            for b in range(k):
                cols = _scatter_windows(w, w * s, b - pad, s)
                if cols is None:
                    continue
                patch = upstream[rows[1], cols[1]]
                grad[rows[0], cols[0]] += patch @ self.weight[a, b]
        return grad


@dataclass
class AffineChannel:
    """Per-channel scale and shift (batch normalization folded at export)."""

    scale: np.ndarray
    shift: np.ndarray
    kind = "affine_channel"

    def params(self):
        return {"channels": int(self.scale.shape[0])}

    def tensors(self):
        return [self.scale, self.shift]

    def out_shape(self, in_shape):
        if in_shape[-1] != self.scale.shape[0]:
            raise GgwShapeError(
                f"affine_channel expects {self.scale.shape[0]} channels, got {in_shape}"
            )
        return tuple(in_shape)

    def forward(self, x):
        return x * self.scale + self.shift

    def vjp(self, upstream, x, y):
        return upstream * self.scale


@dataclass
class LeakyRelu:
    alpha: float = 0.3
    kind = "leaky_relu"

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise GgwShapeError(f"leaky_relu alpha must lie in (0, 1), got {self.alpha}")

    def params(self):
        return {"alpha": self.alpha}

    def tensors(self):
        return []

    def out_shape(self, in_shape):
        return tuple(in_shape)

    def forward(self, x):
        return np.where(x > 0, x, self.alpha * x)

    def vjp(self, upstream, x, y):
        return upstream * np.where(x > 0, 1.0, self.alpha)


@dataclass
class Tanh:
    kind = "tanh"

    def params(self):
        return {}

    def tensors(self):
        return []

    def out_shape(self, in_shape):
        return tuple(in_shape)

    def forward(self, x):
        return np.tanh(x)

    def vjp(self, upstream, x, y):
        return upstream * (1.0 - y * y)


# ---------------------------------------------------------------------------
# Model
# ---------------------------------------------------------------------------


@dataclass
class GeneratorModel:
    layers: list
    latent_dim: int = LATENT_DIM

    def __post_init__(self):
        self.validate()

    def validate(self) -> tuple:
        """Walk the shape chain end to end; returns the output shape."""
        if not self.layers:
            raise GgwShapeError("model has no layers")
        shape = (self.latent_dim,)
        for i, layer in enumerate(self.layers):
            try:
                shape = layer.out_shape(shape)
            except GgwShapeError as exc:
                raise GgwShapeError(f"layer {i} ({layer.kind}): {exc}") from None
        if not isinstance(self.layers[-1], Tanh):
            raise GgwShapeError("final layer must be tanh")
        return shape

    @property
    def output_shape(self) -> tuple:
        return self.validate()


def forward_cached(model: GeneratorModel, z):
    """Evaluate G(z) keeping per-layer inputs/outputs for the backward pass."""
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (model.latent_dim,):
        raise ValueError(f"latent vector must have shape ({model.latent_dim},), got {z.shape}")
    x = z
    cache = []
    for i, layer in enumerate(model.layers):
        y = layer.forward(x)
        if not np.all(np.isfinite(y)):
            raise NumericError(f"non-finite values after layer {i} ({layer.kind})")
        cache.append((layer, x, y))
        x = y
    return x, cache


def forward(model: GeneratorModel, z) -> np.ndarray:
    """Generator output for latent z, values in (-1, 1)."""
    out, _ = forward_cached(model, z)
    return out


def output_image(out: np.ndarray) -> np.ndarray:
    """Drop a trailing singleton channel axis from a generator output."""
    if out.ndim == 3 and out.shape[2] == 1:
        return out[:, :, 0]
    return out


def to_measurement_domain(g) -> np.ndarray:
    """Map generator-range values in [-1, 1] to measurement-domain [0, 1]."""
    return (np.asarray(g, dtype=np.float64) + 1.0) / 2.0


def loss_value(model: GeneratorModel, z, A, y) -> float:
    """L(z) = ||A flatten((G(z)+1)/2) - y||^2 without gradients."""
    out = forward(model, z)
    residual = A @ to_measurement_domain(out).ravel() - y
    return float(residual @ residual)


def loss_and_gradient(model: GeneratorModel, z, A, y):
    """Measurement-domain squared-residual loss and its gradient in z.

    Reverse-mode accumulation: the residual gradient 2 A^T r flows through
    the constant-affine range map (factor 1/2) and then each layer's VJP.
    """
    A = np.asarray(A, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    out, cache = forward_cached(model, z)
    flat = to_measurement_domain(out).ravel()
    if A.shape[1] != flat.size:
        raise ValueError(f"matrix has {A.shape[1]} columns, generator emits {flat.size} pixels")
    residual = A @ flat - y
    loss = float(residual @ residual)
    upstream = (A.T @ residual).reshape(out.shape)  # 2 A^T r through the 1/2 range map
    for layer, x, out_cached in reversed(cache):
        upstream = layer.vjp(upstream, x, out_cached)
    return loss, upstream


# ---------------------------------------------------------------------------
# Adam
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AdamState:
    """Moment estimates and hyperparameters for one parameter vector."""

    step: int
    m: np.ndarray
    v: np.ndarray
    lr: float = 0.1
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def initial(cls, dim: int, lr: float = 0.1, beta1: float = 0.9,
                beta2: float = 0.999, eps: float = 1e-8) -> "AdamState":
        return cls(0, np.zeros(dim), np.zeros(dim), lr, beta1, beta2, eps)


def adam_step(state: AdamState, params, grad):
    """One bias-corrected Adam update; returns (new state, new params)."""
    params = np.asarray(params, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if params.shape != grad.shape or params.shape != state.m.shape:
        raise ValueError("parameter, gradient and moment shapes must agree")
    t = state.step + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * grad
    v = state.beta2 * state.v + (1.0 - state.beta2) * grad * grad
    m_hat = m / (1.0 - state.beta1**t)
    v_hat = v / (1.0 - state.beta2**t)
    new_params = params - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    new_state = AdamState(t, m, v, state.lr, state.beta1, state.beta2, state.eps)
    return new_state, new_params


# ---------------------------------------------------------------------------
# GGW1 weights file
# ---------------------------------------------------------------------------

_LAYER_BUILDERS = {}


def _register(kind):
    def wrap(fn):
        _LAYER_BUILDERS[kind] = fn
        return fn
    return wrap


@_register("dense")
def _build_dense(params, tensors):
    weight, bias = tensors
    if weight.shape != (params["in"], params["out"]) or bias.shape != (params["out"],):
        raise GgwShapeError(f"dense tensors {weight.shape}, {bias.shape} disagree with params {params}")
    return Dense(weight, bias)


@_register("reshape")
def _build_reshape(params, tensors):
    return Reshape(tuple(params["shape"]))


@_register("conv2d_transpose")
def _build_conv(params, tensors):
    (weight,) = tensors
    expected = (params["kernel"], params["kernel"], params["out_ch"], params["in_ch"])
    if weight.shape != expected:
        raise GgwShapeError(f"conv2d_transpose tensor {weight.shape} disagrees with params {params}")
    return ConvTranspose2d(weight, int(params["stride"]))


@_register("affine_channel")
def _build_affine(params, tensors):
    scale, shift = tensors
    if scale.shape != (params["channels"],) or shift.shape != (params["channels"],):
        raise GgwShapeError(f"affine_channel tensors disagree with params {params}")
    return AffineChannel(scale, shift)


@_register("leaky_relu")
def _build_leaky(params, tensors):
    return LeakyRelu(float(params["alpha"]))


@_register("tanh")
def _build_tanh(params, tensors):
    return Tanh()


def save_model(model: GeneratorModel, path) -> None:
    """Write a GGW1 file: magic, u32 header length, JSON header, f32 tensors.

    Tensor values are stored as little-endian float32 in declaration order;
    loading promotes back to float64, so save -> load round-trips exactly
    for any model whose tensors are float32-representable (in particular,
    any model that itself came from a GGW1 file).
    """
    header = {
        "format_version": GGW_FORMAT_VERSION,
        "latent_dim": model.latent_dim,
        "layers": [
            {
                "kind": layer.kind,
                "params": layer.params(),
                "tensor_shapes": [list(t.shape) for t in layer.tensors()],
            }
            for layer in model.layers
        ],
    }
    header_bytes = json.dumps(header).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(GGW_MAGIC)
        fh.write(struct.pack("<I", len(header_bytes)))
        fh.write(header_bytes)
        for layer in model.layers:
            for tensor in layer.tensors():
                fh.write(np.ascontiguousarray(tensor, dtype="<f4").tobytes())


def load_model(path) -> GeneratorModel:
    """Parse a GGW1 file and validate the shape chain end to end."""
    data = Path(path).read_bytes()
    if data[:4] != GGW_MAGIC:
        raise GgwMagicError(f"{path}: bad magic {data[:4]!r}, expected {GGW_MAGIC!r}")
    if len(data) < 8:
        raise GgwLengthError(f"{path}: missing header length field")
    (header_len,) = struct.unpack("<I", data[4:8])
    if len(data) < 8 + header_len:
        raise GgwLengthError(f"{path}: header truncated")
    try:
        header = json.loads(data[8 : 8 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise GgwFormatError(f"{path}: unreadable header ({exc})") from None

    offset = 8 + header_len
    layers = []
    for i, spec in enumerate(header.get("layers", [])):
        kind = spec.get("kind")
        if kind not in _LAYER_BUILDERS:
            raise GgwFormatError(f"{path}: unknown layer kind {kind!r}")
        tensors = []
        for shape in spec.get("tensor_shapes", []):
            count = int(np.prod(shape)) if shape else 1
            nbytes = 4 * count
            if offset + nbytes > len(data):
                raise GgwLengthError(
                    f"{path}: layer {i} ({kind}) tensor needs {nbytes} bytes, "
                    f"{len(data) - offset} remain"
                )
            values = np.frombuffer(data, dtype="<f4", count=count, offset=offset)
            tensors.append(values.reshape(shape).astype(np.float64))
            offset += nbytes
        layers.append(_LAYER_BUILDERS[kind](spec.get("params", {}), tensors))
    if offset != len(data):
        raise GgwLengthError(f"{path}: {len(data) - offset} trailing bytes after tensors")

    return GeneratorModel(layers, latent_dim=int(header.get("latent_dim", LATENT_DIM)))
