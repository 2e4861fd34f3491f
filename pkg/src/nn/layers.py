from typing import Optional, Tuple

import numpy as np

from src.errors import ShapeError
from src.nn.schemas import Activation, Conv1DLayer, DenseLayer, Tensor2D, as_tensor2d


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=np.result_type(x, np.float32))
    positive = x >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-x[positive]))
    exp_x = np.exp(x[~positive])
    out[~positive] = exp_x / (1.0 + exp_x)
    return out


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def softmax(x: np.ndarray) -> np.ndarray:
    shifted = np.exp(x - x.max(axis=-1, keepdims=True))
    return shifted / shifted.sum(axis=-1, keepdims=True)


def activate(z: np.ndarray, activation: Activation) -> np.ndarray:
    if activation == Activation.RELU:
        return relu(z)
    if activation == Activation.SIGMOID:
        return sigmoid(z)
    if activation == Activation.SOFTMAX:
        return softmax(z)
    return z


def activation_backward(z: np.ndarray, out: np.ndarray, upstream: np.ndarray, activation: Activation) -> np.ndarray:
    """Gradient with respect to the pre-activation z."""
    if activation == Activation.RELU:
        return upstream * (z > 0)
    if activation == Activation.SIGMOID:
        return upstream * out * (1.0 - out)
    if activation == Activation.SOFTMAX:
        return out * (upstream - (upstream * out).sum(axis=-1, keepdims=True))
    return upstream


def glorot_uniform(fan_in: int, fan_out: int, rng: np.random.Generator, dtype=np.float64) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out)).astype(dtype)


def init_dense(in_dim: int, out_dim: int, activation: Activation, rng: np.random.Generator, dtype=np.float64) -> DenseLayer:
    return DenseLayer(
        weights=glorot_uniform(in_dim, out_dim, rng, dtype),
        bias=np.zeros(out_dim, dtype=dtype),
        activation=activation,
    )


def init_conv1d(kernel_width: int, in_channels: int, filters: int, rng: np.random.Generator, dtype=np.float64) -> Conv1DLayer:
    fan_in = kernel_width * in_channels
    return Conv1DLayer(
        kernel_width=kernel_width,
        in_channels=in_channels,
        weights=glorot_uniform(fan_in, filters, rng, dtype),
        bias=np.zeros(filters, dtype=dtype),
    )


def _check_dense_input(layer: DenseLayer, x: np.ndarray) -> Tensor2D:
    x = as_tensor2d(x, "dense input")
    if x.shape[1] != layer.in_dim:
        raise ShapeError(f"dense layer expects (*, {layer.in_dim}) input, got {x.shape}")
    return x


def dense_forward(layer: DenseLayer, x: Tensor2D) -> Tensor2D:
    x = _check_dense_input(layer, x)
    return activate(x @ layer.weights + layer.bias, layer.activation)


def linear_backward(x: Tensor2D, weights: Tensor2D, dz: Tensor2D) -> Tuple[Tensor2D, Tensor2D, np.ndarray]:
    return dz @ weights.T, x.T @ dz, dz.sum(axis=0)


def dense_backward(layer: DenseLayer, x: Tensor2D, upstream: Tensor2D) -> Tuple[Tensor2D, Tensor2D, np.ndarray]:
    """Returns (input_grad, weight_grad, bias_grad) for an upstream gradient on the layer output."""
    x = _check_dense_input(layer, x)
    z = x @ layer.weights + layer.bias
    if upstream.shape != z.shape:
        raise ShapeError(f"upstream gradient {upstream.shape} does not match output {z.shape}")
    dz = activation_backward(z, activate(z, layer.activation), upstream, layer.activation)
    return linear_backward(x, layer.weights, dz)


def _check_conv_input(layer: Conv1DLayer, x: np.ndarray) -> int:
    if x.ndim != 3 or x.shape[2] != layer.in_channels:
        raise ShapeError(f"conv1d expects (*, positions, {layer.in_channels}) input, got {x.shape}")
    if x.shape[1] < layer.kernel_width:
        raise ShapeError(f"sequence of {x.shape[1]} positions is shorter than kernel width {layer.kernel_width}")
    return x.shape[1] - layer.kernel_width + 1


def _kernel_slice(layer: Conv1DLayer, offset: int) -> np.ndarray:
    return layer.weights[offset * layer.in_channels:(offset + 1) * layer.in_channels]


def conv1d_forward_batch(layer: Conv1DLayer, x: np.ndarray) -> np.ndarray:
    """(batch, positions, channels) -> (batch, positions - k + 1, filters), summed one kernel offset at a time."""
    positions = _check_conv_input(layer, x)
    out = np.broadcast_to(layer.bias, (x.shape[0], positions, layer.filters)).astype(
        np.result_type(x, layer.weights), copy=True
    )
    for offset in range(layer.kernel_width):
        out += x[:, offset:offset + positions, :] @ _kernel_slice(layer, offset)
    return out


def conv1d_backward_batch(layer: Conv1DLayer, x: np.ndarray, upstream: np.ndarray,
                          need_input_grad: bool = True) -> Tuple[Optional[np.ndarray], Tensor2D, np.ndarray]:
    positions = _check_conv_input(layer, x)
    if upstream.shape != (x.shape[0], positions, layer.filters):
        raise ShapeError(f"upstream gradient {upstream.shape} does not match conv output")
    flat_upstream = upstream.reshape(-1, layer.filters)
    weight_grad = np.empty_like(layer.weights, dtype=np.result_type(x, upstream))
    input_grad = np.zeros_like(x, dtype=np.result_type(x, upstream)) if need_input_grad else None
    for offset in range(layer.kernel_width):
        window = x[:, offset:offset + positions, :]
        rows = slice(offset * layer.in_channels, (offset + 1) * layer.in_channels)
        weight_grad[rows] = window.reshape(-1, layer.in_channels).T @ flat_upstream
        if need_input_grad:
            input_grad[:, offset:offset + positions, :] += upstream @ _kernel_slice(layer, offset).T
    return input_grad, weight_grad, flat_upstream.sum(axis=0)


def conv1d_forward(layer: Conv1DLayer, sequence: Tensor2D) -> Tensor2D:
    """Valid convolution of one (positions x in_channels) sequence."""
    sequence = as_tensor2d(sequence, "sequence")
    return conv1d_forward_batch(layer, sequence[None])[0]


def conv1d_backward(layer: Conv1DLayer, sequence: Tensor2D, upstream: Tensor2D) -> Tuple[Tensor2D, Tensor2D, np.ndarray]:
    input_grad, weight_grad, bias_grad = conv1d_backward_batch(layer, sequence[None], upstream[None])
    return input_grad[0], weight_grad, bias_grad


def global_max_pool_batch(feature_maps: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(batch, positions, filters) -> pooled (batch, filters) and argmax positions; ties go to the lowest position."""
    if feature_maps.ndim != 3 or feature_maps.shape[1] == 0:
        raise ShapeError(f"cannot pool an empty feature map of shape {feature_maps.shape}")
    argmax = feature_maps.argmax(axis=1)
    pooled = np.take_along_axis(feature_maps, argmax[:, None, :], axis=1)[:, 0, :]
    return pooled, argmax


def global_max_pool_backward_batch(upstream: np.ndarray, argmax: np.ndarray, positions: int) -> np.ndarray:
    grad = np.zeros((upstream.shape[0], positions, upstream.shape[1]), dtype=upstream.dtype)
    np.put_along_axis(grad, argmax[:, None, :], upstream[:, None, :], axis=1)
    return grad


def global_max_pool(feature_map: Tensor2D) -> Tuple[np.ndarray, np.ndarray]:
    if feature_map.ndim != 2:
        raise ShapeError(f"expected a (positions x filters) map, got {feature_map.shape}")
    pooled, argmax = global_max_pool_batch(feature_map[None])
    return pooled[0], argmax[0]


def global_max_pool_backward(upstream: np.ndarray, argmax: np.ndarray, positions: int) -> Tensor2D:
    return global_max_pool_backward_batch(upstream[None], argmax[None], positions)[0]


def dropout(x: np.ndarray, rate: float, rng: Optional[np.random.Generator], training: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    """Inverted dropout; returns the output and the scaling mask used (all ones at inference)."""
    if not training or rate == 0.0 or rng is None:
        return x, np.ones_like(x)
    mask = (rng.random(x.shape) >= rate).astype(x.dtype) / (1.0 - rate)
    return x * mask, mask
