from dataclasses import dataclass
from enum import Enum
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field

from src.errors import NumericError, ShapeError

# Every matrix in the kernel is a 2-D float numpy array in row-major order.
Tensor2D = np.ndarray


class Activation(str, Enum):
    IDENTITY = "identity"
    RELU = "relu"
    SIGMOID = "sigmoid"
    SOFTMAX = "softmax"


class Optimizer(str, Enum):
    SGD = "sgd"
    ADAM = "adam"


class TrainConfig(BaseModel):
    epochs: int = Field(default=10, ge=1)
    batch_size: int = Field(default=32, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0)
    seed: int = 42
    optimizer: Optimizer = Optimizer.ADAM
    dtype: Literal["float64", "float32"] = "float64"

    @property
    def np_dtype(self):
        return np.dtype(self.dtype)


class GradCheckReport(BaseModel):
    max_relative_error: float = Field(ge=0)
    parameter_count: int
    epsilon: float
    worst_parameter: str = ""
    kinks_skipped: int = 0


def as_tensor2d(array, name: str = "tensor") -> Tensor2D:
    array = np.asarray(array)
    if array.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise NumericError(f"{name} contains non-finite entries")
    return array


@dataclass
class DenseLayer:
    weights: Tensor2D  # in_dim x out_dim
    bias: np.ndarray   # out_dim
    activation: Activation = Activation.IDENTITY

    def __post_init__(self):
        if self.weights.ndim != 2 or self.bias.shape != (self.weights.shape[1],):
            raise ShapeError(f"dense weights {self.weights.shape} do not match bias {self.bias.shape}")

    @property
    def in_dim(self) -> int:
        return self.weights.shape[0]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[1]


@dataclass
class Conv1DLayer:
    """Weights are (kernel_width * in_channels) x filters; window row j*in_channels + c holds position j, channel c."""
    kernel_width: int
    in_channels: int
    weights: Tensor2D
    bias: np.ndarray

    def __post_init__(self):
        if self.kernel_width < 1:
            raise ShapeError(f"kernel_width must be >= 1, got {self.kernel_width}")
        expected = (self.kernel_width * self.in_channels, self.bias.shape[0])
        if self.weights.shape != expected or self.bias.ndim != 1:
            raise ShapeError(f"conv weights {self.weights.shape} do not match {expected}")

    @property
    def filters(self) -> int:
        return self.weights.shape[1]
