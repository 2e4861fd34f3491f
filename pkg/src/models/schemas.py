from typing import List, Literal
import math

from pydantic import BaseModel, Field, field_validator, model_validator

from src.nn.schemas import Optimizer, TrainConfig


class DaeFfConfig(BaseModel):
    bow_dim: int | None = Field(default=None, ge=1)  # fixed by the training vocabulary when None
    min_count: int = Field(default=2, ge=1)
    dae_hidden: int = Field(default=128, ge=1)
    corruption_levels: List[float] = [0.1, 0.3, 0.5]
    dae_epochs: int = Field(default=20, ge=1)
    dae_learning_rate: float = Field(default=1e-3, gt=0)
    ff_hidden: int = Field(default=128, ge=1)
    ff_epochs: int = Field(default=20, ge=1)
    ff_learning_rate: float = Field(default=1e-3, gt=0)
    batch_size: int = Field(default=32, ge=1)
    svm_C: float = Field(default=1e-6, gt=0)
    svm_epochs: int = Field(default=20, ge=1)
    svm_batch_size: int = Field(default=32, ge=1)
    svm_oversample: bool = True
    seed: int = 42
    dtype: Literal["float64", "float32"] = "float64"

    @field_validator("corruption_levels")
    @classmethod
    def three_levels(cls, value: List[float]) -> List[float]:
        if len(value) != 3:
            raise ValueError(f"exactly three corruption levels are required, got {len(value)}")
        if any(not 0.0 <= level < 1.0 for level in value):
            raise ValueError("corruption levels must lie in [0, 1)")
        return value


class CnnConfig(BaseModel):
    embedding_dim: int = Field(default=100, ge=1)
    max_len: int = Field(default=600, ge=1)
    channels: List[int] = [3, 5, 7]
    filters_per_channel: int = Field(default=128, ge=1)
    dense_units: int = Field(default=128, ge=1)
    dropout_rate: float = Field(default=0.5, ge=0.0, lt=1.0)
    epochs: int = Field(default=20, ge=1)
    batch_size: int = Field(default=64, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0)
    seed: int = 42
    dtype: Literal["float64", "float32"] = "float64"

    @field_validator("channels")
    @classmethod
    def multi_channel(cls, value: List[int]) -> List[int]:
        if len(value) < 2:
            raise ValueError("a multi-channel CNN needs at least two kernel widths")
        if any(width < 1 for width in value):
            raise ValueError("kernel widths must be >= 1")
        return value

    @model_validator(mode="after")
    def fits_widest_kernel(self):
        if self.max_len < max(self.channels):
            raise ValueError(f"max_len {self.max_len} is shorter than the widest kernel {max(self.channels)}")
        return self


class FastTextConfig(BaseModel):
    embedding_dim: int = Field(default=100, ge=1)
    epochs: int = Field(default=5, ge=1)
    learning_rate: float = Field(default=0.1, gt=0)
    min_count: int = Field(default=1, ge=1)
    oversample: bool = False
    seed: int = 42


class RankedPrediction(BaseModel):
    doc_id: str
    score: float

    @field_validator("score")
    @classmethod
    def finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("score must be finite")
        return value


def supervised_train_config(epochs: int, batch_size: int, learning_rate: float, seed: int,
                            dtype: str = "float64") -> TrainConfig:
    return TrainConfig(
        epochs=epochs, batch_size=batch_size, learning_rate=learning_rate,
        seed=seed, optimizer=Optimizer.ADAM, dtype=dtype,
    )
