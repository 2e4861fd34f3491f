from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class Vocabulary(BaseModel):
    """Token to index map; 0 is reserved for padding and unknown tokens."""
    model_config = ConfigDict(frozen=True)

    token_to_index: Dict[str, int]
    min_count: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def contiguous_indices(self):
        if sorted(self.token_to_index.values()) != list(range(1, len(self.token_to_index) + 1)):
            raise ValueError("vocabulary indices must be exactly 1..size")
        return self

    @property
    def size(self) -> int:
        return len(self.token_to_index)

    def lookup(self, token: str) -> int:
        return self.token_to_index.get(token, 0)

    def tokens(self) -> List[str]:
        """Tokens in index order, the form stored in checkpoint headers."""
        return sorted(self.token_to_index, key=self.token_to_index.__getitem__)

    @classmethod
    def from_tokens(cls, tokens: List[str], min_count: int = 1) -> "Vocabulary":
        return cls(token_to_index={token: i for i, token in enumerate(tokens, start=1)}, min_count=min_count)


class BowVector(BaseModel):
    indices: List[int]
    values: List[float]
    dim: int

    @model_validator(mode="after")
    def sorted_positive(self):
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values differ in length")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")
        if self.indices and (self.indices[0] < 1 or self.indices[-1] > self.dim):
            raise ValueError(f"indices must lie in [1, {self.dim}]")
        if any(value <= 0 for value in self.values):
            raise ValueError("values must be positive")
        return self


class SequenceEncoding(BaseModel):
    token_ids: List[int]
    true_length: int = Field(ge=0)

    @model_validator(mode="after")
    def padded_tail(self):
        if self.true_length > len(self.token_ids):
            raise ValueError("true_length exceeds max_len")
        if any(self.token_ids[self.true_length:]):
            raise ValueError("positions after true_length must be padding (0)")
        return self

    @property
    def max_len(self) -> int:
        return len(self.token_ids)


@dataclass(frozen=True)
class EmbeddingTable:
    dim: int
    vectors: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        for token, vector in self.vectors.items():
            if vector.shape != (self.dim,):
                raise ValueError(f"vector for {token!r} has shape {vector.shape}, expected ({self.dim},)")

    def __len__(self) -> int:
        return len(self.vectors)

    def matrix(self, vocab: Vocabulary, dtype=np.float64) -> np.ndarray:
        """Rows aligned with vocabulary indices; row 0 and tokens without a vector stay zero."""
        table = np.zeros((vocab.size + 1, self.dim), dtype=dtype)
        for token, index in vocab.token_to_index.items():
            vector = self.vectors.get(token)
            if vector is not None:
                table[index] = vector
        return table
