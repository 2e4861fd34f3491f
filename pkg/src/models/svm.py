from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.errors import ModelValidationError, ShapeError
from src.models.sampling import check_binary_labels


@dataclass
class LinearSvm:
    weights: np.ndarray
    bias: float

    def decision_function(self, features: np.ndarray) -> np.ndarray:
        if features.ndim != 2 or features.shape[1] != self.weights.shape[0]:
            raise ShapeError(f"svm expects (*, {self.weights.shape[0]}) features, got {features.shape}")
        return features @ self.weights + self.bias


def train_linear_svm(
    features: np.ndarray,
    labels: Sequence[int],
    C: float = 1e-6,
    epochs: int = 20,
    batch_size: int = 32,
    seed: int = 42,
    project: bool = True,
) -> LinearSvm:
    """Pegasos mini-batch subgradient descent on (1/2)|w|^2 + C * sum(hinge).

    Labels may be given as 0/1 or -1/+1. The bias is a constant feature
    appended to every example, so it is regularized along with w.
    """
    labels = np.asarray(labels)
    if set(np.unique(labels)) <= {-1, 1}:
        labels = (labels > 0).astype(int)
    y = 2.0 * check_binary_labels(labels) - 1.0
    if features.ndim != 2 or features.shape[0] != len(y):
        raise ShapeError(f"{features.shape} features for {len(y)} labels")
    if C <= 0:
        raise ModelValidationError(f"C must be positive, got {C}")

    n = features.shape[0]
    x = np.hstack([features, np.ones((n, 1), dtype=features.dtype)])
    lam = 1.0 / (C * n)
    radius = 1.0 / np.sqrt(lam)
    w = np.zeros(x.shape[1], dtype=np.float64)
    rng = np.random.default_rng(seed)
    batch_size = min(batch_size, n)

    t = 0
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            batch = order[start:start + batch_size]
            t += 1
            eta = 1.0 / (lam * t)
            margins = y[batch] * (x[batch] @ w)
            violators = batch[margins < 1.0]
            w *= 1.0 - 1.0 / t
            if len(violators):
                w += (eta / len(batch)) * (y[violators] @ x[violators])
            if project:
                norm = np.linalg.norm(w)
                if norm > radius:
                    w *= radius / norm

    return LinearSvm(weights=w[:-1].copy(), bias=float(w[-1]))
