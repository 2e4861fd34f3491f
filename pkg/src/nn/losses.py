"""Batch-mean losses and their gradients."""
import numpy as np

from src.errors import ShapeError
from src.nn.layers import sigmoid


def _same_shape(a: np.ndarray, b: np.ndarray, what: str) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"{what}: {a.shape} vs {b.shape}")


def cross_entropy(probabilities: np.ndarray, targets: np.ndarray) -> float:
    """Mean over rows of -sum(t * log p) for one-hot targets."""
    _same_shape(probabilities, targets, "cross_entropy probabilities vs targets")
    safe = np.where(targets > 0, probabilities, 1.0)
    return float(-(targets * np.log(safe)).sum() / probabilities.shape[0])


def cross_entropy_grad(probabilities: np.ndarray, targets: np.ndarray) -> np.ndarray:
    _same_shape(probabilities, targets, "cross_entropy probabilities vs targets")
    safe = np.where(targets > 0, probabilities, 1.0)
    return -(targets / safe) / probabilities.shape[0]


def softmax_cross_entropy_grad(probabilities: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Gradient of cross_entropy(softmax(z), t) with respect to the logits z."""
    _same_shape(probabilities, targets, "cross_entropy probabilities vs targets")
    return (probabilities - targets) / probabilities.shape[0]


def sigmoid_cross_entropy(logits: np.ndarray, targets: np.ndarray) -> float:
    """Summed over columns, averaged over rows."""
    _same_shape(logits, targets, "sigmoid_cross_entropy logits vs targets")
    elementwise = np.maximum(logits, 0.0) - logits * targets + np.log1p(np.exp(-np.abs(logits)))
    return float(elementwise.sum() / logits.shape[0])


def sigmoid_cross_entropy_grad(logits: np.ndarray, targets: np.ndarray) -> np.ndarray:
    _same_shape(logits, targets, "sigmoid_cross_entropy logits vs targets")
    return (sigmoid(logits) - targets) / logits.shape[0]


def hinge(scores: np.ndarray, targets: np.ndarray) -> float:
    """mean(max(0, 1 - y*s)) for targets in {-1, +1}."""
    _same_shape(scores, targets, "hinge scores vs targets")
    return float(np.maximum(0.0, 1.0 - targets * scores).mean())


def hinge_grad(scores: np.ndarray, targets: np.ndarray) -> np.ndarray:
    _same_shape(scores, targets, "hinge scores vs targets")
    return -targets * (targets * scores < 1.0) / scores.size
