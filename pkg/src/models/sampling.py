from typing import List, Sequence

import numpy as np

from src.errors import ModelValidationError


def oversample_minority(indices: Sequence[int], labels: Sequence[int], seed: int) -> List[int]:
    """Duplicate minority-class indices (drawn with replacement) until both classes are equal, then shuffle."""
    indices = np.asarray(indices)
    labels = np.asarray(labels)
    if len(indices) != len(labels):
        raise ModelValidationError(f"{len(indices)} indices but {len(labels)} labels")
    positives, negatives = indices[labels == 1], indices[labels == 0]
    if len(positives) == 0 or len(negatives) == 0:
        raise ModelValidationError("oversampling needs both classes present")

    rng = np.random.default_rng(seed)
    minority, majority = (positives, negatives) if len(positives) < len(negatives) else (negatives, positives)
    extra = rng.choice(minority, size=len(majority) - len(minority), replace=True)
    resampled = np.concatenate([majority, minority, extra])
    rng.shuffle(resampled)
    return resampled.tolist()


def check_binary_labels(labels: Sequence[int]) -> np.ndarray:
    labels = np.asarray(labels, dtype=int)
    if labels.ndim != 1 or not np.isin(labels, (0, 1)).all():
        raise ModelValidationError("labels must be a 1-D sequence of 0/1")
    if labels.min() == labels.max():
        raise ModelValidationError("training data must contain both included and excluded documents")
    return labels
