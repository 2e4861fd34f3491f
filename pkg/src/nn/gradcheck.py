from typing import Callable, Dict, Optional, Tuple
import logging

import numpy as np

from src.errors import NumericError
from src.nn.schemas import GradCheckReport

logger = logging.getLogger(__name__)

LossClosure = Callable[[], Tuple[float, Dict[str, np.ndarray]]]


def _loss(closure: LossClosure) -> float:
    value = float(closure()[0])
    if not np.isfinite(value):
        raise NumericError(f"loss is not finite ({value}) during gradient check")
    return value


def _straddles_kink(loss: float, loss_plus: float, loss_minus: float, epsilon: float, tolerance: float) -> bool:
    """One-sided slopes that disagree mean the step crossed a ReLU zero or a max-pool tie."""
    forward = (loss_plus - loss) / epsilon
    backward = (loss - loss_minus) / epsilon
    return abs(forward - backward) > tolerance * max(1.0, abs(forward), abs(backward))


def gradient_check(
    closure: LossClosure,
    params: Dict[str, np.ndarray],
    epsilon: float = 1e-5,
    abs_tolerance: float = 0.0,
    kink_tolerance: Optional[float] = 1e-2,
) -> GradCheckReport:
    """Compare the closure's analytic gradients with central differences.

    `closure` reads `params` (mutated in place here) and returns (loss, grads).
    Entries where both gradients are below `abs_tolerance` count as exact.
    Entries whose +/- epsilon step straddles a non-differentiable point are
    left out and counted in `kinks_skipped`; pass `kink_tolerance=None` to
    compare them anyway.
    """
    loss, analytic = closure()
    loss = float(loss)
    if not np.isfinite(loss):
        raise NumericError(f"loss is not finite ({loss}) during gradient check")

    worst, worst_name, count, kinks = 0.0, "", 0, 0
    for name, param in params.items():
        grad = analytic[name]
        for index in np.ndindex(param.shape):
            original = param[index]
            param[index] = original + epsilon
            loss_plus = _loss(closure)
            param[index] = original - epsilon
            loss_minus = _loss(closure)
            param[index] = original

            count += 1
            if kink_tolerance is not None and _straddles_kink(loss, loss_plus, loss_minus, epsilon, kink_tolerance):
                kinks += 1
                logger.debug(f"gradient check: {name}{list(index)} sits on a kink, skipped")
                continue
            numeric = (loss_plus - loss_minus) / (2.0 * epsilon)
            scale = max(abs(grad[index]), abs(numeric))
            if scale <= abs_tolerance:
                continue
            error = abs(grad[index] - numeric) / max(scale, 1e-12)
            if error > worst:
                worst, worst_name = error, f"{name}{list(index)}"

    logger.debug(f"gradient check over {count} parameters ({kinks} on kinks): "
                 f"max relative error {worst:.3e} at {worst_name}")
    return GradCheckReport(
        max_relative_error=worst,
        parameter_count=count,
        epsilon=epsilon,
        worst_parameter=worst_name,
        kinks_skipped=kinks,
    )
