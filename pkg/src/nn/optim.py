from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from src.errors import NumericError, ShapeError
from src.nn.schemas import Optimizer, TrainConfig

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8

Params = Dict[str, np.ndarray]


@dataclass
class OptimizerState:
    step: int = 0
    first_moment: Dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: Dict[str, np.ndarray] = field(default_factory=dict)


def optimizer_step(
    params: Params,
    grads: Params,
    config: TrainConfig,
    state: Optional[OptimizerState] = None,
) -> Tuple[Params, OptimizerState]:
    """Update params in place (SGD or Adam) and return them with the new state."""
    state = state or OptimizerState()
    state.step += 1
    lr = config.learning_rate

    for name, grad in grads.items():
        param = params[name]
        if param.shape != grad.shape:
            raise ShapeError(f"gradient for {name} has shape {grad.shape}, parameter has {param.shape}")
        if config.optimizer == Optimizer.SGD:
            param -= lr * grad
            continue

        m = state.first_moment.setdefault(name, np.zeros_like(param))
        v = state.second_moment.setdefault(name, np.zeros_like(param))
        m *= ADAM_BETA1
        m += (1.0 - ADAM_BETA1) * grad
        v *= ADAM_BETA2
        v += (1.0 - ADAM_BETA2) * grad * grad
        m_hat = m / (1.0 - ADAM_BETA1 ** state.step)
        v_hat = v / (1.0 - ADAM_BETA2 ** state.step)
        param -= lr * m_hat / (np.sqrt(v_hat) + ADAM_EPSILON)

    for name in grads:
        if not np.all(np.isfinite(params[name])):
            raise NumericError(f"parameter {name} became non-finite at step {state.step}")
    return params, state
