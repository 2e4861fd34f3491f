import numpy as np
import pytest

from src.errors import NumericError, ShapeError
from src.nn.optim import optimizer_step
from src.nn.schemas import Optimizer, TrainConfig


def test_sgd_step():
    params = {"w": np.array([[1.0, 2.0]])}
    config = TrainConfig(learning_rate=0.5, optimizer=Optimizer.SGD)
    params, state = optimizer_step(params, {"w": np.array([[2.0, -2.0]])}, config)
    np.testing.assert_allclose(params["w"], [[0.0, 3.0]])
    assert state.step == 1


def test_adam_first_step_moves_by_learning_rate():
    params = {"w": np.zeros(3)}
    config = TrainConfig(learning_rate=0.01, optimizer=Optimizer.ADAM)
    params, _ = optimizer_step(params, {"w": np.array([5.0, -0.1, 0.0])}, config)
    np.testing.assert_allclose(params["w"], [-0.01, 0.01, 0.0], atol=1e-6)


def test_adam_minimizes_a_quadratic():
    target = np.array([3.0, -1.0])
    params = {"w": np.zeros(2)}
    config = TrainConfig(learning_rate=0.1, optimizer=Optimizer.ADAM)
    state = None
    for _ in range(500):
        params, state = optimizer_step(params, {"w": 2.0 * (params["w"] - target)}, config, state)
    np.testing.assert_allclose(params["w"], target, atol=1e-2)


def test_non_finite_parameters_are_reported():
    with pytest.raises(NumericError):
        optimizer_step({"w": np.zeros(2)}, {"w": np.array([np.nan, 0.0])}, TrainConfig(optimizer=Optimizer.SGD))


def test_gradient_shape_must_match():
    with pytest.raises(ShapeError):
        optimizer_step({"w": np.zeros(2)}, {"w": np.zeros(3)}, TrainConfig())
