"""Модуль оптимизатора: SGD с моментом и poly-расписание шага."""

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from src.core import exceptions
from src.core.base.types import FloatArray
from src.modules.autodiff import Parameter


@dataclass
class OptimState:
    """Скорости по параметрам; нулевые при создании."""

    velocity: dict[str, FloatArray] = field(default_factory=dict)

    @classmethod
    def zeros(cls, params: Mapping[str, Parameter]) -> "OptimState":
        return cls({name: np.zeros_like(p.data) for name, p in params.items()})


def poly_lr(initial_lr: float, current_iter: int, max_iter: int, power: float) -> float:
    """
    lr = initial_lr · (1 − current_iter/max_iter)^power.

    Raises:
        ContractError: current_iter вне [0, max_iter].
    """

    if not 0 <= current_iter <= max_iter:
        raise exceptions.ContractError(
            f"Итерация {current_iter} вне расписания [0, {max_iter}]."
        )
    return initial_lr * (1.0 - current_iter / max_iter) ** power


def sgd_momentum_step(
    params: Mapping[str, Parameter],
    grads: Mapping[str, FloatArray | None],
    state: OptimState,
    lr: float,
    momentum: float,
) -> None:
    """
    Классический момент: v ← μ·v + g; p ← p − lr·v.

    Raises:
        ContractError: Нет градиента для параметра.
        DimensionError: Форма градиента не совпадает с параметром.
        NonFiniteError: Параметр стал нечисловым.
    """

    for name, parameter in params.items():
        grad = grads.get(name)
        if grad is None:
            raise exceptions.ContractError(f"Нет градиента для {name}.")
        if grad.shape != parameter.shape:
            raise exceptions.DimensionError(f"Градиент {name}: {grad.shape}.")
        velocity = state.velocity.setdefault(name, np.zeros_like(parameter.data))
        velocity *= momentum
        velocity += grad
        updated = parameter.data - lr * velocity
        if not np.isfinite(updated).all():
            raise exceptions.NonFiniteError(f"Параметр {name} стал нечисловым.")
        parameter.data = updated
