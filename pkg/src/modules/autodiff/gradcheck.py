"""Модуль проверки аналитических градиентов конечными разностями."""

from typing import Callable

import numpy as np

from src.core import exceptions
from src.modules.autodiff.tensor import Tape, Tensor, backward

# Излом: односторонние наклоны расходятся, аналитическое значение лежит на одном из них.
KINK_JUMP = 1e-6
KINK_MATCH = 1e-2


def _evaluate(f: Callable[[Tensor], Tensor], data: np.ndarray) -> float:
    try:
        value = f(Tensor(data)).item()
    except exceptions.NonFiniteError as ex:
        raise exceptions.EvaluationError() from ex
    if not np.isfinite(value):
        raise exceptions.EvaluationError()
    return value


def analytic_gradient(f: Callable[[Tensor], Tensor], x: Tensor) -> np.ndarray:
    """Градиент скалярной функции `f` по `x` обратным проходом."""

    leaf = Tensor(x.data.copy(), requires_grad=True)
    with Tape() as tape:
        loss = f(leaf)
    backward(tape, loss)
    if leaf.grad is None:
        return np.zeros_like(leaf.data)
    return leaf.grad


def grad_check(
    f: Callable[[Tensor], Tensor],
    x: Tensor,
    eps: float = 1e-5,
    floor: float = 1e-8,
) -> float:
    """
    Максимальная относительная ошибка аналитического градиента.

    Для каждой координаты сравниваются аналитическая производная и
    центральная разность: |a − n| / max(|a|, |n|, floor).

    Координата исключается как точка излома (например, ReLU в нуле),
    только если односторонние разности расходятся и аналитическое значение
    совпадает с одной из них с точностью до 1% от расхождения. На гладкой
    функции расхождение порядка eps·f'', поэтому неверный градиент так
    не исключается.

    Args:
        f (Callable[[Tensor], Tensor]): Скалярная дифференцируемая функция.
        x (Tensor): Точка проверки.
        eps (float): Шаг конечной разности.
        floor (float): Нижняя граница знаменателя.

    Returns:
        float: Максимальная относительная ошибка по неисключенным координатам.

    Raises:
        ContractError: eps ≤ 0.
        EvaluationError: `f` вернула нечисловое значение.
    """

    if eps <= 0:
        raise exceptions.ContractError("grad_check: eps > 0.")

    try:
        analytic = analytic_gradient(f, x).reshape(-1)
    except exceptions.NonFiniteError as ex:
        raise exceptions.EvaluationError() from ex
    base = x.data.astype(np.float64).reshape(-1)
    center = _evaluate(f, base.reshape(x.shape))

    worst = 0.0
    for index in range(base.size):
        shifted = base.copy()
        shifted[index] = base[index] + eps
        f_plus = _evaluate(f, shifted.reshape(x.shape))
        shifted[index] = base[index] - eps
        f_minus = _evaluate(f, shifted.reshape(x.shape))

        numeric = (f_plus - f_minus) / (2 * eps)
        forward_slope = (f_plus - center) / eps
        backward_slope = (center - f_minus) / eps
        value = analytic[index]

        mismatch = abs(forward_slope - backward_slope)
        scale = max(abs(forward_slope), abs(backward_slope), floor)
        one_sided = min(abs(value - forward_slope), abs(value - backward_slope))
        if mismatch > KINK_JUMP * scale and one_sided <= KINK_MATCH * mismatch:
            continue

        error = abs(value - numeric) / max(abs(value), abs(numeric), floor)
        worst = max(worst, error)

    return worst
