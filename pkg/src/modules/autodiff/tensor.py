"""Модуль плотных тензоров двойной точности и ленты обратного прохода."""

from contextvars import ContextVar
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from src.core import exceptions
from src.core.base.types import FloatArray

BackwardFn = Callable[[FloatArray], Sequence[FloatArray | None]]

_current_tape: ContextVar["Tape | None"] = ContextVar("current_tape", default=None)


class Tensor:
    """
    Плотный тензор (C×H×W или N×C×H×W) со значениями float64.

    Все значения обязаны быть конечными: NaN/Inf вызывает `NonFiniteError`.
    """

    __slots__ = ("data", "requires_grad", "grad", "__weakref__")

    def __init__(self, data, requires_grad: bool = False):
        array = np.asarray(data, dtype=np.float64)
        if not np.isfinite(array).all():
            raise exceptions.NonFiniteError()
        self.data: FloatArray = array
        self.requires_grad = requires_grad
        self.grad: FloatArray | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def item(self) -> float:
        if self.data.size != 1:
            raise exceptions.ContractError("Тензор не является скаляром.")
        return float(self.data.reshape(()))

    def zero_grad(self) -> None:
        self.grad = None

    def __add__(self, other: "Tensor") -> "Tensor":
        from src.modules.autodiff.ops import add

        return add(self, other)

    def __mul__(self, factor: float) -> "Tensor":
        from src.modules.autodiff.ops import scale

        return scale(self, factor)

    __rmul__ = __mul__

    def sum(self) -> "Tensor":
        from src.modules.autodiff.ops import tensor_sum

        return tensor_sum(self)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"


class Parameter(Tensor):
    """Обучаемый тензор с уникальным в пределах сети именем."""

    __slots__ = ("name",)

    def __init__(self, name: str, data):
        super().__init__(data, requires_grad=True)
        self.name = name

    def __repr__(self) -> str:
        return f"Parameter(name={self.name!r}, shape={self.shape})"


# MARK: Tape
@dataclass
class TapeNode:
    """Запись об одной выполненной дифференцируемой операции."""

    output: Tensor
    inputs: tuple[Tensor, ...]
    backward_fn: BackwardFn


@dataclass
class Tape:
    """
    Лента операций одного прямого прохода.

    Используется как контекстный менеджер: операции, выполненные внутри
    `with Tape() as tape:`, записываются в порядке выполнения. Вне ленты
    операции ничего не записывают (режим инференса).
    """

    nodes: list[TapeNode] = field(default_factory=list)

    def __enter__(self) -> "Tape":
        self._token = _current_tape.set(self)
        return self

    def __exit__(self, *exc_info) -> None:
        _current_tape.reset(self._token)

    def record(self, output: Tensor, inputs: tuple[Tensor, ...], backward_fn: BackwardFn):
        self.nodes.append(TapeNode(output, inputs, backward_fn))

    def clear(self) -> None:
        self.nodes.clear()


def current_tape() -> Tape | None:
    return _current_tape.get()


def apply_op(data: FloatArray, inputs: Iterable[Tensor], backward_fn: BackwardFn) -> Tensor:
    """
    Создать результат дифференцируемой операции и записать его на ленту.

    Args:
        data (FloatArray): Значение результата.
        inputs (Iterable[Tensor]): Входы операции в порядке `backward_fn`.
        backward_fn (BackwardFn): Отображение градиента результата
            в градиенты входов (None для входов без градиента).

    Returns:
        Tensor: Результат операции.
    """

    inputs = tuple(inputs)
    requires_grad = any(tensor.requires_grad for tensor in inputs)
    out = Tensor(data, requires_grad=requires_grad)

    tape = current_tape()
    if requires_grad and tape is not None:
        tape.record(out, inputs, backward_fn)
    return out


def backward(tape: Tape, loss: Tensor) -> None:
    """
    Обратный проход по ленте от скалярной функции потерь.

    Градиенты листовых тензоров с `requires_grad` накапливаются
    в `tensor.grad` (аддитивно при многократном использовании).
    После прохода лента очищается.

    Raises:
        ContractError: Функция потерь не скаляр.
    """

    if loss.data.size != 1:
        raise exceptions.ContractError("Обратный проход возможен только от скаляра.")

    produced = {id(node.output) for node in tape.nodes}
    grads: dict[int, FloatArray] = {id(loss): np.ones_like(loss.data)}

    def accumulate(tensor: Tensor, grad: FloatArray) -> None:
        key = id(tensor)
        if key in produced:
            grads[key] = grads[key] + grad if key in grads else grad
        else:
            tensor.grad = grad.copy() if tensor.grad is None else tensor.grad + grad

    if id(loss) not in produced and loss.requires_grad:
        accumulate(loss, grads.pop(id(loss)))

    for node in reversed(tape.nodes):
        grad_output = grads.pop(id(node.output), None)
        if grad_output is None:
            continue
        for tensor, grad in zip(node.inputs, node.backward_fn(grad_output)):
            if grad is not None and tensor.requires_grad:
                accumulate(tensor, grad)

    tape.clear()
