"""
Модуль направленной послойной свертки и блока MSC.

Каждое направление сводится к каноническому виду: слои идут по
предпоследней оси сверху вниз, свертка и сдвиг сообщения действуют вдоль
последней оси. Горизонтальное семейство транспонируется (H↔W), обратный
обход отражает ось слоев. Рекуррентность в каноническом виде:

    X'_1 = X_1
    X'_i = X_i + shift(ReLU(conv(X'_{i-1}, K)))

Вход C×H×W или батч N×C×H×W; батч проходит рекуррентность за один обход слоев.
"""

import numpy as np
from loguru import logger
from numpy.lib.stride_tricks import sliding_window_view

from src.core import exceptions
from src.core.base.types import FloatArray
from src.modules.autodiff import Tensor, apply_op
from src.modules.slice_conv.schemas import (
    Direction,
    MscParams,
    SliceFamily,
    SliceKernel,
)


# MARK: Canonical frame
def _to_canonical(array: FloatArray, direction: Direction) -> FloatArray:
    if direction.family is SliceFamily.HORIZONTAL:
        array = np.swapaxes(array, -1, -2)
    if direction.reverse:
        array = array[..., ::-1, :]
    return np.ascontiguousarray(array)


def _from_canonical(array: FloatArray, direction: Direction) -> FloatArray:
    if direction.reverse:
        array = array[..., ::-1, :]
    if direction.family is SliceFamily.HORIZONTAL:
        array = np.swapaxes(array, -1, -2)
    return np.ascontiguousarray(array)


def _shift(array: FloatArray, shift: int) -> FloatArray:
    """Сдвиг вдоль последней оси: вытесненный вектор отбрасывается, вход заполняется нулем."""

    if shift == 0:
        return array
    result = np.zeros_like(array)
    if shift > 0:
        result[..., 1:] = array[..., :-1]
    else:
        result[..., :-1] = array[..., 1:]
    return result


def _slice_windows(slice_: FloatArray, size: int) -> FloatArray:
    """Окна N×C×L×k по последней оси с дополнением (k−1)/2."""

    pad = (size - 1) // 2
    padded = np.pad(slice_, ((0, 0), (0, 0), (pad, pad)))
    return sliding_window_view(padded, size, axis=2)


def _windows_adjoint(grad_windows: FloatArray) -> FloatArray:
    """Сопряженное к `_slice_windows`: N×C×L×k -> N×C×L."""

    *leading, length, size = grad_windows.shape
    pad = (size - 1) // 2
    grad_padded = np.zeros((*leading, length + 2 * pad))
    for j in range(size):
        grad_padded[..., j : j + length] += grad_windows[..., j]
    return grad_padded[..., pad : pad + length]


class SliceConvService:
    """Сервис направленной послойной свертки (прямой и обратный проход)."""

    # MARK: Shift
    @classmethod
    def shift_message(cls, message: Tensor, direction: Direction) -> Tensor:
        """
        Сдвинуть сообщение диагонального направления на один пиксель.

        MD↘/MD↖ сдвигают C×1×W вдоль W на +1/−1, CD↙/CD↗ сдвигают
        C×H×1 вдоль H на +1/−1. Для V/H направлений тождество.
        """

        shift = direction.shift
        if shift == 0:
            return apply_op(message.data.copy(), (message,), lambda g: (g,))

        axis = -1 if direction.family is SliceFamily.VERTICAL else -2

        def moved(array: FloatArray, amount: int) -> FloatArray:
            return np.moveaxis(_shift(np.moveaxis(array, axis, -1), amount), -1, axis)

        return apply_op(
            moved(message.data, shift),
            (message,),
            lambda g: (moved(g, -shift),),
        )

    # MARK: Directional
    @classmethod
    def directional_slice_conv(
        cls,
        x: Tensor,
        kernel: SliceKernel,
        direction: Direction,
    ) -> Tensor:
        """
        Направленная послойная свертка C×H×W -> C×H×W.

        Args:
            x (Tensor): Вход C×H×W или батч N×C×H×W.
            kernel (SliceKernel): Ядро семейства направления.
            direction (Direction): Направление распространения.

        Returns:
            Tensor: Выход той же формы; первый по обходу слой равен входному.

        Raises:
            ConfigurationError: Семейство ядра не совпадает с направлением.
            DimensionError: Число каналов входа и ядра различается.
        """

        if kernel.family is not direction.family:
            raise exceptions.ConfigurationError(
                f"Ядро семейства {kernel.family.value} для направления {direction.value}."
            )
        if x.ndim not in (3, 4) or x.shape[-3] != kernel.channels:
            raise exceptions.DimensionError(
                f"Вход {x.shape} для ядра {kernel.weight.shape}."
            )

        batched = x.ndim == 4
        weight = kernel.weight.data
        size, shift = kernel.size, direction.shift
        canonical = _to_canonical(x.data if batched else x.data[None], direction)
        n_images, channels, n_slices, length = canonical.shape
        if size > length:
            logger.warning(
                f"Ядро {size} шире слоя {length} ({direction.value}): "
                "часть ядра попадает только на дополнение."
            )

        out = canonical.copy()
        pre_activations = np.zeros((n_slices, n_images, channels, length))
        for i in range(1, n_slices):
            windows = _slice_windows(out[:, :, i - 1], size)
            # N×L×C_out
            message = np.tensordot(windows, weight, axes=([1, 3], [1, 2])).transpose(0, 2, 1)
            pre_activations[i] = message
            out[:, :, i] = canonical[:, :, i] + _shift(np.where(message > 0, message, 0.0), shift)

        def backward_fn(g: FloatArray):
            grad = _to_canonical(g if batched else g[None], direction).copy()
            grad_weight = np.zeros_like(weight)
            for i in range(n_slices - 1, 0, -1):
                grad_message = _shift(grad[:, :, i], -shift) * (pre_activations[i] > 0)
                windows = _slice_windows(out[:, :, i - 1], size)
                grad_weight += np.tensordot(grad_message, windows, axes=([0, 2], [0, 2]))
                # N×L×C_in×k
                grad_windows = np.tensordot(grad_message, weight, axes=([1], [0]))
                grad[:, :, i - 1] += _windows_adjoint(grad_windows.transpose(0, 2, 1, 3))
            grad = _from_canonical(grad, direction)
            return (grad if batched else grad[0]), grad_weight

        result = _from_canonical(out, direction)
        return apply_op(result if batched else result[0], (x, kernel.weight), backward_fn)

    # MARK: MSC
    @classmethod
    def msc_forward(cls, x: Tensor, params: MscParams) -> Tensor:
        """
        Блок MSC: направленные свертки последовательно, каждая берет
        выход предыдущей, в порядке `params.order`.

        Raises:
            DimensionError: Число каналов входа не совпадает с ядрами.
        """

        for direction, kernel in params.kernels.items():
            if x.ndim not in (3, 4) or kernel.channels != x.shape[-3]:
                raise exceptions.DimensionError(
                    f"MSC: вход {x.shape}, ядро {direction.value} {kernel.weight.shape}."
                )

        for direction in params.order:
            kernel = params.kernels.get(direction)
            if kernel is not None:
                x = cls.directional_slice_conv(x, kernel, direction)
        return x
