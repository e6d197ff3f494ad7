"""Модуль дифференцируемых операций над тензорами."""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from src.core import exceptions
from src.core.base.types import FloatArray
from src.modules.autodiff.tensor import Tensor, apply_op


# MARK: Elementwise
def add(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise exceptions.DimensionError(f"Сложение тензоров {a.shape} и {b.shape}.")
    return apply_op(a.data + b.data, (a, b), lambda g: (g, g))


def scale(x: Tensor, factor: float) -> Tensor:
    return apply_op(x.data * factor, (x,), lambda g: (g * factor,))


def tensor_sum(x: Tensor) -> Tensor:
    return apply_op(
        np.asarray(x.data.sum()),
        (x,),
        lambda g: (np.full_like(x.data, float(g)),),
    )


def relu(x: Tensor) -> Tensor:
    """Поэлементный max(x, 0); производная в нуле равна 0."""

    mask = x.data > 0
    return apply_op(np.where(mask, x.data, 0.0), (x,), lambda g: (g * mask,))


# MARK: Geometry
def _spatial_pad(ndim: int, rows: tuple[int, int], cols: tuple[int, int]) -> tuple:
    return ((0, 0),) * (ndim - 2) + (rows, cols)


def pad2d(x: Tensor, top: int, bottom: int, left: int, right: int) -> Tensor:
    """Дополнить C×H×W (или N×C×H×W) нулями по краям."""

    if min(top, bottom, left, right) < 0:
        raise exceptions.ConfigurationError("Отрицательное дополнение.")
    height, width = x.shape[-2:]
    padded = np.pad(x.data, _spatial_pad(x.ndim, (top, bottom), (left, right)))

    def backward_fn(g: FloatArray):
        return (g[..., top : top + height, left : left + width],)

    return apply_op(padded, (x,), backward_fn)


def crop2d(x: Tensor, top: int, left: int, height: int, width: int) -> Tensor:
    """Вырезать окно height×width из C×H×W (или N×C×H×W)."""

    full_height, full_width = x.shape[-2:]
    if top + height > full_height or left + width > full_width:
        raise exceptions.DimensionError("Окно выходит за границы тензора.")

    def backward_fn(g: FloatArray):
        grad = np.zeros_like(x.data)
        grad[..., top : top + height, left : left + width] = g
        return (grad,)

    return apply_op(
        x.data[..., top : top + height, left : left + width].copy(),
        (x,),
        backward_fn,
    )


# MARK: Convolution
def conv2d(
    x: Tensor,
    weight: Tensor,
    bias: Tensor | None = None,
    stride: int = 1,
    padding: int = 0,
) -> Tensor:
    """
    Двумерная кросс-корреляция (без отражения ядра).

    Args:
        x (Tensor): Вход C_in×H×W или батч N×C_in×H×W.
        weight (Tensor): Веса C_out×C_in×kh×kw, kh и kw нечетные.
        bias (Tensor | None): Смещение C_out.
        stride (int): Шаг свертки.
        padding (int): Симметричное дополнение нулями.

    Returns:
        Tensor: Выход C_out×H'×W' (N×C_out×H'×W'), H' = (H + 2·padding − kh)/stride + 1.

    Raises:
        DimensionError: Несовпадение размерностей.
        ConfigurationError: Четное ядро или нецелый размер выхода.
    """

    if x.ndim not in (3, 4) or weight.ndim != 4 or weight.shape[1] != x.shape[-3]:
        raise exceptions.DimensionError(
            f"conv2d: вход {x.shape}, веса {weight.shape}."
        )
    out_channels, in_channels, kh, kw = weight.shape
    if bias is not None and bias.shape != (out_channels,):
        raise exceptions.DimensionError(f"conv2d: смещение {bias.shape}.")
    if kh % 2 == 0 or kw % 2 == 0:
        raise exceptions.ConfigurationError("conv2d: размер ядра должен быть нечетным.")
    if stride < 1 or padding < 0:
        raise exceptions.ConfigurationError("conv2d: stride ≥ 1, padding ≥ 0.")

    height, width = x.shape[-2:]
    span_h, span_w = height + 2 * padding - kh, width + 2 * padding - kw
    if span_h < 0 or span_w < 0 or span_h % stride or span_w % stride:
        raise exceptions.ConfigurationError(
            f"conv2d: нецелый размер выхода для {height}×{width}, "
            f"ядро {kh}×{kw}, stride {stride}, padding {padding}."
        )
    out_h, out_w = span_h // stride + 1, span_w // stride + 1

    batched = x.ndim == 4
    source = x.data if batched else x.data[None]
    padded = np.pad(source, _spatial_pad(4, (padding, padding), (padding, padding)))
    # N×C_in×H'×W'×kh×kw
    windows = sliding_window_view(padded, (kh, kw), axis=(2, 3))[:, :, ::stride, ::stride]
    # N×H'×W'×C_out
    out = np.tensordot(windows, weight.data, axes=([1, 4, 5], [1, 2, 3]))
    out = out.transpose(0, 3, 1, 2)
    if bias is not None:
        out = out + bias.data[:, None, None]

    def backward_fn(g: FloatArray):
        g = g if batched else g[None]
        grad_weight = np.tensordot(g, windows, axes=([0, 2, 3], [0, 2, 3]))
        grad_bias = g.sum(axis=(0, 2, 3)) if bias is not None else None

        grad_padded = np.zeros_like(padded)
        for i in range(kh):
            for j in range(kw):
                # N×H'×W'×C_in
                contribution = np.tensordot(g, weight.data[:, :, i, j], axes=([1], [0]))
                grad_padded[
                    :,
                    :,
                    i : i + stride * (out_h - 1) + 1 : stride,
                    j : j + stride * (out_w - 1) + 1 : stride,
                ] += contribution.transpose(0, 3, 1, 2)
        grad_x = grad_padded[:, :, padding : padding + height, padding : padding + width]

        return (grad_x if batched else grad_x[0]), grad_weight, grad_bias

    inputs = (x, weight) if bias is None else (x, weight, bias)
    return apply_op(out if batched else out[0], inputs, backward_fn)


# MARK: Upsampling
def _interpolation_matrix(size: int, factor: int) -> FloatArray:
    """Матрица билинейной интерполяции (align_corners = false) factor·size×size."""

    matrix = np.zeros((size * factor, size))
    for out_index in range(size * factor):
        source = max((out_index + 0.5) / factor - 0.5, 0.0)
        low = min(int(np.floor(source)), size - 1)
        high = min(low + 1, size - 1)
        weight = source - low
        matrix[out_index, low] += 1.0 - weight
        matrix[out_index, high] += weight
    return matrix


def upsample_bilinear(x: Tensor, factor: int) -> Tensor:
    """
    Билинейное увеличение C×H×W (или N×C×H×W) в `factor` раз по обеим осям.

    Raises:
        ConfigurationError: factor < 1.
    """

    if factor < 1:
        raise exceptions.ConfigurationError("upsample_bilinear: factor ≥ 1.")
    if x.ndim not in (3, 4):
        raise exceptions.DimensionError(f"upsample_bilinear: вход {x.shape}.")
    if factor == 1:
        return apply_op(x.data.copy(), (x,), lambda g: (g,))

    height, width = x.shape[-2:]
    rows = _interpolation_matrix(height, factor)
    cols = _interpolation_matrix(width, factor)
    out = rows @ x.data @ cols.T

    return apply_op(out, (x,), lambda g: (rows.T @ g @ cols,))
