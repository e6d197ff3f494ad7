"""Модуль функции потерь: кросс-энтропия с весами фона и полос."""

import numpy as np

from src.core import constants, exceptions
from src.core.base.types import ClassMask, FloatArray
from src.modules.autodiff import Tensor, apply_op
from src.modules.training.schemas import LossNormalization


def _log_softmax(logits: FloatArray) -> FloatArray:
    """log softmax по оси классов N×K×H×W."""

    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def _term_weights(weight: float, counts: np.ndarray) -> FloatArray:
    return np.divide(weight, counts, out=np.zeros(counts.shape), where=counts > 0)


def weighted_cross_entropy(
    logits: Tensor,
    target: ClassMask,
    lambda_b: float = 0.4,
    lambda_l: float = 1.0,
    normalization: LossNormalization = LossNormalization.PER_TERM,
) -> Tensor:
    """
    L = λ_b·L_b + λ_l·L_l.

    L_b и L_l - средние −log softmax по пикселям фона и полос (классы
    1–4 вместе). Слагаемое без пикселей равно 0. При нормировке `TOTAL`
    оба слагаемых делятся на общее число пикселей. Для батча слагаемые
    считаются по каждому изображению, результат - их среднее.

    Args:
        logits (Tensor): Логиты n_classes×H×W или батч N×n_classes×H×W.
        target (ClassMask): Разметка H×W или N×H×W.
        lambda_b (float): Вес фона.
        lambda_l (float): Вес полос.
        normalization (LossNormalization): Нормировка слагаемых.

    Returns:
        Tensor: Скалярная функция потерь.

    Raises:
        DimensionError: Формы логитов и разметки не согласованы.
        DataError: Значение разметки вне [0, n_classes).
    """

    batched = logits.ndim == 4
    expected = (logits.shape[0], *logits.shape[2:]) if batched else logits.shape[1:]
    if logits.ndim not in (3, 4) or tuple(target.shape) != tuple(expected):
        raise exceptions.DimensionError(f"Логиты {logits.shape}, разметка {target.shape}.")
    n_classes = logits.shape[-3]
    labels = (target if batched else target[None]).astype(np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
        raise exceptions.DataError(f"Значение разметки вне [0, {n_classes}).")

    log_probs = _log_softmax(logits.data if batched else logits.data[None])
    images, rows, cols = np.indices(labels.shape)
    nll = -log_probs[images, labels, rows, cols]

    n_images = labels.shape[0]
    n_pixels = labels[0].size
    background = labels == constants.BACKGROUND_CLASS
    n_background = background.sum(axis=(1, 2))
    if normalization is LossNormalization.TOTAL:
        totals = np.full(n_images, n_pixels)
        weight_b, weight_l = _term_weights(lambda_b, totals), _term_weights(lambda_l, totals)
    else:
        weight_b = _term_weights(lambda_b, n_background)
        weight_l = _term_weights(lambda_l, n_pixels - n_background)
    weights = np.where(background, weight_b[:, None, None], weight_l[:, None, None]) / n_images

    loss = float((weights * nll).sum())

    def backward_fn(g: FloatArray):
        grad = np.exp(log_probs)
        grad[images, labels, rows, cols] -= 1.0
        grad = grad * weights[:, None] * float(g)
        return (grad if batched else grad[0],)

    return apply_op(np.asarray(loss), (logits,), backward_fn)
