"""Модуль для сервиса метрик: F1 и IoU по классам."""

from typing import Iterable, Sequence

import numpy as np
from loguru import logger

import src.modules.metrics.schemas as schemas
from src.core import constants, exceptions
from src.core.base.types import ClassMask, FloatArray
from src.modules.lanes import Sample
from src.modules.network import NetworkService, SanetParams


def _ratio(numerator: np.ndarray, denominator: np.ndarray, empty: float) -> FloatArray:
    """Поэлементное отношение с заданным значением для 0/0."""

    safe = np.where(denominator > 0, denominator, 1)
    return np.where(denominator > 0, numerator / safe, empty).astype(np.float64)


class MetricsService:
    """Сервис для подсчета метрик сегментации."""

    # MARK: Counts
    @classmethod
    def confusion_counts(
        cls,
        pred: ClassMask,
        gt: ClassMask,
        n_classes: int = constants.N_CLASSES,
    ) -> schemas.ConfusionCounts:
        """
        Счетчики TP/FP/FN для одного изображения.

        Raises:
            DataError: Формы различаются или значения ≥ n_classes.
        """

        if pred.shape != gt.shape:
            raise exceptions.DataError(f"Предсказание {pred.shape}, разметка {gt.shape}.")
        pred = pred.astype(np.int64).ravel()
        gt = gt.astype(np.int64).ravel()
        if pred.size and (max(pred.max(), gt.max()) >= n_classes or min(pred.min(), gt.min()) < 0):
            raise exceptions.DataError(f"Значения классов вне [0, {n_classes}).")

        matrix = np.bincount(n_classes * gt + pred, minlength=n_classes**2).reshape(
            n_classes, n_classes
        )
        tp = np.diag(matrix).copy()
        return schemas.ConfusionCounts(
            tp=tp,
            fp=matrix.sum(axis=0) - tp,
            fn=matrix.sum(axis=1) - tp,
        )

    @classmethod
    def accumulate(
        cls,
        pairs: Iterable[tuple[ClassMask, ClassMask]],
        n_classes: int = constants.N_CLASSES,
    ) -> schemas.ConfusionCounts:
        total = schemas.ConfusionCounts.zeros(n_classes)
        for pred, gt in pairs:
            total = total + cls.confusion_counts(pred, gt, n_classes)
        return total

    # MARK: Ratios
    @classmethod
    def precision_per_class(cls, counts: schemas.ConfusionCounts) -> FloatArray:
        return _ratio(counts.tp, counts.tp + counts.fp, 0.0)

    @classmethod
    def recall_per_class(cls, counts: schemas.ConfusionCounts) -> FloatArray:
        return _ratio(counts.tp, counts.tp + counts.fn, 0.0)

    @classmethod
    def f1_per_class(cls, counts: schemas.ConfusionCounts) -> FloatArray:
        """F1 = 2PR/(P+R) = 2TP/(2TP+FP+FN); 0/0 дает 0."""

        return _ratio(2 * counts.tp, 2 * counts.tp + counts.fp + counts.fn, 0.0)

    @classmethod
    def iou_per_class(cls, counts: schemas.ConfusionCounts) -> FloatArray:
        """IoU = TP/(TP+FP+FN); 0/0 дает 1, класс помечается отсутствующим."""

        return _ratio(counts.tp, counts.tp + counts.fp + counts.fn, 1.0)

    @classmethod
    def mean_metrics(cls, counts: schemas.ConfusionCounts) -> tuple[float, float]:
        """
        Среднее F1 и IoU по присутствующим классам (фон включен).

        Raises:
            UndefinedMetricsError: Все классы отсутствуют.
        """

        present = ~counts.absent
        if not present.any():
            raise exceptions.UndefinedMetricsError()
        f1 = cls.f1_per_class(counts)[present]
        iou = cls.iou_per_class(counts)[present]
        return float(f1.mean()), float(iou.mean())

    @classmethod
    def report(cls, counts: schemas.ConfusionCounts) -> schemas.EvaluationReportSchema:
        mean_f1, mean_iou = cls.mean_metrics(counts)
        precision = cls.precision_per_class(counts)
        recall = cls.recall_per_class(counts)
        f1 = cls.f1_per_class(counts)
        iou = cls.iou_per_class(counts)
        return schemas.EvaluationReportSchema(
            per_class={
                str(c): schemas.ClassMetricsSchema(
                    precision=precision[c],
                    recall=recall[c],
                    f1=f1[c],
                    iou=iou[c],
                    absent=bool(counts.absent[c]),
                )
                for c in range(counts.n_classes)
            },
            mean_f1=mean_f1,
            mean_iou=mean_iou,
            n_images=counts.n_images,
        )

    # MARK: Evaluate
    @classmethod
    def evaluate(
        cls,
        params: SanetParams,
        samples: Sequence[Sample],
    ) -> schemas.EvaluationReportSchema:
        """
        Прогнать сеть по сэмплам и посчитать метрики по корпусу.

        Raises:
            DataError: Пустой набор.
        """

        if not samples:
            raise exceptions.DataError("Пустой набор для оценки.")
        n_classes = params.architecture.n_classes
        predictions = (
            (NetworkService.predict(params, sample.image), sample.mask) for sample in samples
        )
        report = cls.report(cls.accumulate(predictions, n_classes))
        logger.info(
            f"Оценка на {report.n_images} изображениях: "
            f"mean F1={report.mean_f1:.4f}, mean IoU={report.mean_iou:.4f}"
        )
        return report
