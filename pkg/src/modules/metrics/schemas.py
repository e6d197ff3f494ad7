"""Модуль для схем метрик сегментации."""

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field

from src.core import exceptions
from src.core.base.types import IntArray


@dataclass(frozen=True)
class ConfusionCounts:
    """
    Попиксельные TP/FP/FN по классам (один против остальных).

    Счетчики складываются по изображениям: `a + b`.
    """

    tp: IntArray
    fp: IntArray
    fn: IntArray
    n_images: int = 1

    @classmethod
    def zeros(cls, n_classes: int) -> "ConfusionCounts":
        empty = np.zeros(n_classes, dtype=np.int64)
        return cls(empty, empty.copy(), empty.copy(), n_images=0)

    @property
    def n_classes(self) -> int:
        return len(self.tp)

    @property
    def absent(self) -> np.ndarray:
        """Классы, которых нет ни в предсказании, ни в разметке."""
        return (self.tp + self.fp + self.fn) == 0

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        if other.n_classes != self.n_classes:
            raise exceptions.DimensionError("Счетчики с разным числом классов.")
        return ConfusionCounts(
            self.tp + other.tp,
            self.fp + other.fp,
            self.fn + other.fn,
            self.n_images + other.n_images,
        )


class ClassMetricsSchema(BaseModel):
    precision: float
    recall: float
    f1: float
    iou: float
    absent: bool = Field(description="Класса нет ни в предсказании, ни в разметке.")


class EvaluationReportSchema(BaseModel):
    """Отчет оценки: метрики по корпусу (счетчики суммируются, затем отношения)."""

    aggregation: str = Field(default="corpus")
    per_class: dict[str, ClassMetricsSchema]
    mean_f1: float
    mean_iou: float
    n_images: int
