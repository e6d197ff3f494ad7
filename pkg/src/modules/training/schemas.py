"""Модуль для схем обучения и абляции."""

from enum import Enum
from pathlib import Path

from pydantic import BaseModel, Field, field_validator

from src.core import constants, exceptions
from src.core.base import ConfigBaseSchema
from src.modules.network import ArchitectureVariant, BackboneConfig, SanetArchitecture
from src.modules.slice_conv import CANONICAL_ORDER, Direction


class LossNormalization(str, Enum):
    """Нормировка слагаемых взвешенной кросс-энтропии."""

    # L_b и L_l - средние по своим пикселям.
    PER_TERM = "per_term"
    # Оба слагаемых делятся на общее число пикселей.
    TOTAL = "total"


class TrainConfig(ConfigBaseSchema):
    """Гиперпараметры обучения; JSON-файл конфигурации повторяет эту схему."""

    batch_size: int = Field(default=4, ge=1)
    initial_lr: float = Field(default=0.01, gt=0)
    power: float = Field(default=0.9, gt=0)
    max_iter: int = Field(default=2000, ge=1)
    momentum: float = Field(default=0.9, ge=0, lt=1)
    lambda_b: float = Field(default=0.4, ge=0, description="Вес фона.")
    lambda_l: float = Field(default=1.0, ge=0, description="Вес полос.")
    loss_normalization: LossNormalization = Field(default=LossNormalization.PER_TERM)
    seed: int = Field(default=0, ge=0)

    kernel_size: int = Field(default=9, ge=1, description="Ширина ядра MSC.")
    directions: list[Direction] = Field(default_factory=lambda: list(CANONICAL_ORDER))
    msc_order: list[Direction] = Field(default_factory=lambda: list(CANONICAL_ORDER))
    variant: ArchitectureVariant = Field(default=ArchitectureVariant.MSC)
    stage_channels: tuple[int, int, int] = Field(default=constants.DEFAULT_STAGE_CHANNELS)
    n_classes: int = Field(default=constants.N_CLASSES, ge=2)

    eval_interval: int = Field(default=constants.DEFAULT_EVAL_INTERVAL, ge=1)
    hflip: bool = Field(default=False, description="Случайное зеркальное отражение.")

    train_dir: Path | None = Field(default=None, description="Каталог обучающего набора.")
    eval_dir: Path | None = Field(default=None, description="Каталог набора для оценки.")
    out_dir: Path = Field(default=Path("runs/train"))

    @field_validator("directions", "msc_order", mode="before")
    @classmethod
    def split_codes(cls, value):
        """Коды через запятую (`vd,vu`) из флага CLI."""

        if isinstance(value, str):
            try:
                return Direction.parse_list(value)
            except exceptions.ConfigurationError as ex:
                raise ValueError(ex.detail)
        return value

    @field_validator("kernel_size")
    @classmethod
    def odd_kernel(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError("Размер ядра должен быть нечетным.")
        return value

    def architecture(self) -> SanetArchitecture:
        return SanetArchitecture(
            backbone=BackboneConfig(stage_channels=self.stage_channels),
            n_classes=self.n_classes,
            variant=self.variant,
            kernel_size=self.kernel_size,
            directions=self.directions,
            msc_order=self.msc_order,
        )


class MetricsRecordSchema(BaseModel):
    """Строка журнала обучения `metrics.jsonl`."""

    iter: int
    lr: float
    loss: float
    mean_f1: float | None = None
    mean_iou: float | None = None


# MARK: Ablation
class AblationPreset(str, Enum):
    """Варианты модели для сравнения направлений MSC."""

    BASELINE = "baseline"
    V = "v"
    H = "h"
    VH = "vh"
    MD = "md"
    CD = "cd"
    MCD = "mcd"
    MSC = "msc"
    EXTRA_CONV = "extra_conv"

    @property
    def directions(self) -> list[Direction]:
        return list(_PRESET_DIRECTIONS[self])

    @property
    def variant(self) -> ArchitectureVariant:
        if self is AblationPreset.EXTRA_CONV:
            return ArchitectureVariant.EXTRA_CONV
        return ArchitectureVariant.MSC

    @property
    def uses_slice_conv(self) -> bool:
        return bool(self.directions)


_VERTICAL = (Direction.VERTICAL_DOWN, Direction.VERTICAL_UP)
_HORIZONTAL = (Direction.HORIZONTAL_RIGHT, Direction.HORIZONTAL_LEFT)
_MAIN = (Direction.MAIN_DOWN, Direction.MAIN_UP)
_COUNTER = (Direction.COUNTER_DOWN, Direction.COUNTER_UP)

_PRESET_DIRECTIONS: dict[AblationPreset, tuple[Direction, ...]] = {
    AblationPreset.BASELINE: (),
    AblationPreset.V: _VERTICAL,
    AblationPreset.H: _HORIZONTAL,
    AblationPreset.VH: _VERTICAL + _HORIZONTAL,
    AblationPreset.MD: _MAIN,
    AblationPreset.CD: _COUNTER,
    AblationPreset.MCD: _MAIN + _COUNTER,
    AblationPreset.MSC: CANONICAL_ORDER,
    AblationPreset.EXTRA_CONV: (),
}


class AblationRunSchema(BaseModel):
    seed: int
    mean_f1: float
    mean_iou: float


class AblationEntrySchema(BaseModel):
    """Результат варианта модели, усредненный по зернам."""

    preset: AblationPreset
    kernel_size: int | None = Field(description="Ширина ядра MSC; None без MSC.")
    mean_f1: float
    mean_iou: float
    runs: list[AblationRunSchema]


class AblationReportSchema(BaseModel):
    max_iter: int
    seeds: list[int]
    entries: list[AblationEntrySchema]
