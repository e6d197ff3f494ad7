"""Модуль для схем архитектуры и параметров SANet."""

from dataclasses import dataclass, field
from enum import Enum

from pydantic import Field, field_validator, model_validator

from src.core import constants, exceptions
from src.core.base import ConfigBaseSchema
from src.modules.autodiff import Parameter
from src.modules.slice_conv import CANONICAL_ORDER, Direction, MscParams


class ArchitectureVariant(str, Enum):
    """Блок между backbone и классификатором."""

    MSC = "msc"
    # 8 обычных сверток 3×3 вместо MSC: контроль по числу параметров.
    EXTRA_CONV = "extra_conv"


class BackboneConfig(ConfigBaseSchema):
    """Упрощенный backbone: шесть сверток 3×3 с ReLU, выходной шаг 4."""

    in_channels: int = Field(default=1, ge=1, description="Каналы входного изображения.")
    stage_channels: tuple[int, int, int] = Field(
        default=constants.DEFAULT_STAGE_CHANNELS,
        description="Каналы стадий; после 1-й и 2-й стадии stride 2.",
    )

    @field_validator("stage_channels")
    @classmethod
    def positive_channels(cls, value: tuple[int, int, int]) -> tuple[int, int, int]:
        if min(value) < 1:
            raise ValueError("Число каналов должно быть положительным.")
        return value

    @property
    def out_channels(self) -> int:
        return self.stage_channels[-1]


class SanetArchitecture(ConfigBaseSchema):
    """Описание архитектуры; записывается в манифест чекпоинта."""

    backbone: BackboneConfig = Field(default_factory=BackboneConfig)
    n_classes: int = Field(default=constants.N_CLASSES, ge=2)
    variant: ArchitectureVariant = Field(default=ArchitectureVariant.MSC)
    kernel_size: int = Field(default=9, ge=1, description="Ширина ядра послойной свертки.")
    directions: list[Direction] = Field(
        default_factory=lambda: list(CANONICAL_ORDER),
        description="Включенные направления MSC; пустой список дает baseline.",
    )
    msc_order: list[Direction] = Field(
        default_factory=lambda: list(CANONICAL_ORDER),
        description="Порядок применения направлений внутри MSC.",
    )

    @field_validator("kernel_size")
    @classmethod
    def odd_kernel(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError("Размер ядра должен быть нечетным.")
        return value

    @model_validator(mode="after")
    def check_order(self) -> "SanetArchitecture":
        if sorted(self.msc_order) != sorted(CANONICAL_ORDER):
            raise ValueError("Порядок MSC должен быть перестановкой всех восьми направлений.")
        if len(set(self.directions)) != len(self.directions):
            raise ValueError("Направления повторяются.")
        return self


@dataclass
class SanetParams:
    """Параметры сети: backbone, MSC (или extra conv) и классификатор 1×1."""

    architecture: SanetArchitecture
    backbone: dict[str, Parameter]
    head_weight: Parameter
    head_bias: Parameter
    msc: MscParams = field(default_factory=MscParams)
    extra: dict[str, Parameter] = field(default_factory=dict)

    def __post_init__(self):
        if self.head_weight.shape[1] != self.architecture.backbone.out_channels:
            raise exceptions.DimensionError(
                "Каналы классификатора не совпадают с выходом backbone."
            )

    def parameters(self) -> dict[str, Parameter]:
        """Все параметры по имени в порядке сериализации."""

        return {
            **self.backbone,
            self.head_weight.name: self.head_weight,
            self.head_bias.name: self.head_bias,
            **self.msc.parameters(),
            **self.extra,
        }
