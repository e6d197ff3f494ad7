"""Модуль типов направленной послойной свертки."""

from dataclasses import dataclass, field
from enum import Enum

from src.core import exceptions
from src.modules.autodiff import Parameter


class SliceFamily(str, Enum):
    """Ось нарезки тензора на слои."""

    # H слоев формы C×1×W, ядро вдоль W.
    VERTICAL = "vertical"
    # W слоев формы C×H×1, ядро вдоль H.
    HORIZONTAL = "horizontal"


class Direction(str, Enum):
    """Восемь направлений распространения сообщений (коды CLI `--directions`)."""

    VERTICAL_DOWN = "vd"
    VERTICAL_UP = "vu"
    HORIZONTAL_RIGHT = "hr"
    HORIZONTAL_LEFT = "hl"
    MAIN_DOWN = "mdd"
    MAIN_UP = "mdu"
    COUNTER_DOWN = "cdd"
    COUNTER_UP = "cdu"

    @property
    def family(self) -> SliceFamily:
        return _GEOMETRY[self][0]

    @property
    def reverse(self) -> bool:
        """Обход слоев от последнего к первому."""
        return _GEOMETRY[self][1]

    @property
    def shift(self) -> int:
        """Сдвиг сообщения вдоль оси внутри слоя на каждом шаге (−1, 0, +1)."""
        return _GEOMETRY[self][2]

    @classmethod
    def parse_list(cls, value: str) -> list["Direction"]:
        """Разобрать список кодов через запятую (`vd,vu,...`)."""

        codes = [code.strip() for code in value.split(",") if code.strip()]
        try:
            return [cls(code) for code in codes]
        except ValueError as ex:
            raise exceptions.ConfigurationError(f"Неизвестное направление: {ex}")


# (семейство, обратный обход, сдвиг)
_GEOMETRY: dict[Direction, tuple[SliceFamily, bool, int]] = {
    Direction.VERTICAL_DOWN: (SliceFamily.VERTICAL, False, 0),
    Direction.VERTICAL_UP: (SliceFamily.VERTICAL, True, 0),
    Direction.HORIZONTAL_RIGHT: (SliceFamily.HORIZONTAL, False, 0),
    Direction.HORIZONTAL_LEFT: (SliceFamily.HORIZONTAL, True, 0),
    Direction.MAIN_DOWN: (SliceFamily.VERTICAL, False, 1),
    Direction.MAIN_UP: (SliceFamily.VERTICAL, True, -1),
    Direction.COUNTER_DOWN: (SliceFamily.HORIZONTAL, True, 1),
    Direction.COUNTER_UP: (SliceFamily.HORIZONTAL, False, -1),
}

CANONICAL_ORDER: tuple[Direction, ...] = tuple(Direction)


@dataclass(frozen=True)
class SliceKernel:
    """
    Ядро свертки внутри слоя: веса C×C×k без смещения, общие для всех слоев.
    """

    family: SliceFamily
    weight: Parameter

    def __post_init__(self):
        if self.weight.ndim != 3 or self.weight.shape[0] != self.weight.shape[1]:
            raise exceptions.DimensionError(
                f"Ядро {self.weight.name}: ожидается C×C×k, получено {self.weight.shape}."
            )
        if self.size % 2 == 0:
            raise exceptions.ConfigurationError(
                f"Ядро {self.weight.name}: размер {self.size} должен быть нечетным."
            )

    @property
    def channels(self) -> int:
        return self.weight.shape[0]

    @property
    def size(self) -> int:
        return self.weight.shape[2]


@dataclass
class MscParams:
    """Независимые ядра по направлениям; отсутствующее направление пропускается."""

    kernels: dict[Direction, SliceKernel] = field(default_factory=dict)
    order: tuple[Direction, ...] = CANONICAL_ORDER

    def __post_init__(self):
        for direction, kernel in self.kernels.items():
            if kernel.family is not direction.family:
                raise exceptions.ConfigurationError(
                    f"Направление {direction.value} требует ядро семейства "
                    f"{direction.family.value}."
                )
        if len(self.order) != len(set(self.order)):
            raise exceptions.ConfigurationError("Порядок MSC содержит повторы.")
        if missing := set(self.kernels) - set(self.order):
            raise exceptions.ConfigurationError(
                f"Направления вне порядка MSC: {sorted(d.value for d in missing)}."
            )

    def parameters(self) -> dict[str, Parameter]:
        return {
            kernel.weight.name: kernel.weight
            for direction in self.order
            if (kernel := self.kernels.get(direction)) is not None
        }
