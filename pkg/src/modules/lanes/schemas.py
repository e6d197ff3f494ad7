"""Модуль для схем разметки полос и синтетических сцен."""

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.core import constants
from src.core.base import ConfigBaseSchema


class LanePolyline(BaseModel):
    """
    Полоса как ломаная по ключевым точкам (x, y) сверху вниз.

    Строка файла разметки: `{"class": c, "points": [[x, y], ...]}`.
    """

    model_config = ConfigDict(populate_by_name=True, frozen=True)

    lane_class: int | None = Field(
        default=None,
        alias="class",
        ge=1,
        le=4,
        description="Класс полосы 1–4 после назначения.",
    )
    points: tuple[tuple[float, float], ...] = Field(description="Ключевые точки (x, y).")

    @field_validator("points")
    @classmethod
    def canonical_points(
        cls,
        value: tuple[tuple[float, float], ...],
    ) -> tuple[tuple[float, float], ...]:
        """Сортировка по y; из точек с одинаковым y остается первая."""

        ordered = sorted(enumerate(value), key=lambda item: (item[1][1], item[0]))
        points: list[tuple[float, float]] = []
        for _, (x, y) in ordered:
            if points and points[-1][1] == y:
                continue
            points.append((float(x), float(y)))
        if len(points) < 2:
            raise ValueError("Полоса должна иметь не менее двух точек с разными y.")
        return tuple(points)


class SceneConfig(ConfigBaseSchema):
    """Параметры синтетической сцены в стиле DVS."""

    size: int = Field(default=128, ge=32, description="Сторона квадратного изображения.")
    lanes: int = Field(default=4, ge=1, le=4, description="Число полос.")
    vp_jitter: float = Field(
        default=0.05,
        ge=0.0,
        le=0.2,
        description="Разброс точки схода в долях размера.",
    )
    occluders: int = Field(default=0, ge=0, description="Число прямоугольных окклюдеров.")
    occluder_size: float = Field(
        default=0.15,
        gt=0.0,
        le=0.5,
        description="Максимальная сторона окклюдера в долях размера.",
    )
    noise: float = Field(default=0.0, ge=0.0, le=1.0, description="Плотность шума.")
    stroke_px: int = Field(default=1, ge=1, description="Толщина штриха.")
    stroke_density: float = Field(
        default=0.6,
        gt=0.0,
        le=1.0,
        description="Доля зажженных пикселей вдоль полосы.",
    )
    width_px: int | None = Field(
        default=None,
        ge=3,
        description="Ширина разметки; по умолчанию max(3, round(size / 32)).",
    )
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def stroke_within_label(self) -> "SceneConfig":
        if self.stroke_px > self.label_width:
            raise ValueError("Штрих не может быть шире разметки.")
        return self

    @property
    def label_width(self) -> int:
        if self.width_px is not None:
            return self.width_px
        return max(3, round(self.size / 32))


class SampleEntrySchema(BaseModel):
    """Запись `index.json` о сэмпле датасета."""

    stem: str = Field(description="Имя файлов сэмпла без расширения.")
    lanes: int = Field(description="Число полос в разметке.")
    seed: int | None = Field(default=None, description="Зерно сцены для синтетики.")


class SplitStatsSchema(BaseModel):
    """Размер части датасета и распределение по числу полос."""

    count: int
    lane_counts: dict[str, int] = Field(
        default_factory=lambda: {str(n): 0 for n in constants.LANE_CLASSES},
        description="Число изображений с 1–4 полосами.",
    )
