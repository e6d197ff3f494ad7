"""Модуль для типов потока событий DVS."""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from pydantic import BaseModel, Field

from src.core.base.types import IntArray

# t - мкс от начала потока, x - столбец, y - строка, p - полярность ±1.
EVENT_DTYPE = np.dtype([("t", "<u8"), ("x", "<u2"), ("y", "<u2"), ("p", "i1")])


class AccumulationMode(str, Enum):
    """Что считается в пикселе кадра."""

    # Число событий без учета полярности.
    COUNT = "count"
    # Отдельно события +1 (канал 0) и −1 (канал 1).
    TWO_CHANNEL = "two_channel"


@dataclass
class EventStream:
    """Поток событий с разрешением сенсора; записи упорядочены по t."""

    width: int
    height: int
    events: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=EVENT_DTYPE))

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class CountFrame:
    """Число событий в пикселях за окно [index·Δt, (index+1)·Δt)."""

    index: int
    dt_us: int
    # H×W для COUNT, 2×H×W для TWO_CHANNEL.
    counts: IntArray


class AccumulationReportSchema(BaseModel):
    """Отчет команды `accumulate`."""

    n_events: int
    n_frames: int
    dt_us: int
    clip: int
    mode: AccumulationMode
    width: int
    height: int
    frames: list[str] = Field(default_factory=list, description="Файлы кадров.")
