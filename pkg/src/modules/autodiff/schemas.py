"""Модуль для Pydantic схем контейнера чекпоинтов."""

from typing import Any

from pydantic import BaseModel, Field

from src.core import constants


class ParameterEntrySchema(BaseModel):
    """Запись о параметре в манифесте чекпоинта."""

    name: str = Field(description="Имя параметра.")
    shape: list[int] = Field(description="Размерности параметра.")
    offset: int = Field(description="Смещение в байтах от начала блока данных.")
    count: int = Field(description="Число элементов float64.")


class CheckpointManifestSchema(BaseModel):
    """Манифест чекпоинта: архитектура и раскладка параметров."""

    format: str = Field(default=constants.CHECKPOINT_MAGIC.decode())
    version: int = Field(default=constants.CHECKPOINT_VERSION)
    architecture: dict[str, Any] = Field(
        default_factory=dict,
        description="Описание архитектуры для проверки размерностей при загрузке.",
    )
    parameters: list[ParameterEntrySchema] = Field(
        description="Параметры в порядке следования в блоке данных.",
    )
