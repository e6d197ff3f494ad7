"""Модуль для базовых схем."""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from src.core import constants


class ConfigBaseSchema(BaseModel):
    """Базовая схема конфигурации: лишние ключи запрещены."""

    model_config = ConfigDict(extra="forbid")


class RunManifestSchema(BaseModel):
    """Схема манифеста запуска, записывается до начала тяжелой работы."""

    command: str = Field(description="Имя подкоманды CLI.")
    config: dict[str, Any] = Field(description="Снимок конфигурации запуска.")
    seed: int | None = Field(default=None, description="Зерно PRNG.")
    prng: str = Field(
        default=constants.PRNG_NAME,
        description="Имя и версия генератора псевдослучайных чисел.",
    )
    code_version: str = Field(description="Версия кода.")
    inputs: dict[str, str] = Field(
        default_factory=dict,
        description="SHA-256 входных файлов по относительному пути.",
    )
    outputs: list[str] = Field(
        default_factory=list,
        description="Пути выходных артефактов.",
    )
