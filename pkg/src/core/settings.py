"""Настройки процесса (переменные окружения)."""

from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Класс переменных окружения CLI."""

    APP_VERSION: str = "0.1.0"

    # Logging
    LOG_LEVEL: Literal["TRACE", "DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    LOG_COLORIZE: bool = True

    model_config = SettingsConfigDict(
        env_prefix="SANET_",
        env_file=".env",
        extra="ignore",
    )


settings = Settings()
