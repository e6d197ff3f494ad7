"""Обработчики исключений"""

import click
from loguru import logger

from src.core.exceptions import SanetException

USAGE_EXIT_CODE = 1


def sanet_exception_handler(exc: SanetException) -> int:
    logger.warning(f"{type(exc).__name__}: {exc.detail}")
    return exc.exit_code


def usage_exception_handler(exc: click.UsageError) -> int:
    logger.warning(f"Ошибка использования: {exc.format_message()}")
    if exc.ctx is not None:
        click.echo(exc.ctx.get_help(), err=True)
    return USAGE_EXIT_CODE


def exception_handler(exc: Exception) -> int:
    logger.opt(exception=exc).error(f"Исключение: {exc}")
    return USAGE_EXIT_CODE


def handle_exception(exc: Exception) -> int:
    """
    Залогировать исключение и вернуть код завершения CLI.

    Returns:
        int: `1` ошибка использования, `2` ошибка данных,
            `3` численный сбой.
    """

    if isinstance(exc, SanetException):
        return sanet_exception_handler(exc)
    if isinstance(exc, click.UsageError):
        return usage_exception_handler(exc)
    return exception_handler(exc)
