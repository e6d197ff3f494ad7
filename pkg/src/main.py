"""Основной модуль для сборки CLI."""

import sys
from typing import Sequence

import typer

from src.core import handlers
from src.core.logger import setup_logging
from src.modules.dvs import dvs_router
from src.modules.lanes import lanes_router
from src.modules.metrics import metrics_router
from src.modules.network import network_router
from src.modules.training import training_router

PROG_NAME = "sanet"


def setup_routers(app: typer.Typer) -> None:
    """Настройка подкоманд."""

    available_routers = [
        dvs_router,
        lanes_router,
        training_router,
        metrics_router,
        network_router,
    ]

    for router in available_routers:
        app.registered_commands.extend(router.registered_commands)


app = typer.Typer(
    name=PROG_NAME,
    help="SANet: извлечение разметки полос из кадров DVS.",
    no_args_is_help=True,
    add_completion=False,
)

setup_routers(app)


def run(argv: Sequence[str] | None = None) -> int:
    """
    Выполнить команду CLI и вернуть код завершения.

    Returns:
        int: `0` успех, `1` ошибка использования или конфигурации,
            `2` ошибка данных, `3` численный сбой.
    """

    setup_logging()
    command = typer.main.get_command(app)
    try:
        command.main(
            args=list(sys.argv[1:] if argv is None else argv),
            prog_name=PROG_NAME,
            standalone_mode=False,
        )
    except Exception as exc:
        return handlers.handle_exception(exc)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
