"""Модуль `conftest` с фикстурами для пакета `tests.integration`."""

from pathlib import Path
from typing import Callable

import orjson
import pytest
import typer
from click.testing import Result
from typer.testing import CliRunner

from tests.conftest import SMALL_STAGES


class BaseTestRouter:
    """Класс для тестирования команд роутера независимо от остального CLI."""

    router: typer.Typer

    @pytest.fixture(scope="function")
    def invoke(self) -> Callable[..., Result]:
        """
        Вызов команды роутера через `typer.testing.CliRunner`.

        Команды роутера собираются в отдельное приложение; исключения
        остаются в `result.exception`.
        """

        app = typer.Typer()

        @app.callback()
        def root() -> None:
            """Группа команд роутера."""

        app.registered_commands.extend(self.router.registered_commands)
        runner = CliRunner()

        def _invoke(*args) -> Result:
            return runner.invoke(app, [str(arg) for arg in args])

        return _invoke


@pytest.fixture
def train_config_file(tmp_path: Path) -> Path:
    """JSON-конфигурация короткого обучения маленькой сети."""

    path = tmp_path / "train.json"
    path.write_bytes(
        orjson.dumps(
            {
                "batch_size": 2,
                "max_iter": 2,
                "kernel_size": 3,
                "stage_channels": list(SMALL_STAGES),
                "eval_interval": 1,
            }
        )
    )
    return path
