"""Модуль для команды оценки чекпоинта."""

from pathlib import Path
from typing import Optional

import orjson
import typer

from src.core.services import ManifestService
from src.modules.lanes import DatasetService
from src.modules.metrics.service import MetricsService
from src.modules.network import NetworkService

metrics_router = typer.Typer()


@metrics_router.command("eval")
def eval_command(
    ckpt: Path = typer.Option(..., "--ckpt", help="Чекпоинт .sanc."),
    data: Path = typer.Option(..., "--data", help="Каталог датасета."),
    report: Optional[Path] = typer.Option(
        None,
        "--report",
        help="Файл отчета JSON; без него отчет печатается в stdout.",
    ),
) -> None:
    """Посчитать F1 и IoU по классам на датасете."""

    if report is not None:
        ManifestService.write(
            report.parent,
            "eval",
            {"ckpt": ckpt.name, "data": data.name},
            inputs=[ckpt, data],
            outputs=[report.name],
            filename=f"{report.stem}.manifest.json",
        )

    params = NetworkService.load_checkpoint(ckpt)
    result = MetricsService.evaluate(params, DatasetService.load(data))
    payload = result.model_dump(mode="json")

    if report is not None:
        ManifestService.dump_json(report, payload)
    else:
        options = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS
        typer.echo(orjson.dumps(payload, option=options).decode())
