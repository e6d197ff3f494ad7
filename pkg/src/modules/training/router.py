"""Модуль для команд обучения и абляции."""

from pathlib import Path
from typing import Optional

import typer
from loguru import logger

from src.core import exceptions
from src.core.services import ManifestService
from src.modules.lanes import DatasetService
from src.modules.network import NetworkService
from src.modules.training.schemas import AblationPreset
from src.modules.training.service import TrainService

training_router = typer.Typer()

METRICS_FILENAME = "metrics.jsonl"
FINAL_CHECKPOINT = "final.sanc"
BEST_CHECKPOINT = "best.sanc"
ABLATION_FILENAME = "ablation.json"


@training_router.command("train")
def train_command(
    config: Optional[Path] = typer.Option(None, "--config", help="JSON-конфигурация."),
    data: Optional[Path] = typer.Option(None, "--data", help="Каталог датасета."),
    out: Optional[Path] = typer.Option(None, "--out", help="Каталог запуска."),
    seed: Optional[int] = typer.Option(None, "--seed", min=0, help="Зерно."),
    directions: Optional[str] = typer.Option(
        None,
        "--directions",
        help="Направления MSC через запятую, например `vd,vu,hr,hl`.",
    ),
    kernel_size: Optional[int] = typer.Option(None, "--kernel-size", help="Ширина ядра MSC."),
    max_iter: Optional[int] = typer.Option(None, "--max-iter", help="Число итераций."),
) -> None:
    """Обучить SANet и сохранить финальный и лучший чекпоинты."""

    train_config = TrainService.load_config(
        config,
        train_dir=data,
        out_dir=out,
        seed=seed,
        directions=directions,
        kernel_size=kernel_size,
        max_iter=max_iter,
    )
    if data is not None:
        train_dir, eval_dir = TrainService.resolve_data(data)
        train_config = train_config.model_copy(update={"train_dir": train_dir, "eval_dir": eval_dir})
    if train_config.train_dir is None:
        raise exceptions.ConfigurationError("Не задан обучающий набор (--data или train_dir).")

    out_dir = train_config.out_dir
    inputs = [train_config.train_dir]
    if train_config.eval_dir is not None:
        inputs.append(train_config.eval_dir)
    ManifestService.write(
        out_dir,
        "train",
        train_config.model_dump(mode="json"),
        seed=train_config.seed,
        inputs=inputs,
        outputs=[METRICS_FILENAME, FINAL_CHECKPOINT, BEST_CHECKPOINT],
    )

    train_set = DatasetService.load(train_config.train_dir)
    eval_set = DatasetService.load(train_config.eval_dir) if train_config.eval_dir else None
    result = TrainService.train(train_config, train_set, eval_set, log_path=out_dir / METRICS_FILENAME)

    NetworkService.save_checkpoint(out_dir / FINAL_CHECKPOINT, result.params)
    NetworkService.save_checkpoint(out_dir / BEST_CHECKPOINT, result.best_params)
    logger.info(f"Чекпоинты сохранены в {out_dir}")


@training_router.command("ablate")
def ablate_command(
    data: Path = typer.Option(..., "--data", help="Каталог с train/ (и val/) и test/."),
    out: Path = typer.Option(..., "--out", help="Каталог отчета."),
    max_iter: Optional[int] = typer.Option(None, "--max-iter", help="Итераций на модель."),
    seed: Optional[int] = typer.Option(None, "--seed", min=0, help="Первое зерно."),
    kernel_size: Optional[list[int]] = typer.Option(
        None,
        "--kernel-size",
        help="Ширина ядра MSC; флаг можно повторять.",
    ),
    config: Optional[Path] = typer.Option(None, "--config", help="JSON-конфигурация."),
    presets: Optional[str] = typer.Option(
        None,
        "--presets",
        help="Варианты через запятую; по умолчанию все.",
    ),
) -> None:
    """Сравнить варианты направлений MSC на нескольких зернах."""

    train_config = TrainService.load_config(config, max_iter=max_iter, seed=seed, out_dir=out)
    try:
        chosen = (
            [AblationPreset(code.strip()) for code in presets.split(",") if code.strip()]
            if presets
            else list(AblationPreset)
        )
    except ValueError as ex:
        raise typer.BadParameter(str(ex), param_hint="--presets")

    train_parts = [data / name for name in ("train", "val") if (data / name).is_dir()]
    test_dir = data / "test"
    if not train_parts or not test_dir.is_dir():
        raise exceptions.DataError(f"{data}: ожидаются подкаталоги train/ и test/.")

    ManifestService.write(
        out,
        "ablate",
        {
            **train_config.model_dump(mode="json"),
            "presets": [preset.value for preset in chosen],
            "kernel_sizes": kernel_size or [train_config.kernel_size],
        },
        seed=train_config.seed,
        inputs=[*train_parts, test_dir],
        outputs=[ABLATION_FILENAME],
    )

    train_set = [sample for part in train_parts for sample in DatasetService.load(part)]
    test_set = DatasetService.load(test_dir)
    report = TrainService.ablate(train_config, train_set, test_set, chosen, kernel_size or ())

    ManifestService.dump_json(out / ABLATION_FILENAME, report.model_dump(mode="json"))
    for entry in report.entries:
        logger.info(
            f"{entry.preset.value} (k={entry.kernel_size}): "
            f"mean IoU={entry.mean_iou:.4f}, mean F1={entry.mean_f1:.4f}"
        )
