"""Модуль для команд разметки полос и синтетических датасетов."""

from pathlib import Path
from typing import Optional

import typer
from loguru import logger
from pydantic import ValidationError

import src.modules.lanes.schemas as schemas
from src.core import constants, exceptions
from src.core.services import ManifestService, RngService
from src.modules.lanes.dataset import DatasetService
from src.modules.lanes.generator import SceneGenerator
from src.modules.lanes.service import LaneService

lanes_router = typer.Typer()


def parse_size(value: str) -> tuple[int, int]:
    """`WxH` или `N` (квадрат) -> (W, H)."""

    try:
        parts = [int(part) for part in value.lower().split("x")]
    except ValueError:
        raise typer.BadParameter(f"Ожидается WxH или N, получено {value!r}.")
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) != 2 or min(parts) < 1:
        raise typer.BadParameter(f"Ожидается WxH или N, получено {value!r}.")
    return parts[0], parts[1]


# MARK: Rasterize
@lanes_router.command("rasterize")
def rasterize_command(
    labels: Path = typer.Option(..., "--labels", help="Файл разметки .jsonl."),
    size: str = typer.Option(..., "--size", help="Размер изображения WxH или N."),
    out: Path = typer.Option(..., "--out", help="Каталог результатов."),
    width_px: int = typer.Option(
        constants.DEFAULT_LANE_WIDTH_PX,
        "--width-px",
        help="Ширина полосы в пикселях.",
    ),
) -> None:
    """Растеризовать разметку полос в маску классов, бинарную маску и наложение."""

    width, height = parse_size(size)
    stem = labels.stem
    outputs = [f"{stem}_mask.png", f"{stem}_binary.png", f"{stem}_overlay.png"]
    ManifestService.write(
        out,
        "rasterize",
        {"size": [width, height], "width_px": width_px},
        inputs=[labels],
        outputs=outputs,
    )

    lanes = LaneService.read_annotations(labels)
    if any(lane.lane_class is None for lane in lanes):
        lanes = LaneService.assign_classes(lanes, ego_x=(width - 1) / 2, bottom_y=height - 1)
    mask, binary = LaneService.rasterize(lanes, width_px, (width, height))

    LaneService.write_class_mask(out / outputs[0], mask)
    LaneService.write_binary_mask(out / outputs[1], binary)
    LaneService.write_overlay(out / outputs[2], mask)
    logger.info(f"Растеризовано полос: {len(lanes)} -> {out}")


# MARK: Generate
@lanes_router.command("gen")
def gen_command(
    count: int = typer.Option(..., "--count", min=1, help="Число сцен."),
    size: int = typer.Option(128, "--size", help="Сторона изображения."),
    lanes: int = typer.Option(
        4,
        "--lanes",
        min=0,
        max=4,
        help="Число полос 1–4; 0 - случайно для каждой сцены.",
    ),
    out: Path = typer.Option(..., "--out", help="Каталог датасета."),
    occluders: int = typer.Option(0, "--occluders", min=0, help="Окклюдеров на сцену."),
    noise: float = typer.Option(0.0, "--noise", help="Плотность шума."),
    width_px: Optional[int] = typer.Option(None, "--width-px", help="Ширина разметки."),
    seed: int = typer.Option(0, "--seed", min=0, help="Зерно генератора."),
) -> None:
    """Сгенерировать синтетический датасет сцен в стиле DVS."""

    config = {
        "count": count,
        "size": size,
        "lanes": lanes,
        "occluders": occluders,
        "noise": noise,
        "width_px": width_px,
    }
    ManifestService.write(
        out,
        "gen",
        config,
        seed=seed,
        outputs=["images/", "masks/", "binary/", "labels/", "index.json"],
    )

    rng = RngService(seed)
    entries = []
    for index in range(count):
        scene_rng = rng.spawn(index)
        try:
            scene = schemas.SceneConfig(
                size=size,
                lanes=lanes or scene_rng.randint(1, 4),
                occluders=occluders,
                noise=noise,
                width_px=width_px,
                seed=scene_rng.seed,
            )
        except ValidationError as ex:
            raise exceptions.ConfigurationError(f"Параметры сцены: {ex}")

        image, polylines, mask = SceneGenerator.gen_scene(scene)
        stem = f"scene_{index:05d}"
        DatasetService.write_sample(out, stem, image, polylines, mask)
        entries.append(
            schemas.SampleEntrySchema(stem=stem, lanes=len(polylines), seed=scene.seed)
        )

    DatasetService.write_index(out, entries)
    logger.info(f"Сгенерировано сцен: {count} -> {out}")


# MARK: Split
@lanes_router.command("split")
def split_command(
    data: Path = typer.Option(..., "--data", help="Каталог датасета."),
    out: Path = typer.Option(..., "--out", help="Каталог частей."),
    seed: int = typer.Option(0, "--seed", min=0, help="Зерно перемешивания."),
) -> None:
    """Разбить датасет на train/val/test (1/2, 1/6, 1/3)."""

    ManifestService.write(
        out,
        "split",
        {"fractions": dict(constants.SPLIT_FRACTIONS)},
        seed=seed,
        inputs=[data],
        outputs=["train/", "val/", "test/", "split.json"],
    )
    stats = DatasetService.split(data, out, seed)
    ManifestService.dump_json(
        out / "split.json",
        {name: summary.model_dump(mode="json") for name, summary in stats.items()},
    )
