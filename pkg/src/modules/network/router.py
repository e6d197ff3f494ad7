"""Модуль для команды инференса."""

from pathlib import Path

import typer
from loguru import logger

from src.core import exceptions
from src.core.services import ManifestService
from src.modules.lanes import LaneService
from src.modules.network.service import NetworkService

network_router = typer.Typer()


def collect_images(data: Path) -> list[Path]:
    """Кадры для инференса: файл, `data/images/*.png` или `data/*.png`."""

    if data.is_file():
        return [data]
    images_dir = data / "images"
    paths = sorted((images_dir if images_dir.is_dir() else data).glob("*.png"))
    if not paths:
        raise exceptions.DataError(f"Нет изображений в {data}.")
    return paths


@network_router.command("infer")
def infer_command(
    ckpt: Path = typer.Option(..., "--ckpt", help="Чекпоинт .sanc."),
    data: Path = typer.Option(..., "--data", help="Изображение или каталог."),
    out: Path = typer.Option(..., "--out", help="Каталог масок."),
) -> None:
    """Предсказать маски классов и наложения для кадров."""

    paths = collect_images(data)
    ManifestService.write(
        out,
        "infer",
        {"ckpt": ckpt.name},
        inputs=[ckpt, *paths],
        outputs=[f"{path.stem}_{kind}.png" for path in paths for kind in ("mask", "overlay")],
    )

    params = NetworkService.load_checkpoint(ckpt)
    for path in paths:
        image = LaneService.read_image(path)
        mask = NetworkService.predict(params, image)
        LaneService.write_class_mask(out / f"{path.stem}_mask.png", mask)
        LaneService.write_overlay(out / f"{path.stem}_overlay.png", mask, image)
    logger.info(f"Инференс: {len(paths)} кадров -> {out}")
