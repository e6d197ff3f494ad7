"""Модуль для команды накопления событий."""

from pathlib import Path

import typer

from src.core import constants, exceptions
from src.core.services import ManifestService
from src.modules.dvs.codec import EventCodec
from src.modules.dvs.schemas import AccumulationMode, AccumulationReportSchema
from src.modules.dvs.service import DvsService

dvs_router = typer.Typer()

FRAME_SUFFIXES = {"png": ".png", "pgm": ".pgm"}


@dvs_router.command("accumulate")
def accumulate_command(
    events: Path = typer.Option(..., "--events", help="Файл событий (DVE1 или CSV)."),
    out: Path = typer.Option(..., "--out", help="Каталог кадров."),
    dt_us: int = typer.Option(constants.DEFAULT_DT_US, "--dt-us", help="Длина окна, мкс."),
    clip: int = typer.Option(constants.DEFAULT_CLIP, "--clip", help="Насыщение счетчика."),
    mode: AccumulationMode = typer.Option(
        AccumulationMode.COUNT,
        "--mode",
        help="count или two_channel (по полярности).",
    ),
    image_format: str = typer.Option("png", "--format", help="png или pgm."),
) -> None:
    """Накопить поток событий в кадры и записать их как изображения."""

    if image_format not in FRAME_SUFFIXES:
        raise exceptions.ConfigurationError(f"Неизвестный формат кадров: {image_format}.")
    ManifestService.write(
        out,
        "accumulate",
        {"dt_us": dt_us, "clip": clip, "mode": mode.value, "format": image_format},
        inputs=[events],
        outputs=["frame_*", "report.json"],
    )

    stream = EventCodec.parse_events(events)
    frames = DvsService.accumulate(stream, dt_us, mode)
    names = DvsService.export_frames(frames, out, clip, FRAME_SUFFIXES[image_format])

    report = AccumulationReportSchema(
        n_events=len(stream),
        n_frames=len(frames),
        dt_us=dt_us,
        clip=clip,
        mode=mode,
        width=stream.width,
        height=stream.height,
        frames=names,
    )
    ManifestService.dump_json(out / "report.json", report.model_dump(mode="json"))
