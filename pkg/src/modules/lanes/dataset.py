"""
Модуль для каталога датасета.

Раскладка каталога:
    images/<stem>.png  - 8-битные кадры
    masks/<stem>.png   - индексированные маски классов
    binary/<stem>.png  - бинарные маски (0/255)
    labels/<stem>.jsonl - разметка полос
    index.json          - список сэмплов
"""

import shutil
from dataclasses import dataclass
from pathlib import Path

import orjson
from loguru import logger
from pydantic import ValidationError

import src.modules.lanes.schemas as schemas
from src.core import constants, exceptions
from src.core.base.types import ByteImage, ClassMask
from src.core.services import ManifestService, RngService
from src.modules.lanes.service import LaneService

INDEX_FILENAME = "index.json"
SAMPLE_DIRS = {
    "images": ".png",
    "masks": ".png",
    "binary": ".png",
    "labels": ".jsonl",
}


@dataclass(frozen=True)
class Sample:
    """Кадр и его маска классов."""

    stem: str
    image: ByteImage
    mask: ClassMask


class DatasetService:
    """Сервис для чтения, записи и разбиения датасета."""

    # MARK: Write
    @classmethod
    def write_sample(
        cls,
        root: Path,
        stem: str,
        image: ByteImage,
        lanes: list[schemas.LanePolyline],
        mask: ClassMask,
    ) -> None:
        LaneService.write_image(root / "images" / f"{stem}.png", image)
        LaneService.write_class_mask(root / "masks" / f"{stem}.png", mask)
        LaneService.write_binary_mask(root / "binary" / f"{stem}.png", mask > 0)
        LaneService.write_annotations(root / "labels" / f"{stem}.jsonl", lanes)

    @classmethod
    def write_index(cls, root: Path, entries: list[schemas.SampleEntrySchema]) -> None:
        ManifestService.dump_json(
            root / INDEX_FILENAME,
            {"samples": [entry.model_dump(mode="json") for entry in entries]},
        )

    # MARK: Read
    @classmethod
    def read_index(cls, root: Path) -> list[schemas.SampleEntrySchema]:
        """
        Прочитать `index.json`; без него список строится по `images/`.

        Raises:
            DataError: Каталог не существует.
            FormatError: Поврежденный `index.json`.
        """

        if not root.is_dir():
            raise exceptions.DataError(f"Каталог датасета не найден: {root}")
        index_path = root / INDEX_FILENAME
        if not index_path.is_file():
            return [
                schemas.SampleEntrySchema(
                    stem=path.stem,
                    lanes=cls._count_lanes(root, path.stem),
                )
                for path in sorted((root / "images").glob("*.png"))
            ]
        try:
            payload = orjson.loads(index_path.read_bytes())
            return [
                schemas.SampleEntrySchema.model_validate(entry)
                for entry in payload["samples"]
            ]
        except (orjson.JSONDecodeError, KeyError, TypeError, ValidationError) as ex:
            raise exceptions.FormatError(f"Поврежденный {index_path}: {ex}")

    @classmethod
    def _count_lanes(cls, root: Path, stem: str) -> int:
        labels = root / "labels" / f"{stem}.jsonl"
        if not labels.is_file():
            return 0
        return len(LaneService.read_annotations(labels))

    @classmethod
    def load(cls, root: Path) -> list[Sample]:
        """
        Загрузить все сэмплы каталога в память.

        Raises:
            DataError: Нет маски для кадра.
            DimensionError: Размеры кадра и маски различаются.
        """

        samples = []
        for entry in cls.read_index(root):
            image = LaneService.read_image(root / "images" / f"{entry.stem}.png")
            mask = LaneService.read_class_mask(root / "masks" / f"{entry.stem}.png")
            if image.shape != mask.shape:
                raise exceptions.DimensionError(
                    f"{entry.stem}: кадр {image.shape}, маска {mask.shape}."
                )
            samples.append(Sample(entry.stem, image, mask))
        logger.info(f"Загружено сэмплов: {len(samples)} из {root}")
        return samples

    # MARK: Split
    @classmethod
    def split(
        cls,
        root: Path,
        out_dir: Path,
        seed: int,
    ) -> dict[str, schemas.SplitStatsSchema]:
        """
        Случайно разбить датасет на train/val/test в долях 1/2, 1/6, 1/3.

        Args:
            root (Path): Исходный каталог.
            out_dir (Path): Каталог с подкаталогами частей.
            seed (int): Зерно перемешивания.

        Returns:
            dict[str, SplitStatsSchema]: Размер и распределение числа
                полос для каждой части.
        """

        entries = RngService(seed).shuffle(cls.read_index(root))
        total = len(entries)
        n_train = round(total * constants.SPLIT_FRACTIONS[0][1])
        n_val = round(total * constants.SPLIT_FRACTIONS[1][1])
        bounds = {
            "train": (0, n_train),
            "val": (n_train, n_train + n_val),
            "test": (n_train + n_val, total),
        }

        stats: dict[str, schemas.SplitStatsSchema] = {}
        for name, (start, end) in bounds.items():
            part = sorted(entries[start:end], key=lambda entry: entry.stem)
            target = out_dir / name
            for entry in part:
                for folder, suffix in SAMPLE_DIRS.items():
                    source = root / folder / f"{entry.stem}{suffix}"
                    if source.is_file():
                        (target / folder).mkdir(parents=True, exist_ok=True)
                        shutil.copyfile(source, target / folder / source.name)
            target.mkdir(parents=True, exist_ok=True)
            cls.write_index(target, part)

            summary = schemas.SplitStatsSchema(count=len(part))
            for entry in part:
                key = str(entry.lanes)
                if key in summary.lane_counts:
                    summary.lane_counts[key] += 1
            stats[name] = summary
            logger.info(f"Часть {name}: {len(part)} сэмплов")

        return stats
