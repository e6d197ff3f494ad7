"""Модуль для записи манифестов запусков."""

from pathlib import Path
from typing import Any

import orjson
from loguru import logger

from src.core.base.schemas import RunManifestSchema
from src.core.services.hash_service import HashService
from src.core.settings import settings

MANIFEST_FILENAME = "manifest.json"
JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS


class ManifestService:
    """Сервис для манифестов запусков и JSON-отчетов."""

    @staticmethod
    def dump_json(path: Path, payload: Any) -> None:
        """Записать JSON-документ с отсортированными ключами."""

        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(orjson.dumps(payload, option=JSON_OPTIONS) + b"\n")

    @classmethod
    def write(
        cls,
        out_dir: Path,
        command: str,
        config: dict[str, Any],
        seed: int | None = None,
        inputs: list[Path] | None = None,
        outputs: list[str] | None = None,
        filename: str = MANIFEST_FILENAME,
    ) -> RunManifestSchema:
        """
        Записать манифест запуска до начала тяжелой работы.

        Args:
            out_dir (Path): Каталог выходных артефактов.
            command (str): Имя подкоманды.
            config (dict[str, Any]): Снимок конфигурации.
            seed (int | None): Зерно PRNG.
            inputs (list[Path] | None): Входные файлы и каталоги.
            outputs (list[str] | None): Ожидаемые выходные артефакты.
            filename (str): Имя файла манифеста.

        Returns:
            RunManifestSchema: Записанный манифест.
        """

        digests: dict[str, str] = {}
        for path in inputs or []:
            for name, digest in HashService.tree_digests(path).items():
                digests[f"{path.name}/{name}" if path.is_dir() else name] = digest

        manifest = RunManifestSchema(
            command=command,
            config=config,
            seed=seed,
            code_version=settings.APP_VERSION,
            inputs=digests,
            outputs=outputs or [],
        )
        cls.dump_json(out_dir / filename, manifest.model_dump(mode="json"))
        logger.info(f"Манифест запуска записан: {out_dir / filename}")

        return manifest
