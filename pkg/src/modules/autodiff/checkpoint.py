"""
Модуль контейнера чекпоинтов `SANC`.

Раскладка файла:
    b"SANC" | u8 версия (1) | u32 LE длина манифеста | манифест (JSON)
    | блок little-endian float64 всех параметров подряд.
"""

import struct
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import orjson
from loguru import logger
from pydantic import ValidationError

from src.core import constants, exceptions
from src.modules.autodiff.schemas import CheckpointManifestSchema, ParameterEntrySchema
from src.modules.autodiff.tensor import Parameter

HEADER = struct.Struct("<4sBI")
FLOAT_DTYPE = np.dtype("<f8")


class CheckpointService:
    """Сервис для сохранения и загрузки параметров."""

    # MARK: Save
    @classmethod
    def dumps(
        cls,
        parameters: Mapping[str, Parameter],
        architecture: dict[str, Any] | None = None,
    ) -> bytes:
        """
        Сериализовать параметры в байты контейнера.

        Args:
            parameters (Mapping[str, Parameter]): Параметры по имени.
            architecture (dict[str, Any] | None): Описание архитектуры.

        Returns:
            bytes: Содержимое файла чекпоинта.
        """

        entries, blobs, offset = [], [], 0
        for name, parameter in parameters.items():
            blob = np.ascontiguousarray(parameter.data, dtype=FLOAT_DTYPE).tobytes()
            entries.append(
                ParameterEntrySchema(
                    name=name,
                    shape=list(parameter.shape),
                    offset=offset,
                    count=parameter.data.size,
                )
            )
            blobs.append(blob)
            offset += len(blob)

        manifest = CheckpointManifestSchema(
            architecture=architecture or {},
            parameters=entries,
        )
        manifest_bytes = orjson.dumps(
            manifest.model_dump(mode="json"),
            option=orjson.OPT_SORT_KEYS,
        )
        header = HEADER.pack(
            constants.CHECKPOINT_MAGIC,
            constants.CHECKPOINT_VERSION,
            len(manifest_bytes),
        )
        return header + manifest_bytes + b"".join(blobs)

    @classmethod
    def save(
        cls,
        path: Path,
        parameters: Mapping[str, Parameter],
        architecture: dict[str, Any] | None = None,
    ) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(cls.dumps(parameters, architecture))
        logger.info(f"Чекпоинт сохранен: {path} ({len(parameters)} параметров)")

    # MARK: Load
    @classmethod
    def loads(
        cls,
        payload: bytes,
    ) -> tuple[CheckpointManifestSchema, dict[str, np.ndarray]]:
        """
        Разобрать байты контейнера.

        Returns:
            (manifest, arrays): манифест и массивы параметров по имени.

        Raises:
            FormatError: Неверная сигнатура, версия или усеченный файл.
        """

        if len(payload) < HEADER.size:
            raise exceptions.FormatError("Чекпоинт усечен.")
        magic, version, manifest_length = HEADER.unpack_from(payload)
        if magic != constants.CHECKPOINT_MAGIC:
            raise exceptions.FormatError("Неверная сигнатура чекпоинта.")
        if version != constants.CHECKPOINT_VERSION:
            raise exceptions.FormatError(f"Неподдерживаемая версия чекпоинта: {version}.")

        blob_start = HEADER.size + manifest_length
        try:
            manifest = CheckpointManifestSchema.model_validate(
                orjson.loads(payload[HEADER.size : blob_start])
            )
        except (orjson.JSONDecodeError, ValidationError) as ex:
            raise exceptions.FormatError(f"Поврежденный манифест чекпоинта: {ex}")

        arrays: dict[str, np.ndarray] = {}
        for entry in manifest.parameters:
            start = blob_start + entry.offset
            end = start + entry.count * FLOAT_DTYPE.itemsize
            if end > len(payload) or int(np.prod(entry.shape)) != entry.count:
                raise exceptions.FormatError(f"Поврежденный параметр {entry.name}.")
            arrays[entry.name] = (
                np.frombuffer(payload[start:end], dtype=FLOAT_DTYPE)
                .astype(np.float64)
                .reshape(entry.shape)
            )
        return manifest, arrays

    @classmethod
    def load(cls, path: Path) -> tuple[CheckpointManifestSchema, dict[str, np.ndarray]]:
        if not path.is_file():
            raise exceptions.DataError(f"Чекпоинт не найден: {path}")
        logger.info(f"Загрузка чекпоинта: {path}")
        return cls.loads(path.read_bytes())
