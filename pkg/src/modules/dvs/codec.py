"""
Модуль чтения и записи файлов событий.

Бинарный формат (little-endian):
    b"DVE1" | u16 width | u16 height | записи {u64 t_us, u16 x, u16 y, i8 p}

CSV: необязательная строка `# width=W,height=H`, затем заголовок
`t_us,x,y,p` и по одной записи на строку.
"""

import re
import struct
from pathlib import Path

import numpy as np
from loguru import logger

from src.core import constants, exceptions
from src.modules.dvs.schemas import EVENT_DTYPE, EventStream

HEADER = struct.Struct("<4sHH")
RESOLUTION_PATTERN = re.compile(r"^#\s*width=(\d+)\s*,\s*height=(\d+)\s*$")


class EventCodec:
    """Кодек потоков событий: бинарный формат и CSV."""

    # MARK: Validate
    @classmethod
    def validate(cls, stream: EventStream) -> EventStream:
        """
        Проверить инварианты потока.

        Raises:
            DataError: Координата вне сенсора, полярность не ±1 или
                нарушен порядок времени; в сообщении номер записи.
        """

        if stream.width < 1 or stream.height < 1:
            raise exceptions.DataError(
                f"Разрешение {stream.width}×{stream.height} должно быть положительным."
            )
        events = stream.events
        checks = (
            (events["x"] >= stream.width, "x вне ширины сенсора"),
            (events["y"] >= stream.height, "y вне высоты сенсора"),
            ((events["p"] != 1) & (events["p"] != -1), "полярность не ±1"),
        )
        for failed, reason in checks:
            if failed.any():
                index = int(np.argmax(failed))
                raise exceptions.DataError(f"Запись {index}: {reason}.")
        if len(events) > 1:
            unsorted = events["t"][1:] < events["t"][:-1]
            if unsorted.any():
                index = int(np.argmax(unsorted)) + 1
                raise exceptions.DataError(f"Запись {index}: время меньше предыдущего.")
        return stream

    # MARK: Parse
    @classmethod
    def parse_binary(cls, payload: bytes) -> EventStream:
        if len(payload) < HEADER.size:
            raise exceptions.FormatError("Файл событий короче заголовка.")
        magic, width, height = HEADER.unpack_from(payload)
        if magic[:3] != constants.EVENTS_MAGIC[:3]:
            raise exceptions.FormatError("Неверная сигнатура файла событий.")
        if magic != constants.EVENTS_MAGIC:
            raise exceptions.FormatError(f"Неподдерживаемая версия файла событий: {magic!r}.")

        body = payload[HEADER.size :]
        if len(body) % EVENT_DTYPE.itemsize:
            raise exceptions.FormatError("Файл событий усечен.")
        events = np.frombuffer(body, dtype=EVENT_DTYPE).copy()
        return cls.validate(EventStream(width, height, events))

    @classmethod
    def parse_csv(cls, text: str) -> EventStream:
        lines = [line.strip() for line in text.splitlines() if line.strip()]
        resolution = None
        if lines and lines[0].startswith("#"):
            match = RESOLUTION_PATTERN.match(lines.pop(0))
            if match is None:
                raise exceptions.FormatError("Ожидается `# width=W,height=H`.")
            resolution = int(match.group(1)), int(match.group(2))
        if not lines or lines[0].replace(" ", "") != constants.EVENTS_CSV_HEADER:
            raise exceptions.FormatError(f"Ожидается заголовок `{constants.EVENTS_CSV_HEADER}`.")

        rows = []
        for index, line in enumerate(lines[1:]):
            try:
                t, x, y, p = (int(value) for value in line.split(","))
            except ValueError:
                raise exceptions.FormatError(f"Запись {index}: не разбирается: {line!r}.")
            if t < 0 or x < 0 or y < 0:
                raise exceptions.DataError(f"Запись {index}: отрицательное значение.")
            if x > 0xFFFF or y > 0xFFFF or t >= 1 << 64:
                raise exceptions.DataError(f"Запись {index}: значение вне диапазона формата.")
            if p not in (-1, 1):
                raise exceptions.DataError(f"Запись {index}: полярность не ±1.")
            rows.append((t, x, y, p))
        events = np.array(rows, dtype=EVENT_DTYPE) if rows else np.zeros(0, dtype=EVENT_DTYPE)

        if resolution is None:
            if not rows:
                raise exceptions.FormatError("Пустой CSV без строки разрешения.")
            resolution = int(events["x"].max()) + 1, int(events["y"].max()) + 1
            logger.warning(
                f"CSV без строки разрешения: принято {resolution[0]}×{resolution[1]}."
            )
        return cls.validate(EventStream(resolution[0], resolution[1], events))

    @classmethod
    def parse_events(cls, path: Path) -> EventStream:
        """
        Прочитать поток событий из бинарного файла или CSV.

        Формат определяется по сигнатуре: файл, начинающийся с `DVE`,
        читается как бинарный, остальные как CSV.

        Raises:
            DataError: Файл не найден или записи нарушают инварианты.
            FormatError: Неверная сигнатура, версия или заголовок.
        """

        if not path.is_file():
            raise exceptions.DataError(f"Файл событий не найден: {path}")
        payload = path.read_bytes()
        if payload.startswith(constants.EVENTS_MAGIC[:3]):
            stream = cls.parse_binary(payload)
        else:
            try:
                text = payload.decode("utf-8")
            except UnicodeDecodeError:
                raise exceptions.FormatError("Неверная сигнатура файла событий.")
            stream = cls.parse_csv(text)
        logger.info(f"Прочитано событий: {len(stream)} ({stream.width}×{stream.height})")
        return stream

    # MARK: Write
    @classmethod
    def dumps_binary(cls, stream: EventStream) -> bytes:
        header = HEADER.pack(constants.EVENTS_MAGIC, stream.width, stream.height)
        return header + np.ascontiguousarray(stream.events, dtype=EVENT_DTYPE).tobytes()

    @classmethod
    def dumps_csv(cls, stream: EventStream) -> str:
        lines = [
            f"# width={stream.width},height={stream.height}",
            constants.EVENTS_CSV_HEADER,
        ]
        lines.extend(
            f"{int(event['t'])},{int(event['x'])},{int(event['y'])},{int(event['p'])}"
            for event in stream.events
        )
        return "\n".join(lines) + "\n"

    @classmethod
    def write_events(cls, path: Path, stream: EventStream) -> None:
        """Записать поток: `.csv` как CSV, иначе бинарный формат."""

        path.parent.mkdir(parents=True, exist_ok=True)
        if path.suffix.lower() == ".csv":
            path.write_text(cls.dumps_csv(stream), encoding="utf-8")
        else:
            path.write_bytes(cls.dumps_binary(stream))
