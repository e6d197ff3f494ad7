"""Модуль для тестирования чтения событий DVS и накопления кадров."""

import numpy as np
import pytest

from src.core import exceptions
from src.modules.dvs import (
    EVENT_DTYPE,
    AccumulationMode,
    CountFrame,
    DvsService,
    EventCodec,
    EventStream,
)


def stream_of(records: list[tuple[int, int, int, int]], width: int = 4, height: int = 3) -> EventStream:
    return EventStream(width, height, np.array(records, dtype=EVENT_DTYPE))


RECORDS = [(0, 1, 0, 1), (10_000, 3, 2, -1), (29_999, 1, 0, 1)]


class TestEventCodec:
    """Класс для тестирования форматов файлов событий."""

    def test_empty_binary(self):
        """Пустое тело после заголовка -> пустой поток."""

        stream = EventCodec.parse_binary(EventCodec.dumps_binary(EventStream(4, 3)))

        assert len(stream) == 0
        assert (stream.width, stream.height) == (4, 3)

    def test_csv_through_binary(self, tmp_path):
        """CSV из трех записей переходит в бинарный формат без потерь."""

        source = stream_of(RECORDS)
        csv_path = tmp_path / "events.csv"
        EventCodec.write_events(csv_path, source)
        from_csv = EventCodec.parse_events(csv_path)

        binary_path = tmp_path / "events.dve"
        EventCodec.write_events(binary_path, from_csv)
        from_binary = EventCodec.parse_events(binary_path)

        assert binary_path.read_bytes() == EventCodec.dumps_binary(source)
        np.testing.assert_array_equal(from_binary.events, source.events)

    def test_x_out_of_bounds(self):
        """x = width отвергается с номером записи 0."""

        payload = EventCodec.dumps_binary(stream_of([(0, 4, 0, 1)]))

        with pytest.raises(exceptions.DataError, match="Запись 0"):
            EventCodec.parse_binary(payload)

    def test_unsorted(self):
        """Убывающее время - ошибка данных с номером записи."""

        payload = EventCodec.dumps_binary(stream_of([(5, 0, 0, 1), (3, 0, 0, 1)]))

        with pytest.raises(exceptions.DataError, match="Запись 1"):
            EventCodec.parse_binary(payload)

    def test_bad_polarity_csv(self):
        """Полярность не ±1 - ошибка данных."""

        with pytest.raises(exceptions.DataError):
            EventCodec.parse_csv("# width=4,height=3\nt_us,x,y,p\n0,0,0,0\n")

    def test_bad_magic(self):
        """Неверная сигнатура - ошибка формата."""

        with pytest.raises(exceptions.FormatError):
            EventCodec.parse_binary(b"XXXX\x04\x00\x03\x00")

    def test_bad_version(self):
        """Другая версия формата - ошибка формата."""

        with pytest.raises(exceptions.FormatError):
            EventCodec.parse_binary(b"DVE2\x04\x00\x03\x00")

    def test_truncated(self):
        """Неполная запись - ошибка формата."""

        payload = EventCodec.dumps_binary(stream_of(RECORDS))

        with pytest.raises(exceptions.FormatError):
            EventCodec.parse_binary(payload[:-1])

    def test_csv_bad_header(self):
        """Неверный заголовок CSV - ошибка формата."""

        with pytest.raises(exceptions.FormatError):
            EventCodec.parse_csv("t,x,y,pol\n0,0,0,1\n")

    def test_csv_infers_resolution(self, mocker):
        """Без строки разрешения оно выводится по данным с предупреждением."""

        warning = mocker.patch("src.modules.dvs.codec.logger.warning")

        stream = EventCodec.parse_csv("t_us,x,y,p\n0,5,2,1\n7,1,6,-1\n")

        assert (stream.width, stream.height) == (6, 7)
        warning.assert_called_once()

    def test_missing_file(self, tmp_path):
        """Отсутствующий файл - ошибка данных."""

        with pytest.raises(exceptions.DataError):
            EventCodec.parse_events(tmp_path / "none.dve")


class TestAccumulate:
    """Класс для тестирования накопления событий в кадры."""

    def test_empty_stream(self):
        """Пустой поток -> ноль кадров."""

        assert DvsService.accumulate(EventStream(4, 3), 30_000) == []

    def test_single_window(self):
        """События в 0, 10 000, 29 999 мкс -> один кадр."""

        frames = DvsService.accumulate(stream_of(RECORDS), 30_000)

        assert len(frames) == 1
        expected = np.zeros((3, 4), dtype=np.int64)
        expected[0, 1] = 2
        expected[2, 3] = 1
        np.testing.assert_array_equal(frames[0].counts, expected)

    def test_half_open_boundary(self):
        """Событие в t = 30 000 попадает в кадр 1."""

        frames = DvsService.accumulate(stream_of([(0, 0, 0, 1), (30_000, 1, 1, 1)]), 30_000)

        assert len(frames) == 2
        assert frames[0].counts.sum() == 1
        assert frames[1].counts[1, 1] == 1

    def test_empty_windows_kept(self):
        """Окна без событий внутри потока сохраняются нулевыми."""

        frames = DvsService.accumulate(stream_of([(0, 0, 0, 1), (95_000, 0, 0, 1)]), 30_000)

        assert [frame.index for frame in frames] == [0, 1, 2, 3]
        assert frames[1].counts.sum() == 0 and frames[2].counts.sum() == 0

    def test_count_conservation(self, rng):
        """Сумма по кадрам равна числу событий."""

        times = np.sort(rng.integers(0, 200_000, size=50))
        records = [
            (int(t), int(rng.integers(0, 4)), int(rng.integers(0, 3)), int(rng.choice([-1, 1])))
            for t in times
        ]

        frames = DvsService.accumulate(stream_of(records), 30_000)

        assert sum(int(frame.counts.sum()) for frame in frames) == 50

    def test_polarity_flip_invariance(self, rng):
        """Счетный режим не зависит от полярности: инверсия всех знаков дает те же кадры."""

        times = np.sort(rng.integers(0, 150_000, size=40))
        records = [
            (int(t), int(rng.integers(0, 4)), int(rng.integers(0, 3)), int(rng.choice([-1, 1])))
            for t in times
        ]
        flipped = [(t, x, y, -p) for t, x, y, p in records]

        frames = DvsService.accumulate(stream_of(records), 30_000)
        flipped_frames = DvsService.accumulate(stream_of(flipped), 30_000)

        assert [frame.index for frame in frames] == [frame.index for frame in flipped_frames]
        for frame, flipped_frame in zip(frames, flipped_frames):
            np.testing.assert_array_equal(frame.counts, flipped_frame.counts)

    def test_two_channel(self):
        """Двухканальный режим разделяет полярности."""

        frames = DvsService.accumulate(stream_of(RECORDS), 30_000, AccumulationMode.TWO_CHANNEL)

        assert frames[0].counts.shape == (2, 3, 4)
        assert frames[0].counts[0, 0, 1] == 2
        assert frames[0].counts[1, 2, 3] == 1

    def test_bad_dt(self):
        """Δt ≤ 0 - ошибка конфигурации."""

        with pytest.raises(exceptions.ConfigurationError):
            DvsService.accumulate(stream_of(RECORDS), 0)


class TestNormalize:
    """Класс для тестирования нормировки кадра."""

    def test_zero(self):
        """Нулевые счетчики -> нулевое изображение."""

        frame = CountFrame(0, 30_000, np.zeros((2, 2), dtype=np.int64))

        assert not DvsService.normalize_frame(frame, 3).any()

    def test_values(self):
        """count = clip -> 255, 1 при clip 3 -> 85, выше clip -> 255."""

        frame = CountFrame(0, 30_000, np.array([[3, 1, 7]], dtype=np.int64))

        image = DvsService.normalize_frame(frame, 3)

        assert image.dtype == np.uint8
        assert image.tolist() == [[255, 85, 255]]

    def test_bad_clip(self):
        """clip < 1 - ошибка конфигурации."""

        with pytest.raises(exceptions.ConfigurationError):
            DvsService.normalize_frame(CountFrame(0, 1, np.zeros((1, 1), np.int64)), 0)

    def test_export(self, tmp_path):
        """Кадры записываются с шестизначными номерами."""

        frames = DvsService.accumulate(stream_of([(0, 0, 0, 1), (30_000, 1, 1, 1)]), 30_000)

        names = DvsService.export_frames(frames, tmp_path, suffix=".pgm")

        assert names == ["frame_000000.pgm", "frame_000001.pgm"]
        assert all((tmp_path / name).is_file() for name in names)
