"""Модуль для накопления событий в кадры фиксированной длительности."""

from pathlib import Path

import numpy as np
from loguru import logger
from PIL import Image

from src.core import constants, exceptions
from src.core.base.types import ByteImage
from src.modules.dvs.schemas import AccumulationMode, CountFrame, EventStream


class DvsService:
    """Сервис для накопления и визуализации кадров DVS."""

    # MARK: Accumulate
    @classmethod
    def accumulate(
        cls,
        stream: EventStream,
        dt_us: int = constants.DEFAULT_DT_US,
        mode: AccumulationMode = AccumulationMode.COUNT,
    ) -> list[CountFrame]:
        """
        Накопить события в кадры по полуинтервалам [i·Δt, (i+1)·Δt).

        Число кадров ⌈(t_last + 1)/Δt⌉, для пустого потока 0. Кадры без
        событий внутри потока сохраняются как нулевые.

        Raises:
            ConfigurationError: Δt ≤ 0.
        """

        if dt_us <= 0:
            raise exceptions.ConfigurationError(f"Δt должен быть положительным: {dt_us}.")
        events = stream.events
        if len(events) == 0:
            return []

        windows = (events["t"] // np.uint64(dt_us)).astype(np.int64)
        n_frames = int(windows[-1]) + 1
        pixels = events["y"].astype(np.int64) * stream.width + events["x"].astype(np.int64)
        area = stream.width * stream.height
        # Поток упорядочен по t, поэтому окна идут подряд.
        bounds = np.searchsorted(windows, np.arange(n_frames + 1))

        frames = []
        for index in range(n_frames):
            start, end = bounds[index], bounds[index + 1]
            window_pixels = pixels[start:end]
            if mode is AccumulationMode.TWO_CHANNEL:
                on = events["p"][start:end] > 0
                counts = np.stack(
                    [
                        np.bincount(window_pixels[on], minlength=area),
                        np.bincount(window_pixels[~on], minlength=area),
                    ]
                ).reshape(2, stream.height, stream.width)
            else:
                counts = np.bincount(window_pixels, minlength=area).reshape(
                    stream.height, stream.width
                )
            frames.append(CountFrame(index=index, dt_us=dt_us, counts=counts.astype(np.int64)))

        logger.info(f"Событий {len(events)} -> кадров {n_frames} (Δt={dt_us} мкс)")
        return frames

    # MARK: Render
    @classmethod
    def normalize_frame(cls, frame: CountFrame, clip: int = constants.DEFAULT_CLIP) -> ByteImage:
        """
        Кадр в 8-битное изображение: round(255 · min(count, clip) / clip).

        Raises:
            ConfigurationError: clip < 1.
        """

        if clip < 1:
            raise exceptions.ConfigurationError(f"clip должен быть ≥ 1: {clip}.")
        clipped = np.minimum(frame.counts, clip)
        return np.floor(255.0 * clipped / clip + 0.5).astype(np.uint8)

    @classmethod
    def export_frames(
        cls,
        frames: list[CountFrame],
        out_dir: Path,
        clip: int = constants.DEFAULT_CLIP,
        suffix: str = ".png",
    ) -> list[str]:
        """
        Записать кадры как 8-битные PNG или PGM.

        Двухканальный кадр пишется двумя файлами `_on` и `_off`.

        Returns:
            list[str]: Имена записанных файлов.
        """

        out_dir.mkdir(parents=True, exist_ok=True)
        names = []
        for frame in frames:
            image = cls.normalize_frame(frame, clip)
            stem = f"frame_{frame.index:06d}"
            if image.ndim == 3:
                channels = [(f"{stem}_on", image[0]), (f"{stem}_off", image[1])]
            else:
                channels = [(stem, image)]
            for name, channel in channels:
                height, width = channel.shape
                payload = np.ascontiguousarray(channel).tobytes()
                Image.frombytes("L", (width, height), payload).save(out_dir / f"{name}{suffix}")
                names.append(f"{name}{suffix}")
        return names
