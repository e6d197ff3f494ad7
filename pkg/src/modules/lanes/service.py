"""Модуль для сервиса разметки полос: классы, растеризация, файлы."""

import math
from pathlib import Path
from typing import Sequence

import numpy as np
import orjson
from loguru import logger
from PIL import Image
from pydantic import ValidationError

import src.modules.lanes.schemas as schemas
from src.core import constants, exceptions
from src.core.base.types import ByteImage, ClassMask, FloatArray

LEFT_LABELS = (2, 1)
RIGHT_LABELS = (3, 4)


def _palette_bytes() -> list[int]:
    flat = [channel for color in constants.CLASS_PALETTE for channel in color]
    return flat + [0] * (768 - len(flat))


class LaneService:
    """Сервис для классов полос, масок и файлов разметки."""

    # MARK: Classes
    @classmethod
    def bottom_intercept(cls, lane: schemas.LanePolyline, bottom_y: float) -> float:
        """x-координата продолжения нижнего отрезка полосы до строки `bottom_y`."""

        (x1, y1), (x2, y2) = lane.points[-2], lane.points[-1]
        return x1 + (x2 - x1) * (bottom_y - y1) / (y2 - y1)

    @classmethod
    def assign_classes(
        cls,
        polylines: Sequence[schemas.LanePolyline],
        ego_x: float,
        bottom_y: float | None = None,
    ) -> list[schemas.LanePolyline]:
        """
        Назначить классы по положению относительно эго.

        Ближайшая слева полоса получает 2, ближайшая справа 3, следующие
        1 и 4. Если с одной стороны полос больше двух, лишние получают
        свободные метки другой стороны, начиная с внешней.

        Args:
            polylines (Sequence[LanePolyline]): Полосы в любом порядке.
            ego_x (float): Столбец эго-автомобиля.
            bottom_y (float | None): Строка нижнего края; по умолчанию
                максимальный y среди точек всех полос.

        Returns:
            list[LanePolyline]: Полосы в исходном порядке с классами.

        Raises:
            DataError: Больше четырех полос.
            LaneTieError: Совпадающие точки пересечения с нижним краем.
        """

        if len(polylines) > len(constants.LANE_CLASSES):
            raise exceptions.DataError(f"Полос {len(polylines)}, допустимо не более 4.")
        if not polylines:
            return []

        if bottom_y is None:
            bottom_y = max(lane.points[-1][1] for lane in polylines)
        intercepts = [cls.bottom_intercept(lane, bottom_y) for lane in polylines]

        ordered = sorted(intercepts)
        for a, b in zip(ordered, ordered[1:]):
            if math.isclose(a, b, abs_tol=1e-9):
                raise exceptions.LaneTieError(f"Две полосы пересекают низ в x={a:.3f}.")

        # Ближние к эго первыми.
        by_distance = sorted(range(len(polylines)), key=lambda i: abs(intercepts[i] - ego_x))
        left = [i for i in by_distance if intercepts[i] < ego_x]
        right = [i for i in by_distance if intercepts[i] >= ego_x]

        classes: dict[int, int] = {}
        for side, other, labels, spare in (
            (left, right, LEFT_LABELS, RIGHT_LABELS),
            (right, left, RIGHT_LABELS, LEFT_LABELS),
        ):
            # Внешняя свободная метка другой стороны идет первой.
            free = list(reversed(spare))[: max(0, len(spare) - len(other))]
            for position, index in enumerate(side):
                if position < len(labels):
                    classes[index] = labels[position]
                else:
                    classes[index] = free[position - len(labels)]

        return [
            lane.model_copy(update={"lane_class": classes[i]})
            for i, lane in enumerate(polylines)
        ]

    # MARK: Rasterize
    @classmethod
    def _check_bounds(cls, polylines: Sequence[schemas.LanePolyline], width: int, height: int):
        for lane_index, lane in enumerate(polylines):
            if lane.lane_class is None:
                raise exceptions.DataError(f"Полосе {lane_index} не назначен класс.")
            for x, y in lane.points:
                if not (0 <= x <= width - 1 and 0 <= y <= height - 1):
                    raise exceptions.DataError(
                        f"Точка ({x}, {y}) полосы {lane_index} вне изображения {width}×{height}."
                    )

    @classmethod
    def distance_to_polyline(
        cls,
        lane: schemas.LanePolyline,
        width: int,
        height: int,
    ) -> FloatArray:
        """Евклидово расстояние от центров пикселей H×W до ломаной."""

        ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
        distance = np.full((height, width), np.inf)
        for (ax, ay), (bx, by) in zip(lane.points, lane.points[1:]):
            dx, dy = bx - ax, by - ay
            t = np.clip(((xs - ax) * dx + (ys - ay) * dy) / (dx * dx + dy * dy), 0.0, 1.0)
            segment = np.hypot(xs - (ax + t * dx), ys - (ay + t * dy))
            np.minimum(distance, segment, out=distance)
        return distance

    @classmethod
    def _bresenham(cls, mask: ClassMask, lane: schemas.LanePolyline, value: int) -> None:
        points = [(int(round(x)), int(round(y))) for x, y in lane.points]
        for (x0, y0), (x1, y1) in zip(points, points[1:]):
            dx, dy = abs(x1 - x0), -abs(y1 - y0)
            sx, sy = (1 if x0 < x1 else -1), (1 if y0 < y1 else -1)
            error = dx + dy
            while True:
                mask[y0, x0] = value
                if x0 == x1 and y0 == y1:
                    break
                double = 2 * error
                if double >= dy:
                    error += dy
                    x0 += sx
                if double <= dx:
                    error += dx
                    y0 += sy

    @classmethod
    def rasterize(
        cls,
        polylines: Sequence[schemas.LanePolyline],
        width_px: int = constants.DEFAULT_LANE_WIDTH_PX,
        size: tuple[int, int] = (1280, 800),
    ) -> tuple[ClassMask, ClassMask]:
        """
        Растеризовать полосы в маску классов и бинарную маску.

        Каждая полоса рисуется как капсула радиуса width_px/2 вокруг
        отрезков (пропуски между точками закрашиваются). Граница включается:
        закрашен пиксель, центр которого на расстоянии ≤ width_px/2 от оси,
        поэтому поперек вертикальной полосы с целой осью получается
        width_px + 1 пикселей при четной ширине (20 -> 21). Пиксель в
        нескольких полосах получает полосу с ближайшей осью, при равенстве
        меньший класс. При width_px ≤ 1 рисуется ломаная Брезенхема.

        Args:
            polylines (Sequence[LanePolyline]): Полосы с классами.
            width_px (int): Ширина полосы в пикселях (диаметр капсулы).
            size (tuple[int, int]): (W, H) изображения.

        Returns:
            (mask, binary): маска классов uint8 и маска `mask > 0`.

        Raises:
            DataError: Точка вне изображения или полоса без класса.
        """

        width, height = size
        cls._check_bounds(polylines, width, height)
        lanes = sorted(polylines, key=lambda lane: lane.lane_class)
        mask = np.zeros((height, width), dtype=np.uint8)

        if width_px <= 1:
            for lane in reversed(lanes):
                cls._bresenham(mask, lane, lane.lane_class)
            return mask, (mask > 0).astype(np.uint8)

        if lanes:
            radius = width_px / 2
            distances = np.stack(
                [cls.distance_to_polyline(lane, width, height) for lane in lanes]
            )
            distances[distances > radius] = np.inf
            nearest = np.argmin(distances, axis=0)
            covered = np.isfinite(distances).any(axis=0)
            classes = np.array([lane.lane_class for lane in lanes], dtype=np.uint8)
            mask[covered] = classes[nearest[covered]]

        return mask, (mask > 0).astype(np.uint8)

    # MARK: Annotations
    @classmethod
    def read_annotations(cls, path: Path) -> list[schemas.LanePolyline]:
        """
        Прочитать файл разметки (одна полоса на строку JSON).

        Raises:
            DataError: Файл не найден.
            FormatError: Строка не разбирается или не проходит проверку.
        """

        if not path.is_file():
            raise exceptions.DataError(f"Файл разметки не найден: {path}")
        lanes = []
        for number, line in enumerate(path.read_bytes().splitlines(), start=1):
            if not line.strip():
                continue
            try:
                lanes.append(schemas.LanePolyline.model_validate(orjson.loads(line)))
            except (orjson.JSONDecodeError, ValidationError) as ex:
                raise exceptions.FormatError(f"{path}:{number}: {ex}")
        return lanes

    @classmethod
    def write_annotations(cls, path: Path, polylines: Sequence[schemas.LanePolyline]) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [
            orjson.dumps(
                {"class": lane.lane_class, "points": [list(point) for point in lane.points]},
                option=orjson.OPT_SORT_KEYS,
            )
            for lane in polylines
        ]
        path.write_bytes(b"".join(line + b"\n" for line in lines))

    # MARK: Images
    @staticmethod
    def _to_pillow(array: np.ndarray, mode: str) -> Image.Image:
        height, width = array.shape[:2]
        payload = np.ascontiguousarray(array, dtype=np.uint8).tobytes()
        return Image.frombytes(mode, (width, height), payload)

    @classmethod
    def read_image(cls, path: Path) -> ByteImage:
        if not path.is_file():
            raise exceptions.DataError(f"Изображение не найдено: {path}")
        with Image.open(path) as image:
            return np.asarray(image.convert("L"), dtype=np.uint8)

    @classmethod
    def write_image(cls, path: Path, image: ByteImage) -> None:
        """Записать 8-битное изображение (PNG или PGM по расширению)."""

        path.parent.mkdir(parents=True, exist_ok=True)
        cls._to_pillow(image, "L").save(path)

    @classmethod
    def read_class_mask(cls, path: Path, n_classes: int = constants.N_CLASSES) -> ClassMask:
        """
        Прочитать индексированную маску классов.

        Raises:
            DataError: Файл не найден или значения вне {0, …, n_classes−1}.
        """

        if not path.is_file():
            raise exceptions.DataError(f"Маска не найдена: {path}")
        with Image.open(path) as image:
            if image.mode not in ("P", "L"):
                raise exceptions.FormatError(f"Маска {path}: режим {image.mode}.")
            mask = np.asarray(image, dtype=np.uint8).copy()
        if mask.size and mask.max() >= n_classes:
            raise exceptions.DataError(f"Маска {path}: значение {mask.max()} ≥ {n_classes}.")
        return mask

    @classmethod
    def write_class_mask(cls, path: Path, mask: ClassMask) -> None:
        """Индексированный PNG: значения пикселей равны индексам классов."""

        path.parent.mkdir(parents=True, exist_ok=True)
        image = cls._to_pillow(mask, "P")
        image.putpalette(_palette_bytes())
        image.save(path)

    @classmethod
    def write_binary_mask(cls, path: Path, binary: ClassMask) -> None:
        cls.write_image(path, np.where(binary > 0, 255, 0).astype(np.uint8))

    @classmethod
    def overlay(cls, mask: ClassMask, image: ByteImage | None = None) -> np.ndarray:
        """RGB H×W×3: цвета палитры на полосах, изображение на фоне."""

        palette = np.array(constants.CLASS_PALETTE, dtype=np.uint8)
        rgb = palette[mask]
        if image is not None:
            background = mask == constants.BACKGROUND_CLASS
            rgb[background] = np.repeat(image[background][:, None], 3, axis=1)
        return rgb

    @classmethod
    def write_overlay(cls, path: Path, mask: ClassMask, image: ByteImage | None = None) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        cls._to_pillow(cls.overlay(mask, image), "RGB").save(path)
        logger.debug(f"Наложение записано: {path}")
