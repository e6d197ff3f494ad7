"""
Модуль генератора синтетических сцен в стиле DVS.

Полосы сходятся к точке схода со случайным смещением и рисуются
разреженными яркими штрихами на черном фоне. Окклюдеры стирают пиксели
изображения, маска при этом размечает полосу целиком.
"""

import math

import numpy as np
from loguru import logger

import src.modules.lanes.schemas as schemas
from src.core.base.types import ByteImage, ClassMask
from src.core.services import RngService
from src.modules.lanes.service import LaneService

# Смещения полос у нижнего края в долях расстояния между полосами.
LANE_SLOTS = (-1.5, -0.5, 0.5, 1.5)
LANE_SPACING = 0.3
KEY_POINTS = 5
STROKE_VALUE = 255
NOISE_VALUE = 200
DASH_PERIOD_PX = 14
DASH_ON_PX = 8


class SceneGenerator:
    """Генератор сцен; вся случайность берется из `RngService(config.seed)`."""

    @classmethod
    def _choose_slots(cls, rng: RngService, lanes: int) -> list[float]:
        if lanes == 4:
            return list(LANE_SLOTS)
        if lanes == 1:
            return [LANE_SLOTS[1 + rng.randint(0, 1)]]
        slots = [LANE_SLOTS[1], LANE_SLOTS[2]]
        if lanes == 3:
            slots.append(LANE_SLOTS[0] if rng.random() < 0.5 else LANE_SLOTS[3])
        return sorted(slots)

    @classmethod
    def _polylines(
        cls,
        config: schemas.SceneConfig,
        rng: RngService,
    ) -> list[schemas.LanePolyline]:
        size = config.size
        bottom = size - 1.0
        spacing = LANE_SPACING * size
        jitter = config.vp_jitter * size

        vp_x = size / 2 + rng.uniform(-jitter, jitter)
        vp_y = 0.35 * size + rng.uniform(-jitter, jitter)
        offset = rng.uniform(-0.1, 0.1) * spacing
        curvature = rng.uniform(-0.03, 0.03) * size

        slots = cls._choose_slots(rng, config.lanes)
        bottoms = [
            min(max(size / 2 + (slot + rng.uniform(-0.05, 0.05)) * spacing + offset, 0.0), bottom)
            for slot in slots
        ]

        # Полосы обрываются там, где соседние сблизились меньше чем на две ширины.
        gap = min((b - a for a, b in zip(bottoms, bottoms[1:])), default=spacing)
        margin = 2 * (config.label_width + 2)
        y_top = vp_y + margin * (bottom - vp_y) / max(gap, margin)
        y_top = min(max(math.ceil(y_top) + 1.0, 0.0), bottom - 2)

        lanes = []
        for bottom_x in bottoms:
            points = []
            for step in range(KEY_POINTS):
                t = step / (KEY_POINTS - 1)
                y = y_top + (bottom - y_top) * t
                x = bottom_x + (vp_x - bottom_x) * (bottom - y) / (bottom - vp_y)
                x += curvature * 4 * t * (1 - t)
                points.append((round(min(max(x, 0.0), bottom), 3), round(y, 3)))
            lanes.append(schemas.LanePolyline(points=points))
        return lanes

    @classmethod
    def _strokes(
        cls,
        config: schemas.SceneConfig,
        rng: RngService,
        lanes: list[schemas.LanePolyline],
        mask: ClassMask,
    ) -> ByteImage:
        size = config.size
        image = np.zeros((size, size), dtype=np.uint8)
        half = (config.stroke_px - 1) // 2

        for lane in lanes:
            dashed = rng.random() < 0.5
            phase = rng.uniform(0, DASH_PERIOD_PX)
            travelled = 0.0
            for (ax, ay), (bx, by) in zip(lane.points, lane.points[1:]):
                length = math.hypot(bx - ax, by - ay)
                for k in range(int(length * 2) + 1):
                    t = k / max(length * 2, 1.0)
                    distance = travelled + t * length
                    lit = rng.random() < config.stroke_density
                    if dashed and (distance + phase) % DASH_PERIOD_PX >= DASH_ON_PX:
                        continue
                    if not lit:
                        continue
                    col = int(round(ax + t * (bx - ax)))
                    row = int(round(ay + t * (by - ay)))
                    image[
                        max(row - half, 0) : row + half + 1 + (config.stroke_px + 1) % 2,
                        max(col - half, 0) : col + half + 1 + (config.stroke_px + 1) % 2,
                    ] = STROKE_VALUE
                travelled += length

        # Штрихи не выходят за пределы разметки.
        image[mask == 0] = 0
        return image

    @classmethod
    def gen_scene(
        cls,
        config: schemas.SceneConfig,
    ) -> tuple[ByteImage, list[schemas.LanePolyline], ClassMask]:
        """
        Сгенерировать сцену.

        Args:
            config (SceneConfig): Параметры сцены.

        Returns:
            (image, lanes, mask): изображение uint8, полосы с классами,
                маска классов.
        """

        rng = RngService(config.seed)
        size = config.size

        lanes = cls._polylines(config, rng)
        lanes = LaneService.assign_classes(lanes, ego_x=(size - 1) / 2, bottom_y=size - 1)
        mask, _ = LaneService.rasterize(lanes, config.label_width, (size, size))
        image = cls._strokes(config, rng, lanes, mask)

        for _ in range(config.occluders):
            height = max(1, int(rng.uniform(0.3, 1.0) * config.occluder_size * size))
            width = max(1, int(rng.uniform(0.3, 1.0) * config.occluder_size * size))
            top = rng.randint(0, size - height)
            left = rng.randint(0, size - width)
            image[top : top + height, left : left + width] = 0

        if config.noise > 0:
            speckle = rng.uniform_array((size, size), 0.0, 1.0) < config.noise
            image[speckle] = NOISE_VALUE

        logger.debug(f"Сцена seed={config.seed}: полос {len(lanes)}")
        return image, lanes, mask
