"""Модуль для тестирования разметки полос, растеризации и синтетических сцен."""

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import ndimage

from src.core import exceptions
from src.modules.lanes import (
    DatasetService,
    LanePolyline,
    LaneService,
    SceneConfig,
    SceneGenerator,
)
from tests.conftest import write_dataset


def vertical(x: float, top: float = 0.0, bottom: float = 10.0, lane_class: int | None = None):
    return LanePolyline(lane_class=lane_class, points=((x, top), (x, bottom)))


def classes_of(lanes: list[LanePolyline]) -> list[int | None]:
    return [lane.lane_class for lane in lanes]


class TestLanePolyline:
    """Класс для тестирования схемы полосы."""

    def test_points_sorted_by_y(self):
        """Точки упорядочиваются сверху вниз."""

        lane = LanePolyline(points=((3, 9), (1, 2), (2, 5)))

        assert lane.points == ((1.0, 2.0), (2.0, 5.0), (3.0, 9.0))

    def test_equal_y_keeps_first(self):
        """Из точек с одинаковым y остается первая."""

        lane = LanePolyline(points=((1, 2), (7, 2), (3, 9)))

        assert lane.points == ((1.0, 2.0), (3.0, 9.0))

    def test_single_row_rejected(self):
        """Меньше двух различных y - ошибка."""

        with pytest.raises(ValidationError):
            LanePolyline(points=((1, 2), (5, 2)))

    def test_class_alias(self):
        """Класс читается из поля `class`."""

        lane = LanePolyline.model_validate({"class": 3, "points": [[0, 0], [0, 1]]})

        assert lane.lane_class == 3


class TestAssignClasses:
    """Класс для тестирования назначения классов по положению."""

    def test_four_lanes(self):
        """Пересечения [100, 300, 500, 700], эго 400 -> [1, 2, 3, 4]."""

        lanes = [vertical(x) for x in (500, 100, 700, 300)]

        result = LaneService.assign_classes(lanes, ego_x=400)

        assert classes_of(result) == [3, 1, 4, 2]

    def test_single_left(self):
        """Одна полоса слева -> 2."""

        assert classes_of(LaneService.assign_classes([vertical(100)], ego_x=400)) == [2]

    def test_both_right(self):
        """[500, 700] справа от эго -> [3, 4]."""

        result = LaneService.assign_classes([vertical(500), vertical(700)], ego_x=400)

        assert classes_of(result) == [3, 4]

    def test_three_right_overflow(self):
        """Третья полоса справа получает свободную внешнюю метку слева."""

        result = LaneService.assign_classes(
            [vertical(500), vertical(600), vertical(700)], ego_x=400
        )

        assert classes_of(result) == [3, 4, 1]

    def test_slanted_uses_bottom_intercept(self):
        """Класс определяется продолжением нижнего отрезка до нижнего края."""

        # Сверху правее эго, но у нижнего края левее.
        slanted = LanePolyline(points=((450, 0), (390, 10)))
        right = vertical(600)

        result = LaneService.assign_classes([slanted, right], ego_x=400, bottom_y=10)

        assert classes_of(result) == [2, 3]

    @pytest.mark.parametrize("count", [1, 2, 3, 4])
    @pytest.mark.parametrize("offset", [-37.5, 0.25, 120.0])
    def test_translation_invariance(self, count, offset, rng):
        """Сдвиг всех полос и эго по горизонтали не меняет классы."""

        xs = rng.choice(np.arange(100, 900, 7), size=count, replace=False)
        lanes = [LanePolyline(points=((float(x) + 15.0, 0.0), (float(x), 10.0))) for x in xs]
        shifted = [
            LanePolyline(points=tuple((x + offset, y) for x, y in lane.points)) for lane in lanes
        ]

        before = LaneService.assign_classes(lanes, ego_x=500.0)
        after = LaneService.assign_classes(shifted, ego_x=500.0 + offset)

        assert classes_of(before) == classes_of(after)

    def test_tie(self):
        """Совпадающие пересечения - ошибка совпадения."""

        with pytest.raises(exceptions.LaneTieError):
            LaneService.assign_classes([vertical(100), vertical(100, top=5)], ego_x=400)

    def test_too_many(self):
        """Больше четырех полос - ошибка данных."""

        with pytest.raises(exceptions.DataError):
            LaneService.assign_classes([vertical(x) for x in range(0, 500, 100)], ego_x=250)


class TestRasterize:
    """Класс для тестирования растеризации полос."""

    def test_vertical_band_distance(self):
        """Вертикальный отрезок ширины 20: маска = пиксели на расстоянии ≤ 10."""

        lane = LanePolyline(lane_class=1, points=((50, 20), (50, 80)))

        mask, binary = LaneService.rasterize([lane], 20, (100, 100))

        axis = np.ones((100, 100), dtype=bool)
        axis[20:81, 50] = False
        distance = ndimage.distance_transform_edt(axis)
        np.testing.assert_array_equal(mask > 0, distance <= 10)
        np.testing.assert_array_equal(binary, (mask > 0).astype(np.uint8))
        assert set(np.unique(mask)) == {0, 1}
        assert (mask[50, 40:61] == 1).all()

    @pytest.mark.parametrize(("width_px", "expected"), [(20, 21), (4, 5), (7, 7)])
    def test_band_width_inclusive(self, width_px, expected):
        """Граница включается: четная ширина дает на пиксель шире, нечетная точно."""

        lane = LanePolyline(lane_class=2, points=((30, 10), (30, 50)))

        mask, _ = LaneService.rasterize([lane], width_px, (60, 60))

        assert int((mask[30] > 0).sum()) == expected

    def test_width_one_bresenham(self):
        """Ширина 1: только тонкая ломаная."""

        lane = LanePolyline(lane_class=2, points=((5, 1), (5, 8)))

        mask, _ = LaneService.rasterize([lane], 1, (12, 10))

        expected = np.zeros((10, 12), dtype=np.uint8)
        expected[1:9, 5] = 2
        np.testing.assert_array_equal(mask, expected)

    def test_parallel_lanes_disjoint(self):
        """Две параллельные полосы на расстоянии 40 не касаются."""

        lanes = [vertical(30, 0, 99, 1), vertical(70, 0, 99, 2)]

        mask, _ = LaneService.rasterize(lanes, 20, (100, 100))

        grown = ndimage.binary_dilation(mask == 1)
        assert not (grown & (mask == 2)).any()
        assert (mask == 1).any() and (mask == 2).any()

    def test_overlap_goes_to_nearest(self):
        """Пиксель в двух полосах получает ближайшую ось, при равенстве меньший класс."""

        lanes = [vertical(10, 0, 19, 2), vertical(14, 0, 19, 1)]

        mask, _ = LaneService.rasterize(lanes, 10, (30, 20))

        assert mask[5, 11] == 2
        assert mask[5, 13] == 1
        assert mask[5, 12] == 1

    def test_random_polylines_geometry(self, rng):
        """Каждый пиксель маски не дальше width/2 + 0.75 от оси, область 4-связна."""

        for _ in range(100):
            width_px = int(rng.integers(2, 13))
            xs = rng.uniform(0, 63, size=3)
            ys = np.sort(rng.choice(np.arange(64), size=3, replace=False)).astype(float)
            lane = LanePolyline(lane_class=1, points=tuple(zip(xs, ys)))

            mask, _ = LaneService.rasterize([lane], width_px, (64, 64))

            distance = LaneService.distance_to_polyline(lane, 64, 64)
            assert (distance[mask > 0] <= width_px / 2 + 0.75).all()
            _, components = ndimage.label(mask > 0)
            assert components == 1

    def test_point_out_of_bounds(self):
        """Точка вне изображения - ошибка данных."""

        with pytest.raises(exceptions.DataError):
            LaneService.rasterize([vertical(120, 0, 10, 1)], 20, (100, 100))

    def test_unassigned_class(self):
        """Полоса без класса - ошибка данных."""

        with pytest.raises(exceptions.DataError):
            LaneService.rasterize([vertical(10)], 20, (100, 100))


class TestFiles:
    """Класс для тестирования файлов разметки и масок."""

    def test_annotations_round_trip(self, tmp_path):
        """Разметка записывается и читается без изменений."""

        lanes = [vertical(10, lane_class=2), LanePolyline(lane_class=3, points=((1.5, 0), (4.25, 7)))]
        path = tmp_path / "scene.jsonl"

        LaneService.write_annotations(path, lanes)

        assert LaneService.read_annotations(path) == lanes

    def test_bad_annotation_line(self, tmp_path):
        """Неразбираемая строка - ошибка формата."""

        path = tmp_path / "bad.jsonl"
        path.write_text('{"class": 1, "points": [[0, 0]]}\n')

        with pytest.raises(exceptions.FormatError):
            LaneService.read_annotations(path)

    def test_class_mask_round_trip(self, tmp_path, rng):
        """Индексированная маска сохраняет индексы классов."""

        mask = rng.integers(0, 5, size=(9, 11)).astype(np.uint8)
        path = tmp_path / "mask.png"

        LaneService.write_class_mask(path, mask)

        np.testing.assert_array_equal(LaneService.read_class_mask(path), mask)

    def test_class_mask_out_of_range(self, tmp_path):
        """Значение ≥ 5 в маске - ошибка данных."""

        path = tmp_path / "mask.png"
        LaneService.write_image(path, np.full((3, 3), 9, dtype=np.uint8))

        with pytest.raises(exceptions.DataError):
            LaneService.read_class_mask(path)

    def test_overlay_colors(self):
        """Полосы окрашиваются цветами палитры, фон берется из кадра."""

        mask = np.array([[0, 1], [3, 4]], dtype=np.uint8)
        image = np.full((2, 2), 77, dtype=np.uint8)

        rgb = LaneService.overlay(mask, image)

        assert rgb[0, 0].tolist() == [77, 77, 77]
        assert rgb[0, 1].tolist() == [0, 0, 255]
        assert rgb[1, 1].tolist() == [255, 255, 0]


class TestSceneGenerator:
    """Класс для тестирования синтетических сцен."""

    def test_deterministic(self, seed):
        """Одно зерно дает одинаковые кадр и маску."""

        config = SceneConfig(size=64, lanes=3, occluders=2, noise=0.01, seed=seed)

        first_image, first_lanes, first_mask = SceneGenerator.gen_scene(config)
        second_image, second_lanes, second_mask = SceneGenerator.gen_scene(config)

        np.testing.assert_array_equal(first_image, second_image)
        np.testing.assert_array_equal(first_mask, second_mask)
        assert first_lanes == second_lanes

    def test_strokes_inside_mask(self, seed):
        """Без окклюдеров и шума все ненулевые пиксели лежат в разметке."""

        image, _, mask = SceneGenerator.gen_scene(SceneConfig(size=64, seed=seed))

        assert image.any()
        assert not image[mask == 0].any()

    @pytest.mark.parametrize("scene_seed", [0, 1, 2])
    def test_four_lanes_classes(self, scene_seed):
        """Четыре полосы -> в маске ровно классы {0, 1, 2, 3, 4}."""

        _, lanes, mask = SceneGenerator.gen_scene(SceneConfig(size=128, lanes=4, seed=scene_seed))

        assert set(np.unique(mask)) == {0, 1, 2, 3, 4}
        assert sorted(classes_of(lanes)) == [1, 2, 3, 4]

    @pytest.mark.parametrize("scene_seed", [0, 1, 2])
    def test_lanes_connected(self, scene_seed):
        """Область каждого класса 4-связна."""

        _, _, mask = SceneGenerator.gen_scene(SceneConfig(size=128, lanes=4, seed=scene_seed))

        for lane_class in range(1, 5):
            _, components = ndimage.label(mask == lane_class)
            assert components == 1

    def test_lane_count(self, seed):
        """Число полос совпадает с конфигурацией."""

        _, lanes, _ = SceneGenerator.gen_scene(SceneConfig(size=64, lanes=2, seed=seed))

        assert len(lanes) == 2

    def test_stroke_wider_than_label(self):
        """Штрих шире разметки - ошибка конфигурации сцены."""

        with pytest.raises(ValidationError):
            SceneConfig(size=64, width_px=3, stroke_px=5)


class TestDataset:
    """Класс для тестирования каталога датасета."""

    def test_load(self, dataset_dir):
        """Сэмплы загружаются в порядке индекса."""

        samples = DatasetService.load(dataset_dir)

        assert [sample.stem for sample in samples] == [f"scene_{i:05d}" for i in range(6)]
        assert samples[0].image.shape == samples[0].mask.shape == (32, 32)

    def test_index_fallback(self, dataset_dir):
        """Без `index.json` список строится по каталогу изображений."""

        (dataset_dir / "index.json").unlink()

        entries = DatasetService.read_index(dataset_dir)

        assert len(entries) == 6
        assert entries[1].lanes == 2

    def test_missing_dir(self, tmp_path):
        """Отсутствующий каталог - ошибка данных."""

        with pytest.raises(exceptions.DataError):
            DatasetService.load(tmp_path / "none")

    def test_split(self, tmp_path):
        """12 сэмплов делятся 6/2/4 без пересечений."""

        root = write_dataset(tmp_path / "all", count=12)

        stats = DatasetService.split(root, tmp_path / "parts", seed=3)

        assert {name: summary.count for name, summary in stats.items()} == {
            "train": 6,
            "val": 2,
            "test": 4,
        }
        stems = [
            entry.stem
            for name in ("train", "val", "test")
            for entry in DatasetService.read_index(tmp_path / "parts" / name)
        ]
        assert sorted(stems) == sorted(f"scene_{i:05d}" for i in range(12))
        assert sum(sum(summary.lane_counts.values()) for summary in stats.values()) == 12

    def test_split_deterministic(self, tmp_path):
        """Одно зерно дает одно разбиение."""

        root = write_dataset(tmp_path / "all", count=9)

        first = DatasetService.split(root, tmp_path / "a", seed=5)
        second = DatasetService.split(root, tmp_path / "b", seed=5)

        assert first == second
        assert DatasetService.read_index(tmp_path / "a" / "test") == DatasetService.read_index(
            tmp_path / "b" / "test"
        )
