"""Модуль для тестирования роутера src.modules.lanes.lanes_router"""

import numpy as np
import orjson

from src.core import exceptions
from src.core.services import HashService
from src.modules.lanes import DatasetService, LanePolyline, LaneService, lanes_router
from tests.integration.conftest import BaseTestRouter


class TestLanesRouter(BaseTestRouter):
    """Класс для тестирования команд `rasterize`, `gen` и `split`."""

    router = lanes_router

    def test_rasterize(self, invoke, tmp_path):
        """Разметка без классов получает классы по положению и растеризуется."""

        labels = tmp_path / "frame.jsonl"
        LaneService.write_annotations(
            labels,
            [
                LanePolyline(points=((10, 0), (10, 39))),
                LanePolyline(points=((50, 0), (50, 39))),
            ],
        )
        out = tmp_path / "out"

        result = invoke("rasterize", "--labels", labels, "--size", "64x40", "--out", out, "--width-px", 5)

        assert result.exit_code == 0, result.output
        mask = LaneService.read_class_mask(out / "frame_mask.png")
        assert mask.shape == (40, 64)
        assert set(np.unique(mask)) == {0, 2, 3}
        assert (out / "frame_binary.png").is_file()
        assert (out / "frame_overlay.png").is_file()
        assert (out / "manifest.json").is_file()

    def test_rasterize_bad_size(self, invoke, tmp_path):
        """Некорректный размер - ошибка использования."""

        result = invoke("rasterize", "--labels", tmp_path / "x.jsonl", "--size", "axb", "--out", tmp_path)

        assert result.exit_code == 2

    def test_rasterize_out_of_bounds(self, invoke, tmp_path):
        """Точка вне изображения - ошибка данных."""

        labels = tmp_path / "frame.jsonl"
        LaneService.write_annotations(labels, [LanePolyline(lane_class=1, points=((99, 0), (99, 9)))])

        result = invoke("rasterize", "--labels", labels, "--size", "20", "--out", tmp_path / "out")

        assert isinstance(result.exception, exceptions.DataError)

    def test_gen_deterministic(self, invoke, tmp_path):
        """Два запуска с одним зерном дают побитово одинаковые файлы."""

        for name in ("a", "b"):
            result = invoke("gen", "--count", 3, "--size", 32, "--out", tmp_path / name, "--seed", 11)
            assert result.exit_code == 0, result.output

        first = HashService.tree_digests(tmp_path / "a")
        second = HashService.tree_digests(tmp_path / "b")
        assert first == second
        assert "images/scene_00000.png" in first
        assert "labels/scene_00002.jsonl" in first

    def test_gen_random_lane_count(self, invoke, tmp_path):
        """`--lanes 0`: число полос выбирается для каждой сцены."""

        result = invoke("gen", "--count", 4, "--size", 32, "--lanes", 0, "--out", tmp_path)

        assert result.exit_code == 0, result.output
        assert all(1 <= entry.lanes <= 4 for entry in DatasetService.read_index(tmp_path))

    def test_split(self, invoke, tmp_path):
        """Разбиение 12 сцен записывает части и сводку."""

        invoke("gen", "--count", 12, "--size", 32, "--out", tmp_path / "all")

        result = invoke("split", "--data", tmp_path / "all", "--out", tmp_path / "parts", "--seed", 2)

        assert result.exit_code == 0, result.output
        summary = orjson.loads((tmp_path / "parts" / "split.json").read_bytes())
        assert {name: part["count"] for name, part in summary.items()} == {
            "train": 6,
            "val": 2,
            "test": 4,
        }
