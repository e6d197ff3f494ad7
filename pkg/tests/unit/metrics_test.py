"""Модуль для тестирования метрик сегментации."""

import numpy as np
import pytest

from src.core import exceptions
from src.modules.lanes import DatasetService
from src.modules.metrics import ConfusionCounts, MetricsService
from src.modules.network import NetworkService


def counts(tp, fp, fn) -> ConfusionCounts:
    return ConfusionCounts(np.array(tp), np.array(fp), np.array(fn))


class TestConfusionCounts:
    """Класс для тестирования счетчиков TP/FP/FN."""

    def test_perfect_prediction(self, rng):
        """pred = gt: FP = FN = 0."""

        gt = rng.integers(0, 5, size=(6, 7)).astype(np.uint8)

        result = MetricsService.confusion_counts(gt, gt)

        assert not result.fp.any()
        assert not result.fn.any()
        assert result.tp.sum() == gt.size

    def test_hand_count(self):
        """pred всюду 0, gt всюду 1 на 2×2."""

        result = MetricsService.confusion_counts(
            np.zeros((2, 2), dtype=np.uint8), np.ones((2, 2), dtype=np.uint8)
        )

        assert result.tp[0] == 0 and result.fp[0] == 4
        assert result.tp[1] == 0 and result.fn[1] == 4
        assert result.absent.tolist() == [False, False, True, True, True]

    def test_shape_mismatch(self):
        """Разные формы - ошибка данных."""

        with pytest.raises(exceptions.DataError):
            MetricsService.confusion_counts(np.zeros((2, 2), np.uint8), np.zeros((2, 3), np.uint8))

    def test_out_of_range(self):
        """Значение класса ≥ n_classes - ошибка данных."""

        with pytest.raises(exceptions.DataError):
            MetricsService.confusion_counts(np.full((2, 2), 5, np.uint8), np.zeros((2, 2), np.uint8))

    def test_add_mismatch(self):
        """Счетчики с разным числом классов не складываются."""

        with pytest.raises(exceptions.DimensionError):
            ConfusionCounts.zeros(5) + ConfusionCounts.zeros(3)


class TestRatios:
    """Класс для тестирования F1 и IoU по классам."""

    def test_f1_perfect(self):
        """TP=10, FP=FN=0 -> 1."""

        assert MetricsService.f1_per_class(counts([10], [0], [0]))[0] == 1.0

    def test_f1_zero_division(self):
        """TP=0 при FP+FN>0 -> 0."""

        assert MetricsService.f1_per_class(counts([0], [3], [1]))[0] == 0.0

    def test_hand_arithmetic(self):
        """TP=3, FP=1, FN=2: P=0.75, R=0.6, F1=2/3, IoU=0.5."""

        result = counts([3], [1], [2])

        assert MetricsService.precision_per_class(result)[0] == pytest.approx(0.75)
        assert MetricsService.recall_per_class(result)[0] == pytest.approx(0.6)
        assert MetricsService.f1_per_class(result)[0] == pytest.approx(2 / 3)
        assert MetricsService.iou_per_class(result)[0] == pytest.approx(0.5)

    def test_iou_disjoint(self):
        """Непересекающиеся непустые множества -> 0."""

        assert MetricsService.iou_per_class(counts([0], [4], [4]))[0] == 0.0

    def test_dice_jaccard(self, rng):
        """F1 = 2·IoU / (1 + IoU) для каждого класса."""

        result = counts(*rng.integers(0, 50, size=(3, 5)))

        f1 = MetricsService.f1_per_class(result)
        iou = MetricsService.iou_per_class(result)

        present = ~result.absent
        np.testing.assert_allclose(f1[present], 2 * iou[present] / (1 + iou[present]), rtol=1e-12)

    def test_absent_class_iou(self):
        """Отсутствующий класс: IoU 1, F1 0."""

        result = counts([0], [0], [0])

        assert MetricsService.iou_per_class(result)[0] == 1.0
        assert MetricsService.f1_per_class(result)[0] == 0.0


class TestMeanMetrics:
    """Класс для тестирования средних метрик по корпусу."""

    def test_perfect_corpus(self, rng):
        """Идеальные предсказания -> (1, 1)."""

        masks = [rng.integers(0, 5, size=(5, 5)).astype(np.uint8) for _ in range(3)]

        total = MetricsService.accumulate((mask, mask) for mask in masks)

        assert total.n_images == 3
        assert MetricsService.mean_metrics(total) == (1.0, 1.0)

    def test_absent_classes_skipped(self):
        """IoU 0.5 и 1.0 при отсутствующих остальных -> 0.75."""

        result = counts([3, 4, 0, 0, 0], [1, 0, 0, 0, 0], [2, 0, 0, 0, 0])

        _, mean_iou = MetricsService.mean_metrics(result)

        assert mean_iou == pytest.approx(0.75)

    def test_all_absent(self):
        """Все классы отсутствуют - метрики не определены."""

        with pytest.raises(exceptions.UndefinedMetricsError):
            MetricsService.mean_metrics(ConfusionCounts.zeros(5))

    def test_corpus_brute_force(self, rng):
        """Два изображения 8×8: совпадение с попиксельным подсчетом."""

        pairs = [
            (
                rng.integers(0, 5, size=(8, 8)).astype(np.uint8),
                rng.integers(0, 3, size=(8, 8)).astype(np.uint8),
            )
            for _ in range(2)
        ]

        total = MetricsService.accumulate(pairs)

        f1s, ious = [], []
        for c in range(5):
            tp = sum(int(((p == c) & (g == c)).sum()) for p, g in pairs)
            fp = sum(int(((p == c) & (g != c)).sum()) for p, g in pairs)
            fn = sum(int(((p != c) & (g == c)).sum()) for p, g in pairs)
            if tp + fp + fn == 0:
                continue
            f1s.append(2 * tp / (2 * tp + fp + fn))
            ious.append(tp / (tp + fp + fn))

        mean_f1, mean_iou = MetricsService.mean_metrics(total)
        assert mean_f1 == pytest.approx(np.mean(f1s))
        assert mean_iou == pytest.approx(np.mean(ious))

    def test_concatenated_corpus(self, rng):
        """Счетчики склеенного корпуса равны сумме счетчиков по изображениям."""

        pairs = [
            (
                rng.integers(0, 5, size=(6, width)).astype(np.uint8),
                rng.integers(0, 5, size=(6, width)).astype(np.uint8),
            )
            for width in (3, 5, 7)
        ]

        total = MetricsService.accumulate(pairs)
        whole = MetricsService.confusion_counts(
            np.concatenate([pred for pred, _ in pairs], axis=1),
            np.concatenate([gt for _, gt in pairs], axis=1),
        )

        np.testing.assert_array_equal(total.tp, whole.tp)
        np.testing.assert_array_equal(total.fp, whole.fp)
        np.testing.assert_array_equal(total.fn, whole.fn)

    @pytest.mark.parametrize("class_index", range(5))
    def test_correct_pixel_monotone(self, class_index, rng):
        """Добавленный верно предсказанный пиксель класса c не уменьшает F1_c и IoU_c."""

        for _ in range(20):
            pred = rng.integers(0, 5, size=(1, 12)).astype(np.uint8)
            gt = rng.integers(0, 5, size=(1, 12)).astype(np.uint8)
            extra = np.array([[class_index]], dtype=np.uint8)

            before = MetricsService.confusion_counts(pred, gt)
            after = MetricsService.confusion_counts(
                np.concatenate([pred, extra], axis=1), np.concatenate([gt, extra], axis=1)
            )

            f1_before, f1_after = (MetricsService.f1_per_class(c)[class_index] for c in (before, after))
            iou_before, iou_after = (MetricsService.iou_per_class(c)[class_index] for c in (before, after))
            assert f1_after >= f1_before
            assert iou_after >= iou_before

    def test_report(self):
        """Отчет содержит метрики всех классов и признак отсутствия."""

        report = MetricsService.report(counts([3, 4, 0, 0, 0], [1, 0, 0, 0, 0], [2, 0, 0, 0, 0]))

        assert report.aggregation == "corpus"
        assert set(report.per_class) == {"0", "1", "2", "3", "4"}
        assert report.per_class["2"].absent
        assert report.per_class["0"].recall == pytest.approx(0.6)


class TestEvaluate:
    """Класс для тестирования оценки сети на датасете."""

    def test_evaluate(self, small_params, dataset_dir, mocker):
        """Сеть прогоняется по каждому сэмплу один раз."""

        samples = DatasetService.load(dataset_dir)
        spy = mocker.spy(NetworkService, "predict")

        report = MetricsService.evaluate(small_params, samples)

        assert spy.call_count == len(samples)
        assert report.n_images == len(samples)
        assert 0.0 <= report.mean_iou <= 1.0

    def test_empty(self, small_params):
        """Пустой набор - ошибка данных."""

        with pytest.raises(exceptions.DataError):
            MetricsService.evaluate(small_params, [])
