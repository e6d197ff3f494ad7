"""Модуль для цикла обучения и абляции вариантов модели."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import orjson
from loguru import logger
from pydantic import ValidationError

import src.modules.training.schemas as schemas
from src.core import constants, exceptions
from src.core.services import RngService
from src.modules.autodiff import Tape, backward
from src.modules.lanes import Sample
from src.modules.metrics import MetricsService
from src.modules.network import NetworkService, SanetParams
from src.modules.training.losses import weighted_cross_entropy
from src.modules.training.optim import OptimState, poly_lr, sgd_momentum_step

# Потоки PRNG обучения.
INIT_STREAM = 0
SHUFFLE_STREAM = 1
FLIP_STREAM = 2


@dataclass
class TrainResult:
    """Итог обучения: финальные и лучшие по mean IoU параметры и журнал."""

    params: SanetParams
    best_params: SanetParams
    records: list[schemas.MetricsRecordSchema] = field(default_factory=list)
    best_iteration: int | None = None
    best_mean_iou: float | None = None


class _BatchSampler:
    """Бесконечная выборка индексов: новое перемешивание на каждую эпоху."""

    def __init__(self, size: int, rng: RngService):
        self.size = size
        self.rng = rng
        self._order: list[int] = []

    def next_batch(self, batch_size: int) -> list[int]:
        batch = []
        while len(batch) < batch_size:
            if not self._order:
                self._order = self.rng.shuffle(list(range(self.size)))
            batch.append(self._order.pop(0))
        return batch


def hflip_sample(image: np.ndarray, mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Отразить кадр и маску по горизонтали; классы полос меняются 1↔4, 2↔3."""

    class_map = np.asarray(constants.HFLIP_CLASS_MAP, dtype=mask.dtype)
    return image[:, ::-1].copy(), class_map[mask[:, ::-1]]


class TrainService:
    """Сервис для обучения SANet."""

    # MARK: Config
    @classmethod
    def load_config(cls, path: Path | None = None, **overrides: Any) -> schemas.TrainConfig:
        """
        Прочитать JSON-конфигурацию и наложить флаги CLI.

        Args:
            path (Path | None): Файл конфигурации; без него - значения по умолчанию.
            **overrides: Значения флагов; `None` не переопределяет файл.

        Raises:
            ConfigurationError: Файл не читается или значения некорректны.
        """

        payload: dict[str, Any] = {}
        if path is not None:
            try:
                payload = orjson.loads(path.read_bytes())
            except (OSError, orjson.JSONDecodeError) as ex:
                raise exceptions.ConfigurationError(f"Не удалось прочитать {path}: {ex}")
            if not isinstance(payload, dict):
                raise exceptions.ConfigurationError(f"{path}: ожидается JSON-объект.")

        payload.update({key: value for key, value in overrides.items() if value is not None})
        try:
            config = schemas.TrainConfig.model_validate(payload)
            config.architecture()
        except ValidationError as ex:
            raise exceptions.ConfigurationError(f"Некорректная конфигурация обучения: {ex}")
        return config

    @classmethod
    def resolve_data(cls, data: Path) -> tuple[Path, Path | None]:
        """
        Каталоги обучения и оценки.

        Если внутри `data` есть `train/`, оценка идет на `val/` (или `test/`);
        иначе весь каталог - обучающий набор без оценки.
        """

        if not (data / "train").is_dir():
            return data, None
        for name in ("val", "test"):
            if (data / name).is_dir():
                return data / "train", data / name
        return data / "train", None

    # MARK: Step
    @classmethod
    def batch_loss(
        cls,
        params: SanetParams,
        batch: Sequence[tuple[np.ndarray, np.ndarray]],
        config: schemas.TrainConfig,
    ) -> float:
        """
        Прямой и обратный проход по батчу; градиенты остаются в `p.grad`.

        Кадры складываются в N×1×H×W и проходят сеть одним вызовом.
        Функция потерь батча - среднее функций потерь изображений.
        """

        for parameter in params.parameters().values():
            parameter.zero_grad()

        images = np.stack([image for image, _ in batch])
        masks = np.stack([mask for _, mask in batch])
        with Tape() as tape:
            logits = NetworkService.sanet_forward(NetworkService.image_tensor(images), params)
            loss = weighted_cross_entropy(
                logits,
                masks,
                config.lambda_b,
                config.lambda_l,
                config.loss_normalization,
            )
        backward(tape, loss)
        return loss.item()

    @classmethod
    def snapshot(cls, params: SanetParams) -> SanetParams:
        arrays = {name: p.data for name, p in params.parameters().items()}
        return NetworkService.assemble(params.architecture, arrays)

    # MARK: Train
    @classmethod
    def train(
        cls,
        config: schemas.TrainConfig,
        train_set: Sequence[Sample],
        eval_set: Sequence[Sample] | None = None,
        log_path: Path | None = None,
    ) -> TrainResult:
        """
        Обучить сеть SGD с моментом и poly-расписанием шага.

        Args:
            config (TrainConfig): Гиперпараметры.
            train_set (Sequence[Sample]): Обучающий набор.
            eval_set (Sequence[Sample] | None): Набор для отбора лучшего чекпоинта.
            log_path (Path | None): Файл `metrics.jsonl`, пишется по строке на итерацию.

        Returns:
            TrainResult: Финальные и лучшие параметры, журнал.

        Raises:
            DataError: Пустой обучающий набор.
            DimensionError: Размеры кадров в батче различаются.
            NumericalError: Нечисловая функция потерь или параметры.
        """

        if not train_set:
            raise exceptions.DataError("Пустой обучающий набор.")
        shapes = {sample.image.shape for sample in train_set}
        if len(shapes) != 1:
            raise exceptions.DimensionError(f"Размеры кадров различаются: {sorted(shapes)}.")

        rng = RngService(config.seed)
        params = NetworkService.init_params(config.architecture(), rng.spawn(INIT_STREAM))
        sampler = _BatchSampler(len(train_set), rng.spawn(SHUFFLE_STREAM))
        flip_rng = rng.spawn(FLIP_STREAM)
        state = OptimState.zeros(params.parameters())

        result = TrainResult(params=params, best_params=params)
        if not eval_set:
            logger.warning("Нет набора для оценки: лучшим чекпоинтом будет финальный.")

        log_file = None
        if log_path is not None:
            log_path.parent.mkdir(parents=True, exist_ok=True)
            log_file = log_path.open("wb")

        logger.info(
            f"Обучение: {len(train_set)} сэмплов, {config.max_iter} итераций, "
            f"batch={config.batch_size}, seed={config.seed}"
        )
        try:
            for iteration in range(1, config.max_iter + 1):
                lr = poly_lr(config.initial_lr, iteration - 1, config.max_iter, config.power)
                batch = []
                for index in sampler.next_batch(config.batch_size):
                    image, mask = train_set[index].image, train_set[index].mask
                    if config.hflip and flip_rng.random() < 0.5:
                        image, mask = hflip_sample(image, mask)
                    batch.append((image, mask))

                try:
                    loss = cls.batch_loss(params, batch, config)
                    grads = {name: p.grad for name, p in params.parameters().items()}
                    sgd_momentum_step(params.parameters(), grads, state, lr, config.momentum)
                except exceptions.NonFiniteError as ex:
                    raise exceptions.NumericalError(
                        f"Итерация {iteration}: нечисловое значение ({ex.detail})"
                    )

                record = schemas.MetricsRecordSchema(iter=iteration, lr=lr, loss=loss)
                if eval_set and (
                    iteration % config.eval_interval == 0 or iteration == config.max_iter
                ):
                    report = MetricsService.evaluate(params, eval_set)
                    record.mean_f1, record.mean_iou = report.mean_f1, report.mean_iou
                    if result.best_mean_iou is None or report.mean_iou > result.best_mean_iou:
                        result.best_mean_iou = report.mean_iou
                        result.best_iteration = iteration
                        result.best_params = cls.snapshot(params)
                    logger.info(
                        f"Итерация {iteration}: loss={loss:.6f}, lr={lr:.6g}, "
                        f"mean IoU={report.mean_iou:.4f}"
                    )
                else:
                    logger.debug(f"Итерация {iteration}: loss={loss:.6f}, lr={lr:.6g}")

                result.records.append(record)
                if log_file is not None:
                    log_file.write(
                        orjson.dumps(record.model_dump(exclude_none=True), option=orjson.OPT_SORT_KEYS)
                        + b"\n"
                    )
        finally:
            if log_file is not None:
                log_file.close()

        if not eval_set:
            result.best_params = cls.snapshot(params)
            result.best_iteration = config.max_iter
        logger.info(
            f"Обучение завершено: loss={result.records[-1].loss:.6f}, "
            f"лучшая итерация {result.best_iteration}"
        )
        return result

    # MARK: Ablation
    @classmethod
    def ablate(
        cls,
        config: schemas.TrainConfig,
        train_set: Sequence[Sample],
        test_set: Sequence[Sample],
        presets: Sequence[schemas.AblationPreset] = tuple(schemas.AblationPreset),
        kernel_sizes: Sequence[int] = (),
        seeds: Sequence[int] | None = None,
    ) -> schemas.AblationReportSchema:
        """
        Обучить каждый вариант модели на нескольких зернах и сравнить на тесте.

        Варианты без MSC обучаются один раз на зерно; варианты с MSC -
        для каждой ширины ядра из `kernel_sizes` (по умолчанию из конфигурации).

        Args:
            config (TrainConfig): Общие гиперпараметры.
            train_set (Sequence[Sample]): Обучающий набор.
            test_set (Sequence[Sample]): Тестовый набор.
            presets (Sequence[AblationPreset]): Варианты модели.
            kernel_sizes (Sequence[int]): Ширины ядер MSC.
            seeds (Sequence[int] | None): Зерна; по умолчанию три подряд от `config.seed`.

        Returns:
            AblationReportSchema: Метрики, усредненные по зернам.
        """

        seeds = list(seeds) if seeds else [config.seed + i for i in range(constants.ABLATION_SEEDS)]
        kernel_sizes = list(kernel_sizes) or [config.kernel_size]

        entries = []
        for preset in presets:
            sizes: list[int | None] = list(kernel_sizes) if preset.uses_slice_conv else [None]
            for kernel_size in sizes:
                runs = []
                for seed in seeds:
                    update = {
                        "seed": seed,
                        "directions": preset.directions,
                        "variant": preset.variant,
                    }
                    if kernel_size is not None:
                        update["kernel_size"] = kernel_size
                    run_config = cls.load_config(None, **{**config.model_dump(), **update})

                    logger.info(f"Абляция: {preset.value}, k={kernel_size}, seed={seed}")
                    trained = cls.train(run_config, train_set)
                    report = MetricsService.evaluate(trained.params, test_set)
                    runs.append(
                        schemas.AblationRunSchema(
                            seed=seed,
                            mean_f1=report.mean_f1,
                            mean_iou=report.mean_iou,
                        )
                    )

                entries.append(
                    schemas.AblationEntrySchema(
                        preset=preset,
                        kernel_size=kernel_size,
                        mean_f1=float(np.mean([run.mean_f1 for run in runs])),
                        mean_iou=float(np.mean([run.mean_iou for run in runs])),
                        runs=runs,
                    )
                )

        return schemas.AblationReportSchema(max_iter=config.max_iter, seeds=seeds, entries=entries)
