"""Основной модуль `conftest` для всех тестов."""

import sys
from pathlib import Path

import numpy as np
import pytest
from faker import Faker

import src.modules.lanes.schemas as lane_schemas
from src.core.services import RngService
from src.modules.lanes import DatasetService, SceneGenerator
from src.modules.network import BackboneConfig, NetworkService, SanetArchitecture, SanetParams
from src.modules.training import TrainConfig

faker = Faker()

# Маленькая сеть для быстрых тестов.
SMALL_STAGES = (2, 3, 4)


# MARK: Output
@pytest.fixture(autouse=True, scope="session")
def output_to_stdout():
    """
    Перенаправить `stdout` в `stderr`,
    для вывода логов при отладки в `pytest-xdist`.
    """

    sys.stdout = sys.stderr


# MARK: Random
@pytest.fixture
def seed() -> int:
    """Случайное зерно PRNG."""

    return faker.random_int(min=0, max=2**31)


@pytest.fixture
def rng(seed: int) -> np.random.Generator:
    """Генератор numpy для случайных входов тестов."""

    return np.random.default_rng(seed)


# MARK: Network
@pytest.fixture
def small_architecture() -> SanetArchitecture:
    """Архитектура с узким backbone и ядром MSC 3."""

    return SanetArchitecture(
        backbone=BackboneConfig(stage_channels=SMALL_STAGES),
        kernel_size=3,
    )


@pytest.fixture
def small_params(small_architecture: SanetArchitecture, seed: int) -> SanetParams:
    """Инициализированные параметры маленькой сети."""

    return NetworkService.init_params(small_architecture, RngService(seed))


@pytest.fixture
def train_config() -> TrainConfig:
    """Конфигурация короткого обучения маленькой сети."""

    return TrainConfig(
        batch_size=2,
        max_iter=4,
        kernel_size=3,
        stage_channels=SMALL_STAGES,
        eval_interval=2,
    )


# MARK: Datasets
def write_dataset(root: Path, count: int, size: int = 32, seed: int = 0) -> Path:
    """Записать синтетический датасет из `count` сцен."""

    entries = []
    for index in range(count):
        scene = lane_schemas.SceneConfig(size=size, lanes=1 + index % 4, seed=seed + index)
        image, lanes, mask = SceneGenerator.gen_scene(scene)
        stem = f"scene_{index:05d}"
        DatasetService.write_sample(root, stem, image, lanes, mask)
        entries.append(lane_schemas.SampleEntrySchema(stem=stem, lanes=len(lanes), seed=scene.seed))
    DatasetService.write_index(root, entries)
    return root


@pytest.fixture
def dataset_dir(tmp_path: Path) -> Path:
    """Каталог с шестью сценами 32×32."""

    return write_dataset(tmp_path / "data", count=6)
