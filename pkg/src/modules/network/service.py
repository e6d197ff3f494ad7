"""Модуль для сервиса сети SANet: backbone → MSC → 1×1 → upsampling."""

import math
from pathlib import Path

import numpy as np
from loguru import logger
from pydantic import ValidationError

import src.modules.network.schemas as schemas
from src.core import constants, exceptions
from src.core.base.types import ByteImage, ClassMask
from src.core.services import RngService
from src.modules.autodiff import (
    CheckpointService,
    Parameter,
    Tensor,
    conv2d,
    crop2d,
    pad2d,
    relu,
    upsample_bilinear,
)
from src.modules.slice_conv import (
    CANONICAL_ORDER,
    MscParams,
    SliceConvService,
    SliceKernel,
)

# (вход, выход, stride) для шести сверток backbone по индексам стадий.
_BACKBONE_LAYOUT: tuple[tuple[int | None, int, int], ...] = (
    (None, 0, 1),
    (0, 1, 2),
    (1, 1, 1),
    (1, 2, 2),
    (2, 2, 1),
    (2, 2, 1),
)


class NetworkService:
    """Сервис для инициализации, прямого прохода и чекпоинтов SANet."""

    # MARK: Layout
    @classmethod
    def _backbone_shapes(cls, config: schemas.BackboneConfig) -> dict[str, tuple[int, ...]]:
        shapes: dict[str, tuple[int, ...]] = {}
        for index, (source, target, _) in enumerate(_BACKBONE_LAYOUT, start=1):
            in_channels = config.in_channels if source is None else config.stage_channels[source]
            out_channels = config.stage_channels[target]
            shapes[f"backbone.conv{index}.weight"] = (out_channels, in_channels, 3, 3)
            shapes[f"backbone.conv{index}.bias"] = (out_channels,)
        return shapes

    @classmethod
    def _initial_shapes(cls, architecture: schemas.SanetArchitecture) -> dict[str, tuple[int, ...]]:
        """
        Раскладка всех инициализируемых параметров в порядке выборки из PRNG.

        Ядра всех восьми направлений выбираются всегда, поэтому backbone и
        классификатор совпадают у всех вариантов с одним зерном.
        """

        channels = architecture.backbone.out_channels
        shapes = cls._backbone_shapes(architecture.backbone)
        shapes["head.weight"] = (architecture.n_classes, channels, 1, 1)
        shapes["head.bias"] = (architecture.n_classes,)
        for direction in CANONICAL_ORDER:
            shapes[f"msc.{direction.value}.weight"] = (channels, channels, architecture.kernel_size)
        if architecture.variant is schemas.ArchitectureVariant.EXTRA_CONV:
            for index in range(1, constants.EXTRA_CONV_LAYERS + 1):
                shapes[f"extra.conv{index}.weight"] = (channels, channels, 3, 3)
                shapes[f"extra.conv{index}.bias"] = (channels,)
        return shapes

    @classmethod
    def parameter_shapes(cls, architecture: schemas.SanetArchitecture) -> dict[str, tuple[int, ...]]:
        """Имена и формы параметров сети в порядке сериализации."""

        enabled = set(cls._enabled_directions(architecture))
        return {
            name: shape
            for name, shape in cls._initial_shapes(architecture).items()
            if not name.startswith("msc.") or name.split(".")[1] in enabled
        }

    @classmethod
    def _enabled_directions(cls, architecture: schemas.SanetArchitecture) -> list[str]:
        if architecture.variant is schemas.ArchitectureVariant.EXTRA_CONV:
            return []
        return [direction.value for direction in architecture.directions]

    # MARK: Init
    @classmethod
    def init_params(
        cls,
        architecture: schemas.SanetArchitecture,
        rng: RngService,
    ) -> schemas.SanetParams:
        """
        Инициализировать параметры.

        Веса равномерны в ±sqrt(1/fan_in), смещения нулевые, ядра MSC
        дополнительно умножены на 0.01 (fan_in = C·k).

        Args:
            architecture (SanetArchitecture): Архитектура.
            rng (RngService): Генератор; расходуется в порядке раскладки.

        Returns:
            SanetParams: Параметры сети.
        """

        arrays: dict[str, np.ndarray] = {}
        for name, shape in cls._initial_shapes(architecture).items():
            if name.endswith(".bias"):
                arrays[name] = np.zeros(shape)
                continue
            bound = math.sqrt(1.0 / math.prod(shape[1:]))
            if name.startswith("msc."):
                bound *= constants.MSC_INIT_SCALE
            arrays[name] = rng.uniform_array(shape, -bound, bound)

        logger.debug(f"Инициализировано параметров: {len(arrays)} (seed={rng.seed})")
        return cls.assemble(architecture, arrays)

    @classmethod
    def assemble(
        cls,
        architecture: schemas.SanetArchitecture,
        arrays: dict[str, np.ndarray],
    ) -> schemas.SanetParams:
        """
        Собрать `SanetParams` из массивов по имени.

        Raises:
            FormatError: Не хватает параметра.
            DimensionError: Форма параметра не совпадает с архитектурой.
        """

        expected = cls.parameter_shapes(architecture)
        parameters: dict[str, Parameter] = {}
        for name, shape in expected.items():
            if name not in arrays:
                raise exceptions.FormatError(f"Нет параметра {name}.")
            if tuple(arrays[name].shape) != shape:
                raise exceptions.DimensionError(
                    f"Параметр {name}: ожидается {shape}, получено {arrays[name].shape}."
                )
            parameters[name] = Parameter(name, np.array(arrays[name], dtype=np.float64))

        msc = MscParams(
            kernels={
                direction: SliceKernel(direction.family, parameters[f"msc.{direction.value}.weight"])
                for direction in architecture.msc_order
                if f"msc.{direction.value}.weight" in parameters
            },
            order=tuple(architecture.msc_order),
        )
        return schemas.SanetParams(
            architecture=architecture,
            backbone={name: p for name, p in parameters.items() if name.startswith("backbone.")},
            head_weight=parameters["head.weight"],
            head_bias=parameters["head.bias"],
            msc=msc,
            extra={name: p for name, p in parameters.items() if name.startswith("extra.")},
        )

    # MARK: Forward
    @classmethod
    def backbone_forward(cls, image: Tensor, params: schemas.SanetParams) -> Tensor:
        """
        Backbone: 1×H×W -> C×⌈H/4⌉×⌈W/4⌉ (батч N×1×H×W -> N×C×⌈H/4⌉×⌈W/4⌉).

        Вход дополняется снизу и справа до кратного 4. Свертки со stride 2
        дополняются по схеме SAME (0 сверху/слева, 1 снизу/справа).

        Raises:
            DimensionError: H или W меньше 8, либо неверное число каналов.
        """

        config = params.architecture.backbone
        if image.ndim not in (3, 4) or image.shape[-3] != config.in_channels:
            raise exceptions.DimensionError(f"Изображение {image.shape}.")
        height, width = image.shape[-2:]
        if min(height, width) < constants.MIN_INPUT_EXTENT:
            raise exceptions.DimensionError(
                f"Изображение {height}×{width} меньше {constants.MIN_INPUT_EXTENT}×"
                f"{constants.MIN_INPUT_EXTENT}."
            )

        stride = constants.OUTPUT_STRIDE
        x = pad2d(image, 0, (-height) % stride, 0, (-width) % stride)
        for index, (_, _, conv_stride) in enumerate(_BACKBONE_LAYOUT, start=1):
            weight = params.backbone[f"backbone.conv{index}.weight"]
            bias = params.backbone[f"backbone.conv{index}.bias"]
            if conv_stride == 1:
                x = conv2d(x, weight, bias, stride=1, padding=1)
            else:
                x = conv2d(pad2d(x, 0, 1, 0, 1), weight, bias, stride=conv_stride, padding=0)
            x = relu(x)
        return x

    @classmethod
    def sanet_forward(cls, image: Tensor, params: schemas.SanetParams) -> Tensor:
        """
        Полный проход: backbone → MSC (или extra conv) → 1×1 → ×4 → обрезка.

        Returns:
            Tensor: Ненормированные логиты n_classes×H×W (N×n_classes×H×W для батча).
        """

        height, width = image.shape[-2:]
        features = cls.backbone_forward(image, params)

        if params.architecture.variant is schemas.ArchitectureVariant.EXTRA_CONV:
            for index in range(1, constants.EXTRA_CONV_LAYERS + 1):
                features = relu(
                    conv2d(
                        features,
                        params.extra[f"extra.conv{index}.weight"],
                        params.extra[f"extra.conv{index}.bias"],
                        padding=1,
                    )
                )
        else:
            features = SliceConvService.msc_forward(features, params.msc)

        logits = conv2d(features, params.head_weight, params.head_bias)
        logits = upsample_bilinear(logits, constants.OUTPUT_STRIDE)
        return crop2d(logits, 0, 0, height, width)

    @classmethod
    def predict_mask(cls, logits: Tensor) -> ClassMask:
        """Попиксельный argmax; при равенстве выбирается меньший класс."""

        return np.argmax(logits.data, axis=-3).astype(np.uint8)

    @classmethod
    def image_tensor(cls, image: ByteImage) -> Tensor:
        """8-битный кадр H×W -> тензор 1×H×W в [0, 1]; стопка N×H×W -> N×1×H×W."""

        return Tensor(image.astype(np.float64)[..., None, :, :] / 255.0)

    @classmethod
    def predict(cls, params: schemas.SanetParams, image: ByteImage) -> ClassMask:
        return cls.predict_mask(cls.sanet_forward(cls.image_tensor(image), params))

    # MARK: Checkpoint
    @classmethod
    def save_checkpoint(cls, path: Path, params: schemas.SanetParams) -> None:
        CheckpointService.save(
            path,
            params.parameters(),
            architecture=params.architecture.model_dump(mode="json"),
        )

    @classmethod
    def load_checkpoint(cls, path: Path) -> schemas.SanetParams:
        """
        Загрузить параметры с проверкой форм по архитектуре из манифеста.

        Raises:
            DataError: Файл не найден.
            FormatError: Поврежденный файл или манифест.
            DimensionError: Формы не совпадают с архитектурой.
        """

        manifest, arrays = CheckpointService.load(path)
        try:
            architecture = schemas.SanetArchitecture.model_validate(manifest.architecture)
        except ValidationError as ex:
            raise exceptions.FormatError(f"Архитектура в чекпоинте некорректна: {ex}")
        return cls.assemble(architecture, arrays)
