"""Модуль для базовых типов данных, которые используются во всех модулях."""

from typing import TypeAlias

import numpy as np
import numpy.typing as npt

FloatArray: TypeAlias = npt.NDArray[np.float64]
IntArray: TypeAlias = npt.NDArray[np.int64]
ByteImage: TypeAlias = npt.NDArray[np.uint8]
# Маска классов H×W со значениями {0, …, 4}.
ClassMask: TypeAlias = npt.NDArray[np.uint8]
