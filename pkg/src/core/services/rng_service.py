"""
Модуль генератора псевдослучайных чисел `xorshift64star-v1`.

Вся случайность проекта (инициализация весов, перемешивание батчей,
генерация сцен, разбиение датасета) берется из одного зерна через этот
генератор, поэтому запуски воспроизводимы в любой реализации.

Инициализация состояния (один раунд splitmix64 от зерна):

    z = (seed + 0x9E3779B97F4A7C15) mod 2^64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2^64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2^64
    state = z ^ (z >> 31), нулевое состояние заменяется на 0x9E3779B97F4A7C15

Шаг генератора:

    x ^= x >> 12
    x ^= (x << 25) mod 2^64
    x ^= x >> 27
    out = x * 0x2545F4914F6CDD1D mod 2^64

Вещественное число в [0, 1): (out >> 11) * 2^-53.
"""

import numpy as np

from src.core import constants
from src.core.base.types import FloatArray

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MULTIPLIER = 0x2545F4914F6CDD1D
TWO_POW_53 = float(1 << 53)


def _splitmix64(seed: int) -> int:
    z = (seed + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class RngService:
    """Генератор `xorshift64*` с документированными уравнениями обновления."""

    name = constants.PRNG_NAME

    def __init__(self, seed: int):
        self.seed = seed
        self._state = _splitmix64(seed & MASK64) or GOLDEN_GAMMA

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self._state = x
        return (x * MULTIPLIER) & MASK64

    def random(self) -> float:
        """Вещественное число в [0, 1)."""
        return (self.next_u64() >> 11) / TWO_POW_53

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.random()

    def randint(self, low: int, high: int) -> int:
        """Целое число в [low, high] включительно."""
        return low + int(self.random() * (high - low + 1))

    def shuffle(self, items: list) -> list:
        """Перемешать копию списка (Фишер–Йетс от конца к началу)."""

        result = list(items)
        for i in range(len(result) - 1, 0, -1):
            j = int(self.random() * (i + 1))
            result[i], result[j] = result[j], result[i]
        return result

    def uniform_array(self, shape: tuple[int, ...], low: float, high: float) -> FloatArray:
        """
        Массив равномерных чисел, заполняемый в row-major порядке.

        Значения совпадают с последовательными вызовами `uniform`: шаги
        генератора идут подряд, преобразование в [low, high) векторное.
        """

        size = int(np.prod(shape, dtype=np.int64))
        raw = np.fromiter((self.next_u64() for _ in range(size)), dtype=np.uint64, count=size)
        unit = (raw >> np.uint64(11)).astype(np.float64) / TWO_POW_53
        return (low + (high - low) * unit).reshape(shape)

    def spawn(self, stream: int) -> "RngService":
        """Независимый поток для подзадачи (например, сцена с номером `stream`)."""
        return RngService((self.seed * 0x100000001B3 + stream + 1) & MASK64)
