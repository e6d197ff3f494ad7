"""
Эталонная послойная свертка: прямая запись рекуррентности циклами.

Не использует код `service.py` и геометрию направлений из `schemas.py`:
порядок обхода и сдвиг записаны здесь отдельно. Служит независимым
оракулом в тестах.
"""

import numpy as np

from src.core import exceptions
from src.modules.autodiff import Tensor
from src.modules.slice_conv.schemas import Direction, SliceFamily, SliceKernel

# код направления -> (слои - строки, обход от последнего слоя, сдвиг внутри слоя)
_TRAVERSAL: dict[str, tuple[bool, bool, int]] = {
    "vd": (True, False, 0),
    "vu": (True, True, 0),
    "hr": (False, False, 0),
    "hl": (False, True, 0),
    # ↘: строки сверху вниз, сообщение уходит вправо.
    "mdd": (True, False, 1),
    # ↖: строки снизу вверх, сообщение уходит влево.
    "mdu": (True, True, -1),
    # ↙: столбцы справа налево, сообщение уходит вниз.
    "cdd": (False, True, 1),
    # ↗: столбцы слева направо, сообщение уходит вверх.
    "cdu": (False, False, -1),
}


def slice_conv_reference(x: Tensor, kernel: SliceKernel, direction: Direction) -> Tensor:
    vertical, reverse, shift = _TRAVERSAL[direction.value]
    if (kernel.family is SliceFamily.VERTICAL) != vertical:
        raise exceptions.ConfigurationError("Семейство ядра не совпадает с направлением.")
    channels, height, width = x.shape
    if kernel.channels != channels:
        raise exceptions.DimensionError("Число каналов входа и ядра различается.")

    weight = kernel.weight.data
    size = weight.shape[2]
    pad = (size - 1) // 2
    n_slices, length = (height, width) if vertical else (width, height)
    order = list(range(n_slices))
    if reverse:
        order.reverse()

    source = x.data
    out = np.array(source, dtype=np.float64)

    def read(array, slice_index, position, channel):
        if vertical:
            return array[channel, slice_index, position]
        return array[channel, position, slice_index]

    def write(array, slice_index, position, channel, value):
        if vertical:
            array[channel, slice_index, position] = value
        else:
            array[channel, position, slice_index] = value

    for step in range(1, n_slices):
        previous, current = order[step - 1], order[step]

        activated = [[0.0] * length for _ in range(channels)]
        for o in range(channels):
            for position in range(length):
                total = 0.0
                for c in range(channels):
                    for j in range(size):
                        source_position = position + j - pad
                        if 0 <= source_position < length:
                            total += weight[o, c, j] * read(out, previous, source_position, c)
                activated[o][position] = total if total > 0 else 0.0

        for o in range(channels):
            for position in range(length):
                shifted_from = position - shift
                message = 0.0
                if 0 <= shifted_from < length:
                    message = activated[o][shifted_from]
                write(out, current, position, o, read(source, current, position, o) + message)

    return Tensor(out)
