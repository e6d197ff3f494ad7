"""Модуль исключений и соответствующих им кодов завершения CLI."""


class SanetException(Exception):
    """
    Основной класс исключений проекта.

    Код завершения - `exit_code`.
    """

    default_message = "Ошибка выполнения."
    exit_code = 1

    def __init__(self, detail: str | None = None):
        self.detail = detail or self.default_message
        super().__init__(self.detail)


class ConfigurationError(SanetException):
    """
    Некорректная конфигурация: гиперпараметры, размеры ядер, шаг свертки.

    Код завершения - `1`.
    """

    default_message = "Некорректная конфигурация."
    exit_code = 1


# MARK: Data
class DataError(SanetException):
    """
    Некорректные входные данные.

    Код завершения - `2`.
    """

    default_message = "Некорректные данные."
    exit_code = 2


class FormatError(DataError):
    """Неверная сигнатура, версия или заголовок файла."""

    default_message = "Неверный формат файла."


class DimensionError(DataError):
    """Несовпадение размерностей тензоров."""

    default_message = "Несовпадение размерностей."


class LaneTieError(DataError):
    """Две полосы пересекают нижний край изображения в одной точке."""

    default_message = "Совпадающие точки пересечения полос с нижним краем."


class UndefinedMetricsError(DataError):
    """Все классы отсутствуют и в предсказании, и в разметке."""

    default_message = "Метрики не определены: все классы отсутствуют."


class ContractError(SanetException):
    """
    Нарушено предусловие вызова.

    Код завершения - `2`.
    """

    default_message = "Нарушено предусловие вызова."
    exit_code = 2


# MARK: Numerical
class NumericalError(SanetException):
    """
    Численный сбой (NaN/Inf).

    Код завершения - `3`.
    """

    default_message = "Численный сбой."
    exit_code = 3


class NonFiniteError(NumericalError):
    """Тензор содержит NaN или Inf."""

    default_message = "Тензор содержит нечисловые значения."


class EvaluationError(NumericalError):
    """Функция вернула нечисловое значение при проверке градиента."""

    default_message = "Функция вернула нечисловое значение."
