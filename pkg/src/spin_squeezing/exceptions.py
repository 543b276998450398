"""
Jerarquía de errores del paquete.

La CLI traduce estas clases a códigos de salida: ArgumentError -> 2,
CapacityError y NumericError -> 3.
"""


class SpinSqueezingError(Exception):
    """Error base del paquete."""


class ArgumentError(SpinSqueezingError, ValueError):
    """Entrada con forma, dimensión o rango inválido."""


class InconsistentMomentsError(ArgumentError):
    """Momentos que ningún estado físico puede producir."""


class CapacityError(SpinSqueezingError):
    """La dimensión del espacio de Hilbert supera el límite configurado."""


class NumericError(SpinSqueezingError, ArithmeticError):
    """Valores no finitos, entrada no hermítica o falta de convergencia."""
