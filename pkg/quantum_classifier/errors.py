"""Exception hierarchy shared by every quantum_classifier module."""


class QuantumClassifierError(Exception):
    """Base class for all errors raised by the library."""


class SizeError(QuantumClassifierError, ValueError):
    """A register or circuit size is outside the supported range."""


class QubitIndexError(QuantumClassifierError, IndexError):
    """A qubit or class index is out of range, duplicated or overlapping."""


class ShapeError(QuantumClassifierError, ValueError):
    """Array shapes, arities or dimensions do not agree."""


class NumericError(QuantumClassifierError, ArithmeticError):
    """A non-finite value or invalid numeric argument was encountered."""


class DataError(QuantumClassifierError, ValueError):
    """Input data is insufficient or inconsistent."""


class FormatError(DataError):
    """A binary container is malformed.

    ``offset`` is the byte position at which parsing failed.
    """

    def __init__(self, message, offset):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class ConfigError(QuantumClassifierError, ValueError):
    """A configuration file or command-line value is invalid."""


class AuditError(QuantumClassifierError):
    """The decomposed circuit disagrees with the direct circuit."""

    def __init__(self, message, control_value=None):
        where = "full circuit" if control_value is None else f"control value {control_value}"
        super().__init__(f"{message} [{where}]")
        self.control_value = control_value
