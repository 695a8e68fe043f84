"""Exception types shared across the toolkit."""

from __future__ import annotations


class GsemError(Exception):
    """Base class for every error raised by gsemkit."""


class FormulaSyntaxError(GsemError, ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")

    def pointer(self) -> str:
        """Two-line rendering of the input with a caret under the offending column."""
        return f"{self.text}\n{' ' * self.position}^"


class UnknownVariable(GsemError, KeyError):
    def __init__(self, var: str):
        self.var = var
        super().__init__(var)

    def __str__(self) -> str:
        return f"unknown variable {self.var!r}"


class OutOfRangeValue(GsemError, ValueError):
    def __init__(self, var: str, value: str):
        self.var = var
        self.value = value
        super().__init__(f"value {value!r} is not in the range of {var!r}")


class DisallowedIntervention(GsemError, ValueError):
    def __init__(self, intervention):
        self.intervention = intervention
        super().__init__(f"intervention [{intervention}] is not allowed by the signature")


class SignatureMismatch(GsemError, ValueError):
    pass


class SignatureError(GsemError, ValueError):
    """Malformed signature (duplicate names, empty ranges and so on)."""


class ModelFormatError(GsemError, ValueError):
    pass


class CapExceeded(GsemError):
    def __init__(self, count: int, cap: int, what: str = "models"):
        self.count = count
        self.cap = cap
        super().__init__(f"{count} {what} exceeds the cap of {cap}")


class NotInLanguage(GsemError, ValueError):
    """An axiom instance would mention an intervention the signature does not allow."""


class BadParams(GsemError, ValueError):
    pass


class TooManyAtoms(GsemError, ValueError):
    def __init__(self, count: int, limit: int):
        self.count = count
        self.limit = limit
        super().__init__(f"{count} atoms exceeds the truth-table limit of {limit}")


class BadStep(GsemError):
    def __init__(self, index: int, reason: str):
        self.index = index
        self.reason = reason
        super().__init__(f"step {index + 1}: {reason}")
