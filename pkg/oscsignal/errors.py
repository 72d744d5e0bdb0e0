from __future__ import annotations

from typing import Any, Dict


class OscillatorError(Exception):
    """Root of every error raised by oscsignal."""


class ConfigError(OscillatorError, ValueError):
    pass


class InvalidModulus(OscillatorError, ValueError):
    pass


class DivisionByZero(OscillatorError, ZeroDivisionError):
    pass


class ModulusMismatch(OscillatorError, ValueError):
    pass


class NotUnimodular(OscillatorError, ValueError):
    pass


class ZeroScaling(OscillatorError, ValueError):
    pass


class DegenerateEigenspace(OscillatorError, RuntimeError):
    pass


class SnapFailure(OscillatorError, RuntimeError):
    pass


class NotCyclic(OscillatorError, RuntimeError):
    pass


class WeilConstructionError(OscillatorError, RuntimeError):
    pass


class AmbiguousPeak(OscillatorError, RuntimeError):
    """Top two matched-filter magnitudes are too close to call."""

    def __init__(self, message: str, witnesses: list[Dict[str, Any]]) -> None:
        super().__init__(message)
        self.witnesses = witnesses


class DecodeMarginBelowThreshold(OscillatorError, RuntimeError):
    def __init__(self, message: str, interference: float, threshold: float) -> None:
        super().__init__(message)
        self.interference = interference
        self.threshold = threshold


class DictionaryFormatError(OscillatorError, ValueError):
    def __init__(self, message: str, offset: int | None = None) -> None:
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset
