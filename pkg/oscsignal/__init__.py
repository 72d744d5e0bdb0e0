from __future__ import annotations

from importlib import import_module
from typing import Any, Dict, Tuple

__version__ = "0.1.0"

__all__ = [
    "PrimeModulus",
    "FieldElement",
    "HeisenbergElement",
    "SL2Element",
    "Signal",
    "SignalDictionary",
    "heisenberg_system",
    "weil_operator",
    "TorusCatalog",
    "enumerate_tori",
    "build_oscillator_system",
    "standard_basis_system",
    "extended_system",
    "verify_dictionary",
    "radar_detect",
    "cdma_sweep",
    "load_dictionary",
    "save_dictionary",
    "run",
]

_LAZY_ATTRS: Dict[str, Tuple[str, str]] = {
    "PrimeModulus": ("oscsignal.field", "PrimeModulus"),
    "FieldElement": ("oscsignal.field", "FieldElement"),
    "HeisenbergElement": ("oscsignal.heisenberg", "HeisenbergElement"),
    "SL2Element": ("oscsignal.weil", "SL2Element"),
    "Signal": ("oscsignal.signals", "Signal"),
    "SignalDictionary": ("oscsignal.signals", "SignalDictionary"),
    "heisenberg_system": ("oscsignal.heisenberg", "heisenberg_system"),
    "weil_operator": ("oscsignal.weil", "weil_operator"),
    "TorusCatalog": ("oscsignal.tori", "TorusCatalog"),
    "enumerate_tori": ("oscsignal.tori", "enumerate_tori"),
    "build_oscillator_system": ("oscsignal.oscillator", "build_oscillator_system"),
    "standard_basis_system": ("oscsignal.oscillator", "standard_basis_system"),
    "extended_system": ("oscsignal.oscillator", "extended_system"),
    "verify_dictionary": ("oscsignal.analysis", "verify_dictionary"),
    "radar_detect": ("oscsignal.sims", "radar_detect"),
    "cdma_sweep": ("oscsignal.sims", "cdma_sweep"),
    "load_dictionary": ("oscsignal.storage", "load_dictionary"),
    "save_dictionary": ("oscsignal.storage", "save_dictionary"),
    "run": ("oscsignal.main", "run"),
}


def __getattr__(name: str) -> Any:
    try:
        module_name, attr_name = _LAZY_ATTRS[name]
    except KeyError as exc:
        raise AttributeError(f"module {__name__} has no attribute {name}") from exc

    module = import_module(module_name)
    value = getattr(module, attr_name)
    globals()[name] = value
    return value


def __dir__() -> list[str]:
    return sorted(set(__all__) | {"__version__"})
