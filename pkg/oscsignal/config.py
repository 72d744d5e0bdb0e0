from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict

from .errors import ConfigError

DEFAULT_MAX_P = 101

# Tolerances
DEFAULT_TOLERANCE = 1e-9
UNIT_TOLERANCE = 1e-10
SNAP_TOLERANCE = 1e-6
ZERO_TOLERANCE = 1e-8
OVERLAP_TOLERANCE = 1e-8
AMBIGUITY_GAP = 1e-6

DEFAULT_PAIR_BUDGET = 10**7
DEFAULT_SEED = 0

SYSTEM_KINDS = ("heisenberg", "split", "nonsplit", "oscillator", "extended", "standard")
FORMATS = ("json", "bin")
BOUND_MODES = ("auto", "oscillator", "heisenberg")

THREADS_ENV = "OSC_THREADS"


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if raw:
        try:
            value = int(raw)
        except ValueError as exc:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
        if value < 1:
            raise ConfigError(f"{THREADS_ENV} must be >= 1, got {value}")
        return value
    return os.cpu_count() or 1


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


@dataclass(frozen=True)
class RunConfig:
    """Validated command-line configuration, echoed into every artifact."""

    command: str
    p: int | None = None
    system: str = "oscillator"
    out: str | None = None
    format: str = "json"
    tolerance: float = DEFAULT_TOLERANCE
    pair_budget: int = DEFAULT_PAIR_BUDGET
    seed: int = DEFAULT_SEED
    threads: int = 1
    strict: bool = False
    bounds: str = "auto"
    max_p: int = DEFAULT_MAX_P
    extra: Dict[str, Any] = field(default_factory=dict)

    def validate(self) -> "RunConfig":
        if self.p is not None:
            if not is_prime(self.p) or self.p == 2:
                raise ConfigError(f"p must be an odd prime, got {self.p}")
            if self.p > self.max_p:
                raise ConfigError(f"p must be <= {self.max_p}, got {self.p}")
        if self.system not in SYSTEM_KINDS:
            raise ConfigError(f"Unsupported system '{self.system}'. Choose from: {', '.join(SYSTEM_KINDS)}.")
        if self.format not in FORMATS:
            raise ConfigError(f"Unsupported format '{self.format}'. Choose from: {', '.join(FORMATS)}.")
        if self.bounds not in BOUND_MODES:
            raise ConfigError(f"Unsupported bounds '{self.bounds}'. Choose from: {', '.join(BOUND_MODES)}.")
        if not 0 < self.tolerance < 1:
            raise ConfigError(f"tolerance must be in (0, 1), got {self.tolerance}")
        if self.pair_budget < 1:
            raise ConfigError(f"pair_budget must be >= 1, got {self.pair_budget}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        return self

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
