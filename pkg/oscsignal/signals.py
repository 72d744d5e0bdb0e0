from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Sequence

import numpy as np

from .config import UNIT_TOLERANCE
from .errors import ModulusMismatch


def _frozen_complex(values: Any, shape_hint: str) -> np.ndarray:
    array = np.array(values, dtype=np.complex128, copy=True)
    if array.ndim == 0:
        raise ValueError(f"{shape_hint} must be an array, got a scalar")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Signal:
    """A vector in C(F_p) tagged with where it came from."""

    coeffs: np.ndarray
    p: int
    provenance: Dict[str, Any] = field(default_factory=dict)
    unit: bool = True

    def __post_init__(self) -> None:
        coeffs = _frozen_complex(self.coeffs, "coeffs")
        if coeffs.shape != (self.p,):
            raise ValueError(f"Signal over F_{self.p} needs {self.p} coefficients, got shape {coeffs.shape}")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "provenance", dict(self.provenance))
        if self.unit and abs(self.norm() - 1.0) > UNIT_TOLERANCE:
            raise ValueError(f"Signal marked unit has norm {self.norm():.3e}")

    @classmethod
    def delta(cls, a: int, p: int) -> "Signal":
        coeffs = np.zeros(p, dtype=np.complex128)
        coeffs[a % p] = 1.0
        return cls(coeffs, p, {"family": "delta", "a": a % p})

    @classmethod
    def external(cls, coeffs: Any, p: int, *, unit: bool = False, **tags: Any) -> "Signal":
        return cls(coeffs, p, {"family": "external", **tags}, unit=unit)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def inner(self, other: "Signal | np.ndarray") -> complex:
        """<self, other> = sum_t self(t) * conj(other(t))."""
        values = other.coeffs if isinstance(other, Signal) else np.asarray(other)
        if isinstance(other, Signal) and other.p != self.p:
            raise ModulusMismatch(f"cannot pair signals over F_{self.p} and F_{other.p}")
        return complex(np.dot(self.coeffs, np.conj(values)))

    def sup(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def papr(self) -> float:
        return float(self.p * self.sup() ** 2 / max(self.norm() ** 2, 1e-300))

    def with_coeffs(self, coeffs: np.ndarray, *, unit: bool | None = None, **tags: Any) -> "Signal":
        provenance = {**self.provenance, **tags}
        return Signal(coeffs, self.p, provenance, unit=self.unit if unit is None else unit)


@dataclass(frozen=True, eq=False)
class UnitaryOperator:
    """A dense p x p complex matrix acting on C(F_p)."""

    entries: np.ndarray
    p: int

    def __post_init__(self) -> None:
        entries = _frozen_complex(self.entries, "entries")
        if entries.shape != (self.p, self.p):
            raise ValueError(f"operator over F_{self.p} must be {self.p}x{self.p}, got {entries.shape}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def identity(cls, p: int) -> "UnitaryOperator":
        return cls(np.eye(p, dtype=np.complex128), p)

    def _check(self, other_p: int) -> None:
        if other_p != self.p:
            raise ModulusMismatch(f"cannot compose operators over F_{self.p} and F_{other_p}")

    def __matmul__(self, other: Any) -> Any:
        if isinstance(other, UnitaryOperator):
            self._check(other.p)
            return UnitaryOperator(self.entries @ other.entries, self.p)
        if isinstance(other, Signal):
            self._check(other.p)
            return other.with_coeffs(self.entries @ other.coeffs)
        return self.entries @ np.asarray(other)

    def apply(self, signal: Signal) -> Signal:
        return self @ signal

    def adjoint(self) -> "UnitaryOperator":
        return UnitaryOperator(self.entries.conj().T, self.p)

    def power(self, n: int) -> "UnitaryOperator":
        if n < 0:
            return self.adjoint().power(-n)
        return UnitaryOperator(np.linalg.matrix_power(self.entries, n), self.p)

    def scaled(self, scalar: complex) -> "UnitaryOperator":
        return UnitaryOperator(scalar * self.entries, self.p)

    def distance(self, other: "UnitaryOperator | np.ndarray") -> float:
        entries = other.entries if isinstance(other, UnitaryOperator) else np.asarray(other)
        return float(np.linalg.norm(self.entries - entries))

    def unitarity_residual(self) -> float:
        return float(np.linalg.norm(self.entries @ self.entries.conj().T - np.eye(self.p)))


def provenance_key(provenance: Dict[str, Any]) -> str:
    return json.dumps(provenance, sort_keys=True, separators=(",", ":"))


@dataclass(eq=False)
class SignalDictionary:
    """An ordered, provenance-tagged collection of unit signals over one F_p."""

    coeffs: np.ndarray
    provenance: List[Dict[str, Any]]
    system_kind: str
    p: int
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        coeffs = np.array(self.coeffs, dtype=np.complex128, copy=True).reshape(-1, self.p)
        coeffs.setflags(write=False)
        self.coeffs = coeffs
        if len(self.provenance) != coeffs.shape[0]:
            raise ValueError(
                f"{coeffs.shape[0]} signals but {len(self.provenance)} provenance records"
            )
        self.provenance = [dict(item) for item in self.provenance]

    @classmethod
    def from_signals(
        cls,
        signals: Sequence[Signal],
        system_kind: str,
        p: int,
        metadata: Dict[str, Any] | None = None,
    ) -> "SignalDictionary":
        for signal in signals:
            if signal.p != p:
                raise ModulusMismatch(f"signal over F_{signal.p} in a dictionary over F_{p}")
        coeffs = np.array([s.coeffs for s in signals], dtype=np.complex128).reshape(-1, p)
        return cls(coeffs, [s.provenance for s in signals], system_kind, p, dict(metadata or {}))

    def __len__(self) -> int:
        return self.coeffs.shape[0]

    def __getitem__(self, index: int) -> Signal:
        return Signal(self.coeffs[index], self.p, self.provenance[index])

    def __iter__(self) -> Iterator[Signal]:
        for index in range(len(self)):
            yield self[index]

    @property
    def signals(self) -> List[Signal]:
        return list(self)

    @property
    def dictionary_id(self) -> str:
        digest = hashlib.sha256()
        digest.update(f"{self.system_kind}:{self.p}:".encode())
        digest.update(np.ascontiguousarray(self.coeffs, dtype="<c16").tobytes())
        return digest.hexdigest()[:16]

    def indices_where(self, **criteria: Any) -> np.ndarray:
        hits = [
            i
            for i, prov in enumerate(self.provenance)
            if all(prov.get(key) == value for key, value in criteria.items())
        ]
        return np.asarray(hits, dtype=np.int64)

    def select(self, indices: Sequence[int] | np.ndarray, system_kind: str | None = None) -> "SignalDictionary":
        idx = np.asarray(indices, dtype=np.int64)
        return SignalDictionary(
            self.coeffs[idx],
            [self.provenance[i] for i in idx],
            system_kind or self.system_kind,
            self.p,
            dict(self.metadata),
        )

    def norm_residual(self) -> float:
        if not len(self):
            return 0.0
        return float(np.max(np.abs(np.linalg.norm(self.coeffs, axis=1) - 1.0)))

    def duplicate_provenance(self) -> List[str]:
        seen: Dict[str, int] = {}
        dupes = []
        for prov in self.provenance:
            key = provenance_key(prov)
            seen[key] = seen.get(key, 0) + 1
            if seen[key] == 2:
                dupes.append(key)
        return dupes

    def validate(self, tolerance: float = UNIT_TOLERANCE) -> "SignalDictionary":
        residual = self.norm_residual()
        if residual > tolerance:
            raise ValueError(f"dictionary has a non-unit signal (norm residual {residual:.3e})")
        dupes = self.duplicate_provenance()
        if dupes:
            raise ValueError(f"duplicate provenance keys: {dupes[:3]}")
        return self
