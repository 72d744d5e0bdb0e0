from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Sequence, Tuple

import numpy as np

from .config import DEFAULT_TOLERANCE, SNAP_TOLERANCE
from .errors import SnapFailure
from .field import FieldLike, PrimeModulus, discrete_log_table, primitive_root, psi
from .heisenberg import heisenberg_system
from .signals import Signal, SignalDictionary
from .spectrum import PHASE_CONVENTION, snap_spectrum
from .tori import NONSPLIT, SPLIT, Torus, normalize_kind, torus_catalog
from .weil import calibrate, weil_operator

logger = logging.getLogger(__name__)

SYSTEM_NAMES: Dict[str, str] = {
    SPLIT: "split-oscillator",
    NONSPLIT: "nonsplit-oscillator",
    "both": "oscillator",
}

CHARACTER_CONVENTION = "chi_k(g0^m) = exp(2 pi i k m / |T|)"


@dataclass(frozen=True, order=True)
class CharacterIndex:
    """Character k of a torus, relative to that torus's chosen generator."""

    torus_id: int
    k: int
    order: int

    def __post_init__(self) -> None:
        if not 0 <= self.k < self.order:
            raise ValueError(f"character index must lie in [0, {self.order}), got {self.k}")

    @property
    def is_sigma(self) -> bool:
        return 2 * self.k == self.order

    def value(self, m: int) -> complex:
        """chi_k(g0^m)."""
        return complex(np.exp(2j * np.pi * self.k * m / self.order))


# ────────────────────────────────────────────────
# Model system B_std
# ────────────────────────────────────────────────
def dilate(a: FieldLike, signal: Signal) -> Signal:
    """(D_a s)(t) = s(a t); a multiplicative character chi satisfies D_a chi = chi(a) chi."""
    p = signal.p
    return signal.with_coeffs(signal.coeffs[(int(a) * np.arange(p)) % p])


def multiplicative_character(k: int, p: int) -> np.ndarray:
    """chi_k on F_p with chi_k(r^m) = exp(2 pi i k m / (p - 1)) for the smallest primitive root r, 0 at t = 0."""
    logs = np.asarray(discrete_log_table(p)[1:], dtype=np.int64)
    values = np.zeros(p, dtype=np.complex128)
    values[1:] = np.exp(2j * np.pi * k * logs / (p - 1))
    return values


def standard_basis_system(p: int) -> SignalDictionary:
    """The p - 2 nontrivial multiplicative characters, normalised by 1/sqrt(p - 1)."""
    PrimeModulus(p)
    signals = [
        Signal(multiplicative_character(k, p) / np.sqrt(p - 1), p, {"family": "standard", "k": k})
        for k in range(1, p - 1)
    ]
    metadata = {
        "primitive_root": primitive_root(p),
        "character_convention": "chi_k(r^m) = exp(2 pi i k m / (p - 1))",
        "phase_convention": PHASE_CONVENTION,
    }
    return SignalDictionary.from_signals(signals, "standard", p, metadata)


# ────────────────────────────────────────────────
# Torus eigenbases
# ────────────────────────────────────────────────
@dataclass(frozen=True)
class TorusBasis:
    torus: Torus
    entries: List[Tuple[CharacterIndex, Signal]]
    multiplicities: List[int]
    max_residual: float

    @property
    def signals(self) -> List[Signal]:
        return [signal for _, signal in self.entries]

    def summary(self) -> Dict[str, Any]:
        return {
            **self.torus.to_dict(),
            "characters": [index.k for index, _ in self.entries],
            "multiplicities": list(self.multiplicities),
            "missing": [k for k, m in enumerate(self.multiplicities) if m == 0],
            "degenerate": [k for k, m in enumerate(self.multiplicities) if m > 1],
            "max_residual": self.max_residual,
        }


def _torus_basis(
    torus: Torus,
    *,
    snap_tolerance: float = SNAP_TOLERANCE,
    residual_tolerance: float = DEFAULT_TOLERANCE,
) -> TorusBasis:
    generator = weil_operator(torus.generator)
    try:
        spectrum = snap_spectrum(
            generator.entries,
            torus.order,
            snap_tolerance=snap_tolerance,
            residual_tolerance=residual_tolerance,
        )
    except SnapFailure as exc:
        raise SnapFailure(f"torus {torus.torus_id} ({torus.kind}, generator {torus.generator.as_tuple()}): {exc}") from exc

    entries = []
    for k in spectrum.simple_characters():
        index = CharacterIndex(torus.torus_id, k, torus.order)
        if torus.kind == SPLIT and index.is_sigma:
            continue
        provenance = {"family": torus.kind, "torus": torus.torus_id, "k": k, "order": torus.order}
        entries.append((index, Signal(spectrum.vectors[k], torus.p, provenance)))
    multiplicities = [spectrum.multiplicities[k] for k in range(torus.order)]
    return TorusBasis(torus, entries, multiplicities, spectrum.max_residual)


def torus_eigenbasis(
    torus: Torus,
    *,
    snap_tolerance: float = SNAP_TOLERANCE,
    residual_tolerance: float = DEFAULT_TOLERANCE,
) -> List[Tuple[CharacterIndex, Signal]]:
    """
    One phase-fixed unit eigenvector of rho(g0) per one-dimensional
    eigenspace, ordered by character index. The sigma character of a split
    torus is always left out.
    """
    return _torus_basis(torus, snap_tolerance=snap_tolerance, residual_tolerance=residual_tolerance).entries


def _collisions(coeffs: np.ndarray, decimals: int = 8) -> List[List[int]]:
    """Index pairs whose phase-fixed coefficients agree to `decimals` places."""
    rounded = np.round(coeffs, decimals) + (0.0 + 0.0j)
    seen: Dict[bytes, int] = {}
    pairs = []
    for i, row in enumerate(rounded):
        key = row.tobytes()
        if key in seen:
            pairs.append([seen[key], i])
        else:
            seen[key] = i
    return pairs


def build_oscillator_system(
    p: int,
    kind: str = "both",
    *,
    threads: int = 1,
    snap_tolerance: float = SNAP_TOLERANCE,
    residual_tolerance: float = DEFAULT_TOLERANCE,
) -> SignalDictionary:
    """S_O^s, S_O^ns or their union S_O, sorted by torus id then character."""
    kind = "both" if kind in ("both", "oscillator", "all") else normalize_kind(kind)
    catalog = torus_catalog(p)
    tori = catalog.by_kind(kind)
    calibration = calibrate(p)

    def job(torus: Torus) -> TorusBasis:
        return _torus_basis(torus, snap_tolerance=snap_tolerance, residual_tolerance=residual_tolerance)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        bases = list(pool.map(job, tori))
    bases.sort(key=lambda basis: basis.torus.torus_id)
    signals = [signal for basis in bases for signal in basis.signals]

    coeffs = np.array([s.coeffs for s in signals], dtype=np.complex128).reshape(-1, p)
    collisions = _collisions(coeffs)
    if collisions:
        logger.warning("%d signal pairs coincide up to phase over F_%d", len(collisions), p)

    form_torus = catalog.form_preserving_torus()
    metadata = {
        "kind": kind,
        "tori": [basis.summary() for basis in bases],
        "counts": {
            SPLIT: sum(len(b.entries) for b in bases if b.torus.kind == SPLIT),
            NONSPLIT: sum(len(b.entries) for b in bases if b.torus.kind == NONSPLIT),
        },
        "standard_torus": catalog.standard_torus().torus_id,
        "weyl_torus": catalog.weyl_torus().torus_id,
        "form_preserving_torus": None if form_torus is None else form_torus.torus_id,
        "calibration": calibration.to_dict(),
        "character_convention": CHARACTER_CONVENTION,
        "phase_convention": PHASE_CONVENTION,
        "collisions": collisions,
    }
    logger.debug(
        "oscillator system over F_%d (%s): %d tori, %d signals", p, kind, len(bases), len(signals)
    )
    return SignalDictionary.from_signals(signals, SYSTEM_NAMES[kind], p, metadata)


# ────────────────────────────────────────────────
# Extended system S_E
# ────────────────────────────────────────────────
class ExtendedDictionary:
    """
    All translates M_w L_tau phi of a base dictionary, addressed lazily.

    Index i maps to base i // p^2, tau (i % p^2) // p and w i % p, so the
    (0, 0) translates sit at multiples of p^2.
    """

    system_kind = "extended"

    def __init__(self, base: SignalDictionary) -> None:
        self.base = base
        self.p = base.p
        self.metadata: Dict[str, Any] = {
            **base.metadata,
            "base_system_kind": base.system_kind,
            "base_size": len(base),
        }

    def __len__(self) -> int:
        return len(self.base) * self.p * self.p

    def key(self, index: int) -> Tuple[int, int, int]:
        if not 0 <= index < len(self):
            raise IndexError(f"extended index {index} out of range for {len(self)} signals")
        p2 = self.p * self.p
        return index // p2, (index % p2) // self.p, index % self.p

    def index(self, base_id: int, tau: int, w: int) -> int:
        return (base_id * self.p + tau % self.p) * self.p + w % self.p

    def coeffs_for(self, indices: Sequence[int] | np.ndarray) -> np.ndarray:
        """Coefficient rows for a batch of extended indices."""
        idx = np.asarray(indices, dtype=np.int64)
        p, p2 = self.p, self.p * self.p
        base_ids, tau, w = idx // p2, (idx % p2) // p, idx % p
        t = np.arange(p)
        shifted = self.base.coeffs[base_ids[:, None], (t[None, :] + tau[:, None]) % p]
        return psi(w[:, None] * t[None, :], p) * shifted

    def __getitem__(self, index: int) -> Signal:
        base_id, tau, w = self.key(index)
        provenance = {**self.base.provenance[base_id], "base": base_id, "tau": tau, "w": w}
        return Signal(self.coeffs_for([index])[0], self.p, provenance)

    def __iter__(self) -> Iterator[Signal]:
        for index in range(len(self)):
            yield self[index]

    def materialize(self, indices: Sequence[int] | np.ndarray | None = None) -> SignalDictionary:
        idx = np.arange(len(self)) if indices is None else np.asarray(indices, dtype=np.int64)
        provenance = []
        for i in idx.tolist():
            base_id, tau, w = self.key(i)
            provenance.append({**self.base.provenance[base_id], "base": base_id, "tau": tau, "w": w})
        return SignalDictionary(self.coeffs_for(idx), provenance, self.system_kind, self.p, dict(self.metadata))


def extended_system(dictionary: SignalDictionary) -> ExtendedDictionary:
    return ExtendedDictionary(dictionary)


def build_system(p: int, system: str, *, threads: int = 1) -> SignalDictionary | ExtendedDictionary:
    """Dispatch on a command-line system name."""
    if system == "heisenberg":
        return heisenberg_system(p, threads=threads)
    if system == "standard":
        return standard_basis_system(p)
    if system == "split":
        return build_oscillator_system(p, SPLIT, threads=threads)
    if system == "nonsplit":
        return build_oscillator_system(p, NONSPLIT, threads=threads)
    if system == "oscillator":
        return build_oscillator_system(p, "both", threads=threads)
    if system == "extended":
        return extended_system(build_oscillator_system(p, "both", threads=threads))
    raise ValueError(f"Unsupported system '{system}'.")
