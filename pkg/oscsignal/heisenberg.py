from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

import numpy as np

from .config import DEFAULT_TOLERANCE, SNAP_TOLERANCE
from .errors import DegenerateEigenspace, ModulusMismatch
from .field import FieldLike, PrimeModulus, half, psi
from .signals import Signal, SignalDictionary, UnitaryOperator
from .spectrum import PHASE_CONVENTION, snap_spectrum

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def _checked(p: int) -> int:
    return PrimeModulus(p).p


# ────────────────────────────────────────────────
# Heisenberg group H = V x F_p
# ────────────────────────────────────────────────
@dataclass(frozen=True)
class HeisenbergElement:
    """(tau, w, z) with the twisted product z + z' + 1/2 (tau w' - tau' w)."""

    tau: int
    w: int
    z: int
    p: int

    def __post_init__(self) -> None:
        p = _checked(int(self.p))
        object.__setattr__(self, "p", p)
        for name in ("tau", "w", "z"):
            object.__setattr__(self, name, int(getattr(self, name)) % p)

    @classmethod
    def identity(cls, p: int) -> "HeisenbergElement":
        return cls(0, 0, 0, p)

    @classmethod
    def from_field(cls, tau: FieldLike, w: FieldLike, z: FieldLike, p: int) -> "HeisenbergElement":
        return cls(int(tau), int(w), int(z), p)

    @property
    def v(self) -> Tuple[int, int]:
        """Projection to the time-frequency plane."""
        return (self.tau, self.w)

    def __mul__(self, other: "HeisenbergElement") -> "HeisenbergElement":
        return h_mul(self, other)

    def inverse(self) -> "HeisenbergElement":
        return HeisenbergElement(-self.tau, -self.w, -self.z, self.p)


def h_mul(h1: HeisenbergElement, h2: HeisenbergElement) -> HeisenbergElement:
    if h1.p != h2.p:
        raise ModulusMismatch(f"cannot multiply elements of H over F_{h1.p} and F_{h2.p}")
    p = h1.p
    cocycle = half(p) * (h1.tau * h2.w - h2.tau * h1.w)
    return HeisenbergElement(h1.tau + h2.tau, h1.w + h2.w, h1.z + h2.z + cocycle, p)


# ────────────────────────────────────────────────
# Time / phase shifts and the representation pi
# ────────────────────────────────────────────────
def time_shift(tau: FieldLike, signal: Signal) -> Signal:
    """(L_tau s)(t) = s(t + tau)."""
    shift = int(tau) % signal.p
    return signal.with_coeffs(np.roll(signal.coeffs, -shift))


def phase_shift(w: FieldLike, signal: Signal) -> Signal:
    """(M_w s)(t) = psi(w t) s(t)."""
    p = signal.p
    return signal.with_coeffs(psi(int(w) * np.arange(p), p) * signal.coeffs)


def _pi_scalar(h: HeisenbergElement) -> complex:
    # psi(1/2 tau w + z) M_w L_tau == psi(-1/2 tau w + z) L_tau M_w
    return complex(psi(half(h.p) * h.tau * h.w + h.z, h.p))


def apply_pi(h: HeisenbergElement, coeffs: np.ndarray) -> np.ndarray:
    """Matrix-free pi(h) on a coefficient vector (or a stack of them along the last axis)."""
    p = h.p
    t = np.arange(p)
    shifted = np.take(np.asarray(coeffs), (t + h.tau) % p, axis=-1)
    return _pi_scalar(h) * psi(h.w * t, p) * shifted


@lru_cache(maxsize=1024)
def _pi_entries(tau: int, w: int, z: int, p: int) -> np.ndarray:
    h = HeisenbergElement(tau, w, z, p)
    t = np.arange(p)
    entries = np.zeros((p, p), dtype=np.complex128)
    entries[t, (t + tau) % p] = _pi_scalar(h) * psi(w * t, p)
    entries.setflags(write=False)
    return entries


def pi(h: HeisenbergElement) -> UnitaryOperator:
    """The Heisenberg representation as a dense unitary."""
    return UnitaryOperator(_pi_entries(h.tau, h.w, h.z, h.p), h.p)


def matrix_coefficient(phi: Signal, psi_signal: Signal, h: HeisenbergElement) -> complex:
    """m_{phi,psi}(h) = <phi, pi(h) psi>."""
    if phi.p != psi_signal.p or phi.p != h.p:
        raise ModulusMismatch("matrix coefficient needs signals and h over the same F_p")
    return complex(np.dot(phi.coeffs, np.conj(apply_pi(h, psi_signal.coeffs))))


def ambiguity(phi: Signal, h: HeisenbergElement) -> complex:
    return matrix_coefficient(phi, phi, h)


# ────────────────────────────────────────────────
# Lines and the chirp system S_H
# ────────────────────────────────────────────────
@dataclass(frozen=True)
class Line:
    """A line through 0 in V, stored by its canonical direction."""

    alpha: int
    beta: int
    p: int

    def __post_init__(self) -> None:
        p = _checked(int(self.p))
        alpha, beta = int(self.alpha) % p, int(self.beta) % p
        if alpha == 0 and beta == 0:
            raise ValueError("a line needs a nonzero direction")
        scale = pow(alpha if alpha else beta, p - 2, p)
        object.__setattr__(self, "alpha", alpha * scale % p)
        object.__setattr__(self, "beta", beta * scale % p)
        object.__setattr__(self, "p", p)

    @property
    def direction(self) -> Tuple[int, int]:
        return (self.alpha, self.beta)

    @property
    def index(self) -> int:
        return self.beta if self.alpha == 1 else self.p

    def generator(self) -> HeisenbergElement:
        return HeisenbergElement(self.alpha, self.beta, 0, self.p)

    def points(self) -> List[Tuple[int, int]]:
        return [(k * self.alpha % self.p, k * self.beta % self.p) for k in range(self.p)]

    def contains(self, tau: int, w: int) -> bool:
        # (tau, w) is on the line iff it is parallel to the direction
        return (tau * self.beta - w * self.alpha) % self.p == 0

    def indicator(self) -> np.ndarray:
        """p x p table [tau, w] of 1 on the line and 0 off it."""
        table = np.zeros((self.p, self.p))
        for tau, w in self.points():
            table[tau, w] = 1.0
        return table


def enumerate_lines(p: int) -> List[Line]:
    """(1, s) for s = 0..p-1, then (0, 1)."""
    return [Line(1, s, p) for s in range(p)] + [Line(0, 1, p)]


def heisenberg_basis(
    line: Line,
    *,
    snap_tolerance: float = SNAP_TOLERANCE,
    residual_tolerance: float = DEFAULT_TOLERANCE,
) -> List[Signal]:
    """Orthonormal common eigenvectors of pi(L), one per character of L, ordered by k."""
    p = line.p
    spectrum = snap_spectrum(
        pi(line.generator()).entries,
        p,
        snap_tolerance=snap_tolerance,
        residual_tolerance=residual_tolerance,
    )
    degenerate = {k: m for k, m in spectrum.multiplicities.items() if m != 1}
    if degenerate:
        raise DegenerateEigenspace(f"line {line.direction} has non-simple characters {degenerate}")
    return [
        Signal(
            spectrum.vectors[k],
            p,
            {"family": "line", "line": line.index, "direction": list(line.direction), "k": k},
        )
        for k in range(p)
    ]


def heisenberg_system(p: int, *, threads: int = 1) -> SignalDictionary:
    lines = enumerate_lines(p)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        bases = list(pool.map(heisenberg_basis, lines))
    signals = [signal for basis in bases for signal in basis]
    logger.debug("Heisenberg system over F_%d: %d lines, %d signals", p, len(lines), len(signals))
    metadata = {
        "lines": [{"line": line.index, "direction": list(line.direction)} for line in lines],
        "phase_convention": PHASE_CONVENTION,
    }
    return SignalDictionary.from_signals(signals, "heisenberg", p, metadata)
