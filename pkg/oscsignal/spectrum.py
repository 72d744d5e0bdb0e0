from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict

import numpy as np

from .config import DEFAULT_TOLERANCE, SNAP_TOLERANCE, ZERO_TOLERANCE
from .errors import SnapFailure

logger = logging.getLogger(__name__)

PHASE_CONVENTION = "first-nonzero-real-positive"


def fix_phase(vector: np.ndarray, zero_tolerance: float = ZERO_TOLERANCE) -> np.ndarray:
    """Rotate so the lowest-index coordinate above zero_tolerance is real and positive."""
    out = np.array(vector, dtype=np.complex128, copy=True)
    nonzero = np.flatnonzero(np.abs(out) > zero_tolerance)
    if nonzero.size == 0:
        return out
    anchor = nonzero[0]
    out *= np.conj(out[anchor]) / abs(out[anchor])
    out[anchor] = abs(out[anchor])
    return out


@dataclass(frozen=True)
class SnappedSpectrum:
    """Eigen-data of a finite-order unitary, indexed by k where lambda_k = exp(2 pi i k / order)."""

    order: int
    multiplicities: Dict[int, int]
    vectors: Dict[int, np.ndarray]
    max_snap_error: float
    max_residual: float

    def simple_characters(self) -> list[int]:
        return sorted(self.vectors)

    def eigenvalue(self, k: int) -> complex:
        return complex(np.exp(2j * np.pi * k / self.order))


def snap_spectrum(
    matrix: np.ndarray,
    order: int,
    *,
    snap_tolerance: float = SNAP_TOLERANCE,
    residual_tolerance: float = DEFAULT_TOLERANCE,
    zero_tolerance: float = ZERO_TOLERANCE,
) -> SnappedSpectrum:
    """
    Diagonalise a unitary of finite order, snap its eigenvalues onto the
    order-th roots of unity and keep one phase-fixed unit vector for every
    one-dimensional eigenspace.
    """
    values, vecs = np.linalg.eig(np.asarray(matrix))
    scaled = np.angle(values) * order / (2 * np.pi)
    nearest = np.rint(scaled)
    angular_error = np.abs(scaled - nearest) * 2 * np.pi / order
    modulus_error = np.abs(np.abs(values) - 1.0)
    worst = float(max(angular_error.max(initial=0.0), modulus_error.max(initial=0.0)))
    if worst > snap_tolerance:
        bad = int(np.argmax(np.maximum(angular_error, modulus_error)))
        raise SnapFailure(
            f"eigenvalue {values[bad]:.6g} is {worst:.3e} away from every {order}-th root of unity"
        )

    indices = nearest.astype(np.int64) % order
    multiplicities = {k: 0 for k in range(order)}
    for k in indices:
        multiplicities[int(k)] += 1

    vectors: Dict[int, np.ndarray] = {}
    max_residual = 0.0
    for k, count in multiplicities.items():
        if count != 1:
            continue
        column = vecs[:, int(np.flatnonzero(indices == k)[0])]
        column = fix_phase(column / np.linalg.norm(column), zero_tolerance)
        eigenvalue = np.exp(2j * np.pi * k / order)
        residual = float(np.linalg.norm(matrix @ column - eigenvalue * column))
        if residual > residual_tolerance:
            raise SnapFailure(f"eigenvector for k={k} has residual {residual:.3e}")
        max_residual = max(max_residual, residual)
        vectors[k] = column

    logger.debug(
        "snapped spectrum order=%d simple=%d snap_error=%.2e residual=%.2e",
        order,
        len(vectors),
        worst,
        max_residual,
    )
    return SnappedSpectrum(order, multiplicities, vectors, worst, max_residual)
