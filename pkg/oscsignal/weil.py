from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Tuple

import numpy as np

from .config import DEFAULT_TOLERANCE
from .errors import ModulusMismatch, NotUnimodular, WeilConstructionError, ZeroScaling
from .field import FieldLike, PrimeModulus, half, inverse_mod, legendre_table, primitive_root, psi
from .heisenberg import HeisenbergElement, pi
from .signals import UnitaryOperator

logger = logging.getLogger(__name__)


# ────────────────────────────────────────────────
# SL2(F_p)
# ────────────────────────────────────────────────
@dataclass(frozen=True, order=True)
class SL2Element:
    """Row-major [[a, b], [c, d]] with ad - bc = 1, acting on V by (tau, w) -> (a tau + b w, c tau + d w)."""

    a: int
    b: int
    c: int
    d: int
    p: int

    def __post_init__(self) -> None:
        p = int(self.p)
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, int(getattr(self, name)) % p)
        object.__setattr__(self, "p", p)
        if (self.a * self.d - self.b * self.c) % p != 1:
            raise NotUnimodular(
                f"[[{self.a},{self.b}],[{self.c},{self.d}]] has determinant "
                f"{(self.a * self.d - self.b * self.c) % p} mod {p}"
            )

    @classmethod
    def identity(cls, p: int) -> "SL2Element":
        return cls(1, 0, 0, 1, p)

    @classmethod
    def weyl(cls, p: int) -> "SL2Element":
        return cls(0, 1, -1, 0, p)

    @classmethod
    def diagonal(cls, a: FieldLike, p: int) -> "SL2Element":
        a = int(a) % p
        if a == 0:
            raise ZeroScaling("diag(a, 1/a) needs a != 0")
        return cls(a, 0, 0, inverse_mod(a, p), p)

    @classmethod
    def lower(cls, x: FieldLike, p: int) -> "SL2Element":
        return cls(1, 0, int(x), 1, p)

    @classmethod
    def upper(cls, x: FieldLike, p: int) -> "SL2Element":
        return cls(1, int(x), 0, 1, p)

    @classmethod
    def random(cls, rng: np.random.Generator, p: int) -> "SL2Element":
        """Uniform draw: uniform nonzero first column, then a uniform completion."""
        while True:
            a, c = (int(v) for v in rng.integers(0, p, size=2))
            if a or c:
                break
        if a:
            b = int(rng.integers(0, p))
            d = (1 + b * c) * inverse_mod(a, p)
        else:
            d = int(rng.integers(0, p))
            b = -inverse_mod(c, p)
        return cls(a, b, c, d, p)

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    @property
    def code(self) -> int:
        p = self.p
        return ((self.a * p + self.b) * p + self.c) * p + self.d

    @property
    def trace(self) -> int:
        return (self.a + self.d) % self.p

    def is_central(self) -> bool:
        return self.b == 0 and self.c == 0 and self.a == self.d and self.a in (1, self.p - 1)

    def __mul__(self, other: "SL2Element") -> "SL2Element":
        if other.p != self.p:
            raise ModulusMismatch(f"cannot multiply SL2(F_{self.p}) by SL2(F_{other.p})")
        return SL2Element(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            self.p,
        )

    __matmul__ = __mul__

    def inverse(self) -> "SL2Element":
        return SL2Element(self.d, -self.b, -self.c, self.a, self.p)

    def power(self, n: int) -> "SL2Element":
        if n < 0:
            return self.inverse().power(-n)
        result, base = SL2Element.identity(self.p), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def order(self) -> int:
        identity = SL2Element.identity(self.p)
        current, n = self, 1
        while current != identity:
            current = current * self
            n += 1
        return n

    def conjugate(self, by: "SL2Element") -> "SL2Element":
        """by * self * by^-1."""
        return by * self * by.inverse()

    def act(self, tau: int, w: int) -> Tuple[int, int]:
        return ((self.a * tau + self.b * w) % self.p, (self.c * tau + self.d * w) % self.p)

    def act_on(self, h: HeisenbergElement) -> HeisenbergElement:
        tau, w = self.act(h.tau, h.w)
        return HeisenbergElement(tau, w, h.z, h.p)


def bruhat_decomposition(g: SL2Element) -> List[Tuple[str, int]]:
    """
    Factor g into lower unipotents n(x) = [[1,0],[x,1]], diagonals h(y) and the Weyl element.

    b != 0: g = n(d/b) w h(1/b) n(a/b);  b == 0: g = h(a) n(ac).
    """
    p = g.p
    if g.b:
        binv = inverse_mod(g.b, p)
        return [
            ("lower", g.d * binv % p),
            ("weyl", 0),
            ("diagonal", binv),
            ("lower", g.a * binv % p),
        ]
    return [("diagonal", g.a), ("lower", g.a * g.c % p)]


def compose(factors: Iterable[Tuple[str, int]], p: int) -> SL2Element:
    builders = {
        "lower": lambda x: SL2Element.lower(x, p),
        "diagonal": lambda y: SL2Element.diagonal(y, p),
        "weyl": lambda _: SL2Element.weyl(p),
    }
    result = SL2Element.identity(p)
    for name, value in factors:
        result = result * builders[name](value)
    return result


# ────────────────────────────────────────────────
# Generators
# ────────────────────────────────────────────────
def _scaling_entries(a: int, p: int) -> np.ndarray:
    a %= p
    if a == 0:
        raise ZeroScaling("rho_a needs a != 0")
    entries = np.zeros((p, p), dtype=np.complex128)
    t = np.arange(p)
    # (rho_a phi)(t) = sigma(a) phi(a^-1 t)
    entries[t, t * inverse_mod(a, p) % p] = legendre_table(p)[a]
    return entries


def _lower_entries(x: int, p: int, sign: int) -> np.ndarray:
    t = np.arange(p)
    return np.diag(psi(sign * x * half(p) * t * t, p))


def _fourier_entries(p: int, nu: complex) -> np.ndarray:
    t = np.arange(p)
    return nu / np.sqrt(p) * psi(np.outer(t, t), p)


def rho_scaling(a: FieldLike, p: int) -> UnitaryOperator:
    """rho_a phi(t) = sigma(a) phi(a^-1 t)."""
    return UnitaryOperator(_scaling_entries(int(a), p), p)


def rho_quadmod(p: int) -> UnitaryOperator:
    """rho_T phi(t) = psi(t^2) phi(t)."""
    t = np.arange(p)
    return UnitaryOperator(np.diag(psi(t * t, p)), p)


def rho_fourier(p: int, nu: complex | None = None) -> UnitaryOperator:
    """rho_S phi(t) = nu / sqrt(p) sum_s psi(ts) phi(s), nu calibrated unless given."""
    if nu is None:
        nu = calibrate(p).nu
    return UnitaryOperator(_fourier_entries(p, nu), p)


def parity_operator(p: int) -> UnitaryOperator:
    t = np.arange(p)
    entries = np.zeros((p, p), dtype=np.complex128)
    entries[t, (-t) % p] = 1.0
    return UnitaryOperator(entries, p)


def gauss_sum_nu(p: int) -> complex:
    """sum_t psi(t^2) / sqrt(p); equals 1 for p = 1 mod 4 and i for p = 3 mod 4."""
    t = np.arange(p)
    return complex(np.sum(psi(t * t, p)) / np.sqrt(p))


def weyl_torus_kind(p: int) -> str:
    # tr(w)^2 - 4 = -4, a square iff -1 is
    return "split" if legendre_table(p)[(-4) % p] == 1 else "non-split"


# ────────────────────────────────────────────────
# Calibration of nu and the unipotent sign
# ────────────────────────────────────────────────
@dataclass(frozen=True)
class WeilCalibration:
    p: int
    nu: complex
    unipotent_sign: int
    projective: bool
    homomorphism_residual: float
    egorov_residual: float

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "nu": [self.nu.real, self.nu.imag],
            "unipotent_sign": self.unipotent_sign,
            "projective": self.projective,
            "homomorphism_residual": self.homomorphism_residual,
            "egorov_residual": self.egorov_residual,
        }


NU_CANDIDATES: Tuple[complex, ...] = (1.0 + 0j, -1.0 + 0j, 1j, -1j)


def _assemble(g: SL2Element, nu: complex, sign: int) -> np.ndarray:
    p = g.p
    result = np.eye(p, dtype=np.complex128)
    for name, value in bruhat_decomposition(g):
        if name == "lower":
            factor = _lower_entries(value, p, sign)
        elif name == "diagonal":
            factor = _scaling_entries(value, p)
        else:
            factor = _fourier_entries(p, nu)
        result = result @ factor
    return result


def _egorov(entries: np.ndarray, g: SL2Element, points: Iterable[HeisenbergElement]) -> float:
    worst = 0.0
    for h in points:
        lhs = entries @ pi(h).entries
        rhs = pi(g.act_on(h)).entries @ entries
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


def _spanning_points(p: int) -> List[HeisenbergElement]:
    return [HeisenbergElement(1, 0, 0, p), HeisenbergElement(0, 1, 0, p), HeisenbergElement(0, 0, 1, p)]


def _calibration_pairs(p: int, samples: int = 24) -> List[Tuple[SL2Element, SL2Element]]:
    r = primitive_root(p)
    generators = [
        SL2Element.weyl(p),
        SL2Element.lower(1, p),
        SL2Element.upper(1, p),
        SL2Element.diagonal(r, p),
    ]
    pairs = [(g1, g2) for g1 in generators for g2 in generators]
    rng = np.random.default_rng(p)
    pairs += [(SL2Element.random(rng, p), SL2Element.random(rng, p)) for _ in range(samples)]
    return pairs


@lru_cache(maxsize=None)
def calibrate(p: int, tolerance: float = DEFAULT_TOLERANCE) -> WeilCalibration:
    """
    Fix the unipotent sign by the Egorov oracle and nu by the homomorphism
    test on a generating set plus seeded random pairs. Falls back to
    projective mode (logged) when no candidate passes.
    """
    PrimeModulus(p)
    points = _spanning_points(p)
    lower = SL2Element.lower(1, p)
    sign_residuals = {s: _egorov(_lower_entries(1, p, s), lower, points) for s in (1, -1)}
    sign = min(sign_residuals, key=lambda s: (sign_residuals[s], -s))
    if sign_residuals[sign] >= tolerance:
        raise WeilConstructionError(
            f"no quadratic-modulation sign satisfies the intertwining relation over F_{p}: {sign_residuals}"
        )

    pairs = _calibration_pairs(p)
    best_nu, best_residual = NU_CANDIDATES[0], float("inf")
    for nu in NU_CANDIDATES:
        residual = 0.0
        for g1, g2 in pairs:
            product = _assemble(g1, nu, sign) @ _assemble(g2, nu, sign)
            residual = max(residual, float(np.linalg.norm(product - _assemble(g1 * g2, nu, sign))))
            if residual >= tolerance:
                break
        logger.debug("calibrate p=%d nu=%s homomorphism residual %.3e", p, nu, residual)
        if residual < best_residual:
            best_nu, best_residual = nu, residual

    projective = best_residual >= tolerance
    if projective:
        logger.warning(
            "Weil representation over F_%d only projective after calibration (residual %.3e); "
            "eigenbases are unaffected",
            p,
            best_residual,
        )
    egorov = _egorov(_fourier_entries(p, best_nu), SL2Element.weyl(p), points)
    return WeilCalibration(p, complex(best_nu), sign, projective, best_residual, egorov)


@lru_cache(maxsize=512)
def _weil_entries(a: int, b: int, c: int, d: int, p: int) -> np.ndarray:
    calibration = calibrate(p)
    entries = _assemble(SL2Element(a, b, c, d, p), calibration.nu, calibration.unipotent_sign)
    entries.setflags(write=False)
    return entries


def weil_operator(g: SL2Element) -> UnitaryOperator:
    """rho(g) through the Bruhat factorisation into calibrated generators."""
    return UnitaryOperator(_weil_entries(g.a, g.b, g.c, g.d, g.p), g.p)


def egorov_residual(g: SL2Element, *, full: bool = False) -> float:
    """max ||rho(g) pi(v,z) - pi(gv,z) rho(g)|| over a spanning set (or all of V when full)."""
    p = g.p
    if full:
        points = [HeisenbergElement(tau, w, 0, p) for tau in range(p) for w in range(p)]
    else:
        points = _spanning_points(p)
    return _egorov(weil_operator(g).entries, g, points)


def homomorphism_residual(g1: SL2Element, g2: SL2Element) -> float:
    return (weil_operator(g1) @ weil_operator(g2)).distance(weil_operator(g1 * g2))
