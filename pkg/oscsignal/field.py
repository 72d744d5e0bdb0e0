from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .config import DEFAULT_MAX_P, is_prime
from .errors import DivisionByZero, InvalidModulus, ModulusMismatch


# ────────────────────────────────────────────────
# Modulus and elements
# ────────────────────────────────────────────────
@dataclass(frozen=True)
class PrimeModulus:
    """An odd prime 3 <= p <= max_p."""

    p: int
    max_p: int = DEFAULT_MAX_P

    def __post_init__(self) -> None:
        if not isinstance(self.p, (int, np.integer)) or isinstance(self.p, bool):
            raise InvalidModulus(f"p must be an integer, got {self.p!r}")
        if self.p == 2 or not is_prime(int(self.p)):
            raise InvalidModulus(f"p must be an odd prime, got {self.p}")
        if self.p > self.max_p:
            raise InvalidModulus(f"p must be <= {self.max_p}, got {self.p}")

    @property
    def half(self) -> int:
        """The residue of 1/2, i.e. (p + 1) / 2."""
        return (self.p + 1) // 2

    def element(self, value: int) -> "FieldElement":
        return FieldElement(int(value) % self.p, self)

    def elements(self) -> list["FieldElement"]:
        return [FieldElement(v, self) for v in range(self.p)]


@dataclass(frozen=True)
class FieldElement:
    value: int
    modulus: PrimeModulus

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.modulus.p:
            object.__setattr__(self, "value", int(self.value) % self.modulus.p)

    @property
    def p(self) -> int:
        return self.modulus.p

    def _coerce(self, other: Union["FieldElement", int]) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.modulus.p != self.modulus.p:
                raise ModulusMismatch(f"cannot combine F_{self.p} with F_{other.p}")
            return other
        return FieldElement(int(other) % self.p, self.modulus)

    def __add__(self, other: Union["FieldElement", int]) -> "FieldElement":
        return FieldElement((self.value + self._coerce(other).value) % self.p, self.modulus)

    __radd__ = __add__

    def __sub__(self, other: Union["FieldElement", int]) -> "FieldElement":
        return FieldElement((self.value - self._coerce(other).value) % self.p, self.modulus)

    def __rsub__(self, other: Union["FieldElement", int]) -> "FieldElement":
        return self._coerce(other) - self

    def __mul__(self, other: Union["FieldElement", int]) -> "FieldElement":
        return FieldElement((self.value * self._coerce(other).value) % self.p, self.modulus)

    __rmul__ = __mul__

    def __neg__(self) -> "FieldElement":
        return FieldElement((-self.value) % self.p, self.modulus)

    def __pow__(self, exponent: int) -> "FieldElement":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return FieldElement(pow(self.value, exponent, self.p), self.modulus)

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise DivisionByZero(f"0 has no inverse in F_{self.p}")
        return FieldElement(pow(self.value, self.p - 2, self.p), self.modulus)

    def __truediv__(self, other: Union["FieldElement", int]) -> "FieldElement":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other: Union["FieldElement", int]) -> "FieldElement":
        return self._coerce(other) / self

    def __int__(self) -> int:
        return self.value

    __index__ = __int__

    def __repr__(self) -> str:
        return f"F{self.p}({self.value})"


FieldLike = Union[FieldElement, int]


def field_arith(a: FieldElement, b: FieldElement | None, op: str) -> FieldElement:
    """Dispatch add/sub/mul/div/pow/neg/inv; `b` is the exponent for pow and unused for neg/inv."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "pow":
        return a ** int(b)
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    raise ValueError(f"Unsupported field operation '{op}'.")


def inverse_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise DivisionByZero(f"0 has no inverse in F_{p}")
    return pow(a, p - 2, p)


def half(p: int) -> int:
    return (p + 1) // 2


# ────────────────────────────────────────────────
# Characters
# ────────────────────────────────────────────────
@lru_cache(maxsize=None)
def legendre_table(p: int) -> tuple[int, ...]:
    """sigma(a) for a = 0..p-1 by Euler's criterion."""
    exponent = (p - 1) // 2
    table = [0]
    for a in range(1, p):
        table.append(1 if pow(a, exponent, p) == 1 else -1)
    return tuple(table)


def quadratic_character(a: FieldLike, p: int | None = None) -> int:
    if isinstance(a, FieldElement):
        return legendre_table(a.p)[a.value]
    if p is None:
        raise ValueError("p is required when a is a plain integer")
    return legendre_table(p)[int(a) % p]


def additive_character(t: FieldLike, p: int | None = None) -> complex:
    """psi(t) = exp(2 pi i t / p)."""
    if isinstance(t, FieldElement):
        value, p = t.value, t.p
    else:
        if p is None:
            raise ValueError("p is required when t is a plain integer")
        value = int(t) % p
    return cmath.exp(2j * cmath.pi * value / p)


@lru_cache(maxsize=None)
def psi_table(p: int) -> np.ndarray:
    """psi evaluated on 0..p-1 as a read-only complex array."""
    table = np.exp(2j * np.pi * np.arange(p) / p)
    table.setflags(write=False)
    return table


def psi(values: np.ndarray | int, p: int) -> np.ndarray:
    """Vectorised psi on integer arrays (reduced mod p first)."""
    return psi_table(p)[np.mod(values, p)]


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    """Smallest generator of the multiplicative group F_p^x."""
    order = p - 1
    factors = {q for q in range(2, order + 1) if order % q == 0 and is_prime(q)}
    for g in range(2, p):
        if all(pow(g, order // q, p) != 1 for q in factors):
            return g
    raise InvalidModulus(f"F_{p}^x has no generator; p must be prime")


@lru_cache(maxsize=None)
def discrete_log_table(p: int) -> tuple[int, ...]:
    """log_g(t) for t = 1..p-1 against primitive_root(p); index 0 is unused (-1)."""
    g = primitive_root(p)
    table = [-1] * p
    value = 1
    for m in range(p - 1):
        table[value] = m
        value = value * g % p
    return tuple(table)
