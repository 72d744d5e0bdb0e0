from __future__ import annotations

import unittest

import numpy as np

from oscsignal.errors import DivisionByZero, InvalidModulus, ModulusMismatch
from oscsignal.field import (
    PrimeModulus,
    additive_character,
    discrete_log_table,
    field_arith,
    half,
    inverse_mod,
    legendre_table,
    primitive_root,
    psi,
    quadratic_character,
)


class PrimeModulusTests(unittest.TestCase):
    def test_rejects_even_and_composite(self) -> None:
        for bad in (2, 4, 9, 1, 0, -7):
            with self.assertRaises(InvalidModulus):
                PrimeModulus(bad)

    def test_rejects_above_maximum(self) -> None:
        with self.assertRaises(InvalidModulus):
            PrimeModulus(103)
        self.assertEqual(PrimeModulus(103, max_p=200).p, 103)

    def test_half(self) -> None:
        F7 = PrimeModulus(7)
        self.assertEqual(F7.half, 4)
        self.assertEqual((F7.element(4) + F7.element(4)).value, 1)


class FieldArithmeticTests(unittest.TestCase):
    def setUp(self) -> None:
        self.F7 = PrimeModulus(7)

    def test_inverse_of_three_mod_seven(self) -> None:
        self.assertEqual(field_arith(self.F7.element(3), None, "inv").value, 5)
        self.assertEqual(inverse_mod(3, 7), 5)

    def test_inverse_of_one(self) -> None:
        for p in (3, 5, 7, 101):
            self.assertEqual(inverse_mod(1, p), 1)

    def test_inverting_zero_raises(self) -> None:
        with self.assertRaises(DivisionByZero):
            self.F7.element(0).inverse()
        with self.assertRaises(DivisionByZero):
            field_arith(self.F7.element(2), self.F7.element(0), "div")

    def test_inverse_is_involution(self) -> None:
        for p in (5, 7, 11, 13):
            for a in range(1, p):
                self.assertEqual(inverse_mod(inverse_mod(a, p), p), a)
                self.assertEqual(a * inverse_mod(a, p) % p, 1)

    def test_operations(self) -> None:
        a, b = self.F7.element(5), self.F7.element(4)
        self.assertEqual(field_arith(a, b, "add").value, 2)
        self.assertEqual(field_arith(a, b, "sub").value, 1)
        self.assertEqual(field_arith(a, b, "mul").value, 6)
        self.assertEqual(field_arith(a, b, "div").value, 3)
        self.assertEqual(field_arith(a, 2, "pow").value, 4)
        self.assertEqual(field_arith(a, None, "neg").value, 2)

    def test_mixed_moduli(self) -> None:
        with self.assertRaises(ModulusMismatch):
            self.F7.element(1) + PrimeModulus(5).element(1)

    def test_unknown_operation(self) -> None:
        with self.assertRaises(ValueError):
            field_arith(self.F7.element(1), self.F7.element(1), "mod")

    def test_half_matches_formula(self) -> None:
        for p in (3, 5, 7, 101):
            self.assertEqual(2 * half(p) % p, 1)


class CharacterTests(unittest.TestCase):
    def test_quadratic_character_examples(self) -> None:
        self.assertEqual(quadratic_character(4, 5), 1)
        self.assertEqual(quadratic_character(2, 5), -1)
        self.assertEqual(quadratic_character(0, 5), 0)
        self.assertEqual(quadratic_character(PrimeModulus(7).element(3)), -1)

    def test_quadratic_character_matches_enumeration(self) -> None:
        for p in (3, 5, 7, 11, 13, 31, 101):
            squares = {x * x % p for x in range(1, p)}
            table = legendre_table(p)
            for a in range(1, p):
                self.assertEqual(table[a], 1 if a in squares else -1)
            self.assertEqual(sum(1 for a in range(1, p) if table[a] == 1), (p - 1) // 2)

    def test_quadratic_character_is_multiplicative(self) -> None:
        p = 13
        for x in range(1, p):
            for y in range(1, p):
                self.assertEqual(
                    quadratic_character(x * y, p),
                    quadratic_character(x, p) * quadratic_character(y, p),
                )

    def test_additive_character(self) -> None:
        self.assertAlmostEqual(additive_character(0, 5), 1.0)
        for m in range(-3, 4):
            self.assertAlmostEqual(abs(additive_character(5 * m, 5) - 1.0), 0.0, places=12)
        for p in (5, 7, 101):
            self.assertLess(abs(np.sum(psi(np.arange(p), p))), 1e-10)

    def test_additive_character_homomorphism(self) -> None:
        for p in (7, 101):
            s, t = np.meshgrid(np.arange(p), np.arange(p))
            residual = np.abs(psi(s + t, p) - psi(s, p) * psi(t, p)).max()
            self.assertLess(residual, 1e-12)

    def test_primitive_root_and_logs(self) -> None:
        self.assertEqual(primitive_root(7), 3)
        self.assertEqual(primitive_root(5), 2)
        logs = discrete_log_table(7)
        for t in range(1, 7):
            self.assertEqual(pow(3, logs[t], 7), t)


if __name__ == "__main__":
    unittest.main()
