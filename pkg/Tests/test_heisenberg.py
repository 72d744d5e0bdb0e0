from __future__ import annotations

import itertools
import unittest

import numpy as np

from oscsignal.errors import InvalidModulus, ModulusMismatch
from oscsignal.field import psi
from oscsignal.heisenberg import (
    HeisenbergElement,
    Line,
    ambiguity,
    apply_pi,
    enumerate_lines,
    heisenberg_basis,
    heisenberg_system,
    matrix_coefficient,
    phase_shift,
    pi,
    time_shift,
)
from oscsignal.signals import Signal


def element_index(h: HeisenbergElement) -> int:
    return (h.tau * h.p + h.w) * h.p + h.z


def operator_stack(p: int) -> tuple[list[HeisenbergElement], np.ndarray]:
    """Every element of H over F_p in element_index order, with pi of each stacked."""
    elements = [HeisenbergElement(tau, w, z, p) for tau, w, z in itertools.product(range(p), repeat=3)]
    return elements, np.array([pi(h).entries for h in elements])


class HeisenbergGroupTests(unittest.TestCase):
    def test_product_example(self) -> None:
        h = HeisenbergElement(1, 0, 0, 7) * HeisenbergElement(0, 1, 0, 7)
        self.assertEqual((h.tau, h.w, h.z), (1, 1, 4))

    def test_inverse_and_identity(self) -> None:
        p = 7
        identity = HeisenbergElement.identity(p)
        for tau, w, z in [(1, 2, 3), (6, 0, 5), (0, 4, 1)]:
            h = HeisenbergElement(tau, w, z, p)
            self.assertEqual(h * h.inverse(), identity)
            self.assertEqual(identity * h, h)

    def test_associativity(self) -> None:
        p = 5
        rng = np.random.default_rng(3)
        for _ in range(50):
            a, b, c = (HeisenbergElement(*rng.integers(0, p, 3), p) for _ in range(3))
            self.assertEqual((a * b) * c, a * (b * c))

    def test_rejects_bad_modulus(self) -> None:
        with self.assertRaises(InvalidModulus):
            HeisenbergElement(0, 0, 0, 9)
        with self.assertRaises(ModulusMismatch):
            HeisenbergElement(1, 0, 0, 5) * HeisenbergElement(1, 0, 0, 7)


class RepresentationTests(unittest.TestCase):
    def test_time_shift_of_delta(self) -> None:
        shifted = time_shift(2, Signal.delta(0, 5))
        np.testing.assert_allclose(shifted.coeffs, Signal.delta(3, 5).coeffs)

    def test_phase_shift_is_diagonal(self) -> None:
        p = 7
        shifted = phase_shift(3, Signal.delta(2, p))
        self.assertAlmostEqual(abs(shifted.coeffs[2] - psi(6, p)), 0.0, places=12)

    def test_pi_is_homomorphism_on_every_pair(self) -> None:
        for p in (5, 7):
            elements, stack = operator_stack(p)
            worst = 0.0
            for a, h1 in enumerate(elements):
                targets = [element_index(h1 * h2) for h2 in elements]
                worst = max(worst, float(np.abs(stack[a] @ stack - stack[targets]).max()))
            self.assertLess(worst, 1e-10, msg=f"p={p}")

    def test_pi_is_homomorphism_on_sampled_pairs(self) -> None:
        for p in (11, 13):
            elements, stack = operator_stack(p)
            rng = np.random.default_rng(p)
            pairs = rng.integers(0, len(elements), size=(100_000, 2))
            targets = np.array([element_index(elements[i] * elements[j]) for i, j in pairs.tolist()])
            worst = 0.0
            for start in range(0, len(pairs), 10_000):
                i, j = pairs[start:start + 10_000, 0], pairs[start:start + 10_000, 1]
                product = np.matmul(stack[i], stack[j])
                worst = max(worst, float(np.abs(product - stack[targets[start:start + 10_000]]).max()))
            self.assertLess(worst, 1e-10, msg=f"p={p}")

    def test_center_acts_by_scalar(self) -> None:
        p = 7
        for z in range(p):
            op = pi(HeisenbergElement(0, 0, z, p))
            self.assertLess(op.distance(psi(z, p) * np.eye(p)), 1e-12)

    def test_pi_is_unitary(self) -> None:
        for h in (HeisenbergElement(3, 4, 1, 7), HeisenbergElement(0, 5, 6, 7)):
            self.assertLess(pi(h).unitarity_residual(), 1e-12)

    def test_shift_commutation(self) -> None:
        p = 7
        t = np.arange(p)
        for tau, w in [(1, 1), (2, 5), (6, 3)]:
            L = np.zeros((p, p), dtype=complex)
            L[t, (t + tau) % p] = 1.0
            M = np.diag(psi(w * t, p))
            self.assertLess(np.linalg.norm(L @ M - psi(w * tau, p) * M @ L), 1e-12)

    def test_apply_pi_matches_dense_operator(self) -> None:
        p = 11
        rng = np.random.default_rng(0)
        stack = rng.normal(size=(3, p)) + 1j * rng.normal(size=(3, p))
        h = HeisenbergElement(4, 7, 2, p)
        np.testing.assert_allclose(apply_pi(h, stack), stack @ pi(h).entries.T, atol=1e-12)

    def test_matrix_coefficient_at_identity_is_inner_product(self) -> None:
        p = 5
        a, b = Signal.delta(1, p), Signal.delta(1, p)
        self.assertAlmostEqual(abs(matrix_coefficient(a, b, HeisenbergElement.identity(p)) - 1.0), 0.0)
        value = ambiguity(a, HeisenbergElement(0, 3, 0, p))
        self.assertAlmostEqual(abs(value - np.conj(psi(3, p))), 0.0, places=12)


class LineTests(unittest.TestCase):
    def test_canonical_direction(self) -> None:
        self.assertEqual(Line(3, 6, 7).direction, (1, 2))
        self.assertEqual(Line(0, 5, 7).direction, (0, 1))
        with self.assertRaises(ValueError):
            Line(0, 0, 7)

    def test_enumeration(self) -> None:
        lines = enumerate_lines(5)
        self.assertEqual(len(lines), 6)
        self.assertEqual(lines[0].direction, (1, 0))
        self.assertEqual(lines[-1].direction, (0, 1))
        self.assertEqual([line.index for line in lines], list(range(6)))

    def test_points_and_indicator(self) -> None:
        line = Line(1, 2, 5)
        self.assertEqual(len(set(line.points())), 5)
        self.assertTrue(all(line.contains(tau, w) for tau, w in line.points()))
        self.assertFalse(line.contains(1, 0))
        self.assertEqual(line.indicator().sum(), 5)


class HeisenbergBasisTests(unittest.TestCase):
    def test_time_line_gives_exponentials(self) -> None:
        p = 7
        basis = heisenberg_basis(Line(1, 0, p))
        t = np.arange(p)
        for k, signal in enumerate(basis):
            np.testing.assert_allclose(signal.coeffs, psi(k * t, p) / np.sqrt(p), atol=1e-9)

    def test_frequency_line_gives_deltas(self) -> None:
        p = 7
        basis = heisenberg_basis(Line(0, 1, p))
        for k, signal in enumerate(basis):
            np.testing.assert_allclose(signal.coeffs, Signal.delta(k, p).coeffs, atol=1e-9)

    def test_basis_is_orthonormal(self) -> None:
        p = 7
        for line in enumerate_lines(p):
            rows = np.array([s.coeffs for s in heisenberg_basis(line)])
            self.assertLess(np.linalg.norm(rows @ rows.conj().T - np.eye(p)), 1e-9)

    def test_system_size_and_provenance(self) -> None:
        for p, size in ((5, 30), (7, 56)):
            system = heisenberg_system(p)
            self.assertEqual(len(system), size)
            self.assertEqual(system.system_kind, "heisenberg")
            self.assertEqual(system.duplicate_provenance(), [])
            self.assertLess(system.norm_residual(), 1e-10)

    def test_chirp_ambiguity_lives_on_its_line(self) -> None:
        p = 7
        line = Line(1, 3, p)
        chirp = heisenberg_basis(line)[2]
        for tau in range(p):
            for w in range(p):
                value = abs(ambiguity(chirp, HeisenbergElement(tau, w, 0, p)))
                expected = 1.0 if line.contains(tau, w) else 0.0
                self.assertAlmostEqual(value, expected, places=8)

    def test_cross_line_correlation_is_flat(self) -> None:
        p = 7
        a = heisenberg_basis(Line(1, 1, p))[0]
        b = heisenberg_basis(Line(1, 4, p))[3]
        for tau in range(p):
            for w in range(p):
                value = abs(matrix_coefficient(a, b, HeisenbergElement(tau, w, 0, p)))
                self.assertAlmostEqual(value, 1 / np.sqrt(p), places=8)

    def test_threads_do_not_change_result(self) -> None:
        serial = heisenberg_system(5)
        threaded = heisenberg_system(5, threads=4)
        self.assertEqual(serial.dictionary_id, threaded.dictionary_id)


if __name__ == "__main__":
    unittest.main()
