from __future__ import annotations

import unittest
from functools import lru_cache

import numpy as np

from oscsignal.analysis import (
    ambiguity_surface,
    bound_for,
    heisenberg_bounds,
    is_permutation_phase,
    oscillator_bounds,
    resolve_mode,
    signal_table,
    stability_summary,
    surfaces,
    verify_autocorrelation,
    verify_crosscorrelation,
    verify_dictionary,
    verify_extended_inner_products,
    verify_fourier_invariance,
    verify_same_line_pattern,
    verify_supremum_and_papr,
    verify_weil_equivariance,
)
from oscsignal.heisenberg import HeisenbergElement, heisenberg_system, matrix_coefficient
from oscsignal.oscillator import build_oscillator_system, extended_system, standard_basis_system
from oscsignal.signals import Signal, SignalDictionary
from oscsignal.tori import NONSPLIT, SPLIT
from oscsignal.weil import SL2Element


@lru_cache(maxsize=None)
def oscillator_system(p: int, kind: str = "both") -> SignalDictionary:
    return build_oscillator_system(p, kind)


class SurfaceTests(unittest.TestCase):
    def test_matches_direct_matrix_coefficients(self) -> None:
        p = 7
        rng = np.random.default_rng(4)
        a = rng.normal(size=p) + 1j * rng.normal(size=p)
        b = rng.normal(size=p) + 1j * rng.normal(size=p)
        phi = Signal(a / np.linalg.norm(a), p)
        other = Signal(b / np.linalg.norm(b), p)
        table = ambiguity_surface(phi, other)
        for tau in range(p):
            for w in range(p):
                direct = matrix_coefficient(phi, other, HeisenbergElement(tau, w, 0, p))
                self.assertAlmostEqual(abs(table[tau, w]), abs(direct), places=10)

    def test_origin_of_autocorrelation_is_one(self) -> None:
        phi = standard_basis_system(11)[3]
        self.assertAlmostEqual(abs(ambiguity_surface(phi)[0, 0] - 1.0), 0.0, places=12)

    def test_delta_ambiguity_is_frequency_line(self) -> None:
        p = 5
        table = np.abs(ambiguity_surface(Signal.delta(0, p)))
        expected = np.zeros((p, p))
        expected[0, :] = 1.0
        np.testing.assert_allclose(table, expected, atol=1e-12)

    def test_batched_shape(self) -> None:
        rows = standard_basis_system(7).coeffs
        self.assertEqual(surfaces(rows, rows).shape, (5, 7, 7))


class BoundsTests(unittest.TestCase):
    def test_values(self) -> None:
        self.assertAlmostEqual(oscillator_bounds(11)["auto"], 2 / np.sqrt(11))
        self.assertAlmostEqual(oscillator_bounds(11)["cross"], 4 / np.sqrt(11))
        self.assertAlmostEqual(heisenberg_bounds(7)["cross"], 1 / np.sqrt(7))

    def test_mode_resolution(self) -> None:
        self.assertEqual(resolve_mode(heisenberg_system(5)), "heisenberg")
        self.assertEqual(resolve_mode(standard_basis_system(5)), "oscillator")
        self.assertEqual(resolve_mode(heisenberg_system(5), "oscillator"), "oscillator")


class SplitBoundTests(unittest.TestCase):
    # Achieved off-origin maxima of split-torus signals; every split torus is a
    # Weil conjugate of the standard one, so B_std carries the same values.
    ACHIEVED = {7: (0.771690, 1e-6), 13: (0.5775, 1e-4), 17: (0.509, 1e-3), 23: (0.424, 1e-3)}

    def test_bound_values(self) -> None:
        bounds = oscillator_bounds(7)
        self.assertAlmostEqual(bounds["split_auto"], 2 * np.sqrt(7) / 6)
        self.assertAlmostEqual(bounds["split_sup"], 2 / np.sqrt(6))
        self.assertEqual(bound_for({"family": "split"}, 7), bounds["split_auto"])
        self.assertEqual(bound_for({"family": "standard"}, 7, "sup"), bounds["split_sup"])
        self.assertEqual(bound_for({"family": "non-split"}, 7), bounds["auto"])

    def test_achieved_split_maxima(self) -> None:
        for p, (value, delta) in self.ACHIEVED.items():
            section = verify_autocorrelation(standard_basis_system(p))
            self.assertAlmostEqual(section["max"], value, delta=delta, msg=f"p={p}")
            self.assertGreater(section["max"], 2 / np.sqrt(p))
            self.assertLessEqual(section["max"], oscillator_bounds(p)["split_auto"] + 1e-9)
            self.assertTrue(section["passed"])
            self.assertEqual(list(section["by_kind"]), ["split"])

    def test_split_maxima_at_five_and_eleven(self) -> None:
        # three unimodular terms over p - 1 = 4 at p = 5; tau = w = 1 already gives 0.7256
        five = verify_autocorrelation(standard_basis_system(5))["max"]
        self.assertGreaterEqual(five, 0.7255)
        self.assertLessEqual(five, 0.75 + 1e-9)
        eleven = verify_autocorrelation(standard_basis_system(11))["max"]
        self.assertLessEqual(eleven, 2 / np.sqrt(11) + 1e-9)

    def test_split_system_matches_standard_basis(self) -> None:
        for p in (7, 13):
            split = verify_autocorrelation(oscillator_system(p, SPLIT))
            standard = verify_autocorrelation(standard_basis_system(p))
            self.assertAlmostEqual(split["max"], standard["max"], places=9)

    def test_split_supremum_at_eleven(self) -> None:
        section = verify_supremum_and_papr(oscillator_system(11, SPLIT))
        self.assertAlmostEqual(section["sup_max"], 0.621, delta=1e-3)
        self.assertGreater(section["sup_max"], 2 / np.sqrt(11))
        self.assertLessEqual(section["sup_max"], 2 / np.sqrt(10) + 1e-9)
        self.assertTrue(section["passed"])

    def test_strict_bound_flags_split_signals(self) -> None:
        p = 7
        section = verify_autocorrelation(oscillator_system(p, SPLIT), split_bound=2 / np.sqrt(p))
        self.assertFalse(section["passed"])
        self.assertGreater(section["by_kind"]["split"]["violations"], 0)


class OscillatorVerificationTests(unittest.TestCase):
    def test_full_system_passes(self) -> None:
        for p in (5, 7, 11):
            report = verify_dictionary(oscillator_system(p))
            self.assertTrue(report.passed, msg=f"p={p}: {report.failures()}")
            self.assertEqual(report.mode, "oscillator")
            self.assertIn("fourier_invariance", report.sections)
            self.assertTrue(stability_summary(report)["stable"])
            for name in ("autocorrelation", "supremum"):
                by_kind = report.sections[name]["by_kind"]
                self.assertEqual(set(by_kind), {SPLIT, NONSPLIT})
                self.assertLessEqual(by_kind[NONSPLIT]["max"], 2 / np.sqrt(p) + 1e-9)
                self.assertEqual(by_kind[NONSPLIT]["bound"], oscillator_bounds(p)["sup" if name == "supremum" else "auto"])
        self.assertEqual(verify_dictionary(oscillator_system(7)).sections["crosscorrelation"]["mode"], "full")

    def test_nonsplit_bounds(self) -> None:
        for p in (5, 7, 11, 13, 17, 23):
            dictionary = oscillator_system(p, NONSPLIT)
            auto = verify_autocorrelation(dictionary)
            sup = verify_supremum_and_papr(dictionary)
            self.assertLessEqual(auto["max"], 2 / np.sqrt(p) + 1e-9, msg=f"p={p}")
            self.assertLessEqual(sup["sup_max"], 2 / np.sqrt(p) + 1e-9, msg=f"p={p}")
            self.assertTrue(auto["passed"] and sup["passed"])

    def test_full_crosscorrelation_sweep(self) -> None:
        for p in (11, 13):
            dictionary = oscillator_system(p)
            n = len(dictionary)
            section = verify_crosscorrelation(dictionary, pair_budget=n * (n - 1) // 2 * p * p)
            self.assertEqual(section["mode"], "full")
            self.assertEqual(section["coverage"], 1.0)
            self.assertLessEqual(section["max"], 4 / np.sqrt(p) + 1e-9)
            self.assertTrue(section["passed"])

    def test_delta_fails_oscillator_sup(self) -> None:
        p = 7
        dictionary = SignalDictionary.from_signals([Signal.delta(0, p)], "external", p)
        section = verify_supremum_and_papr(dictionary)
        self.assertFalse(section["passed"])
        self.assertAlmostEqual(section["papr_max"], p)
        self.assertEqual(section["witness"]["signal"], 0)

    def test_autocorrelation_witness(self) -> None:
        p = 7
        dictionary = SignalDictionary.from_signals([Signal.delta(2, p)], "external", p)
        section = verify_autocorrelation(dictionary)
        self.assertFalse(section["passed"])
        self.assertEqual(section["witness"]["tau"], 0)
        self.assertAlmostEqual(section["max"], 1.0)

    def test_sampled_crosscorrelation(self) -> None:
        p = 7
        dictionary = build_oscillator_system(p)
        with self.assertLogs("oscsignal.analysis", level="WARNING"):
            section = verify_crosscorrelation(dictionary, pair_budget=500 * p * p, seed=3)
        self.assertEqual(section["mode"], "sampled")
        self.assertEqual(section["seed"], 3)
        self.assertLessEqual(section["pairs_evaluated"], 500)
        self.assertLess(section["coverage"], 1.0)
        self.assertTrue(section["passed"])
        again = verify_crosscorrelation(dictionary, pair_budget=500 * p * p, seed=3)
        self.assertEqual(section["max"], again["max"])

    def test_fourier_invariance(self) -> None:
        for p in (5, 7, 11, 13):
            section = verify_fourier_invariance(oscillator_system(p))
            self.assertTrue(section["passed"])
            self.assertGreater(section["min_overlap"], 1 - 1e-8)
            self.assertIsNotNone(section["weyl_torus"])
            self.assertGreater(section["weyl_torus"]["min_overlap"], 1 - 1e-8)

    def test_weil_equivariance_for_random_elements(self) -> None:
        p = 7
        dictionary = build_oscillator_system(p)
        rng = np.random.default_rng(9)
        for _ in range(4):
            section = verify_weil_equivariance(dictionary, SL2Element.random(rng, p))
            self.assertTrue(section["passed"])

    def test_equivariance_reports_missing_tori(self) -> None:
        p = 7
        dictionary = build_oscillator_system(p)
        first_torus = dictionary.select(dictionary.indices_where(torus=0))
        section = verify_weil_equivariance(first_torus, SL2Element(1, 1, 1, 2, p))
        self.assertFalse(section["passed"])
        self.assertTrue(section["missing_tori"])

    def test_structural_recovery_rejects_shuffled_phases(self) -> None:
        self.assertTrue(is_permutation_phase(np.array([[0, 1j], [-1, 0]])))
        self.assertFalse(is_permutation_phase(np.array([[0.6, 0.8], [0.8, -0.6]])))
        self.assertFalse(is_permutation_phase(np.ones((2, 3))))


class HeisenbergVerificationTests(unittest.TestCase):
    def test_heisenberg_mode_passes(self) -> None:
        for p in (5, 7, 11, 13):
            report = verify_dictionary(heisenberg_system(p))
            self.assertEqual(report.mode, "heisenberg")
            self.assertTrue(report.passed, msg=f"p={p}: {report.failures()}")
            self.assertLess(report.sections["line_pattern"]["max_error"], 1e-9)
            self.assertLessEqual(report.sections["crosscorrelation"]["max"], 1 / np.sqrt(p) + 1e-9)
            self.assertEqual(report.sections["supremum"]["point_masses"], p)
            self.assertTrue(report.sections["same_line_pattern"]["passed"])

    def test_same_line_pairs_hit_a_translate_of_the_line(self) -> None:
        for p in (5, 7, 11):
            section = verify_same_line_pattern(heisenberg_system(p))
            self.assertEqual(section["pairs"], (p + 1) * p * (p - 1) // 2)
            self.assertLess(section["max_error"], 1e-9)
            self.assertTrue(section["passed"])

    def test_same_line_rule_rejects_mixed_lines(self) -> None:
        p = 5
        system = heisenberg_system(p)
        first = system.indices_where(line=0)[0]
        second = system.indices_where(line=1)[0]
        provenance = [dict(system.provenance[first]), dict(system.provenance[second])]
        provenance[1]["direction"] = provenance[0]["direction"]
        mixed = SignalDictionary(system.coeffs[[first, second]], provenance, "heisenberg", p)
        section = verify_same_line_pattern(mixed)
        self.assertFalse(section["passed"])
        self.assertEqual(section["witness"]["pair"], [0, 1])

    def test_heisenberg_fails_oscillator_bounds(self) -> None:
        report = verify_dictionary(heisenberg_system(7), bounds="oscillator")
        self.assertFalse(report.passed)
        self.assertIn("autocorrelation", report.failures())
        self.assertAlmostEqual(report.sections["autocorrelation"]["max"], 1.0, places=9)


class ExtendedVerificationTests(unittest.TestCase):
    def test_full_and_sampled(self) -> None:
        extended = extended_system(build_oscillator_system(5, NONSPLIT))
        full = verify_extended_inner_products(extended)
        self.assertEqual(full["mode"], "full")
        self.assertTrue(full["passed"])
        with self.assertLogs("oscsignal.analysis", level="WARNING"):
            sampled = verify_extended_inner_products(extended, pair_budget=1000, seed=1)
        self.assertEqual(sampled["mode"], "sampled")
        self.assertEqual(sampled["pairs_evaluated"], 1000)

    def test_verify_dictionary_adds_extended_section(self) -> None:
        extended = extended_system(build_oscillator_system(5, NONSPLIT))
        report = verify_dictionary(extended, pair_budget=10**6)
        self.assertIn("extended_inner_products", report.sections)
        self.assertEqual(report.size, len(extended))
        self.assertEqual(report.system_kind, "extended")


class SignalTableTests(unittest.TestCase):
    def test_columns(self) -> None:
        dictionary = build_oscillator_system(5, NONSPLIT)
        report = verify_dictionary(dictionary)
        frame = signal_table(dictionary, report)
        self.assertEqual(len(frame), len(dictionary))
        self.assertEqual(frame.index.name, "signal")
        for column in ("family", "torus", "k", "sup", "papr", "auto_max"):
            self.assertIn(column, frame.columns)
        self.assertTrue((frame["auto_max"] <= 2 / np.sqrt(5) + 1e-9).all())

    def test_report_serialises(self) -> None:
        report = verify_dictionary(standard_basis_system(7))
        document = report.to_dict()
        self.assertEqual(document["passed"], report.passed)
        self.assertIn("stability", document)


if __name__ == "__main__":
    unittest.main()
