from __future__ import annotations

import unittest

import numpy as np

from oscsignal.errors import AmbiguousPeak, DecodeMarginBelowThreshold, ModulusMismatch
from oscsignal.heisenberg import HeisenbergElement, Line, heisenberg_basis
from oscsignal.oscillator import build_oscillator_system
from oscsignal.sims import (
    CdmaScenario,
    CdmaUser,
    RadarScenario,
    cdma_decode,
    cdma_sweep,
    cdma_transmit,
    decode_threshold,
    radar_detect,
    radar_echo,
    radar_sweep,
    random_cdma_scenario,
    roots_of_unity,
)
from oscsignal.signals import Signal
from oscsignal.tori import NONSPLIT


class RadarTests(unittest.TestCase):
    def setUp(self) -> None:
        self.p = 7
        self.probe = build_oscillator_system(self.p, NONSPLIT)[4]

    def test_recovers_single_shift(self) -> None:
        truth = HeisenbergElement(3, 5, 0, self.p)
        echo = radar_echo(RadarScenario(self.probe, truth))
        estimate = radar_detect(self.probe, echo)
        self.assertEqual(estimate.v, (3, 5))

    def test_sweep_recovers_every_shift(self) -> None:
        frame = radar_sweep(self.probe)
        self.assertEqual(len(frame), self.p * self.p)
        self.assertTrue(frame["recovered"].all())
        self.assertTrue((frame["runner_up"] <= 2 / np.sqrt(self.p) + 1e-9).all())

    def test_every_nonsplit_signal_separates_its_peak(self) -> None:
        for p in (5, 7, 11):
            floor = 1 - 2 / np.sqrt(p) - 1e-9
            for index, probe in enumerate(build_oscillator_system(p, NONSPLIT)):
                frame = radar_sweep(probe)
                self.assertTrue(frame["recovered"].all(), msg=f"p={p} signal {index}")
                self.assertGreaterEqual(frame["separation"].min(), floor, msg=f"p={p} signal {index}")

    def test_noisy_echo_is_still_recovered(self) -> None:
        truth = HeisenbergElement(1, 6, 0, self.p)
        echo = radar_echo(RadarScenario(self.probe, truth, noise=0.05, seed=2))
        self.assertEqual(radar_detect(self.probe, echo).v, (1, 6))
        self.assertEqual(echo.provenance["echo"], [1, 6, 0])

    def test_chirp_along_its_line_is_ambiguous(self) -> None:
        line = Line(1, 2, self.p)
        chirp = heisenberg_basis(line)[1]
        echo = radar_echo(RadarScenario(chirp, HeisenbergElement(1, 2, 0, self.p)))
        with self.assertRaises(AmbiguousPeak) as ctx:
            radar_detect(chirp, echo)
        self.assertEqual(len(ctx.exception.witnesses), 2)

    def test_scenario_validation(self) -> None:
        with self.assertRaises(ValueError):
            RadarScenario(Signal.external(np.ones(self.p), self.p), HeisenbergElement(0, 0, 0, self.p))
        with self.assertRaises(ModulusMismatch):
            RadarScenario(self.probe, HeisenbergElement(0, 0, 0, 5))


class CdmaTests(unittest.TestCase):
    def setUp(self) -> None:
        self.dictionary = build_oscillator_system(7, NONSPLIT)

    def test_threshold(self) -> None:
        self.assertAlmostEqual(decode_threshold(2), 1.0)
        self.assertAlmostEqual(decode_threshold(4), np.sqrt(2) / 2)
        with self.assertRaises(ValueError):
            decode_threshold(1)
        np.testing.assert_allclose(roots_of_unity(4), [1, 1j, -1, -1j], atol=1e-12)

    def test_single_user_round_trip(self) -> None:
        p = 7
        shift = HeisenbergElement(2, 3, 0, p)
        user = CdmaUser(self.dictionary[5], -1.0 + 0j, shift, 5)
        received = cdma_transmit(CdmaScenario([user]))
        result = cdma_decode(received, user.signal, shift=shift)
        self.assertEqual(result.bit, -1)
        self.assertAlmostEqual(result.interference, 0.0, places=10)
        self.assertAlmostEqual(result.margin, 1.0, places=10)

    def test_full_search_finds_the_shift(self) -> None:
        p = 7
        shift = HeisenbergElement(4, 1, 0, p)
        user = CdmaUser(self.dictionary[0], 1j, shift, 0)
        received = cdma_transmit(CdmaScenario([user], bit_order=4))
        result = cdma_decode(received, user.signal, search="full", bit_order=4)
        self.assertEqual(result.shift.v, (4, 1))
        self.assertEqual(result.bit_index, 1)

    def test_shared_signal_breaks_the_margin(self) -> None:
        p = 7
        signal = self.dictionary[3]
        zero = HeisenbergElement(0, 0, 0, p)
        scenario = CdmaScenario([CdmaUser(signal, 1.0 + 0j, zero), CdmaUser(signal, -1.0 + 0j, zero)])
        received = cdma_transmit(scenario)
        with self.assertRaises(DecodeMarginBelowThreshold) as ctx:
            cdma_decode(received, signal, shift=zero)
        self.assertGreaterEqual(ctx.exception.interference, ctx.exception.threshold)
        with self.assertLogs("oscsignal.sims", level="WARNING"):
            result = cdma_decode(received, signal, shift=zero, strict=False)
        self.assertFalse(result.reliable)

    def test_scenario_validation(self) -> None:
        p = 7
        zero = HeisenbergElement(0, 0, 0, p)
        with self.assertRaises(ValueError):
            CdmaScenario([])
        with self.assertRaises(ValueError):
            CdmaScenario([CdmaUser(self.dictionary[0], 1, zero, 0), CdmaUser(self.dictionary[0], 1, zero, 0)])
        with self.assertRaises(ValueError):
            CdmaScenario([CdmaUser(self.dictionary[0], 0.5, zero, 0)])
        with self.assertRaises(ValueError):
            cdma_decode(Signal.delta(0, p), self.dictionary[0])

    def test_random_scenarios_respect_distortion_kind(self) -> None:
        rng = np.random.default_rng(0)
        scenario, bits = random_cdma_scenario(self.dictionary, 3, rng, scenario="synchronous")
        self.assertEqual(len(bits), 3)
        self.assertTrue(all(user.shift.v == (0, 0) for user in scenario.users))
        scenario, _ = random_cdma_scenario(self.dictionary, 3, rng, scenario="asynchronous")
        self.assertTrue(all(user.shift.w == 0 for user in scenario.users))
        with self.assertRaises(ValueError):
            random_cdma_scenario(self.dictionary, len(self.dictionary) + 1, rng)

    def test_sweep_is_seeded(self) -> None:
        first = cdma_sweep(self.dictionary, [1, 2], 20, seed=5)
        second = cdma_sweep(self.dictionary, [1, 2], 20, seed=5, threads=3)
        self.assertTrue(first.equals(second))
        self.assertEqual(list(first["users"]), [1, 2])
        self.assertEqual(first.loc[0, "errors"], 0)
        self.assertAlmostEqual(first.loc[0, "min_margin"], 1.0, places=9)

    def test_interference_grows_with_users(self) -> None:
        frame = cdma_sweep(self.dictionary, [1, 4, 16], 40, seed=1)
        self.assertTrue(frame["mean_margin"].is_monotonic_decreasing)
        self.assertLessEqual(frame.loc[0, "ber"], frame.loc[2, "ber"])

    def test_full_system_at_thirty_one(self) -> None:
        dictionary = build_oscillator_system(31)
        frame = cdma_sweep(dictionary, range(1, 9), 200, seed=0)
        self.assertEqual(list(frame["users"]), list(range(1, 9)))
        self.assertEqual(frame.set_index("users").loc[5, "ber"], 0.0)
        self.assertTrue(frame["ber"].is_monotonic_increasing)


if __name__ == "__main__":
    unittest.main()
