from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
import pandas as pd

from .analysis import surfaces
from .config import AMBIGUITY_GAP, DEFAULT_SEED
from .errors import AmbiguousPeak, DecodeMarginBelowThreshold, ModulusMismatch
from .heisenberg import HeisenbergElement, apply_pi, matrix_coefficient
from .signals import Signal, SignalDictionary

logger = logging.getLogger(__name__)

CDMA_SCENARIOS = ("synchronous", "asynchronous", "phase", "combined")
SEARCH_MODES = ("known", "full")


def _complex_noise(rng: np.random.Generator, std: float, size: int) -> np.ndarray:
    """Circular complex Gaussian with E|n|^2 = std^2 per sample."""
    if std <= 0:
        return np.zeros(size, dtype=np.complex128)
    return std / np.sqrt(2) * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


# ────────────────────────────────────────────────
# Radar
# ────────────────────────────────────────────────
@dataclass(frozen=True)
class RadarScenario:
    probe: Signal
    true_shift: HeisenbergElement
    noise: float = 0.0
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.probe.p != self.true_shift.p:
            raise ModulusMismatch(f"probe over F_{self.probe.p} with a shift over F_{self.true_shift.p}")
        if abs(self.probe.norm() - 1.0) > 1e-10:
            raise ValueError(f"radar probe must be a unit signal, got norm {self.probe.norm():.6g}")
        if self.noise < 0:
            raise ValueError(f"noise must be >= 0, got {self.noise}")


def radar_echo(scenario: RadarScenario) -> Signal:
    """e = pi(h0) probe, plus complex Gaussian noise when requested."""
    p = scenario.probe.p
    rng = np.random.default_rng(scenario.seed)
    coeffs = apply_pi(scenario.true_shift, scenario.probe.coeffs) + _complex_noise(rng, scenario.noise, p)
    h = scenario.true_shift
    return scenario.probe.with_coeffs(coeffs, unit=False, echo=[h.tau, h.w, h.z], noise=scenario.noise)


def _peaks(magnitudes: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per table: flat argmax, peak and runner-up magnitudes."""
    flat = magnitudes.reshape(magnitudes.shape[0], -1)
    top_two = np.sort(flat, axis=1)[:, -2:]
    return flat.argmax(axis=1), top_two[:, 1], top_two[:, 0]


def radar_detect(probe: Signal, echo: Signal, *, gap: float = AMBIGUITY_GAP) -> HeisenbergElement:
    """
    Estimate h0 (mod center) as the inverse of the argmax of |m_{probe,echo}|
    over V.
    """
    if probe.p != echo.p:
        raise ModulusMismatch(f"probe over F_{probe.p} and echo over F_{echo.p}")
    p = probe.p
    magnitudes = np.abs(surfaces(probe.coeffs, echo.coeffs))
    flat = magnitudes.reshape(-1)
    order = np.argsort(flat, kind="stable")[::-1]
    first, second = int(order[0]), int(order[1])
    if flat[first] - flat[second] <= gap:
        witnesses = [
            {"tau": (-(idx // p)) % p, "w": (-(idx % p)) % p, "value": float(flat[idx])}
            for idx in (first, second)
        ]
        raise AmbiguousPeak(
            f"top matched-filter magnitudes {flat[first]:.9f} and {flat[second]:.9f} are within {gap}",
            witnesses,
        )
    tau, w = divmod(first, p)
    return HeisenbergElement(-tau, -w, 0, p)


def radar_sweep(
    probe: Signal,
    shifts: Sequence[Tuple[int, int]] | None = None,
    *,
    noise: float = 0.0,
    seed: int = DEFAULT_SEED,
    gap: float = AMBIGUITY_GAP,
) -> pd.DataFrame:
    """Echo and detect every shift in one batch; shifts default to all of V."""
    p = probe.p
    if shifts is None:
        shifts = [(tau, w) for tau in range(p) for w in range(p)]
    shift_arr = np.asarray(shifts, dtype=np.int64).reshape(-1, 2) % p
    echoes = np.empty((shift_arr.shape[0], p), dtype=np.complex128)
    for row, (tau, w) in enumerate(shift_arr.tolist()):
        rng = np.random.default_rng((seed, row))
        echoes[row] = apply_pi(HeisenbergElement(tau, w, 0, p), probe.coeffs) + _complex_noise(rng, noise, p)

    probes = np.broadcast_to(probe.coeffs, echoes.shape)
    argmax, peak, runner_up = _peaks(np.abs(surfaces(probes, echoes)))
    est_tau = (-(argmax // p)) % p
    est_w = (-(argmax % p)) % p
    frame = pd.DataFrame(
        {
            "tau": shift_arr[:, 0],
            "w": shift_arr[:, 1],
            "est_tau": est_tau,
            "est_w": est_w,
            "peak": peak,
            "runner_up": runner_up,
        }
    )
    frame["separation"] = frame["peak"] - frame["runner_up"]
    frame["ambiguous"] = frame["separation"] <= gap
    frame["recovered"] = (frame["tau"] == frame["est_tau"]) & (frame["w"] == frame["est_w"]) & ~frame["ambiguous"]
    logger.debug(
        "radar sweep over F_%d: %d/%d recovered, min separation %.4f",
        p,
        int(frame["recovered"].sum()),
        len(frame),
        float(frame["separation"].min()),
    )
    return frame


# ────────────────────────────────────────────────
# CDMA
# ────────────────────────────────────────────────
def roots_of_unity(order: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(order) / order)


def decode_threshold(order: int) -> float:
    """Half the chordal gap between adjacent order-th roots of unity."""
    if order < 2:
        raise ValueError(f"bit alphabet needs at least 2 symbols, got {order}")
    return float(np.sin(np.pi / order))


@dataclass(frozen=True)
class CdmaUser:
    signal: Signal
    bit: complex
    shift: HeisenbergElement
    signal_id: int | None = None


@dataclass(frozen=True)
class CdmaScenario:
    users: List[CdmaUser]
    bit_order: int = 2
    noise: float = 0.0
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if not self.users:
            raise ValueError("a CDMA scenario needs at least one user")
        p = self.users[0].signal.p
        ids = [u.signal_id for u in self.users if u.signal_id is not None]
        if len(ids) != len(set(ids)):
            raise ValueError(f"CDMA users must draw distinct signals, got ids {ids}")
        for user in self.users:
            if user.signal.p != p or user.shift.p != p:
                raise ModulusMismatch("every CDMA user must live over the same F_p")
            if abs(abs(user.bit) - 1.0) > 1e-12:
                raise ValueError(f"bits must have unit modulus, got {user.bit}")
        decode_threshold(self.bit_order)

    @property
    def p(self) -> int:
        return self.users[0].signal.p


def cdma_transmit(scenario: CdmaScenario) -> Signal:
    """u = sum_i b_i pi(h_i) phi_i, plus optional noise."""
    p = scenario.p
    total = np.zeros(p, dtype=np.complex128)
    for user in scenario.users:
        total += user.bit * apply_pi(user.shift, user.signal.coeffs)
    total += _complex_noise(np.random.default_rng(scenario.seed), scenario.noise, p)
    return Signal(total, p, {"family": "cdma", "users": len(scenario.users)}, unit=False)


@dataclass(frozen=True)
class DecodeResult:
    bit: complex
    bit_index: int
    estimate: complex
    interference: float
    threshold: float
    shift: HeisenbergElement

    @property
    def margin(self) -> float:
        return self.threshold - self.interference

    @property
    def reliable(self) -> bool:
        return self.interference < self.threshold


def cdma_decode(
    received: Signal,
    signal: Signal,
    *,
    shift: HeisenbergElement | None = None,
    search: str = "known",
    bit_order: int = 2,
    strict: bool = True,
    log_failures: bool = True,
) -> DecodeResult:
    """
    Recover b_i as conj(m_{phi_i,u}(h_i^-1)) rounded to the nearest root of
    unity. In "full" mode h_i is first located as the peak of |m_{phi_i,u}|.
    """
    if search not in SEARCH_MODES:
        raise ValueError(f"Unsupported search '{search}'. Choose from: {', '.join(SEARCH_MODES)}.")
    p = signal.p
    if search == "known":
        if shift is None:
            raise ValueError("known-shift decoding needs the user's shift")
        probe_at = shift.inverse()
    else:
        magnitudes = np.abs(surfaces(signal.coeffs, received.coeffs))[0]
        tau, w = divmod(int(magnitudes.argmax()), p)
        probe_at = HeisenbergElement(tau, w, 0, p)

    estimate = np.conj(matrix_coefficient(signal, received, probe_at))
    roots = roots_of_unity(bit_order)
    index = int(np.argmin(np.abs(roots - estimate)))
    interference = float(abs(estimate - roots[index]))
    threshold = decode_threshold(bit_order)
    result = DecodeResult(complex(roots[index]), index, complex(estimate), interference, threshold, probe_at.inverse())
    if not result.reliable:
        message = f"decode interference {interference:.6f} reaches the threshold {threshold:.6f}"
        if strict:
            raise DecodeMarginBelowThreshold(message, interference, threshold)
        if log_failures:
            logger.warning(message)
    return result


def _draw_shift(rng: np.random.Generator, scenario: str, p: int) -> HeisenbergElement:
    tau = int(rng.integers(0, p)) if scenario in ("asynchronous", "combined") else 0
    w = int(rng.integers(0, p)) if scenario in ("phase", "combined") else 0
    return HeisenbergElement(tau, w, 0, p)


def random_cdma_scenario(
    dictionary: SignalDictionary,
    users: int,
    rng: np.random.Generator,
    *,
    bit_order: int = 2,
    scenario: str = "combined",
    noise: float = 0.0,
) -> Tuple[CdmaScenario, List[int]]:
    """k users with distinct dictionary signals, uniform bits and distortions; returns the bit indices too."""
    if scenario not in CDMA_SCENARIOS:
        raise ValueError(f"Unsupported scenario '{scenario}'. Choose from: {', '.join(CDMA_SCENARIOS)}.")
    if users > len(dictionary):
        raise ValueError(f"cannot draw {users} distinct signals from a dictionary of {len(dictionary)}")
    p = dictionary.p
    ids = rng.choice(len(dictionary), size=users, replace=False)
    bit_indices = rng.integers(0, bit_order, size=users).tolist()
    roots = roots_of_unity(bit_order)
    members = [
        CdmaUser(dictionary[int(i)], complex(roots[b]), _draw_shift(rng, scenario, p), int(i))
        for i, b in zip(ids, bit_indices)
    ]
    noise_seed = int(rng.integers(0, 2**63 - 1))
    return CdmaScenario(members, bit_order, noise, noise_seed), bit_indices


def cdma_sweep(
    dictionary: SignalDictionary,
    user_counts: Sequence[int],
    trials: int,
    *,
    seed: int = DEFAULT_SEED,
    bit_order: int = 2,
    scenario: str = "combined",
    search: str = "known",
    noise: float = 0.0,
    threads: int = 1,
) -> pd.DataFrame:
    """Bit-error rate and decode margins per user count over seeded trials."""
    rows: List[Dict[str, Any]] = []

    def trial(k: int, index: int) -> Tuple[int, List[float]]:
        rng = np.random.default_rng((seed, k, index))
        sc, truth = random_cdma_scenario(
            dictionary, k, rng, bit_order=bit_order, scenario=scenario, noise=noise
        )
        received = cdma_transmit(sc)
        errors, margins = 0, []
        for user, expected in zip(sc.users, truth):
            result = cdma_decode(
                received, user.signal, shift=user.shift, search=search,
                bit_order=bit_order, strict=False, log_failures=False,
            )
            errors += int(result.bit_index != expected)
            margins.append(result.margin)
        return errors, margins

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for k in user_counts:
            outcomes = list(pool.map(lambda i: trial(k, i), range(trials)))
            errors = sum(e for e, _ in outcomes)
            margins = np.array([m for _, ms in outcomes for m in ms])
            bits = k * trials
            rows.append(
                {
                    "users": k,
                    "trials": trials,
                    "bits": bits,
                    "errors": errors,
                    "ber": errors / bits if bits else 0.0,
                    "mean_margin": float(margins.mean()) if margins.size else float("nan"),
                    "min_margin": float(margins.min()) if margins.size else float("nan"),
                }
            )
            logger.debug("cdma k=%d: %d/%d bit errors", k, errors, bits)
            if margins.size and margins.min() <= 0:
                logger.warning("cdma k=%d: %d of %d decodes below the margin threshold", k, int(np.sum(margins <= 0)), bits)
    return pd.DataFrame(rows)
