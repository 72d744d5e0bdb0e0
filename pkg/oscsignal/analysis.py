from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Sequence, Tuple

import numpy as np
import pandas as pd

from .config import DEFAULT_PAIR_BUDGET, DEFAULT_SEED, DEFAULT_TOLERANCE, OVERLAP_TOLERANCE, UNIT_TOLERANCE
from .heisenberg import Line
from .oscillator import ExtendedDictionary
from .signals import Signal, SignalDictionary
from .tori import SPLIT, torus_catalog
from .weil import SL2Element, weil_operator

logger = logging.getLogger(__name__)

OSCILLATOR_KINDS = ("split-oscillator", "nonsplit-oscillator", "oscillator")

# Cells (signal or pair) x p^2 held in memory per FFT batch.
_BATCH_CELLS = 2**21


# ────────────────────────────────────────────────
# Ambiguity surfaces
# ────────────────────────────────────────────────
def _shift_index(p: int) -> np.ndarray:
    t = np.arange(p)
    return (t[None, :] + t[:, None]) % p


def surfaces(rows_a: np.ndarray, rows_b: np.ndarray) -> np.ndarray:
    """
    Batched S[n, tau, w] = <a_n, M_w L_tau b_n>.

    For fixed tau, w -> S is the DFT of a(t) conj(b(t + tau)), so each
    table costs p FFTs of length p.
    """
    a = np.atleast_2d(rows_a)
    b = np.atleast_2d(rows_b)
    p = a.shape[-1]
    products = a[:, None, :] * np.conj(b[:, _shift_index(p)])
    return np.fft.fft(products, axis=-1)


def ambiguity_surface(phi: Signal, other: Signal | None = None) -> np.ndarray:
    """p x p table [tau, w] of <phi, M_w L_tau other>; the ambiguity function when other is None."""
    other = phi if other is None else other
    return surfaces(phi.coeffs, other.coeffs)[0]


def _batch_size(p: int) -> int:
    return max(1, _BATCH_CELLS // (p * p))


def _batches(n: int, size: int) -> List[Tuple[int, int]]:
    return [(start, min(start + size, n)) for start in range(0, n, size)]


# ────────────────────────────────────────────────
# Report container
# ────────────────────────────────────────────────
@dataclass
class CorrelationReport:
    dictionary_id: str
    system_kind: str
    p: int
    size: int
    mode: str
    tolerance: float
    bounds: Dict[str, float]
    sections: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(section["passed"] for section in self.sections.values())

    def failures(self) -> List[str]:
        return [name for name, section in self.sections.items() if not section["passed"]]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dictionary_id": self.dictionary_id,
            "system_kind": self.system_kind,
            "p": self.p,
            "size": self.size,
            "mode": self.mode,
            "tolerance": self.tolerance,
            "bounds": dict(self.bounds),
            "passed": self.passed,
            "stability": stability_summary(self),
            "sections": self.sections,
        }


def oscillator_bounds(p: int) -> Dict[str, float]:
    """
    Non-split signals are held to 2/sqrt(p). Split-torus eigenvectors are
    characters normalised by 1/sqrt(p - 1), so the same character-sum
    estimates give 2 sqrt(p)/(p - 1) off the origin and 2/sqrt(p - 1) pointwise.
    """
    root = np.sqrt(p)
    return {
        "auto": 2 / root,
        "cross": 4 / root,
        "sup": 2 / root,
        "extended": 4 / root,
        "split_auto": 2 * root / (p - 1),
        "split_sup": 2 / np.sqrt(p - 1),
    }


def is_split_signal(provenance: Dict[str, Any]) -> bool:
    return provenance.get("family") in (SPLIT, "standard")


def bound_for(provenance: Dict[str, Any], p: int, key: str = "auto") -> float:
    """The oscillator bound that applies to one signal, by the kind of its torus."""
    bounds = oscillator_bounds(p)
    return bounds[f"split_{key}"] if is_split_signal(provenance) else bounds[key]


def _kind_labels(dictionary: SignalDictionary) -> List[str]:
    return [SPLIT if is_split_signal(prov) else str(prov.get("family", "external")) for prov in dictionary.provenance]


def _signal_limits(dictionary: SignalDictionary, bound: float, split_bound: float) -> np.ndarray:
    split = np.array([is_split_signal(prov) for prov in dictionary.provenance], dtype=bool)
    return np.where(split, split_bound, bound).astype(float).reshape(-1)


def _by_kind(
    labels: Sequence[str], values: np.ndarray, limits: np.ndarray, tolerance: float
) -> Dict[str, Dict[str, Any]]:
    """Per torus kind: signal count, achieved maximum, the bound applied and its violations."""
    if not len(labels):
        return {}
    frame = pd.DataFrame({"kind": list(labels), "value": values, "bound": limits})
    frame["violation"] = frame["value"] > frame["bound"] + tolerance
    summary = frame.groupby("kind").agg(
        signals=("value", "size"), achieved=("value", "max"), bound=("bound", "max"), violations=("violation", "sum")
    )
    return {
        str(kind): {
            "signals": int(row["signals"]),
            "max": float(row["achieved"]),
            "bound": float(row["bound"]),
            "violations": int(row["violations"]),
        }
        for kind, row in summary.iterrows()
    }


def heisenberg_bounds(p: int) -> Dict[str, float]:
    root = np.sqrt(p)
    return {"auto": 1.0, "cross": 1 / root, "sup": 1 / root}


def resolve_mode(dictionary: SignalDictionary | ExtendedDictionary, bounds: str = "auto") -> str:
    if bounds != "auto":
        return bounds
    return "heisenberg" if dictionary.system_kind == "heisenberg" else "oscillator"


# ────────────────────────────────────────────────
# Property 1: autocorrelation
# ────────────────────────────────────────────────
def _auto_maxima(coeffs: np.ndarray, *, threads: int = 1) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per signal: max off-origin |A|, its flat (tau * p + w) argmax, and |A(0,0) - 1|."""
    n, p = coeffs.shape

    def job(bounds: Tuple[int, int]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        start, stop = bounds
        table = np.abs(surfaces(coeffs[start:stop], coeffs[start:stop])).reshape(stop - start, -1)
        origin = np.abs(table[:, 0] - 1.0)
        table[:, 0] = -1.0
        return table.max(axis=1), table.argmax(axis=1), origin

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        parts = list(pool.map(job, _batches(n, _batch_size(p))))
    if not parts:
        empty = np.zeros(0)
        return empty, empty.astype(np.int64), empty
    return tuple(np.concatenate(column) for column in zip(*parts))  # type: ignore[return-value]


def verify_autocorrelation(
    dictionary: SignalDictionary,
    *,
    bound: float | None = None,
    split_bound: float | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
    threads: int = 1,
) -> Dict[str, Any]:
    """
    max over (tau, w) != 0 of |<phi, M_w L_tau phi>| per signal, against
    2/sqrt(p) for non-split signals and 2 sqrt(p)/(p - 1) for split ones.
    """
    p = dictionary.p
    limits_table = oscillator_bounds(p)
    bound = limits_table["auto"] if bound is None else bound
    split_bound = limits_table["split_auto"] if split_bound is None else split_bound
    limits = _signal_limits(dictionary, bound, split_bound)
    maxima, argmax, origin = _auto_maxima(dictionary.coeffs, threads=threads)
    section: Dict[str, Any] = {
        "bound": bound,
        "split_bound": split_bound,
        "max": 0.0,
        "origin_residual": float(origin.max(initial=0.0)),
        "per_signal": maxima.tolist(),
        "by_kind": _by_kind(_kind_labels(dictionary), maxima, limits, tolerance),
        "violations": int(np.sum(maxima > limits + tolerance)),
        "witness": None,
    }
    if maxima.size:
        worst = int(np.argmax(maxima))
        tau, w = divmod(int(argmax[worst]), p)
        section["max"] = float(maxima[worst])
        section["witness"] = {"signal": worst, "tau": tau, "w": w, "value": float(maxima[worst])}
    section["passed"] = section["violations"] == 0 and section["origin_residual"] <= tolerance
    return section


def verify_line_pattern(
    dictionary: SignalDictionary,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    threads: int = 1,
) -> Dict[str, Any]:
    """|A_phi(v)| is the indicator of phi's line, for every chirp."""
    p = dictionary.p
    indicators: Dict[Tuple[int, int], np.ndarray] = {}
    errors = np.zeros(len(dictionary))
    witness = None
    for start, stop in _batches(len(dictionary), _batch_size(p)):
        block = dictionary.coeffs[start:stop]
        tables = np.abs(surfaces(block, block))
        for offset, table in enumerate(tables):
            i = start + offset
            direction = tuple(dictionary.provenance[i].get("direction", ()))
            if len(direction) != 2:
                raise ValueError(f"signal {i} carries no line direction in its provenance")
            if direction not in indicators:
                indicators[direction] = Line(direction[0], direction[1], p).indicator()
            diff = np.abs(table - indicators[direction])
            errors[i] = diff.max()
            if witness is None or errors[i] > witness["error"]:
                tau, w = np.unravel_index(int(diff.argmax()), diff.shape)
                witness = {"signal": i, "tau": int(tau), "w": int(w), "value": float(table[tau, w]), "error": float(errors[i])}
    return {
        "max_error": float(errors.max(initial=0.0)),
        "per_signal": errors.tolist(),
        "violations": int(np.sum(errors > tolerance)),
        "witness": witness,
        "passed": bool(np.all(errors <= tolerance)),
    }


def verify_same_line_pattern(
    dictionary: SignalDictionary,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
) -> Dict[str, Any]:
    """For distinct chirps on one line L, |m_{phi,phi'}| is the indicator of a translate v + L."""
    p = dictionary.p
    rows: Dict[Tuple[int, int], List[int]] = {}
    for index, prov in enumerate(dictionary.provenance):
        direction = tuple(prov.get("direction", ()))
        if len(direction) != 2:
            raise ValueError(f"signal {index} carries no line direction in its provenance")
        rows.setdefault(direction, []).append(index)

    pairs_checked = 0
    max_error = 0.0
    violations = 0
    witness = None
    for direction, members in sorted(rows.items()):
        pairs = np.array(list(itertools.combinations(members, 2)), dtype=np.int64).reshape(-1, 2)
        if not pairs.size:
            continue
        indicator = Line(direction[0], direction[1], p).indicator()
        for ii, jj in _pair_chunks(pairs[:, 0], pairs[:, 1], _batch_size(p)):
            tables = np.abs(surfaces(dictionary.coeffs[ii], dictionary.coeffs[jj]))
            for offset, table in enumerate(tables):
                tau0, w0 = np.unravel_index(int(table.argmax()), table.shape)
                error = float(np.abs(table - np.roll(indicator, (tau0, w0), axis=(0, 1))).max())
                pairs_checked += 1
                violations += int(error > tolerance)
                if witness is None or error > max_error:
                    witness = {"pair": [int(ii[offset]), int(jj[offset])], "translate": [int(tau0), int(w0)], "error": error}
                max_error = max(max_error, error)
    return {
        "pairs": pairs_checked,
        "max_error": max_error,
        "violations": violations,
        "witness": witness,
        "passed": violations == 0,
    }


# ────────────────────────────────────────────────
# Property 2: crosscorrelation
# ────────────────────────────────────────────────
def _row_pairs(n: int, groups: np.ndarray | None) -> Iterable[Tuple[np.ndarray, np.ndarray]]:
    for i in range(n - 1):
        j = np.arange(i + 1, n)
        if groups is not None:
            j = j[groups[j] != groups[i]]
        if j.size:
            yield np.full(j.size, i), j


def _sample_pairs(
    n: int, count: int, seed: int, groups: np.ndarray | None
) -> Tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    i = rng.integers(0, n, size=count)
    j = rng.integers(0, n - 1, size=count)
    j = j + (j >= i)
    i, j = np.minimum(i, j), np.maximum(i, j)
    if groups is not None:
        keep = groups[i] != groups[j]
        i, j = i[keep], j[keep]
    return i, j


def _pair_chunks(i: np.ndarray, j: np.ndarray, size: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    return [(i[start:stop], j[start:stop]) for start, stop in _batches(i.size, size)]


def verify_crosscorrelation(
    dictionary: SignalDictionary,
    *,
    bound: float | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
    seed: int = DEFAULT_SEED,
    groups: Sequence[Any] | None = None,
    threads: int = 1,
) -> Dict[str, Any]:
    """
    max over pairs phi != phi' and all (tau, w) of |<phi, M_w L_tau phi'>|.

    Every unordered pair is swept when pairs * p^2 fits the budget; above
    that a seeded uniform sample of budget // p^2 pairs is used. Pairs in
    the same group (when groups are given) are skipped.
    """
    p = dictionary.p
    n = len(dictionary)
    bound = oscillator_bounds(p)["cross"] if bound is None else bound
    labels = None if groups is None else np.asarray(pd.factorize(pd.Series(list(map(str, groups))))[0])
    total_pairs = n * (n - 1) // 2
    cells = p * p
    size = _batch_size(p)

    if total_pairs * cells <= pair_budget:
        mode = "full"
        rows = list(_row_pairs(n, labels))
        if rows:
            i = np.concatenate([r[0] for r in rows])
            j = np.concatenate([r[1] for r in rows])
        else:
            i = j = np.zeros(0, dtype=np.int64)
        chunks = _pair_chunks(i, j, size)
    else:
        mode = "sampled"
        count = max(1, pair_budget // cells)
        i, j = _sample_pairs(n, count, seed, labels)
        chunks = _pair_chunks(i, j, size)
        logger.warning(
            "cross-correlation over %d pairs exceeds the budget of %d cells; sampling %d pairs (seed %d)",
            total_pairs,
            pair_budget,
            count,
            seed,
        )

    coeffs = dictionary.coeffs

    def job(chunk: Tuple[np.ndarray, np.ndarray]) -> Tuple[float, int, int, int, int]:
        ii, jj = chunk
        table = np.abs(surfaces(coeffs[ii], coeffs[jj])).reshape(ii.size, -1)
        flat = int(np.argmax(table))
        row, cell = divmod(flat, cells)
        return float(table.reshape(-1)[flat]), int(ii[row]), int(jj[row]), cell, int(np.sum(table.max(axis=1) > bound + tolerance))

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(job, chunks))

    evaluated = int(sum(chunk[0].size for chunk in chunks))
    best = None
    violations = 0
    for value, i, j, cell, bad in results:
        violations += bad
        if best is None or value > best[0]:
            best = (value, i, j, cell)
    section: Dict[str, Any] = {
        "bound": bound,
        "mode": mode,
        "pairs_total": total_pairs,
        "pairs_evaluated": evaluated,
        "coverage": evaluated / total_pairs if total_pairs else 1.0,
        "seed": seed if mode == "sampled" else None,
        "max": 0.0,
        "violations": violations,
        "witness": None,
    }
    if best is not None:
        tau, w = divmod(best[3], p)
        section["max"] = best[0]
        section["witness"] = {"pair": [best[1], best[2]], "tau": tau, "w": w, "value": best[0]}
    section["passed"] = violations == 0
    return section


# ────────────────────────────────────────────────
# Property 3: supremum / PAPR
# ────────────────────────────────────────────────
def verify_supremum_and_papr(
    dictionary: SignalDictionary,
    *,
    mode: str = "oscillator",
    tolerance: float = DEFAULT_TOLERANCE,
    unit_tolerance: float = UNIT_TOLERANCE,
) -> Dict[str, Any]:
    p = dictionary.p
    magnitudes = np.abs(dictionary.coeffs)
    sup = magnitudes.max(axis=1, initial=0.0)
    papr = p * sup**2
    section: Dict[str, Any] = {
        "sup_max": float(sup.max(initial=0.0)),
        "papr_max": float(papr.max(initial=0.0)),
        "per_signal_sup": sup.tolist(),
        "per_signal_papr": papr.tolist(),
    }
    if mode == "heisenberg":
        target = 1 / np.sqrt(p)
        # the frequency line (0, 1) carries the point masses delta_a
        point_mass = np.array([prov.get("direction") == [0, 1] for prov in dictionary.provenance], dtype=bool)
        deviation = np.abs(magnitudes - target).max(axis=1, initial=0.0)
        deviation[point_mass] = 0.0
        section["bound"] = target
        section["point_masses"] = int(point_mass.sum())
        section["max_deviation"] = float(deviation.max(initial=0.0))
        bad = deviation > unit_tolerance
    else:
        bounds = oscillator_bounds(p)
        limits = _signal_limits(dictionary, bounds["sup"], bounds["split_sup"])
        section["bound"] = bounds["sup"]
        section["split_bound"] = bounds["split_sup"]
        section["by_kind"] = _by_kind(_kind_labels(dictionary), sup, limits, tolerance)
        bad = sup > limits + tolerance
    section["violations"] = int(np.sum(bad))
    section["witness"] = None
    if bad.any():
        worst = int(np.flatnonzero(bad)[np.argmax(sup[bad])])
        section["witness"] = {"signal": worst, "t": int(magnitudes[worst].argmax()), "value": float(sup[worst])}
    section["passed"] = not bad.any()
    return section


# ────────────────────────────────────────────────
# Property 4: Fourier invariance and SL2 equivariance
# ────────────────────────────────────────────────
def _rows_by_torus(dictionary: SignalDictionary) -> Dict[int, np.ndarray]:
    grouped: Dict[int, List[int]] = {}
    for index, prov in enumerate(dictionary.provenance):
        if "torus" not in prov:
            raise ValueError(f"signal {index} carries no torus in its provenance")
        grouped.setdefault(int(prov["torus"]), []).append(index)
    return {torus_id: np.asarray(rows) for torus_id, rows in grouped.items()}


def verify_weil_equivariance(
    dictionary: SignalDictionary,
    element: SL2Element,
    *,
    tolerance: float = OVERLAP_TOLERANCE,
) -> Dict[str, Any]:
    """rho(g) phi must match a signal of B_{gTg^-1} up to a unit phase, for every phi in B_T."""
    p = dictionary.p
    catalog = torus_catalog(p)
    rho = weil_operator(element).entries
    rows = _rows_by_torus(dictionary)
    best = np.zeros(len(dictionary))
    missing = []
    for torus_id, indices in sorted(rows.items()):
        target = catalog.conjugate(catalog[torus_id], element)
        if target.torus_id not in rows:
            missing.append(target.torus_id)
            continue
        images = dictionary.coeffs[indices] @ rho.T
        overlaps = np.abs(images @ dictionary.coeffs[rows[target.torus_id]].conj().T)
        best[indices] = overlaps.max(axis=1)
    worst = int(np.argmin(best)) if best.size else 0
    passed = bool(np.all(best > 1 - tolerance)) and not missing
    return {
        "element": list(element.as_tuple()),
        "min_overlap": float(best.min(initial=1.0)),
        "violations": int(np.sum(best <= 1 - tolerance)),
        "missing_tori": sorted(set(missing)),
        "witness": None if passed else {"signal": worst, "value": float(best[worst]) if best.size else 0.0},
        "passed": passed,
    }


def verify_fourier_invariance(
    dictionary: SignalDictionary,
    *,
    tolerance: float = OVERLAP_TOLERANCE,
    element: SL2Element | None = None,
) -> Dict[str, Any]:
    """Equivariance under the Weyl element plus the eigenvector check on B_{T_w}."""
    p = dictionary.p
    weyl = SL2Element.weyl(p) if element is None else element
    section = verify_weil_equivariance(dictionary, weyl, tolerance=tolerance)

    catalog = torus_catalog(p)
    fixed_torus = catalog.torus_of(weyl)
    rows = _rows_by_torus(dictionary)
    eigen = None
    if fixed_torus is not None and fixed_torus.torus_id in rows:
        block = dictionary.coeffs[rows[fixed_torus.torus_id]]
        rho = weil_operator(weyl).entries
        self_overlap = np.abs(np.sum((block @ rho.T) * block.conj(), axis=1))
        eigen = {
            "torus": fixed_torus.torus_id,
            "kind": fixed_torus.kind,
            "min_overlap": float(self_overlap.min(initial=1.0)),
            "passed": bool(np.all(self_overlap > 1 - tolerance)),
        }
    section["weyl_torus"] = eigen
    section["passed"] = section["passed"] and (eigen is None or eigen["passed"])
    return section


# ────────────────────────────────────────────────
# Structural recovery, extended system, stability
# ────────────────────────────────────────────────
def overlap_matrix(first: SignalDictionary | np.ndarray, second: SignalDictionary | np.ndarray) -> np.ndarray:
    """M[i, j] = <first_i, second_j>."""
    a = first.coeffs if isinstance(first, SignalDictionary) else np.asarray(first)
    b = second.coeffs if isinstance(second, SignalDictionary) else np.asarray(second)
    return a @ b.conj().T


def is_permutation_phase(matrix: np.ndarray, *, tolerance: float = OVERLAP_TOLERANCE) -> bool:
    magnitudes = np.abs(np.asarray(matrix))
    if magnitudes.ndim != 2 or magnitudes.shape[0] != magnitudes.shape[1]:
        return False
    big = magnitudes > 1 - tolerance
    small = magnitudes < tolerance
    return bool(
        np.all(big | small)
        and np.all(big.sum(axis=0) == 1)
        and np.all(big.sum(axis=1) == 1)
    )


def verify_extended_inner_products(
    extended: ExtendedDictionary,
    *,
    bound: float | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
    seed: int = DEFAULT_SEED,
) -> Dict[str, Any]:
    """|<phi, phi'>| <= 4/sqrt(p) for distinct translates, full or sampled under the budget."""
    p = extended.p
    n = len(extended)
    bound = oscillator_bounds(p)["extended"] if bound is None else bound
    total_pairs = n * (n - 1) // 2
    best = (0.0, -1, -1)
    violations = 0

    if total_pairs <= pair_budget:
        mode = "full"
        evaluated = total_pairs
        rows = max(1, _BATCH_CELLS // max(n, 1))
        everything = extended.coeffs_for(np.arange(n))
        for start, stop in _batches(n, rows):
            gram = np.abs(everything[start:stop] @ everything.conj().T)
            # keep j > i only
            gram[np.arange(stop - start)[:, None] + start >= np.arange(n)[None, :]] = -1.0
            violations += int(np.sum(gram > bound + tolerance))
            flat = int(np.argmax(gram))
            row, col = divmod(flat, n)
            if gram[row, col] > best[0]:
                best = (float(gram[row, col]), start + row, col)
    else:
        mode = "sampled"
        i, j = _sample_pairs(n, pair_budget, seed, None)
        evaluated = int(i.size)
        for ii, jj in _pair_chunks(i, j, _BATCH_CELLS // p):
            values = np.abs(np.sum(extended.coeffs_for(ii) * extended.coeffs_for(jj).conj(), axis=1))
            violations += int(np.sum(values > bound + tolerance))
            k = int(np.argmax(values))
            if values[k] > best[0]:
                best = (float(values[k]), int(ii[k]), int(jj[k]))
        logger.warning("extended inner products: sampling %d of %d pairs (seed %d)", evaluated, total_pairs, seed)

    witness = None
    if best[1] >= 0:
        witness = {"pair": [best[1], best[2]], "keys": [list(extended.key(best[1])), list(extended.key(best[2]))], "value": best[0]}
    return {
        "bound": bound,
        "mode": mode,
        "pairs_total": total_pairs,
        "pairs_evaluated": evaluated,
        "seed": seed if mode == "sampled" else None,
        "max": best[0],
        "violations": violations,
        "witness": witness,
        "passed": violations == 0,
    }


def stability_summary(report: CorrelationReport) -> Dict[str, Any]:
    """A system is stable when every signal is stably autocorrelated and every pair stably cross-correlated."""
    auto = report.sections.get("autocorrelation") or report.sections.get("line_pattern")
    cross = report.sections.get("crosscorrelation")
    return {
        "auto_max": None if auto is None else auto.get("max", auto.get("max_error")),
        "cross_max": None if cross is None else cross["max"],
        "auto_bound": report.bounds.get("auto"),
        "cross_bound": report.bounds.get("cross"),
        "stable": bool(auto is not None and cross is not None and auto["passed"] and cross["passed"]),
    }


def verify_dictionary(
    dictionary: SignalDictionary | ExtendedDictionary,
    *,
    bounds: str = "auto",
    tolerance: float = DEFAULT_TOLERANCE,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
) -> CorrelationReport:
    """Run every applicable property check and collect the results."""
    mode = resolve_mode(dictionary, bounds)
    extended = dictionary if isinstance(dictionary, ExtendedDictionary) else None
    base = extended.base if extended is not None else dictionary
    p = base.p
    limits = heisenberg_bounds(p) if mode == "heisenberg" else oscillator_bounds(p)
    report = CorrelationReport(
        dictionary_id=base.dictionary_id,
        system_kind=dictionary.system_kind,
        p=p,
        size=len(dictionary),
        mode=mode,
        tolerance=tolerance,
        bounds=limits,
    )

    if mode == "heisenberg":
        report.sections["line_pattern"] = verify_line_pattern(base, tolerance=tolerance, threads=threads)
        report.sections["same_line_pattern"] = verify_same_line_pattern(base, tolerance=tolerance)
        groups = [prov.get("line") for prov in base.provenance]
    else:
        report.sections["autocorrelation"] = verify_autocorrelation(
            base, bound=limits["auto"], split_bound=limits["split_auto"], tolerance=tolerance, threads=threads
        )
        groups = None
    report.sections["crosscorrelation"] = verify_crosscorrelation(
        base,
        bound=limits["cross"],
        tolerance=tolerance,
        pair_budget=pair_budget,
        seed=seed,
        groups=groups,
        threads=threads,
    )
    report.sections["supremum"] = verify_supremum_and_papr(base, mode=mode, tolerance=tolerance)
    if base.system_kind in OSCILLATOR_KINDS and all("torus" in prov for prov in base.provenance):
        report.sections["fourier_invariance"] = verify_fourier_invariance(base)
    if extended is not None:
        report.sections["extended_inner_products"] = verify_extended_inner_products(
            extended, bound=limits.get("extended"), tolerance=tolerance, pair_budget=pair_budget, seed=seed
        )

    if report.passed:
        logger.debug("dictionary %s passed %s", report.dictionary_id, list(report.sections))
    else:
        logger.warning("dictionary %s failed %s", report.dictionary_id, report.failures())
    return report


def signal_table(dictionary: SignalDictionary, report: CorrelationReport | None = None) -> pd.DataFrame:
    """One row per signal: provenance columns plus the per-signal report figures."""
    frame = pd.DataFrame.from_records([
        {key: value for key, value in prov.items() if not isinstance(value, (list, dict))}
        for prov in dictionary.provenance
    ])
    frame.index.name = "signal"
    magnitudes = np.abs(dictionary.coeffs)
    frame["sup"] = magnitudes.max(axis=1, initial=0.0)
    frame["papr"] = dictionary.p * frame["sup"] ** 2
    if report is not None:
        auto = report.sections.get("autocorrelation")
        if auto is not None:
            frame["auto_max"] = auto["per_signal"]
        line = report.sections.get("line_pattern")
        if line is not None:
            frame["line_error"] = line["per_signal"]
    return frame
