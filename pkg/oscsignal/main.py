from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
import pandas as pd

from oscsignal.analysis import bound_for, signal_table, verify_dictionary
from oscsignal.config import (
    BOUND_MODES,
    DEFAULT_PAIR_BUDGET,
    DEFAULT_SEED,
    DEFAULT_TOLERANCE,
    FORMATS,
    SYSTEM_KINDS,
    RunConfig,
    default_threads,
)
from oscsignal.errors import ConfigError, DictionaryFormatError, InvalidModulus, OscillatorError
from oscsignal.oscillator import ExtendedDictionary, build_system
from oscsignal.plotting import plot_ambiguity_surface, write_html
from oscsignal.signals import SignalDictionary
from oscsignal.sims import CDMA_SCENARIOS, SEARCH_MODES, cdma_sweep, radar_sweep
from oscsignal.storage import load_dictionary, load_scenario, save_dictionary, save_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_CONSTRUCTION = 3


def _export_csv(frame: pd.DataFrame, path: str | None) -> None:
    if not path:
        return
    save_path = Path(path).expanduser()
    save_path.parent.mkdir(parents=True, exist_ok=True)
    try:
        frame.to_csv(save_path)
    except OSError as exc:
        raise OSError(f"Failed to save CSV to '{save_path}': {exc}") from exc


def _dictionary_for(config: RunConfig, source: str | None) -> SignalDictionary | ExtendedDictionary:
    if source:
        dictionary = load_dictionary(source)
        if config.p is not None and dictionary.p != config.p:
            raise ConfigError(f"dictionary {source} is over F_{dictionary.p}, expected F_{config.p}")
        return dictionary
    return build_system(config.p, config.system, threads=config.threads)


def _base(dictionary: SignalDictionary | ExtendedDictionary) -> SignalDictionary:
    return dictionary.base if isinstance(dictionary, ExtendedDictionary) else dictionary


# ────────────────────────────────────────────────
# Commands
# ────────────────────────────────────────────────
def cmd_generate(config: RunConfig) -> int:
    dictionary = build_system(config.p, config.system, threads=config.threads)
    out = config.out or f"oscsignal_{config.system}_p{config.p}.{config.format}"
    path = save_dictionary(dictionary, out, format=config.format, config=config.to_dict())
    print(f"{len(dictionary)} {dictionary.system_kind} signals over F_{config.p} -> {path}")
    return EXIT_OK


def cmd_verify(config: RunConfig, source: str) -> int:
    dictionary = load_dictionary(source)
    report = verify_dictionary(
        dictionary,
        bounds=config.bounds,
        tolerance=config.tolerance,
        pair_budget=config.pair_budget,
        seed=config.seed,
        threads=config.threads,
    )
    out = config.out or f"{source}.report.json"
    save_report(report.to_dict(), out, config=config.to_dict())
    _export_csv(signal_table(_base(dictionary), report), config.extra.get("csv"))

    print(f"Dictionary {report.dictionary_id} ({report.system_kind}, F_{report.p}, {report.size} signals)")
    for name, section in report.sections.items():
        value = section.get("max", section.get("max_error", section.get("min_overlap", section.get("sup_max"))))
        print(f"  {name:<24} {'PASS' if section['passed'] else 'FAIL'}  {value}")
        for kind, stats in section.get("by_kind", {}).items():
            print(f"    {kind:<22} max {stats['max']:.6f}  bound {stats['bound']:.6f}  violations {stats['violations']}")
    print(f"Report -> {out}")
    return EXIT_OK if report.passed else EXIT_VIOLATION


def _scenario_config(config: RunConfig, scenario: Dict[str, Any]) -> RunConfig:
    """Merge the scenario file into the run configuration."""
    p = scenario.get("p", config.p)
    if p is None:
        raise ConfigError("scenario needs a field 'p'")
    if config.p is not None and int(p) != config.p:
        raise ConfigError(f"scenario is over F_{p} but --p {config.p} was given")
    merged = RunConfig(
        command=config.command,
        p=int(p),
        system=str(scenario.get("system", config.system)),
        out=config.out,
        format=config.format,
        tolerance=config.tolerance,
        pair_budget=config.pair_budget,
        seed=int(scenario.get("seed", config.seed)),
        threads=config.threads,
        strict=config.strict,
        bounds=config.bounds,
        max_p=config.max_p,
        extra={**config.extra, "scenario_file": scenario},
    )
    return merged.validate()


def _shift_list(value: Any, p: int) -> List[Tuple[int, int]] | None:
    if value in (None, "all"):
        return None
    try:
        return [(int(tau) % p, int(w) % p) for tau, w in value]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"shifts must be 'all' or a list of [tau, w] pairs, got {value!r}") from exc


def cmd_radar(config: RunConfig, scenario_path: str) -> int:
    scenario = load_scenario(scenario_path)
    config = _scenario_config(config, scenario)
    dictionary = _base(_dictionary_for(config, scenario.get("dictionary")))
    probes = scenario.get("probes", "all")
    ids = range(len(dictionary)) if probes == "all" else [int(i) for i in probes]
    shifts = _shift_list(scenario.get("shifts", "all"), config.p)
    noise = float(scenario.get("noise", 0.0))

    frames = []
    for probe_id in ids:
        if not 0 <= probe_id < len(dictionary):
            raise ConfigError(f"probe {probe_id} is outside a dictionary of {len(dictionary)} signals")
        frame = radar_sweep(dictionary[probe_id], shifts, noise=noise, seed=config.seed + probe_id)
        frame.insert(0, "probe", probe_id)
        frames.append(frame)
    table = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()

    summary = {
        "probes": len(frames),
        "cells": int(len(table)),
        "recovered": int(table["recovered"].sum()) if len(table) else 0,
        "ambiguous": int(table["ambiguous"].sum()) if len(table) else 0,
        "min_separation": float(table["separation"].min()) if len(table) else None,
        "noise": noise,
    }
    summary["all_recovered"] = summary["recovered"] == summary["cells"]
    out = config.out or str(Path(scenario_path).with_suffix(".results.json"))
    save_report({"summary": summary, "rows": table.to_dict(orient="records")}, out, config=config.to_dict())
    _export_csv(table, config.extra.get("csv"))

    print(f"Radar over F_{config.p}: {summary['recovered']}/{summary['cells']} shifts recovered -> {out}")
    if not summary["all_recovered"]:
        logger.warning("%d radar cells not recovered (%d ambiguous)", summary["cells"] - summary["recovered"], summary["ambiguous"])
        if config.strict:
            return EXIT_VIOLATION
    return EXIT_OK


def cmd_cdma(config: RunConfig, scenario_path: str) -> int:
    scenario = load_scenario(scenario_path)
    config = _scenario_config(config, scenario)
    dictionary = _base(_dictionary_for(config, scenario.get("dictionary")))
    default_k = max(1, math.isqrt(config.p))
    user_counts = [int(k) for k in scenario.get("user_counts", [default_k])]
    trials = int(scenario.get("trials", 100))
    mode = scenario.get("scenario", "combined")
    search = scenario.get("search", "known")
    if mode not in CDMA_SCENARIOS:
        raise ConfigError(f"Unsupported scenario '{mode}'. Choose from: {', '.join(CDMA_SCENARIOS)}.")
    if search not in SEARCH_MODES:
        raise ConfigError(f"Unsupported search '{search}'. Choose from: {', '.join(SEARCH_MODES)}.")
    if trials < 1 or any(k < 1 or k > len(dictionary) for k in user_counts):
        raise ConfigError(f"need trials >= 1 and 1 <= users <= {len(dictionary)}, got {trials} and {user_counts}")

    table = cdma_sweep(
        dictionary,
        user_counts,
        trials,
        seed=config.seed,
        bit_order=int(scenario.get("bit_order", 2)),
        scenario=mode,
        search=search,
        noise=float(scenario.get("noise", 0.0)),
        threads=config.threads,
    )
    monotone = bool(np.all(np.diff(table["ber"].to_numpy()) >= 0)) if len(table) > 1 else True
    out = config.out or str(Path(scenario_path).with_suffix(".results.json"))
    save_report(
        {"ber_monotone": monotone, "rows": table.to_dict(orient="records")},
        out,
        config=config.to_dict(),
    )
    _export_csv(table, config.extra.get("csv"))

    print(table.to_string(index=False))
    print(f"Results -> {out}")
    failed = bool((table["min_margin"] <= 0).any())
    if failed and config.strict:
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_plot(config: RunConfig) -> int:
    dictionary = _base(_dictionary_for(config, config.extra.get("dictionary")))
    index = int(config.extra.get("index", 0))
    if not 0 <= index < len(dictionary):
        raise ConfigError(f"index {index} is outside a dictionary of {len(dictionary)} signals")
    fig = plot_ambiguity_surface(dictionary[index], bound=bound_for(dictionary.provenance[index], dictionary.p))
    out = config.out or f"ambiguity_{dictionary.system_kind}_p{dictionary.p}_{index}.html"
    path = write_html(fig, out)
    print(f"Ambiguity surface of signal {index} -> {path}")
    return EXIT_OK


# ────────────────────────────────────────────────
# Argument parsing
# ────────────────────────────────────────────────
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help="Worker threads (default: $OSC_THREADS or CPU count)")
    common.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--out", default=None, help="Output path")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    common.add_argument("--strict", action="store_true", help="Treat decode/peak failures as violations")
    common.add_argument("--csv", default="", help="Also export the result table to this CSV path")

    parser = argparse.ArgumentParser(
        prog="oscsignal",
        description="Oscillator sequences over F_p: generate, verify, simulate",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", parents=[common], help="Build and save a signal dictionary")
    gen.add_argument("--p", type=int, required=True)
    gen.add_argument("--system", default="oscillator", choices=SYSTEM_KINDS)
    gen.add_argument("--format", default="json", choices=FORMATS)

    ver = sub.add_parser("verify", parents=[common], help="Check correlation, supremum and Fourier bounds")
    ver.add_argument("dictionary")
    ver.add_argument("--bounds", default="auto", choices=BOUND_MODES)
    ver.add_argument("--pair-budget", type=int, default=DEFAULT_PAIR_BUDGET)

    for name, help_text in (("radar", "Exhaustive radar recovery"), ("cdma", "CDMA bit-error-rate sweep")):
        sim = sub.add_parser(name, parents=[common], help=help_text)
        sim.add_argument("scenario")
        sim.add_argument("--p", type=int, default=None)

    plot = sub.add_parser("plot", parents=[common], help="Write an ambiguity heatmap as HTML")
    plot.add_argument("--p", type=int, default=None)
    plot.add_argument("--system", default="oscillator", choices=SYSTEM_KINDS)
    plot.add_argument("--index", type=int, default=0)
    plot.add_argument("--dictionary", default=None)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    extra: Dict[str, Any] = {}
    for key in ("csv", "index", "dictionary", "scenario"):
        value = getattr(args, key, None)
        if value not in (None, ""):
            extra[key] = value
    if args.command == "plot" and args.p is None and "dictionary" not in extra:
        raise ConfigError("plot needs --p or --dictionary")
    config = RunConfig(
        command=args.command,
        p=getattr(args, "p", None),
        system=getattr(args, "system", "oscillator"),
        out=args.out,
        format=getattr(args, "format", "json"),
        tolerance=args.tolerance,
        pair_budget=getattr(args, "pair_budget", DEFAULT_PAIR_BUDGET),
        seed=args.seed,
        threads=args.threads if args.threads is not None else default_threads(),
        strict=args.strict,
        bounds=getattr(args, "bounds", "auto"),
        extra=extra,
    )
    return config.validate()


def run(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, dispatch and map failures onto the exit-code contract."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(levelname)s %(name)s: %(message)s")
    try:
        config = config_from_args(args)
        if args.command == "generate":
            return cmd_generate(config)
        if args.command == "verify":
            return cmd_verify(config, args.dictionary)
        if args.command == "radar":
            return cmd_radar(config, args.scenario)
        if args.command == "cdma":
            return cmd_cdma(config, args.scenario)
        return cmd_plot(config)
    except (ConfigError, InvalidModulus, DictionaryFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OscillatorError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
