from __future__ import annotations

import json
import logging
import struct
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Tuple

import numpy as np

from .errors import DictionaryFormatError
from .oscillator import ExtendedDictionary
from .signals import SignalDictionary

logger = logging.getLogger(__name__)

MAGIC = b"OSC1"
HEADER = struct.Struct("<4sIII")  # magic, p, kind code, count

KIND_CODES: Dict[str, int] = {
    "external": 0,
    "heisenberg": 1,
    "split-oscillator": 2,
    "nonsplit-oscillator": 3,
    "oscillator": 4,
    "extended": 5,
    "standard": 6,
}
_KINDS_BY_CODE = {code: kind for kind, code in KIND_CODES.items()}


def _library_version() -> str:
    from . import __version__

    return __version__


def file_header() -> Dict[str, Any]:
    """The only non-reproducible part of every artifact."""
    return {
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "library_version": _library_version(),
    }


def _prepare(path: str | Path) -> Path:
    target = Path(path).expanduser()
    target.parent.mkdir(parents=True, exist_ok=True)
    return target


def _write_text(target: Path, text: str) -> None:
    try:
        target.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"Failed to write '{target}': {exc}") from exc


def sidecar_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def _split(dictionary: SignalDictionary | ExtendedDictionary) -> Tuple[SignalDictionary, str, Dict[str, Any]]:
    if isinstance(dictionary, ExtendedDictionary):
        return dictionary.base, dictionary.system_kind, dict(dictionary.metadata)
    return dictionary, dictionary.system_kind, dict(dictionary.metadata)


def _describe(base: SignalDictionary, kind: str, metadata: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "p": base.p,
        "system_kind": kind,
        "count": len(base),
        "dictionary_id": base.dictionary_id,
        "metadata": metadata,
    }


# ────────────────────────────────────────────────
# Save
# ────────────────────────────────────────────────
def save_dictionary(
    dictionary: SignalDictionary | ExtendedDictionary,
    path: str | Path,
    *,
    format: str = "json",
    config: Dict[str, Any] | None = None,
) -> Path:
    """
    Write a dictionary as JSON ([re, im] pairs at full precision) or as the
    OSC1 binary layout with a PATH.meta.json sidecar. Extended systems are
    stored through their base dictionary.
    """
    base, kind, metadata = _split(dictionary)
    target = _prepare(path)
    description = _describe(base, kind, metadata)

    if format == "json":
        document = {
            "header": file_header(),
            "config": dict(config or {}),
            "dictionary": description,
            "signals": [
                {
                    "id": index,
                    "provenance": base.provenance[index],
                    "coeffs": [[float(z.real), float(z.imag)] for z in base.coeffs[index]],
                }
                for index in range(len(base))
            ],
        }
        _write_text(target, json.dumps(document))
    elif format == "bin":
        payload = HEADER.pack(MAGIC, base.p, KIND_CODES.get(kind, 0), len(base))
        payload += np.ascontiguousarray(base.coeffs, dtype="<c16").tobytes()
        try:
            target.write_bytes(payload)
        except OSError as exc:
            raise OSError(f"Failed to write '{target}': {exc}") from exc
        sidecar = {
            "header": file_header(),
            "config": dict(config or {}),
            "dictionary": description,
            "provenance": base.provenance,
        }
        _write_text(sidecar_path(target), json.dumps(sidecar))
    else:
        raise ValueError(f"Unsupported format '{format}'. Choose from: json, bin.")
    logger.debug("wrote %d signals (%s) to %s", len(base), kind, target)
    return target


# ────────────────────────────────────────────────
# Load
# ────────────────────────────────────────────────
def _parse_json(data: bytes, source: Path) -> Dict[str, Any]:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DictionaryFormatError(f"{source} is not UTF-8 text", exc.start) from exc
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise DictionaryFormatError(f"{source}: {exc.msg}", offset) from exc
    if not isinstance(document, dict):
        raise DictionaryFormatError(f"{source}: top level must be an object", 0)
    return document


def _wrap(base: SignalDictionary, kind: str) -> SignalDictionary | ExtendedDictionary:
    if kind == "extended":
        return ExtendedDictionary(base)
    return base


def _from_json(document: Dict[str, Any], source: Path) -> SignalDictionary | ExtendedDictionary:
    try:
        description = document["dictionary"]
        p = int(description["p"])
        kind = str(description["system_kind"])
        metadata = dict(description.get("metadata", {}))
        records = document["signals"]
        coeffs = np.array(
            [[complex(re, im) for re, im in record["coeffs"]] for record in records],
            dtype=np.complex128,
        ).reshape(-1, p)
        provenance = [record["provenance"] for record in records]
    except (KeyError, TypeError, ValueError) as exc:
        raise DictionaryFormatError(f"{source}: malformed dictionary document ({exc})") from exc
    if coeffs.shape[0] != int(description.get("count", coeffs.shape[0])):
        raise DictionaryFormatError(
            f"{source}: header announces {description['count']} signals, found {coeffs.shape[0]}"
        )
    base_kind = metadata.get("base_system_kind", kind) if kind == "extended" else kind
    return _wrap(SignalDictionary(coeffs, provenance, base_kind, p, metadata), kind)


def _from_binary(data: bytes, source: Path) -> SignalDictionary | ExtendedDictionary:
    if len(data) < HEADER.size:
        raise DictionaryFormatError(f"{source}: truncated header", len(data))
    magic, p, code, count = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise DictionaryFormatError(f"{source}: bad magic {magic!r}", 0)
    expected = HEADER.size + count * p * 16
    if len(data) < expected:
        raise DictionaryFormatError(
            f"{source}: payload holds {len(data) - HEADER.size} bytes, {count} x {p} signals need {count * p * 16}",
            len(data),
        )
    if len(data) > expected:
        raise DictionaryFormatError(f"{source}: {len(data) - expected} trailing bytes", expected)
    coeffs = np.frombuffer(data, dtype="<c16", count=count * p, offset=HEADER.size).reshape(count, p)
    kind = _KINDS_BY_CODE.get(code)
    if kind is None:
        raise DictionaryFormatError(f"{source}: unknown system kind code {code}", 8)

    sidecar = sidecar_path(source)
    metadata: Dict[str, Any] = {}
    provenance: List[Dict[str, Any]]
    if sidecar.exists():
        document = _parse_json(sidecar.read_bytes(), sidecar)
        metadata = dict(document.get("dictionary", {}).get("metadata", {}))
        provenance = list(document.get("provenance", []))
    else:
        logger.warning("%s has no sidecar; provenance is reduced to signal indices", source)
        provenance = [{"family": "external", "index": i} for i in range(count)]
    if len(provenance) != count:
        raise DictionaryFormatError(f"{sidecar}: {len(provenance)} provenance records for {count} signals")
    base_kind = metadata.get("base_system_kind", kind) if kind == "extended" else kind
    return _wrap(SignalDictionary(coeffs, provenance, base_kind, int(p), metadata), kind)


def load_dictionary(path: str | Path) -> SignalDictionary | ExtendedDictionary:
    """Read either format; the OSC1 magic selects the binary reader."""
    source = Path(path).expanduser()
    data = source.read_bytes()
    if data[: len(MAGIC)] == MAGIC:
        return _from_binary(data, source)
    return _from_json(_parse_json(data, source), source)


# ────────────────────────────────────────────────
# Reports and scenarios
# ────────────────────────────────────────────────
def save_report(report: Dict[str, Any], path: str | Path, *, config: Dict[str, Any] | None = None) -> Path:
    target = _prepare(path)
    document = {"header": file_header(), "config": dict(config or {}), "report": report}
    _write_text(target, json.dumps(document, indent=2, default=_jsonable))
    return target


def load_scenario(path: str | Path) -> Dict[str, Any]:
    source = Path(path).expanduser()
    return _parse_json(source.read_bytes(), source)


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")
