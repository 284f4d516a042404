"""State files, TPS serialization, and deterministic JSON/CSV writers.

All floating-point numbers are written with 17 significant digits, which
round-trips IEEE doubles exactly, and objects are serialized with sorted keys
so identical inputs produce identical bytes.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError, StateFileError
from .tps import TensorProductStructure


def format_float(x: float) -> str:
    """17-significant-digit decimal that round-trips the double exactly."""
    if not np.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    text = format(float(x), ".17g")
    # keep a decimal point so the value parses back as a float (e.g. "-0.0")
    if "." not in text and "e" not in text and "E" not in text:
        text += ".0"
    return text


def _render(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = ", ".join(f"{json.dumps(str(k))}: {_render(v)}" for k, v in sorted(obj.items()))
        return "{" + items + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_render(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__} deterministically")


def dump_json(obj) -> str:
    """Canonical JSON text: sorted keys, 17-significant-digit floats, newline-terminated."""
    return _render(obj) + "\n"


def complex_pairs(values: np.ndarray) -> list[list[float]]:
    return [[float(v.real), float(v.imag)] for v in np.asarray(values, dtype=complex)]


def pairs_to_complex(pairs, what: str) -> np.ndarray:
    try:
        return np.array([complex(float(re), float(im)) for re, im in pairs], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise StateFileError(f"{what} must be a list of [re, im] pairs: {exc}") from exc


def tps_to_dict(tps: TensorProductStructure) -> dict:
    out = {
        "d1": tps.d1,
        "d2": tps.d2,
        "unitary": complex_pairs(tps.unitary.ravel()),
    }
    if tps.label_left is not None:
        out["label_left"] = list(tps.label_left)
    if tps.label_right is not None:
        out["label_right"] = list(tps.label_right)
    return out


def tps_from_dict(data: dict) -> TensorProductStructure:
    try:
        d1 = int(data["d1"])
        d2 = int(data["d2"])
        flat = pairs_to_complex(data["unitary"], "tps unitary")
    except KeyError as exc:
        raise StateFileError(f"tps block is missing key {exc}") from exc
    if flat.size != (d1 * d2) ** 2:
        raise ShapeError(
            f"tps unitary has {flat.size} entries, expected {(d1 * d2) ** 2}"
        )
    labels_l = tuple(data["label_left"]) if "label_left" in data else None
    labels_r = tuple(data["label_right"]) if "label_right" in data else None
    return TensorProductStructure(
        d1, d2, flat.reshape(d1 * d2, d1 * d2), label_left=labels_l, label_right=labels_r
    )


@dataclass
class StateFile:
    """On-disk representation of a state: dims, amplitudes, optional TPS, metadata."""

    d1: int
    d2: int
    amplitudes: np.ndarray
    tps: TensorProductStructure | None = None
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "dims": [self.d1, self.d2],
            "amplitudes": complex_pairs(self.amplitudes),
            "metadata": {str(k): str(v) for k, v in self.metadata.items()},
        }
        if self.tps is not None:
            out["tps"] = tps_to_dict(self.tps)
        return out


def load_state_file(path: str) -> StateFile:
    """Parse and validate a state file; normalizes near-unit amplitudes with a warning.

    Raises:
        StateFileError: unreadable or malformed file (with line diagnostics).
        ShapeError: amplitude count disagrees with the declared dims.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise StateFileError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise StateFileError(f"{path}: top level must be an object")
    try:
        dims = data["dims"]
        amps = data["amplitudes"]
    except KeyError as exc:
        raise StateFileError(f"{path}: missing required key {exc}") from exc
    if not (isinstance(dims, list) and len(dims) == 2):
        raise StateFileError(f"{path}: dims must be a [d1, d2] pair")
    d1, d2 = int(dims[0]), int(dims[1])
    if d1 < 1 or d2 < 1:
        raise StateFileError(f"{path}: dims must be positive, got {dims}")
    amplitudes = pairs_to_complex(amps, f"{path}: amplitudes")
    if amplitudes.size != d1 * d2:
        raise ShapeError(
            f"{path}: {amplitudes.size} amplitudes for dims {d1}x{d2} = {d1 * d2}"
        )
    n = float(np.linalg.norm(amplitudes))
    if n == 0.0:
        raise StateFileError(f"{path}: state has zero norm")
    if abs(n - 1.0) > 1e-8:
        raise StateFileError(f"{path}: state norm {n!r} deviates from 1 beyond 1e-8")
    # deviations at rounding scale are left untouched so write->read round-trips
    # reproduce the stored amplitudes bit-exactly
    if abs(n - 1.0) > 1e-12:
        warnings.warn(f"{path}: normalizing state with norm {n!r}", stacklevel=2)
        amplitudes = amplitudes / n
    tps = tps_from_dict(data["tps"]) if "tps" in data and data["tps"] is not None else None
    if tps is not None and (tps.d1, tps.d2) != (d1, d2):
        raise ShapeError(
            f"{path}: tps dims ({tps.d1}, {tps.d2}) disagree with state dims ({d1}, {d2})"
        )
    metadata = data.get("metadata", {})
    if not isinstance(metadata, dict):
        raise StateFileError(f"{path}: metadata must be an object")
    return StateFile(d1=d1, d2=d2, amplitudes=amplitudes, tps=tps, metadata=metadata)


def save_state_file(path: str, sf: StateFile) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_json(sf.to_dict()))


def render_csv(header: list[str], rows: list[list]) -> str:
    """Plain CSV text with deterministic float formatting."""
    def cell(v) -> str:
        if isinstance(v, (float, np.floating)):
            return format_float(float(v))
        return str(v)

    lines = [",".join(header)]
    lines.extend(",".join(cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_csv(header, rows))
