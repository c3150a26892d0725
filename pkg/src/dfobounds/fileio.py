"""File formats: point-set CSV, model JSON, gamma JSON, config JSON.

Point sets travel as CSV with header ``y1,...,yn`` and an optional trailing
``f`` column; the first data row is the ball center.  The radius comes from
the caller or from a JSON sidecar next to the file.  Models are JSON
objects with keys n, c, g, H.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from .geometry import SampleSet
from .poly import QuadraticPolynomial

__all__ = [
    "sidecar_path",
    "read_points",
    "write_points",
    "model_to_dict",
    "model_from_dict",
    "read_model",
    "write_model",
    "read_gamma",
    "read_config",
]


def sidecar_path(path) -> Path:
    """The JSON metadata file that accompanies a points CSV."""
    return Path(path).with_suffix(".json")


def _sidecar_delta(path) -> Optional[float]:
    side = sidecar_path(path)
    if not side.exists():
        return None
    try:
        payload = json.loads(side.read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{side}: invalid JSON sidecar: {exc}") from exc
    if not isinstance(payload, dict) or "delta" not in payload:
        raise ValueError(f'{side}: sidecar must be an object with a "delta" key')
    return float(payload["delta"])


def read_points(path, delta: Optional[float] = None) -> Tuple[SampleSet, Optional[np.ndarray]]:
    """Read a point-set CSV; returns the sample set and values if present.

    The radius is taken from ``delta`` when given, otherwise from the JSON
    sidecar ``<stem>.json``.  Parse errors name the offending data row.
    """
    path = Path(path)
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        header = [cell.strip() for cell in header]
        has_values = bool(header) and header[-1] == "f"
        coord_names = header[:-1] if has_values else header
        n = len(coord_names)
        expected = [f"y{i}" for i in range(1, n + 1)]
        if n == 0 or coord_names != expected:
            raise ValueError(
                f"{path}: header must be y1,...,yn with an optional trailing f "
                f"column, got {','.join(header)}"
            )
        rows = []
        values = []
        for index, row in enumerate(reader, start=1):
            if len(row) != len(header):
                raise ValueError(
                    f"{path}: data row {index} has {len(row)} fields, expected "
                    f"{len(header)}"
                )
            try:
                numbers = [float(cell) for cell in row]
            except ValueError:
                raise ValueError(
                    f"{path}: data row {index} contains a non-numeric field"
                ) from None
            if has_values:
                rows.append(numbers[:-1])
                values.append(numbers[-1])
            else:
                rows.append(numbers)
    if len(rows) < 2:
        raise ValueError(f"{path}: need at least 2 points, got {len(rows)}")
    if delta is None:
        delta = _sidecar_delta(path)
    if delta is None:
        raise ValueError(
            f"{path}: no radius given and no JSON sidecar {sidecar_path(path).name} "
            "found"
        )
    sample_set = SampleSet(np.asarray(rows, dtype=float), float(delta))
    return sample_set, (np.asarray(values, dtype=float) if has_values else None)


def write_points(path, points, values=None, delta: Optional[float] = None) -> None:
    """Write a point-set CSV; when delta is given, also write the sidecar."""
    points = np.asarray(points, dtype=float)
    header = [f"y{i}" for i in range(1, points.shape[1] + 1)]
    if values is not None:
        values = np.asarray(values, dtype=float).ravel()
        if values.size != points.shape[0]:
            raise ValueError(
                f"got {values.size} values for {points.shape[0]} points"
            )
        header.append("f")
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for index, point in enumerate(points):
            row = [str(float(x)) for x in point]
            if values is not None:
                row.append(str(float(values[index])))
            writer.writerow(row)
    if delta is not None:
        sidecar_path(path).write_text(
            json.dumps({"delta": float(delta)}) + "\n"
        )


def model_to_dict(model: QuadraticPolynomial) -> dict:
    return {
        "n": model.dim,
        "c": float(model.constant),
        "g": [float(x) for x in model.gradient],
        "H": [[float(x) for x in row] for row in model.hessian],
    }


def model_from_dict(payload: dict) -> QuadraticPolynomial:
    for key in ("n", "c", "g", "H"):
        if key not in payload:
            raise ValueError(f'model JSON is missing key "{key}"')
    n = int(payload["n"])
    g = np.asarray(payload["g"], dtype=float)
    H = np.asarray(payload["H"], dtype=float)
    if g.shape != (n,):
        raise ValueError(f"model gradient has shape {g.shape}, expected ({n},)")
    if H.shape != (n, n):
        raise ValueError(f"model Hessian has shape {H.shape}, expected ({n}, {n})")
    return QuadraticPolynomial(n, float(payload["c"]), g, H)


def read_model(path) -> QuadraticPolynomial:
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ValueError(f"{path}: model JSON must be an object")
    return model_from_dict(payload)


def write_model(path, model: QuadraticPolynomial, extra: Optional[dict] = None) -> dict:
    """Serialize a model to JSON; extra keys are merged into the object."""
    payload = model_to_dict(model)
    if extra:
        payload.update(extra)
    if path is not None:
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return payload


def read_gamma(path) -> np.ndarray:
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(payload, list):
        raise ValueError(f"{path}: gamma file must be a JSON array")
    return np.asarray([float(x) for x in payload], dtype=float)


def read_config(path) -> dict:
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return payload
