"""Serialisation: path JSON/CSV, field stubs, measures, CSV writing.

All floats are serialised with 17 significant digits so that re-reading a
file reproduces the exact double; data files carry no timestamps, keeping
repeated runs byte-identical.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path as FsPath

import numpy as np

from .errors import SchemaError
from .lattice import ArrowField, sample_arrow_field
from .observables import WeightMeasure
from .paths import CoalescingPair, Path, make_pair

__all__ = [
    "fmt_float",
    "path_to_json",
    "path_from_json",
    "path_csv_rows",
    "read_pairs_file",
    "field_stub",
    "field_from_stub",
    "measure_csv_rows",
    "write_csv",
    "file_sha256",
]


def fmt_float(x) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def path_to_json(p: Path) -> dict:
    return {
        "t0": p.t0,
        "step": p.step,
        "values": [float(v) for v in p.values],
        "frozen_after": p.frozen_after,
    }


def path_from_json(obj: dict) -> Path:
    try:
        return Path(t0=float(obj["t0"]), step=float(obj["step"]),
                    values=np.asarray(obj["values"], dtype=float),
                    frozen_after=(None if obj.get("frozen_after") is None
                                  else int(obj["frozen_after"])))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed path object: {exc}") from exc


def path_csv_rows(p: Path) -> list[tuple[str, str]]:
    """(t, x) rows of one path."""
    return [(fmt_float(t), fmt_float(x))
            for t, x in zip(p.grid_times(), p.values)]


def read_pairs_file(path: str) -> list[tuple[str, CoalescingPair]]:
    """Pairs input for the metrics command: JSON with a "pairs" list of
    {id, left, right} objects holding path objects."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read pairs file {path}: {exc}") from exc
    if not isinstance(doc, dict) or "pairs" not in doc:
        raise SchemaError('pairs file must be an object with a "pairs" list')
    out = []
    for k, entry in enumerate(doc["pairs"]):
        if not {"id", "left", "right"} <= set(entry):
            raise SchemaError(f"pair #{k} misses id/left/right")
        pair = make_pair(path_from_json(entry["left"]), path_from_json(entry["right"]))
        out.append((str(entry["id"]), pair))
    return out


def field_stub(field: ArrowField) -> dict:
    """Persistable description; arrows are re-derived, never stored."""
    return {"seed": field.seed, "width": field.width, "height": field.height}


def field_from_stub(obj: dict) -> ArrowField:
    try:
        return sample_arrow_field(int(obj["seed"]), int(obj["width"]),
                                  int(obj["height"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed field stub: {exc}") from exc


def pair_set_csv_rows(pairs) -> list[tuple[str, str, str, str]]:
    """(pair, role, t, x) rows for every path of a pair set."""
    rows = []
    for k, pair in enumerate(pairs):
        for role, path in (("left", pair.left), ("right", pair.right)):
            for t, x in zip(path.grid_times(), path.values):
                rows.append((str(k), role, fmt_float(t), fmt_float(x)))
    return rows


def measure_csv_rows(mu: WeightMeasure) -> list[tuple[str, str, str]]:
    """(position, mass, kind) rows of an atomic measure."""
    return [(fmt_float(x), fmt_float(m), mu.kind)
            for x, m in zip(mu.positions, mu.masses)]


def write_csv(path: FsPath, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(row)


def file_sha256(path: FsPath) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()
