"""On-disk formats: datasets, spectrum sheets, sweep matrices, JSON reports.

All numeric text uses Python's shortest round-trip float repr, so a
write/read cycle is lossless and files diff cleanly.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError
from .types import ArCoefficientField, RangeBinDataset, SpectrumSheet

DATASET_COLUMNS = "m,t,re,im"


def _fmt(x: float) -> str:
    return repr(float(x))


def write_sheet(path, sheet: SpectrumSheet) -> None:
    """M x Q CSV, one bin per row."""
    lines = [",".join(_fmt(v) for v in row) for row in sheet.values]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_sheet(path) -> SpectrumSheet:
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            rows.append([float(tok) for tok in line.split(",")])
    if not rows or len({len(r) for r in rows}) != 1:
        raise InvalidArgumentError(f"{path}: malformed sheet CSV")
    return SpectrumSheet(np.array(rows))


def write_matrix(path, matrix: np.ndarray) -> None:
    """Row-major CSV; NaN entries (failed nodes) are written as empty cells."""
    lines = []
    for row in np.atleast_2d(matrix):
        lines.append(",".join("" if math.isnan(v) else _fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_matrix(path) -> np.ndarray:
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip() or rows:
            rows.append([float(tok) if tok.strip() else math.nan
                         for tok in line.split(",")])
    if not rows or len({len(r) for r in rows}) != 1:
        raise InvalidArgumentError(f"{path}: malformed matrix CSV")
    return np.array(rows)


def write_dataset(path, dataset: RangeBinDataset, *, seed=None, scene_hash=None) -> None:
    """Dataset file: one JSON header line, a column header, then one
    "m,t,re,im" row per sample (1-based indices). The truth sheet, when
    present, goes to a sibling CSV referenced from the header."""
    path = Path(path)
    header: dict = {"M": dataset.m, "N": dataset.n}
    if seed is not None:
        header["seed"] = int(seed)
    if scene_hash is not None:
        header["sceneHash"] = scene_hash
    if dataset.truth is not None:
        truth_name = path.stem + ".truth.csv"
        header["truth"] = truth_name
        write_sheet(path.parent / truth_name, dataset.truth)
    lines = [json.dumps(header, sort_keys=True), DATASET_COLUMNS]
    for m in range(dataset.m):
        for t in range(dataset.n):
            z = dataset.bins[m, t]
            lines.append(f"{m + 1},{t + 1},{_fmt(z.real)},{_fmt(z.imag)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_dataset(path):
    """Returns (dataset, header). The truth sheet is loaded when the header
    references one and the file exists next to the dataset."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if len(lines) < 3:
        raise InvalidArgumentError(f"{path}: truncated dataset file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"{path}: bad dataset header: {exc}") from exc
    if not isinstance(header, dict) or "M" not in header or "N" not in header:
        raise InvalidArgumentError(f"{path}: dataset header must carry M and N")
    if lines[1] != DATASET_COLUMNS:
        raise InvalidArgumentError(f"{path}: expected column header '{DATASET_COLUMNS}'")
    m, n = int(header["M"]), int(header["N"])
    bins = np.full((m, n), np.nan + 0j, dtype=complex)
    for line in lines[2:]:
        if not line.strip():
            continue
        toks = line.split(",")
        if len(toks) != 4:
            raise InvalidArgumentError(f"{path}: malformed sample row {line!r}")
        mi, ti = int(toks[0]) - 1, int(toks[1]) - 1
        if not (0 <= mi < m and 0 <= ti < n):
            raise InvalidArgumentError(f"{path}: sample index out of range in {line!r}")
        bins[mi, ti] = complex(float(toks[2]), float(toks[3]))
    if np.isnan(bins.real).any():
        raise InvalidArgumentError(f"{path}: dataset is missing samples")
    truth = None
    if "truth" in header:
        truth_path = path.parent / header["truth"]
        if truth_path.exists():
            truth = read_sheet(truth_path)
    return RangeBinDataset(bins, truth=truth), header


def field_to_json(field: ArCoefficientField) -> dict:
    return {
        "coefficients": [[[z.real, z.imag] for z in row] for row in field.coeffs],
        "errPowers": [float(v) for v in field.err_powers],
    }


def field_from_json(obj: dict) -> ArCoefficientField:
    coeffs = np.array([[complex(re, im) for re, im in row]
                       for row in obj["coefficients"]])
    return ArCoefficientField(coeffs, np.array(obj["errPowers"], dtype=float))


def write_json(path, obj: dict) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"{path}: not valid JSON: {exc}") from exc
