"""Plain-text and binary persistence for fields, spectra and reports.

Numbers are written with 17 significant digits so files round-trip exactly
and identical runs produce identical bytes.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .spacetime import SpaceTimeFunction, TimeWindow
from .torus import Field, Spectrum, TorusGrid

__all__ = [
    "fmt",
    "write_csv",
    "read_csv",
    "write_json",
    "save_field",
    "load_field",
    "save_field_binary",
    "load_field_binary",
    "save_spacetime",
    "load_spacetime",
]

_KINDS = {"field": 0, "spectrum": 1}
_BIN_MAGIC = b"SDBF"


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])
    return path


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with Path(path).open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    return rows[0], rows[1:]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path


# -- fields and spectra ---------------------------------------------------------


def _kind_of(obj) -> str:
    if isinstance(obj, Field):
        return "field"
    if isinstance(obj, Spectrum):
        return "spectrum"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _array_of(obj):
    return obj.values if isinstance(obj, Field) else obj.coeffs


def _build(kind, grid, data):
    return Field(grid, data) if kind == "field" else Spectrum(grid, data)


def save_field(path, obj: Field | Spectrum) -> Path:
    """CSV: ``# n=..,M=..,kind=..`` comment, then ``re,im`` rows in row-major order."""
    kind = _kind_of(obj)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    flat = np.asarray(_array_of(obj), complex).ravel()
    with path.open("w", newline="") as fh:
        fh.write(f"# n={obj.grid.dim},M={obj.grid.M},kind={kind}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["re", "im"])
        for z in flat:
            w.writerow([fmt(z.real), fmt(z.imag)])
    return path


def load_field(path) -> Field | Spectrum:
    with Path(path).open(newline="") as fh:
        first = fh.readline().strip()
        if not first.startswith("#"):
            raise ValueError(f"{path}: missing header line")
        meta = dict(item.split("=") for item in first[1:].strip().split(","))
        rows = list(csv.reader(fh))[1:]
    grid = TorusGrid(int(meta["n"]), int(meta["M"]))
    data = np.array([float(r[0]) + 1j * float(r[1]) for r in rows])
    if meta["kind"] not in _KINDS:
        raise ValueError(f"{path}: unknown kind {meta['kind']!r}")
    return _build(meta["kind"], grid, data)


def save_field_binary(path, obj: Field | Spectrum) -> Path:
    """Magic, three little-endian int64 (n, M, kind), then complex128 coefficients."""
    kind = _kind_of(obj)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = np.array([obj.grid.dim, obj.grid.M, _KINDS[kind]], dtype="<i8")
    body = np.asarray(_array_of(obj), dtype="<c16").ravel()
    path.write_bytes(_BIN_MAGIC + header.tobytes() + body.tobytes())
    return path


def load_field_binary(path) -> Field | Spectrum:
    raw = Path(path).read_bytes()
    if raw[:4] != _BIN_MAGIC:
        raise ValueError(f"{path}: not a field record")
    n, M, code = np.frombuffer(raw[4:28], dtype="<i8")
    kind = {v: k for k, v in _KINDS.items()}[int(code)]
    return _build(kind, TorusGrid(int(n), int(M)), np.frombuffer(raw[28:], dtype="<c16").copy())


def save_spacetime(path, h: SpaceTimeFunction) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        np.savez(
            fh,
            grid=np.array([h.grid.dim, h.grid.M]),
            window=np.array([h.window.length, h.window.samples, h.window.delta]),
            coeffs=h.coeffs,
        )
    return path


def load_spacetime(path) -> SpaceTimeFunction:
    with np.load(path) as data:
        n, M = (int(x) for x in data["grid"])
        length, samples, delta = data["window"]
        window = TimeWindow(float(length), int(samples), float(delta))
        return SpaceTimeFunction(TorusGrid(n, M), window, data["coeffs"])
