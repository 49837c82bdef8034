"""CSV/JSON serialization with atomic writes."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .spectrum import PeakSet, Spectrum, SpectrumMethod

SCHEMA_VERSION = "1.0"

__all__ = [
    "SCHEMA_VERSION",
    "atomic_write",
    "spectrum_to_csv",
    "spectrum_from_csv",
    "spectrum_to_json",
    "write_json",
    "read_json",
    "peaks_to_json",
    "peaks_from_json",
]


def atomic_write(path, text: str) -> Path:
    """Write ``text`` to ``path`` through a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _g12(x: float) -> str:
    return f"{x:.12g}"


def spectrum_to_csv(spectrum: Spectrum) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["omega", "S"])
    for om, s in zip(spectrum.omega, spectrum.values):
        w.writerow([_g12(om), _g12(s)])
    return buf.getvalue()


def spectrum_from_csv(text: str, coherent_weight: float = 0.0, method=SpectrumMethod.WINDOWED_FOURIER) -> Spectrum:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["omega", "S"]:
        raise ValidationError("spectrum CSV must start with the header 'omega,S'")
    data = np.array(rows[1:], dtype=float).reshape(-1, 2)
    return Spectrum(data[:, 0], data[:, 1], coherent_weight, method)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def spectrum_to_json(spectrum: Spectrum) -> str:
    return _json(
        {
            "schema_version": SCHEMA_VERSION,
            "method": spectrum.method.value,
            "coherent_weight": spectrum.coherent_weight,
            "omega": [float(_g12(x)) for x in spectrum.omega],
            "S": [float(_g12(x)) for x in spectrum.values],
        }
    )


def write_json(path, payload: dict) -> Path:
    return atomic_write(path, _json({"schema_version": SCHEMA_VERSION, **payload}))


def read_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def peaks_to_json(peaks: PeakSet, **extra) -> dict:
    return {"peaks": peaks.to_records(), **extra}


def peaks_from_json(payload: dict) -> PeakSet:
    return PeakSet.from_records(payload["peaks"])
