"""YAML run configuration with strict keys and line-aware error messages.

A configuration has five sections::

    name: equilateral_fig1          # optional
    layout:
      mode: pairwise                # or geometric
      pair_kr: [[0, 0.01, 0.01], [0.01, 0, 0.01], [0.01, 0.01, 0]]
      pair_cos_theta: magic         # number, N x N matrix, or "magic"
      # geometric mode instead takes
      # positions: [[x, y, z], ...]   (units of 1/k)
      # dipole_direction: [0, 0, 1]
    drive:
      rabi: 200
      detuning: 0
      wave_vector_direction: [0, 0, 1]
    spectrum:
      tau_spacing: 2.5e-4
      tau_length: 40
      omega_max: 700
      omega_spacing: 0.05
      method: fourier               # or eigen
      observation_direction: [1, 0, 0]
    peaks:
      prominence: 1.0               # decades
      separation: 2.0
      tolerance: 1.0
    output:
      directory: out
      format: csv                   # spectrum curve: csv or json
      plot: true

Every section except ``layout`` and ``drive`` is optional.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Dict, List, Optional, Tuple

import numpy as np
import yaml

from .dynamics import DriveParameters
from .errors import DressedFluorError, ValidationError
from .geometry import MAGIC_COS_THETA, EmitterLayout, derive_pair_geometry, normalized
from .pipeline import PeakSettings, SpectrumSettings

__all__ = ["ConfigError", "OutputSettings", "RunConfig", "parse_config", "load_config", "load_preset", "list_presets"]

_SCHEMA = {
    "name": None,
    "description": None,
    "layout": {"mode", "pair_kr", "pair_cos_theta", "positions", "dipole_direction"},
    "drive": {"rabi", "detuning", "wave_vector_direction"},
    "spectrum": {"tau_spacing", "tau_length", "omega_max", "omega_spacing", "method", "observation_direction"},
    "peaks": {"prominence", "separation", "tolerance"},
    "output": {"directory", "format", "plot"},
}


class ConfigError(ValidationError):
    """Configuration parse or validation failure, located by line."""


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "out"
    format: str = "csv"
    plot: bool = True

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise ValidationError(f"output format must be csv or json, got {self.format!r}")


@dataclass(frozen=True)
class RunConfig:
    layout: EmitterLayout
    drive: DriveParameters
    spectrum: SpectrumSettings = SpectrumSettings()
    peaks: PeakSettings = PeakSettings()
    output: OutputSettings = OutputSettings()
    name: str = "run"
    description: str = ""

    def with_drive(self, **kw) -> "RunConfig":
        return replace(self, drive=replace(self.drive, **kw))

    def with_layout(self, layout: EmitterLayout) -> "RunConfig":
        return replace(self, layout=layout)


def _line_map(node, path=(), out=None) -> Dict[Tuple[str, ...], int]:
    if out is None:
        out = {}
    if isinstance(node, yaml.MappingNode):
        for key, value in node.value:
            p = path + (str(key.value),)
            out[p] = key.start_mark.line + 1
            _line_map(value, p, out)
    return out


class _Located:
    def __init__(self, source, lines):
        self.source = source
        self.lines = lines

    def error(self, path, message):
        line = None
        for k in range(len(path), 0, -1):
            line = self.lines.get(tuple(path[:k]))
            if line is not None:
                break
        where = f"{self.source}:{line}" if line else self.source
        key = ".".join(path) if path else "<root>"
        return ConfigError(f"{where}: {key}: {message}")


def _matrix(value, loc, path):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise loc.error(path, "expected a number or a numeric matrix") from None
    return arr


def _vector(value, loc, path):
    arr = _matrix(value, loc, path)
    if arr.shape != (3,):
        raise loc.error(path, "expected a 3-vector")
    if not np.linalg.norm(arr) > 0:
        raise loc.error(path, "vector must be non-zero")
    return normalized(arr)


def _number(value, loc, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise loc.error(path, f"expected a number, got {value!r}")
    if not np.isfinite(value):
        raise loc.error(path, "must be finite")
    return float(value)


def _build(loc, path, fn):
    try:
        return fn()
    except ConfigError:
        raise
    except (DressedFluorError, ValueError, TypeError) as exc:
        raise loc.error(path, str(exc)) from None


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse and fully validate a YAML configuration document."""
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{source}:{mark.line + 1}:{mark.column + 1}" if mark else source
        raise ConfigError(f"{where}: YAML parse error: {getattr(exc, 'problem', exc)}") from None
    loc = _Located(source, _line_map(node) if node is not None else {})
    if not isinstance(data, dict):
        raise loc.error((), "configuration must be a mapping")

    for key, value in data.items():
        if key not in _SCHEMA:
            raise loc.error((str(key),), "unknown section")
        allowed = _SCHEMA[key]
        if allowed is None:
            continue
        if not isinstance(value, dict):
            raise loc.error((key,), "section must be a mapping")
        for sub in value:
            if sub not in allowed:
                raise loc.error((key, str(sub)), f"unknown key (allowed: {', '.join(sorted(allowed))})")
    for required in ("layout", "drive"):
        if required not in data:
            raise loc.error((required,), "missing required section")

    lay = data["layout"]
    mode = lay.get("mode", "pairwise" if "pair_kr" in lay else "geometric")
    if mode == "pairwise":
        for k in ("positions", "dipole_direction"):
            if k in lay:
                raise loc.error(("layout", k), "not allowed in pairwise mode")
        if "pair_kr" not in lay:
            raise loc.error(("layout",), "pairwise mode needs pair_kr")
        kr = _matrix(lay["pair_kr"], loc, ("layout", "pair_kr"))
        ct_raw = lay.get("pair_cos_theta", "magic")
        ct = MAGIC_COS_THETA if ct_raw == "magic" else _matrix(ct_raw, loc, ("layout", "pair_cos_theta"))
        try:
            layout = EmitterLayout.pairwise(kr, ct)
        except ValidationError as exc:
            key = "pair_cos_theta" if "pair_cos_theta" in str(exc) else "pair_kr"
            raise loc.error(("layout", key), str(exc)) from None
    elif mode == "geometric":
        for k in ("pair_kr", "pair_cos_theta"):
            if k in lay:
                raise loc.error(("layout", k), "not allowed in geometric mode")
        if "positions" not in lay:
            raise loc.error(("layout",), "geometric mode needs positions")
        pos = _matrix(lay["positions"], loc, ("layout", "positions"))
        dip = _vector(lay.get("dipole_direction", [0, 0, 1]), loc, ("layout", "dipole_direction"))
        layout = _build(loc, ("layout", "positions"), lambda: EmitterLayout.geometric(pos, dip))
        _build(loc, ("layout", "positions"), lambda: derive_pair_geometry(layout))
    else:
        raise loc.error(("layout", "mode"), f"mode must be pairwise or geometric, got {mode!r}")

    dr = data["drive"]
    if "rabi" not in dr:
        raise loc.error(("drive",), "missing rabi")
    rabi = _number(dr["rabi"], loc, ("drive", "rabi"))
    if rabi < 0:
        raise loc.error(("drive", "rabi"), f"must be >= 0, got {rabi:g}")
    det = _number(dr.get("detuning", 0.0), loc, ("drive", "detuning"))
    kdir = tuple(_vector(dr.get("wave_vector_direction", [0, 0, 1]), loc, ("drive", "wave_vector_direction")))
    drive = _build(loc, ("drive",), lambda: DriveParameters(rabi, det, kdir))

    sp = dict(data.get("spectrum") or {})
    kw = {}
    for k in ("tau_spacing", "tau_length", "omega_max", "omega_spacing"):
        if k in sp:
            kw[k] = _number(sp[k], loc, ("spectrum", k))
    if "method" in sp:
        kw["method"] = str(sp["method"])
    if "observation_direction" in sp:
        kw["observation_direction"] = tuple(_vector(sp["observation_direction"], loc, ("spectrum", "observation_direction")))
    spectrum = _build(loc, ("spectrum",), lambda: SpectrumSettings(**kw))

    pk = dict(data.get("peaks") or {})
    pkw = {k: _number(pk[k], loc, ("peaks", k)) for k in ("prominence", "separation", "tolerance") if k in pk}
    peaks = _build(loc, ("peaks",), lambda: PeakSettings(**pkw))
    if peaks.tolerance < spectrum.omega_spacing:
        raise loc.error(("peaks", "tolerance"), "assignment tolerance must be >= the spectrum grid spacing")

    out = dict(data.get("output") or {})
    okw = {}
    if "directory" in out:
        okw["directory"] = str(out["directory"])
    if "format" in out:
        okw["format"] = str(out["format"])
    if "plot" in out:
        if not isinstance(out["plot"], bool):
            raise loc.error(("output", "plot"), "expected true or false")
        okw["plot"] = out["plot"]
    output = _build(loc, ("output",), lambda: OutputSettings(**okw))

    return RunConfig(
        layout, drive, spectrum, peaks, output,
        name=str(data.get("name", "run")),
        description=str(data.get("description", "")),
    )


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), str(path))


def _preset_dir():
    return resources.files("dressedfluor") / "presets"


def list_presets() -> List[Tuple[str, str]]:
    """``(name, description)`` for every bundled preset."""
    out = []
    for entry in sorted(_preset_dir().iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".yaml"):
            cfg = parse_config(entry.read_text(encoding="utf-8"), entry.name)
            out.append((entry.name[: -len(".yaml")], cfg.description))
    return out


def load_preset(name: str) -> RunConfig:
    entry = _preset_dir() / f"{name}.yaml"
    if not entry.is_file():
        known = ", ".join(n for n, _ in list_presets())
        raise ConfigError(f"unknown preset {name!r} (known: {known})")
    return parse_config(entry.read_text(encoding="utf-8"), f"preset:{name}")
