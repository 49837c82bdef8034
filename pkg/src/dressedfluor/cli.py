"""Command-line front end.

    dressedfluor spectrum CONFIG [--out DIR] [--no-plot] [--format csv|json]
    dressedfluor dressed CONFIG [--out DIR] [--no-plot]
    dressedfluor scan CONFIG --axis {rabi,detuning,kr_scale,theta} --values V1,V2,...
    dressedfluor presets list

``CONFIG`` is a YAML file or the name of a bundled preset. Exit codes: 0 on
success, 1 for invalid input, 2 for numerical failures.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import serialize
from .config import RunConfig, list_presets, load_config, load_preset
from .dressed import collective_basis_lab, level_diagram, manifold_report
from .dynamics import build_hamiltonian_lab
from .errors import NumericalError, ValidationError
from .geometry import EmitterLayout, LayoutMode
from .pipeline import compute_spectrum, prepare
from .qops import basis_label

log = logging.getLogger("dressedfluor")

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2
SCAN_AXES = ("rabi", "detuning", "kr_scale", "theta")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def resolve_config(ref: str) -> RunConfig:
    if Path(ref).is_file():
        return load_config(ref)
    return load_preset(ref)


def _out_dir(config: RunConfig, out) -> Path:
    return Path(out) if out else Path(config.output.directory)


def _spectrum_files(result, out: Path, fmt: str, plot: bool, title: str) -> dict:
    spec = result.spectrum
    written = {}
    if fmt == "csv":
        written["spectrum"] = serialize.atomic_write(out / "spectrum.csv", serialize.spectrum_to_csv(spec))
    else:
        written["spectrum"] = serialize.atomic_write(out / "spectrum.json", serialize.spectrum_to_json(spec))
    written["peaks"] = serialize.write_json(
        out / "peaks.json",
        serialize.peaks_to_json(
            result.peaks, method=spec.method.value, coherent_weight=spec.coherent_weight, grid_spacing=spec.spacing
        ),
    )
    written["assignment"] = serialize.write_json(out / "assignment.json", result.assignment.as_dict())
    sysm = result.system
    regime = sysm.regime.as_dict() if sysm.regime is not None else None
    written["regime"] = serialize.write_json(
        out / "regime.json",
        {
            "strong_regime": regime,
            "steady_state": {"residual": sysm.steady.residual, "spectral_gap": sysm.steady.spectral_gap},
        },
    )
    if plot:
        from .plotting import plot_spectrum

        path = out / "spectrum.png"
        plot_spectrum(spec, result.peaks, result.assignment, path=path, title=title)
        written["plot"] = path
    return written


def cmd_spectrum(config: RunConfig, out=None, plot=None, fmt=None) -> dict:
    out = _out_dir(config, out)
    plot = config.output.plot if plot is None else plot
    fmt = fmt or config.output.format
    result = compute_spectrum(config.layout, config.drive, config.spectrum, config.peaks)
    log.info("%s: %d peaks", config.name, len(result.peaks))
    return _spectrum_files(result, out, fmt, plot, config.name)


def cmd_dressed(config: RunConfig, out=None, plot=None) -> dict:
    out = _out_dir(config, out)
    plot = config.output.plot if plot is None else plot
    sysm = prepare(config.layout, config.drive, config.spectrum.observation_direction)
    n = config.layout.n_atoms
    lv = sysm.levels
    written = {}
    written["levels"] = serialize.write_json(
        out / "levels.json",
        {
            "energies": lv.energies.tolist(),
            "degenerate_groups": lv.degenerate_groups(1e-8 * max(1.0, config.drive.rabi)),
            "vectors": [
                {basis_label(i, n): [c.real, c.imag] for i, c in enumerate(lv.vectors[:, k]) if abs(c) > 1e-12}
                for k in range(len(lv.energies))
            ],
        },
    )
    written["transitions"] = serialize.write_json(out / "transitions.json", sysm.table.as_dict())
    written["blocks"] = serialize.write_json(out / "blocks.json", sysm.blocks.as_dict())
    diagram = level_diagram(lv, sysm.table, sysm.blocks)
    written["level_diagram"] = serialize.write_json(out / "level_diagram.json", diagram)
    # lab-frame collective states; omega_a = 1 so interaction shifts read directly
    states = collective_basis_lab(build_hamiltonian_lab(sysm.couplings, 1.0), n)
    report = manifold_report(states, config.drive).as_dict()
    for entry, st in zip(report["entries"], states):
        entry["interaction_energy"] = st.energy - st.excitation
        entry["swap_parity"] = st.swap_parity
        entry["components"] = {k: [v.real, v.imag] for k, v in st.components(n).items()}
    written["manifolds"] = serialize.write_json(out / "manifolds.json", report)
    if plot:
        from .plotting import plot_level_diagram

        path = out / "levels.png"
        plot_level_diagram(diagram, path=path, title=config.name)
        written["plot"] = path
    return written


def scan_point(config: RunConfig, axis: str, value: float) -> RunConfig:
    if axis == "rabi":
        return config.with_drive(rabi=value)
    if axis == "detuning":
        return config.with_drive(detuning=value)
    if axis == "kr_scale":
        if not value > 0:
            raise ValidationError("kr_scale values must be > 0")
        return config.with_layout(config.layout.scaled(value))
    if axis == "theta":
        lay = config.layout
        if lay.mode is not LayoutMode.PAIRWISE:
            raise ValidationError("the theta axis needs a pairwise layout")
        return config.with_layout(EmitterLayout.pairwise(lay.pair_kr, math.cos(value)))
    raise ValidationError(f"unknown scan axis {axis!r}; choose from {', '.join(SCAN_AXES)}")


def cmd_scan(config: RunConfig, axis: str, values, out=None, fmt=None, max_workers: int = 4) -> dict:
    if axis not in SCAN_AXES:
        raise ValidationError(f"unknown scan axis {axis!r}; choose from {', '.join(SCAN_AXES)}")
    values = [float(v) for v in values]
    if not all(math.isfinite(v) for v in values):
        raise ValidationError("scan values must be finite")
    if axis == "theta" and config.layout.mode is not LayoutMode.PAIRWISE:
        raise ValidationError("the theta axis needs a pairwise layout")
    out = _out_dir(config, out) / f"scan_{axis}"
    fmt = fmt or config.output.format

    def run(item):
        k, v = item
        try:
            cfg = scan_point(config, axis, v)
            result = compute_spectrum(cfg.layout, cfg.drive, cfg.spectrum, cfg.peaks)
            _spectrum_files(result, out / f"point_{k:03d}", fmt, False, cfg.name)
            side = result.peaks.sidebands(cfg.peaks.tolerance)
            return {"value": v, "status": "ok", "n_peaks": len(result.peaks),
                    "sideband_centers": [p.center for p in side]}
        except (ValidationError, NumericalError, np.linalg.LinAlgError) as exc:
            log.warning("scan point %s=%g failed: %s", axis, v, exc)
            return {"value": v, "status": "error", "error": str(exc)}

    workers = max(1, min(max_workers, len(values)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(run, enumerate(values)))
    lines = ["value,status,n_peaks,sideband_centers"]
    for r in rows:
        centers = ";".join(f"{c:.12g}" for c in r.get("sideband_centers", []))
        lines.append(f"{r['value']:.12g},{r['status']},{r.get('n_peaks', '')},{centers}")
    written = {
        "summary": serialize.write_json(out / "summary.json", {"axis": axis, "rows": rows}),
        "summary_csv": serialize.atomic_write(out / "summary.csv", "\n".join(lines) + "\n"),
    }
    return written


def _parse_values(text: str):
    text = text.strip()
    if not text:
        return []
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise ValidationError(f"could not parse scan values {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dressedfluor", description="Fluorescence spectra and dressed levels of interacting emitters.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_format=True):
        sp.add_argument("config", help="YAML config file or preset name")
        sp.add_argument("--out", help="output directory (overrides the config)")
        sp.add_argument("--no-plot", action="store_true", help="skip PNG output")
        if with_format:
            sp.add_argument("--format", choices=("csv", "json"), help="spectrum curve format")

    common(sub.add_parser("spectrum", help="compute spectrum, peaks and assignments"))
    common(sub.add_parser("dressed", help="dressed levels, transitions and coupling blocks"), with_format=False)
    sc = sub.add_parser("scan", help="spectra over a parameter axis")
    common(sc)
    sc.add_argument("--axis", required=True, choices=SCAN_AXES)
    sc.add_argument("--values", required=True, help="comma-separated values")
    pr = sub.add_parser("presets", help="bundled configurations")
    pr.add_argument("action", choices=("list",))
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "presets":
            for name, desc in list_presets():
                print(f"{name:20s} {desc}")
            return EXIT_OK
        config = resolve_config(args.config)
        plot = False if args.no_plot else None
        if args.command == "spectrum":
            written = cmd_spectrum(config, args.out, plot, args.format)
        elif args.command == "dressed":
            written = cmd_dressed(config, args.out, plot)
        else:
            written = cmd_scan(config, args.axis, _parse_values(args.values), args.out, args.format)
        for key, path in written.items():
            print(f"{key}: {path}")
        return EXIT_OK
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
