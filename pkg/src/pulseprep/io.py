"""Delimited and JSON output with stable, reproducible formatting."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .model import DirectionalSpectrum, SpectralGrid, Trajectory

SPECTRUM_COLUMNS = ["delta_omega", "re_right", "im_right", "re_left", "im_left"]


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def write_spectrum_csv(path: Path | str, spectrum: DirectionalSpectrum) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SPECTRUM_COLUMNS)
        for i, dw in enumerate(spectrum.grid.detunings):
            r = spectrum.right[i]
            l = spectrum.left[i]
            writer.writerow([_fmt(dw), _fmt(r.real), _fmt(r.imag), _fmt(l.real), _fmt(l.imag)])
    return path


def read_spectrum_csv(path: Path | str) -> DirectionalSpectrum:
    cols = read_csv_columns(path)
    dw = cols["delta_omega"]
    if dw.size < 2:
        raise ValueError(f"{path}: not enough rows for a spectrum")
    grid = SpectralGrid(half_width=float(dw[-1]), n_points=dw.size)
    return DirectionalSpectrum(
        grid=grid,
        right=cols["re_right"] + 1j * cols["im_right"],
        left=cols["re_left"] + 1j * cols["im_left"],
    )


def trajectory_columns(trajectory: Trajectory) -> list[str]:
    cols = ["t"]
    for j in range(trajectory.n):
        cols += [f"re_a_{j + 1}", f"im_a_{j + 1}", f"re_c_{j + 1}", f"im_c_{j + 1}"]
    return cols


def write_trajectory_csv(
    path: Path | str,
    trajectory: Trajectory,
    extra: dict[str, np.ndarray] | None = None,
) -> Path:
    """One row per recorded time; per-emitter columns then derived extras."""
    path = Path(path)
    header = trajectory_columns(trajectory)
    extra = extra or {}
    for name, values in extra.items():
        if len(values) != len(trajectory.times):
            raise ValueError(f"extra column {name!r} length mismatch")
        header.append(name)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i, t in enumerate(trajectory.times):
            row = [_fmt(t)]
            for j in range(trajectory.n):
                row += [
                    _fmt(trajectory.a[i, j].real),
                    _fmt(trajectory.a[i, j].imag),
                    _fmt(trajectory.c[i, j].real),
                    _fmt(trajectory.c[i, j].imag),
                ]
            row += [_fmt(extra[name][i]) for name in extra]
            writer.writerow(row)
    return path


def read_csv_columns(path: Path | str) -> dict[str, np.ndarray]:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{path}: empty CSV")
        out: dict[str, list[float]] = {name: [] for name in reader.fieldnames}
        for row in reader:
            for name in reader.fieldnames:
                out[name].append(float(row[name]))
    if not out or not next(iter(out.values())):
        raise ValueError(f"{path}: no data rows")
    return {name: np.asarray(vals) for name, vals in out.items()}


def write_json(path: Path | str, payload: dict) -> Path:
    path = Path(path)
    with path.open("w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return path
