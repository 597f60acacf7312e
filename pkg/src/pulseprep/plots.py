"""Figure rendering for scenario result directories.

Reads the CSV/JSON files written by run_scenario and renders SVG plots
next to them.  Uses the Agg backend and a fixed hash salt so repeated
renders of the same data are stable.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "pulseprep"

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import read_csv_columns  # noqa: E402

_SAVE_OPTS = {"format": "svg", "metadata": {"Date": None}}


def _save(fig, path: Path) -> Path:
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
    return path


def _spectrum_figure(result_dir: Path) -> Path:
    cols = read_csv_columns(result_dir / "input_spectrum.csv")
    dw = cols["delta_omega"]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, re_key, im_key, style in (
        ("input right", "re_right", "im_right", "-"),
        ("input left", "re_left", "im_left", "--"),
    ):
        dens = cols[re_key] ** 2 + cols[im_key] ** 2
        ax.plot(dw, dens, style, label=label)
    out_path = result_dir / "output_spectrum.csv"
    if out_path.exists():
        out = read_csv_columns(out_path)
        for label, re_key, im_key, style in (
            ("output right", "re_right", "im_right", "-."),
            ("output left", "re_left", "im_left", ":"),
        ):
            dens = out[re_key] ** 2 + out[im_key] ** 2
            ax.plot(out["delta_omega"], dens, style, label=label)
    ax.set_xlabel("detuning (units of emitter linewidth)")
    ax.set_ylabel("spectral density")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return _save(fig, result_dir / "spectrum.svg")


def _amplitudes_figure(result_dir: Path, n: int) -> Path:
    cols = read_csv_columns(result_dir / "trajectory.csv")
    t = cols["t"]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    detailed = n <= 2
    for j in range(1, n + 1):
        re = cols[f"re_a_{j}"]
        im = cols[f"im_a_{j}"]
        if detailed:
            ax.plot(t, re, label=f"Re a{j}")
            ax.plot(t, im, "--", label=f"Im a{j}")
        else:
            ax.plot(t, (re**2 + im**2) ** 0.5, label=f"|a{j}|")
    shelf = np.stack(
        [(cols[f"re_c_{j}"] ** 2 + cols[f"im_c_{j}"] ** 2) ** 0.5 for j in range(1, n + 1)]
    )
    if shelf.max() > 1e-6:
        for j in range(1, n + 1):
            ax.plot(t, shelf[j - 1], ":", label=f"|c{j}|")
    ax.set_xlabel("time (units of inverse linewidth)")
    ax.set_ylabel("amplitude")
    ax.legend(loc="best", fontsize=8, ncol=2)
    fig.tight_layout()
    return _save(fig, result_dir / "amplitudes.svg")


def _fidelity_figure(result_dir: Path) -> Path:
    cols = read_csv_columns(result_dir / "trajectory.csv")
    t = cols["t"]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(t, cols["fidelity"], label="fidelity")
    if "concurrence" in cols:
        ax.plot(t, cols["concurrence"], "--", label="concurrence")
    if "fidelity_shelf" in cols:
        ax.plot(t, cols["fidelity_shelf"], "-.", label="shelf fidelity")
    ax.set_xlabel("time (units of inverse linewidth)")
    ax.set_ylabel("overlap")
    ax.set_ylim(0.0, 1.05)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return _save(fig, result_dir / "fidelity.svg")


def _bars_figure(result_dir: Path, summary: dict) -> Path:
    amps = summary["amplitudes_at_arrival"]
    n = len(amps["re"])
    idx = list(range(1, n + 1))
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    width = 0.38
    ax.bar([i - width / 2 for i in idx], amps["re"], width, label="Re a_j")
    ax.bar([i + width / 2 for i in idx], amps["im"], width, label="Im a_j")
    tgt = summary["target_amplitudes"]
    ax.plot(idx, tgt["re"], "k_", markersize=18, label="target Re")
    ax.plot(idx, tgt["im"], "kx", markersize=8, label="target Im")
    ax.axhline(0.0, color="gray", linewidth=0.6)
    ax.set_xticks(idx)
    ax.set_xlabel("emitter index")
    ax.set_ylabel("amplitude at arrival time")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return _save(fig, result_dir / "amplitude_bars.svg")


def emit_plots(result_dir: Path | str) -> list[Path]:
    """Render all figures for one result directory, returning the paths."""
    result_dir = Path(result_dir)
    summary_path = result_dir / "summary.json"
    if not summary_path.exists():
        raise FileNotFoundError(f"no summary.json in {result_dir}")
    with summary_path.open() as fh:
        summary = json.load(fh)
    n = int(summary["n_emitters"])
    return [
        _spectrum_figure(result_dir),
        _amplitudes_figure(result_dir, n),
        _fidelity_figure(result_dir),
        _bars_figure(result_dir, summary),
    ]
