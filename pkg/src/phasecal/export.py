"""Trace and report serialization.

Three artifacts per run directory:

* ``traces.csv`` -- one row per (cycle, chain, receiver) with the raw
  estimate, its jitter value and the calibrated residual.
* ``report.json`` -- the cycle-to-cycle jitter table (measured/calibrated
  for both receivers) plus Gaussianity stats and run metadata.
* ``kde_<receiver>_<which>_chain<m>.csv`` -- optional density grids.

Everything written is a pure function of (config, seed); no wall-clock
timestamps appear anywhere.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .config import RECEIVER_KINDS
from .metrics import CalibrationReport, CellStats, assemble_report, kde_pdf

TRACE_HEADER = ["cycle", "chain", "receiver", "theta_rad", "alpha_s", "residual_rad"]


def write_traces_csv(report: CalibrationReport, path: Path) -> Path:
    """Phase trace table, cycle-major then chain then receiver."""
    path = Path(path)
    alpha = {k: report.alpha_s(k) for k in RECEIVER_KINDS}
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for l in range(report.num_cycles):
            for m in range(report.num_chains):
                for kind in RECEIVER_KINDS:
                    writer.writerow(
                        [
                            l,
                            m,
                            kind,
                            f"{report.theta_rad[kind][l, m]:.17g}",
                            f"{alpha[kind][l, m]:.17g}",
                            f"{report.residual_rad[kind][l, m]:.17g}",
                        ]
                    )
    return path


def _stats_dict(stats: CellStats) -> dict:
    return {
        "rms_c2c_jitter_s": stats.rms_c2c_jitter_s,
        "mean_phase_rad": stats.mean_phase_rad,
        "skewness": stats.skewness,
        "excess_kurtosis": stats.excess_kurtosis,
    }


def report_to_dict(report: CalibrationReport) -> dict:
    """JSON-ready summary mirroring the per-chain jitter table."""
    cells = {}
    for kind in RECEIVER_KINDS:
        cells[kind] = {
            "measured": {
                f"chain_{m}": _stats_dict(report.measured[(kind, m)])
                for m in range(report.num_chains)
            },
            "calibrated": {
                f"chain_{m}": _stats_dict(report.calibrated[(kind, m)])
                for m in range(report.num_chains)
            },
        }
    # The transport is deliberately not recorded: runs over UDP and in
    # process must export byte-identical artifacts.
    return {
        "metadata": {
            "scenario": report.scenario,
            "seed": report.seed,
            "config_sha256": report.config_sha256,
            "carrier_freq_hz": report.carrier_freq_hz,
            "bandwidth_hz": report.bandwidth_hz,
            "num_cycles": report.num_cycles,
            "num_chains": report.num_chains,
            "warmup_cycles": report.warmup_cycles,
        },
        "cells": cells,
        "coherence": report.coherence,
    }


def write_report_json(report: CalibrationReport, path: Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n")
    return path


def load_report_json(path: Path) -> dict:
    """Load and sanity-check a previously exported report."""
    data = json.loads(Path(path).read_text())
    for key in ("metadata", "cells", "coherence"):
        if key not in data:
            raise ValueError(f"not a report file: missing {key!r}")
    for kind in RECEIVER_KINDS:
        if kind not in data["cells"]:
            raise ValueError(f"report is missing receiver {kind!r}")
    return data


def load_report_bundle(run_dir: Path) -> CalibrationReport:
    """Rebuild a full report object from an exported run directory."""
    run_dir = Path(run_dir)
    meta = load_report_json(run_dir / "report.json")["metadata"]
    L, M = meta["num_cycles"], meta["num_chains"]
    theta = {k: np.zeros((L, M)) for k in RECEIVER_KINDS}
    residual = {k: np.zeros((L, M)) for k in RECEIVER_KINDS}
    with (run_dir / "traces.csv").open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != TRACE_HEADER:
            raise ValueError(f"unexpected trace header: {header}")
        for row in reader:
            l, m, kind = int(row[0]), int(row[1]), row[2]
            theta[kind][l, m] = float(row[3])
            residual[kind][l, m] = float(row[5])
    return assemble_report(
        theta,
        residual,
        carrier_freq_hz=meta["carrier_freq_hz"],
        bandwidth_hz=meta["bandwidth_hz"],
        num_cycles=L,
        num_chains=M,
        warmup_cycles=meta["warmup_cycles"],
        seed=meta["seed"],
        scenario=meta["scenario"],
        config_sha256=meta["config_sha256"],
    )


def write_kde_csv(samples_s: np.ndarray, path: Path, bandwidth_s: float | None = None) -> Path:
    """Density grid of one jitter sample set, header ``x_s,density``."""
    kde = kde_pdf(samples_s, bandwidth_s=bandwidth_s)
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x_s", "density"])
        for x, d in zip(kde.grid, kde.density):
            writer.writerow([f"{x:.17g}", f"{d:.17g}"])
    return path


def export_traces(report: CalibrationReport, out_dir: Path, include_kde: bool = False) -> list[Path]:
    """Write all artifacts for a finished run; returns the paths written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [
        write_traces_csv(report, out_dir / "traces.csv"),
        write_report_json(report, out_dir / "report.json"),
    ]
    if include_kde:
        w = report.warmup_cycles
        for kind in RECEIVER_KINDS:
            alpha = report.alpha_s(kind)[w:]
            resid = report.residual_alpha_s(kind)[w:]
            for m in range(report.num_chains):
                for which, series in (("measured", alpha[:, m]), ("calibrated", resid[:, m])):
                    name = f"kde_{kind}_{which}_chain{m}.csv"
                    try:
                        written.append(write_kde_csv(series, out_dir / name))
                    except ValueError:
                        # Degenerate (constant) series have no density estimate.
                        continue
    return written
