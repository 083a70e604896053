"""Figure rendering for the report path.

Renders the per-chain jitter densities (before/after calibration, both
receivers) and the phase trace overview to PNG files next to the delimited
output.  Figures are a convenience view; the CSV/JSON artifacts remain the
machine-readable interface.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .config import RECEIVER_KINDS
from .metrics import CalibrationReport, kde_pdf


def _fs(x: np.ndarray) -> np.ndarray:
    return np.asarray(x) * 1e15


def render_kde_figure(report: CalibrationReport, chain: int, path: Path) -> Path | None:
    """Density of one chain's jitter, measured vs calibrated, local vs OTA."""
    w = report.warmup_cycles
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    plotted = False
    styles = {
        ("local", "measured"): dict(color="tab:red", ls="-"),
        ("ota", "measured"): dict(color="tab:orange", ls="-"),
        ("local", "calibrated"): dict(color="tab:green", ls="--"),
        ("ota", "calibrated"): dict(color="tab:blue", ls="--"),
    }
    for kind in RECEIVER_KINDS:
        series = {
            "measured": report.alpha_s(kind)[w:, chain],
            "calibrated": report.residual_alpha_s(kind)[w:, chain],
        }
        for which, alpha in series.items():
            try:
                kde = kde_pdf(alpha)
            except ValueError:
                continue
            ax.plot(
                _fs(kde.grid),
                kde.density * 1e-15,
                label=f"{kind} {which}",
                **styles[(kind, which)],
            )
            plotted = True
    if not plotted:
        plt.close(fig)
        return None
    ax.set_xlabel("jitter (fs)")
    ax.set_ylabel("density (1/fs)")
    ax.set_title(f"TX{chain + 1} jitter density")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def render_trace_figure(report: CalibrationReport, path: Path) -> Path:
    """Per-cycle phase estimates for every chain, one panel per receiver."""
    fig, axes = plt.subplots(2, 1, figsize=(7.2, 5.4), sharex=True)
    cycles = np.arange(report.num_cycles)
    for ax, kind in zip(axes, RECEIVER_KINDS):
        for m in range(report.num_chains):
            ax.plot(cycles, np.degrees(report.theta_rad[kind][:, m]), lw=0.7, label=f"TX{m + 1}")
        ax.set_ylabel(f"{kind} phase (deg)")
        ax.grid(True, alpha=0.3)
    axes[0].legend(fontsize=8, ncol=min(report.num_chains, 4))
    axes[1].set_xlabel("cycle")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def render_figures(report: CalibrationReport, out_dir: Path) -> list[Path]:
    """Render all report figures into ``out_dir/figures``."""
    fig_dir = Path(out_dir) / "figures"
    fig_dir.mkdir(parents=True, exist_ok=True)
    written = [render_trace_figure(report, fig_dir / "phase_traces.png")]
    for m in range(report.num_chains):
        p = render_kde_figure(report, m, fig_dir / f"kde_tx{m + 1}.png")
        if p is not None:
            written.append(p)
    return written
