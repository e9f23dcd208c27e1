"""Renderers: one artifact set in, one raster image out.

All figures use the non-interactive Agg backend and write with fixed
metadata, so identical inputs produce byte-identical images.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Circle  # noqa: E402

from .schemas import (  # noqa: E402
    SchemaError,
    overlay_centers,
    read_summary,
    read_sweep_csv,
    read_timeseries_csv,
    read_wigner_csv,
)

KINDS = ("heatmap", "timeseries", "sweep")

# the Wigner function of any state is bounded by |W| <= 2/pi
WIGNER_BOUND = 2.0 / math.pi


@dataclass(frozen=True)
class PlotJob:
    """One rendering request: input artifacts, output path, kind, style."""

    kind: str
    inputs: tuple[str, ...]
    output: str
    title: str | None = None
    dpi: int = 150
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}; "
                             f"choose from {', '.join(KINDS)}")
        if not self.inputs:
            raise ValueError("at least one input file is required")


def _split_inputs(inputs):
    csvs = [p for p in inputs if not p.endswith(".json")]
    jsons = [p for p in inputs if p.endswith(".json")]
    if len(jsons) > 1:
        raise SchemaError("at most one summary.json input is supported")
    summary = read_summary(jsons[0]) if jsons else None
    return csvs, summary


def _save(fig, job: PlotJob):
    directory = os.path.dirname(os.path.abspath(job.output))
    os.makedirs(directory, exist_ok=True)
    fig.savefig(job.output, dpi=job.dpi, metadata={"Software": "plotkit"})
    plt.close(fig)


def _render_heatmap(job: PlotJob):
    csvs, summary = _split_inputs(job.inputs)
    if len(csvs) != 1:
        raise SchemaError("heatmap needs exactly one wigner CSV input")
    grid = read_wigner_csv(csvs[0])
    fig, ax = plt.subplots(figsize=(5.4, 4.6))
    mesh = ax.pcolormesh(
        grid.x_axis, grid.p_axis, grid.values,
        cmap="RdBu_r", vmin=-WIGNER_BOUND, vmax=WIGNER_BOUND,
        shading="nearest", rasterized=True,
    )
    fig.colorbar(mesh, ax=ax, label=r"$W(x, p)$")
    if summary is not None:
        for cx, cp in overlay_centers(summary):
            ax.add_patch(Circle((cx, cp), radius=0.5, fill=False,
                                edgecolor="white", linewidth=1.6))
    ax.set_xlabel("x")
    ax.set_ylabel("p")
    ax.set_aspect("equal")
    ax.set_title(job.title or "Wigner function")
    _save(fig, job)


def _render_timeseries(job: PlotJob):
    csvs, summary = _split_inputs(job.inputs)
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    by_mode = (summary or {}).get("fidelity_by_mode")
    if by_mode is not None:
        times = (summary or {}).get("times")
        if times is None or any(len(v) != len(times) for v in by_mode.values()):
            raise SchemaError(
                "summary with 'fidelity_by_mode' must carry a matching "
                "'times' list"
            )
        for mode, values in by_mode.items():
            ax.plot(times, values, label=mode)
    for path in csvs:
        series = read_timeseries_csv(path)
        label = os.path.splitext(os.path.basename(path))[0]
        ax.plot(series.times, series.fidelity,
                label=f"{label}: fidelity" if by_mode else "fidelity")
        if not by_mode:
            ax.plot(series.times, series.parity, linestyle="--",
                    label="parity")
    if by_mode is None and not csvs:
        raise SchemaError("timeseries needs a timeseries CSV or a summary "
                          "with 'fidelity_by_mode'")
    ax.set_xlabel("t (units of 1/K)")
    ax.set_ylabel("value")
    ax.legend()
    ax.set_title(job.title or "Time series")
    _save(fig, job)


def _render_sweep(job: PlotJob):
    csvs, _ = _split_inputs(job.inputs)
    if not csvs:
        raise SchemaError("sweep needs at least one sweep CSV input")
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    for path in csvs:
        data = read_sweep_csv(path)
        label = os.path.splitext(os.path.basename(path))[0]
        ax.plot(data.strength, data.fidelity, marker="o", label=label)
    ax.set_xlabel("drive strength (units of K)")
    ax.set_ylabel("fidelity")
    ax.legend()
    ax.set_title(job.title or "Fidelity sweep")
    _save(fig, job)


_RENDERERS = {
    "heatmap": _render_heatmap,
    "timeseries": _render_timeseries,
    "sweep": _render_sweep,
}


def render(job: PlotJob) -> str:
    """Render one job and return the output path."""
    _RENDERERS[job.kind](job)
    return job.output
