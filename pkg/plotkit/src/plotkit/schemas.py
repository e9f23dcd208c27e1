"""Parsers for the simulation CLI's artifact schemas.

Every reader validates the header and shape of its input and raises
:class:`SchemaError` with the file name and the reason on mismatch, so a
wrong file handed to the wrong renderer fails loudly instead of producing a
nonsense plot.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass

import numpy as np

WIGNER_HEADER = ["x", "p", "w"]
TIMESERIES_HEADER = ["t", "fidelity", "parity", "mean_n", "purity"]
SWEEP_HEADER = ["strength", "fidelity"]


class SchemaError(ValueError):
    """An input file does not match the documented artifact schema."""


@dataclass(frozen=True)
class WignerData:
    """Phase-space grid: ``values[i, j]`` is W at (x_axis[j], p_axis[i])."""

    x_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray

    def lobe_locations(self) -> list[tuple[float, float]]:
        """(x, p) coordinates of the local maxima of |W|, strongest first."""
        w = np.abs(self.values)
        interior = w[1:-1, 1:-1]
        is_peak = (
            (interior >= w[:-2, 1:-1])
            & (interior >= w[2:, 1:-1])
            & (interior >= w[1:-1, :-2])
            & (interior >= w[1:-1, 2:])
            & (interior > 0.25 * w.max())
        )
        ii, jj = np.nonzero(is_peak)
        order = np.argsort(interior[ii, jj])[::-1]
        return [
            (float(self.x_axis[j + 1]), float(self.p_axis[i + 1]))
            for i, j in zip(ii[order], jj[order])
        ]


@dataclass(frozen=True)
class TimeseriesData:
    times: np.ndarray
    fidelity: np.ndarray
    parity: np.ndarray
    mean_n: np.ndarray
    purity: np.ndarray


@dataclass(frozen=True)
class SweepData:
    strength: np.ndarray
    fidelity: np.ndarray


def _read_rows(path: str, expected_header: list[str]) -> np.ndarray:
    if not os.path.exists(path):
        raise SchemaError(f"{path}: file does not exist")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected header "
                              f"{','.join(expected_header)!r}") from None
        if [h.strip() for h in header] != expected_header:
            raise SchemaError(
                f"{path}: header {','.join(header)!r} does not match the "
                f"expected {','.join(expected_header)!r}"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(expected_header):
                raise SchemaError(
                    f"{path}:{lineno}: expected {len(expected_header)} "
                    f"columns, got {len(row)}"
                )
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: non-numeric value "
                                  f"({exc})") from None
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return np.asarray(rows, dtype=float)


def read_wigner_csv(path: str) -> WignerData:
    """Parse an ``x,p,w`` grid file (x varies fastest within each p row)."""
    rows = _read_rows(path, WIGNER_HEADER)
    x_axis = np.unique(rows[:, 0])
    p_axis = np.unique(rows[:, 1])
    if len(x_axis) * len(p_axis) != len(rows):
        raise SchemaError(
            f"{path}: {len(rows)} rows do not form a complete "
            f"{len(p_axis)}x{len(x_axis)} grid"
        )
    values = np.full((len(p_axis), len(x_axis)), np.nan)
    xi = np.searchsorted(x_axis, rows[:, 0])
    pi = np.searchsorted(p_axis, rows[:, 1])
    values[pi, xi] = rows[:, 2]
    if np.isnan(values).any():
        raise SchemaError(f"{path}: duplicate (x, p) points leave grid "
                          "cells unfilled")
    return WignerData(x_axis=x_axis, p_axis=p_axis, values=values)


def write_wigner_csv(data: WignerData, path: str):
    """Serialize a grid back to the ``x,p,w`` schema (round-trip partner of
    :func:`read_wigner_csv`)."""
    lines = [",".join(WIGNER_HEADER)]
    for i, p in enumerate(data.p_axis):
        for j, x in enumerate(data.x_axis):
            lines.append(f"{x:.10g},{p:.10g},{data.values[i, j]:.10g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_timeseries_csv(path: str) -> TimeseriesData:
    rows = _read_rows(path, TIMESERIES_HEADER)
    return TimeseriesData(
        times=rows[:, 0], fidelity=rows[:, 1], parity=rows[:, 2],
        mean_n=rows[:, 3], purity=rows[:, 4],
    )


def read_sweep_csv(path: str) -> SweepData:
    rows = _read_rows(path, SWEEP_HEADER)
    return SweepData(strength=rows[:, 0], fidelity=rows[:, 1])


def read_summary(path: str) -> dict:
    """Parse a run's ``summary.json``."""
    if not os.path.exists(path):
        raise SchemaError(f"{path}: file does not exist")
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(payload, dict):
        raise SchemaError(f"{path}: expected a JSON object at top level")
    return payload


def overlay_centers(summary: dict) -> list[tuple[float, float]]:
    """Expected lobe centers ±alpha0 from a steady-state summary.

    Returns an empty list when the summary carries no eigen-amplitude
    block (e.g. a plain state-plot run); raises :class:`SchemaError` if the
    block is present but malformed.
    """
    block = summary.get("eigen_amplitude")
    if block is None:
        return []
    try:
        re, im = (float(v) for v in block["alpha0"])
    except (KeyError, TypeError, ValueError):
        raise SchemaError(
            "summary eigen_amplitude block lacks a two-component 'alpha0'"
        ) from None
    if not (math.isfinite(re) and math.isfinite(im)):
        raise SchemaError("summary alpha0 components must be finite")
    return [(re, im), (-re, -im)]
