"""Artifact schema parsing, round-tripping and error reporting."""

import json

import numpy as np
import pytest

from plotkit.schemas import (
    SchemaError,
    overlay_centers,
    read_summary,
    read_sweep_csv,
    read_timeseries_csv,
    read_wigner_csv,
    write_wigner_csv,
)


def make_wigner_csv(path, nx=5, npts=4):
    x = np.linspace(-2.0, 2.0, nx)
    p = np.linspace(-1.5, 1.5, npts)
    values = np.outer(np.cos(p), np.exp(-(x**2)))
    lines = ["x,p,w"]
    for i, pv in enumerate(p):
        for j, xv in enumerate(x):
            lines.append(f"{xv:.10g},{pv:.10g},{values[i, j]:.10g}")
    path.write_text("\n".join(lines) + "\n")
    return x, p, values


class TestWignerSchema:
    def test_parse_grid(self, tmp_path):
        path = tmp_path / "wigner_demo.csv"
        x, p, values = make_wigner_csv(path)
        data = read_wigner_csv(str(path))
        np.testing.assert_allclose(data.x_axis, x, atol=1e-9)
        np.testing.assert_allclose(data.p_axis, p, atol=1e-9)
        np.testing.assert_allclose(data.values, values, atol=1e-9)

    def test_round_trip(self, tmp_path):
        src = tmp_path / "wigner_a.csv"
        make_wigner_csv(src, nx=7, npts=6)
        first = read_wigner_csv(str(src))
        dst = tmp_path / "wigner_b.csv"
        write_wigner_csv(first, str(dst))
        second = read_wigner_csv(str(dst))
        np.testing.assert_allclose(second.x_axis, first.x_axis, atol=1e-12)
        np.testing.assert_allclose(second.p_axis, first.p_axis, atol=1e-12)
        np.testing.assert_allclose(second.values, first.values, atol=1e-12)

    def test_wrong_header_is_descriptive(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(SchemaError, match="does not match.*x,p,w"):
            read_wigner_csv(str(path))

    def test_incomplete_grid_rejected(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("x,p,w\n0,0,1\n1,0,1\n0,1,1\n")
        with pytest.raises(SchemaError, match="complete"):
            read_wigner_csv(str(path))

    def test_non_numeric_value_reports_line(self, tmp_path):
        path = tmp_path / "nan.csv"
        path.write_text("x,p,w\n0,0,oops\n")
        with pytest.raises(SchemaError, match=":2:"):
            read_wigner_csv(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError, match="does not exist"):
            read_wigner_csv(str(tmp_path / "absent.csv"))

    def test_lobe_locations_finds_two_gaussians(self, tmp_path):
        x = np.linspace(-4.0, 4.0, 81)
        p = np.linspace(-4.0, 4.0, 81)
        xx, pp = np.meshgrid(x, p)
        values = (np.exp(-2 * ((xx - 2) ** 2 + pp**2))
                  + np.exp(-2 * ((xx + 2) ** 2 + pp**2)))
        lines = ["x,p,w"] + [
            f"{xx[i, j]:.10g},{pp[i, j]:.10g},{values[i, j]:.10g}"
            for i in range(81) for j in range(81)
        ]
        path = tmp_path / "wigner_lobes.csv"
        path.write_text("\n".join(lines) + "\n")
        lobes = read_wigner_csv(str(path)).lobe_locations()
        assert len(lobes) == 2
        xs = sorted(lx for lx, _ in lobes)
        assert xs[0] == pytest.approx(-2.0, abs=0.11)
        assert xs[1] == pytest.approx(2.0, abs=0.11)


class TestTabularSchemas:
    def test_timeseries_parse(self, tmp_path):
        path = tmp_path / "timeseries.csv"
        path.write_text(
            "t,fidelity,parity,mean_n,purity\n"
            "0,1,1,4,1\n1,0.99,0.98,4.01,0.995\n"
        )
        data = read_timeseries_csv(str(path))
        np.testing.assert_allclose(data.times, [0.0, 1.0])
        np.testing.assert_allclose(data.fidelity, [1.0, 0.99])
        np.testing.assert_allclose(data.purity, [1.0, 0.995])

    def test_timeseries_rejects_sweep_header(self, tmp_path):
        path = tmp_path / "sweep_z.csv"
        path.write_text("strength,fidelity\n1,0.99\n")
        with pytest.raises(SchemaError, match="t,fidelity,parity"):
            read_timeseries_csv(str(path))

    def test_sweep_parse(self, tmp_path):
        path = tmp_path / "sweep_z.csv"
        path.write_text("strength,fidelity\n0.5,0.999\n1.5,0.97\n")
        data = read_sweep_csv(str(path))
        np.testing.assert_allclose(data.strength, [0.5, 1.5])
        np.testing.assert_allclose(data.fidelity, [0.999, 0.97])

    def test_wrong_column_count_reports_line(self, tmp_path):
        path = tmp_path / "sweep_z.csv"
        path.write_text("strength,fidelity\n0.5,0.999,extra\n")
        with pytest.raises(SchemaError, match=":2:"):
            read_sweep_csv(str(path))


class TestSummarySchema:
    def test_parse_and_overlay_centers(self, tmp_path):
        path = tmp_path / "summary.json"
        path.write_text(json.dumps({
            "subcommand": "steady-state",
            "eigen_amplitude": {"alpha0": [1.8, -0.3]},
        }))
        summary = read_summary(str(path))
        centers = overlay_centers(summary)
        assert centers == [(1.8, -0.3), (-1.8, 0.3)]

    def test_summary_without_amplitude_gives_no_overlay(self):
        assert overlay_centers({"subcommand": "wigner"}) == []

    def test_malformed_amplitude_block(self):
        with pytest.raises(SchemaError, match="alpha0"):
            overlay_centers({"eigen_amplitude": {"alpha0": [1.0]}})

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "summary.json"
        path.write_text("{not json")
        with pytest.raises(SchemaError, match="not valid JSON"):
            read_summary(str(path))
