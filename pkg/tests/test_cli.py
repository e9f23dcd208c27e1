"""Command-line runner: artifact schemas, determinism and exit codes."""

import json
import math
import os

import pytest

from catkerr.cli import main, parse_config_file


def read(path):
    with open(path) as fh:
        return fh.read()


def summary(out_dir):
    return json.loads(read(os.path.join(out_dir, "summary.json")))


class TestWignerCommand:
    def test_vacuum_peak_and_schema(self, tmp_path):
        out = str(tmp_path)
        code = main(["wigner", "--state", "vacuum", "--N", "40",
                     "--grid-points", "41", "--grid-span", "4",
                     "--out-dir", out])
        assert code == 0
        lines = read(os.path.join(out, "wigner_vacuum.csv")).splitlines()
        assert lines[0] == "x,p,w"
        assert len(lines) == 1 + 41 * 41
        data = summary(out)
        assert data["peak"] == pytest.approx([0.0, 0.0], abs=1e-9)
        assert 0.98 <= data["integral"] <= 1.02
        # peak row carries the convention-forced central value
        center = [ln for ln in lines[1:] if ln.startswith("0,0,")]
        assert len(center) == 1
        assert float(center[0].split(",")[2]) == pytest.approx(2 / math.pi, abs=1e-6)

    def test_byte_identical_reruns(self, tmp_path):
        out = str(tmp_path)
        argv = ["wigner", "--state", "cat-even", "--alpha", "2", "--N", "60",
                "--grid-points", "31", "--grid-span", "5", "--out-dir", out]
        assert main(argv) == 0
        first = read(os.path.join(out, "wigner_cat_even.csv"))
        assert main(argv) == 0
        assert read(os.path.join(out, "wigner_cat_even.csv")) == first


class TestSteadyStateCommand:
    def test_null_space_summary(self, tmp_path):
        out = str(tmp_path)
        code = main(["steady-state", "--K", "-1", "--kappa", "8", "--Ep", "-4",
                     "--N", "30", "--method", "null-space", "--grid-span", "3.8",
                     "--grid-points", "41", "--out-dir", out])
        assert code == 0
        data = summary(out)
        assert data["fidelity_to_ideal_mixture"] == pytest.approx(0.9655, abs=0.01)
        assert data["model"]["N"] == 30
        assert data["eigen_amplitude"]["r0"] == pytest.approx(12**0.25, abs=1e-6)
        assert "units" in data


class TestGateCommands:
    def test_gate_z_defaults(self, tmp_path):
        out = str(tmp_path)
        assert main(["gate-z", "--out-dir", out]) == 0
        data = summary(out)
        assert data["subcommand"] == "gate-z"
        assert data["fidelity"] == pytest.approx(0.999, abs=0.002)

    def test_nphoton_check(self, tmp_path):
        out = str(tmp_path)
        assert main(["nphoton-check", "--out-dir", out]) == 0
        data = summary(out)
        assert len(data["coherent_roots"]) == 3
        assert max(data["residual_norms"]) < 1e-4


class TestSweepCommand:
    def test_single_row(self, tmp_path):
        out = str(tmp_path)
        code = main(["sweep", "--gate", "z", "--start", "0.8", "--stop", "0.8",
                     "--steps", "1", "--Ep", "4", "--N", "25", "--out-dir", out])
        assert code == 0
        data = summary(out)
        assert len(data["rows"]) == 1
        lines = read(os.path.join(out, "sweep_z.csv")).splitlines()
        assert lines[0] == "strength,fidelity"
        assert len(lines) == 2


class TestConfigFile:
    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# comment line\n"
            "grid-points = 21\n"
            'state = "cat-even"\n'
            "alpha = 1.5\n"
            "N = 60\n"
        )
        out = str(tmp_path / "artifacts")
        code = main(["wigner", "--config", str(cfg), "--alpha", "2.0",
                     "--grid-span", "5", "--out-dir", out])
        assert code == 0
        data = summary(out)
        assert data["state"] == "cat-even"  # from config
        assert data["alpha"] == 2.0  # flag wins over config
        lines = read(os.path.join(out, "wigner_cat_even.csv")).splitlines()
        assert len(lines) == 1 + 21 * 21

    def test_parse_round_trip(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("K = 1.0\nkappa = 0.5  # inline comment\n")
        assert parse_config_file(str(cfg)) == {"K": "1.0", "kappa": "0.5"}

    def test_unknown_config_key_is_config_error(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("warp_factor = 9\n")
        out = str(tmp_path / "artifacts")
        assert main(["wigner", "--config", str(cfg), "--out-dir", out]) == 2


class TestExitCodes:
    def test_no_subcommand_prints_usage(self, capsys):
        assert main([]) == 2
        assert "usage" in capsys.readouterr().out.lower()

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as err:
            main(["frobnicate"])
        assert err.value.code == 2

    def test_invalid_configuration_value(self, tmp_path):
        # truncation far too small for the requested state
        out = str(tmp_path)
        code = main(["wigner", "--state", "coherent", "--alpha", "6",
                     "--N", "10", "--out-dir", out])
        assert code == 2
