"""Tests for the command-line front end: configs, presets, exit codes, outputs."""

import io
import json
import contextlib

import numpy as np
import pytest

from nonholo.cli import (
    EXIT_CHECK,
    EXIT_CONFIG,
    EXIT_NUMERICAL,
    EXIT_OK,
    PRESETS,
    list_presets,
    main,
)


def run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


def write_config(tmp_path, cfg):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    return str(path)


class TestPresets:
    EXPECTED = {
        "fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b",
        "trailer-goursat-n3", "car-engel", "sleigh-circle", "magnon",
        "ch-zero-mean", "oddfluid-balance", "burgers-potential",
    }

    def test_exactly_the_bundled_presets(self):
        assert set(list_presets()) == self.EXPECTED

    def test_presets_subcommand_prints_json(self):
        code, out, _ = run_cli(["presets"])
        assert code == EXIT_OK
        assert set(json.loads(out)) == self.EXPECTED

    def test_every_preset_names_a_real_subcommand(self):
        from nonholo.cli import RUNNERS

        for name, (cmd, cfg) in PRESETS.items():
            assert cmd in RUNNERS
            assert isinstance(cfg, dict)

    @pytest.mark.parametrize("name", sorted(EXPECTED))
    def test_preset_validates_and_runs(self, name):
        cmd = PRESETS[name][0]
        code, out, err = run_cli([cmd, "--preset", name, "--check"])
        assert code == EXIT_OK, err
        report = json.loads(out)
        assert all(c["pass"] for c in report["checks"])


class TestExitCodes:
    def test_missing_config(self):
        code, _, err = run_cli(["skate"])
        assert code == EXIT_CONFIG and "config" in err

    def test_unknown_preset(self):
        code, _, err = run_cli(["skate", "--preset", "nope"])
        assert code == EXIT_CONFIG

    def test_preset_subcommand_mismatch(self):
        code, _, err = run_cli(["burgers", "--preset", "fig2b"])
        assert code == EXIT_CONFIG and "fig2b" in err

    def test_negative_nu_names_the_field(self, tmp_path):
        cfg = write_config(tmp_path, {"system": "regularized", "nu": -0.1,
                                      "alpha": 0.1, "t_span": [0, 1], "dt": 1e-3})
        code, _, err = run_cli(["skate", "--config", cfg])
        assert code == EXIT_CONFIG and "nu" in err

    def test_unknown_key_rejected(self, tmp_path):
        cfg = write_config(tmp_path, {"system": "lda", "t_span": [0, 1], "bogus": 1})
        code, _, err = run_cli(["skate", "--config", cfg])
        assert code == EXIT_CONFIG and "bogus" in err

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, _, err = run_cli(["skate", "--config", str(path)])
        assert code == EXIT_CONFIG

    def test_coarse_step_fails_energy_check(self, tmp_path):
        cfg = write_config(tmp_path, {
            "system": "reduced", "g": 1.0, "mu": 1.0, "t_span": [0, 8], "dt": 0.1,
            "checks": [{"name": "energy_rel_drift", "tol": 1e-8}],
        })
        code, out, err = run_cli(["skate", "--config", cfg, "--check"])
        assert code == EXIT_CHECK
        # without --check the run reports the failure but exits 0
        code, _, _ = run_cli(["skate", "--config", cfg])
        assert code == EXIT_OK

    def test_numerical_failure(self, tmp_path):
        cfg = write_config(tmp_path, {
            "n": 0, "controls": {"kind": "constant", "u1": 5.0, "u2": 1.0},
            "t_span": [0, 2.0], "dt": 1e-2,
        })
        code, _, err = run_cli(["car", "--config", cfg])
        assert code == EXIT_NUMERICAL and "SteeringOutOfRange" in err


class TestArtifacts:
    def test_skate_outputs(self, tmp_path):
        out_dir = tmp_path / "art"
        code, out, _ = run_cli(["skate", "--preset", "fig2b", "--out", str(out_dir),
                                "--format", "csv,svg,json"])
        assert code == EXIT_OK
        names = {p.name for p in out_dir.iterdir()}
        assert {"skate-lda.csv", "skate-lda.svg", "summary.json"} <= names
        header = (out_dir / "skate-lda.csv").read_bytes().split(b"\n", 1)[0]
        assert header == b"t,x,y,theta,omega,rho,energy"

    def test_csv_byte_identical_across_runs(self, tmp_path):
        blobs = []
        for sub in ("a", "b"):
            out_dir = tmp_path / sub
            code, _, _ = run_cli(["skate", "--preset", "fig2b", "--out", str(out_dir),
                                  "--format", "csv"])
            assert code == EXIT_OK
            blobs.append((out_dir / "skate-lda.csv").read_bytes())
        assert blobs[0] == blobs[1]

    def test_format_filter(self, tmp_path):
        out_dir = tmp_path / "csv-only"
        run_cli(["skate", "--preset", "fig2b", "--out", str(out_dir), "--format", "csv"])
        names = {p.name for p in out_dir.iterdir()}
        assert "skate-lda.csv" in names and "skate-lda.svg" not in names

    def test_sleigh_writes_frames_and_timelapse(self, tmp_path):
        out_dir = tmp_path / "sleigh"
        code, _, _ = run_cli(["sleigh", "--preset", "sleigh-circle",
                              "--out", str(out_dir)])
        assert code == EXIT_OK
        names = sorted(p.name for p in out_dir.iterdir())
        assert "sleigh-timelapse.svg" in names
        assert any(n.startswith("sleigh-frame-") and n.endswith(".csv") for n in names)


class TestSubcommands:
    def test_flag_seed_controls_points(self, tmp_path):
        cfg = write_config(tmp_path, {"kind": "trailer", "n": 1, "points": 5})
        _, out1, _ = run_cli(["flag", "--config", cfg, "--seed", "1"])
        _, out1b, _ = run_cli(["flag", "--config", cfg, "--seed", "1"])
        _, out2, _ = run_cli(["flag", "--config", cfg, "--seed", "2"])
        r1, r1b, r2 = (json.loads(o)["summary"]["reports"] for o in (out1, out1b, out2))
        assert r1 == r1b and r1 != r2

    def test_flag_goursat_dims(self, tmp_path):
        cfg = write_config(tmp_path, {"kind": "goursat", "n": 5, "points": 5})
        code, out, _ = run_cli(["flag", "--config", cfg])
        assert code == EXIT_OK
        report = json.loads(out)
        assert all(d == [2, 3, 4, 5] for d in report["summary"]["dims"])

    def test_trailer_run_reports_residual(self, tmp_path):
        cfg = write_config(tmp_path, {
            "n": 2, "controls": {"kind": "sine", "a1": 0.5, "w1": 1.0, "a2": 1.0, "w2": 0.0},
            "t_span": [0, 2.0], "dt": 1e-3, "record_every": 10,
            "checks": [{"name": "residual_max", "tol": 1e-10}],
        })
        code, out, _ = run_cli(["trailer", "--config", cfg, "--check"])
        assert code == EXIT_OK

    def test_snake_run(self, tmp_path):
        cfg = write_config(tmp_path, {
            "path": {"kind": "circle", "radius": 0.5, "turns": 1.2},
            "f": {"kind": "linear", "speed": 1.0, "offset": 2.0},
            "t_grid": {"t0": 0.0, "t1": 1.0, "samples": 6},
            "s_grid": {"length": 1.5, "samples": 61},
            "checks": [{"name": "arclength_rel_dev", "tol": 1e-6}],
        })
        out_dir = tmp_path / "snake"
        code, out, _ = run_cli(["snake", "--config", cfg, "--check", "--out", str(out_dir)])
        assert code == EXIT_OK
        assert (out_dir / "snake-timelapse.svg").exists()
        assert (out_dir / "snake-frame-0005.csv").exists()

    def test_euler_suslov_run(self, tmp_path):
        cfg = write_config(tmp_path, {
            "flow": {"kind": "constrained", "A": [1.0, 2.0, 3.0],
                     "constraints": [[0.0, 0.0, 1.0]]},
            "m0": [1.0, 2.0, 0.0], "t_span": [0, 5.0], "dt": 1e-3, "record_every": 10,
            "checks": [{"name": "energy_rel_drift", "tol": 1e-8},
                       {"name": "constraint_max", "tol": 1e-8}],
        })
        code, out, _ = run_cli(["euler-suslov", "--config", cfg, "--check"])
        assert code == EXIT_OK

    def test_binormal_run(self, tmp_path):
        cfg = write_config(tmp_path, {
            "n": 64, "radius": 1.0, "t_span": [0, 0.05], "dt": 1e-4,
            "record_every": 100,
            "checks": [{"name": "length_rel_drift", "tol": 1e-8}],
        })
        code, out, _ = run_cli(["binormal", "--config", cfg, "--check"])
        assert code == EXIT_OK

    def test_odd_fluid_base_energy(self, tmp_path):
        cfg = write_config(tmp_path, {
            "system": "base", "n": 32, "eta_H": 0.2, "Gamma_H": 0.1,
            "initial": {"rho": {"mean": 1.0, "modes": [{"kx": 1, "ky": 0, "cos": 0.05}]},
                        "vx": {"modes": [{"kx": 0, "ky": 1, "sin": 0.1}]}},
            "t_span": [0, 0.2], "dt": 2e-3, "record_every": 10,
            "checks": [{"name": "energy_rel_drift", "tol": 1e-6}],
        })
        code, out, _ = run_cli(["odd-fluid", "--config", cfg, "--check"])
        assert code == EXIT_OK

    def test_unknown_check_name_fails_closed(self, tmp_path):
        cfg = write_config(tmp_path, {
            "system": "lda", "t_span": [0, 0.1], "dt": 1e-3,
            "checks": [{"name": "no_such_quantity", "tol": 1.0}],
        })
        code, out, _ = run_cli(["skate", "--config", cfg, "--check"])
        assert code == EXIT_CHECK
