import json
import os

import numpy as np
import pytest

from beliefcycle.cli import main
from beliefcycle.presets import PRESETS


def run(argv):
    return main(argv)


def read_rows(path):
    with open(path) as fh:
        lines = [l.rstrip("\n") for l in fh]
    comments = [l for l in lines if l.startswith("#")]
    data = [l for l in lines if not l.startswith("#")]
    return comments, data[0], data[1:]


def embedded_config(path):
    with open(path) as fh:
        for line in fh:
            if line.startswith("# config "):
                return json.loads(line[len("# config "):])
    raise AssertionError("no config header found")


SET1 = ["--set", "params.beta=3.0", "--set", "params.omega=1.0"]


class TestSteady:
    def test_three_row_csv_past_pitchfork(self, tmp_path):
        out = tmp_path / "steady.csv"
        assert run(["steady", "--out", str(out), *SET1]) == 0
        _, header, rows = read_rows(out)
        assert header == "label,Y,P,Z,P_lo,P_hi,Y_lo,Y_hi,flags"
        assert [r.split(",")[0] for r in rows] == ["LOW", "UNBIASED", "HIGH"]

    def test_one_row_below_threshold(self, tmp_path):
        out = tmp_path / "steady.csv"
        assert run(["steady", "--out", str(out), "--set", "params.beta=1.0"]) == 0
        _, _, rows = read_rows(out)
        assert [r.split(",")[0] for r in rows] == ["UNBIASED"]

    def test_ill_posed_exit_code(self, tmp_path):
        out = tmp_path / "steady.csv"
        code = run(["steady", "--out", str(out),
                    "--set", "params.c=0.9", "--set", "params.h=1.0", "--set", "params.d=1.0"])
        assert code == 3

    def test_sweep_schema(self, tmp_path):
        out = tmp_path / "sweep.csv"
        assert run(["steady", "--out", str(out), "--preset", "fig1",
                    "--set", "sweep.n=12"]) == 0
        _, header, rows = read_rows(out)
        assert header == "axis,Y_L,Y_star,Y_H,P_L,P_star,P_H,flags"
        assert len(rows) == 12
        # absent biased cells are empty below the threshold
        first = rows[0].split(",")
        assert first[1] == "" and first[3] == ""


class TestConfigHandling:
    def test_unknown_key_rejected(self, tmp_path):
        assert run(["steady", "--out", str(tmp_path / "x.csv"), "--set", "nope=1"]) == 2

    def test_bad_value_rejected(self, tmp_path):
        assert run(["steady", "--out", str(tmp_path / "x.csv"),
                    "--set", "params.c=chewy"]) == 2

    def test_domain_violation_rejected(self, tmp_path):
        assert run(["steady", "--out", str(tmp_path / "x.csv"),
                    "--set", "params.c=1.5"]) == 2

    def test_missing_config_file_is_io_error(self, tmp_path):
        assert run(["steady", "--out", str(tmp_path / "x.csv"),
                    "--config", str(tmp_path / "absent.json")]) == 5

    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"params.beta": 1.0}))
        out = tmp_path / "steady.csv"
        assert run(["steady", "--out", str(out), "--config", str(cfg),
                    "--set", "params.beta=3.0", "--set", "params.omega=1.0"]) == 0
        assert embedded_config(out)["params.beta"] == 3.0
        _, _, rows = read_rows(out)
        assert len(rows) == 3  # beta=3 wins over the config file's 1.0

    def test_preset_command_mismatch(self, tmp_path):
        assert run(["steady", "--out", str(tmp_path / "x.csv"),
                    "--preset", "fig9"]) == 2

    def test_unknown_preset(self, tmp_path):
        assert run(["steady", "--out", str(tmp_path / "x.csv"),
                    "--preset", "fig99"]) == 2


class TestRoundTrip:
    @pytest.mark.parametrize("argv", [
        ["steady", "--set", "params.beta=3.0"],
        ["stability", "--set", "scenario.axis=omega", "--set", "scenario.lo=0",
         "--set", "scenario.hi=1", "--set", "params.beta=0.69"],
        ["region", "--set", "region.beta_lo=0.5", "--set", "region.beta_hi=3",
         "--set", "region.beta_n=4", "--set", "region.omega_lo=0",
         "--set", "region.omega_hi=1", "--set", "region.omega_n=3"],
        ["bifurcate", "--set", "bif.mode=1d", "--set", "bif.axis=beta",
         "--set", "bif.lo=0.6", "--set", "bif.hi=0.8", "--set", "bif.n=3",
         "--set", "orbit.transient=2000", "--set", "orbit.sample=16"],
        ["basin", "--set", "basin.n=8", "--set", "orbit.transient=2000",
         "--set", "params.beta=2.5"],
        ["orbit", "--set", "orbit.sample=16", "--set", "orbit.transient=100"],
        ["stochastic", "--set", "stoch.length=2000", "--set", "stoch.burn_in=100",
         "--seed", "11"],
    ])
    def test_embedded_config_reproduces_bytes(self, tmp_path, argv):
        first = tmp_path / "first.csv"
        assert run([*argv, "--out", str(first)]) == 0
        cfg_path = tmp_path / "replay.json"
        cfg_path.write_text(json.dumps(embedded_config(first)))
        second = tmp_path / "second.csv"
        assert run([argv[0], "--config", str(cfg_path), "--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()


class TestOutputs:
    def test_region_schema(self, tmp_path):
        out = tmp_path / "region.csv"
        assert run(["region", "--preset", "fig3",
                    "--set", "region.beta_n=5", "--set", "region.omega_n=4",
                    "--out", str(out)]) == 0
        _, header, rows = read_rows(out)
        assert header == "beta,omega,star_stable,biased_exists,high_stable,margin_min"
        assert len(rows) == 20
        for row in rows:
            cells = row.split(",")
            assert cells[2] in ("0", "1")
            assert cells[3] in ("0", "1")
            assert cells[4] in ("", "0", "1")

    def test_region_cross_sections_match_scenario_taxonomy(self, tmp_path):
        # region-A family: unstable column at beta=0.1, stable column at
        # beta=1.5, destabilizing (stable only for small omega) at beta=0.69
        out = tmp_path / "region.csv"
        assert run(["region", "--preset", "set1",
                    "--set", "region.beta_lo=0.1", "--set", "region.beta_hi=1.28",
                    "--set", "region.beta_n=3",
                    "--set", "region.omega_lo=0.0", "--set", "region.omega_hi=1.0",
                    "--set", "region.omega_n=11", "--out", str(out)]) == 0
        _, _, rows = read_rows(out)
        grid = np.array([r.split(",")[:3] for r in rows], dtype=float).reshape(3, 11, 3)
        assert (grid[0, :, 2] == 0).all()            # beta=0.1: everywhere unstable
        assert (grid[2, :, 2] == 1).all()            # beta=1.28: everywhere stable
        middle = grid[1, :, 2]                        # beta=0.69: destabilizing in omega
        assert middle[0] == 1 and middle[-1] == 0

    def test_stability_report_mode(self, tmp_path):
        out = tmp_path / "reports.csv"
        assert run(["stability", "--set", "params.beta=3.0", "--out", str(out)]) == 0
        _, header, rows = read_rows(out)
        assert header.startswith("at,E_eff,W,C1,C2,C3,")
        assert [r.split(",")[0] for r in rows] == ["LOW", "UNBIASED", "HIGH"]
        stable_col = header.split(",").index("stable")
        low, star, high = (r.split(",")[stable_col] for r in rows)
        assert star == "0" and low == "1" and high == "1"

    def test_orbit_lyapunov_header(self, tmp_path):
        out = tmp_path / "orbit.csv"
        assert run(["orbit", "--set", "params.beta=1.5", "--set", "orbit.sample=4",
                    "--set", "orbit.lyapunov_steps=2000", "--out", str(out)]) == 0
        comments, _, _ = read_rows(out)
        lyap = [c for c in comments if c.startswith("# lyapunov ")]
        assert len(lyap) == 1
        assert float(lyap[0].split()[-1]) < 0  # stable fixed point contracts

    def test_bifurcate_2d_schema(self, tmp_path):
        out = tmp_path / "bif2d.csv"
        assert run(["bifurcate", "--set", "bif.mode=2d",
                    "--set", "bif.beta_lo=1.0", "--set", "bif.beta_hi=3.0",
                    "--set", "bif.beta_n=3",
                    "--set", "bif.omega_lo=0.5", "--set", "bif.omega_hi=1.0",
                    "--set", "bif.omega_n=2",
                    "--set", "orbit.transient=3000", "--set", "orbit.sample=128",
                    "--out", str(out)]) == 0
        _, header, rows = read_rows(out)
        assert header == "beta,omega,class,period"
        assert len(rows) == 6
        for row in rows:
            cls = row.split(",")[2]
            assert cls == "FP" or cls in ("HC", "DIV") or cls.startswith("P")

    def test_basin_sidecar_catalog(self, tmp_path):
        out = tmp_path / "basin.csv"
        assert run(["basin", "--set", "basin.n=12", "--set", "params.beta=2.5",
                    "--set", "orbit.transient=4000", "--out", str(out)]) == 0
        _, header, rows = read_rows(out)
        assert header == "Y,P,label"
        assert len(rows) == 144
        side = tmp_path / "basin.catalog.csv"
        _, cat_header, cat_rows = read_rows(side)
        assert cat_header == "label,kind,period,mean_Y,mean_P"
        assert len(cat_rows) == 2

    def test_orbit_class_annotation(self, tmp_path):
        out = tmp_path / "orbit.csv"
        assert run(["orbit", "--set", "params.beta=0.7",
                    "--set", "orbit.sample=8", "--out", str(out)]) == 0
        comments, header, rows = read_rows(out)
        assert header == "t,Y,P,Z"
        assert any(c.startswith("# class P2") for c in comments)
        assert len(rows) == 8

    def test_stochastic_path_schema(self, tmp_path):
        out = tmp_path / "path.csv"
        assert run(["stochastic", "--set", "stoch.length=500",
                    "--set", "stoch.burn_in=100", "--out", str(out)]) == 0
        _, header, rows = read_rows(out)
        assert header == "t,Y,P,R"
        assert len(rows) == 400
        assert rows[0].split(",")[3] == ""  # no return for the first sample
        assert rows[1].split(",")[3] != ""

    def test_acf_schema(self, tmp_path):
        out = tmp_path / "acf.csv"
        assert run(["stochastic", "--preset", "fig9",
                    "--set", "stoch.length=20000", "--set", "stoch.burn_in=1000",
                    "--set", "stoch.max_lag=10", "--out", str(out)]) == 0
        _, header, rows = read_rows(out)
        assert header == "lag,acf"
        assert [int(r.split(",")[0]) for r in rows] == list(range(1, 11))

    def test_kurtosis_grid_schema(self, tmp_path):
        out = tmp_path / "kurt.csv"
        assert run(["stochastic", "--set", "stoch.mode=kurtosis-grid",
                    "--set", "stoch.beta_lo=2.0", "--set", "stoch.beta_hi=3.0",
                    "--set", "stoch.beta_n=2",
                    "--set", "stoch.omega_lo=0.0", "--set", "stoch.omega_hi=1.0",
                    "--set", "stoch.omega_n=2",
                    "--set", "stoch.length=3000", "--set", "stoch.burn_in=200",
                    "--out", str(out)]) == 0
        _, header, rows = read_rows(out)
        assert header == "beta,omega,kurtosis,n_valid"
        assert len(rows) == 4


class TestPresets:
    def test_reference_figure_presets_exist(self):
        for name in [f"fig{i}" for i in range(1, 10)]:
            assert name in PRESETS

    def test_simulation_families_exist(self):
        for name in ("set1", "set2", "set3"):
            assert name in PRESETS
            assert PRESETS[name]["command"] is None

    def test_set1_parameter_table(self):
        values = PRESETS["set1"]["values"]
        assert values["params.A"] == 15.0
        assert values["params.F_star"] == 15.0
        assert values["params.c"] == 0.38
        assert values["params.d"] == 0.38
        assert values["params.h"] == 0.38
        assert values["params.b"] == 0.5
        assert values["params.mu"] == 1.0
        assert values["params.sigma"] == 3.0
        assert values["params.gamma"] == 0.8

    def test_family_variants(self):
        assert PRESETS["set2"]["values"]["params.sigma"] == 1.3
        assert PRESETS["set2"]["values"]["params.gamma"] == 1.05
        assert PRESETS["set3"]["values"]["params.sigma"] == 4.0
        assert PRESETS["fig1"]["values"]["params.c"] == 0.5
        assert PRESETS["fig1"]["values"]["params.A"] == 10.0
