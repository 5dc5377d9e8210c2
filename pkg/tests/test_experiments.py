import json
import math

import pytest

from nhscatter import (
    ConfigError,
    apply_overrides,
    default_config,
    from_ini,
    run_scenario,
    run_sweep,
    run_verify,
    to_ini,
)
from nhscatter.cli import main


def small_amplify(out_dir, **extra):
    cfg = default_config("amplify")
    cfg.out_dir = str(out_dir)
    cfg.lattice.left_len = 160
    cfg.lattice.right_len = 160
    cfg.packet.site = -40
    cfg.time.t_max = 40.0
    for key, value in extra.items():
        section, name = key.split("__")
        setattr(getattr(cfg, section), name, value)
    return cfg


class TestConfigFormat:
    @pytest.mark.parametrize("scenario", ["sweep", "amplify", "flux-deviation", "singularity", "absorb", "verify"])
    def test_ini_round_trip_lossless(self, scenario):
        cfg = default_config(scenario)
        assert from_ini(to_ini(cfg)) == cfg

    def test_round_trip_preserves_overrides(self):
        cfg = default_config("amplify")
        cfg.center.delta = -1.0 + 1e-13
        cfg.flux.deviations = (0, 3, 7)
        cfg.lattice.hard_wall_n0 = 17
        cfg.center.v = 0.25 - 2j
        assert from_ini(to_ini(cfg)) == cfg

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError):
            from_ini("[scenario]\nscenario = sweep\n[nope]\nx = 1\n")

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            from_ini("[scenario]\nscenario = sweep\n[center]\nbogus = 1\n")

    def test_apply_overrides(self):
        cfg = default_config("amplify")
        out = apply_overrides(cfg, ["center.delta=-1.0", "time.t_max=12.5", "seed=7"])
        assert out.center.delta == -1.0
        assert out.time.t_max == 12.5
        assert out.seed == 7
        assert cfg.center.delta == -1.25  # original untouched

    def test_override_validation(self):
        cfg = default_config("amplify")
        with pytest.raises(ConfigError):
            apply_overrides(cfg, ["nonsense"])
        with pytest.raises(ConfigError):
            apply_overrides(cfg, ["center.bogus=1"])
        with pytest.raises(ConfigError):
            apply_overrides(cfg, ["bogus.delta=1"])

    def test_none_field_round_trip(self):
        cfg = default_config("absorb")
        assert cfg.lattice.hard_wall_n0 == 20
        out = apply_overrides(cfg, ["lattice.hard_wall_n0=none"])
        assert out.lattice.hard_wall_n0 is None

    def test_unknown_scenario(self):
        with pytest.raises(ConfigError):
            default_config("explode")


class TestValidation:
    def test_amplify_requires_resonance(self, tmp_path):
        cfg = small_amplify(tmp_path / "x")
        cfg.center.gamma = 0.9  # delta^2 - gamma^2 != 1
        with pytest.raises(ConfigError):
            run_scenario(cfg)
        assert not (tmp_path / "x" / "frames.csv").exists()

    def test_amplify_rejects_onsite_center(self, tmp_path):
        cfg = small_amplify(tmp_path / "x")
        cfg.center.kind = "onsite"
        with pytest.raises(ConfigError):
            run_scenario(cfg)

    def test_singularity_requires_singular_product(self, tmp_path):
        cfg = default_config("singularity")
        cfg.out_dir = str(tmp_path / "x")
        cfg.center.gamma = 0.75
        cfg.center.delta = -1.25
        with pytest.raises(ConfigError):
            run_scenario(cfg)

    def test_absorb_requires_matching_wall(self, tmp_path):
        cfg = default_config("absorb")
        cfg.out_dir = str(tmp_path / "x")
        cfg.lattice.hard_wall_n0 = None
        with pytest.raises(ConfigError):
            run_scenario(cfg)

    def test_flux_requires_zero_deviation_row(self, tmp_path):
        cfg = default_config("flux-deviation")
        cfg.out_dir = str(tmp_path / "x")
        cfg.flux.deviations = (5, 10)
        with pytest.raises(ConfigError):
            run_scenario(cfg)

    def test_packet_clipping_is_config_error(self, tmp_path):
        cfg = small_amplify(tmp_path / "x")
        cfg.packet.site = -150
        with pytest.raises(ConfigError):
            run_scenario(cfg)


class TestSweepScenario:
    def test_resonant_dimer_sweep(self, tmp_path):
        cfg = default_config("sweep")
        cfg.out_dir = str(tmp_path / "s")
        manifest = run_scenario(cfg)
        assert manifest.passed
        names = {a.name for a in manifest.assertions}
        assert "resonant_reflectionless" in names
        text = (tmp_path / "s" / "sweep_left.csv").read_text()
        for line in text.splitlines()[1:]:
            cells = line.split(",")
            assert float(cells[1]) == 0.0 and float(cells[2]) == 0.0  # r identically zero

    def test_uniform_dimer_full_transmission(self, tmp_path):
        cfg = default_config("sweep")
        cfg.out_dir = str(tmp_path / "s")
        cfg.center.mu = 1.0
        cfg.center.nu = 1.0
        manifest = run_scenario(cfg)
        assert manifest.passed
        for line in (tmp_path / "s" / "sweep_left.csv").read_text().splitlines()[1:]:
            cells = line.split(",")
            assert float(cells[5]) == pytest.approx(1.0, abs=1e-12)
            assert float(cells[6]) == 0.0

    def test_singular_onsite_flagged_at_half_pi(self, tmp_path):
        cfg = default_config("sweep")
        cfg.out_dir = str(tmp_path / "s")
        cfg.center = type(cfg.center)(kind="onsite", v=2j)
        manifest = run_scenario(cfg)
        assert manifest.passed
        lines = (tmp_path / "s" / "sweep_left.csv").read_text().splitlines()
        flagged = [l for l in lines if l.endswith("inf,inf")]
        assert len(flagged) == 1
        assert float(flagged[0].split(",")[0]) == pytest.approx(math.pi / 2)

    def test_singular_dimer_assertion(self, tmp_path):
        cfg = default_config("sweep")
        cfg.out_dir = str(tmp_path / "s")
        cfg.center.mu = -2.0
        cfg.center.nu = 0.5
        manifest = run_scenario(cfg)
        assert manifest.passed
        assert any(a.name == "singular_momentum_flagged" for a in manifest.assertions)

    def test_hermitian_sweep_unitarity_assertion(self, tmp_path):
        cfg = default_config("sweep")
        cfg.out_dir = str(tmp_path / "s")
        cfg.center.mu = 1.3
        cfg.center.nu = 1.3
        manifest = run_scenario(cfg)
        assert manifest.passed
        assert any(a.name == "hermitian_unitarity" for a in manifest.assertions)

    def test_off_quarter_flux_rejected(self, tmp_path):
        cfg = default_config("sweep")
        cfg.out_dir = str(tmp_path / "s")
        cfg.center.kind = "interferometer"
        cfg.center.phi = 0.5
        with pytest.raises(ConfigError):
            run_scenario(cfg)

    def test_scenario_entry_point_overrides_name(self, tmp_path):
        cfg = default_config("verify")
        cfg.out_dir = str(tmp_path / "s")
        manifest = run_sweep(cfg)  # entry point forces its own scenario
        assert manifest.scenario == "sweep"

    def test_verify_writes_assertion_report(self, tmp_path):
        cfg = default_config("verify")
        cfg.out_dir = str(tmp_path / "v")
        manifest = run_verify(cfg)
        assert manifest.passed
        report = (tmp_path / "v" / "assertions.txt").read_text()
        assert "rotation_matches_dimer = pass" in report


class TestSmallScaleRunners:
    def test_singularity_small(self, tmp_path):
        cfg = default_config("singularity")
        cfg.out_dir = str(tmp_path / "sing")
        cfg.lattice.left_len = 150
        cfg.lattice.right_len = 150
        cfg.packet.site = -30
        cfg.packet.lam = 0.3
        cfg.packet.pair_site = 30
        cfg.time.t_max = 40.0
        cfg.singularity.fit_start = 10.0
        cfg.singularity.fit_end = 40.0
        cfg.singularity.emission_fit_start = 25.0
        manifest = run_scenario(cfg)
        assert manifest.passed, [a.name for a in manifest.assertions if not a.passed]
        series = (tmp_path / "sing" / "series.csv").read_text().splitlines()
        assert series[0] == "case,t,P_left,P_center,P_right,P_total"
        cases = {line.split(",")[0] for line in series[1:]}
        assert cases == {"seed_plus", "seed_minus", "packet", "pair"}

    def test_absorb_small(self, tmp_path):
        cfg = default_config("absorb")
        cfg.out_dir = str(tmp_path / "abs")
        cfg.lattice.left_len = 6
        cfg.lattice.right_len = 120
        cfg.lattice.hard_wall_n0 = 6
        cfg.absorb.n0 = 6
        cfg.absorb.nu_values = (0.5, 0.1)
        cfg.absorb.t_max = 60.0
        cfg.absorb.dt = 2.0
        cfg.absorb.drop_time = 30.0
        manifest = run_scenario(cfg)
        assert manifest.passed, [a.name for a in manifest.assertions if not a.passed]
        lines = (tmp_path / "abs" / "ptotal.csv").read_text().splitlines()
        assert lines[0] == "nu,t,P"
        assert any(a.name == "hermitian_control_conserves" for a in manifest.assertions)


class TestRunArtifacts:
    def test_manifest_and_outputs(self, tmp_path):
        cfg = small_amplify(tmp_path / "run")
        manifest = run_scenario(cfg)
        assert manifest.passed
        out = tmp_path / "run"
        data = json.loads((out / "manifest.json").read_text())
        assert data["passed"] is True
        assert data["scenario"] == "amplify"
        assert set(data["outputs"]) >= {
            "config.ini",
            "manifest.json",
            "frames.csv",
            "frames_reference.csv",
            "metrics.txt",
        }
        for name in data["outputs"]:
            assert (out / name).exists()
        assert all(a["measured"] for a in data["assertions"])

    def test_config_snapshot_round_trips(self, tmp_path):
        cfg = small_amplify(tmp_path / "run")
        run_scenario(cfg)
        snapshot = (tmp_path / "run" / "config.ini").read_text()
        assert from_ini(snapshot) == cfg

    def test_deterministic_outputs(self, tmp_path):
        cfg_a = small_amplify(tmp_path / "a")
        cfg_b = small_amplify(tmp_path / "b")
        run_scenario(cfg_a)
        run_scenario(cfg_b)
        for name in ("frames.csv", "frames_reference.csv", "metrics.txt"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


class TestCli:
    def test_verify_exit_zero(self, tmp_path, capsys):
        code = main(["verify", "--out", str(tmp_path / "v")])
        assert code == 0
        out = capsys.readouterr().out
        assert "[PASS]" in out and "[FAIL]" not in out

    def test_config_error_exit_two(self, tmp_path, capsys):
        code = main(
            ["amplify", "--out", str(tmp_path / "x"), "--set", "center.gamma=0.9"]
        )
        assert code == 2
        assert "config error" in capsys.readouterr().err

    def test_set_overrides_config_file(self, tmp_path, capsys):
        cfg = small_amplify(tmp_path / "from_file")
        path = tmp_path / "amp.ini"
        path.write_text(to_ini(cfg))
        code = main(
            [
                "amplify",
                "--config",
                str(path),
                "--out",
                str(tmp_path / "out"),
                "--set",
                "time.t_max=38",
            ]
        )
        assert code == 0
        snapshot = from_ini((tmp_path / "out" / "config.ini").read_text())
        assert snapshot.time.t_max == 38.0
        assert snapshot.out_dir == str(tmp_path / "out")

    def test_scenario_mismatch_rejected(self, tmp_path, capsys):
        cfg = default_config("sweep")
        path = tmp_path / "sweep.ini"
        path.write_text(to_ini(cfg))
        code = main(["amplify", "--config", str(path), "--out", str(tmp_path / "o")])
        assert code == 2

    def test_boundary_contamination_exit_two(self, tmp_path, capsys):
        code = main(
            [
                "amplify",
                "--out",
                str(tmp_path / "x"),
                "--set", "lattice.left_len=80",
                "--set", "lattice.right_len=80",
                "--set", "packet.site=-45",
                "--set", "time.t_max=60",
            ]
        )
        assert code == 2
        assert "aborted" in capsys.readouterr().err
