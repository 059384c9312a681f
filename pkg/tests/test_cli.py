import numpy as np
import pytest

from elastoinverse.cli import main
from elastoinverse.config import load_config, manifest_text, parse_config
from elastoinverse.errors import ConfigError
from io import StringIO


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def _read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh]
    return header, rows


class TestConfig:
    def test_defaults_parse(self):
        cfg = parse_config(None)
        assert cfg.element_length == 0.1
        assert cfg.load.kind == "periodic"
        assert cfg.noise_pct == pytest.approx(0.05)
        assert len(cfg.b_grid) == 17

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match=r"\[noise\] percnt"):
            parse_config(StringIO("[noise]\npercnt = 5\n"))

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match=r"\[filters\]"):
            parse_config(StringIO("[filters]\nregularization = 1\n"))

    def test_bad_value_names_field(self):
        with pytest.raises(ConfigError, match=r"\[time\] step"):
            parse_config(StringIO("[time]\nstep = fast\n"))

    def test_window_invariant(self):
        with pytest.raises(ConfigError, match="t_end"):
            parse_config(StringIO("[time]\nstep = 0.1\nt_end = 0.5\n"))

    def test_degenerate_grid_rejected(self):
        with pytest.raises(ConfigError, match="b_grid_points"):
            parse_config(StringIO("[filter]\nb_grid_points = 1\n"))
        with pytest.raises(ConfigError, match="b_grid_max"):
            parse_config(StringIO("[filter]\nb_grid_min = 1.0\nb_grid_max = 1.0\n"))

    def test_manifest_round_trip(self):
        text = "[load]\nkind = heaviside\namplitude = 2.0\n\n[noise]\nseed = 77\n"
        cfg = parse_config(StringIO(text))
        again = parse_config(StringIO(manifest_text(cfg)))
        assert again.load == cfg.load
        assert again.seed == cfg.seed == 77
        assert again.b_grid == cfg.b_grid


class TestMeshCommand:
    def test_default_mesh_file(self, tmp_path):
        rc = main(["mesh", "--out", str(tmp_path), "--quiet"])
        assert rc == 0
        lines = (tmp_path / "mesh.txt").read_text().splitlines()
        node_lines = [ln for ln in lines if not ln.startswith("e ")]
        boundary = [ln for ln in node_lines if ln.split()[3] != "internal"]
        assert len(boundary) == 40

    def test_coarse_mesh(self, tmp_path):
        cfg = _write(
            tmp_path / "c.cfg", "[mesh]\nelement_length = 0.5\ninternal_points = none\n"
        )
        rc = main(["mesh", "--config", cfg, "--out", str(tmp_path / "o"), "--quiet"])
        assert rc == 0
        lines = (tmp_path / "o" / "mesh.txt").read_text().splitlines()
        node_lines = [ln for ln in lines if not ln.startswith("e ")]
        assert len(node_lines) == 8

    def test_malformed_config_exit_code(self, tmp_path, capsys):
        cfg = _write(tmp_path / "bad.cfg", "[mesh]\nelement_length = wide\n")
        rc = main(["mesh", "--config", cfg, "--out", str(tmp_path / "o")])
        assert rc == 2
        err = capsys.readouterr().err
        assert "element_length" in err


class TestForwardCommand:
    def test_zero_load_all_zero_csv(self, tmp_path):
        cfg = _write(
            tmp_path / "z.cfg",
            "[load]\nkind = zero\n\n[time]\nt_end = 2.0\n\n[noise]\npercent = 0\n",
        )
        rc = main(["forward", "--config", cfg, "--out", str(tmp_path / "o"), "--quiet"])
        assert rc == 0
        header, rows = _read_csv(tmp_path / "o" / "forward_response.csv")
        assert header[0] == "t"
        data = np.array([[float(v) for v in r[1:]] for r in rows])
        assert np.all(data == 0.0)

    def test_heaviside_matches_rod(self, tmp_path):
        cfg = _write(
            tmp_path / "h.cfg", "[load]\nkind = heaviside\n\n[time]\nt_end = 8.0\n"
        )
        rc = main(["forward", "--config", cfg, "--out", str(tmp_path / "o"), "--quiet"])
        assert rc == 0
        header, rows = _read_csv(tmp_path / "o" / "forward_response.csv")
        from elastoinverse.signals import HEAVISIDE, LoadSignal, analytic_rod_response

        # locate the u column of the free-edge midpoint node (0, 0.5)
        from elastoinverse.experiments import build_plate_model
        from elastoinverse.mesh import locate_node

        plate = build_plate_model()
        node = locate_node(plate.mesh, (0.0, 0.5))
        col = header.index(f"u_n{node}")
        t = np.array([float(r[0]) for r in rows])
        u = np.array([float(r[col]) for r in rows])
        u_rod, _ = analytic_rod_response(0.0, t, LoadSignal(HEAVISIDE, 1.0), n_modes=400)
        assert np.linalg.norm(u - u_rod) / np.linalg.norm(u_rod) < 0.05

    def test_repeat_is_bit_identical(self, tmp_path):
        cfg = _write(tmp_path / "r.cfg", "[time]\nt_end = 3.0\n")
        for d in ("o1", "o2"):
            assert main(["forward", "--config", cfg, "--out", str(tmp_path / d), "--quiet"]) == 0
        a = (tmp_path / "o1" / "forward_response.csv").read_bytes()
        b = (tmp_path / "o2" / "forward_response.csv").read_bytes()
        assert a == b


class TestEstimateCommand:
    @pytest.mark.filterwarnings("ignore:FLAT_CURVE")
    def test_noise_free_accuracy(self, tmp_path):
        cfg = _write(
            tmp_path / "nf.cfg", "[noise]\npercent = 0\n\n[time]\nt_end = 12.0\n"
        )
        rc = main(["estimate", "--config", cfg, "--out", str(tmp_path / "o"), "--quiet"])
        assert rc == 0
        _, rows = _read_csv(tmp_path / "o" / "estimate.csv")
        vals = np.array([[float(v) for v in r] for r in rows])
        n = len(vals) - 1
        cut = int(0.9 * n)
        truth, recon = vals[1 : cut + 1, 1], vals[1 : cut + 1, 2]
        assert np.linalg.norm(recon - truth) / np.linalg.norm(truth) < 0.02

    def test_invalid_sensor_exit(self, tmp_path, capsys):
        cfg = _write(tmp_path / "s.cfg", "[sensors]\npoint_c = 0.33,0.33\n")
        rc = main(["estimate", "--config", cfg, "--out", str(tmp_path / "o"), "--quiet"])
        assert rc == 1
        assert "UNKNOWN_SENSOR" in capsys.readouterr().err

    def test_outputs_and_manifest_reproduce(self, tmp_path):
        cfg = _write(
            tmp_path / "e.cfg",
            "[noise]\npercent = 5\nseed = 31\n\n[time]\nt_end = 8.0\n"
            "\n[filter]\nregularization = 0.5\n",
        )
        out1 = tmp_path / "o1"
        assert main(["estimate", "--config", cfg, "--out", str(out1), "--quiet"]) == 0
        # rerun from the emitted manifest alone
        out2 = tmp_path / "o2"
        manifest = out1 / "manifest.txt"
        assert main(["estimate", "--config", str(manifest), "--out", str(out2), "--quiet"]) == 0
        for name in ("estimate.csv", "measurements.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


class TestLcurveCommand:
    def test_curve_export(self, tmp_path):
        cfg = _write(
            tmp_path / "l.cfg",
            "[noise]\npercent = 10\nseed = 5\n\n[time]\nt_end = 8.0\n"
            "\n[filter]\nb_grid_points = 9\n",
        )
        rc = main(["lcurve", "--config", cfg, "--out", str(tmp_path / "o"), "--quiet"])
        assert rc == 0
        header, rows = _read_csv(tmp_path / "o" / "lcurve.csv")
        assert header == ["B", "residual_norm", "smoothness_norm", "curvature", "selected"]
        assert len(rows) == 9
        res = [float(r[1]) for r in rows]
        smooth = [float(r[2]) for r in rows]
        assert all(res[i] <= res[i + 1] * (1 + 1e-12) for i in range(len(res) - 1))
        assert all(smooth[i] >= smooth[i + 1] * (1 - 1e-12) for i in range(len(res) - 1))
        assert sum(int(r[4]) for r in rows) == 1


def test_seed_override_changes_noise(tmp_path):
    cfg = _write(
        tmp_path / "so.cfg",
        "[noise]\npercent = 20\nseed = 1\n\n[time]\nt_end = 6.0\n"
        "\n[filter]\nregularization = 1.0\n",
    )
    outs = []
    for seed, d in ((None, "a"), (2, "b")):
        args = ["estimate", "--config", cfg, "--out", str(tmp_path / d), "--quiet"]
        if seed is not None:
            args += ["--seed", str(seed)]
        assert main(args) == 0
        outs.append((tmp_path / d / "measurements.csv").read_bytes())
    assert outs[0] != outs[1]
