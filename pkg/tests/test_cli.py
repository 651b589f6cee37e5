"""CLI surface: commands, determinism, exit codes, file outputs."""

import json
import math
import subprocess
import sys

import pytest

from logtm.cli import main


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestConstantsCommand:
    def test_example_values(self, capsys):
        code, out, _ = run_cli(["constants", "--n", "2", "--k", "1", "--beta", "0"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["schema"] == "1"
        assert doc["alpha_crit"] == pytest.approx(4 * math.pi, rel=1e-15)
        assert abs(doc["alpha_crit"] - 12.566370614359172) < 1e-12

    def test_byte_identical_and_seed_ignored(self, capsys):
        argv = ["constants", "--n", "4", "--k", "2", "--beta", "0.25"]
        _, out1, _ = run_cli(argv, capsys)
        _, out2, _ = run_cli(argv + ["--seed", "5"], capsys)
        _, out3, _ = run_cli(argv + ["--seed", "99"], capsys)
        assert out1 == out2 == out3

    def test_validation_exit_2(self, capsys):
        code, _, err = run_cli(["constants", "--n", "2", "--k", "1", "--beta", "1.0"], capsys)
        assert code == 2
        assert "beta" in err

    def test_unknown_flag_exit_2(self, capsys):
        code, _, _ = run_cli(["constants", "--n", "2", "--nope", "1"], capsys)
        assert code == 2

    def test_config_file(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("n=2\nk=1\nbeta=0\n")
        _, out_cfg, _ = run_cli(["constants", "--config", str(cfg)], capsys)
        _, out_flags, _ = run_cli(["constants", "--n", "2", "--k", "1", "--beta", "0"], capsys)
        assert out_cfg == out_flags
        # flags override the config file
        _, out_override, _ = run_cli(
            ["constants", "--config", str(cfg), "--beta", "0.5"], capsys
        )
        assert json.loads(out_override)["beta"] == 0.5


class TestEvalCommand:
    def test_unit_norm_family(self, capsys):
        code, out, _ = run_cli(
            ["eval", "--family", "moser-w0", "--ell", "5", "--n", "2", "--beta", "0",
             "--alpha-ratio", "1.0"],
            capsys,
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["norm"] == pytest.approx(1.0, abs=1e-7)
        assert not doc["divergent"]

    def test_strict_divergent_exit_3(self, capsys):
        # supercritical exponent on the truncated family diverges
        code, out, _ = run_cli(
            ["eval", "--family", "trunc-log", "--eta", "0.02", "--n", "2", "--beta", "0",
             "--gamma", "2.2", "--alpha", "1.0", "--strict"],
            capsys,
        )
        assert code == 3
        assert json.loads(out)["divergent"] is True


class TestHardyCommands:
    def test_decide_hessian_example(self, capsys):
        code, out, _ = run_cli(
            ["hardy", "decide", "--alpha", "1", "--beta", "0.5", "--n", "2", "--k", "1",
             "--p", "3", "--weight", "w0"],
            capsys,
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["holds"] is True
        assert doc["condition"] == "Thm2.1(iv)"

    def test_decide_raw_query(self, capsys):
        code, out, _ = run_cli(
            ["hardy", "decide", "--alpha", "0", "--theta", "-2", "--nu", "0",
             "--mu", "-0.5", "--p", "2", "--q", "1"],
            capsys,
        )
        assert code == 0
        assert json.loads(out)["condition"] == "2.1(iii)"

    def test_verify_agreement(self, capsys):
        code, out, _ = run_cli(
            ["hardy", "verify", "--alpha", "1", "--beta", "0.5", "--n", "2", "--k", "1",
             "--p", "3", "--weight", "w0"],
            capsys,
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["numeric"] == "finite" and doc["agree"] is True

    def test_batch(self, capsys, tmp_path):
        path = tmp_path / "queries.csv"
        path.write_text(
            "alpha,theta,nu,mu,p,q,R,logkind\n"
            "0,-2,0,-0.5,2,1,1.0,log_r\n"
            "1,0,1,1.0,3,2,1.0,log_r\n"
        )
        code, out, _ = run_cli(["hardy", "batch", "--input", str(path)], capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("alpha,")
        assert lines[1].endswith("true,2.1(iii)")
        assert lines[2].endswith("false,NONE")


class TestEmbedCommand:
    def test_example(self, capsys):
        code, out, _ = run_cli(
            ["embed", "--n", "6", "--k", "1", "--alpha", "5", "--beta", "0", "--p", "2"],
            capsys,
        )
        doc = json.loads(out)
        assert code == 0
        assert doc["embeds"] is True and doc["critical_exponent"] == pytest.approx(3.0)

    def test_borderline_reports_inf(self, capsys):
        _, out, _ = run_cli(
            ["embed", "--n", "2", "--k", "1", "--alpha", "0", "--beta", "0", "--p", "7"],
            capsys,
        )
        assert json.loads(out)["critical_exponent"] == "inf"


class TestTableCommands:
    def test_sharpness_csv_and_plot(self, capsys, tmp_path):
        plot = tmp_path / "growth.png"
        out_file = tmp_path / "growth.csv"
        code, _, _ = run_cli(
            ["sharpness", "--family", "moser-w0", "--ell", "1", "--n", "2", "--beta", "0",
             "--alpha-ratio", "1.05", "--ell-max", "6", "--out", str(out_file),
             "--plot", str(plot)],
            capsys,
        )
        assert code == 0
        lines = out_file.read_text().strip().splitlines()
        assert lines[0] == "ell,norm,J"
        assert len(lines) == 7
        js = [float(ln.split(",")[2]) for ln in lines[1:]]
        assert all(b > a for a, b in zip(js, js[1:]))
        assert plot.stat().st_size > 1000

    def test_concentration_csv(self, capsys):
        code, out, _ = run_cli(
            ["concentration", "--n", "2", "--beta", "0", "--ell-max", "4",
             "--format", "csv"],
            capsys,
        )
        assert code == 0
        assert out.splitlines()[0] == "ell,J,floor"

    def test_transport_check(self, capsys):
        code, out, _ = run_cli(
            ["transport-check", "--family", "moser-w0", "--ell", "2", "--n", "2",
             "--beta", "0", "--alpha-ratio", "0.8"],
            capsys,
        )
        doc = json.loads(out)
        assert code == 0
        assert doc["measured_factor"] == pytest.approx(0.5, rel=1e-6)
        assert doc["functional_residual"] < 1e-6


class TestMaximizeAndProfiles:
    def test_maximize_small(self, capsys, tmp_path):
        prof = tmp_path / "prof.csv"
        code, out, _ = run_cli(
            ["maximize", "--n", "2", "--beta", "0", "--grid", "512", "--tmax", "30",
             "--tol", "1e-8", "--seed", "1", "--profile-out", str(prof)],
            capsys,
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["value"] > 1.8591
        assert doc["converged"] is True
        from logtm.profiles import SampledProfile

        v = SampledProfile.from_csv(prof.read_text())
        assert len(v.t) == 512

    def test_admissible_family(self, capsys):
        code, out, _ = run_cli(
            ["admissible", "--family", "dexp", "--ell", "4", "--n", "2", "--beta", "1"],
            capsys,
        )
        doc = json.loads(out)
        assert code == 0
        assert doc["kink_r"]  # raw family has a kink cell flagged

    def test_smooth_summary(self, capsys, tmp_path):
        prof = tmp_path / "smoothed.csv"
        code, out, _ = run_cli(
            ["smooth", "--family", "moser-w0", "--ell", "4", "--n", "2", "--beta", "0.25",
             "--epsilon", "0.1", "--profile-out", str(prof)],
            capsys,
        )
        doc = json.loads(out)
        assert code == 0
        assert doc["admissible_after"] is True
        assert doc["norm_distance"] < 0.5
        assert prof.read_text().startswith("t,v")


class TestEntryPoint:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "logtm.cli", "constants", "--n", "2", "--k", "1",
             "--beta", "0"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert '"alpha_crit": 12.56637061435917' in proc.stdout
