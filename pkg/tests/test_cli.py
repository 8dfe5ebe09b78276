"""Command-line interface tests: outputs, formats, determinism, exit codes."""

import json
import math

import pytest

from borelstein.cli import main


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestPmf:
    def test_rows_sum_and_first_row(self, capsys):
        code, out, _ = run(["pmf", "--lambda", "0.5", "--eps", "1e-10"], capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "j,pmf,cdf"
        first = lines[1].split(",")
        assert float(first[1]) == pytest.approx(math.exp(-0.5), rel=1e-15)
        cdf = [float(ln.split(",")[2]) for ln in lines[1:]]
        assert all(a <= b for a, b in zip(cdf, cdf[1:]))
        assert cdf[-1] >= 1.0 - 1e-10

    def test_json_format(self, capsys, tmp_path):
        out_file = tmp_path / "pmf.json"
        code, _, _ = run(
            ["pmf", "--lambda", "0.3", "--format", "json", "--out", str(out_file)],
            capsys,
        )
        assert code == 0
        payload = json.loads(out_file.read_text())
        assert payload["columns"] == ["j", "pmf", "cdf"]

    def test_usage_error_on_bad_lambda(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["pmf", "--lambda", "1.5"])
        assert exc.value.code == 2

    def test_numeric_error_exit_code(self, capsys):
        code, _, err = run(
            ["pmf", "--lambda", "0.99", "--eps", "1e-10", "--cap", "100"], capsys
        )
        assert code == 3
        assert "numeric failure" in err

    def test_bad_eps_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["pmf", "--lambda", "0.5", "--eps", "0"])
        assert exc.value.code == 2


class TestSteinCheck:
    def test_passes_and_exports_table(self, capsys, tmp_path):
        out_file = tmp_path / "table.csv"
        code, out, _ = run(
            [
                "stein-check",
                "--lambda",
                "0.3",
                "--table-size",
                "25",
                "--out",
                str(out_file),
            ],
            capsys,
        )
        assert code == 0
        lines = out_file.read_text().strip().splitlines()
        assert lines[0] == "k,m,a_km,lemma1_bound"
        k, m, a_km, bound = lines[1].split(",")
        assert (k, m) == ("2", "2")
        assert float(a_km) == 1.0
        for line in lines[1:]:
            _, _, a_km, bound = line.split(",")
            assert abs(float(a_km)) <= float(bound) + 1e-12

    def test_high_lambda_passes(self, capsys):
        code, _, _ = run(["stein-check", "--lambda", "0.9", "--table-size", "40"], capsys)
        assert code == 0


class TestQueueCommands:
    def test_sim_deterministic_given_seed(self, capsys):
        argv = [
            "queue-sim",
            "--lambda",
            "0.3",
            "--service",
            "exponential",
            "--n",
            "20000",
            "--seed",
            "11",
        ]
        _, out_a, _ = run(argv, capsys)
        _, out_b, _ = run(argv, capsys)
        assert out_a == out_b

    def test_bounds_prints_na_note_at_half(self, capsys):
        code, out, err = run(
            ["queue-bounds", "--lambda", "0.5", "--service", "exponential"], capsys
        )
        assert code == 0
        assert "qbd2_or_NA" in out.splitlines()[0]
        assert ",NA," in out.splitlines()[1]
        assert "needs lambda < 1/2" in err

    def test_sim_columns_match_contract(self, capsys):
        code, out, _ = run(
            [
                "queue-sim",
                "--lambda",
                "0.2",
                "--service",
                "twopoint:0.5:0.5",
                "--n",
                "5000",
            ],
            capsys,
        )
        assert code == 0
        header = out.splitlines()[0]
        assert header == (
            "lambda,service_kind,service_params,n,censored,tv_lower,tv_upper,"
            "qbd1,qbd2_or_NA,var_s,e_abs_s"
        )

    def test_bad_service_spec_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["queue-sim", "--lambda", "0.2", "--service", "pareto:3"])
        assert exc.value.code == 2


class TestTails:
    def test_rows_and_domination(self, capsys):
        code, out, _ = run(["tails", "--lambda", "0.4"], capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("lambda,t,side,exact,exact_err,bound")
        for line in lines[1:]:
            parts = line.split(",")
            exact, err, bound = float(parts[3]), float(parts[4]), float(parts[5])
            assert exact <= bound + err


class TestReport:
    def test_quick_report_passes_and_is_reproducible(self, capsys, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["report", "--quick", "--seed", "7", "--out", str(a)]) == 0
        assert main(["report", "--quick", "--seed", "7", "--out", str(b)]) == 0
        capsys.readouterr()
        for name in sorted(p.name for p in a.iterdir()):
            assert (a / name).read_bytes() == (b / name).read_bytes()
        summary = json.loads((a / "summary.json").read_text())
        assert len(summary["criteria"]) == 12
        assert all(c["status"] == "pass" for c in summary["criteria"])

    def test_different_seeds_change_simulation_output(self, capsys, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        main(["report", "--quick", "--seed", "1", "--out", str(a)])
        main(["report", "--quick", "--seed", "2", "--out", str(b)])
        capsys.readouterr()
        sim = "crit_09_md1_exactness.csv"
        assert (a / sim).read_bytes() != (b / sim).read_bytes()

    def test_thread_cap_does_not_change_output(self, capsys, tmp_path, monkeypatch):
        a, b = tmp_path / "a", tmp_path / "b"
        main(["report", "--quick", "--seed", "5", "--out", str(a)])
        monkeypatch.setenv("BOREL_STEIN_THREADS", "4")
        main(["report", "--quick", "--seed", "5", "--out", str(b)])
        capsys.readouterr()
        for name in sorted(p.name for p in a.iterdir()):
            assert (a / name).read_bytes() == (b / name).read_bytes()
