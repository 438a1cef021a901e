import json
import logging

import pytest

from avstl_monitor.cli import main
from avstl_monitor.utils import format_extended


@pytest.fixture()
def speed_csv(tmp_path):
    """Speed held at 100 for ten seconds, as a trace file."""

    path = tmp_path / "speed.csv"
    path.write_text("time,v\n0,100\n10,100\n")

    return path


class TestEval:
    """Tests related to the eval and signal subcommands."""

    def test_satisfied(self, speed_csv, capsys):
        assert main(["eval", str(speed_csv), "--formula", "F[0,10] v >= 80"]) == 0
        assert capsys.readouterr().out.strip() == "pos=20 neg=0"

    def test_falsified(self, speed_csv, capsys):
        assert main(["eval", str(speed_csv), "--formula", "G[0,10] v <= 50"]) == 1
        assert capsys.readouterr().out.strip() == "pos=0 neg=-50"

    def test_formula_file(self, speed_csv, tmp_path, capsys):
        formula = tmp_path / "formula.stl"
        formula.write_text("true\n")

        assert main(["eval", str(speed_csv), "--formula-file", str(formula)]) == 0
        assert capsys.readouterr().out.strip() == "pos=inf neg=0"

    @pytest.mark.parametrize("argv", [
        ["--formula", "F[0,10] v >="],
        ["--formula", "F[0,10] w >= 1"],
        ["--formula-file", "missing.stl"],
    ])
    def test_errors(self, speed_csv, capsys, argv):
        """Malformed formulas, unknown variables and missing files exit with 2."""

        assert main(["eval", str(speed_csv), *argv]) == 2
        assert capsys.readouterr().err.startswith("error: ")

    def test_missing_trace(self, tmp_path):
        assert main(["eval", str(tmp_path / "missing.csv"), "--formula", "true"]) == 2

    def test_formula_required(self, speed_csv):
        with pytest.raises(SystemExit):
            main(["eval", str(speed_csv)])

    def test_dump_signal(self, speed_csv, tmp_path):
        out = tmp_path / "signal.csv"

        assert main(["eval", str(speed_csv), "--formula", "v >= 80", "--dump-signal", str(out)]) == 0
        assert out.read_text().splitlines()[0] == "time,pos,pos_slope,neg,neg_slope"

    def test_signal(self, speed_csv, tmp_path):
        out = tmp_path / "signal.csv"

        assert main(["signal", str(speed_csv), "--formula", "v >= 80", "--out", str(out)]) == 0
        assert out.read_text().splitlines()[1] == "0,20,0,0,0"

    def test_horizon_warning(self, speed_csv, caplog):
        """Formulas looking past the end of the trace are evaluated, with a warning."""

        with caplog.at_level(logging.WARNING):
            assert main(["eval", str(speed_csv), "--formula", "F[0,100] v >= 80"]) == 0

        assert "last values are held" in caplog.text


class TestChecks:
    """Tests related to the oracle-check, bench and falsify subcommands."""

    def test_oracle_check_nothing(self, capsys):
        assert main(["oracle-check", "--count", "0"]) == 0
        assert "checked 0 instances, 0 mismatches" in capsys.readouterr().out

    def test_oracle_check(self, capsys):
        assert main(["oracle-check", "--count", "5", "--max-depth", "2", "--max-segments", "5", "--seed", "4"]) == 0
        assert "checked 5 instances, 0 mismatches" in capsys.readouterr().out

    def test_bench(self, capsys):
        assert main(["bench", "--sizes", "200", "--repetitions", "1"]) == 0

        lines = capsys.readouterr().out.splitlines()

        assert len(lines) == 2
        assert lines[1].split()[0] == "200"

    def test_bench_needs_repetitions(self):
        assert main(["bench", "--sizes", "200", "--repetitions", "0"]) == 2

    def test_falsify(self, tmp_path, capsys):
        config = tmp_path / "experiment.json"
        config.write_text(json.dumps({
            "problems": [{"catalogue": "P3"}],
            "trials": 1,
            "optimizer": {"kind": "RANDOM", "max_iterations": 5},
        }))
        report = tmp_path / "report.json"

        assert main(["falsify", "--config", str(config), "--report", str(report), "--seed", "9"]) == 0
        assert "P3[T=4]" in capsys.readouterr().out

        written = json.loads(report.read_text())

        assert written["problems"][0]["problem"] == "P3[T=4]"
        assert written["problems"][0]["plain"]["trials"] == 1


@pytest.mark.parametrize("value,expected", [
    (20.0, "20"),
    (0.5, "0.5"),
    (-0.0, "0"),
    (float("inf"), "inf"),
    (float("-inf"), "-inf"),
])
def test_format_extended(value, expected):
    assert format_extended(value) == expected
