import io
import json
import subprocess
import sys

import pytest

from sgini import DataError, load_csv, ustat_relative
from sgini.cli import run_cli
from sgini.io import fixture_path


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, text, name="data.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


class TestLoadCsv:
    def test_single_column(self, tmp_path):
        d = load_csv(write(tmp_path, "value\n1\n2\n3\n"))
        assert list(d.groups) == ["all"]
        assert d.groups["all"].values.tolist() == [1.0, 2.0, 3.0]

    def test_groups(self, tmp_path):
        d = load_csv(write(tmp_path, "quarter,income\nQ1,10\nQ1,12\nQ2,30\nQ2,31\nQ2,8\n"),
                     "income", "quarter")
        assert d.counts() == {"Q1": 2, "Q2": 3}

    def test_malformed_names_row(self, tmp_path):
        with pytest.raises(DataError, match="line 3"):
            load_csv(write(tmp_path, "value\n1\nabc\n3\n"))

    @pytest.mark.parametrize("cell", ["0", "-4", "inf", "nan", ""])
    def test_bad_values(self, tmp_path, cell):
        with pytest.raises(DataError, match="line 2"):
            load_csv(write(tmp_path, f"value,g\n{cell},a\n2,a\n"), "value")

    def test_missing_column(self, tmp_path):
        with pytest.raises(DataError, match="missing column 'income'"):
            load_csv(write(tmp_path, "value\n1\n2\n"), "income")

    def test_small_group(self, tmp_path):
        with pytest.raises(DataError, match="fewer than 2"):
            load_csv(write(tmp_path, "g,value\na,1\na,2\nb,3\n"), "value", "g")

    def test_ambiguous_value_column(self, tmp_path):
        with pytest.raises(DataError):
            load_csv(write(tmp_path, "a,b\n1,2\n3,4\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            load_csv(tmp_path / "nope.csv")

    def test_fixture_shape(self):
        d = load_csv(fixture_path(), "income", "quarter")
        assert d.counts() == {f"Q{q} 2013": 50 for q in range(1, 5)}


class TestCommands:
    def test_estimate_relative_is_absolute_over_mean(self):
        code, out, _ = run("estimate", "--fixture", "--format", "json")
        assert code == 0
        for row in json.loads(out)["rows"]:
            for path in ("plugin", "ustat"):
                assert row[f"{path}_relative"] == pytest.approx(
                    row[f"{path}_absolute"] / row["mean"], rel=1e-14)

    def test_estimate_table_precision(self):
        code, out, _ = run("estimate", "--fixture")
        assert code == 0
        lines = out.splitlines()
        assert lines[0].split()[:2] == ["group", "n"] and len(lines) == 5
        for line in lines[1:]:
            rel = line.split()[-1]
            assert len(rel.split(".")[1]) == 4

    def test_estimate_non_integer_nu(self):
        code, out, _ = run("estimate", "--fixture", "--nu", "2.5", "--format", "json")
        assert code == 0
        assert "NaN" in out

    def test_jel_ci_contains_estimate(self):
        code, out, _ = run("ci", "--fixture", "--method", "jel", "--nu", "3", "--format", "json")
        assert code == 0
        data = load_csv(fixture_path(), "income", "quarter")
        for row in json.loads(out)["rows"]:
            est = ustat_relative(data.groups[row["group"]], 3)
            assert row["estimate"] == est and row["lower"] <= est <= row["upper"]

    def test_test_at_estimate(self, tmp_path):
        d = load_csv(fixture_path(), "income", "quarter").groups["Q1 2013"]
        path = write(tmp_path, "value\n" + "\n".join(repr(float(v)) for v in d.values) + "\n")
        r0 = ustat_relative(d, 3)
        code, out, _ = run("test", path, "--nu", "3", "--r0", repr(float(r0)), "--format", "json")
        assert code == 0
        row = json.loads(out)["rows"][0]
        assert row["p_value"] == pytest.approx(1.0) and row["reject"] is False

    def test_csv_format(self):
        code, out, _ = run("ci", "--fixture", "--method", "el", "--format", "csv")
        assert code == 0
        assert out.splitlines()[0] == "group,n,estimate,lower,upper,length"

    @pytest.mark.parametrize("fmt", ["json", "csv", "table"])
    def test_simulate(self, fmt):
        code, out, _ = run("simulate", "--family", "exp", "--params", "1", "--n", "30",
                           "--reps", "5", "--seed", "7", "--threads", "1", "--format", fmt)
        assert code == 0 and "exponential" in out

    def test_json_round_trip(self):
        code, out, _ = run("ci", "--fixture", "--method", "bcel", "--outer-b", "100", "--seed", "3",
                           "--format", "json")
        assert code == 0
        assert json.dumps(json.loads(out), sort_keys=True) + "\n" == out

    def test_bootstrap_reproducible(self):
        argv = ("ci", "--fixture", "--method", "boot-t", "--outer-b", "60", "--inner-b", "10",
                "--seed", "11")
        assert run(*argv) == run(*argv)
        other = run(*argv[:-1], "12")
        assert other[1] != run(*argv)[1]

    def test_seed_from_environment(self, monkeypatch):
        argv = ("ci", "--fixture", "--method", "bcel", "--outer-b", "80", "--format", "json")
        monkeypatch.setenv("SGINI_SEED", "99")
        a = run(*argv)
        assert a == run(*argv[:-2], "--seed", "99", "--format", "json")
        monkeypatch.setenv("SGINI_SEED", "100")
        assert run(*argv)[1] != a[1]


class TestErrors:
    def _error(self, err):
        lines = err.strip().splitlines()
        assert len(lines) == 1
        return json.loads(lines[0])

    def test_usage(self):
        code, out, err = run("ci", "--fixture", "--nu", "1")
        assert code == 2 and out == ""
        assert self._error(err)["exit"] == 2

    def test_argparse_usage(self):
        assert run("frobnicate")[0] == 2
        assert run("ci", "--fixture", "--method", "bca")[0] == 2

    def test_missing_input(self):
        assert run("estimate")[0] == 2

    def test_data_error(self, tmp_path):
        code, _, err = run("estimate", write(tmp_path, "value\n1\nx\n"))
        assert code == 3
        e = self._error(err)
        assert e["error"] == "DataError" and "line 3" in e["message"]

    def test_calibration_error(self, tmp_path):
        code, _, err = run("ci", write(tmp_path, "value\n4\n4\n4\n4\n"), "--method", "bcel",
                           "--outer-b", "50")
        assert code == 4 and self._error(err)["error"] == "CalibrationError"

    def test_level_domain(self):
        assert run("ci", "--fixture", "--level", "1.5")[0] == 2

    def test_power_needs_r0(self):
        code, _, _ = run("simulate", "--family", "exp", "--params", "1", "--n", "20",
                         "--study", "power", "--reps", "2")
        assert code == 2

    def test_bad_params(self):
        code, _, err = run("simulate", "--family", "pareto", "--params", "1,0.5", "--n", "20",
                           "--reps", "2")
        assert code == 2 and self._error(err)["error"] == "ParameterDomainError"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sgini", "estimate", "--fixture", "--format", "csv"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("group,n,mean")
