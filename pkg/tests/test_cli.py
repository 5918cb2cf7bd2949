import csv
import io
import json
import math

import pytest

from gnbmo import cli
from gnbmo.reports import COLUMNS
from gnbmo.verifiers import FACTOR_KEYS


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestExitCodes:
    def test_gamma_example(self, capsys):
        code, out, _ = run(capsys, "verify", "gamma", "--p", "2", "--alpha", "1", "--tol", "1e-8")
        assert code == 0
        (row,) = rows(out)
        assert float(row["lhs"]) == pytest.approx(2.0, rel=1e-10)
        assert float(row["blowup_factor"]) == 2.0

    def test_thm21_example(self, capsys):
        code, out, _ = run(capsys, "verify", "thm21", "--domain", "interval(0,1)", "--field", "affine",
                           "--s", "0.75", "--p", "2", "--h", "0.002")
        assert code == 0
        assert float(rows(out)[0]["ratio"]) == pytest.approx(0.2041, rel=1e-2)

    def test_hypothesis_guard(self, capsys):
        code, _, err = run(capsys, "verify", "thm21", "--s", "0.4", "--p", "2", "--h", "0.002")
        assert code == 2
        assert "requires s ∈ (1/p, 1)" in err

    def test_failed_check_exits_one(self, capsys):
        # the double-precision residual (~7e-16) cannot meet a 1e-16 tolerance
        code, out, _ = run(capsys, "verify", "gamma", "--p", "2", "--alpha", "1", "--tol", "1e-16", "--format", "json")
        assert code == 1
        assert json.loads(out)["reports"][0]["passed"] is False

    def test_unwritable_output(self, capsys, tmp_path):
        target = tmp_path / "missing" / "r.csv"
        code, _, err = run(capsys, "verify", "gamma", "--out", str(target))
        assert code == 2 and "error" in err
        assert not target.parent.exists()

    @pytest.mark.parametrize("argv", [
        ["verify", "thm21", "--domain", "strip(0,1)", "--s", "0.75"],
        ["verify", "thm21", "--field", "nosuchfield", "--s", "0.75", "--h", "0.01"],
        ["verify", "thm21", "--h", "0.01"],
        ["bogus"],
        ["verify", "thm21", "--s", "abc"],
        ["seminorm", "--h", "1e-4", "--domain", "square", "--s", "0.75"],
    ])
    def test_config_errors(self, capsys, argv):
        assert run(capsys, *argv)[0] == 2

    def test_help(self, capsys):
        assert run(capsys, "--help")[0] == 0


class TestConfig:
    def test_flags_win(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# sample\nh = 0.01\ns = 0.6\nfield = sinusoid\n")
        code, out, _ = run(capsys, "verify", "thm21", "--config", str(cfg), "--s", "0.75")
        assert code == 0
        (row,) = rows(out)
        assert (row["s"], row["h"], row["field"]) == ("0.75", "0.01", "sinusoid")

    def test_unknown_key(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("colour = blue\n")
        code, _, err = run(capsys, "kappa", "--config", str(cfg))
        assert code == 2 and "colour" in err

    def test_malformed_line(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("h 0.01\n")
        assert run(capsys, "kappa", "--config", str(cfg))[0] == 2

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "kappa", "--config", str(tmp_path / "none.cfg"))[0] == 2


class TestReports:
    def test_column_order(self, capsys):
        _, out, _ = run(capsys, "verify", "gamma")
        assert out.splitlines()[0].split(",") == list(COLUMNS)

    def test_sweep_rows_in_order(self, capsys):
        code, out, _ = run(capsys, "sweep", "thm21", "--axis", "s", "--values", "0.9,0.4,0.75", "--h", "0.01")
        assert code == 0
        got = rows(out)
        assert [r["s"] for r in got] == ["0.9", "0.4", "0.75"]
        assert got[1]["ratio"] == "" and "skipped" in got[1]["bias_notes"]

    def test_sweep_without_blowup(self, capsys):
        _, out, _ = run(capsys, "sweep", "thm21", "--axis", "s", "--values", "0.75", "--h", "0.01", "--no-blowup")
        assert rows(out)[0]["blowup_factor"] == ""

    def test_json_mirrors_columns(self, capsys):
        _, out, _ = run(capsys, "verify", "lusin", "--format", "json", "--probes", "2", "--seed", "5", "--h", "0.01")
        doc = json.loads(out)
        assert doc["seed"] == 5
        assert len(doc["reports"]) == 2
        for rep in doc["reports"]:
            assert list(rep)[: len(COLUMNS)] == list(COLUMNS)
            assert rep["passed"] is True

    def test_atomic_write_and_determinism(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            assert run(capsys, "verify", "bmo-log", "--probes", "3", "--seed", "9", "--h", "0.01",
                       "--field", "sinusoid", "--out", str(path))[0] == 0
        assert a.read_bytes() == b.read_bytes()
        assert sorted(p.name for p in tmp_path.iterdir()) == ["a.csv", "b.csv"]
        assert len(rows(a.read_text())) == 9

    def test_timing_flag(self, capsys):
        _, out, _ = run(capsys, "verify", "gamma")
        assert rows(out)[0]["runtime_ms"] == ""
        _, out, _ = run(capsys, "verify", "gamma", "--timing")
        assert float(rows(out)[0]["runtime_ms"]) >= 0

    def test_row_consistency(self, capsys):
        code, out, err = run(capsys, "estimate-c", "thm21", "--h", "0.02", "--no-refine")
        assert code == 0 and "c_emp=" in err
        for row in rows(out):
            if not row["rhs_product"]:
                continue
            prod = math.prod(float(row[k]) for k in FACTOR_KEYS if row[k])
            assert prod == pytest.approx(float(row["rhs_product"]), rel=1e-12)


class TestQuantities:
    def test_kappa(self, capsys):
        _, out, _ = run(capsys, "kappa", "--domain", "interval(0,1)")
        assert float(rows(out)[0]["value"]) == pytest.approx(2.0, rel=1e-9)

    def test_seminorm(self, capsys):
        _, out, _ = run(capsys, "seminorm", "--s", "0.75", "--p", "2", "--h", "0.001")
        assert float(rows(out)[0]["value"]) == pytest.approx(8 / 3, rel=1e-2)
        _, out, _ = run(capsys, "seminorm", "--kind", "lp-gradient", "--q", "1.5", "--h", "0.01")
        assert float(rows(out)[0]["value"]) == pytest.approx(1.0)

    def test_bmo(self, capsys):
        _, out, _ = run(capsys, "bmo", "--h", "0.001")
        assert float(rows(out)[0]["value"]) == pytest.approx(1 / 3, rel=1e-2)

    def test_maximal(self, capsys):
        _, out, _ = run(capsys, "maximal", "--x", "0.5", "--h", "0.001")
        got = {r["quantity"]: float(r["value"]) for r in rows(out)}
        assert got["maximal-grad"] == pytest.approx(1.0, rel=1e-6)
        assert got["sharp-maximal"] <= 1 / 3 + 1e-12

    def test_corpus_list(self, capsys):
        _, out, _ = run(capsys, "corpus", "list", "--domain", "square")
        labels = {r["label"] for r in rows(out)}
        assert {"constant", "affine", "bump", "sinusoid", "log"} <= labels

    def test_sample_file_field(self, capsys, tmp_path):
        path = tmp_path / "f.csv"
        xs = [(i + 0.5) / 100 for i in range(100)]
        path.write_text("x,value\n" + "".join(f"{x!r},{x!r}\n" for x in xs))
        _, out, _ = run(capsys, "bmo", "--field", str(path), "--h", "0.01")
        assert float(rows(out)[0]["value"]) == pytest.approx(1 / 3, rel=2e-2)
