import json
from importlib import resources

import jsonschema
import pytest

from urnlab import cli


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def load_schema():
    with resources.files("urnlab.schema").joinpath("output.schema.json").open() as fh:
        return json.load(fh)


SCHEMA = load_schema()


def check_json(text):
    payload = json.loads(text)
    jsonschema.validate(payload, SCHEMA)
    return payload


class TestPmf:
    def test_documented_example(self, capsys):
        code, out, _ = run_cli(
            capsys, "pmf", "--model", "I", "--A", "linear:1", "--B", "linear:1",
            "--n", "2", "--m", "2", "--format", "json",
        )
        assert code == 0
        payload = check_json(out)
        assert payload["pmf"] == [
            {"k": 0, "p": "1/2"},
            {"k": 1, "p": "1/3"},
            {"k": 2, "p": "1/6"},
        ]

    def test_single_k(self, capsys):
        code, out, _ = run_cli(
            capsys, "pmf", "--model", "II", "--A", "linear:1", "--B", "linear:1",
            "--n", "2", "--m", "1", "--k", "1",
        )
        assert code == 0
        assert check_json(out)["pmf"] == [{"k": 1, "p": "1/6"}]

    def test_csv_decimals(self, capsys):
        code, out, _ = run_cli(
            capsys, "pmf", "--model", "I", "--A", "linear:1", "--B", "linear:1",
            "--n", "2", "--m", "2", "--format", "csv", "--decimals", "6",
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "k,p"
        assert lines[1] == "0,0.500000"
        assert out.endswith("\n") and "\r" not in out

    def test_k_out_of_range(self, capsys):
        code, _, err = run_cli(
            capsys, "pmf", "--A", "linear:1", "--B", "linear:1",
            "--n", "2", "--m", "2", "--k", "5",
        )
        assert code == 2
        assert "--k" in err

    def test_bad_weight_descriptor(self, capsys):
        code, _, err = run_cli(
            capsys, "pmf", "--A", "nope:1", "--B", "linear:1", "--n", "2", "--m", "2"
        )
        assert code == 2
        assert "--A" in err

    def test_bad_model(self, capsys):
        code, _, err = run_cli(
            capsys, "pmf", "--model", "Z", "--A", "linear:1", "--B", "linear:1",
            "--n", "1", "--m", "1",
        )
        assert code == 2
        assert "--model" in err

    def test_unknown_flag_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["pmf", "--bogus", "1"])
        assert exc.value.code == 2


class TestOracleCommand:
    def test_recurrence_matches_pmf(self, capsys):
        _, closed, _ = run_cli(
            capsys, "pmf", "--model", "II", "--A", "square", "--B", "linear:1",
            "--n", "3", "--m", "2",
        )
        _, ground, _ = run_cli(
            capsys, "oracle", "--model", "II", "--A", "square", "--B", "linear:1",
            "--n", "3", "--m", "2",
        )
        assert json.loads(closed)["pmf"] == json.loads(ground)["pmf"]

    def test_enumerate_method(self, capsys):
        code, out, _ = run_cli(
            capsys, "oracle", "--A", "linear:1", "--B", "linear:1",
            "--n", "1", "--m", "1", "--method", "enumerate",
        )
        assert code == 0
        assert check_json(out)["pmf"][0] == {"k": 0, "p": "1/2"}


class TestPmfMulti:
    def test_engines_agree(self, capsys):
        base = [
            "pmf-multi", "--model", "I",
            "--weights", "linear:1;square;linear:2", "--counts", "2,2,2",
        ]
        _, closed, _ = run_cli(capsys, *base, "--engine", "closed")
        _, ground, _ = run_cli(capsys, *base, "--engine", "oracle")
        assert json.loads(closed)["pmf"] == json.loads(ground)["pmf"]
        check_json(closed)

    def test_single_vector(self, capsys):
        code, out, _ = run_cli(
            capsys, "pmf-multi", "--model", "I",
            "--weights", "linear:1;linear:1;linear:1", "--counts", "1,1,1",
            "--k", "1,1",
        )
        assert code == 0
        assert check_json(out)["pmf"] == [{"k": [1, 1], "p": "1/3"}]

    def test_count_mismatch(self, capsys):
        code, _, err = run_cli(
            capsys, "pmf-multi", "--weights", "linear:1;square", "--counts", "1,1,1"
        )
        assert code == 2
        assert "--counts" in err


class TestMoments:
    def test_reports_match(self, capsys):
        code, out, _ = run_cli(
            capsys, "moments", "--a", "2", "--d", "3", "--n", "5", "--m", "4", "--s", "3"
        )
        assert code == 0
        payload = check_json(out)
        values = {r["method"]: r["value"] for r in payload["reports"]}
        assert values["closed-form"] == values["direct-summation"]

    def test_mixed(self, capsys):
        code, out, _ = run_cli(
            capsys, "moments", "--mixed", "--avec", "1,1,1", "--nvec", "1,1,1",
            "--svec", "1,1",
        )
        assert code == 0
        payload = check_json(out)
        assert payload["reports"][0]["value"] == "1/3"

    def test_okc_polynomial(self, capsys):
        code, out, _ = run_cli(
            capsys, "okc-moments", "--b", "1", "--c", "1", "--n", "1", "--m", "1",
            "--s", "1", "--kind", "polynomial",
        )
        assert code == 0
        payload = check_json(out)
        assert payload["polynomial"] == ["0", "1", "1"]
        values = {r["method"]: r["value"] for r in payload["reports"]}
        assert values["closed-form"] == "1/1"


class TestLimit:
    def test_fixed_blacks_moment_exact(self, capsys):
        code, out, _ = run_cli(capsys, "limit", "--law", "fixed-blacks-moment", "--m", "2", "--s", "1")
        assert code == 0
        assert check_json(out)["value"] == "2/5"

    def test_missing_param_named(self, capsys):
        code, _, err = run_cli(capsys, "limit", "--law", "fixed-blacks-moment", "--m", "2")
        assert code == 2
        assert "--s" in err

    def test_w_cdf_grid_csv(self, capsys):
        code, out, _ = run_cli(
            capsys, "limit", "--law", "w-cdf", "--family", "square",
            "--grid", "0:1:1/100", "--format", "csv", "--tol", "1e-22",
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "x,value"
        assert len(lines) == 102  # header + 101 grid points
        values = [float(line.split(",")[1]) for line in lines[1:]]
        assert values == sorted(values)
        assert values[0] == 0.0

    def test_fixed_whites_pmf(self, capsys):
        code, out, _ = run_cli(
            capsys, "limit", "--law", "fixed-whites-pmf", "--n", "1", "--k", "1"
        )
        assert code == 0
        assert check_json(out)["value"].startswith("0.27202905498")


class TestTheta:
    def test_matches_triple_product(self, capsys):
        code, out, _ = run_cli(capsys, "theta", "--q", "0.5", "--tol", "1e-12")
        assert code == 0
        payload = check_json(out)
        assert float(payload["difference"]) < 1e-12


class TestDuality:
    def test_two_color(self, capsys):
        code, out, _ = run_cli(
            capsys, "duality-check", "--A", "square", "--B", "linear:1", "--n", "4", "--m", "3"
        )
        assert code == 0
        assert check_json(out)["verdict"] == "exact match"

    def test_multi(self, capsys):
        code, out, _ = run_cli(
            capsys, "duality-check", "--weights", "linear:1;square;triangular",
            "--counts", "2,2,2",
        )
        assert code == 0
        assert check_json(out)["verdict"] == "exact match"


class TestSimulateAndCompare:
    def test_simulate_deterministic_across_workers(self, capsys):
        base = [
            "simulate", "--model", "I", "--A", "linear:1", "--B", "linear:1",
            "--n", "2", "--m", "2", "--trials", "30000", "--seed", "11",
        ]
        _, first, _ = run_cli(capsys, *base, "--workers", "1")
        _, second, _ = run_cli(capsys, *base, "--workers", "1")
        assert first == second
        _, parallel, _ = run_cli(capsys, *base, "--workers", "6")
        assert json.loads(first)["counts"] == json.loads(parallel)["counts"]
        check_json(first)

    def test_compare_clean(self, capsys):
        code, out, _ = run_cli(
            capsys, "compare", "--model", "II", "--A", "linear:2", "--B", "triangular",
            "--n", "3", "--m", "2", "--trials", "20000", "--seed", "4",
        )
        assert code == 0
        payload = check_json(out)
        assert payload["closed_equals_oracle"] is True
        assert payload["representations_agree"] is True
        assert payload["max_discrepancy"] == "0/1"


class TestEmitPlotData:
    def test_empty_grid_header_only(self):
        assert cli.emit_plot_data([]) == "x,value\n"

    def test_roundtrip_through_json(self, capsys):
        _, out, _ = run_cli(
            capsys, "pmf", "--A", "linear:1", "--B", "square", "--n", "3", "--m", "2"
        )
        payload = json.loads(out)
        again = json.dumps(payload, sort_keys=True) + "\n"
        assert again == out

    def test_decimal_rendering(self):
        from fractions import Fraction

        assert cli.render_decimal(Fraction(1, 3), 6) == "0.333333"
        assert cli.render_decimal(Fraction(2, 3), 4) == "0.6667"
        assert cli.render_decimal(Fraction(-1, 8), 3) == "-0.125"
        assert cli.render_decimal(Fraction(5), 0) == "5"
