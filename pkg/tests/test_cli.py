import csv
import io
import json

import pytest

from spinconc.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_round_symmetric(capsys):
    code, out, _ = run(capsys, "round", "--alpha", "0.707106781", "--seed", "1", "--format", "csv")
    assert code == 0
    (row,) = rows(out)
    assert row["p_success"] == "0.500000"


def test_round_08(capsys):
    code, out, _ = run(capsys, "round", "--alpha", "0.8", "--seed", "7", "--format", "csv")
    (row,) = rows(out)
    assert code == 0 and row["p_success"] == "0.460800"
    if row["outcome"] == "failure":
        assert (row["new_alpha"], row["new_beta"]) == ("0.871576", "0.490261")
    else:
        assert row["fidelity"] == "1.000000"


def test_round_table_mentions_fields(capsys):
    code, out, _ = run(capsys, "round", "--alpha", "0.8")
    assert code == 0
    assert "branch_probability" in out and "correction" in out


@pytest.mark.parametrize("alpha", ["1.0", "0", "-0.3", "abc"])
def test_round_bad_alpha(capsys, alpha):
    code, _, err = run(capsys, "round", "--alpha", alpha)
    assert code == 2
    assert "alpha" in err or "number" in err


def test_usage_errors(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "round")[0] == 2
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "iterate", "--alpha", "0.8", "--max-rounds", "0")[0] == 2
    assert run(capsys, "ghz", "--alpha", "0.8", "--parties", "1")[0] == 2
    assert run(capsys, "round", "--alpha", "0.8", "--seed", str(2**64))[0] == 2


def test_iterate_fixed_point(capsys):
    _, out, _ = run(capsys, "iterate", "--alpha", "0.707106781", "--format", "csv")
    table = rows(out)
    assert len(table) == 10
    assert all(r["p_k"] == "0.500000" for r in table)


def test_iterate_08(capsys):
    _, out, _ = run(capsys, "iterate", "--alpha", "0.8", "--format", "csv")
    table = rows(out)
    assert (table[0]["s_k"], table[0]["p_k"]) == ("0.640000", "0.460800")
    assert (table[1]["s_k"], table[1]["p_k"]) == ("0.759644", "0.365170")


def test_iterate_one_row(capsys):
    _, out, _ = run(capsys, "iterate", "--alpha", "0.8", "--max-rounds", "1", "--format", "csv")
    assert len(rows(out)) == 1


def test_yield(capsys):
    _, out, _ = run(capsys, "yield", "--alpha", "0.707106781", "--max-rounds", "10", "--format", "csv")
    (row,) = rows(out)
    assert row["total_yield"] == "0.333333" and row["baseline_yield"] == "0.250000"


def test_yield_json(capsys):
    _, out, _ = run(capsys, "yield", "--alpha", "0.8", "--max-rounds", "3", "--format", "json")
    data = json.loads(out)
    assert set(data) == {"s0", "max_rounds", "baseline_yield", "total_yield", "per_round"}
    assert [r["k"] for r in data["per_round"]] == [1, 2, 3]


def test_curve_three_points(capsys):
    _, out, _ = run(capsys, "curve", "--points", "3", "--format", "csv")
    table = rows(out)
    assert [r["s0"] for r in table] == ["0.250000", "0.500000", "0.750000"]
    assert [r["p1"] for r in table] == ["0.375000", "0.500000", "0.375000"]


def test_curve_default_points(capsys):
    _, out, _ = run(capsys, "curve", "--format", "csv")
    table = rows(out)
    assert len(table) == 99
    assert all(float(r["total_yield"]) > float(r["baseline_yield"]) for r in table)


def test_csv_shape(capsys):
    _, out, _ = run(capsys, "curve", "--points", "5", "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "s0,p1,baseline_yield,total_yield"
    assert not any(line.endswith(",") for line in lines)
    assert all(len(cell.split(".")[1]) == 6 for line in lines[1:] for cell in line.split(","))


def test_ghz_two_parties_equals_round(capsys):
    for fmt in ("csv", "json"):
        _, a, _ = run(capsys, "ghz", "--parties", "2", "--alpha", "0.8", "--seed", "5", "--format", fmt)
        _, b, _ = run(capsys, "round", "--alpha", "0.8", "--seed", "5", "--format", fmt)
        assert a == b


def test_ghz_three_parties(capsys):
    for seed in range(8):
        _, out, _ = run(capsys, "ghz", "--alpha", "0.8", "--seed", str(seed), "--format", "json")
        data = json.loads(out)
        assert data["parties"] == 3
        assert data["p_success"] == pytest.approx(0.4608)
        if data["outcome"] == "success":
            assert data["fidelity"] == pytest.approx(1, abs=1e-9)


def test_monte_carlo_small(capsys):
    _, out, _ = run(capsys, "monte-carlo", "--alpha", "0.8", "--trials", "500",
                    "--max-rounds", "2", "--seed", "3", "--format", "json")
    data = json.loads(out)
    assert data["trials"] == 500
    assert sum(data["success_counts_per_round"]) + data["unresolved"] == 500


def test_output_file(tmp_path, capsys):
    target = tmp_path / "curve.csv"
    code, out, _ = run(capsys, "curve", "--points", "3", "--format", "csv", "--output", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("s0,p1")


def test_output_unwritable(tmp_path, capsys):
    code, _, err = run(capsys, "curve", "--points", "3", "--output", str(tmp_path / "no" / "x.csv"))
    assert code == 3
    assert "cannot write" in err


@pytest.mark.parametrize("argv", [
    ["round", "--alpha", "0.6", "--seed", "11"],
    ["ghz", "--alpha", "0.6", "--seed", "11", "--parties", "4"],
    ["monte-carlo", "--alpha", "0.6", "--trials", "300", "--seed", "11"],
    ["curve", "--points", "7"],
])
@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_determinism(capsys, argv, fmt):
    outs = {run(capsys, *argv, "--format", fmt)[1] for _ in range(3)}
    assert len(outs) == 1
