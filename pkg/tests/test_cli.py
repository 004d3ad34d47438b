import csv
import io
import json

import pytest

from kummer import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_scan_json_and_csv(capsys):
    code, out, _ = run(capsys, "scan", "--n-max", "10")
    assert code == 0
    data = json.loads(out)
    assert [r["D"] for r in data][:3] == [5, 17, 37]
    code, out, _ = run(capsys, "--no-cache", "scan", "--n-max", "10", "--csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == cli.SCAN_FIELDS
    assert len(rows) == len(data) + 1


def test_classgroup(capsys):
    code, out, _ = run(capsys, "classgroup", "--disc", "145")
    assert code == 0
    assert json.loads(out)["h_plus"] == 4


def test_classgroup_bad_disc(capsys):
    code, _, err = run(capsys, "classgroup", "--disc", "7")
    assert code == cli.EXIT_INPUT and err.startswith("error:")


def test_fmcount(tmp_path, capsys):
    path = tmp_path / "ns.json"
    path.write_text(json.dumps([[2, 1], [1, -2]]))
    code, out, _ = run(capsys, "fmcount", "--gram", str(path))
    assert code == 0
    assert json.loads(out)["p_count"] == 1
    code, out, _ = run(capsys, "fmcount", "--gram", str(path), "--g-units", "1")
    assert code == 0 and json.loads(out)["p_count"] >= 1


def test_fmcount_bad_input(tmp_path, capsys):
    path = tmp_path / "ns.json"
    path.write_text(json.dumps([[2, 0, 0], [0, 2, 0], [0, 0, -2]]))
    assert run(capsys, "fmcount", "--gram", str(path))[0] == cli.EXIT_INPUT
    assert run(capsys, "fmcount", "--gram", str(tmp_path / "missing.json"))[0] == cli.EXIT_INPUT
    path.write_text(json.dumps([[2, 1], [1, -2]]))
    assert run(capsys, "fmcount", "--gram", str(path), "--g-units", "1 2")[0] == cli.EXIT_INPUT


def test_construct_verify_roundtrip(tmp_path, capsys):
    out = tmp_path / "c.json"
    code, _, _ = run(capsys, "construct", "--n", "2", "--out", str(out))
    assert code == 0
    assert json.loads(out.read_text())["D"] == 145
    code, text, _ = run(capsys, "verify", "--in", str(out))
    assert code == 0 and json.loads(text)["ok"]

    data = json.loads(out.read_text())
    data["lattices"][0][0][0] += 2
    out.write_text(json.dumps(data))
    code, text, _ = run(capsys, "verify", "--in", str(out))
    assert code == cli.EXIT_VERIFY_FAILED
    assert json.loads(text)["failed"] == "form_matches_gram"


def test_construct_exhausted(capsys):
    code, _, err = run(capsys, "construct", "--n", "40", "--n-max", "15")
    assert code == cli.EXIT_EXHAUSTED
    assert "best" in json.loads(err)


def test_sbtable(capsys):
    code, out, _ = run(capsys, "sbtable", "--n-max", "5")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["n", "D", "h_plus", "epsilon", "ratio"]
    assert rows[1][1] == "5"


def test_usage_error():
    with pytest.raises(SystemExit) as info:
        cli.main(["scan"])
    assert info.value.code == 2
