import csv
import io
import json

import pytest

from hyperboot import branching
from hyperboot.cli import main


def run(argv):
    buf = io.StringIO()
    code = main(argv, out=buf)
    return code, buf.getvalue()


GRAPH = ["--n", "100000", "--k", "2", "--r", "2", "--p", "1e-4"]


def test_theory_json():
    code, text = run(["theory", *GRAPH])
    data = json.loads(text)
    assert code == 0
    assert data["a_star"] == pytest.approx(1000.0)
    assert data["a_c"] == pytest.approx(500.0)
    assert data["regime_ok"] is True
    assert data["phi_c"] == 0.5


def test_theory_csv():
    code, text = run(["theory", *GRAPH, "--csv", "--steps", "3", "--eps", "0.25", "--delta", "0.1"])
    assert code == 0
    beta_block, gamma_block = text.strip().split("\n\n")
    rows = list(csv.reader(io.StringIO(beta_block)))
    assert rows[0] == ["t", "b", "beta"] and len(rows) == 5
    assert float(rows[2][2]) == pytest.approx(0.45234375)
    assert gamma_block.splitlines()[0] == "t,c,gamma,c_0,c_1,c_2"


def test_theory_bad_pairing_both_sides():
    code, _ = run(["theory", *GRAPH, "--eps", "0.01", "--delta", "0.5", "--r", "3"])
    assert code == 2


@pytest.mark.parametrize("process", ["bootstrap", "query", "mild"])
def test_simulate(tmp_path, process):
    trace = tmp_path / "trace.json"
    argv = ["simulate", "--n", "2000", "--k", "2", "--r", "2", "--p", "0.002", "--a", "30",
            "--seed", "4", "--process", process, "--trace", str(trace)]
    code, text = run(argv)
    rec = json.loads(text)
    assert code == 0 and rec["process"] == process and rec["a"] == 30
    assert json.loads(trace.read_text())["final_size"] == rec["final_size"]
    assert json.loads(run(argv)[1])["final_size"] == rec["final_size"]


def test_scan(tmp_path):
    out = tmp_path / "scan.csv"
    argv = ["scan", "--n", "2000", "--k", "2", "--r", "2", "--p", "0.002", "--ratios", "0:2:0.5",
            "--trials", "4", "--seed", "1", "--out", str(out)]
    assert run(argv)[0] == 0
    first = out.read_bytes()
    rows = list(csv.DictReader(io.StringIO(first.decode())))
    assert [r["ratio"] for r in rows] == ["0", "0.5", "1", "1.5", "2"]
    assert rows[0]["frac_large"] == "0"
    assert run(argv)[0] == 0 and out.read_bytes() == first
    code, text = run(argv[:-1] + ["-"])
    assert text.encode() == first


def test_couple():
    code, text = run(["couple", "--n", "150", "--k", "3", "--r", "2", "--p", "5e-4", "--a", "10",
                      "--trials", "5", "--seed", "2", "--shuffles", "2"])
    rep = json.loads(text)
    assert code == 0 and rep["violations"] == 0 and len(rep["triples"]) == 5


def test_gw():
    code, text = run(["gw", "--weights", "1", "--probs", "0.5", "--roots", "1", "--m-max", "5",
                      "--samples", "20000", "--chi", "3"])
    assert code == 0
    table, tail = text.strip().split("\n\n")
    rows = list(csv.DictReader(io.StringIO(table)))
    assert len(rows) == 5
    assert float(rows[2]["dwass"]) == pytest.approx(0.125)
    assert float(rows[2]["dp"]) == pytest.approx(0.125)
    trow = list(csv.DictReader(io.StringIO(tail)))[0]
    assert float(trow["bound"]) == pytest.approx(branching.gw_tail_bound(0.5, 1, 3.0, 1))


def test_bad_arguments():
    with pytest.raises(SystemExit):
        main(["simulate", "--n", "10"])
    assert run(["gw", "--weights", "1,2", "--probs", "0.5", "--roots", "1"])[0] == 2
