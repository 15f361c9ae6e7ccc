from __future__ import annotations

import json
import math
import subprocess
import sys

import pytest

from hyperfptas.cli import dumps, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


TRIPLE = "hgraph 1\nmodel hardcore\nlambda 1\nn 3\ne 0 1 2\n"


def test_compute_triangle_edge(tmp_path, capsys):
    code, out, _ = run(capsys, "compute", "--input", write(tmp_path, "t.hg", TRIPLE), "--epsilon", "0.05")
    assert code == 0
    res = json.loads(out)
    assert abs(res["logZ"] - math.log(7)) <= 0.05
    assert res["guaranteed"] is True
    for key in ("model", "n", "m", "delta", "lambda", "c", "alpha", "C", "L", "logZ", "Z", "elapsed_ms", "nodes"):
        assert key in res


def test_compute_spin_reports_spin_constants(tmp_path, capsys):
    text = "hgraph 1\nmodel spin\nlambda 0.5\nn 3\ne 0 1 2 : 0.9 0.9\n"
    code, out, _ = run(capsys, "compute", "--input", write(tmp_path, "s.hg", text), "--epsilon", "0.05")
    res = json.loads(out)
    assert code == 0
    assert abs(res["logZ"] - math.log(3.2625)) <= 0.05
    for key in ("beta_c", "delta_margin", "w_hat", "c1", "c2", "c", "alpha", "C", "L"):
        assert key in res


def test_spin_label_below_threshold_exits_3(tmp_path, capsys):
    text = "hgraph 1\nmodel spin\nlambda 0.5\nn 2\ne 0 1 : 0.6 0.9\n"
    path = write(tmp_path, "s.hg", text)
    code, _, err = run(capsys, "compute", "--input", path, "--epsilon", "0.1", "--delta", "3")
    assert code == 3 and "outside" in err
    code, out, _ = run(capsys, "compute", "--input", path, "--epsilon", "0.1", "--delta", "3", "--force")
    assert code == 0 and json.loads(out)["guaranteed"] is False


def test_max_depth_zero_gives_edgeless_value(tmp_path, capsys):
    text = "hgraph 1\nmodel hardcore\nlambda 0.5\nn 4\ne 0 1\ne 2 3\n"
    code, out, _ = run(capsys, "compute", "--input", write(tmp_path, "m.hg", text), "--max-depth", "0", "--delta", "3")
    res = json.loads(out)
    assert code == 0
    assert res["Z"] == pytest.approx(1.5**4, rel=1e-11)
    assert res["guaranteed"] is False


def test_parse_error_exits_2(tmp_path, capsys):
    path = write(tmp_path, "bad.hg", "hgraph 1\nmodel hardcore\nlambda 1\nn 3\ne 0 3\n")
    code, _, err = run(capsys, "compute", "--input", path, "--epsilon", "0.1")
    assert code == 2 and "line 5" in err


def test_hardcore_outside_uniqueness_exits_3(tmp_path, capsys):
    text = "hgraph 1\nmodel hardcore\nlambda 5\nn 4\ne 0 1\ne 0 2\ne 0 3\n"
    code, _, _ = run(capsys, "compute", "--input", write(tmp_path, "h.hg", text), "--epsilon", "0.1")
    assert code == 3


def test_threshold_proximity_exits_4(tmp_path, capsys):
    text = "hgraph 1\nmodel hardcore\nlambda 3.9996\nn 4\ne 0 1\ne 0 2\ne 0 3\n"
    code, _, err = run(capsys, "compute", "--input", write(tmp_path, "h.hg", text), "--epsilon", "0.1")
    assert code == 4 and "proximity" in err


def test_exact_guard_exits_5(tmp_path, capsys):
    text = "hgraph 1\nmodel hardcore\nlambda 1\nn 30\n"
    code, _, _ = run(capsys, "exact", "--input", write(tmp_path, "big.hg", text))
    assert code == 5


def test_exact_reports_rational(tmp_path, capsys):
    code, out, _ = run(capsys, "exact", "--input", write(tmp_path, "t.hg", TRIPLE), "--omit-timing")
    res = json.loads(out)
    assert code == 0 and res["Z_rational"] == "7" and "elapsed_ms" not in res


def test_check_examples(capsys):
    code, out, _ = run(capsys, "check", "--model", "hardcore", "--delta", "5", "--lambda", "1.0")
    res = json.loads(out)
    assert code == 0 and res["inside"] is True
    assert res["threshold"] == pytest.approx(1.053498, abs=1e-6)
    code, out, _ = run(capsys, "check", "--model", "spin", "--delta", "3", "--beta", "0.65")
    res = json.loads(out)
    assert res["inside"] is False and res["threshold"] == pytest.approx(0.698758, abs=1e-6)
    code, out, _ = run(capsys, "check", "--model", "hardcore", "--delta", "2", "--lambda", "100")
    assert json.loads(out)["threshold"] == "inf"


def test_usage_errors_exit_1(capsys):
    assert run(capsys, "compute")[0] == 1
    assert run(capsys, "check", "--model", "spin", "--delta", "3")[0] == 1
    assert run(capsys, "nonsense")[0] == 1


def test_gen_then_compare_seed_42(tmp_path, capsys):
    path = str(tmp_path / "g.hg")
    code, _, _ = run(capsys, "gen", "--n", "10", "--m", "8", "--max-degree", "3", "--seed", "42",
                     "--lambda", "0.8", "--output", path)
    assert code == 0
    text = open(path).read()
    assert "xorshift64* seed=42" in text
    code, out, _ = run(capsys, "compare", "--input", path, "--epsilon", "0.05")
    res = json.loads(out)
    assert code == 0 and res["pass"] is True
    assert res["abs_log_error"] <= 0.05


def test_gen_is_reproducible(capsys):
    args = ["gen", "--model", "spin", "--n", "8", "--m", "6", "--max-degree", "3", "--seed", "9"]
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


def test_reduce_triangle(tmp_path, capsys):
    src = write(tmp_path, "k3.txt", "0 1\n1 2\n2 0\n")
    out_path = str(tmp_path / "k3.hg")
    assert run(capsys, "reduce", "--input", src, "--output", out_path)[0] == 0
    code, out, _ = run(capsys, "compare", "--input", out_path, "--epsilon", "0.01")
    res = json.loads(out)
    assert res["pass"] is True and res["logZ_exact"] == pytest.approx(math.log(4), abs=1e-11)


def test_reduce_isolated_vertex_fails(tmp_path, capsys):
    src = write(tmp_path, "g.txt", "0 1\nn 3\n")
    assert run(capsys, "reduce", "--input", src)[0] == 1


def test_bench_json_and_csv(capsys):
    code, out, _ = run(capsys, "bench", "--sizes", "6,12", "--lambda", "0.3")
    res = json.loads(out)
    assert code == 0 and [r["n"] for r in res["rows"]] == [6, 12]
    assert isinstance(res["loglog_slope_nodes"], float)
    code, out, _ = run(capsys, "bench", "--sizes", "6,12", "--format", "csv")
    lines = out.splitlines()
    assert lines[0].startswith("model,n,m,delta") and lines[-1].startswith("# loglog_slope_nodes=")


def test_threads_do_not_change_bytes(tmp_path, capsys):
    path = str(tmp_path / "g.hg")
    run(capsys, "gen", "--n", "11", "--m", "9", "--max-degree", "3", "--seed", "3", "--output", path)
    a = run(capsys, "compute", "--input", path, "--epsilon", "0.05", "--omit-timing")[1]
    b = run(capsys, "compute", "--input", path, "--epsilon", "0.05", "--omit-timing", "--threads", "4")[1]
    assert a == b


def test_numbers_have_twelve_significant_digits():
    text = dumps({"x": math.pi, "y": 1 / 3, "z": -math.inf, "k": 5, "big": 6.02214076e23})
    res = json.loads(text)
    assert res == {"x": 3.14159265359, "y": 0.333333333333, "z": "-inf", "k": 5, "big": 6.02214076e23}


def test_module_entry_point(tmp_path):
    path = write(tmp_path, "t.hg", TRIPLE)
    proc = subprocess.run([sys.executable, "-m", "hyperfptas", "compute", "--input", path, "--epsilon", "0.1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["n"] == 3
