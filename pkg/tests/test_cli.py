import json
import subprocess
import sys

import pytest

from edgecil.cli import main

from conftest import FIXTURES

EMB = str(FIXTURES / "cifar6_embeddings.csv")
BLOCK = str(FIXTURES / "block4.csv")
LAND = str(FIXTURES / "cifar6_landscape.csv")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def error_line(err):
    return json.loads(err.strip().splitlines()[-1])


def test_count(capsys):
    code, out, _ = run(capsys, "count", "--classes", "6", "--tasks", "3")
    assert code == 0 and out == "90\n"
    code, out, _ = run(capsys, "count", "--classes", "6", "-k", "3", "--samples", "3", "--format", "json")
    assert json.loads(out) == {"n_classes": 6, "n_tasks": 3, "omega_size": 90, "coverage": "3.333e-2"}


def test_enumerate_and_refusal(capsys):
    code, out, _ = run(capsys, "enumerate", "--sim", BLOCK, "-k", "2")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "sequence,score" and len(lines) == 7
    code, out, err = run(capsys, "enumerate", "--classes", "12", "-k", "3", "--cap", "1000")
    assert code == 1 and out == ""
    info = error_line(err)
    assert info["error"] == "Refused" and info["omega_size"] == "34650" and "34650" in info["message"]


def test_enumerate_json(capsys):
    code, out, _ = run(capsys, "enumerate", "--sim", BLOCK, "-k", "2", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["omega_size"] == 6 and len(doc["sequences"]) == 6
    assert doc["sequences"][0] == {"sequence": "0 1|2 3", "tasks": [[0, 1], [2, 3]], "score": pytest.approx(0.2)}


def test_generate_hard_block(capsys, tmp_path):
    out_file = tmp_path / "hard.json"
    code, _, _ = run(capsys, "generate", "--sim", BLOCK, "-k", "2", "--mode", "hard", "-o", str(out_file))
    doc = json.loads(out_file.read_text())
    assert code == 0
    assert doc["score"] == pytest.approx(0.2) and doc["provenance"] == "hard" and doc["granularity"] == 2
    assert doc["labels"] == [["a", "b"], ["c", "d"]]
    assert not list(tmp_path.glob(".*tmp"))


def test_generate_median_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for f in (a, b):
        assert run(capsys, "generate", "--embeddings", EMB, "-k", "3", "--mode", "median", "--seed", "7",
                   "-o", str(f))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_missing_k_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["generate", "--sim", BLOCK, "--mode", "hard"])
    assert info.value.code == 2
    assert error_line(capsys.readouterr().err)["error"] == "UsageError"


def test_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as info:
        main(["bounds", "--help"])
    assert info.value.code == 0
    assert "--r-sigma" in capsys.readouterr().out


def test_bad_input_file(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text(",a,b\na,1,2\nb,2,1\n")
    code, _, err = run(capsys, "generate", "--sim", str(bad), "-k", "2", "--mode", "hard")
    info = error_line(err)
    assert code == 2 and info["error"] == "FormatError" and info["line"] == 2 and info["column"] == 3


def test_bad_granularity(capsys):
    code, _, err = run(capsys, "generate", "--sim", BLOCK, "-k", "2", "--mode", "hard", "--granularities", "4..2")
    assert code == 2 and error_line(err)["error"] == "UsageError"
    code, _, err = run(capsys, "generate", "--sim", BLOCK, "-k", "2", "--mode", "hard", "--granularities", "2,9")
    assert code == 2


def test_bounds_panels(capsys):
    code, out, _ = run(capsys, "bounds", "--classes", "100", "--tasks", "10", "--eps", "0.1", "--delta", "0.05",
                       "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["remark2"]["required_L"] == 18211
    code, out, _ = run(capsys, "bounds", "--omega", "90", "--eps", "0.1", "--delta", "0.05")
    assert code == 1 and "INFEASIBLE" in out
    code, out, _ = run(capsys, "bounds", "--classes", "4", "--tasks", "2", "--s-bar", "1", "--upper", "1",
                       "--format", "json")
    assert json.loads(out)["greedy"]["expected_random_score"] == 2.0
    code, out, _ = run(capsys, "bounds", "--omega", "1000000", "--tail-fraction", "0.01", "--samples", "3",
                       "--format", "json")
    assert json.loads(out)["miss"]["probability"] == pytest.approx(0.9704, abs=1e-4)


@pytest.mark.parametrize("argv", [["--omega", "90", "--delta", "1.5"], ["--omega", "90", "--eps", "0"], []])
def test_bounds_invalid(capsys, argv):
    code, _, err = run(capsys, "bounds", *argv)
    assert code == 2 and "error" in error_line(err)


def test_landscape_cmd(capsys, tmp_path):
    out_file = tmp_path / "acc.csv"
    assert run(capsys, "landscape", "--embeddings", EMB, "-k", "3", "--noise-std", "0.02", "-o", str(out_file))[0] == 0
    assert out_file.read_text() == (FIXTURES / "cifar6_landscape.csv").read_text()


def test_protocol_artifacts_and_compare(capsys, tmp_path):
    art = tmp_path / "art"
    code, out, _ = run(capsys, "protocol", "--embeddings", EMB, "-k", "3", "--format", "json",
                       "--artifacts", str(art))
    assert code == 0
    report = json.loads(out)
    assert {p.name for p in art.iterdir()} == {"truth.json", "edge_gaussian.json", "rs_gaussian.json",
                                               "scatter.csv", "hist.csv"}
    assert len((art / "scatter.csv").read_text().splitlines()) == 91
    assert len((art / "hist.csv").read_text().splitlines()) == 65
    for est in ("edge", "rs"):
        code, out, _ = run(capsys, "compare", str(art / "truth.json"), str(art / f"{est}_gaussian.json"),
                           "--format", "json")
        doc = json.loads(out)
        assert doc["jsd"] == report["comparison"][est]["jsd"]
        assert doc["w1"] == report["comparison"][est]["w1"]
    code, out, _ = run(capsys, "compare", str(art / "truth.json"), str(art / "truth.json"))
    assert code == 0 and out == "JSD 0\nW1  0\n"


def test_protocol_from_file(capsys):
    code, out, _ = run(capsys, "protocol", "--embeddings", EMB, "--acc", LAND, "-k", "3", "--format", "json")
    assert code == 0 and json.loads(out)["truth"]["count"] == 90
    code, out, _ = run(capsys, "protocol", "--embeddings", EMB, "--acc", LAND, "-k", "3")
    assert "JSD" in out and "EDGE" in out


def test_protocol_missing_accuracy(capsys, tmp_path):
    partial = tmp_path / "p.csv"
    partial.write_text("\n".join(open(LAND).read().splitlines()[:5]) + "\n")
    code, _, err = run(capsys, "protocol", "--embeddings", EMB, "--acc", str(partial), "-k", "3")
    assert code == 2 and "no accuracy recorded" in error_line(err)["message"]


def test_compare_rejects_gaussian_truth(capsys, tmp_path):
    g = tmp_path / "g.json"
    g.write_text(json.dumps({"kind": "gaussian", "mean": 0.3, "variance": 0.01}))
    code, _, err = run(capsys, "compare", str(g), str(g))
    assert code == 2


def test_compare_bad_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\n  nope")
    code, _, err = run(capsys, "compare", str(bad), str(bad))
    info = error_line(err)
    assert code == 2 and info["error"] == "FormatError" and info["line"] == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "edgecil", "count", "--classes", "8", "--tasks", "4"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "2520\n"
