import json

import numpy as np
import pytest

from tropicore.main import GENERATORS, main, parse_args, random_reducible_matrix
from tropicore.utils.graphs import frobenius_form


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_example1(capsys):
    code, out, _ = run(capsys, "analyze", "example1", "--algebra", "max")
    assert code == 0
    report = json.loads(out)
    assert report["algebra"] == "max"
    assert report["spectrum"] == pytest.approx([1.0])
    assert report["core"]["census"] == 4
    assert report["core"]["sigma_lambda"] == 4
    assert [c["sigma"] for c in report["critical_graph"]["components"]] == [4]
    assert report["critical_graph"]["edges"] == [[2, 3], [3, 4], [4, 5], [5, 2]]
    assert report["core"]["periodicity"]["kind"] == "General"
    assert all(check["passed"] for check in report["checks"])


def test_analyze_power(capsys):
    code, out, _ = run(capsys, "analyze", "example1", "--power", "4")
    assert code == 0
    cone = json.loads(out)["eigencones"][0]
    assert cone["k"] == 4
    assert [g["cyclic_index"] for g in cone["generators"]] == [0, 1, 2, 3]
    assert [g["derived_nodes"] for g in cone["generators"]] == [[2], [5], [4], [3]]


def test_analyze_both_algebras(capsys):
    code, out, _ = run(capsys, "analyze", "example2", "--algebra", "both")
    assert code == 0
    report = json.loads(out)
    assert report["max"]["core"]["census"] == 3
    assert report["nonneg"]["core"]["census"] == 3
    assert report["max"]["periods"]["sigma_lambda"] == 2
    assert report["nonneg"]["critical_graph"] is None
    assert report["nonneg"]["core"]["periodicity"] is None
    assert report["nonneg"]["spectrum"] == pytest.approx([1.0, 0.7924], abs=5e-4)


def test_analyze_with_rho(capsys):
    code, out, _ = run(capsys, "analyze", "example2", "--rho", "0.5805")
    assert code == 0
    cones = json.loads(out)["eigencones"]
    assert len(cones) == 1
    assert cones[0]["rho"] == pytest.approx(0.5805, abs=1e-3)
    assert cones[0]["generators"][0]["ancestor_nodes"] == [3, 4]


def test_analyze_nilpotent(capsys):
    code, out, _ = run(capsys, "analyze", "nilpotent")
    assert code == 0
    report = json.loads(out)
    assert report["spectrum"] == []
    assert report["critical_graph"] is None
    assert report["core"]["zero"]
    assert report["core"]["extremals"] == []


def test_analyze_dot(capsys):
    code, out, _ = run(capsys, "analyze", "example1", "--out", "dot")
    assert code == 0
    assert out.count("digraph") == 3
    assert "n1 -> n2" in out or "n2 -> n1" in out


def test_analyze_csv_input(capsys, tmp_path):
    path = tmp_path / "cycle.csv"
    path.write_text("0,2\n0.5,0\n", encoding="utf-8")
    code, out, _ = run(capsys, "analyze", str(path))
    assert code == 0
    report = json.loads(out)
    assert report["n"] == 2
    assert report["spectrum"] == pytest.approx([1.0])
    assert report["core"]["census"] == 2


def test_analyze_is_deterministic(capsys):
    first = run(capsys, "analyze", "example2", "--algebra", "both")[1]
    second = run(capsys, "analyze", "example2", "--algebra", "both")[1]
    assert first == second


@pytest.mark.parametrize("content", ["{", '{"n": 2, "entries": [[1, 2]]}', '{"n": 1, "entries": [[-1]]}'])
def test_bad_matrix_file(capsys, tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content, encoding="utf-8")
    code, _, err = run(capsys, "analyze", str(path))
    assert code == 3
    assert err.startswith("error:")


def test_unknown_shipped_matrix(capsys):
    code, _, err = run(capsys, "analyze", "no_such_matrix")
    assert code == 3
    assert "example1" in err


def test_rho_outside_spectrum(capsys):
    code, _, err = run(capsys, "analyze", "example2", "--rho", "0.9")
    assert code == 4
    assert "spectrum" in err


def test_verify_passes(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--seed", "3", "--trials", "2", "--size", "2",
                       "--witness-dir", str(tmp_path))
    assert code == 0
    assert out.startswith("[verify] OK")
    assert not list(tmp_path.iterdir())


def test_verify_broken_tolerance_writes_witnesses(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--seed", "3", "--trials", "1", "--size", "2",
                       "--algebra", "max", "--tol", "10", "--witness-dir", str(tmp_path))
    assert code == 1
    assert out.startswith("[verify] FAIL (1 instances)")
    path = tmp_path / "seed3_trial0_max.json"
    payload = json.loads(path.read_text(encoding="utf-8"))
    assert payload["algebra"] == "max"
    assert "tolerance_self_test" in [f["name"] for f in payload["failures"]]


def test_verify_rejects_large_instances(capsys):
    code, _, err = run(capsys, "verify", "--size", "9")
    assert code == 7
    assert "n <= 8" in err


@pytest.mark.parametrize("argv", [
    ["analyze", "example1", "--power", "0"],
    ["analyze", "example1", "--algebra", "min"],
    ["verify", "--tol", "-1"],
    ["analyze", "example2", "--algebra", "both", "--rho", "1"],
    [],
])
def test_argument_errors(argv):
    with pytest.raises(SystemExit) as exc:
        parse_args(argv)
    assert exc.value.code == 2


def test_rho_in_nonnegative_algebra(capsys):
    code, out, _ = run(capsys, "analyze", "example2", "--algebra", "nonneg", "--rho", "0.7924")
    assert code == 0
    cones = json.loads(out)["eigencones"]
    assert cones[0]["rho"] == pytest.approx(0.7924, abs=5e-4)


def test_verify_rotates_through_reducible_matrices(capsys, tmp_path):
    assert random_reducible_matrix in GENERATORS
    for seed in range(5):
        a = random_reducible_matrix(np.random.default_rng([seed, 2]), 5)
        assert a.n == 5
    code, out, _ = run(capsys, "verify", "--seed", "4", "--trials", "3", "--size", "3",
                       "--witness-dir", str(tmp_path))
    assert code == 0
    assert out.startswith("[verify] OK (trials=3")


def test_reducible_matrices_have_several_classes():
    sizes = [len(frobenius_form(random_reducible_matrix(np.random.default_rng(seed), 6)).classes)
             for seed in range(10)]
    assert max(sizes) > 1
