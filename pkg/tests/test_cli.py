"""End-to-end CLI runs: outputs, exit codes, determinism."""

from __future__ import annotations

import json

import pytest

from phyloquiver.cli import main

ULTRA3 = "x,y,z\n0,1,3\n1,0,3\n3,3,0\n"
TRI345 = "x,y,z\n0,3,4\n3,0,5\n4,5,0\n"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def g3_file(tmp_path):
    path = tmp_path / "g3.json"
    code = main(["gen", "g3", "-o", str(path)])
    assert code == 0
    return str(path)


class TestAnalyze:
    def test_g3_report(self, capsys, g3_file):
        code, out, _ = run(capsys, "analyze", g3_file)
        assert code == 0
        report = json.loads(out)
        rows = {r["id"]: r for r in report["vertices"]}
        assert [rows[v]["height"] for v in "ABC"] == [0, 1, 2]
        assert all(rows[v]["phylogenetic"] is True for v in "ABC")
        assert report["quiver"]["isotypy_class_count"] == 2

    def test_dot_input(self, capsys, tmp_path):
        path = tmp_path / "q.dot"
        path.write_text("digraph { B -> A; B -> C; C -> B; }")
        code, out, _ = run(capsys, "analyze", str(path))
        assert code == 0
        assert json.loads(out)["quiver"]["isotypy_class_count"] == 2

    def test_byte_identical_reruns(self, capsys, g3_file):
        _, first, _ = run(capsys, "analyze", g3_file)
        _, second, _ = run(capsys, "analyze", g3_file)
        assert first == second


class TestUniversal:
    def test_g3_c(self, capsys, g3_file):
        code, out, _ = run(capsys, "universal", g3_file, "C", "--bound", "8")
        assert code == 0
        obj = json.loads(out)
        assert obj["status"] == "universal"
        assert obj["vertices"] == ["A", "B", "C"]
        assert obj["bounded_check"] is True

    def test_none_for_abnormal_r(self, capsys, tmp_path):
        path = tmp_path / "ab.json"
        main(["gen", "abnormal", "-o", str(path)])
        code, out, _ = run(capsys, "universal", str(path), "R")
        assert code == 0
        assert json.loads(out)["status"] == "none"

    def test_undecided_status(self, capsys, tmp_path):
        path = tmp_path / "und.json"
        path.write_text(json.dumps({
            "vertices": ["P1", "P2", "Q1", "Q2", "R", "T"],
            "edges": [["Q1", "P1"], ["Q2", "P2"], ["R", "Q1"], ["R", "Q2"],
                      ["T", "P1"], ["T", "R"]],
        }))
        code, out, _ = run(capsys, "universal", str(path), "R")
        assert code == 0
        assert json.loads(out)["status"] == "undecided"

    def test_unknown_vertex_is_validation_failure(self, capsys, g3_file):
        code, _, err = run(capsys, "universal", g3_file, "Z")
        assert code == 1
        assert "unknown vertex" in err


class TestCladeCommand:
    def test_report(self, capsys, g3_file):
        code, out, _ = run(capsys, "clade", g3_file, "B")
        assert code == 0
        obj = json.loads(out)
        assert obj["members"] == ["B", "C"]
        assert obj["clade_heights"] == {"B": 0, "C": 0}


class TestESequenceAndForest:
    def test_esequence_of_s5(self, capsys, tmp_path):
        path = tmp_path / "s5.json"
        main(["gen", "surjection-quiver", "--n", "5", "-o", str(path)])
        code, out, _ = run(capsys, "esequence", str(path))
        assert code == 0
        obj = json.loads(out)
        assert obj["levels"] == [["1"], ["2", "3", "4", "5"]]
        assert obj["order"][0] == ["2", "3"]

    def test_esequence_rejects_g3(self, capsys, g3_file):
        code, _, err = run(capsys, "esequence", g3_file)
        assert code == 1 and "phylogenetic" in err

    def test_forest_formats(self, capsys, tmp_path):
        path = tmp_path / "s5.json"
        main(["gen", "surjection-quiver", "--n", "5", "-o", str(path)])
        code, out, _ = run(capsys, "forest", str(path))
        assert code == 0 and "2 -> 1;" in out
        code, out, _ = run(capsys, "forest", str(path), "--format", "newick")
        assert code == 0 and out == "(2:1,3:1,4:1,5:1)1;\n"
        code, out, _ = run(capsys, "forest", str(path), "--format", "json")
        assert code == 0 and json.loads(out)["roots"] == ["1"]


class TestTowers:
    def test_ultra_tower(self, capsys, tmp_path):
        path = tmp_path / "ultra3.csv"
        path.write_text(ULTRA3)
        code, out, _ = run(capsys, "ultra-tower", str(path))
        assert code == 0
        obj = json.loads(out)
        assert obj["length"] == 2
        assert [len(s["points"]) for s in obj["spaces"]] == [3, 2, 1]

    def test_metric_tower(self, capsys, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text(TRI345)
        code, out, _ = run(capsys, "metric-tower", str(path))
        assert code == 0
        obj = json.loads(out)
        assert obj["length"] == 1
        assert len(obj["spaces"][-1]["points"]) == 1

    def test_ultra_tower_rejects_metric_only_input(self, capsys, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text(TRI345)
        code, _, err = run(capsys, "ultra-tower", str(path))
        assert code == 1 and "ultrametric" in err

    def test_max_points_guard_gives_status_3(self, capsys, tmp_path):
        path = tmp_path / "ultra3.csv"
        path.write_text(ULTRA3)
        code, _, err = run(capsys, "ultra-tower", str(path), "--max-points", "2")
        assert code == 3 and "refused" in err


class TestReconstruct:
    def test_three_leaf_fixture_with_empty_prec(self, capsys, tmp_path):
        path = tmp_path / "leaves.csv"
        path.write_text("a1,a2,b1\n0,1,2\n1,0,2\n2,2,0\n")
        code, out, _ = run(capsys, "reconstruct", str(path), "--prec", "empty")
        assert code == 0
        obj = json.loads(out)
        assert [len(level) for level in obj["levels"]] == [1, 2, 3]
        assert obj["order"] == []

    def test_prec_file(self, capsys, tmp_path):
        matrix = tmp_path / "leaves.csv"
        matrix.write_text("a1,a2,b1\n0,1,2\n1,0,2\n2,2,0\n")
        prec = tmp_path / "prec.txt"
        prec.write_text("a1 b1\na2 b1\n")
        code, out, _ = run(capsys, "reconstruct", str(matrix), "--prec", str(prec))
        assert code == 0
        obj = json.loads(out)
        assert obj["order"] == [["1:a1", "1:b1"]]

    def test_malformed_csv_diagnostic(self, capsys, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n0,1e-3\n1e-3,0\n")
        code, _, err = run(capsys, "reconstruct", str(path), "--prec", "empty")
        assert code == 1
        assert "bad.csv:2:2" in err and "scientific" in err


class TestValidate:
    def test_metric_csv(self, capsys, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text(TRI345)
        code, out, _ = run(capsys, "validate", str(path))
        assert code == 0
        obj = json.loads(out)
        assert obj["is_metric"] is True and obj["is_ultrametric"] is False

    def test_non_metric_csv_fails(self, capsys, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n0,1,5\n1,0,1\n5,1,0\n")
        code, out, _ = run(capsys, "validate", str(path))
        assert code == 1
        assert json.loads(out)["problems"]

    def test_esequence_json(self, capsys, tmp_path):
        path = tmp_path / "e.json"
        path.write_text(json.dumps({
            "levels": [["r"], ["a", "b"]],
            "parent": {"a": "r", "b": "r"},
            "order": [["a", "b"]],
        }))
        code, out, _ = run(capsys, "validate", str(path))
        assert code == 0 and json.loads(out)["kind"] == "esequence"

    def test_quiver_json(self, capsys, g3_file):
        code, out, _ = run(capsys, "validate", g3_file)
        assert code == 0 and json.loads(out)["kind"] == "quiver"

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "validate", "no-such-file.json")
        assert code == 1 and "cannot read" in err


class TestGen:
    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as exc:
            main(["gen", "not-a-kind"])
        assert exc.value.code == 2

    def test_seeded_outputs_reproducible(self, capsys):
        _, first, _ = run(capsys, "gen", "random-quiver", "--n", "6", "--seed", "3")
        _, second, _ = run(capsys, "gen", "random-quiver", "--n", "6", "--seed", "3")
        assert first == second

    def test_rooted_tree(self, capsys):
        code, out, _ = run(
            capsys, "gen", "rooted-tree", "--edges", "r-x x-y", "--root", "r"
        )
        assert code == 0
        obj = json.loads(out)
        assert ["x", "r"] in obj["edges"] and ["y", "x"] in obj["edges"]

    def test_random_esequence_flags(self, capsys):
        code, out, _ = run(
            capsys, "gen", "random-esequence", "--levels", "3", "--width", "4",
            "--seed", "1", "--single-root", "--surjective",
        )
        assert code == 0
        assert len(json.loads(out)["levels"][0]) == 1

    def test_random_metric_csv(self, capsys):
        code, out, _ = run(capsys, "gen", "random-metric", "--n", "4", "--seed", "2")
        assert code == 0
        assert out.splitlines()[0] == "p0,p1,p2,p3"
